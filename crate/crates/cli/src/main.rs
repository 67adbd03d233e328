use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use hidden_orbits::classify::{
    builtin_example, classify_linear, verify_theorem, witness_germ, CaseTag, LinearSpec,
};
use hidden_orbits::dold::{admissible_periods, eigenvalue_orders, DoldEngine};
use hidden_orbits::jet::GermMap;
use hidden_orbits::normalform::poincare_dulac;
use hidden_orbits::numverify::{numeric_orbit_count, NumericConfig};
use hidden_orbits::Error;

/// Hidden periodic orbits of planar polynomial germs fixing the origin.
#[derive(Parser, Debug)]
#[command(name = "hidden-orbits", version, about)]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a germ file and show its linear part.
    Check {
        /// Germ file.
        germ: PathBuf,
    },
    /// Fixed-point index of the m-th iterate at the origin.
    Index {
        /// Germ file.
        germ: PathBuf,
        /// Iterate m.
        #[arg(long, default_value_t = 1)]
        period: u32,
    },
    /// Dold index table with the index consistency check.
    Dold {
        /// Germ file.
        germ: PathBuf,
        /// Period M.
        #[arg(long)]
        period: u32,
    },
    /// Number of periodic orbits of period M hidden at the origin.
    Orbits {
        /// Germ file.
        germ: PathBuf,
        /// Period M.
        #[arg(long)]
        period: u32,
    },
    /// Decide whether a linear part forces two hidden orbits of period M.
    Classify(SpecArgs),
    /// Emit the witness germ for a linear part and period.
    Witness {
        #[command(flatten)]
        spec: SpecArgs,
        /// Case tag (b1..b4, b1p..b4p, lone); defaults to the classified case.
        #[arg(long = "case")]
        case: Option<String>,
        /// Write the germ file here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a built-in example germ (e2 or c8).
    Example {
        /// e2 or c8.
        name: String,
        /// k for e2.
        #[arg(long, default_value_t = 2)]
        k: i64,
        /// First eigenvalue order for c8.
        #[arg(long, default_value_t = 2)]
        m1: i64,
        /// Second eigenvalue order for c8, relatively prime to m1.
        #[arg(long, default_value_t = 3)]
        m2: i64,
        /// a11,a12,a21,a22 for c8.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        coeffs: Option<Vec<i64>>,
        /// Write the germ file here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Poincaré–Dulac normal form through a degree.
    Normalform {
        /// Germ file.
        germ: PathBuf,
        /// Highest degree to normalize.
        #[arg(long)]
        degree: u32,
        /// Write the transform H to this germ file.
        #[arg(long)]
        transform_out: Option<PathBuf>,
        /// Write the normalized germ to this germ file.
        #[arg(long)]
        normalized_out: Option<PathBuf>,
    },
    /// Numeric cross-check of O_M by perturbation and Newton iteration.
    Verify {
        /// Germ file.
        germ: PathBuf,
        /// Period M.
        #[arg(long)]
        period: u32,
        /// Perturbation size of the first decade; the second uses a tenth of it.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// Radius of the search ball around the origin.
        #[arg(long, default_value_t = 0.35)]
        radius: f64,
        /// Number of Newton starts.
        #[arg(long, default_value_t = 2000)]
        starts: usize,
    },
    /// Check the classification against computed orbit counts on a grid of linear parts.
    TheoremScan {
        /// Largest eigenvalue order lcm and period in the grid.
        #[arg(long, default_value_t = 6)]
        max_lcm: u32,
        /// Random resonant perturbations per cell.
        #[arg(long, default_value_t = 3)]
        samples: u32,
    },
}

#[derive(Args, Debug)]
struct SpecArgs {
    /// Cyclotomic level L; eigenvalues are ζ_L^k1 and ζ_L^k2.
    #[arg(long)]
    level: u32,
    /// Exponent of the first eigenvalue.
    #[arg(long, allow_negative_numbers = true)]
    k1: i64,
    /// Exponent of the second eigenvalue.
    #[arg(long, allow_negative_numbers = true)]
    k2: i64,
    /// Use the Jordan block [[λ, 0], [1, λ]] (needs k1 = k2).
    #[arg(long)]
    jordan: bool,
    /// Period M.
    #[arg(long)]
    period: u32,
}

impl SpecArgs {
    fn spec(&self) -> Result<LinearSpec, Failure> {
        Ok(LinearSpec::new(self.level, self.k1, self.k2, !self.jordan)?)
    }
}

/// A command failure and its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::LevelTooLarge { .. }
            | Error::InvalidLevel(_)
            | Error::ContextMismatch { .. }
            | Error::TruncationMismatch { .. }
            | Error::NonzeroConstantTerm
            | Error::InvalidParams(_)
            | Error::Parse(_)
            | Error::NonDiagonal
            | Error::SingularLinearPart => Failure::Usage(e.to_string()),
            _ => Failure::Math(e.to_string()),
        }
    }
}

fn read_germ(path: &Path) -> Result<GermMap, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    GermMap::from_germ_file(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn emit_germ(germ: &GermMap, output: Option<&Path>, json_mode: bool) -> Result<String, Failure> {
    let text = germ.to_germ_file();
    match output {
        Some(p) => {
            write_out(p, &text)?;
            Ok(if json_mode {
                json!({"written": p.display().to_string(), "germ": germ.to_string()}).to_string()
            } else {
                format!("wrote {}\n{}", p.display(), germ)
            })
        }
        None => Ok(text.trim_end().to_string()),
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn check_period(m: u32) -> Result<(), Failure> {
    if m == 0 {
        return Err(Failure::Usage("--period must be positive".into()));
    }
    Ok(())
}

/// Run one command; the string goes to standard output.
fn run(cli: &Cli) -> Result<(String, bool), Failure> {
    let j = cli.json;
    let out = match &cli.command {
        Command::Check { germ } => {
            let f = read_germ(germ)?;
            let a = f.linear_part();
            let periods = admissible_periods(&a);
            let (o1, o2) = eigenvalue_orders(&a);
            if j {
                to_json(&json!({
                    "zeta_order": f.context().level(),
                    "truncation": f.truncation(),
                    "degree": f.degree(),
                    "germ": f.to_string(),
                    "linear_part": [[a.a11.to_string(), a.a12.to_string()], [a.a21.to_string(), a.a22.to_string()]],
                    "eigenvalue_orders": [o1, o2],
                    "admissible_periods": periods,
                }))
            } else {
                let show =
                    |o: Option<u32>| o.map_or("not a root of unity".to_string(), |v| v.to_string());
                format!(
                    "germ over Q(zeta_{}), truncation {}, degree {}\nf = {}\nDf(0) = {}\neigenvalue orders: {}, {}\nadmissible periods: {}",
                    f.context().level(),
                    f.truncation(),
                    f.degree(),
                    f,
                    a,
                    show(o1),
                    show(o2),
                    periods
                )
            }
        }
        Command::Index { germ, period } => {
            check_period(*period)?;
            let f = read_germ(germ)?;
            let r = DoldEngine::new(&f).index(*period)?;
            if j {
                to_json(&r)
            } else {
                let stab = r
                    .stabilized_at
                    .map_or(String::new(), |s| format!(", stabilized at {s}"));
                format!(
                    "mu(f^{}) = {}\nmethod: {}{}, truncation {}, {}",
                    period,
                    r.order,
                    r.method,
                    stab,
                    r.truncation,
                    if r.trusted { "trusted" } else { "untrusted" }
                )
            }
        }
        Command::Dold { germ, period } => {
            check_period(*period)?;
            let f = read_germ(germ)?;
            let r = DoldEngine::new(&f).index_consistency(*period)?;
            if j {
                to_json(&r)
            } else {
                r.to_string()
            }
        }
        Command::Orbits { germ, period } => {
            check_period(*period)?;
            let f = read_germ(germ)?;
            let r = DoldEngine::new(&f).report(*period)?;
            if j {
                to_json(&r)
            } else {
                r.to_string()
            }
        }
        Command::Classify(args) => {
            let spec = args.spec()?;
            let v = classify_linear(&spec, args.period)?;
            if j {
                to_json(&json!({"spec": spec, "verdict": v}))
            } else {
                v.to_string()
            }
        }
        Command::Witness { spec, case, output } => {
            let s = spec.spec()?;
            let tag = match case {
                Some(name) => CaseTag::parse(name)?,
                None => classify_linear(&s, spec.period)?.case.ok_or_else(|| {
                    Failure::Usage(format!(
                        "M={} is not a period of the linear part",
                        spec.period
                    ))
                })?,
            };
            let f = witness_germ(tag, &s, spec.period)?;
            emit_germ(&f, output.as_deref(), j)?
        }
        Command::Example {
            name,
            k,
            m1,
            m2,
            coeffs,
            output,
        } => {
            let args: Vec<i64> = match name.as_str() {
                "e2" => vec![*k],
                "c8" => {
                    let mut v = vec![*m1, *m2];
                    if let Some(a) = coeffs {
                        if a.len() != 4 {
                            return Err(Failure::Usage(
                                "--coeffs takes four values a11,a12,a21,a22".into(),
                            ));
                        }
                        v.extend(a);
                    }
                    v
                }
                _ => vec![],
            };
            let f = builtin_example(name, &args)?;
            emit_germ(&f, output.as_deref(), j)?
        }
        Command::Normalform {
            germ,
            degree,
            transform_out,
            normalized_out,
        } => {
            let f = read_germ(germ)?;
            let nf = poincare_dulac(&f, *degree)?;
            if let Some(p) = transform_out {
                write_out(p, &nf.transform.to_germ_file())?;
            }
            if let Some(p) = normalized_out {
                write_out(p, &nf.normalized.to_germ_file())?;
            }
            let support = nf.resonant_support();
            if j {
                to_json(&json!({
                    "degree": degree,
                    "resonant_support": support,
                    "transform": nf.transform.to_string(),
                    "normalized": nf.normalized.to_string(),
                }))
            } else {
                let mut s = format!("normal form through degree {degree}\nH = {}\ng = {}\nresonant support (j, i1, i2):", nf.transform, nf.normalized);
                if support.is_empty() {
                    s.push_str(" none");
                }
                for r in &support {
                    s.push_str(&format!(
                        "\n  ({}, {}, {})",
                        r.j, r.exponents.0, r.exponents.1
                    ));
                }
                s
            }
        }
        Command::Verify {
            germ,
            period,
            epsilon,
            radius,
            starts,
        } => {
            check_period(*period)?;
            let f = read_germ(germ)?;
            let cfg = NumericConfig {
                epsilon: *epsilon,
                radius: *radius,
                starts: *starts,
                seed: cli.seed,
                ..NumericConfig::default()
            };
            let r = numeric_orbit_count(&f, *period, &cfg)?;
            let text = if j { to_json(&r) } else { r.to_string() };
            return Ok((text, r.agreement && r.matches_exact));
        }
        Command::TheoremScan { max_lcm, samples } => {
            let r = verify_theorem(*max_lcm, *samples, cli.seed)?;
            let text = if j { to_json(&r) } else { r.to_string() };
            return Ok((text, r.all_pass()));
        }
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            log::warn!("could not configure the thread pool: {e}");
        }
    }
    match run(&cli) {
        Ok((text, ok)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\nhint: run with --help for usage");
            ExitCode::from(2)
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
