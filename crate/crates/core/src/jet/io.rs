//! Germ files: a JSON document holding `zeta_order`, `truncation` and two
//! component term lists `{"e": [i1, i2], "c": "<coeff>"}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{degree, Exp, GermMap, Jet2};
use crate::error::{Error, Result};
use crate::exactnum::{parse_coeff, CycloContext};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermEntry {
    e: [u32; 2],
    c: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GermFile {
    zeta_order: u32,
    truncation: u32,
    components: [Vec<TermEntry>; 2],
}

impl GermMap {
    /// Canonical germ file text; terms are listed in lexicographic exponent order.
    pub fn to_germ_file(&self) -> String {
        let entries = |j: &Jet2| {
            j.raw_terms()
                .iter()
                .map(|(e, c)| TermEntry {
                    e: [e.0, e.1],
                    c: j.ctx.display(c),
                })
                .collect::<Vec<_>>()
        };
        let doc = GermFile {
            zeta_order: self.context().level(),
            truncation: self.truncation(),
            components: [entries(&self.comps[0]), entries(&self.comps[1])],
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("germ documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_germ_file(text: &str) -> Result<GermMap> {
        let doc: GermFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.truncation == 0 || doc.truncation > super::MAX_TRUNCATION {
            return Err(Error::Parse(format!(
                "truncation {} out of range",
                doc.truncation
            )));
        }
        let ctx = CycloContext::new(doc.zeta_order)?;
        let mut comps = Vec::with_capacity(2);
        for (idx, list) in doc.components.iter().enumerate() {
            let mut terms: BTreeMap<Exp, _> = BTreeMap::new();
            for t in list {
                let e = (t.e[0], t.e[1]);
                if degree(e) > doc.truncation {
                    return Err(Error::Parse(format!(
                        "component {} term x1^{} x2^{} exceeds truncation {}",
                        idx + 1,
                        e.0,
                        e.1,
                        doc.truncation
                    )));
                }
                let c = parse_coeff(&ctx, &t.c)?;
                if terms.insert(e, c).is_some() {
                    return Err(Error::Parse(format!(
                        "component {} repeats exponent {:?}",
                        idx + 1,
                        t.e
                    )));
                }
            }
            comps.push(Jet2::from_terms(&ctx, doc.truncation, terms)?);
        }
        let second = comps.pop().expect("two components");
        let first = comps.pop().expect("two components");
        GermMap::new(first, second)
    }
}
