//! Property suites that re-check the fixed-point theory numerically and report as JSON.

mod suites;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::PrimeContext;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SuiteId {
    Prop1,
    Prop2,
    Prop3,
    Prop4,
    Prop5,
    Prop6,
    Prop7,
    Prop8,
    Prop9,
    RemarkPhi1,
    RemarkDerivative,
    Cocycle,
    Legendre,
}

impl SuiteId {
    pub const ALL: [SuiteId; 13] = [
        SuiteId::Prop1,
        SuiteId::Prop2,
        SuiteId::Prop3,
        SuiteId::Prop4,
        SuiteId::Prop5,
        SuiteId::Prop6,
        SuiteId::Prop7,
        SuiteId::Prop8,
        SuiteId::Prop9,
        SuiteId::RemarkPhi1,
        SuiteId::RemarkDerivative,
        SuiteId::Cocycle,
        SuiteId::Legendre,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteId::Prop1 => "prop1",
            SuiteId::Prop2 => "prop2",
            SuiteId::Prop3 => "prop3",
            SuiteId::Prop4 => "prop4",
            SuiteId::Prop5 => "prop5",
            SuiteId::Prop6 => "prop6",
            SuiteId::Prop7 => "prop7",
            SuiteId::Prop8 => "prop8",
            SuiteId::Prop9 => "prop9",
            SuiteId::RemarkPhi1 => "remark_phi1",
            SuiteId::RemarkDerivative => "remark_derivative",
            SuiteId::Cocycle => "cocycle",
            SuiteId::Legendre => "legendre",
        }
    }

    fn index(&self) -> u64 {
        SuiteId::ALL.iter().position(|s| s == self).unwrap() as u64
    }

    /// Suites whose checks make sense for any prime and ramification.
    fn is_generic(&self) -> bool {
        matches!(
            self,
            SuiteId::Prop1 | SuiteId::Cocycle | SuiteId::Legendre | SuiteId::RemarkDerivative
        )
    }

    /// Default `(p, e, K)` triples; `K` is in pi-units.
    fn default_contexts(&self) -> Vec<(u32, u32, i64)> {
        match self {
            SuiteId::Prop1 => vec![(3, 1, 40), (5, 1, 40), (7, 1, 40), (5, 3, 60)],
            SuiteId::Prop2 => vec![(3, 1, 60), (5, 3, 45)],
            SuiteId::Prop3 => vec![(2, 1, 40), (3, 1, 40), (5, 3, 60), (7, 5, 100), (5, 5, 100)],
            SuiteId::Prop4 => vec![(3, 1, 60), (5, 3, 45), (5, 10, 60), (7, 5, 50), (3, 2, 40)],
            SuiteId::Prop5 => vec![(5, 10, 200), (5, 3, 90)],
            SuiteId::Prop6 => vec![(5, 3, 90), (3, 1, 60)],
            SuiteId::Prop7 => vec![(3, 1, 60), (5, 3, 90)],
            SuiteId::Prop8 => vec![(3, 1, 60), (5, 3, 45)],
            SuiteId::Prop9 => vec![(3, 1, 60)],
            SuiteId::RemarkPhi1 => vec![(5, 12, 60), (3, 1, 60), (5, 3, 45), (7, 5, 50)],
            SuiteId::RemarkDerivative => {
                vec![(5, 1, 20), (7, 1, 20), (11, 1, 20), (13, 1, 20), (5, 3, 45)]
            }
            SuiteId::Cocycle => vec![(3, 1, 40), (5, 1, 40), (7, 1, 40), (5, 3, 60)],
            SuiteId::Legendre => vec![(2, 1, 2), (3, 1, 2), (5, 1, 2), (7, 1, 2)],
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Debug)]
pub struct HarnessConfig {
    pub seed: u64,
    /// Restrict (or, for prime-generic suites, replace) the default contexts.
    pub p: Option<u32>,
    pub e: Option<u32>,
    /// Working precision override in pi-units.
    pub k: Option<i64>,
    /// Every working precision is divided by this factor.
    pub precision_divisor: i64,
    /// Record wall-clock time; reports are then no longer byte-identical across runs.
    pub timing: bool,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 0,
            p: None,
            e: None,
            k: None,
            precision_divisor: 1,
            timing: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub p: u32,
    pub e: u32,
    #[serde(rename = "K")]
    pub k: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub anchor: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub params: Vec<SuiteParams>,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub elapsed_ms: Option<u64>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn resolve_contexts(id: SuiteId, config: &HarnessConfig) -> Result<Vec<PrimeContext>> {
    let incompatible = |reason: String| Error::IncompatibleContext {
        suite: id.to_string(),
        reason,
    };
    let mut triples = id.default_contexts();
    if let Some(p) = config.p {
        triples.retain(|&(dp, de, _)| dp == p && config.e.is_none_or(|e| e == de));
        if triples.is_empty() {
            if !id.is_generic() {
                return Err(incompatible(format!(
                    "supported (p, e) are {:?}",
                    id.default_contexts()
                        .iter()
                        .map(|t| (t.0, t.1))
                        .collect::<Vec<_>>()
                )));
            }
            let e = config.e.unwrap_or(1);
            triples.push((p, e, 40 * e as i64));
        }
    } else if config.e.is_some() {
        return Err(incompatible("a ramification override needs a prime".into()));
    }
    let divisor = config.precision_divisor.max(1);
    triples
        .into_iter()
        .map(|(p, e, k)| {
            let k = (config.k.unwrap_or(k) / divisor).max(2 * e as i64);
            PrimeContext::new(p, e, k).map_err(|err| incompatible(err.to_string()))
        })
        .collect()
}

pub fn run_suite(id: SuiteId, config: &HarnessConfig) -> Result<SuiteReport> {
    let contexts = resolve_contexts(id, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(id.index());
    let start = Instant::now();
    let assertions = suites::run(id, &contexts, &mut rng)?;
    let elapsed = start.elapsed();
    Ok(SuiteReport {
        suite: id.to_string(),
        params: contexts
            .iter()
            .map(|c| SuiteParams {
                p: c.p(),
                e: c.e(),
                k: c.k(),
            })
            .collect(),
        seed: config.seed,
        assertions,
        elapsed_ms: config.timing.then_some(elapsed.as_millis() as u64),
    })
}

/// Every suite, in canonical order; suites run concurrently.
pub fn run_all(config: &HarnessConfig) -> Result<Vec<SuiteReport>> {
    SuiteId::ALL
        .par_iter()
        .map(|&id| run_suite(id, config))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_ids_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.as_str().parse::<SuiteId>().unwrap(), id);
        }
        assert_eq!(
            "prop10".parse::<SuiteId>().unwrap_err(),
            Error::UnknownSuite("prop10".into())
        );
    }

    #[test]
    fn context_overrides() {
        let cfg = HarnessConfig {
            p: Some(11),
            ..HarnessConfig::default()
        };
        let ctxs = resolve_contexts(SuiteId::Prop1, &cfg).unwrap();
        assert_eq!((ctxs[0].p(), ctxs[0].e()), (11, 1));
        assert!(matches!(
            resolve_contexts(SuiteId::Prop9, &cfg),
            Err(Error::IncompatibleContext { .. })
        ));
        let cfg = HarnessConfig {
            p: Some(5),
            e: Some(3),
            precision_divisor: 2,
            ..HarnessConfig::default()
        };
        let ctxs = resolve_contexts(SuiteId::Prop6, &cfg).unwrap();
        assert_eq!(ctxs.len(), 1);
        assert_eq!(ctxs[0].k(), 45);
    }

    #[test]
    fn legendre_report_is_deterministic() {
        let cfg = HarnessConfig::default();
        let a = run_suite(SuiteId::Legendre, &cfg).unwrap();
        let b = run_suite(SuiteId::Legendre, &cfg).unwrap();
        assert!(a.passed());
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_json().contains("\"elapsed_ms\":null"));
    }
}
