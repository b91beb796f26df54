//! Seeded, replayable property campaigns. Every suite is registered by name
//! with the statement it checks; trial i draws from its own ChaCha8 stream
//! (seed, stream = i), so any trial can be replayed alone.

mod samplers;
mod trials;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use samplers::{sample_shape_instance, sample_tame_weights, triangularize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteInfo {
    pub name: &'static str,
    pub statement: &'static str,
    /// `None` for exhaustive suites, whose trial count is the size of the enumeration.
    pub default_trials: Option<usize>,
}

pub const REGISTRY: &[SuiteInfo] = &[
    SuiteInfo {
        name: "property-z-uniqueness",
        statement: "exactly one unipotent C over k_E gives A·C Property Z, and it is the computed one",
        default_trials: None,
    },
    SuiteInfo {
        name: "ordering-audit",
        statement: "for M1 = M2·diag(u^r)·M4 upper triangular with M2 invertible, r_{k_x} = t_x and Σr = Σt",
        default_trials: Some(500),
    },
    SuiteInfo {
        name: "q-factorization",
        statement: "diag(u^r)·M4·M7 = Q·diag(u^{r_{k_x}}) with Q in GL_d(k_E + u^δ·k_E[[u]])",
        default_trials: Some(500),
    },
    SuiteInfo {
        name: "shape-roundtrip",
        statement: "X = X1·X0 with X0 in (P), X1 in (DEG), and X0·A = B·diag(u^t), B in GL_d(k_E + u^δ·k_E[[u]])",
        default_trials: Some(500),
    },
    SuiteInfo {
        name: "allowable-biconditional",
        statement:
            "an allowable step preserves and reflects (P); (P) matrices reduce to diagonal in at most d(d-1)/2 steps",
        default_trials: Some(1000),
    },
    SuiteInfo {
        name: "tameinertia",
        statement: "diagonal valuations of a triangular φ-family split as r_0∘σ_0 + r_1∘σ_1",
        default_trials: Some(500),
    },
    SuiteInfo {
        name: "prop-shape",
        statement: "under A1 and A2 each F_i = C_i·F1·F0 exactly with both factors in (P)",
        default_trials: Some(200),
    },
    SuiteInfo {
        name: "rank1-reduction",
        statement: "reducing a rank-one module gives t_i = Σ_j r_{i,j} and a = â mod ϖ",
        default_trials: None,
    },
    SuiteInfo {
        name: "tame-differences",
        statement: "v(π_j - π_q) = 1 for distinct roots of u^{e0} - p",
        default_trials: None,
    },
    SuiteInfo {
        name: "property-b-closure",
        statement: "Property B at π is closed under products",
        default_trials: Some(1000),
    },
    SuiteInfo {
        name: "property-a-coe2",
        statement: "(u - π_j) divides N(H) + 1, and H^ℓ/(G·ℓ!) has Property B for 1 <= ℓ < p",
        default_trials: None,
    },
    SuiteInfo {
        name: "taylor-twist",
        statement: "the twist Σ H^ℓ·N^ℓ(f)/ℓ! agrees with f at π_q for every q <= j",
        default_trials: Some(200),
    },
    SuiteInfo {
        name: "block-linearity",
        statement: "block factorizations with shared diagonal factors are closed under a·C1 + b·C2",
        default_trials: Some(200),
    },
];

pub fn suite_info(name: &str) -> Option<&'static SuiteInfo> {
    REGISTRY.iter().find(|s| s.name == name)
}

/// Campaign parameters; unset fields take suite defaults. For randomized
/// suites `d` and `f` are upper bounds.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub e: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub f: Option<usize>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none", default)]
    pub big_m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub delta: Option<usize>,
}

/// Parameters with every field the suite uses filled in.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Resolved {
    pub p: u32,
    pub m: u32,
    pub e: u32,
    pub d: usize,
    pub f: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub big_m: u32,
    pub delta: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub suite: String,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub statement: String,
    pub params: Value,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_counterexample: Option<TrialOutcome>,
    pub outcomes: Vec<TrialOutcome>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.trials > 0
    }
}

/// The generator for trial `index` of a campaign with `seed`.
pub fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn thread_pool() -> Result<Option<rayon::ThreadPool>> {
    match std::env::var("KISINLAB_THREADS") {
        Err(_) => Ok(None),
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Error::ConfigError(format!("KISINLAB_THREADS = {v:?} is not a positive integer")))?;
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map(Some)
                .map_err(|e| Error::ConfigError(e.to_string()))
        }
    }
}

pub fn run_suite(c: &Campaign) -> Result<Report> {
    let info = suite_info(&c.suite).ok_or_else(|| Error::ConfigError(format!("unknown suite {:?}", c.suite)))?;
    let prepared = trials::prepare(info.name, &c.params)?;
    let count = match (c.trials, prepared.enumerated()) {
        (Some(t), Some(n)) => t.min(n),
        (Some(t), None) => t,
        (None, Some(n)) => n,
        (None, None) => info.default_trials.expect("randomized suites have a default"),
    };
    let run = || -> Vec<TrialOutcome> {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(c.seed, i);
                match prepared.trial(i, &mut rng) {
                    Ok(detail) => TrialOutcome { trial: i, pass: true, detail },
                    Err(detail) => TrialOutcome { trial: i, pass: false, detail },
                }
            })
            .collect()
    };
    let outcomes = match thread_pool()? {
        Some(pool) => pool.install(run),
        None => run(),
    };
    let passed = outcomes.iter().filter(|o| o.pass).count();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        suite: info.name.to_string(),
        statement: info.statement.to_string(),
        params: serde_json::to_value(prepared.resolved()).expect("parameters serialize"),
        seed: c.seed,
        trials: count,
        passed,
        failed: count - passed,
        first_counterexample: outcomes.iter().find(|o| !o.pass).cloned(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn campaign(suite: &str, trials: Option<usize>) -> Campaign {
        Campaign { suite: suite.into(), params: Params::default(), seed: 7, trials }
    }

    #[test]
    fn every_suite_passes_a_short_campaign() {
        for s in REGISTRY {
            let r = run_suite(&campaign(s.name, Some(6))).unwrap();
            assert!(r.all_passed(), "{}: {:?}", s.name, r.first_counterexample);
        }
    }

    #[test]
    fn replay_is_deterministic() {
        let a = run_suite(&campaign("shape-roundtrip", Some(10))).unwrap();
        let b = run_suite(&campaign("shape-roundtrip", Some(10))).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn unknown_suite_and_bad_parameters() {
        assert!(matches!(run_suite(&campaign("nope", None)), Err(Error::ConfigError(_))));
        let mut c = campaign("tame-differences", None);
        c.params.e = Some(3);
        assert!(matches!(run_suite(&c), Err(Error::ConfigError(_))));
    }
}
