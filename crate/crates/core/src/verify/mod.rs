//! Verification suites: each runs a family of cases through the library
//! and turns the measured numbers into a [`VerificationReport`].
//!
//! Suites are deterministic functions of their config. Cases run in
//! parallel and are collected in input order.

use std::sync::Arc;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FracError, Result};
use crate::fields::{make_grid, GridSpec};

mod calculus;
mod inequalities;
mod record;

pub use calculus::{
    convergence_study, suite_adjointness, suite_commutation, suite_convergence, suite_decay, suite_laplacian,
    suite_rigidity, suite_young, kappa_theory, AdjointnessConfig, CommutationConfig, ConvergenceConfig, DecayConfig,
    LaplacianConfig, RigidityConfig, StudyConfig, StudyOp, YoungConfig,
};
pub use inequalities::{
    counterexample_lower_bound, suite_bb_l1, suite_counterexample, suite_holder, suite_poincare, suite_sobolev,
    suite_sum_space, suite_wsp_od, BbL1Config, CounterexampleConfig, HolderConfig, PoincareConfig, SobolevCase,
    SobolevConfig, SumSpaceConfig, WspOdConfig,
};
pub use record::{CaseRecord, Check, Num, Relation, VerificationReport, Verdict};

/// Every suite id, in the order `all` runs them.
pub const SUITES: &[&str] = &[
    "adjointness",
    "commutation",
    "young",
    "laplacian",
    "bb_l1",
    "sobolev",
    "poincare",
    "holder",
    "counterexample",
    "rigidity",
    "sum_space",
    "wsp_od",
    "decay",
    "convergence",
];

/// Grid values shared by suites that do not set their own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDefaults {
    pub half_width: Option<f64>,
    pub points: Option<usize>,
}

/// Committed empirical constants that suites regress against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    pub bb_l1: f64,
    pub sobolev_1d: f64,
    pub sobolev_2d: f64,
    pub poincare: f64,
    pub holder: f64,
}

impl Default for Baselines {
    fn default() -> Self {
        serde_json::from_str(include_str!("../../baselines/desk.json")).expect("embedded baselines parse")
    }
}

/// Everything a suite needs beyond its own section.
#[derive(Debug, Clone, Copy, Default)]
pub struct SuiteContext {
    pub grid: GridDefaults,
    pub seed: u64,
    pub baselines: Baselines,
}

/// Per-suite sections of a run config.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfigs {
    pub adjointness: AdjointnessConfig,
    pub commutation: CommutationConfig,
    pub young: YoungConfig,
    pub laplacian: LaplacianConfig,
    pub bb_l1: BbL1Config,
    pub sobolev: SobolevConfig,
    pub poincare: PoincareConfig,
    pub holder: HolderConfig,
    pub counterexample: CounterexampleConfig,
    pub rigidity: RigidityConfig,
    pub sum_space: SumSpaceConfig,
    pub wsp_od: WspOdConfig,
    pub decay: DecayConfig,
    pub convergence: ConvergenceConfig,
}

/// Runs one suite by id.
pub fn run_suite(id: &str, cfgs: &SuiteConfigs, ctx: &SuiteContext) -> Result<VerificationReport> {
    match id {
        "adjointness" => suite_adjointness(&cfgs.adjointness, ctx),
        "commutation" => suite_commutation(&cfgs.commutation, ctx),
        "young" => suite_young(&cfgs.young, ctx),
        "laplacian" => suite_laplacian(&cfgs.laplacian, ctx),
        "bb_l1" => suite_bb_l1(&cfgs.bb_l1, ctx),
        "sobolev" => suite_sobolev(&cfgs.sobolev, ctx),
        "poincare" => suite_poincare(&cfgs.poincare, ctx),
        "holder" => suite_holder(&cfgs.holder, ctx),
        "counterexample" => suite_counterexample(&cfgs.counterexample, ctx),
        "rigidity" => suite_rigidity(&cfgs.rigidity, ctx),
        "sum_space" => suite_sum_space(&cfgs.sum_space, ctx),
        "wsp_od" => suite_wsp_od(&cfgs.wsp_od, ctx),
        "decay" => suite_decay(&cfgs.decay, ctx),
        "convergence" => suite_convergence(&cfgs.convergence, ctx),
        other => Err(FracError::Config(format!("unknown suite `{other}`"))),
    }
}

// ---------------------------------------------------------------------------
// shared helpers

pub(crate) fn config_err(msg: impl Into<String>) -> FracError {
    FracError::Config(msg.into())
}

/// Suite value, else the global default, else the built-in one.
pub(crate) fn resolve<T: Copy>(own: Option<T>, global: Option<T>, builtin: T) -> T {
    own.or(global).unwrap_or(builtin)
}

pub(crate) fn grid(dim: usize, half_width: f64, points: usize) -> Result<Arc<GridSpec>> {
    make_grid(dim, half_width, points).map_err(|e| config_err(e.to_string()))
}

pub(crate) fn check_ladder(name: &str, ladder: &[usize], min_len: usize) -> Result<()> {
    if ladder.len() < min_len {
        return Err(config_err(format!("{name}: grid ladder needs at least {min_len} entries")));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err(format!("{name}: grid ladder must be strictly increasing")));
    }
    Ok(())
}

pub(crate) fn check_nonempty<T>(name: &str, what: &str, items: &[T]) -> Result<()> {
    if items.is_empty() {
        Err(config_err(format!("{name}: `{what}` is empty")))
    } else {
        Ok(())
    }
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub(crate) fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Ordered subset of `k` items chosen by a seeded generator; all items
/// when `k` is absent or not smaller than the family.
pub(crate) fn subsample<T: Clone>(items: &[T], k: Option<usize>, seed: u64, salt: &str) -> Vec<T> {
    match k {
        Some(k) if k < items.len() => {
            let mut h = seed;
            for b in salt.bytes() {
                h = h.wrapping_mul(0x100000001b3).wrapping_add(b as u64);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(h);
            let mut idx = sample(&mut rng, items.len(), k).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| items[i].clone()).collect()
        }
        _ => items.to_vec(),
    }
}

pub(crate) fn to_config_value<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

/// Least-squares line `y = a + b x`; returns `(a, b, max |residual| / |y|)`.
pub(crate) fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| ((a + b * xi - yi) / yi).abs())
        .fold(0.0, f64::max);
    (a, b, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsample_is_seeded_and_ordered() {
        let items: Vec<usize> = (0..20).collect();
        let a = subsample(&items, Some(5), 7, "x");
        assert_eq!(a, subsample(&items, Some(5), 7, "x"));
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(subsample(&items, None, 7, "x"), items);
    }

    #[test]
    fn ladder_must_increase() {
        assert!(check_ladder("t", &[4, 8, 8], 3).is_err());
        assert!(check_ladder("t", &[4, 8], 3).is_err());
        assert!(check_ladder("t", &[4, 8, 16], 3).is_ok());
    }

    #[test]
    fn embedded_baselines_parse() {
        let b = Baselines::default();
        assert!(b.bb_l1 > 0.0 && b.poincare > 0.0);
    }
}
