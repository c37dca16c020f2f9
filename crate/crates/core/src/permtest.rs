//! Permutation p-values for contextual importances.
//!
//! Each replicate shuffles the context column, which breaks any dependence
//! between the context and the other variables, and recomputes every score.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::build_forest;
use crate::importance::{forest_scores, ForestScores, ImportanceReport};
use crate::impurity::ImpurityKind;
use crate::rng::{Purpose, RngSpec};

/// How replicate forests are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NullMode {
    /// Grow a fresh forest on every permuted dataset.
    #[default]
    Rebuild,
    /// Rescore the observed forest on every permuted dataset.
    Reuse,
}

impl NullMode {
    pub fn name(self) -> &'static str {
        match self {
            NullMode::Rebuild => "rebuild",
            NullMode::Reuse => "reuse",
        }
    }
}

impl fmt::Display for NullMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NullMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rebuild" => Ok(NullMode::Rebuild),
            "reuse" => Ok(NullMode::Reuse),
            _ => Err(Error::InvalidParameter(format!("unknown null mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PermutationConfig {
    pub n_permutations: usize,
    /// Trees of the observed forest.
    pub n_trees: usize,
    /// Trees per replicate forest in rebuild mode.
    pub replicate_trees: usize,
    pub rng: RngSpec,
    pub kind: ImpurityKind,
    pub mode: NullMode,
    /// Keep every replicate's scores in the result.
    pub keep_null: bool,
}

impl PermutationConfig {
    pub fn new(n_permutations: usize, n_trees: usize, rng: RngSpec, kind: ImpurityKind) -> Self {
        PermutationConfig {
            n_permutations,
            n_trees,
            replicate_trees: n_trees,
            rng,
            kind,
            mode: NullMode::Rebuild,
            keep_null: false,
        }
    }
}

/// Observed scores and p-values, indexed `[context value][input]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PermutationResult {
    pub observed_abs: Vec<Vec<f64>>,
    pub observed_signed: Vec<Vec<f64>>,
    /// `(#{null abs >= observed abs} + 1) / (R + 1)`.
    pub pvalue_abs: Vec<Vec<f64>>,
    /// Two-sided: `(#{|null signed| >= |observed signed|} + 1) / (R + 1)`.
    pub pvalue_signed: Vec<Vec<f64>>,
    pub n_permutations: usize,
    pub replicate_trees: usize,
    pub seed: u64,
    pub mode: NullMode,
    /// Replicate abs scores `[replicate][context value][input]`, if kept.
    pub null_abs: Option<Vec<Vec<Vec<f64>>>>,
    pub null_signed: Option<Vec<Vec<Vec<f64>>>>,
    /// 95th percentile of every replicate abs score pooled together.
    pub null_abs_q95: f64,
}

impl PermutationResult {
    /// Copies the p-values into the matching report cells.
    pub fn apply(&self, report: &mut ImportanceReport) -> Result<()> {
        if report.variables.len() != self.observed_abs.first().map_or(0, Vec::len)
            || report.context_labels.len() != self.observed_abs.len()
        {
            return Err(Error::InvalidParameter(
                "permutation result does not match the report layout".into(),
            ));
        }
        for (m, var) in report.variables.iter_mut().enumerate() {
            for (c, cell) in var.contexts.iter_mut().enumerate() {
                cell.pvalue_abs = Some(self.pvalue_abs[c][m]);
                cell.pvalue_signed = Some(self.pvalue_signed[c][m]);
            }
        }
        report.meta.n_permutations = Some(self.n_permutations);
        report.meta.replicate_trees = match self.mode {
            NullMode::Rebuild => Some(self.replicate_trees),
            NullMode::Reuse => None,
        };
        Ok(())
    }
}

const TIE_TOL: f64 = 1e-12;

fn add_one(exceed: usize, r: usize) -> f64 {
    (exceed + 1) as f64 / (r + 1) as f64
}

fn quantile(mut xs: Vec<f64>, q: f64) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let pos = q * (xs.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    xs[lo] + (xs[hi] - xs[lo]) * (pos - lo as f64)
}

/// Permutation p-values of every contextual score.
///
/// The observed forest is the one [`crate::importance::analyze`] grows from
/// the same seed. Replicate `r` shuffles the context with stream
/// `permutation(r)` and, in rebuild mode, grows its forest from
/// `derive(Replicate, r)`. Results do not depend on thread count.
pub fn permutation_pvalues(
    dataset: &Dataset,
    inputs: &[usize],
    config: &PermutationConfig,
) -> Result<PermutationResult> {
    let context = dataset.context().ok_or(Error::NoContext)?;
    if config.n_permutations == 0 {
        return Err(Error::InvalidParameter("n_permutations must be >= 1".into()));
    }
    if config.n_trees == 0 || config.replicate_trees == 0 {
        return Err(Error::InvalidParameter("n_trees must be >= 1".into()));
    }
    let observed_forest = build_forest(dataset, inputs, config.n_trees, config.rng, config.kind)?;
    let observed = forest_scores(&observed_forest, dataset)?;
    let codes = dataset.codes(context).expect("context is categorical");

    let null: Vec<ForestScores> = (0..config.n_permutations)
        .into_par_iter()
        .map(|r| {
            let mut shuffled = codes.to_vec();
            shuffled.shuffle(&mut config.rng.permutation(r));
            let permuted = dataset.with_context_codes(shuffled)?;
            match config.mode {
                NullMode::Rebuild => {
                    let spec = config.rng.derive(Purpose::Replicate, r as u64);
                    let forest =
                        build_forest(&permuted, inputs, config.replicate_trees, spec, config.kind)?;
                    forest_scores(&forest, &permuted)
                }
                NullMode::Reuse => forest_scores(&observed_forest, &permuted),
            }
        })
        .collect::<Result<_>>()?;

    let r = config.n_permutations;
    let n_ctx = observed.abs.len();
    let n_in = observed.mdi.len();
    let mut pvalue_abs = vec![vec![0.0; n_in]; n_ctx];
    let mut pvalue_signed = vec![vec![0.0; n_in]; n_ctx];
    for c in 0..n_ctx {
        for m in 0..n_in {
            let obs_a = observed.abs[c][m];
            let obs_s = observed.signed[c][m].abs();
            let ea = null.iter().filter(|s| s.abs[c][m] >= obs_a - TIE_TOL).count();
            let es = null
                .iter()
                .filter(|s| s.signed[c][m].abs() >= obs_s - TIE_TOL)
                .count();
            pvalue_abs[c][m] = add_one(ea, r);
            pvalue_signed[c][m] = add_one(es, r);
        }
    }
    let pooled: Vec<f64> = null.iter().flat_map(|s| s.abs.iter().flatten().copied()).collect();
    let null_abs_q95 = quantile(pooled, 0.95);
    let (null_abs, null_signed) = if config.keep_null {
        (
            Some(null.iter().map(|s| s.abs.clone()).collect()),
            Some(null.iter().map(|s| s.signed.clone()).collect()),
        )
    } else {
        (None, None)
    };
    Ok(PermutationResult {
        observed_abs: observed.abs,
        observed_signed: observed.signed,
        pvalue_abs,
        pvalue_signed,
        n_permutations: r,
        replicate_trees: config.replicate_trees,
        seed: config.rng.seed,
        mode: config.mode,
        null_abs,
        null_signed,
        null_abs_q95,
    })
}

/// Data-driven cut-off for the characterization: the pooled 95th percentile
/// of null abs scores, floored at `1e-9`.
pub fn null_epsilon(result: &PermutationResult) -> f64 {
    result.null_abs_q95.max(1e-9)
}
