//! Network mode: every variable in turn is the target and all others are
//! inputs, giving one directed interaction matrix per context value.
//!
//! Numeric inputs are binned on quantiles; a numeric target keeps its raw
//! values under variance impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::dataset::{CategoricalColumn, Column, Dataset, Table};
use crate::error::{Error, Result};
use crate::forest::build_forest;
use crate::importance::mdi;
use crate::impurity::ImpurityKind;
use crate::permtest::{permutation_pvalues, NullMode, PermutationConfig};
use crate::rng::{Purpose, RngSpec};

/// Bins `values` into at most `bins` quantile classes.
///
/// Cut points are the sorted values at ranks `floor(k n / bins)` for
/// `k = 1..bins`, deduplicated and above the minimum; a value's bin is the
/// number of cut points not exceeding it, so equal values share a bin.
pub fn discretize(values: &[f64], bins: usize) -> Result<CategoricalColumn> {
    if bins < 2 {
        return Err(Error::InvalidParameter(format!("bins must be >= 2, got {bins}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("cannot bin non-finite values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut cuts: Vec<f64> = (1..bins)
        .filter_map(|k| sorted.get(k * n / bins).copied())
        .collect();
    cuts.dedup();
    cuts.retain(|&c| Some(&c) != sorted.first());
    let codes: Vec<u32> = values
        .iter()
        .map(|v| cuts.partition_point(|c| c <= v) as u32)
        .collect();
    let used = codes.iter().copied().max().map_or(1, |m| m as usize + 1);
    CategoricalColumn::from_codes(codes, used)
}

/// How each directed pair is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairScore {
    /// Node-level contextual scores of a single forest.
    #[default]
    Contextual,
    /// Difference between a forest on all samples and one on the context slice.
    TwoForest,
}

#[derive(Clone, Debug)]
pub struct PairwiseConfig {
    pub n_trees: usize,
    pub n_permutations: usize,
    pub replicate_trees: usize,
    pub rng: RngSpec,
    pub level: f64,
    pub bins: usize,
    pub mode: NullMode,
}

impl PairwiseConfig {
    pub fn new(n_trees: usize, n_permutations: usize, rng: RngSpec) -> Self {
        PairwiseConfig {
            n_trees,
            n_permutations,
            replicate_trees: n_trees,
            rng,
            level: 0.05,
            bins: 5,
            mode: NullMode::Rebuild,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "level must lie in (0, 1), got {}",
                self.level
            )));
        }
        if self.n_trees == 0 || self.replicate_trees == 0 || self.n_permutations == 0 {
            return Err(Error::InvalidParameter(
                "tree and permutation counts must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairCell {
    /// Abs score, or the absolute two-forest difference.
    pub abs: f64,
    /// Signed score, or the two-forest difference.
    pub signed: f64,
    pub pvalue: f64,
    pub significant: bool,
}

/// Directed scores at one context value: `cells[i][j]` is input `j` when
/// variable `i` is the target. The diagonal is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionMatrix {
    pub names: Vec<String>,
    pub context_value: u32,
    pub context_label: String,
    pub level: f64,
    pub score: PairScore,
    pub cells: Vec<Vec<Option<PairCell>>>,
}

impl InteractionMatrix {
    pub fn cell(&self, target: usize, input: usize) -> Option<&PairCell> {
        self.cells.get(target)?.get(input)?.as_ref()
    }

    /// `(target, input)` of every significant cell, row-major.
    pub fn significant(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, row) in self.cells.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_some_and(|c| c.significant) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// Per-target datasets over the variables other than `context`.
struct Network {
    variables: Vec<usize>,
    binned: Vec<Column>,
    table: Table,
    context: usize,
}

impl Network {
    fn new(table: &Table, context: usize, bins: usize) -> Result<Self> {
        if context >= table.n_columns() {
            return Err(Error::UnknownColumn(context.to_string()));
        }
        if table.column(context).as_categorical().is_none() {
            return Err(Error::Dataset("context column must be categorical".into()));
        }
        let variables: Vec<usize> = (0..table.n_columns()).filter(|&c| c != context).collect();
        if variables.len() < 2 {
            return Err(Error::Dataset(
                "network mode needs at least two non-context columns".into(),
            ));
        }
        let binned = (0..table.n_columns())
            .map(|c| match table.column(c) {
                Column::Numeric(v) => discretize(v, bins).map(Column::Categorical),
                other => Ok(other.clone()),
            })
            .collect::<Result<_>>()?;
        Ok(Network {
            variables,
            binned,
            table: table.clone(),
            context,
        })
    }

    fn dataset(&self, target: usize) -> Result<Dataset> {
        let columns = (0..self.table.n_columns())
            .map(|c| {
                if c == target {
                    self.table.column(c).clone()
                } else {
                    self.binned[c].clone()
                }
            })
            .collect();
        let table = Table::new(self.table.names().to_vec(), columns)?;
        Dataset::new(table, target, Some(self.context))
    }

    fn names(&self) -> Vec<String> {
        self.variables
            .iter()
            .map(|&c| self.table.names()[c].clone())
            .collect()
    }
}

/// `[context value][input]` scores and p-values for one target.
struct TargetResult {
    abs: Vec<Vec<f64>>,
    signed: Vec<Vec<f64>>,
    pvalue: Vec<Vec<f64>>,
}

fn contextual_target(ds: &Dataset, config: &PairwiseConfig, spec: RngSpec) -> Result<TargetResult> {
    let kind = ImpurityKind::for_target(ds.target_kind());
    let perm = PermutationConfig {
        n_permutations: config.n_permutations,
        n_trees: config.n_trees,
        replicate_trees: config.replicate_trees,
        rng: spec,
        kind,
        mode: config.mode,
        keep_null: false,
    };
    let r = permutation_pvalues(ds, &ds.input_columns(), &perm)?;
    Ok(TargetResult {
        abs: r.observed_abs,
        signed: r.observed_signed,
        pvalue: r.pvalue_abs,
    })
}

/// `Imp - Imp(.|Xc=c)` for every context value; empty slices give 0.
fn two_forest_scores(
    ds: &Dataset,
    inputs: &[usize],
    imp: &[f64],
    trees: usize,
    spec: RngSpec,
    kind: ImpurityKind,
) -> Result<Vec<Vec<f64>>> {
    (0..ds.context_arity()?)
        .map(|c| {
            let rows = ds.context_rows(c as u32)?;
            if rows.is_empty() {
                return Ok(vec![0.0; inputs.len()]);
            }
            let slice = ds.select_rows(&rows)?;
            let forest = build_forest(&slice, inputs, trees, spec.derive(Purpose::Baseline, c as u64), kind)?;
            let within = mdi(&forest, &slice)?;
            Ok(imp.iter().zip(within).map(|(a, b)| a - b).collect())
        })
        .collect()
}

fn two_forest_target(ds: &Dataset, config: &PairwiseConfig, spec: RngSpec) -> Result<TargetResult> {
    let kind = ImpurityKind::for_target(ds.target_kind());
    let inputs = ds.input_columns();
    let forest = build_forest(ds, &inputs, config.n_trees, spec, kind)?;
    let imp = mdi(&forest, ds)?;
    let observed = two_forest_scores(ds, &inputs, &imp, config.n_trees, spec, kind)?;
    let codes = ds.context_codes()?;
    let null: Vec<Vec<Vec<f64>>> = (0..config.n_permutations)
        .into_par_iter()
        .map(|r| {
            let mut shuffled = codes.to_vec();
            shuffled.shuffle(&mut spec.permutation(r));
            let permuted = ds.with_context_codes(shuffled)?;
            let rep = spec.derive(Purpose::Replicate, r as u64);
            two_forest_scores(&permuted, &inputs, &imp, config.replicate_trees, rep, kind)
        })
        .collect::<Result<_>>()?;
    let r = config.n_permutations;
    let pvalue = observed
        .iter()
        .enumerate()
        .map(|(c, row)| {
            row.iter()
                .enumerate()
                .map(|(m, obs)| {
                    let k = null
                        .iter()
                        .filter(|s| s[c][m].abs() >= obs.abs() - 1e-12)
                        .count();
                    (k + 1) as f64 / (r + 1) as f64
                })
                .collect()
        })
        .collect();
    Ok(TargetResult {
        abs: observed.iter().map(|row| row.iter().map(|x| x.abs()).collect()).collect(),
        signed: observed,
        pvalue,
    })
}

fn run(
    table: &Table,
    context: usize,
    config: &PairwiseConfig,
    score: PairScore,
) -> Result<Vec<InteractionMatrix>> {
    config.validate()?;
    let net = Network::new(table, context, config.bins)?;
    let per_target: Vec<TargetResult> = net
        .variables
        .par_iter()
        .enumerate()
        .map(|(i, &target)| {
            let ds = net.dataset(target)?;
            let spec = config.rng.derive(Purpose::Target, i as u64);
            match score {
                PairScore::Contextual => contextual_target(&ds, config, spec),
                PairScore::TwoForest => two_forest_target(&ds, config, spec),
            }
        })
        .collect::<Result<_>>()?;

    let ctx = table.column(context).as_categorical().unwrap();
    let p = net.variables.len();
    let matrices = (0..ctx.arity())
        .map(|c| {
            let cells = (0..p)
                .map(|i| {
                    // inputs of target i are the other variables, in order
                    let mut slot = 0;
                    (0..p)
                        .map(|j| {
                            if i == j {
                                return None;
                            }
                            let r = &per_target[i];
                            let cell = PairCell {
                                abs: r.abs[c][slot],
                                signed: r.signed[c][slot],
                                pvalue: r.pvalue[c][slot],
                                significant: r.pvalue[c][slot] < config.level,
                            };
                            slot += 1;
                            Some(cell)
                        })
                        .collect()
                })
                .collect();
            InteractionMatrix {
                names: net.names(),
                context_value: c as u32,
                context_label: ctx.label(c as u32).to_string(),
                level: config.level,
                score,
                cells,
            }
        })
        .collect();
    Ok(matrices)
}

/// Contextual interaction matrices for every context value.
pub fn pairwise_analysis(
    table: &Table,
    context: usize,
    config: &PairwiseConfig,
) -> Result<Vec<InteractionMatrix>> {
    run(table, context, config, PairScore::Contextual)
}

/// Two-forest interaction matrices for every context value.
pub fn baseline_pairwise(
    table: &Table,
    context: usize,
    config: &PairwiseConfig,
) -> Result<Vec<InteractionMatrix>> {
    run(table, context, config, PairScore::TwoForest)
}

/// Matrix of a single context value.
pub fn pairwise_at(
    table: &Table,
    context: usize,
    value: u32,
    config: &PairwiseConfig,
    score: PairScore,
) -> Result<InteractionMatrix> {
    let mut all = run(table, context, config, score)?;
    if value as usize >= all.len() {
        return Err(Error::UnknownContextValue(value));
    }
    Ok(all.swap_remove(value as usize))
}

/// Six numeric variables and a binary context `ctx`. `v1..v5` are uniform on
/// `{0, 1, 2}` and `v0 = v1 + [ctx = 0] (v4 + v5) + e` with `e` uniform on
/// `{0, 0.5}`.
pub fn synthetic_network<R: Rng>(n_samples: usize, rng: &mut R) -> Result<Table> {
    let mut v: Vec<Vec<f64>> = (0..6).map(|_| Vec::with_capacity(n_samples)).collect();
    let mut ctx = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let c = rng.gen_range(0..2u32);
        let x: Vec<f64> = (0..5).map(|_| rng.gen_range(0..3) as f64).collect();
        let e = if rng.gen::<bool>() { 0.5 } else { 0.0 };
        let coupled = if c == 0 { x[3] + x[4] } else { 0.0 };
        v[0].push(x[0] + coupled + e);
        for (k, xv) in x.iter().enumerate() {
            v[k + 1].push(*xv);
        }
        ctx.push(c);
    }
    let mut names = vec!["ctx".to_string()];
    names.extend((0..6).map(|i| format!("v{i}")));
    let mut columns = vec![Column::Categorical(CategoricalColumn::from_codes(ctx, 2)?)];
    columns.extend(v.into_iter().map(Column::Numeric));
    Table::new(names, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quantile_bins() {
        let v: Vec<f64> = (0..10).map(f64::from).collect();
        let c = discretize(&v, 5).unwrap();
        assert_eq!(c.codes(), &[0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        let c = discretize(&[1.0, 1.0, 1.0, 2.0], 5).unwrap();
        assert_eq!(c.codes()[0], c.codes()[1]);
        assert_eq!(c.codes()[0], c.codes()[2]);
        assert_ne!(c.codes()[0], c.codes()[3]);
        let c = discretize(&[3.0, 3.0], 3).unwrap();
        assert_eq!(c.codes(), &[0, 0]);
        assert!(discretize(&[1.0], 1).is_err());
        assert!(discretize(&[f64::NAN], 3).is_err());
    }

    #[test]
    fn three_level_inputs_keep_their_levels() {
        let v: Vec<f64> = (0..30).map(|i| (i % 3) as f64).collect();
        let c = discretize(&v, 5).unwrap();
        assert_eq!(c.arity(), 3);
        assert!(v.iter().zip(c.codes()).all(|(x, &k)| *x as u32 == k));
    }

    #[test]
    fn config_errors() {
        let t = synthetic_network(40, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let mut cfg = PairwiseConfig::new(2, 1, RngSpec::new(0));
        cfg.level = 1.0;
        assert!(pairwise_analysis(&t, 0, &cfg).is_err());
        cfg.level = 0.05;
        assert!(pairwise_analysis(&t, 1, &cfg).is_err());
        let small = Table::new(
            vec!["c".into(), "a".into()],
            vec![t.column(0).clone(), t.column(1).clone()],
        )
        .unwrap();
        assert!(pairwise_analysis(&small, 0, &cfg).is_err());
    }

    #[test]
    fn matrix_shape() {
        let t = synthetic_network(60, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let cfg = PairwiseConfig::new(3, 2, RngSpec::new(0));
        let ms = pairwise_analysis(&t, 0, &cfg).unwrap();
        assert_eq!(ms.len(), 2);
        for m in &ms {
            assert_eq!(m.names.len(), 6);
            for i in 0..6 {
                assert!(m.cell(i, i).is_none());
                for j in (0..6).filter(|&j| j != i) {
                    let c = m.cell(i, j).unwrap();
                    assert!(c.abs.is_finite() && c.signed.is_finite());
                    assert_eq!(c.significant, c.pvalue < 0.05);
                }
            }
        }
        let b = baseline_pairwise(&t, 0, &cfg).unwrap();
        assert_eq!(b[0].score, PairScore::TwoForest);
        assert_eq!(pairwise_at(&t, 0, 1, &cfg, PairScore::Contextual).unwrap(), ms[1]);
    }
}
