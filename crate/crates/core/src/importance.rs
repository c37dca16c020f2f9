//! Finite-forest importance scores and the characterization of
//! context-dependent variables.
//!
//! All scores sum, over every node `t` split on a variable, the node weight
//! `p(t) = |t| / N` times a node quantity, averaged over trees:
//!
//! | score            | node quantity                                  |
//! |------------------|------------------------------------------------|
//! | `mdi`            | `G(t)`                                         |
//! | `contextual_abs` | `abs(G(t) - G(t, c))`                           |
//! | `contextual_signed` | `G(t) - G(t, c)`                            |
//! | `contextual_global` | `G(t) - sum_c p(c|t) G(t, c)`               |
//!
//! `G(t, c)` is the impurity decrease computed on the rows of `t` with
//! context `c`. Nodes without any such row contribute nothing to the
//! per-context scores.

use std::fmt;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::forest::{build_forest, Forest, Tree};
use crate::impurity::{node_gains, ImpurityKind, TargetView};
use crate::rng::{Purpose, RngSpec};

/// Per-input scores of one forest, aligned with `Forest::inputs()`.
#[derive(Clone, Debug, PartialEq)]
pub struct ForestScores {
    pub mdi: Vec<f64>,
    /// `[context value][input]`; empty without a context column.
    pub abs: Vec<Vec<f64>>,
    pub signed: Vec<Vec<f64>>,
    /// Empty without a context column.
    pub global_context: Vec<f64>,
}

impl ForestScores {
    fn zeros(n_inputs: usize, n_ctx: usize) -> Self {
        ForestScores {
            mdi: vec![0.0; n_inputs],
            abs: vec![vec![0.0; n_inputs]; n_ctx],
            signed: vec![vec![0.0; n_inputs]; n_ctx],
            global_context: if n_ctx > 0 { vec![0.0; n_inputs] } else { Vec::new() },
        }
    }

    fn add(&mut self, other: &ForestScores) {
        let add = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.mdi, &other.mdi);
        for (a, b) in self.abs.iter_mut().zip(&other.abs) {
            add(a, b);
        }
        for (a, b) in self.signed.iter_mut().zip(&other.signed) {
            add(a, b);
        }
        add(&mut self.global_context, &other.global_context);
    }

    fn scale(&mut self, s: f64) {
        let rows = std::iter::once(&mut self.mdi)
            .chain(self.abs.iter_mut())
            .chain(self.signed.iter_mut())
            .chain(std::iter::once(&mut self.global_context));
        for row in rows {
            row.iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// Contribution of one internal node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTerm {
    pub tree: usize,
    pub node: usize,
    pub variable: usize,
    /// `p(t)`, relative to the full sample.
    pub weight: f64,
    pub gain: f64,
    /// Per context value: `(p(c|t), G(t, c))`.
    pub per_context: Vec<(f64, f64)>,
}

impl NodeTerm {
    /// `p(t) (G(t) - G(t, c))`; an empty slice has `G(t, c) = 0`.
    pub fn signed(&self, c: usize) -> f64 {
        self.weight * (self.gain - self.per_context[c].1)
    }

    pub fn global_context(&self) -> f64 {
        let avg: f64 = self.per_context.iter().map(|(s, g)| s * g).sum();
        self.weight * (self.gain - avg)
    }
}

fn check_forest(forest: &Forest, dataset: &Dataset) -> Result<()> {
    if forest.n_samples() != dataset.n_samples() {
        return Err(Error::ForestMismatch {
            forest: forest.n_samples(),
            dataset: dataset.n_samples(),
        });
    }
    if let Some(c) = dataset.context() {
        if forest.inputs().contains(&c) {
            return Err(Error::NotAnInput(c));
        }
    }
    Ok(())
}

fn visit_tree(
    tree: &Tree,
    dataset: &Dataset,
    target: &TargetView<'_>,
    context: Option<(&[u32], usize)>,
    mut f: impl FnMut(usize, f64, &crate::impurity::NodeGains),
) {
    let n = dataset.n_samples() as f64;
    for node in tree.nodes() {
        let Some(var) = node.split_variable() else {
            continue;
        };
        let rows = node.rows();
        let codes = dataset.codes(var).expect("inputs are categorical");
        let arity = dataset.arity(var).expect("inputs are categorical");
        let gains = node_gains(target, codes, arity, context, rows);
        f(var, rows.len() as f64 / n, &gains);
    }
}

fn context_view(dataset: &Dataset) -> Option<(&[u32], usize)> {
    dataset
        .context()
        .map(|c| (dataset.codes(c).unwrap(), dataset.arity(c).unwrap()))
}

fn tree_scores(
    tree: &Tree,
    dataset: &Dataset,
    target: &TargetView<'_>,
    slot: &[Option<usize>],
    n_inputs: usize,
) -> ForestScores {
    let context = context_view(dataset);
    let n_ctx = context.map_or(0, |c| c.1);
    let mut s = ForestScores::zeros(n_inputs, n_ctx);
    visit_tree(tree, dataset, target, context, |var, w, gains| {
        let m = slot[var].expect("split on a forest input");
        s.mdi[m] += w * gains.gain;
        if n_ctx == 0 {
            return;
        }
        let mut avg = 0.0;
        for (c, &(n_c, g_c)) in gains.per_context.iter().enumerate() {
            let d = gains.gain - g_c;
            s.abs[c][m] += w * d.abs();
            s.signed[c][m] += w * d;
            avg += n_c as f64 / gains.n as f64 * g_c;
        }
        s.global_context[m] += w * (gains.gain - avg);
    });
    s
}

/// Every importance score of `forest` in one pass over its nodes.
///
/// Per-tree sums are combined in tree order, so the result is identical for
/// any number of worker threads.
pub fn forest_scores(forest: &Forest, dataset: &Dataset) -> Result<ForestScores> {
    check_forest(forest, dataset)?;
    let target = TargetView::new(dataset, forest.impurity_kind())?;
    let mut slot = vec![None; dataset.n_columns()];
    for (m, &col) in forest.inputs().iter().enumerate() {
        slot[col] = Some(m);
    }
    let n_inputs = forest.inputs().len();
    let per_tree: Vec<ForestScores> = forest
        .trees()
        .par_iter()
        .map(|t| tree_scores(t, dataset, &target, &slot, n_inputs))
        .collect();
    let n_ctx = dataset.context_arity().unwrap_or(0);
    let mut total = ForestScores::zeros(n_inputs, n_ctx);
    for s in &per_tree {
        total.add(s);
    }
    total.scale(1.0 / forest.n_trees() as f64);
    Ok(total)
}

/// Every internal node's contribution, in tree order.
pub fn node_terms(forest: &Forest, dataset: &Dataset) -> Result<Vec<NodeTerm>> {
    check_forest(forest, dataset)?;
    let target = TargetView::new(dataset, forest.impurity_kind())?;
    let context = context_view(dataset);
    let mut out = Vec::new();
    for (ti, tree) in forest.trees().iter().enumerate() {
        let ids = tree.nodes().filter(|n| !n.is_leaf()).map(|n| n.id());
        let mut ids = ids.collect::<Vec<_>>().into_iter();
        visit_tree(tree, dataset, &target, context, |var, w, gains| {
            out.push(NodeTerm {
                tree: ti,
                node: ids.next().unwrap(),
                variable: var,
                weight: w,
                gain: gains.gain,
                per_context: gains
                    .per_context
                    .iter()
                    .map(|&(n_c, g)| (n_c as f64 / gains.n as f64, g))
                    .collect(),
            });
        });
    }
    Ok(out)
}

fn check_context_value(dataset: &Dataset, value: u32) -> Result<()> {
    if value as usize >= dataset.context_arity()? {
        return Err(Error::UnknownContextValue(value));
    }
    Ok(())
}

/// Mean decrease of impurity per input.
pub fn mdi(forest: &Forest, dataset: &Dataset) -> Result<Vec<f64>> {
    Ok(forest_scores(forest, dataset)?.mdi)
}

/// Node-level mean absolute change of the impurity decrease in context `value`.
pub fn contextual_abs(forest: &Forest, dataset: &Dataset, value: u32) -> Result<Vec<f64>> {
    check_context_value(dataset, value)?;
    Ok(forest_scores(forest, dataset)?.abs.swap_remove(value as usize))
}

/// Node-level mean signed change of the impurity decrease in context `value`.
pub fn contextual_signed(forest: &Forest, dataset: &Dataset, value: u32) -> Result<Vec<f64>> {
    check_context_value(dataset, value)?;
    Ok(forest_scores(forest, dataset)?.signed.swap_remove(value as usize))
}

/// Node-level mean change when conditioning on the whole context variable.
pub fn contextual_global(forest: &Forest, dataset: &Dataset) -> Result<Vec<f64>> {
    dataset.context_arity()?;
    Ok(forest_scores(forest, dataset)?.global_context)
}

/// MDI of a separate forest grown on the rows with context `value` only.
pub fn per_context_baseline(
    dataset: &Dataset,
    inputs: &[usize],
    value: u32,
    n_trees: usize,
    rng: RngSpec,
    kind: ImpurityKind,
) -> Result<Vec<f64>> {
    let rows = dataset.context_rows(value)?;
    if rows.is_empty() {
        return Err(Error::EmptyContextSlice(value));
    }
    let slice = dataset.select_rows(&rows)?;
    let spec = rng.derive(Purpose::Baseline, value as u64);
    let forest = build_forest(&slice, inputs, n_trees, spec, kind)?;
    mdi(&forest, &slice)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContextLabel {
    /// No context effect (at this context value, or at all values).
    Independent,
    Complementary,
    Redundant,
    /// Redundant, and carries no information once the context is known.
    IrrelevantInContext,
    Mixed,
}

impl ContextLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ContextLabel::Independent => "context-independent",
            ContextLabel::Complementary => "context-complementary",
            ContextLabel::Redundant => "context-redundant",
            ContextLabel::IrrelevantInContext => "irrelevant-in-context",
            ContextLabel::Mixed => "mixed",
        }
    }

    pub fn is_redundant(self) -> bool {
        matches!(self, ContextLabel::Redundant | ContextLabel::IrrelevantInContext)
    }
}

impl fmt::Display for ContextLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Scores of one variable at one context value.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContextCell {
    pub abs: f64,
    pub signed: f64,
    pub baseline: Option<f64>,
    pub pvalue_abs: Option<f64>,
    pub pvalue_signed: Option<f64>,
    pub label: Option<ContextLabel>,
    /// 1 = most complementary among context-dependent variables.
    pub rank: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VariableReport {
    pub column: usize,
    pub name: String,
    pub imp: f64,
    /// One entry per context value.
    pub contexts: Vec<ContextCell>,
    pub global_context: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportMeta {
    /// `forest` or `oracle`.
    pub source: String,
    pub n_trees: Option<usize>,
    pub seed: Option<u64>,
    pub impurity: ImpurityKind,
    pub epsilon: Option<f64>,
    pub n_permutations: Option<usize>,
    pub replicate_trees: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImportanceReport {
    pub target: String,
    pub context: Option<String>,
    pub context_labels: Vec<String>,
    pub variables: Vec<VariableReport>,
    pub meta: ReportMeta,
}

impl ImportanceReport {
    pub fn variable(&self, name: &str) -> Option<&VariableReport> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Report of a grown forest; per-context baselines are filled separately.
    pub fn from_forest(forest: &Forest, dataset: &Dataset) -> Result<Self> {
        let scores = forest_scores(forest, dataset)?;
        let variables = forest
            .inputs()
            .iter()
            .enumerate()
            .map(|(m, &col)| VariableReport {
                column: col,
                name: dataset.name(col).to_string(),
                imp: scores.mdi[m],
                contexts: (0..scores.abs.len())
                    .map(|c| ContextCell {
                        abs: scores.abs[c][m],
                        signed: scores.signed[c][m],
                        ..ContextCell::default()
                    })
                    .collect(),
                global_context: scores.global_context.get(m).copied(),
            })
            .collect();
        Ok(ImportanceReport {
            target: dataset.name(dataset.target()).to_string(),
            context: dataset.context().map(|c| dataset.name(c).to_string()),
            context_labels: dataset
                .context()
                .map(|c| dataset.labels(c).unwrap().to_vec())
                .unwrap_or_default(),
            variables,
            meta: ReportMeta {
                source: "forest".into(),
                n_trees: Some(forest.n_trees()),
                seed: Some(forest.seed()),
                impurity: forest.impurity_kind(),
                epsilon: None,
                n_permutations: None,
                replicate_trees: None,
            },
        })
    }
}

/// Labels every (variable, context value) cell and ranks context-dependent
/// variables by their signed score.
///
/// A variable is context-independent when `abs <= eps` at every context
/// value. Otherwise each cell is labelled:
/// * independent when `abs <= eps` at that value,
/// * complementary / redundant by the sign of `signed` when
///   `|signed| >= abs - eps`,
/// * irrelevant-in-context when redundant and additionally
///   `|abs - signed| <= eps` and `|signed - imp| <= eps`,
/// * mixed otherwise.
pub fn characterize(mut report: ImportanceReport, eps: f64) -> Result<ImportanceReport> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be >= 0, got {eps}")));
    }
    let n_ctx = report.context_labels.len();
    let mut dependent = Vec::new();
    for (i, var) in report.variables.iter_mut().enumerate() {
        let independent = var.contexts.iter().all(|c| c.abs <= eps);
        if !independent && n_ctx > 0 {
            dependent.push(i);
        }
        let imp = var.imp;
        for cell in &mut var.contexts {
            cell.rank = None;
            cell.label = Some(if independent || cell.abs <= eps {
                ContextLabel::Independent
            } else if cell.signed.abs() >= cell.abs - eps && cell.signed != 0.0 {
                if cell.signed < 0.0 {
                    ContextLabel::Complementary
                } else if (cell.abs - cell.signed).abs() <= eps && (cell.signed - imp).abs() <= eps
                {
                    ContextLabel::IrrelevantInContext
                } else {
                    ContextLabel::Redundant
                }
            } else {
                ContextLabel::Mixed
            });
        }
    }
    for c in 0..n_ctx {
        let mut order = dependent.clone();
        order.sort_by(|&a, &b| {
            let sa = report.variables[a].contexts[c].signed;
            let sb = report.variables[b].contexts[c].signed;
            sa.total_cmp(&sb).then(a.cmp(&b))
        });
        for (rank, &i) in order.iter().enumerate() {
            report.variables[i].contexts[c].rank = Some(rank + 1);
        }
    }
    report.meta.epsilon = Some(eps);
    Ok(report)
}

/// Options for [`analyze`].
#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub n_trees: usize,
    pub rng: RngSpec,
    pub kind: ImpurityKind,
    /// Also grow one forest per context value.
    pub baselines: bool,
    /// Trees per baseline forest; defaults to `n_trees`.
    pub baseline_trees: Option<usize>,
}

/// Grows one forest on every input except the context and computes every
/// score; optionally adds per-context baselines.
pub fn analyze(dataset: &Dataset, inputs: &[usize], config: &AnalysisConfig) -> Result<ImportanceReport> {
    let forest = build_forest(dataset, inputs, config.n_trees, config.rng, config.kind)?;
    let mut report = ImportanceReport::from_forest(&forest, dataset)?;
    if config.baselines && dataset.context().is_some() {
        let trees = config.baseline_trees.unwrap_or(config.n_trees);
        for c in 0..dataset.context_arity()? {
            let rows = dataset.context_rows(c as u32)?;
            if rows.is_empty() {
                continue;
            }
            let base = per_context_baseline(dataset, inputs, c as u32, trees, config.rng, config.kind)?;
            for (var, b) in report.variables.iter_mut().zip(base) {
                var.contexts[c].baseline = Some(b);
            }
        }
    }
    Ok(report)
}
