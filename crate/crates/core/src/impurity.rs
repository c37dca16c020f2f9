//! Impurity measures and impurity decreases at tree nodes.
//!
//! Entropy is measured in bits with `0 log 0 = 0`; variance is the biased
//! (divide by `n`) population variance. With these conventions the weighted
//! child impurities plus the decrease add up to the parent impurity.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{Dataset, TargetKind};
use crate::error::{Error, Result};

/// Numeric targets whose within-node variance is at most this are pure.
pub const PURE_VARIANCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImpurityKind {
    Entropy,
    Variance,
}

impl ImpurityKind {
    /// Entropy for categorical targets, variance for numeric ones.
    pub fn for_target(kind: TargetKind) -> Self {
        match kind {
            TargetKind::Categorical => ImpurityKind::Entropy,
            TargetKind::Numeric => ImpurityKind::Variance,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ImpurityKind::Entropy => "entropy",
            ImpurityKind::Variance => "variance",
        }
    }

    pub(crate) fn check(self, target: TargetKind) -> Result<()> {
        match (self, target) {
            (ImpurityKind::Entropy, TargetKind::Categorical)
            | (ImpurityKind::Variance, TargetKind::Numeric) => Ok(()),
            (kind, t) => Err(Error::ImpurityMismatch {
                kind: kind.name(),
                target: match t {
                    TargetKind::Categorical => "categorical",
                    TargetKind::Numeric => "numeric",
                },
            }),
        }
    }
}

impl fmt::Display for ImpurityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImpurityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entropy" => Ok(ImpurityKind::Entropy),
            "variance" => Ok(ImpurityKind::Variance),
            other => Err(Error::InvalidParameter(format!(
                "unknown impurity {other:?} (expected entropy or variance)"
            ))),
        }
    }
}

/// Strictly increasing row indices into a dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleSubset(Vec<u32>);

impl SampleSubset {
    pub fn new(indices: Vec<u32>, n_samples: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "subset indices must be strictly increasing".into(),
            ));
        }
        if indices.last().is_some_and(|&i| i as usize >= n_samples) {
            return Err(Error::InvalidParameter("subset index out of range".into()));
        }
        Ok(SampleSubset(indices))
    }

    pub fn all(n_samples: usize) -> Self {
        SampleSubset((0..n_samples as u32).collect())
    }

    /// Sorts and deduplicates arbitrary row indices.
    pub fn from_unsorted(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        SampleSubset(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Borrowed view of a dataset's target column.
#[derive(Clone, Copy, Debug)]
pub(crate) enum TargetView<'a> {
    Codes { codes: &'a [u32], arity: usize },
    Values(&'a [f64]),
}

impl<'a> TargetView<'a> {
    pub(crate) fn new(dataset: &'a Dataset, kind: ImpurityKind) -> Result<Self> {
        kind.check(dataset.target_kind())?;
        let t = dataset.target();
        Ok(match dataset.column(t).as_categorical() {
            Some(c) => TargetView::Codes {
                codes: c.codes(),
                arity: c.arity(),
            },
            None => TargetView::Values(dataset.column(t).as_numeric().expect("numeric target")),
        })
    }

    pub(crate) fn is_pure(&self, rows: &[u32]) -> bool {
        match *self {
            TargetView::Codes { codes, .. } => match rows.split_first() {
                None => true,
                Some((&first, rest)) => {
                    let y = codes[first as usize];
                    rest.iter().all(|&r| codes[r as usize] == y)
                }
            },
            TargetView::Values(values) => variance_of(values, rows) <= PURE_VARIANCE_TOL,
        }
    }

    pub(crate) fn impurity(&self, rows: &[u32]) -> f64 {
        match *self {
            TargetView::Codes { codes, arity } => {
                let mut counts = vec![0u64; arity];
                for &r in rows {
                    counts[codes[r as usize] as usize] += 1;
                }
                entropy_of_counts(&counts)
            }
            TargetView::Values(values) => variance_of(values, rows),
        }
    }
}

/// `x log2 x` with the `0 log 0 = 0` convention.
fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

pub(crate) fn entropy_of_counts(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let h = xlogx(n) - counts.iter().map(|&c| xlogx(c as f64)).sum::<f64>();
    (h / n).max(0.0)
}

fn variance_of(values: &[f64], rows: &[u32]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let n = rows.len() as f64;
    let mean = rows.iter().map(|&r| values[r as usize]).sum::<f64>() / n;
    rows.iter()
        .map(|&r| {
            let d = values[r as usize] - mean;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Decrease of impurity obtained by splitting on one variable, both over the
/// whole node and restricted to each context value.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct NodeGains {
    pub n: usize,
    pub gain: f64,
    /// Indexed by context code: `(rows in slice, decrease within slice)`.
    pub per_context: Vec<(usize, f64)>,
}

/// Entropy decrease from a contingency table stored row-major as
/// `[split value][target code]`.
fn entropy_gain(table: &[u64], y_arity: usize) -> f64 {
    let mut n = 0u64;
    let mut y_tot = vec![0u64; y_arity];
    let mut acc = 0.0;
    for row in table.chunks_exact(y_arity) {
        let nj: u64 = row.iter().sum();
        n += nj;
        acc -= xlogx(nj as f64);
        for (y, &c) in row.iter().enumerate() {
            y_tot[y] += c;
            acc += xlogx(c as f64);
        }
    }
    if n == 0 {
        return 0.0;
    }
    acc += xlogx(n as f64);
    acc -= y_tot.iter().map(|&c| xlogx(c as f64)).sum::<f64>();
    (acc / n as f64).max(0.0)
}

pub(crate) fn node_gains(
    target: &TargetView<'_>,
    split: &[u32],
    split_arity: usize,
    context: Option<(&[u32], usize)>,
    rows: &[u32],
) -> NodeGains {
    let (ctx_codes, n_ctx) = match context {
        Some((c, k)) => (Some(c), k),
        None => (None, 0),
    };
    let ctx_of = |r: u32| ctx_codes.map_or(0, |c| c[r as usize] as usize);
    let n_slices = n_ctx.max(1);

    match *target {
        TargetView::Codes { codes, arity } => {
            let block = split_arity * arity;
            let mut counts = vec![0u64; n_slices * block];
            for &r in rows {
                let idx = ctx_of(r) * block
                    + split[r as usize] as usize * arity
                    + codes[r as usize] as usize;
                counts[idx] += 1;
            }
            let mut total = vec![0u64; block];
            for slice in counts.chunks_exact(block) {
                for (t, &c) in total.iter_mut().zip(slice) {
                    *t += c;
                }
            }
            let gain = entropy_gain(&total, arity);
            let per_context = (0..n_ctx)
                .map(|k| {
                    let slice = &counts[k * block..(k + 1) * block];
                    let n_k: u64 = slice.iter().sum();
                    (n_k as usize, entropy_gain(slice, arity))
                })
                .collect();
            NodeGains {
                n: rows.len(),
                gain,
                per_context,
            }
        }
        TargetView::Values(values) => {
            // groups: (context, split value); marginal groups by split value
            let g = n_slices * split_arity;
            let mut cnt = vec![0usize; g];
            let mut sum = vec![0.0f64; g];
            for &r in rows {
                let idx = ctx_of(r) * split_arity + split[r as usize] as usize;
                cnt[idx] += 1;
                sum[idx] += values[r as usize];
            }
            let mut cnt_j = vec![0usize; split_arity];
            let mut sum_j = vec![0.0; split_arity];
            let mut cnt_k = vec![0usize; n_slices];
            let mut sum_k = vec![0.0; n_slices];
            for k in 0..n_slices {
                for j in 0..split_arity {
                    let i = k * split_arity + j;
                    cnt_j[j] += cnt[i];
                    sum_j[j] += sum[i];
                    cnt_k[k] += cnt[i];
                    sum_k[k] += sum[i];
                }
            }
            let n = rows.len();
            let mean = |s: f64, c: usize| if c > 0 { s / c as f64 } else { 0.0 };
            let grand = mean(sum_k.iter().sum(), n);

            let mut ss = 0.0;
            let mut ss_j = vec![0.0; split_arity];
            let mut ss_k = vec![0.0; n_slices];
            let mut ss_kj = vec![0.0; g];
            for &r in rows {
                let v = values[r as usize];
                let k = ctx_of(r);
                let j = split[r as usize] as usize;
                let i = k * split_arity + j;
                let sq = |m: f64| (v - m) * (v - m);
                ss += sq(grand);
                ss_j[j] += sq(mean(sum_j[j], cnt_j[j]));
                ss_k[k] += sq(mean(sum_k[k], cnt_k[k]));
                ss_kj[i] += sq(mean(sum[i], cnt[i]));
            }
            let gain = if n > 0 {
                ((ss - ss_j.iter().sum::<f64>()) / n as f64).max(0.0)
            } else {
                0.0
            };
            let per_context = (0..n_ctx)
                .map(|k| {
                    let n_k = cnt_k[k];
                    let inner: f64 = ss_kj[k * split_arity..(k + 1) * split_arity].iter().sum();
                    let gk = if n_k > 0 {
                        ((ss_k[k] - inner) / n_k as f64).max(0.0)
                    } else {
                        0.0
                    };
                    (n_k, gk)
                })
                .collect();
            NodeGains {
                n,
                gain,
                per_context,
            }
        }
    }
}

fn split_codes(dataset: &Dataset, variable: usize) -> Result<(&[u32], usize)> {
    if variable >= dataset.n_columns() || variable == dataset.target() {
        return Err(Error::NotAnInput(variable));
    }
    let col = dataset
        .column(variable)
        .as_categorical()
        .ok_or(Error::NotAnInput(variable))?;
    Ok((col.codes(), col.arity()))
}

/// Impurity of the target over `subset`; 0 for an empty subset.
pub fn impurity(dataset: &Dataset, subset: &SampleSubset, kind: ImpurityKind) -> Result<f64> {
    let target = TargetView::new(dataset, kind)?;
    Ok(target.impurity(subset.indices()))
}

/// `i(Y|t) - sum_x p(t_x) i(Y|t_x)` for the multiway split of `subset` on
/// `variable`. With entropy this is the plug-in mutual information.
pub fn impurity_decrease(
    dataset: &Dataset,
    subset: &SampleSubset,
    variable: usize,
    kind: ImpurityKind,
) -> Result<f64> {
    let target = TargetView::new(dataset, kind)?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let (codes, arity) = split_codes(dataset, variable)?;
    Ok(node_gains(&target, codes, arity, None, subset.indices()).gain)
}

/// Impurity decrease restricted to the rows of `subset` with context
/// `context_value`, or 0 when there are none. With `context_value = None`
/// returns the context-averaged decrease `sum_c p(c|t) G(Y;X|t,c)`.
pub fn conditional_impurity_decrease(
    dataset: &Dataset,
    subset: &SampleSubset,
    variable: usize,
    context_value: Option<u32>,
    kind: ImpurityKind,
) -> Result<f64> {
    let target = TargetView::new(dataset, kind)?;
    let ctx = dataset.context_codes()?;
    let n_ctx = dataset.context_arity()?;
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(v) = context_value {
        if v as usize >= n_ctx {
            return Err(Error::UnknownContextValue(v));
        }
    }
    let (codes, arity) = split_codes(dataset, variable)?;
    let gains = node_gains(&target, codes, arity, Some((ctx, n_ctx)), subset.indices());
    Ok(match context_value {
        Some(v) => gains.per_context[v as usize].1,
        None => {
            let n = gains.n as f64;
            gains
                .per_context
                .iter()
                .map(|&(n_k, g)| n_k as f64 / n * g)
                .sum()
        }
    })
}
