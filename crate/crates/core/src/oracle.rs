//! Exact asymptotic importances and brute-force context-dependence checks on
//! small joint distributions.
//!
//! For a totally randomized forest grown on infinitely many samples, the
//! importance of input `m` among `p` inputs is
//!
//! ```text
//! Imp(m) = sum_{k=0}^{p-1} 1 / (C(p,k) (p-k)) sum_{|B|=k, B ⊆ V\{m}} G(Y; X_m | B)
//! ```
//!
//! where `G(Y; X_m | B) = sum_b P(B=b) G(Y; X_m | B=b)` and `G` is the
//! mutual information (entropy impurity) or the variance decrease. Every
//! contextual score has the same shape, with the conditional quantity
//! replaced by the matching difference. Conditioning events of probability
//! zero carry no weight. In the contextual scores, an assignment `b` never
//! seen together with `Xc = c` has `G(b, c) = 0`, as for an empty node slice
//! in a finite forest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::importance::{ContextCell, ImportanceReport, ReportMeta, VariableReport};
use crate::impurity::ImpurityKind;

/// Absolute tolerance of every equality test on information quantities.
pub const TOL: f64 = 1e-12;
/// Largest number of inputs accepted by the subset enumeration.
pub const MAX_INPUTS: usize = 20;
/// Largest product of arities accepted when building a distribution.
pub const MAX_CELLS: u128 = 1 << 24;

/// Exact probability table over `inputs.., Y[, Xc]`.
///
/// Variables are laid out as the `n_inputs` inputs, then the target, then the
/// optional context. Only support points (positive probability) are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution {
    names: Vec<String>,
    arities: Vec<usize>,
    n_inputs: usize,
    has_context: bool,
    target_values: Option<Vec<f64>>,
    points: Vec<Vec<u32>>,
    probs: Vec<f64>,
}

impl JointDistribution {
    /// Validates and merges `support` (duplicate assignments are summed,
    /// zero-probability points dropped).
    pub fn new(
        names: Vec<String>,
        arities: Vec<usize>,
        n_inputs: usize,
        has_context: bool,
        support: Vec<(Vec<u32>, f64)>,
    ) -> Result<Self> {
        let width = n_inputs + 1 + has_context as usize;
        if names.len() != width || arities.len() != width {
            return Err(Error::Distribution(format!(
                "expected {width} variables, got {} names and {} arities",
                names.len(),
                arities.len()
            )));
        }
        if n_inputs == 0 {
            return Err(Error::Distribution("no input variables".into()));
        }
        if arities.contains(&0) {
            return Err(Error::Distribution("arities must be >= 1".into()));
        }
        let cells: u128 = arities.iter().map(|&a| a as u128).product();
        if cells > MAX_CELLS {
            return Err(Error::GuardExceeded(format!(
                "arity product {cells} exceeds {MAX_CELLS}"
            )));
        }
        let mut merged: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (point, p) in support {
            if point.len() != width {
                return Err(Error::Distribution(format!(
                    "support point {point:?} has {} values, expected {width}",
                    point.len()
                )));
            }
            if let Some((v, a)) = point.iter().zip(&arities).find(|(&v, &a)| v as usize >= a) {
                return Err(Error::Distribution(format!("value {v} outside arity {a}")));
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::Distribution(format!("invalid probability {p}")));
            }
            *merged.entry(point).or_insert(0.0) += p;
        }
        let total: f64 = merged.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Distribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let (points, probs) = merged.into_iter().filter(|(_, p)| *p > 0.0).unzip();
        Ok(JointDistribution {
            names,
            arities,
            n_inputs,
            has_context,
            target_values: None,
            points,
            probs,
        })
    }

    /// Treats target codes as the reals `values` and switches to variance.
    pub fn with_target_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.arities[self.n_inputs] {
            return Err(Error::Distribution(format!(
                "{} target values for target arity {}",
                values.len(),
                self.arities[self.n_inputs]
            )));
        }
        self.target_values = Some(values);
        Ok(self)
    }

    /// Empirical (plug-in) distribution of a categorical dataset. Inputs are
    /// all columns other than the target and context, in column order.
    pub fn from_dataset(dataset: &Dataset) -> Result<Self> {
        let target = dataset.target();
        if dataset.arity(target).is_none() {
            return Err(Error::ImpurityMismatch {
                kind: "entropy",
                target: "numeric",
            });
        }
        let mut cols = dataset.input_columns();
        let n_inputs = cols.len();
        cols.push(target);
        if let Some(c) = dataset.context() {
            cols.push(c);
        }
        let arities: Vec<usize> = cols.iter().map(|&c| dataset.arity(c).unwrap()).collect();
        let cells: u128 = arities.iter().map(|&a| a as u128).product();
        if cells > MAX_CELLS {
            return Err(Error::GuardExceeded(format!(
                "arity product {cells} exceeds {MAX_CELLS}"
            )));
        }
        let n = dataset.n_samples();
        let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for r in 0..n {
            let point = cols.iter().map(|&c| dataset.codes(c).unwrap()[r]).collect();
            *counts.entry(point).or_insert(0) += 1;
        }
        let support = counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / n as f64))
            .collect();
        let names = cols.iter().map(|&c| dataset.name(c).to_string()).collect();
        Self::new(names, arities, n_inputs, dataset.context().is_some(), support)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn has_context(&self) -> bool {
        self.has_context
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn arities(&self) -> &[usize] {
        &self.arities
    }

    pub fn target_index(&self) -> usize {
        self.n_inputs
    }

    pub fn context_index(&self) -> Option<usize> {
        self.has_context.then_some(self.n_inputs + 1)
    }

    pub fn context_arity(&self) -> Result<usize> {
        self.context_index()
            .map(|c| self.arities[c])
            .ok_or(Error::NoContext)
    }

    pub fn impurity(&self) -> ImpurityKind {
        if self.target_values.is_some() {
            ImpurityKind::Variance
        } else {
            ImpurityKind::Entropy
        }
    }

    /// `(assignment, probability)` for every support point.
    pub fn support(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.points.iter().map(|p| p.as_slice()).zip(self.probs.iter().copied())
    }

    /// Probability of the event `variable = value` for every pair in `event`.
    pub fn probability(&self, event: &[(usize, u32)]) -> f64 {
        self.support()
            .filter(|(pt, _)| event.iter().all(|&(v, x)| pt[v] == x))
            .map(|(_, p)| p)
            .sum()
    }

    fn check_input(&self, m: usize) -> Result<()> {
        if m >= self.n_inputs {
            return Err(Error::NotAnInput(m));
        }
        Ok(())
    }

    fn guard(&self) -> Result<()> {
        if self.n_inputs > MAX_INPUTS {
            return Err(Error::GuardExceeded(format!(
                "{} inputs exceeds the enumeration limit of {MAX_INPUTS}",
                self.n_inputs
            )));
        }
        Ok(())
    }

    /// Parses the text distribution format: a header `name:arity,...` listing
    /// the inputs, the target and optionally the context, followed by one
    /// line `v1,...,vp,y[,xc] probability` per support point. The context is
    /// present when `context` names the last header variable.
    pub fn parse(text: &str, context: Option<&str>) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Distribution("missing header".into()))?;
        let mut names = Vec::new();
        let mut arities = Vec::new();
        for field in header.split(',') {
            let (name, arity) = field
                .split_once(':')
                .ok_or_else(|| Error::Distribution(format!("bad header field {field:?}")))?;
            names.push(name.trim().to_string());
            arities.push(arity.trim().parse::<usize>().map_err(|_| {
                Error::Distribution(format!("bad arity in header field {field:?}"))
            })?);
        }
        let has_context = match context {
            Some(c) if names.last().map(String::as_str) == Some(c) => true,
            Some(c) => {
                return Err(Error::Distribution(format!(
                    "context {c:?} must be the last header variable"
                )))
            }
            None => false,
        };
        let min = 2 + has_context as usize;
        if names.len() < min {
            return Err(Error::Distribution("header needs inputs and a target".into()));
        }
        let n_inputs = names.len() - 1 - has_context as usize;
        let mut support = Vec::new();
        for line in lines {
            let (values, prob) = line
                .rsplit_once(char::is_whitespace)
                .ok_or_else(|| Error::Distribution(format!("bad support line {line:?}")))?;
            let point = values
                .trim()
                .split(',')
                .map(|v| v.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Distribution(format!("bad values in line {line:?}")))?;
            let p: f64 = prob
                .parse()
                .map_err(|_| Error::Distribution(format!("bad probability in line {line:?}")))?;
            support.push((point, p));
        }
        Self::new(names, arities, n_inputs, has_context, support)
    }

    pub fn load(path: impl AsRef<Path>, context: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, context)
    }

    /// Inverse of [`JointDistribution::parse`].
    pub fn to_text(&self) -> String {
        let header: Vec<String> = self
            .names
            .iter()
            .zip(&self.arities)
            .map(|(n, a)| format!("{n}:{a}"))
            .collect();
        let mut out = header.join(",");
        out.push('\n');
        for (pt, p) in self.support() {
            let vals: Vec<String> = pt.iter().map(u32::to_string).collect();
            out.push_str(&format!("{} {}\n", vals.join(","), p));
        }
        out
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Impurity decrease for a probability-mass table `[split value][y]`.
/// Returns `None` when the table carries no mass.
fn table_gain(mass: &[f64], y_arity: usize, values: Option<&[f64]>) -> Option<f64> {
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return None;
    }
    let mut y_tot = vec![0.0; y_arity];
    for row in mass.chunks_exact(y_arity) {
        for (t, &c) in y_tot.iter_mut().zip(row) {
            *t += c;
        }
    }
    let g = match values {
        None => {
            let mut acc = xlogx(total) - y_tot.iter().map(|&c| xlogx(c)).sum::<f64>();
            for row in mass.chunks_exact(y_arity) {
                acc -= xlogx(row.iter().sum());
                acc += row.iter().map(|&c| xlogx(c)).sum::<f64>();
            }
            acc / total
        }
        Some(v) => {
            let var = |m: &[f64]| {
                let w: f64 = m.iter().sum();
                if w <= 0.0 {
                    return (0.0, 0.0);
                }
                let mu = m.iter().zip(v).map(|(p, y)| p * y).sum::<f64>() / w;
                let s = m.iter().zip(v).map(|(p, y)| p * (y - mu) * (y - mu)).sum::<f64>() / w;
                (w, s)
            };
            let (_, parent) = var(&y_tot);
            let children: f64 = mass
                .chunks_exact(y_arity)
                .map(|row| {
                    let (w, s) = var(row);
                    w / total * s
                })
                .sum();
            parent - children
        }
    };
    Some(g.max(0.0))
}

/// Mass tables of one conditioning assignment `B = b`.
struct Group {
    /// `[context][split value][y]`; context axis of length 1 when absent.
    mass: Vec<f64>,
}

struct Grouping<'a> {
    dist: &'a JointDistribution,
    split_arity: usize,
    y_arity: usize,
    groups: Vec<Group>,
}

impl<'a> Grouping<'a> {
    /// Groups the support by the values of `cond`, splitting on `split`, with
    /// a context axis when `with_context` is set.
    fn new(dist: &'a JointDistribution, split: usize, cond: &[usize], with_context: bool) -> Self {
        let split_arity = dist.arities[split];
        let y = dist.target_index();
        let y_arity = dist.arities[y];
        let ctx = if with_context { dist.context_index() } else { None };
        let n_ctx = ctx.map_or(1, |c| dist.arities[c]);
        let block = split_arity * y_arity;
        let mut index: BTreeMap<u64, usize> = BTreeMap::new();
        let mut groups: Vec<Group> = Vec::new();
        for (pt, p) in dist.support() {
            let key = cond
                .iter()
                .fold(0u64, |k, &v| k * dist.arities[v] as u64 + pt[v] as u64);
            let g = *index.entry(key).or_insert_with(|| {
                groups.push(Group {
                    mass: vec![0.0; n_ctx * block],
                });
                groups.len() - 1
            });
            let k = ctx.map_or(0, |c| pt[c] as usize);
            groups[g].mass[k * block + pt[split] as usize * y_arity + pt[y] as usize] += p;
        }
        // fixed summation order
        let order: Vec<usize> = index.into_values().collect();
        let mut slots: Vec<Option<Group>> = groups.into_iter().map(Some).collect();
        let groups = order.into_iter().map(|i| slots[i].take().unwrap()).collect();
        Grouping {
            dist,
            split_arity,
            y_arity,
            groups,
        }
    }

    fn block(&self) -> usize {
        self.split_arity * self.y_arity
    }

    fn values(&self) -> Option<&'a [f64]> {
        self.dist.target_values.as_deref()
    }

    fn marginal(&self, g: &Group) -> Vec<f64> {
        let block = self.block();
        let mut m = vec![0.0; block];
        for slice in g.mass.chunks_exact(block) {
            for (a, &b) in m.iter_mut().zip(slice) {
                *a += b;
            }
        }
        m
    }

    /// `(P(b), G(b), per context (P(b, c), G(b, c)))` for every group.
    fn terms(&self) -> Vec<GroupTerm> {
        let block = self.block();
        self.groups
            .iter()
            .map(|g| {
                let marginal = self.marginal(g);
                let p: f64 = marginal.iter().sum();
                let gain = table_gain(&marginal, self.y_arity, self.values()).unwrap_or(0.0);
                let per_context = g
                    .mass
                    .chunks_exact(block)
                    .map(|slice| {
                        let pc: f64 = slice.iter().sum();
                        (pc, table_gain(slice, self.y_arity, self.values()))
                    })
                    .collect();
                GroupTerm {
                    p,
                    gain,
                    per_context,
                }
            })
            .collect()
    }
}

struct GroupTerm {
    p: f64,
    gain: f64,
    /// `(P(b, c), G(b, c))`, the gain undefined when `P(b, c) = 0`.
    per_context: Vec<(f64, Option<f64>)>,
}

impl GroupTerm {
    fn defined(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.per_context
            .iter()
            .enumerate()
            .filter_map(|(c, &(pc, g))| g.map(|g| (c, pc, g)))
    }
}

/// Conditioning sets `B ⊆ V \ {m}` with their weights `1 / (C(p,k) (p-k))`.
fn conditioning_sets(p: usize, m: usize) -> impl Iterator<Item = (Vec<usize>, f64)> {
    let others: Vec<usize> = (0..p).filter(|&i| i != m).collect();
    (0u64..1 << others.len()).map(move |mask| {
        let set: Vec<usize> = others
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let k = set.len();
        (set, subset_weight(p, k))
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `1 / (C(p,k) (p-k))`.
pub fn subset_weight(p: usize, k: usize) -> f64 {
    1.0 / (binomial(p, k) * (p - k) as f64)
}

/// Exact `G(Y; X_m | B=b[, Xc=xc])`, or `None` when the conditioning event
/// has probability zero. With entropy this is the conditional mutual
/// information in bits.
pub fn cond_mi(
    dist: &JointDistribution,
    m: usize,
    b: &[(usize, u32)],
    context_value: Option<u32>,
) -> Result<Option<f64>> {
    dist.check_input(m)?;
    let mut event = b.to_vec();
    if let Some(v) = context_value {
        let c = dist.context_index().ok_or(Error::NoContext)?;
        if v as usize >= dist.arities[c] {
            return Err(Error::UnknownContextValue(v));
        }
        event.push((c, v));
    }
    for &(v, x) in &event {
        if v >= dist.arities.len() || x as usize >= dist.arities[v] {
            return Err(Error::Distribution(format!("invalid assignment {v}={x}")));
        }
    }
    let y = dist.target_index();
    let ya = dist.arities[y];
    let mut mass = vec![0.0; dist.arities[m] * ya];
    for (pt, p) in dist.support() {
        if event.iter().all(|&(v, x)| pt[v] == x) {
            mass[pt[m] as usize * ya + pt[y] as usize] += p;
        }
    }
    Ok(table_gain(&mass, ya, dist.target_values.as_deref()))
}

/// Exact `G(Y; X | B) = sum_b P(b) G(Y; X | B=b)` for any split variable
/// (an input or the context) and conditioning set of inputs.
pub fn conditional_information(dist: &JointDistribution, split: usize, cond: &[usize]) -> f64 {
    Grouping::new(dist, split, cond, false)
        .terms()
        .iter()
        .map(|t| t.p * t.gain)
        .sum()
}

/// `G(Y; V)` computed directly from the joint table: target impurity minus
/// its expectation given the full input vector.
pub fn joint_information(dist: &JointDistribution) -> f64 {
    let y = dist.target_index();
    let ya = dist.arities[y];
    let mut by_inputs: BTreeMap<&[u32], Vec<f64>> = BTreeMap::new();
    for (pt, p) in dist.support() {
        by_inputs.entry(&pt[..dist.n_inputs]).or_insert_with(|| vec![0.0; ya])[pt[y] as usize] += p;
    }
    let rows: Vec<f64> = by_inputs.into_values().flatten().collect();
    table_gain(&rows, ya, dist.target_values.as_deref()).unwrap_or(0.0)
}

/// Exact asymptotic scores of one input at one context value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContextualScores {
    /// Limit of the node-level signed score.
    pub signed: f64,
    pub abs: f64,
    /// Importance under the distribution conditioned on the context value.
    pub baseline: f64,
    pub global_context: f64,
}

impl ContextualScores {
    /// `Imp - Imp(.|Xc=c)`, the score obtained from two separate forests.
    pub fn two_forest_difference(&self, imp: f64) -> f64 {
        imp - self.baseline
    }
}

/// Every asymptotic score of one input.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticScores {
    pub imp: f64,
    /// Per context value; `None` when the value has probability zero.
    pub contexts: Vec<Option<ContextualScores>>,
    pub global_context: Option<f64>,
}

/// All asymptotic scores of input `m` in one enumeration.
pub fn asymptotic_scores(dist: &JointDistribution, m: usize) -> Result<AsymptoticScores> {
    dist.check_input(m)?;
    dist.guard()?;
    let p = dist.n_inputs;
    let n_ctx = if dist.has_context {
        dist.context_arity()?
    } else {
        0
    };
    let p_ctx: Vec<f64> = (0..n_ctx)
        .map(|c| dist.probability(&[(dist.context_index().unwrap(), c as u32)]))
        .collect();

    let mut imp = 0.0;
    let mut abs = vec![0.0; n_ctx];
    let mut signed = vec![0.0; n_ctx];
    let mut baseline = vec![0.0; n_ctx];
    let mut global = 0.0;
    for (cond, w) in conditioning_sets(p, m) {
        let grouping = Grouping::new(dist, m, &cond, dist.has_context);
        let (mut s_imp, mut s_global) = (0.0, 0.0);
        let mut s_abs = vec![0.0; n_ctx];
        let mut s_signed = vec![0.0; n_ctx];
        let mut s_base = vec![0.0; n_ctx];
        for t in grouping.terms() {
            s_imp += t.p * t.gain;
            if n_ctx == 0 {
                continue;
            }
            let mut within = 0.0;
            for (c, &(pc, gc)) in t.per_context.iter().enumerate() {
                let gc = gc.unwrap_or(0.0);
                let d = t.gain - gc;
                s_abs[c] += t.p * d.abs();
                s_signed[c] += t.p * d;
                if pc > 0.0 {
                    s_base[c] += pc / p_ctx[c] * gc;
                    within += pc * gc;
                }
            }
            s_global += t.p * t.gain - within;
        }
        imp += w * s_imp;
        global += w * s_global;
        for c in 0..n_ctx {
            abs[c] += w * s_abs[c];
            signed[c] += w * s_signed[c];
            baseline[c] += w * s_base[c];
        }
    }
    Ok(AsymptoticScores {
        imp,
        contexts: (0..n_ctx)
            .map(|c| {
                (p_ctx[c] > 0.0).then_some(ContextualScores {
                    signed: signed[c],
                    abs: abs[c],
                    baseline: baseline[c],
                    global_context: global,
                })
            })
            .collect(),
        global_context: dist.has_context.then_some(global),
    })
}

/// Asymptotic mean decrease of impurity of input `m`.
pub fn asymptotic_mdi(dist: &JointDistribution, m: usize) -> Result<f64> {
    Ok(asymptotic_scores(dist, m)?.imp)
}

/// Asymptotic contextual scores of input `m` at context value `value`.
pub fn asymptotic_contextual(
    dist: &JointDistribution,
    m: usize,
    value: u32,
) -> Result<ContextualScores> {
    let n_ctx = dist.context_arity()?;
    if value as usize >= n_ctx {
        return Err(Error::UnknownContextValue(value));
    }
    asymptotic_scores(dist, m)?.contexts[value as usize].ok_or(Error::EmptyContextSlice(value))
}

/// Whether `G(Y; X_m | B) > 0` for some `B ⊆ V \ {m}`.
pub fn is_relevant(dist: &JointDistribution, m: usize) -> Result<bool> {
    dist.check_input(m)?;
    dist.guard()?;
    Ok(conditioning_sets(dist.n_inputs, m)
        .any(|(cond, _)| conditional_information(dist, m, &cond) > TOL))
}

/// Which formulation of context dependence to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// `∃ B, b, c: G(Y;X|B=b,Xc=c) ≠ G(Y;X|B=b)`.
    Definition = 1,
    /// `∃ B, b, c1, c2: G(Y;X|Xc=c1,B=b) ≠ G(Y;X|Xc=c2,B=b)`.
    ContextPair = 3,
    /// `∃ B, c: G(Y;X|Xc=c,B) ≠ G(Y;X|B)`.
    ContextValue = 4,
    /// `∃ B, b: G(Y;X|Xc,B=b) ≠ G(Y;X|B=b)`.
    Assignment = 5,
    /// `∃ B: G(Y;X|Xc,B) ≠ G(Y;X|B)`.
    Averaged = 6,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Definition,
        Condition::ContextPair,
        Condition::ContextValue,
        Condition::Assignment,
        Condition::Averaged,
    ];

    pub fn from_number(n: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| *c as u8 == n)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown condition {n}")))
    }

    pub fn number(self) -> u8 {
        self as u8
    }
}

/// Exhaustive check of one context-dependence condition for input `m`.
pub fn is_context_dependent(dist: &JointDistribution, m: usize, condition: Condition) -> Result<bool> {
    dist.check_input(m)?;
    dist.guard()?;
    let n_ctx = dist.context_arity()?;
    let p_ctx: Vec<f64> = (0..n_ctx)
        .map(|c| dist.probability(&[(dist.context_index().unwrap(), c as u32)]))
        .collect();
    for (cond, _) in conditioning_sets(dist.n_inputs, m) {
        let terms = Grouping::new(dist, m, &cond, true).terms();
        let found = match condition {
            Condition::Definition => terms
                .iter()
                .any(|t| t.defined().any(|(_, _, g)| (g - t.gain).abs() > TOL)),
            Condition::ContextPair => terms.iter().any(|t| {
                let gs: Vec<f64> = t.defined().map(|(_, _, g)| g).collect();
                gs.iter().any(|a| gs.iter().any(|b| (a - b).abs() > TOL))
            }),
            Condition::ContextValue => {
                let plain: f64 = terms.iter().map(|t| t.p * t.gain).sum();
                (0..n_ctx).filter(|&c| p_ctx[c] > 0.0).any(|c| {
                    let within: f64 = terms
                        .iter()
                        .filter_map(|t| t.per_context[c].1.map(|g| t.per_context[c].0 / p_ctx[c] * g))
                        .sum();
                    (within - plain).abs() > TOL
                })
            }
            Condition::Assignment => terms.iter().any(|t| {
                let avg: f64 = t.defined().map(|(_, pc, g)| pc / t.p * g).sum();
                (avg - t.gain).abs() > TOL
            }),
            Condition::Averaged => {
                let plain: f64 = terms.iter().map(|t| t.p * t.gain).sum();
                let with: f64 = terms
                    .iter()
                    .flat_map(|t| t.defined().map(|(_, pc, g)| pc * g))
                    .sum();
                (with - plain).abs() > TOL
            }
        };
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of the exhaustive sign audit at one context value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactLabel {
    Independent,
    Complementary,
    Redundant,
    Mixed,
}

impl fmt::Display for ExactLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExactLabel::Independent => "independent",
            ExactLabel::Complementary => "complementary",
            ExactLabel::Redundant => "redundant",
            ExactLabel::Mixed => "mixed",
        })
    }
}

/// Signs of `G(Y;X_m|B=b,Xc=c) - G(Y;X_m|B=b)` over every `(B, b)`.
pub fn characterize_exact(dist: &JointDistribution, m: usize, value: u32) -> Result<ExactLabel> {
    dist.check_input(m)?;
    dist.guard()?;
    if value as usize >= dist.context_arity()? {
        return Err(Error::UnknownContextValue(value));
    }
    let (mut up, mut down) = (false, false);
    for (cond, _) in conditioning_sets(dist.n_inputs, m) {
        for t in Grouping::new(dist, m, &cond, true).terms() {
            if let (_, Some(g)) = t.per_context[value as usize] {
                let d = g - t.gain;
                up |= d > TOL;
                down |= d < -TOL;
            }
        }
    }
    Ok(match (up, down) {
        (false, false) => ExactLabel::Independent,
        (true, false) => ExactLabel::Complementary,
        (false, true) => ExactLabel::Redundant,
        (true, true) => ExactLabel::Mixed,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremCheck {
    pub holds: bool,
    pub witness: Option<String>,
}

impl TheoremCheck {
    fn pass() -> Self {
        TheoremCheck {
            holds: true,
            witness: None,
        }
    }

    fn fail(witness: String) -> Self {
        TheoremCheck {
            holds: false,
            witness: Some(witness),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremReport {
    /// Context irrelevant ⇔ every input context-independent and `I(Y;Xc) = 0`.
    pub irrelevant_context: TheoremCheck,
    /// Context-independent ⇔ asymptotic absolute score 0 at every value.
    pub zero_abs_score: TheoremCheck,
    /// `|signed| = abs` ⇒ complementary when negative, redundant when positive.
    pub sign_characterization: TheoremCheck,
}

impl TheoremReport {
    pub fn all_hold(&self) -> bool {
        self.irrelevant_context.holds && self.zero_abs_score.holds && self.sign_characterization.holds
    }
}

/// Checks the three context theorems on `dist` by brute force.
pub fn verify_theorems(dist: &JointDistribution) -> Result<TheoremReport> {
    dist.guard()?;
    let c = dist.context_index().ok_or(Error::NoContext)?;
    let p = dist.n_inputs;
    let n_ctx = dist.arities[c];

    let dependent: Vec<bool> = (0..p)
        .map(|m| is_context_dependent(dist, m, Condition::Definition))
        .collect::<Result<_>>()?;
    let scores: Vec<AsymptoticScores> = (0..p)
        .into_par_iter()
        .map(|m| asymptotic_scores(dist, m))
        .collect::<Result<_>>()?;

    // context relevance: some B ⊆ V with G(Y; Xc | B) > 0
    let all: Vec<usize> = (0..p).collect();
    let mut relevant_via = None;
    for mask in 0u64..1 << p {
        let cond: Vec<usize> = all.iter().copied().filter(|&i| mask >> i & 1 == 1).collect();
        let g = conditional_information(dist, c, &cond);
        if g > TOL {
            relevant_via = Some((cond, g));
            break;
        }
    }
    let marginal = conditional_information(dist, c, &[]);
    let lhs = relevant_via.is_none();
    let rhs = !dependent.iter().any(|&d| d) && marginal <= TOL;
    let t1 = if lhs == rhs {
        TheoremCheck::pass()
    } else {
        let first = dependent.iter().position(|&d| d);
        TheoremCheck::fail(format!(
            "context irrelevant: {lhs} (witness {relevant_via:?}); \
             first context-dependent input: {first:?}; I(Y;Xc) = {marginal:e}"
        ))
    };

    let mut t2 = TheoremCheck::pass();
    let mut t3 = TheoremCheck::pass();
    for m in 0..p {
        let abs_zero = scores[m]
            .contexts
            .iter()
            .flatten()
            .all(|s| s.abs <= TOL);
        if dependent[m] == abs_zero && t2.holds {
            t2 = TheoremCheck::fail(format!(
                "input {m}: context-dependent {} but abs scores {:?}",
                dependent[m],
                scores[m].contexts.iter().flatten().map(|s| s.abs).collect::<Vec<_>>()
            ));
        }
        if !dependent[m] {
            continue;
        }
        for x in 0..n_ctx {
            let Some(s) = scores[m].contexts[x] else {
                continue;
            };
            if s.abs <= TOL || (s.signed.abs() - s.abs).abs() > TOL {
                continue;
            }
            let label = characterize_exact(dist, m, x as u32)?;
            let expected = if s.signed < 0.0 {
                ExactLabel::Complementary
            } else {
                ExactLabel::Redundant
            };
            if label != expected && t3.holds {
                t3 = TheoremCheck::fail(format!(
                    "input {m}, context {x}: signed {} = abs but audit says {label}",
                    s.signed
                ));
            }
        }
    }
    Ok(TheoremReport {
        irrelevant_context: t1,
        zero_abs_score: t2,
        sign_characterization: t3,
    })
}

/// Relevance and context-dependence verdicts of one input.
#[derive(Clone, Debug, PartialEq)]
pub struct DefinitionChecks {
    pub variable: usize,
    pub name: String,
    pub relevant: bool,
    /// `(condition, holds)` for every condition, in [`Condition::ALL`] order.
    pub conditions: Vec<(Condition, bool)>,
    /// Exact sign audit per context value; `None` for unseen values.
    pub exact: Vec<Option<ExactLabel>>,
}

/// Brute-force verdicts for every input.
pub fn check_definitions(dist: &JointDistribution) -> Result<Vec<DefinitionChecks>> {
    let c = dist.context_index().ok_or(Error::NoContext)?;
    (0..dist.n_inputs)
        .into_par_iter()
        .map(|m| {
            let conditions = Condition::ALL
                .into_iter()
                .map(|k| Ok((k, is_context_dependent(dist, m, k)?)))
                .collect::<Result<_>>()?;
            let exact = (0..dist.arities[c] as u32)
                .map(|v| {
                    if dist.probability(&[(c, v)]) > 0.0 {
                        characterize_exact(dist, m, v).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<_>>()?;
            Ok(DefinitionChecks {
                variable: m,
                name: dist.names[m].clone(),
                relevant: is_relevant(dist, m)?,
                conditions,
                exact,
            })
        })
        .collect()
}

/// Report of every asymptotic score, laid out like a forest report.
pub fn oracle_report(dist: &JointDistribution) -> Result<ImportanceReport> {
    let scores: Vec<AsymptoticScores> = (0..dist.n_inputs)
        .into_par_iter()
        .map(|m| asymptotic_scores(dist, m))
        .collect::<Result<_>>()?;
    let variables = scores
        .into_iter()
        .enumerate()
        .map(|(m, s)| VariableReport {
            column: m,
            name: dist.names[m].clone(),
            imp: s.imp,
            contexts: s
                .contexts
                .iter()
                .map(|c| match c {
                    Some(c) => ContextCell {
                        abs: c.abs,
                        signed: c.signed,
                        baseline: Some(c.baseline),
                        ..ContextCell::default()
                    },
                    None => ContextCell::default(),
                })
                .collect(),
            global_context: s.global_context,
        })
        .collect();
    let context_labels = match dist.context_index() {
        Some(c) => (0..dist.arities[c]).map(|v| v.to_string()).collect(),
        None => Vec::new(),
    };
    Ok(ImportanceReport {
        target: dist.names[dist.target_index()].clone(),
        context: dist.context_index().map(|c| dist.names[c].clone()),
        context_labels,
        variables,
        meta: ReportMeta {
            source: "oracle".into(),
            n_trees: None,
            seed: None,
            impurity: dist.impurity(),
            epsilon: None,
            n_permutations: None,
            replicate_trees: None,
        },
    })
}

/// Random distribution drawn uniformly from the probability simplex over
/// every assignment (full support).
pub fn random_distribution<R: Rng>(
    input_arities: &[usize],
    target_arity: usize,
    context_arity: Option<usize>,
    rng: &mut R,
) -> Result<JointDistribution> {
    random_with_zeros(input_arities, target_arity, context_arity, 0.0, rng)
}

/// Like [`random_distribution`], but each assignment is dropped from the
/// support with probability `zero_fraction` (at least one point is kept).
pub fn random_with_zeros<R: Rng>(
    input_arities: &[usize],
    target_arity: usize,
    context_arity: Option<usize>,
    zero_fraction: f64,
    rng: &mut R,
) -> Result<JointDistribution> {
    let mut arities = input_arities.to_vec();
    arities.push(target_arity);
    arities.extend(context_arity);
    let total: usize = arities.iter().product();
    let mut points = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut pt = vec![0u32; arities.len()];
        for (slot, &a) in pt.iter_mut().zip(&arities).rev() {
            *slot = (idx % a) as u32;
            idx /= a;
        }
        points.push(pt);
    }
    // exponential spacings give a flat Dirichlet draw
    let mut weights: Vec<f64> = (0..total)
        .map(|_| {
            let u: f64 = rng.gen::<f64>();
            -(1.0 - u).ln()
        })
        .collect();
    if zero_fraction > 0.0 {
        let keep = rng.gen_range(0..total);
        for (i, w) in weights.iter_mut().enumerate() {
            if i != keep && rng.gen::<f64>() < zero_fraction {
                *w = 0.0;
            }
        }
    }
    let sum: f64 = weights.iter().sum();
    let support = points
        .into_iter()
        .zip(weights)
        .map(|(pt, w)| (pt, w / sum))
        .collect();
    let mut names: Vec<String> = (1..=input_arities.len()).map(|i| format!("X{i}")).collect();
    names.push("Y".into());
    if context_arity.is_some() {
        names.push("Xc".into());
    }
    JointDistribution::new(names, arities, input_arities.len(), context_arity.is_some(), support)
}
