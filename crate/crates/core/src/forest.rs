//! Forests of totally randomized, fully developed multiway trees.
//!
//! At each node the split variable is drawn uniformly among the input
//! variables not yet used on the path, and the node is split on every value
//! of that variable. A node becomes a leaf when its target is pure, it holds
//! no samples, or every input has been used. The target is never consulted
//! to choose a split.
//!
//! Each tree keeps one buffer of row indices; every node owns a contiguous
//! range of it. Children are laid out inside their parent's range, so the
//! per-node sample sets stay available after construction at the cost of a
//! single `u32` per sample and tree.

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::impurity::{ImpurityKind, SampleSubset, TargetView};
use crate::rng::{RngSpec, Stream};

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    start: u32,
    end: u32,
    depth: u32,
    split: Option<u32>,
    first_child: u32,
    n_children: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    rows: Vec<u32>,
    nodes: Vec<Node>,
}

/// Borrowed handle on one node of a [`Tree`].
#[derive(Clone, Copy, Debug)]
pub struct NodeRef<'a> {
    tree: &'a Tree,
    id: usize,
}

impl<'a> NodeRef<'a> {
    fn node(&self) -> &'a Node {
        &self.tree.nodes[self.id]
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn split_variable(&self) -> Option<usize> {
        self.node().split.map(|s| s as usize)
    }

    pub fn is_leaf(&self) -> bool {
        self.node().split.is_none()
    }

    pub fn depth(&self) -> usize {
        self.node().depth as usize
    }

    /// Rows reaching this node, grouped by child for internal nodes.
    pub fn rows(&self) -> &'a [u32] {
        let n = self.node();
        &self.tree.rows[n.start as usize..n.end as usize]
    }

    pub fn n_samples(&self) -> usize {
        self.rows().len()
    }

    pub fn subset(&self) -> SampleSubset {
        SampleSubset::from_unsorted(self.rows().to_vec())
    }

    /// Children indexed by the split variable's code.
    pub fn children(&self) -> impl Iterator<Item = NodeRef<'a>> + 'a {
        let n = self.node();
        let tree = self.tree;
        (n.first_child..n.first_child + n.n_children).map(move |id| NodeRef {
            tree,
            id: id as usize,
        })
    }
}

impl Tree {
    pub fn root(&self) -> NodeRef<'_> {
        NodeRef { tree: self, id: 0 }
    }

    /// All nodes, parents before children.
    pub fn nodes(&self) -> impl Iterator<Item = NodeRef<'_>> {
        (0..self.nodes.len()).map(move |id| NodeRef { tree: self, id })
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(|n| n.depth as usize).max().unwrap_or(0)
    }
}

fn validate_inputs(dataset: &Dataset, inputs: &[usize]) -> Result<()> {
    if inputs.is_empty() {
        return Err(Error::InvalidParameter("no input variables".into()));
    }
    for (i, &col) in inputs.iter().enumerate() {
        if col >= dataset.n_columns()
            || col == dataset.target()
            || Some(col) == dataset.context()
            || dataset.arity(col).is_none()
            || inputs[..i].contains(&col)
        {
            return Err(Error::NotAnInput(col));
        }
    }
    Ok(())
}

struct Builder<'a> {
    dataset: &'a Dataset,
    target: TargetView<'a>,
    rng: &'a mut Stream,
    rows: Vec<u32>,
    scratch: Vec<u32>,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, id: usize, available: &mut Vec<usize>) {
        let Node { start, end, .. } = self.nodes[id];
        let range = start as usize..end as usize;
        if range.is_empty() || available.is_empty() || self.target.is_pure(&self.rows[range.clone()]) {
            return;
        }

        let pick = self.rng.gen_range(0..available.len());
        let var = available.remove(pick);
        let codes = self.dataset.codes(var).expect("inputs are categorical");
        let arity = self.dataset.arity(var).expect("inputs are categorical");

        // stable counting sort of the node's rows by split value
        let mut offsets = vec![0usize; arity + 1];
        for &r in &self.rows[range.clone()] {
            offsets[codes[r as usize] as usize + 1] += 1;
        }
        for j in 0..arity {
            offsets[j + 1] += offsets[j];
        }
        self.scratch.clear();
        self.scratch.resize(range.len(), 0);
        let mut cursor = offsets.clone();
        for &r in &self.rows[range.clone()] {
            let c = codes[r as usize] as usize;
            self.scratch[cursor[c]] = r;
            cursor[c] += 1;
        }
        self.rows[range.clone()].copy_from_slice(&self.scratch);

        let first_child = self.nodes.len() as u32;
        let depth = self.nodes[id].depth + 1;
        for j in 0..arity {
            self.nodes.push(Node {
                start: start + offsets[j] as u32,
                end: start + offsets[j + 1] as u32,
                depth,
                split: None,
                first_child: 0,
                n_children: 0,
            });
        }
        let node = &mut self.nodes[id];
        node.split = Some(var as u32);
        node.first_child = first_child;
        node.n_children = arity as u32;

        for j in 0..arity {
            let mut rest = available.clone();
            self.grow(first_child as usize + j, &mut rest);
        }
    }
}

/// Grows one totally randomized tree on all rows of `dataset`.
pub fn build_tree(
    dataset: &Dataset,
    inputs: &[usize],
    kind: ImpurityKind,
    rng: &mut Stream,
) -> Result<Tree> {
    validate_inputs(dataset, inputs)?;
    let target = TargetView::new(dataset, kind)?;
    let n = dataset.n_samples() as u32;
    let mut builder = Builder {
        dataset,
        target,
        rng,
        rows: (0..n).collect(),
        scratch: Vec::new(),
        nodes: vec![Node {
            start: 0,
            end: n,
            depth: 0,
            split: None,
            first_child: 0,
            n_children: 0,
        }],
    };
    let mut available = inputs.to_vec();
    builder.grow(0, &mut available);
    Ok(Tree {
        rows: builder.rows,
        nodes: builder.nodes,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    trees: Vec<Tree>,
    seed: u64,
    inputs: Vec<usize>,
    kind: ImpurityKind,
    n_samples: usize,
}

impl Forest {
    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn n_trees(&self) -> usize {
        self.trees.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs
    }

    pub fn impurity_kind(&self) -> ImpurityKind {
        self.kind
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }
}

/// Builds `n_trees` trees, tree `i` drawing from `rng.tree(i)`.
///
/// Trees are grown on the current rayon pool; the result does not depend on
/// the number of worker threads.
pub fn build_forest(
    dataset: &Dataset,
    inputs: &[usize],
    n_trees: usize,
    rng: RngSpec,
    kind: ImpurityKind,
) -> Result<Forest> {
    if n_trees == 0 {
        return Err(Error::InvalidParameter("n_trees must be at least 1".into()));
    }
    validate_inputs(dataset, inputs)?;
    kind.check(dataset.target_kind())?;
    let trees = (0..n_trees)
        .into_par_iter()
        .map(|i| build_tree(dataset, inputs, kind, &mut rng.tree(i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Forest {
        trees,
        seed: rng.seed,
        inputs: inputs.to_vec(),
        kind,
        n_samples: dataset.n_samples(),
    })
}
