//! K-ary hierarchical partitioning of the low space.
//!
//! Cell bounds and base points are exact rationals in box units (`[-1,1]`
//! per coordinate, scaled to the actual bounds only when a point is
//! evaluated). Exactness matters: the center child of a node shares its
//! parent's base point, and the per-base-point ledger keys on literal
//! coordinate equality. Floating-point centers would miss that equality and
//! silently duplicate evaluations.

use crate::embedding::MatrixTag;
use crate::spaces::{BoxSpace, LowPoint};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PartitionError {
    #[error("partition factor K must be an odd integer >= 3, got {0}")]
    BadFactor(usize),
    #[error("the low space must be symmetric about the origin")]
    AsymmetricSpace,
    #[error("node {0} is not a leaf")]
    NotALeaf(usize),
}

pub type NodeId = usize;

/// A tree node `(h, i)` and its cell in box units.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub depth: usize,
    pub index: BigUint,
    pub cell_lo: Vec<BigRational>,
    pub cell_hi: Vec<BigRational>,
    pub base: Vec<BigRational>,
    /// Squared norm of the base point in box units; exact, for grouping.
    pub sq_norm: BigRational,
    /// Scaled floating-point norm of the base point, for the evaluation cap.
    pub norm: f64,
    /// Best value achieved at this node's base point; unset until evaluated
    /// or inherited.
    pub best: Option<f64>,
    pub expanded: bool,
    parent: Option<NodeId>,
}

impl TreeNode {
    pub fn parent(&self) -> Option<NodeId> {
        self.parent
    }

    pub fn best_value(&self) -> f64 {
        self.best.expect("node value read before assignment")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerEntry {
    pub count: u64,
    pub best: f64,
    pub provenance: Option<MatrixTag>,
}

/// Evaluation bookkeeping per exact base point.
#[derive(Debug, Default)]
pub struct BasePointLedger {
    map: HashMap<Vec<BigRational>, LedgerEntry>,
}

impl BasePointLedger {
    pub fn get(&self, key: &[BigRational]) -> Option<&LedgerEntry> {
        self.map.get(key)
    }

    pub fn count(&self, key: &[BigRational]) -> u64 {
        self.map.get(key).map_or(0, |e| e.count)
    }

    pub fn best(&self, key: &[BigRational]) -> Option<f64> {
        self.map.get(key).map(|e| e.best)
    }

    /// Record one evaluation at `key`; the stored best never increases.
    pub fn record(&mut self, key: &[BigRational], value: f64, provenance: Option<MatrixTag>) {
        match self.map.get_mut(key) {
            Some(entry) => {
                entry.count += 1;
                if value < entry.best {
                    entry.best = value;
                    entry.provenance = provenance;
                }
            }
            None => {
                self.map.insert(
                    key.to_vec(),
                    LedgerEntry {
                        count: 1,
                        best: value,
                        provenance,
                    },
                );
            }
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<BigRational>, &LedgerEntry)> {
        self.map.iter()
    }
}

/// Leaves at one depth sharing the rank-`j` largest base-point norm.
#[derive(Debug, Clone)]
pub struct NormGroup {
    pub depth: usize,
    /// 1-based rank: 1 is the largest norm at this depth.
    pub rank: usize,
    pub members: Vec<NodeId>,
}

/// The K-ary partition tree over a symmetric box.
pub struct PartitionTree {
    k: usize,
    dim: usize,
    /// Half-width of the box; box-unit coordinates scale by this factor.
    bound: f64,
    nodes: Vec<TreeNode>,
    leaves_per_depth: Vec<Vec<NodeId>>,
    pub ledger: BasePointLedger,
}

/// Root the tree: a single node `(0,0)` with the zero vector as base point.
pub fn make_root(space: &BoxSpace, k: usize) -> Result<PartitionTree, PartitionError> {
    if k < 3 || k % 2 == 0 {
        return Err(PartitionError::BadFactor(k));
    }
    let dim = space.dim();
    for i in 0..dim {
        if space.lower()[i] != -space.upper()[i] {
            return Err(PartitionError::AsymmetricSpace);
        }
    }
    let one = BigRational::one();
    let root = TreeNode {
        depth: 0,
        index: BigUint::zero(),
        cell_lo: vec![-one.clone(); dim],
        cell_hi: vec![one; dim],
        base: vec![BigRational::zero(); dim],
        sq_norm: BigRational::zero(),
        norm: 0.0,
        best: None,
        expanded: false,
        parent: None,
    };
    Ok(PartitionTree {
        k,
        dim,
        bound: space.upper()[0],
        nodes: vec![root],
        leaves_per_depth: vec![vec![0]],
        ledger: BasePointLedger::default(),
    })
}

impl PartitionTree {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn set_best(&mut self, id: NodeId, value: f64) {
        self.nodes[id].best = Some(value);
    }

    /// Current tree depth (deepest level holding any node).
    pub fn depth(&self) -> usize {
        self.leaves_per_depth.len() - 1
    }

    pub fn leaves_at(&self, depth: usize) -> &[NodeId] {
        self.leaves_per_depth
            .get(depth)
            .map_or(&[], |v| v.as_slice())
    }

    /// The node's base point scaled into the actual box.
    pub fn low_point(&self, id: NodeId) -> LowPoint {
        LowPoint(
            self.nodes[id]
                .base
                .iter()
                .map(|c| rational_to_f64(c) * self.bound)
                .collect(),
        )
    }

    /// Split a leaf into K children along coordinate `depth mod dim`.
    ///
    /// Child cells partition the parent cell into K equal intervals; each
    /// child's base point is its cell center, and the middle child's base
    /// point equals the parent's exactly. Returns child ids in index order.
    pub fn expand(&mut self, id: NodeId) -> Result<Vec<NodeId>, PartitionError> {
        if self.nodes[id].expanded {
            return Err(PartitionError::NotALeaf(id));
        }
        let depth = self.nodes[id].depth;
        let axis = depth % self.dim;
        let k_big = BigInt::from(self.k);
        let parent_index = self.nodes[id].index.clone();
        let lo = self.nodes[id].cell_lo[axis].clone();
        let hi = self.nodes[id].cell_hi[axis].clone();
        let width = &hi - &lo;
        let step = &width / BigRational::from_integer(k_big.clone());
        let half_step = &step / BigRational::from_integer(BigInt::from(2));

        self.nodes[id].expanded = true;
        let pos = self.leaves_per_depth[depth]
            .iter()
            .position(|&n| n == id)
            .expect("expanded node missing from leaf list");
        self.leaves_per_depth[depth].remove(pos);
        if self.leaves_per_depth.len() == depth + 1 {
            self.leaves_per_depth.push(Vec::new());
        }

        let mut children = Vec::with_capacity(self.k);
        for c in 0..self.k {
            let c_lo = &lo + &step * BigRational::from_integer(BigInt::from(c));
            let c_hi = &c_lo + &step;
            let center = &c_lo + &half_step;

            let mut cell_lo = self.nodes[id].cell_lo.clone();
            let mut cell_hi = self.nodes[id].cell_hi.clone();
            let mut base = self.nodes[id].base.clone();
            cell_lo[axis] = c_lo;
            cell_hi[axis] = c_hi;
            base[axis] = center;

            let sq_norm: BigRational = base.iter().map(|b| b * b).sum();
            let norm = rational_to_f64(&sq_norm).sqrt() * self.bound;
            let child = TreeNode {
                depth: depth + 1,
                index: &parent_index * BigUint::from(self.k) + BigUint::from(c),
                cell_lo,
                cell_hi,
                base,
                sq_norm,
                norm,
                best: None,
                expanded: false,
                parent: Some(id),
            };
            let child_id = self.nodes.len();
            self.nodes.push(child);
            self.leaves_per_depth[depth + 1].push(child_id);
            children.push(child_id);
        }
        Ok(children)
    }

    /// Norm groups at depth `h`: distinct exact squared norms of the leaf
    /// base points, sorted descending; group `j` holds the leaves at the
    /// `j`-th largest norm.
    pub fn norm_groups(&self, h: usize) -> Vec<NormGroup> {
        let leaves = self.leaves_at(h);
        if leaves.is_empty() {
            return Vec::new();
        }
        let mut norms: Vec<&BigRational> = leaves.iter().map(|&id| &self.nodes[id].sq_norm).collect();
        norms.sort();
        norms.dedup();
        norms.reverse();
        norms
            .into_iter()
            .enumerate()
            .map(|(idx, gamma)| NormGroup {
                depth: h,
                rank: idx + 1,
                members: leaves
                    .iter()
                    .copied()
                    .filter(|&id| &self.nodes[id].sq_norm == gamma)
                    .collect(),
            })
            .collect()
    }

    /// The group member with minimal best value; ties broken by smallest
    /// node index. Every member must already carry a value.
    pub fn select_in_group(&self, group: &NormGroup) -> NodeId {
        *group
            .members
            .iter()
            .min_by(|&&a, &&b| {
                self.nodes[a]
                    .best_value()
                    .total_cmp(&self.nodes[b].best_value())
                    .then_with(|| self.nodes[a].index.cmp(&self.nodes[b].index))
            })
            .expect("selection over empty group")
    }

    /// Minimum best value over all nodes that carry one.
    pub fn best_overall(&self) -> Option<f64> {
        self.nodes
            .iter()
            .filter_map(|n| n.best)
            .min_by(f64::total_cmp)
    }

    /// Debug dump: one row per node as CSV.
    pub fn dump_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "depth,index,base_point,best_value,eval_count")?;
        for node in &self.nodes {
            let base: Vec<String> = node
                .base
                .iter()
                .map(|c| format!("{}", rational_to_f64(c) * self.bound))
                .collect();
            writeln!(
                out,
                "{},{},{},{},{}",
                node.depth,
                node.index,
                base.join(";"),
                node.best.map_or(String::new(), |b| format!("{b}")),
                self.ledger.count(&node.base),
            )?;
        }
        Ok(())
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational out of f64 range")
}
