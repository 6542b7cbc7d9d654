//! Ordered decision diagrams over propagated predicates.
//!
//! Level `j` decides predicate `order[j]`: the high child conjoins its Ψ row,
//! the low child its ¬Ψ row. Infeasible children go to `t0`; feasible children
//! at the last level go to `t1`. Every root-to-`t1` path is a feasible violation
//! pattern, and the set of those paths is the complete characterization.
//!
//! Nodes store only their creating edge, so a node's predicate is the root
//! predicate plus one row per level along that edge chain. With reduction on,
//! a new node is merged into the first equivalent node already on its level.

mod dot;
mod equivalence;
mod ordering;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Predicate;
use crate::lp;
use crate::reach::PropagatedPredicates;

pub use equivalence::{
    equivalence_names, make_equivalence, suffix_paths, Exhaustive, FarkasMilp, NodeEquivalence,
};
pub use ordering::{
    make_ordering, ordering_strategies, ordering_strategy, DefaultOrder, MiddleOrder,
    OrderingStrategy, RandomOrder, VariableOrder,
};

pub type NodeId = usize;

pub const T0: NodeId = 0;
pub const T1: NodeId = 1;
pub const ROOT: NodeId = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct BddNode {
    pub id: NodeId,
    /// Number of decisions taken above this node; the root is at 0.
    pub level: usize,
    /// Creating edge `(parent, high)`; `None` for the root and terminals.
    pub parent: Option<(NodeId, bool)>,
    pub low: Option<NodeId>,
    pub high: Option<NodeId>,
    /// Valuation found by the feasibility check that created this node.
    pub witness: Option<Vec<f64>>,
    /// Valuations certifying the low and high edge, when feasible.
    pub edge_witness: [Option<Vec<f64>>; 2],
}

impl BddNode {
    fn new(id: NodeId, level: usize, parent: Option<(NodeId, bool)>, witness: Option<Vec<f64>>) -> Self {
        Self {
            id,
            level,
            parent,
            low: None,
            high: None,
            witness,
            edge_witness: [None, None],
        }
    }

    pub fn child(&self, high: bool) -> Option<NodeId> {
        if high {
            self.high
        } else {
            self.low
        }
    }

    pub fn is_terminal(&self) -> bool {
        self.id == T0 || self.id == T1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BddStats {
    /// Root, internal nodes and both terminals.
    pub nodes: usize,
    /// Largest level, counting the terminal pair as a level of 2.
    pub width: usize,
    pub build_time: Duration,
}

/// One accepted path.
#[derive(Debug, Clone, PartialEq)]
pub struct Characterization {
    /// Bits by level.
    pub raw: Vec<bool>,
    /// Bits by predicate, i.e. in time order of the unsafe steps.
    pub bits: Vec<bool>,
    /// Valuation realizing the pattern.
    pub witness: Vec<f64>,
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl Characterization {
    pub fn time_string(&self) -> String {
        bit_string(&self.bits)
    }

    pub fn raw_string(&self) -> String {
        bit_string(&self.raw)
    }

    /// The all-zeros pattern: executions that never enter the unsafe set.
    pub fn is_safe_modality(&self) -> bool {
        self.bits.iter().all(|b| !b)
    }
}

#[derive(Debug, Clone)]
pub struct Bdd {
    nodes: Vec<BddNode>,
    order: VariableOrder,
    /// Non-terminal node ids per level `0..k`.
    levels: Vec<Vec<NodeId>>,
    reduced: bool,
    equivalence: Option<&'static str>,
    build_time: Duration,
}

impl Bdd {
    /// Builds the OBDD, or the reduced diagram using the default equivalence
    /// check when `reduce` is set.
    pub fn construct(pp: &PropagatedPredicates, order: &VariableOrder, reduce: bool) -> Result<Self> {
        if reduce {
            let mut eq = FarkasMilp::default();
            Self::construct_with(pp, order, Some(&mut eq))
        } else {
            Self::construct_with(pp, order, None)
        }
    }

    pub fn construct_with(
        pp: &PropagatedPredicates,
        order: &VariableOrder,
        mut equivalence: Option<&mut dyn NodeEquivalence>,
    ) -> Result<Self> {
        let start = Instant::now();
        let k = pp.k();
        if order.len() != k {
            return Err(Error::mismatch("ordering length", k, order.len()));
        }
        if let Some(eq) = equivalence.as_deref_mut() {
            eq.prepare(pp)?;
        }
        let root_witness = lp::check_feasible(pp.root())?.ok_or_else(|| {
            Error::InvalidArgument("root predicate is empty; nothing is reachable".into())
        })?;
        let mut bdd = Bdd {
            nodes: vec![
                BddNode::new(T0, k, None, None),
                BddNode::new(T1, k, None, None),
                BddNode::new(ROOT, 0, None, Some(root_witness)),
            ],
            order: order.clone(),
            levels: vec![vec![ROOT]],
            reduced: equivalence.is_some(),
            equivalence: equivalence.as_ref().map(|e| e.name()),
            build_time: Duration::ZERO,
        };

        for j in 0..k {
            let p = order.at(j);
            let frontier = bdd.levels[j].clone();
            let preds: Vec<Predicate> = frontier.iter().map(|&id| bdd.predicate_of(pp, id)).collect();

            // every feasibility check on this level is independent
            let candidates: Vec<(usize, bool)> = (0..frontier.len())
                .flat_map(|i| [(i, true), (i, false)])
                .collect();
            let checks: Vec<Result<Option<Vec<f64>>>> = candidates
                .par_iter()
                .map(|&(i, bit)| Ok(lp::check_feasible(&preds[i].and(pp.row(p, bit)))?))
                .collect();

            let mut next: Vec<NodeId> = Vec::new();
            let mut next_preds: Vec<Predicate> = Vec::new();
            let future: Vec<usize> = order.as_slice()[j + 1..].to_vec();
            for (&(i, bit), check) in candidates.iter().zip(checks) {
                let parent = frontier[i];
                let wrap = |e: Error| Error::Construction {
                    level: j + 1,
                    node: parent,
                    source: Box::new(e),
                };
                let target = match check.map_err(wrap)? {
                    None => T0,
                    Some(alpha) => {
                        bdd.nodes[parent].edge_witness[bit as usize] = Some(alpha.clone());
                        if j + 1 == k {
                            T1
                        } else {
                            let pred = preds[i].and(pp.row(p, bit));
                            let mut merged = None;
                            if let Some(eq) = equivalence.as_deref() {
                                let verdicts: Vec<Result<bool>> = next_preds
                                    .par_iter()
                                    .map(|other| eq.equivalent(pp, &pred, other, &future))
                                    .collect();
                                for (idx, v) in verdicts.into_iter().enumerate() {
                                    if v.map_err(wrap)? {
                                        merged = Some(next[idx]);
                                        break;
                                    }
                                }
                            }
                            match merged {
                                Some(id) => id,
                                None => {
                                    let id = bdd.nodes.len();
                                    bdd.nodes.push(BddNode::new(id, j + 1, Some((parent, bit)), Some(alpha)));
                                    next.push(id);
                                    next_preds.push(pred);
                                    id
                                }
                            }
                        }
                    }
                };
                let node = &mut bdd.nodes[parent];
                if bit {
                    node.high = Some(target);
                } else {
                    node.low = Some(target);
                }
            }
            if j + 1 < k {
                bdd.levels.push(next);
            }
        }
        bdd.build_time = start.elapsed();
        Ok(bdd)
    }

    /// Root predicate conjoined with the rows along `id`'s creating edges.
    pub fn predicate_of(&self, pp: &PropagatedPredicates, id: NodeId) -> Predicate {
        pp.conjunction(self.creation_path(id))
    }

    /// `(predicate, bit)` decisions along the creating edges of `id`, root first.
    pub fn creation_path(&self, id: NodeId) -> Vec<(usize, bool)> {
        let mut path = Vec::new();
        let mut cur = id;
        while let Some((parent, bit)) = self.nodes[cur].parent {
            path.push((self.order.at(self.nodes[parent].level), bit));
            cur = parent;
        }
        path.reverse();
        path
    }

    pub fn nodes(&self) -> &[BddNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &BddNode {
        &self.nodes[id]
    }

    pub fn order(&self) -> &VariableOrder {
        &self.order
    }

    pub fn k(&self) -> usize {
        self.order.len()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn equivalence(&self) -> Option<&'static str> {
        self.equivalence
    }

    /// Non-terminal nodes per level.
    pub fn levels(&self) -> &[Vec<NodeId>] {
        &self.levels
    }

    pub fn stats(&self) -> BddStats {
        let internal: usize = self.levels.iter().map(Vec::len).sum();
        let widest = self.levels.iter().map(Vec::len).max().unwrap_or(0);
        BddStats {
            nodes: internal + 2,
            width: widest.max(2),
            build_time: self.build_time,
        }
    }

    /// Every accepted path with a witness valuation, sorted by level bits.
    ///
    /// A path made only of creating edges reuses the valuation cached at its
    /// final edge; a path through a merged node is re-solved, since the cached
    /// valuation certifies the representative's own path.
    pub fn traverse(&self, pp: &PropagatedPredicates) -> Result<Vec<Characterization>> {
        let mut found: BTreeMap<Vec<bool>, Vec<f64>> = BTreeMap::new();
        let mut stack: Vec<(NodeId, Vec<bool>, bool)> = vec![(ROOT, Vec::new(), true)];
        while let Some((id, prefix, created)) = stack.pop() {
            let node = &self.nodes[id];
            for bit in [false, true] {
                let Some(child) = node.child(bit) else { continue };
                if child == T0 {
                    continue;
                }
                let mut path = prefix.clone();
                path.push(bit);
                let on_creation = created && self.nodes[child].parent == Some((id, bit));
                if child == T1 {
                    let witness = match (&node.edge_witness[bit as usize], created) {
                        (Some(alpha), true) => alpha.clone(),
                        _ => self.solve_path(pp, &path)?,
                    };
                    found.insert(path, witness);
                } else {
                    stack.push((child, path, on_creation));
                }
            }
        }
        Ok(found
            .into_iter()
            .map(|(raw, witness)| Characterization {
                bits: self.order.to_time_order(&raw),
                raw,
                witness,
            })
            .collect())
    }

    fn solve_path(&self, pp: &PropagatedPredicates, raw: &[bool]) -> Result<Vec<f64>> {
        let pred = pp.conjunction(raw.iter().enumerate().map(|(j, &b)| (self.order.at(j), b)));
        lp::check_feasible(&pred)?.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "accepted path {} has no witness; the diagram is inconsistent",
                bit_string(raw)
            ))
        })
    }

    pub fn to_dot(&self, show_t0: bool) -> String {
        dot::render(self, show_t0)
    }
}
