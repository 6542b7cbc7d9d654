//! Branch and bound over 0/1 variables, and the distinguisher models that
//! decide whether two decision-diagram nodes are equivalent.

mod distinguish;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::lp::{LpProblem, LpStatus, Simplex, SimplexOptions};

pub use distinguish::{
    build_phase, isomorphs, phase_selection, valuation_radius, FuturePair, PhaseLayout,
};

/// A linear program in which the variables listed in `binaries` must be 0 or 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpProblem {
    /// Maximization problem; binaries are additionally clamped to `[0, 1]`.
    pub lp: LpProblem,
    pub binaries: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilpParams {
    /// Box radius assumed for continuous variables when sizing big-M constants.
    /// `None` falls back to `big_m_floor`.
    pub radius: Option<f64>,
    pub big_m_floor: f64,
    /// Upper gate on Farkas multipliers of deselected rows.
    pub multiplier_cap: f64,
    /// Strictness of `gᵀy <= -farkas_eps` and lower gate `y >= farkas_eps·z`.
    pub farkas_eps: f64,
    pub integrality_tol: f64,
    pub max_binaries: usize,
    pub node_limit: usize,
    pub simplex: SimplexOptions,
}

impl Default for MilpParams {
    fn default() -> Self {
        Self {
            radius: Some(1e3),
            big_m_floor: 1e6,
            multiplier_cap: 1e6,
            farkas_eps: 1e-4,
            integrality_tol: 1e-6,
            max_binaries: 40,
            node_limit: 200_000,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MilpStatus {
    Feasible { incumbent: Vec<f64>, objective: f64 },
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MilpResult {
    pub status: MilpStatus,
    /// Binaries at 1 in the incumbent, as positions into `binaries`.
    pub selected: Vec<usize>,
    pub nodes: usize,
}

impl MilpResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, MilpStatus::Feasible { .. })
    }

    pub fn objective(&self) -> Option<f64> {
        match self.status {
            MilpStatus::Feasible { objective, .. } => Some(objective),
            MilpStatus::Infeasible => None,
        }
    }

    pub fn incumbent(&self) -> Option<&[f64]> {
        match &self.status {
            MilpStatus::Feasible { incumbent, .. } => Some(incumbent),
            MilpStatus::Infeasible => None,
        }
    }
}

struct Node {
    bound: f64,
    seq: usize,
    /// `(lo, hi)` per entry of `binaries`.
    fixings: Vec<(f64, f64)>,
    /// Relaxation optimum at this node.
    x: Vec<f64>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // best bound first, then first in
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .total_cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

enum Relaxation {
    Infeasible,
    Solved { x: Vec<f64>, value: f64 },
}

struct Solver<'a> {
    problem: &'a MilpProblem,
    base_bounds: Vec<(f64, f64)>,
    simplex: Simplex,
}

impl Solver<'_> {
    fn relax(&self, fixings: &[(f64, f64)]) -> Result<Relaxation> {
        let mut bounds = self.base_bounds.clone();
        for (&v, &(lo, hi)) in self.problem.binaries.iter().zip(fixings) {
            bounds[v] = (bounds[v].0.max(lo), bounds[v].1.min(hi));
        }
        let lp = LpProblem {
            objective: self.problem.lp.objective.clone(),
            constraints: self.problem.lp.constraints.clone(),
            bounds: Some(bounds),
        };
        let r = self.simplex.solve(&lp)?;
        match r.status {
            LpStatus::Infeasible => Ok(Relaxation::Infeasible),
            LpStatus::Unbounded => Err(Error::UnboundedRelaxation),
            LpStatus::Feasible => Ok(Relaxation::Solved {
                x: r.witness.unwrap_or_default(),
                value: r.objective.unwrap_or(0.0),
            }),
        }
    }
}

/// Maximizes over the binaries by best-bound branch and bound.
///
/// An LP solution whose binaries are integral within tolerance is re-solved
/// with those binaries fixed before it is accepted. If that re-solve is
/// infeasible the node branches on any binary still free.
pub fn solve_milp(problem: &MilpProblem, params: &MilpParams) -> Result<MilpResult> {
    let d = problem.lp.dimension();
    let nb = problem.binaries.len();
    if nb > params.max_binaries {
        return Err(Error::TooManyBinaries {
            count: nb,
            limit: params.max_binaries,
        });
    }
    if let Some(&v) = problem.binaries.iter().find(|&&v| v >= d) {
        return Err(Error::InvalidArgument(format!(
            "binary index {v} out of range for {d} variables"
        )));
    }
    let mut base_bounds = problem
        .lp
        .bounds
        .clone()
        .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); d]);
    if base_bounds.len() != d {
        return Err(Error::mismatch("variable bounds", d, base_bounds.len()));
    }
    for &v in &problem.binaries {
        base_bounds[v] = (base_bounds[v].0.max(0.0), base_bounds[v].1.min(1.0));
    }
    let solver = Solver {
        problem,
        base_bounds,
        simplex: Simplex::new(params.simplex),
    };
    let tol = params.integrality_tol;

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut heap = BinaryHeap::new();
    let mut seq = 0;
    let root = vec![(0.0, 1.0); nb];
    let mut nodes = 0;
    if let Relaxation::Solved { x, value } = solver.relax(&root)? {
        heap.push(Node { bound: value, seq, fixings: root, x });
        seq += 1;
    }

    while let Some(node) = heap.pop() {
        let x = &node.x;
        nodes += 1;
        if nodes > params.node_limit {
            return Err(Error::NodeLimit(params.node_limit));
        }
        if best.as_ref().is_some_and(|(_, b)| node.bound <= b + 1e-9) {
            continue;
        }
        let frac: Vec<f64> = problem
            .binaries
            .iter()
            .map(|&v| (x[v] - x[v].round()).abs())
            .collect();

        let mut branch_on = None;
        let mut worst = tol;
        for (i, &f) in frac.iter().enumerate() {
            if f > worst {
                worst = f;
                branch_on = Some(i);
            }
        }

        if branch_on.is_none() {
            let fixed: Vec<(f64, f64)> = problem
                .binaries
                .iter()
                .map(|&v| {
                    let r = x[v].round();
                    (r, r)
                })
                .collect();
            match solver.relax(&fixed)? {
                Relaxation::Solved { x: xf, value } => {
                    if best.as_ref().is_none_or(|(_, b)| value > b + 1e-9) {
                        best = Some((xf, value));
                    }
                    continue;
                }
                Relaxation::Infeasible => {
                    // leakage through a big-M row: split the node on any
                    // binary that is still free, most fractional first
                    branch_on = (0..nb)
                        .filter(|&i| {
                            let (lo, hi) = node.fixings[i];
                            let (blo, bhi) = solver.base_bounds[problem.binaries[i]];
                            lo.max(blo) < hi.min(bhi)
                        })
                        .max_by(|&a, &b| frac[a].total_cmp(&frac[b]).then_with(|| b.cmp(&a)));
                    if branch_on.is_none() {
                        continue;
                    }
                }
            }
        }

        let b = branch_on.expect("branch variable chosen above");
        for side in [1.0, 0.0] {
            let mut fixings = node.fixings.clone();
            fixings[b] = (side, side);
            if let Relaxation::Solved { x, value } = solver.relax(&fixings)? {
                if best.as_ref().is_none_or(|(_, bv)| value > bv + 1e-9) {
                    heap.push(Node { bound: value, seq, fixings, x });
                    seq += 1;
                }
            }
        }
    }

    Ok(match best {
        Some((incumbent, objective)) => {
            let selected = problem
                .binaries
                .iter()
                .enumerate()
                .filter(|(_, &v)| incumbent[v] > 0.5)
                .map(|(i, _)| i)
                .collect();
            MilpResult {
                status: MilpStatus::Feasible {
                    incumbent,
                    objective,
                },
                selected,
                nodes,
            }
        }
        None => MilpResult {
            status: MilpStatus::Infeasible,
            selected: Vec::new(),
            nodes,
        },
    })
}
