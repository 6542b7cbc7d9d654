//! Bounded-horizon reachability as a sequence of stars, and propagation of the
//! unsafe half-space back onto the initial valuation space.
//!
//! With Θ = ⟨c₀, V₀, P₀⟩ and the input set BU as a star, the reach sets obey
//! `S_{i+1} = A·S_i ⊕ BU`. Every Minkowski sum appends the `m_in` input
//! variables of that step, so a valuation `α = [x₀ | u₀ | u₁ | …]` designates
//! one execution and `x_i = c_i + V_i·α`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{GeneralizedStar, Hyperbox, LinearConstraint, Predicate};
use crate::lp::{self, LpProblem, LpStatus};

/// `x_{t+1} = A x_t + B u_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    dynamics: DMatrix<f64>,
    input_matrix: DMatrix<f64>,
}

impl LinearSystem {
    pub fn new(dynamics: DMatrix<f64>, input_matrix: DMatrix<f64>) -> Result<Self> {
        let n = dynamics.nrows();
        if dynamics.ncols() != n {
            return Err(Error::mismatch("dynamics columns", n, dynamics.ncols()));
        }
        if input_matrix.nrows() != n {
            return Err(Error::mismatch("input matrix rows", n, input_matrix.nrows()));
        }
        if dynamics.iter().chain(input_matrix.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("system matrices"));
        }
        Ok(Self {
            dynamics,
            input_matrix,
        })
    }

    /// A system without inputs.
    pub fn autonomous(dynamics: DMatrix<f64>) -> Result<Self> {
        let n = dynamics.nrows();
        Self::new(dynamics, DMatrix::zeros(n, 0))
    }

    pub fn dynamics(&self) -> &DMatrix<f64> {
        &self.dynamics
    }

    pub fn input_matrix(&self) -> &DMatrix<f64> {
        &self.input_matrix
    }

    pub fn dimension(&self) -> usize {
        self.dynamics.nrows()
    }

    pub fn num_inputs(&self) -> usize {
        self.input_matrix.ncols()
    }

    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
        &self.dynamics * x + &self.input_matrix * u
    }
}

#[derive(Debug, Clone)]
pub struct ReachSet {
    stars: Vec<GeneralizedStar>,
    system: LinearSystem,
    input_star: Option<GeneralizedStar>,
}

impl ReachSet {
    pub fn stars(&self) -> &[GeneralizedStar] {
        &self.stars
    }

    pub fn star(&self, i: usize) -> Option<&GeneralizedStar> {
        self.stars.get(i)
    }

    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    pub fn input_star(&self) -> Option<&GeneralizedStar> {
        self.input_star.as_ref()
    }

    pub fn horizon(&self) -> usize {
        self.stars.len() - 1
    }

    /// Number of input variables appended per step.
    pub fn step_inputs(&self) -> usize {
        self.input_star.as_ref().map_or(0, GeneralizedStar::num_vars)
    }

    /// Number of basis variables of the initial set.
    pub fn initial_vars(&self) -> usize {
        self.stars[0].num_vars()
    }

    /// Splits a valuation into its initial-set part and one slice per step.
    pub fn split_valuation<'a>(&self, alpha: &'a [f64]) -> (&'a [f64], Vec<&'a [f64]>) {
        let m0 = self.initial_vars().min(alpha.len());
        let (head, tail) = alpha.split_at(m0);
        let m = self.step_inputs();
        let steps = if m == 0 { Vec::new() } else { tail.chunks(m).collect() };
        (head, steps)
    }

    /// Support points of the projection of each star onto coordinates
    /// `(i, j)`, sampled along `directions` evenly spaced directions.
    pub fn projection(&self, i: usize, j: usize, directions: usize) -> Result<Vec<Vec<(f64, f64)>>> {
        let n = self.system.dimension();
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "projection coordinates ({i}, {j}) out of range for dimension {n}"
            )));
        }
        if directions < 3 {
            return Err(Error::InvalidArgument("at least 3 directions are needed".into()));
        }
        self.stars
            .par_iter()
            .map(|s| {
                let mut pts: Vec<(f64, f64)> = Vec::with_capacity(directions);
                for k in 0..directions {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / directions as f64;
                    let (dx, dy) = (theta.cos(), theta.sin());
                    let alpha = if s.num_vars() == 0 {
                        Vec::new()
                    } else {
                        let obj: Vec<f64> = (0..s.num_vars())
                            .map(|v| dx * s.basis()[(i, v)] + dy * s.basis()[(j, v)])
                            .collect();
                        let r = lp::solve(&LpProblem::maximize(obj, s.predicate().clone()))?;
                        match (r.status, r.witness) {
                            (LpStatus::Feasible, Some(w)) => w,
                            (LpStatus::Unbounded, _) => {
                                return Err(Error::InvalidArgument(format!(
                                    "reach set is unbounded along ({dx:.3}, {dy:.3})"
                                )))
                            }
                            _ => return Ok(Vec::new()),
                        }
                    };
                    let x = s.point_at(&alpha)?;
                    let p = (x[i], x[j]);
                    if pts.last() != Some(&p) && pts.first() != Some(&p) {
                        pts.push(p);
                    }
                }
                Ok(pts)
            })
            .collect()
    }
}

/// Star sequence `S_0..S_T` with `S_0 = theta`.
pub fn compute_reach(
    system: &LinearSystem,
    theta: &GeneralizedStar,
    inputs: Option<&Hyperbox>,
    horizon: usize,
) -> Result<ReachSet> {
    let n = system.dimension();
    if theta.dimension() != n {
        return Err(Error::mismatch("initial set dimension", n, theta.dimension()));
    }
    let input_star = match inputs {
        Some(u) if system.num_inputs() > 0 => {
            if u.dimension() != system.num_inputs() {
                return Err(Error::mismatch(
                    "input box dimension",
                    system.num_inputs(),
                    u.dimension(),
                ));
            }
            Some(GeneralizedStar::new(
                DVector::zeros(n),
                system.input_matrix().clone(),
                u.to_predicate(),
            )?)
        }
        Some(u) if u.dimension() > 0 => {
            return Err(Error::mismatch("input box dimension", 0, u.dimension()))
        }
        _ => None,
    };

    let mut stars = Vec::with_capacity(horizon + 1);
    stars.push(theta.clone());
    for i in 0..horizon {
        let next = stars[i].affine_map(system.dynamics(), None)?;
        let next = match &input_star {
            Some(bu) => next.minkowski_sum(bu)?,
            None => next,
        };
        stars.push(next);
    }
    Ok(ReachSet {
        stars,
        system: system.clone(),
        input_star,
    })
}

/// `a·x <= b` at star `i`, over that star's variables. `None` when the star
/// has no variables, in which case the constraint is decided by its center.
fn psi_at(star: &GeneralizedStar, psi: &LinearConstraint) -> Result<Option<LinearConstraint>> {
    if psi.dimension() != star.dimension() {
        return Err(Error::mismatch(
            "unsafe-set dimension",
            star.dimension(),
            psi.dimension(),
        ));
    }
    if star.num_vars() == 0 {
        return Ok(None);
    }
    star.constraint_in_basis(psi).map(Some)
}

/// Steps in `[i1, i2]` at which the reach set meets Ψ, in increasing order.
pub fn unsafe_indices(reach: &ReachSet, psi: &LinearConstraint, interval: (usize, usize)) -> Result<Vec<usize>> {
    let (i1, i2) = interval;
    if i1 > i2 || i2 > reach.horizon() {
        return Err(Error::InvalidArgument(format!(
            "interval [{i1},{i2}] outside horizon {}",
            reach.horizon()
        )));
    }
    let hits: Vec<Option<usize>> = (i1..=i2)
        .into_par_iter()
        .map(|i| -> Result<Option<usize>> {
            let star = &reach.stars[i];
            let feasible = match psi_at(star, psi)? {
                Some(row) => lp::check_feasible(&star.predicate().and(&row))?.is_some(),
                None => {
                    let a = DVector::from_column_slice(psi.coefficients());
                    a.dot(star.center()) <= psi.bound()
                }
            };
            Ok(feasible.then_some(i))
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}

/// Ψ and ¬Ψ at each unsafe step, expressed over a common valuation space.
///
/// `pos(j) = root ∧ pos_row(j)` and `neg(j) = root ∧ neg_row(j)`, where root
/// holds the initial-set rows and the input bounds up to the last index.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagatedPredicates {
    indices: Vec<usize>,
    root: Predicate,
    pos_rows: Vec<LinearConstraint>,
    neg_rows: Vec<LinearConstraint>,
}

impl PropagatedPredicates {
    /// Assembles propagated predicates from explicit rows; all rows must have
    /// the root's dimension.
    pub fn new(
        indices: Vec<usize>,
        root: Predicate,
        pos_rows: Vec<LinearConstraint>,
        neg_rows: Vec<LinearConstraint>,
    ) -> Result<Self> {
        let k = indices.len();
        if k == 0 {
            return Err(Error::InvalidArgument("nothing to characterize: no unsafe steps".into()));
        }
        if pos_rows.len() != k {
            return Err(Error::mismatch("positive rows", k, pos_rows.len()));
        }
        if neg_rows.len() != k {
            return Err(Error::mismatch("negated rows", k, neg_rows.len()));
        }
        let d = root.dimension();
        for r in pos_rows.iter().chain(&neg_rows) {
            if r.dimension() != d {
                return Err(Error::mismatch("propagated row", d, r.dimension()));
            }
        }
        Ok(Self {
            indices,
            root,
            pos_rows,
            neg_rows,
        })
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn root(&self) -> &Predicate {
        &self.root
    }

    pub fn var_dim(&self) -> usize {
        self.root.dimension()
    }

    pub fn pos_row(&self, j: usize) -> &LinearConstraint {
        &self.pos_rows[j]
    }

    pub fn neg_row(&self, j: usize) -> &LinearConstraint {
        &self.neg_rows[j]
    }

    /// The row for predicate `j` on the high (`true`) or low side.
    pub fn row(&self, j: usize, high: bool) -> &LinearConstraint {
        if high {
            &self.pos_rows[j]
        } else {
            &self.neg_rows[j]
        }
    }

    pub fn pos(&self, j: usize) -> Predicate {
        self.root.and(&self.pos_rows[j])
    }

    pub fn neg(&self, j: usize) -> Predicate {
        self.root.and(&self.neg_rows[j])
    }

    /// `root ∧ row(j, bit_j)` over the given `(j, bit)` choices.
    pub fn conjunction<I: IntoIterator<Item = (usize, bool)>>(&self, choices: I) -> Predicate {
        let mut p = self.root.clone();
        for (j, bit) in choices {
            p = p.and(self.row(j, bit));
        }
        p
    }
}

/// Rewrites Ψ at every step of `indices` onto the valuation space of the last
/// one. `eps` is the negation gap.
pub fn propagate(
    reach: &ReachSet,
    psi: &LinearConstraint,
    indices: &[usize],
    eps: f64,
) -> Result<PropagatedPredicates> {
    let Some(&last) = indices.iter().max() else {
        return Err(Error::InvalidArgument("nothing to characterize: no unsafe steps".into()));
    };
    if last > reach.horizon() {
        return Err(Error::InvalidArgument(format!(
            "step {last} outside horizon {}",
            reach.horizon()
        )));
    }
    let root = reach.stars[last].predicate().clone();
    let d = root.dimension();
    if d == 0 {
        return Err(Error::InvalidArgument("reach set has no basis variables".into()));
    }
    let mut pos_rows = Vec::with_capacity(indices.len());
    let mut neg_rows = Vec::with_capacity(indices.len());
    for &i in indices {
        let row = psi_at(&reach.stars[i], psi)?
            .ok_or_else(|| Error::InvalidArgument("reach set has no basis variables".into()))?;
        neg_rows.push(row.negated(eps)?.padded(d)?);
        pos_rows.push(row.padded(d)?);
    }
    PropagatedPredicates::new(indices.to_vec(), root, pos_rows, neg_rows)
}

/// States `x_0..x_through` of the execution designated by `alpha`.
pub fn concretize(reach: &ReachSet, alpha: &[f64], through: usize) -> Result<Vec<DVector<f64>>> {
    if through > reach.horizon() {
        return Err(Error::InvalidArgument(format!(
            "step {through} outside horizon {}",
            reach.horizon()
        )));
    }
    reach.stars[..=through]
        .iter()
        .map(|s| s.point_at(alpha))
        .collect()
}

/// Like [`concretize`], but missing trailing input coordinates are taken as zero.
pub fn witness_trace(reach: &ReachSet, alpha: &[f64], through: usize) -> Result<Vec<DVector<f64>>> {
    let need = reach
        .star(through)
        .map_or(alpha.len(), GeneralizedStar::num_vars);
    if alpha.len() >= need {
        return concretize(reach, alpha, through);
    }
    let mut padded = alpha.to_vec();
    padded.resize(need, 0.0);
    concretize(reach, &padded, through)
}
