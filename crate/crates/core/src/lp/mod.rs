//! Linear feasibility and optimization over conjunctive predicates.
//!
//! Problems are `max cᵀx` subject to `A x <= b` and optional per-variable
//! bounds. Variables are free unless bounded. Infeasible problems come back
//! with a Farkas certificate `y >= 0`, `Aᵀy = 0`, `bᵀy < 0`.

mod simplex;

use thiserror::Error;

use crate::geometry::Predicate;

pub use simplex::Simplex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("invalid LP: {0}")]
    InvalidProblem(String),
    #[error("numerically singular: {0}")]
    NumericallySingular(String),
    #[error("simplex iteration limit of {0} reached")]
    IterationLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Maximum constraint violation accepted as feasible (on equilibrated rows).
    pub feasibility_tol: f64,
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: f64,
    /// Reduced-cost threshold for optimality.
    pub optimality_tol: f64,
    /// Iteration cap per phase; derived from the problem size when `None`.
    pub max_iterations: Option<usize>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-7,
            pivot_tol: 1e-10,
            optimality_tol: 1e-9,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    /// Maximization objective; `None` asks for any feasible point.
    pub objective: Option<Vec<f64>>,
    pub constraints: Predicate,
    /// Optional `(lower, upper)` per variable; infinities allowed.
    pub bounds: Option<Vec<(f64, f64)>>,
}

impl LpProblem {
    pub fn feasibility(constraints: Predicate) -> Self {
        Self {
            objective: None,
            constraints,
            bounds: None,
        }
    }

    pub fn maximize(objective: Vec<f64>, constraints: Predicate) -> Self {
        Self {
            objective: Some(objective),
            constraints,
            bounds: None,
        }
    }

    pub fn with_bounds(mut self, bounds: Vec<(f64, f64)>) -> Self {
        self.bounds = Some(bounds);
        self
    }

    pub fn dimension(&self) -> usize {
        self.constraints.dimension()
    }

    /// Constraint rows followed by one row per finite bound (`x_v <= hi`, then
    /// `-x_v <= -lo`, variable by variable). Certificates index these rows.
    pub fn rows(&self) -> Vec<(Vec<f64>, f64)> {
        let d = self.dimension();
        let mut rows: Vec<(Vec<f64>, f64)> = self
            .constraints
            .constraints()
            .iter()
            .map(|c| (c.coefficients().to_vec(), c.bound()))
            .collect();
        if let Some(bounds) = &self.bounds {
            for (v, &(lo, hi)) in bounds.iter().enumerate() {
                if hi.is_finite() {
                    let mut a = vec![0.0; d];
                    a[v] = 1.0;
                    rows.push((a, hi));
                }
                if lo.is_finite() {
                    let mut a = vec![0.0; d];
                    a[v] = -1.0;
                    rows.push((a, -lo));
                }
            }
        }
        rows
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Feasible,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// A feasible point (also set for `Unbounded`).
    pub witness: Option<Vec<f64>>,
    /// Optimal objective value; `Some(0.0)` for pure feasibility problems.
    pub objective: Option<f64>,
    /// Farkas multipliers over [`LpProblem::rows`] when infeasible.
    pub certificate: Option<Vec<f64>>,
}

impl LpResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self.status, LpStatus::Feasible | LpStatus::Unbounded)
    }
}

/// Solves with default options.
pub fn solve(problem: &LpProblem) -> Result<LpResult, LpError> {
    Simplex::default().solve(problem)
}

/// Returns a satisfying valuation, or `None` when the predicate is empty.
pub fn check_feasible(predicate: &Predicate) -> Result<Option<Vec<f64>>, LpError> {
    Simplex::default().check_feasible(predicate)
}

/// Checks `y >= 0`, `Aᵀy ≈ 0` and `bᵀy < 0` for `rows`, after normalizing `y`
/// to unit max-norm.
pub fn is_farkas_certificate(rows: &[(Vec<f64>, f64)], y: &[f64], tol: f64) -> bool {
    if rows.len() != y.len() {
        return false;
    }
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || y.iter().any(|v| *v < -tol * scale) {
        return false;
    }
    let d = rows.first().map_or(0, |r| r.0.len());
    let mut combo = vec![0.0; d];
    let mut rhs = 0.0;
    for ((a, b), yi) in rows.iter().zip(y) {
        let w = yi / scale;
        for (c, ai) in combo.iter_mut().zip(a) {
            *c += w * ai;
        }
        rhs += w * b;
    }
    rhs < 0.0 && combo.iter().all(|c| c.abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(d: usize, rows: &[(&[f64], f64)]) -> Predicate {
        Predicate::from_rows(
            d,
            &rows.iter().map(|(a, b)| (a.to_vec(), *b)).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn maximize_single_variable() {
        let p = LpProblem::maximize(vec![1.0], pred(1, &[(&[1.0], 1.0), (&[-1.0], 0.0)]));
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Feasible);
        assert!((r.objective.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.witness.unwrap()[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn textbook_farkas_pair() {
        let p = LpProblem::feasibility(pred(1, &[(&[1.0], 0.0), (&[-1.0], -1.0)]));
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        let y = r.certificate.unwrap();
        let scale = y[0];
        assert!((y[0] / scale - 1.0).abs() < 1e-12 && (y[1] / scale - 1.0).abs() < 1e-12);
        // Hᵀy = 0, gᵀy = -1 for y = (1, 1)
        assert!(is_farkas_certificate(&p.rows(), &y, 1e-12));
        assert!(((0.0 * y[0] - 1.0 * y[1]) / scale + 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_predicate_is_feasible_at_origin() {
        assert_eq!(check_feasible(&Predicate::top(3)).unwrap(), Some(vec![0.0; 3]));
        assert_eq!(check_feasible(&Predicate::top(0)).unwrap(), Some(vec![]));
    }

    #[test]
    fn zero_row_with_negative_bound_is_infeasible() {
        let p = LpProblem::feasibility(pred(2, &[(&[1.0, 1.0], 5.0), (&[0.0, 0.0], -1.0)]));
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert!(is_farkas_certificate(&p.rows(), r.certificate.as_ref().unwrap(), 1e-12));
        let p = LpProblem::feasibility(pred(2, &[(&[0.0, 0.0], 1.0)]));
        assert!(solve(&p).unwrap().is_feasible());
    }

    #[test]
    fn unbounded_objective() {
        let p = LpProblem::maximize(vec![1.0, 0.0], pred(2, &[(&[-1.0, 0.0], 0.0)]));
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Unbounded);
        assert!(r.witness.is_some());
    }

    #[test]
    fn free_variables_go_negative() {
        // max -x - y  s.t.  x >= -3, y >= -2, x + y >= -4
        let p = LpProblem::maximize(
            vec![-1.0, -1.0],
            pred(
                2,
                &[(&[-1.0, 0.0], 3.0), (&[0.0, -1.0], 2.0), (&[-1.0, -1.0], 4.0)],
            ),
        );
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Feasible);
        assert!((r.objective.unwrap() - 4.0).abs() < 1e-9);
    }

    #[test]
    fn bounds_are_respected_and_certified() {
        let p = LpProblem::maximize(vec![1.0, 1.0], pred(2, &[(&[1.0, 1.0], 10.0)]))
            .with_bounds(vec![(0.0, 2.0), (f64::NEG_INFINITY, 3.0)]);
        let r = solve(&p).unwrap();
        assert!((r.objective.unwrap() - 5.0).abs() < 1e-9);

        let p = LpProblem::feasibility(pred(1, &[(&[1.0], 10.0)])).with_bounds(vec![(2.0, 1.0)]);
        let r = solve(&p).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
        assert_eq!(r.certificate.as_ref().unwrap().len(), 3);
        assert!(is_farkas_certificate(&p.rows(), r.certificate.as_ref().unwrap(), 1e-9));
    }

    #[test]
    fn degenerate_parallel_rows() {
        // many copies of the same facet plus a box
        let mut rows: Vec<(Vec<f64>, f64)> = (0..20).map(|_| (vec![1.0, 1.0], 1.0)).collect();
        rows.push((vec![-1.0, 0.0], 0.0));
        rows.push((vec![0.0, -1.0], 0.0));
        let p = LpProblem::maximize(vec![1.0, 2.0], Predicate::from_rows(2, &rows).unwrap());
        let r = solve(&p).unwrap();
        assert!((r.objective.unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn scaled_row_keeps_status() {
        let base = [(vec![1.0, 2.0], 1.0), (vec![-1.0, 0.0], -0.5), (vec![0.0, -1.0], 0.1)];
        let scaled: Vec<_> = base
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                if i == 1 {
                    (a.iter().map(|v| v * 1e3).collect(), b * 1e3)
                } else {
                    (a.clone(), *b)
                }
            })
            .collect();
        let r1 = check_feasible(&Predicate::from_rows(2, &base).unwrap()).unwrap();
        let r2 = check_feasible(&Predicate::from_rows(2, &scaled).unwrap()).unwrap();
        assert_eq!(r1.is_some(), r2.is_some());
    }

    #[test]
    fn rejects_wrong_objective_length() {
        let p = LpProblem::maximize(vec![1.0], pred(2, &[(&[1.0, 0.0], 1.0)]));
        assert!(matches!(solve(&p), Err(LpError::InvalidProblem(_))));
    }
}
