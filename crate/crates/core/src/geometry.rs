//! Linear constraints, conjunctive predicates and generalized stars.
//!
//! A generalized star `⟨c, V, P⟩` denotes the set `{ c + V·α : P(α) }`, where
//! the predicate `P` is a conjunction of half-spaces over the basis variables
//! `α`. All reach sets, BDD nodes and initial sets are expressed this way.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default gap used when negating a half-space.
pub const DEFAULT_NEGATION_EPS: f64 = 1e-6;

/// A half-space `coefficients · x <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    coefficients: Vec<f64>,
    bound: f64,
}

impl LinearConstraint {
    pub fn new(coefficients: Vec<f64>, bound: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "linear constraint needs at least one coefficient".into(),
            ));
        }
        if !bound.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("linear constraint"));
        }
        Ok(Self {
            coefficients,
            bound,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    /// `a · x`; coordinates of `x` beyond the constraint's dimension are ignored
    /// and missing ones are treated as zero.
    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(x)
            .map(|(a, v)| a * v)
            .sum()
    }

    /// Amount by which `x` violates the constraint (zero or negative when satisfied).
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.lhs(x) - self.bound
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    pub fn is_zero_row(&self) -> bool {
        self.coefficients.iter().all(|c| *c == 0.0)
    }

    /// Extends the coefficient vector with zeros up to `dimension`.
    pub fn padded(&self, dimension: usize) -> Result<Self> {
        if dimension < self.dimension() {
            return Err(Error::InvalidArgument(format!(
                "cannot pad a {}-dimensional constraint down to {dimension}",
                self.dimension()
            )));
        }
        let mut coefficients = self.coefficients.clone();
        coefficients.resize(dimension, 0.0);
        Ok(Self {
            coefficients,
            bound: self.bound,
        })
    }

    /// Complement half-space `(-a) · x <= -(b + eps)`.
    ///
    /// The result is strictly separated from `self` by a slab of width `eps`
    /// (in units of `|a|`), so their conjunction is infeasible. Applying the
    /// rule twice gives back `a·x <= b` (up to floating-point rounding of the bound).
    pub fn negated(&self, eps: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "negation gap must be positive and finite, got {eps}"
            )));
        }
        Ok(Self {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            bound: -(self.bound + eps),
        })
    }
}

/// A conjunction of linear constraints over `dimension` variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    dimension: usize,
    constraints: Vec<LinearConstraint>,
}

impl Predicate {
    pub fn new(dimension: usize, constraints: Vec<LinearConstraint>) -> Result<Self> {
        for c in &constraints {
            if c.dimension() != dimension {
                return Err(Error::mismatch("predicate row", dimension, c.dimension()));
            }
        }
        Ok(Self {
            dimension,
            constraints,
        })
    }

    /// The always-true predicate over `dimension` variables.
    pub fn top(dimension: usize) -> Self {
        Self {
            dimension,
            constraints: Vec::new(),
        }
    }

    /// Builds a predicate from dense rows `a_i · x <= b_i`.
    pub fn from_rows(dimension: usize, rows: &[(Vec<f64>, f64)]) -> Result<Self> {
        let constraints = rows
            .iter()
            .map(|(a, b)| LinearConstraint::new(a.clone(), *b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dimension, constraints)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn push(&mut self, constraint: LinearConstraint) -> Result<()> {
        if constraint.dimension() != self.dimension {
            return Err(Error::mismatch(
                "predicate row",
                self.dimension,
                constraint.dimension(),
            ));
        }
        self.constraints.push(constraint);
        Ok(())
    }

    /// Appends `constraint`, padding it (or the predicate) to the larger dimension.
    pub fn and(&self, constraint: &LinearConstraint) -> Predicate {
        let single = Predicate {
            dimension: constraint.dimension(),
            constraints: vec![constraint.clone()],
        };
        self.conjoin(&single)
    }

    /// Zero-extends every row to `dimension` variables.
    pub fn padded(&self, dimension: usize) -> Result<Self> {
        if dimension < self.dimension {
            return Err(Error::InvalidArgument(format!(
                "cannot pad a {}-dimensional predicate down to {dimension}",
                self.dimension
            )));
        }
        if dimension == self.dimension {
            return Ok(self.clone());
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| c.padded(dimension))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            dimension,
            constraints,
        })
    }

    /// Logical AND. The operand with fewer variables is zero-padded first.
    pub fn conjoin(&self, other: &Predicate) -> Predicate {
        let dimension = self.dimension.max(other.dimension);
        let mut constraints = Vec::with_capacity(self.len() + other.len());
        for c in self.constraints.iter().chain(&other.constraints) {
            // dimension >= c.dimension() by construction
            constraints.push(c.padded(dimension).expect("pad to max dimension"));
        }
        Predicate {
            dimension,
            constraints,
        }
    }

    /// Largest row violation at `alpha` (negative when strictly inside).
    pub fn max_violation(&self, alpha: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|c| c.violation(alpha))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_satisfied(&self, alpha: &[f64], tol: f64) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied(alpha, tol))
    }
}

/// Axis-aligned box `lower <= x <= upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperbox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Hyperbox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::mismatch("box bounds", lower.len(), upper.len()));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("box bounds"));
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] > upper[i]) {
            return Err(Error::InvalidArgument(format!(
                "box coordinate {i} has lower bound {} above upper bound {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dimension()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| *v >= lo - tol && *v <= hi + tol)
    }

    /// Rows `x_i <= upper_i`, `-x_i <= -lower_i`, interleaved per coordinate.
    pub fn to_predicate(&self) -> Predicate {
        let d = self.dimension();
        let mut constraints = Vec::with_capacity(2 * d);
        for i in 0..d {
            let mut up = vec![0.0; d];
            up[i] = 1.0;
            let mut down = vec![0.0; d];
            down[i] = -1.0;
            constraints.push(LinearConstraint {
                coefficients: up,
                bound: self.upper[i],
            });
            constraints.push(LinearConstraint {
                coefficients: down,
                bound: -self.lower[i],
            });
        }
        Predicate {
            dimension: d,
            constraints,
        }
    }

    /// All `2^d` corner points.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let d = self.dimension();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.upper[i]
                        } else {
                            self.lower[i]
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// The set `{ center + basis · α : predicate(α) }`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedStar {
    center: DVector<f64>,
    basis: DMatrix<f64>,
    predicate: Predicate,
}

impl GeneralizedStar {
    pub fn new(center: DVector<f64>, basis: DMatrix<f64>, predicate: Predicate) -> Result<Self> {
        if basis.nrows() != center.len() {
            return Err(Error::mismatch("star basis rows", center.len(), basis.nrows()));
        }
        if basis.ncols() != predicate.dimension() {
            return Err(Error::mismatch(
                "star basis columns",
                predicate.dimension(),
                basis.ncols(),
            ));
        }
        if center.iter().chain(basis.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("star"));
        }
        Ok(Self {
            center,
            basis,
            predicate,
        })
    }

    /// Origin center, identity basis and the box rows as predicate, so that
    /// basis variables coincide with state coordinates.
    pub fn from_box(b: &Hyperbox) -> Self {
        let n = b.dimension();
        Self {
            center: DVector::zeros(n),
            basis: DMatrix::identity(n, n),
            predicate: b.to_predicate(),
        }
    }

    /// A single point: empty basis and trivial predicate.
    pub fn point(center: DVector<f64>) -> Self {
        let n = center.len();
        Self {
            center,
            basis: DMatrix::zeros(n, 0),
            predicate: Predicate::top(0),
        }
    }

    /// Ambient (state) dimension.
    pub fn dimension(&self) -> usize {
        self.center.len()
    }

    /// Number of basis variables.
    pub fn num_vars(&self) -> usize {
        self.basis.ncols()
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    /// `center + basis · α[..m]`. Extra coordinates of `alpha` are ignored.
    pub fn point_at(&self, alpha: &[f64]) -> Result<DVector<f64>> {
        let m = self.num_vars();
        if alpha.len() < m {
            return Err(Error::mismatch("valuation length", m, alpha.len()));
        }
        let a = DVector::from_column_slice(&alpha[..m]);
        Ok(&self.center + &self.basis * a)
    }

    /// Image under `x ↦ matrix·x + offset`. The predicate is unchanged, so
    /// every valuation keeps designating the same execution.
    pub fn affine_map(&self, matrix: &DMatrix<f64>, offset: Option<&DVector<f64>>) -> Result<Self> {
        if matrix.ncols() != self.dimension() {
            return Err(Error::mismatch(
                "affine map columns",
                self.dimension(),
                matrix.ncols(),
            ));
        }
        let mut center = matrix * &self.center;
        if let Some(off) = offset {
            if off.len() != matrix.nrows() {
                return Err(Error::mismatch("affine offset", matrix.nrows(), off.len()));
            }
            center += off;
        }
        Ok(Self {
            center,
            basis: matrix * &self.basis,
            predicate: self.predicate.clone(),
        })
    }

    /// Minkowski sum. `other`'s variables are appended after `self`'s.
    pub fn minkowski_sum(&self, other: &GeneralizedStar) -> Result<Self> {
        let n = self.dimension();
        if other.dimension() != n {
            return Err(Error::mismatch("minkowski operand", n, other.dimension()));
        }
        let (m1, m2) = (self.num_vars(), other.num_vars());
        let mut basis = DMatrix::zeros(n, m1 + m2);
        basis.view_mut((0, 0), (n, m1)).copy_from(&self.basis);
        basis.view_mut((0, m1), (n, m2)).copy_from(&other.basis);

        let dim = m1 + m2;
        let mut constraints = Vec::with_capacity(self.predicate.len() + other.predicate.len());
        for c in self.predicate.constraints() {
            constraints.push(c.padded(dim)?);
        }
        for c in other.predicate.constraints() {
            let mut coefficients = vec![0.0; m1];
            coefficients.extend_from_slice(c.coefficients());
            constraints.push(LinearConstraint {
                coefficients,
                bound: c.bound(),
            });
        }
        Ok(Self {
            center: &self.center + &other.center,
            basis,
            predicate: Predicate {
                dimension: dim,
                constraints,
            },
        })
    }

    /// Intersection with another predicate over the same center and basis.
    pub fn intersect(&self, predicate: &Predicate) -> Result<Self> {
        if predicate.dimension() > self.num_vars() {
            return Err(Error::mismatch(
                "star intersection",
                self.num_vars(),
                predicate.dimension(),
            ));
        }
        Ok(Self {
            center: self.center.clone(),
            basis: self.basis.clone(),
            predicate: self.predicate.conjoin(predicate),
        })
    }

    /// Rewrites a state-space half-space `a·x <= b` over the basis variables:
    /// `(Vᵀa)·α <= b - a·c`.
    pub fn constraint_in_basis(&self, c: &LinearConstraint) -> Result<LinearConstraint> {
        if c.dimension() != self.dimension() {
            return Err(Error::mismatch(
                "state constraint",
                self.dimension(),
                c.dimension(),
            ));
        }
        if self.num_vars() == 0 {
            return Err(Error::InvalidArgument(
                "star without basis variables has no valuation space".into(),
            ));
        }
        let a = DVector::from_column_slice(c.coefficients());
        let coefficients = self.basis.tr_mul(&a);
        LinearConstraint::new(
            coefficients.iter().copied().collect(),
            c.bound() - a.dot(&self.center),
        )
    }
}
