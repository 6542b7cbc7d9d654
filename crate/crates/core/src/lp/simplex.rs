//! Dense two-phase tableau simplex.
//!
//! Variable bounds are folded into the columns: a finite lower bound shifts the
//! variable to be non-negative, a lone upper bound flips it, fixed variables
//! are substituted out, and only the upper half of a two-sided bound stays a
//! row. Rows are equilibrated to unit max-norm, then `A x + s = b` is set up
//! with a slack per row and an artificial for every row whose right-hand side
//! is negative. A free column may enter in either direction (its column is
//! negated to enter downwards) and is never chosen to leave. Pricing is
//! Dantzig's rule until `2·(rows + cols)` iterations have passed in a phase,
//! then Bland's rule. The tableau is rebuilt from the original columns every
//! [`REFACTOR_EVERY`] pivots and before any result is read off.
//!
//! At a phase-1 optimum with positive infeasibility `w`, the reduced costs of
//! the slack columns are the Farkas multipliers of the rows and those of the
//! bounded columns are the multipliers of their bounds: they are non-negative,
//! free columns have zero reduced cost, and `bᵀy = -w`.

use nalgebra::{DMatrix, DVector};

use super::{LpError, LpProblem, LpResult, LpStatus, SimplexOptions};
use crate::geometry::Predicate;

const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Col {
    Free,
    NonNeg,
    Artificial,
}

#[derive(Debug, Clone, Default)]
pub struct Simplex {
    pub options: SimplexOptions,
}

/// How an original variable maps onto a tableau column.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo`, no column.
    Fixed(f64),
    /// `x = offset + sign·x'` with column `col`.
    Column {
        col: usize,
        offset: f64,
        sign: f64,
        kind: Col,
    },
}

/// Positions of a variable's bound rows in [`LpProblem::rows`].
#[derive(Debug, Clone, Copy, Default)]
struct BoundRows {
    hi: Option<usize>,
    lo: Option<usize>,
}

struct Prepared {
    maps: Vec<VarMap>,
    bound_rows: Vec<BoundRows>,
    /// Rows over the tableau columns, with the index of the row they came from.
    rows: Vec<(Vec<f64>, f64, usize)>,
    ncols: usize,
}

impl Simplex {
    pub fn new(options: SimplexOptions) -> Self {
        Self { options }
    }

    pub fn check_feasible(&self, predicate: &Predicate) -> Result<Option<Vec<f64>>, LpError> {
        let r = self.solve(&LpProblem::feasibility(predicate.clone()))?;
        Ok(match r.status {
            LpStatus::Infeasible => None,
            _ => r.witness,
        })
    }

    pub fn solve(&self, problem: &LpProblem) -> Result<LpResult, LpError> {
        validate(problem)?;
        let d = problem.dimension();
        let all_rows = problem.rows();
        let total = all_rows.len();
        let tol = self.options.feasibility_tol;

        let prep = match prepare(problem, total) {
            Ok(p) => p,
            Err(y) => return Ok(infeasible(y)),
        };

        // Equilibrate; settle all-zero rows up front.
        let mut kept = Vec::with_capacity(prep.rows.len());
        for (a, b, origin) in &prep.rows {
            let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                if *b < -tol {
                    let mut y_rows = vec![0.0; total];
                    y_rows[*origin] = 1.0;
                    return Ok(infeasible(certificate(
                        problem,
                        &prep,
                        y_rows,
                        &vec![0.0; prep.ncols],
                    )));
                }
                continue;
            }
            kept.push(ScaledRow {
                origin: *origin,
                scale,
                coefficients: a.iter().map(|v| v / scale).collect(),
                rhs: b / scale,
            });
        }

        let kinds: Vec<Col> = {
            let mut k = vec![Col::Free; prep.ncols];
            for m in &prep.maps {
                if let VarMap::Column { col, kind, .. } = m {
                    k[*col] = *kind;
                }
            }
            k
        };
        let mut t = Tableau::new(&kinds, &kept, self.options);

        if t.num_artificial > 0 {
            t.set_phase_one_costs();
            match t.run()? {
                RunOutcome::Optimal => {}
                RunOutcome::Unbounded => {
                    return Err(LpError::NumericallySingular(
                        "phase one reported an unbounded direction".into(),
                    ))
                }
            }
            let w = t.objective_value();
            if w > tol {
                let costs = t.cost_row();
                let mut y_rows = vec![0.0; total];
                for (i, row) in kept.iter().enumerate() {
                    y_rows[row.origin] = costs[t.d + i].max(0.0) / row.scale;
                }
                let col_costs: Vec<f64> = costs[..t.d].to_vec();
                let y = certificate(problem, &prep, y_rows, &col_costs);
                if !super::is_farkas_certificate(&all_rows, &y, 1e-6) {
                    return Err(LpError::NumericallySingular(format!(
                        "phase one ended with infeasibility {w:.3e} but no valid certificate"
                    )));
                }
                return Ok(infeasible(y));
            }
            t.drive_out_artificials();
        }

        let objective = problem.objective.clone().unwrap_or_else(|| vec![0.0; d]);
        let mut col_obj = vec![0.0; prep.ncols];
        for (v, m) in prep.maps.iter().enumerate() {
            if let VarMap::Column { col, sign, .. } = m {
                col_obj[*col] = sign * objective[v];
            }
        }
        t.set_phase_two_costs(&col_obj);
        let outcome = t.run()?;
        let xc = t.primal()?;
        let x: Vec<f64> = prep
            .maps
            .iter()
            .map(|m| match *m {
                VarMap::Fixed(v) => v,
                VarMap::Column {
                    col, offset, sign, ..
                } => offset + sign * xc[col],
            })
            .collect();
        let value: f64 = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        Ok(match outcome {
            RunOutcome::Optimal => LpResult {
                status: LpStatus::Feasible,
                witness: Some(x),
                objective: Some(value),
                certificate: None,
            },
            RunOutcome::Unbounded => LpResult {
                status: LpStatus::Unbounded,
                witness: Some(x),
                objective: None,
                certificate: None,
            },
        })
    }
}

/// Substitutes bounds into columns. An empty bound interval yields its
/// certificate directly.
fn prepare(problem: &LpProblem, total: usize) -> Result<Prepared, Vec<f64>> {
    let d = problem.dimension();
    let ncons = problem.constraints.len();
    let bounds = problem
        .bounds
        .clone()
        .unwrap_or_else(|| vec![(f64::NEG_INFINITY, f64::INFINITY); d]);

    let mut bound_rows = vec![BoundRows::default(); d];
    let mut next = ncons;
    for (v, &(lo, hi)) in bounds.iter().enumerate() {
        if hi.is_finite() {
            bound_rows[v].hi = Some(next);
            next += 1;
        }
        if lo.is_finite() {
            bound_rows[v].lo = Some(next);
            next += 1;
        }
    }

    let mut maps = Vec::with_capacity(d);
    let mut ncols = 0;
    let mut upper_rows = Vec::new();
    for (v, &(lo, hi)) in bounds.iter().enumerate() {
        if lo > hi {
            let mut y = vec![0.0; total];
            y[bound_rows[v].hi.expect("finite")] = 1.0;
            y[bound_rows[v].lo.expect("finite")] = 1.0;
            return Err(y);
        }
        let map = match (lo.is_finite(), hi.is_finite()) {
            (true, true) if lo == hi => VarMap::Fixed(lo),
            (true, fin_hi) => {
                if fin_hi {
                    upper_rows.push((ncols, hi - lo, bound_rows[v].hi.expect("finite")));
                }
                VarMap::Column {
                    col: ncols,
                    offset: lo,
                    sign: 1.0,
                    kind: Col::NonNeg,
                }
            }
            (false, true) => VarMap::Column {
                col: ncols,
                offset: hi,
                sign: -1.0,
                kind: Col::NonNeg,
            },
            (false, false) => VarMap::Column {
                col: ncols,
                offset: 0.0,
                sign: 1.0,
                kind: Col::Free,
            },
        };
        if matches!(map, VarMap::Column { .. }) {
            ncols += 1;
        }
        maps.push(map);
    }

    let mut rows = Vec::with_capacity(ncons + upper_rows.len());
    for (i, c) in problem.constraints.constraints().iter().enumerate() {
        let mut a = vec![0.0; ncols];
        let mut b = c.bound();
        for (v, &coef) in c.coefficients().iter().enumerate() {
            if coef == 0.0 {
                continue;
            }
            match maps[v] {
                VarMap::Fixed(val) => b -= coef * val,
                VarMap::Column {
                    col, offset, sign, ..
                } => {
                    a[col] = coef * sign;
                    b -= coef * offset;
                }
            }
        }
        rows.push((a, b, i));
    }
    for (col, width, origin) in upper_rows {
        let mut a = vec![0.0; ncols];
        a[col] = 1.0;
        rows.push((a, width, origin));
    }
    Ok(Prepared {
        maps,
        bound_rows,
        rows,
        ncols,
    })
}

/// Completes row multipliers with those of the substituted bounds.
/// `col_costs` are the phase-one reduced costs of the tableau columns.
fn certificate(problem: &LpProblem, prep: &Prepared, mut y: Vec<f64>, col_costs: &[f64]) -> Vec<f64> {
    let cons = problem.constraints.constraints();
    for (v, m) in prep.maps.iter().enumerate() {
        let br = prep.bound_rows[v];
        match *m {
            VarMap::Fixed(_) => {
                let t: f64 = cons
                    .iter()
                    .zip(&y)
                    .map(|(c, yi)| c.coefficients()[v] * yi)
                    .sum();
                if t >= 0.0 {
                    y[br.lo.expect("fixed variables have both bounds")] = t;
                } else {
                    y[br.hi.expect("fixed variables have both bounds")] = -t;
                }
            }
            VarMap::Column { col, sign, kind, .. } => {
                if kind != Col::NonNeg {
                    continue;
                }
                let r = col_costs[col].max(0.0);
                let row = if sign > 0.0 { br.lo } else { br.hi };
                y[row.expect("bounded column has its bound row")] = r;
            }
        }
    }
    y
}

fn infeasible(certificate: Vec<f64>) -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        witness: None,
        objective: None,
        certificate: Some(certificate),
    }
}

fn validate(problem: &LpProblem) -> Result<(), LpError> {
    let d = problem.dimension();
    if let Some(c) = &problem.objective {
        if c.len() != d {
            return Err(LpError::InvalidProblem(format!(
                "objective has {} entries for {d} variables",
                c.len()
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(LpError::InvalidProblem("non-finite objective".into()));
        }
    }
    if let Some(bounds) = &problem.bounds {
        if bounds.len() != d {
            return Err(LpError::InvalidProblem(format!(
                "{} bounds for {d} variables",
                bounds.len()
            )));
        }
        if bounds
            .iter()
            .any(|(lo, hi)| lo.is_nan() || hi.is_nan() || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY)
        {
            return Err(LpError::InvalidProblem("invalid variable bound".into()));
        }
    }
    Ok(())
}

struct ScaledRow {
    origin: usize,
    scale: f64,
    coefficients: Vec<f64>,
    rhs: f64,
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

struct Tableau {
    opts: SimplexOptions,
    m: usize,
    d: usize,
    ncols: usize,
    width: usize,
    num_artificial: usize,
    /// `m` constraint rows followed by the reduced-cost row; last column is the rhs.
    data: Vec<f64>,
    /// Column sign flips applied to free columns entering downwards.
    flipped: Vec<bool>,
    kind: Vec<Col>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Initial (scaled, sign-adjusted) columns and rhs, kept for reinversion.
    original: DMatrix<f64>,
    original_rhs: DVector<f64>,
    /// Current phase costs, before pricing out the basis.
    costs: Vec<f64>,
    pivots: usize,
}

impl Tableau {
    fn new(columns: &[Col], rows: &[ScaledRow], opts: SimplexOptions) -> Self {
        let d = columns.len();
        let m = rows.len();
        let num_artificial = rows.iter().filter(|r| r.rhs < 0.0).count();
        let ncols = d + m + num_artificial;
        let width = ncols + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut kind = columns.to_vec();
        kind.extend(std::iter::repeat_n(Col::NonNeg, m));
        kind.extend(std::iter::repeat_n(Col::Artificial, num_artificial));
        let mut basis = vec![0; m];
        let mut is_basic = vec![false; ncols];

        let mut art = d + m;
        for (i, row) in rows.iter().enumerate() {
            let sign = if row.rhs < 0.0 { -1.0 } else { 1.0 };
            let r = &mut data[i * width..(i + 1) * width];
            for (j, a) in row.coefficients.iter().enumerate() {
                r[j] = sign * a;
            }
            r[d + i] = sign;
            r[ncols] = sign * row.rhs;
            if sign < 0.0 {
                r[art] = 1.0;
                basis[i] = art;
                art += 1;
            } else {
                basis[i] = d + i;
            }
            is_basic[basis[i]] = true;
        }

        let original = DMatrix::from_fn(m, ncols, |i, j| data[i * width + j]);
        let original_rhs = DVector::from_fn(m, |i, _| data[i * width + ncols]);
        Self {
            opts,
            m,
            d,
            ncols,
            width,
            num_artificial,
            data,
            flipped: vec![false; d],
            kind,
            basis,
            is_basic,
            original,
            original_rhs,
            costs: vec![0.0; ncols],
            pivots: 0,
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.ncols]
    }

    fn cost_row(&self) -> &[f64] {
        let start = self.m * self.width;
        &self.data[start..start + self.width]
    }

    /// Minimized objective at the current basis.
    fn objective_value(&self) -> f64 {
        -self.cost_row()[self.ncols]
    }

    fn set_costs(&mut self, costs: &[f64]) {
        self.costs = costs.to_vec();
        self.price_out();
    }

    /// Rewrites the reduced-cost row for the current basis.
    fn price_out(&mut self) {
        let costs = &self.costs;
        let (w, m, nc) = (self.width, self.m, self.ncols);
        let obj = m * w;
        for j in 0..nc {
            self.data[obj + j] = costs[j];
        }
        self.data[obj + nc] = 0.0;
        for i in 0..m {
            let cb = costs[self.basis[i]];
            if cb != 0.0 {
                for j in 0..=nc {
                    let v = self.data[i * w + j];
                    self.data[obj + j] -= cb * v;
                }
            }
        }
    }

    fn set_phase_one_costs(&mut self) {
        let costs: Vec<f64> = self
            .kind
            .iter()
            .map(|k| if *k == Col::Artificial { 1.0 } else { 0.0 })
            .collect();
        self.set_costs(&costs);
    }

    /// Minimizes `-cᵀx`, accounting for flipped columns.
    fn set_phase_two_costs(&mut self, objective: &[f64]) {
        let mut costs = vec![0.0; self.ncols];
        for j in 0..self.d {
            let c = -objective[j];
            costs[j] = if self.flipped[j] { -c } else { c };
        }
        self.set_costs(&costs);
    }

    fn negate_column(&mut self, j: usize) {
        for i in 0..=self.m {
            self.data[i * self.width + j] = -self.data[i * self.width + j];
        }
        self.costs[j] = -self.costs[j];
        self.flipped[j] = !self.flipped[j];
    }

    /// Current basis matrix over the original columns, with flips applied.
    fn basis_matrix(&self) -> DMatrix<f64> {
        let mut b = DMatrix::zeros(self.m, self.m);
        for (k, &col) in self.basis.iter().enumerate() {
            let sign = if col < self.d && self.flipped[col] { -1.0 } else { 1.0 };
            for i in 0..self.m {
                b[(i, k)] = sign * self.original[(i, col)];
            }
        }
        b
    }

    /// Recomputes the tableau as `B⁻¹[A | b]` to shed accumulated rounding.
    fn refactor(&mut self) -> Result<(), LpError> {
        self.pivots = 0;
        if self.m == 0 {
            return Ok(());
        }
        let lu = self.basis_matrix().lu();
        let mut rhs = DMatrix::zeros(self.m, self.width);
        for j in 0..self.ncols {
            let sign = if j < self.d && self.flipped[j] { -1.0 } else { 1.0 };
            for i in 0..self.m {
                rhs[(i, j)] = sign * self.original[(i, j)];
            }
        }
        for i in 0..self.m {
            rhs[(i, self.ncols)] = self.original_rhs[i];
        }
        let solved = lu
            .solve(&rhs)
            .ok_or_else(|| LpError::NumericallySingular("basis matrix is singular".into()))?;
        if solved.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NumericallySingular("non-finite basis inverse".into()));
        }
        for i in 0..self.m {
            for j in 0..self.width {
                let v = solved[(i, j)];
                self.data[i * self.width + j] = if v.abs() < 1e-13 { 0.0 } else { v };
            }
            let b = self.basis[i];
            self.data[i * self.width + b] = 1.0;
        }
        self.price_out();
        Ok(())
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let w = self.width;
        let p = self.data[r * w + q];
        let inv = 1.0 / p;
        for j in 0..w {
            self.data[r * w + j] *= inv;
        }
        self.data[r * w + q] = 1.0;
        let pivot_row: Vec<f64> = self.data[r * w..(r + 1) * w].to_vec();
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.data[i * w + q];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.data[i * w..(i + 1) * w];
            for (x, pv) in row.iter_mut().zip(&pivot_row) {
                *x -= f * pv;
            }
            row[q] = 0.0;
        }
        let leaving = self.basis[r];
        self.is_basic[leaving] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.pivots += 1;
    }

    fn iteration_cap(&self) -> usize {
        self.opts
            .max_iterations
            .unwrap_or_else(|| 10_000.max(50 * (self.m + self.ncols)))
    }

    fn choose_entering(&self, bland: bool) -> Option<usize> {
        let tol = self.opts.optimality_tol;
        let costs = self.cost_row();
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.ncols {
            if self.is_basic[j] {
                continue;
            }
            let r = costs[j];
            let score = match self.kind[j] {
                Col::Free if r.abs() > tol => r.abs(),
                Col::NonNeg if r < -tol => -r,
                _ => continue,
            };
            if bland {
                return Some(j);
            }
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    /// Harris two-pass ratio test: among rows whose ratio is within the
    /// feasibility tolerance of the minimum, take the largest pivot.
    fn ratio_test(&self, q: usize, bland: bool) -> Option<usize> {
        let scale = (0..self.m).fold(1.0f64, |acc, i| acc.max(self.at(i, q).abs()));
        let threshold = self.opts.pivot_tol * scale;
        let candidates: Vec<(usize, f64)> = (0..self.m)
            .filter(|&i| self.kind[self.basis[i]] != Col::Free)
            .map(|i| (i, self.at(i, q)))
            .filter(|&(_, a)| a > threshold)
            .collect();
        let delta = self.opts.feasibility_tol;
        let bound = candidates
            .iter()
            .map(|&(i, a)| (self.rhs(i).max(0.0) + delta) / a)
            .fold(f64::INFINITY, f64::min);
        if !bound.is_finite() {
            return None;
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for &(i, a) in &candidates {
            let ratio = self.rhs(i).max(0.0) / a;
            if ratio > bound {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, br, ba)) => {
                    if bland {
                        ratio < br - 1e-12 * br.abs().max(1.0)
                            || (ratio <= br + 1e-12 * br.abs().max(1.0)
                                && self.basis[i] < self.basis[bi])
                    } else {
                        a > ba
                    }
                }
            };
            if better {
                best = Some((i, ratio, a));
            }
        }
        best.map(|(i, _, _)| i)
    }

    /// Artificial columns are never re-admitted once they leave.
    fn run(&mut self) -> Result<RunOutcome, LpError> {
        let cap = self.iteration_cap();
        let bland_after = 2 * (self.m + self.ncols);
        for iter in 0..cap {
            let bland = iter >= bland_after;
            if self.pivots >= REFACTOR_EVERY {
                self.refactor()?;
            }
            let Some(q) = self.choose_entering(bland) else {
                if self.pivots > 0 {
                    // confirm optimality on a fresh tableau
                    self.refactor()?;
                    if self.choose_entering(bland).is_some() {
                        continue;
                    }
                }
                return Ok(RunOutcome::Optimal);
            };
            if self.kind[q] == Col::Free && self.cost_row()[q] > 0.0 {
                self.negate_column(q);
            }
            let Some(r) = self.ratio_test(q, bland) else {
                return Ok(RunOutcome::Unbounded);
            };
            self.pivot(r, q);
        }
        Err(LpError::IterationLimit(cap))
    }

    /// Pivots zero-level artificials out of the basis where a usable column
    /// exists. Rows with none are redundant and keep their artificial at zero.
    fn drive_out_artificials(&mut self) {
        for i in 0..self.m {
            if self.kind[self.basis[i]] != Col::Artificial {
                continue;
            }
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.d + self.m {
                if self.is_basic[j] {
                    continue;
                }
                let a = self.at(i, j).abs();
                if a > self.opts.pivot_tol && best.is_none_or(|(_, b)| a > b) {
                    best = Some((j, a));
                }
            }
            if let Some((j, _)) = best {
                self.pivot(i, j);
            }
        }
    }

    /// Recomputes basic values from the original columns and returns the
    /// structural part of the current basic solution.
    fn primal(&self) -> Result<Vec<f64>, LpError> {
        let mut x = vec![0.0; self.d];
        if self.m == 0 {
            return Ok(x);
        }
        let b = self.basis_matrix();
        let values = b
            .lu()
            .solve(&self.original_rhs)
            .ok_or_else(|| LpError::NumericallySingular("basis matrix is singular".into()))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NumericallySingular("non-finite basic solution".into()));
        }
        for (k, &col) in self.basis.iter().enumerate() {
            if col < self.d {
                x[col] = if self.flipped[col] { -values[k] } else { values[k] };
            }
        }
        Ok(x)
    }
}
