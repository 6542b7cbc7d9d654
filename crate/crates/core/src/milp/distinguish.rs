//! Distinguisher models for node equivalence.
//!
//! Two node predicates `pa`, `pb` are equivalent with respect to a sequence of
//! future predicate pairs when every selection `J` of future rows that is
//! satisfiable together with `pa` is also satisfiable together with `pb`, and
//! vice versa. One phase searches for a selection that separates them: a point
//! of `pa ∧ Q_J` (sub-system 1) together with a Farkas certificate that
//! `pb ∧ Q_J` is empty (sub-system 2). Selection is by big-M gating.
//!
//! Variable layout: `[α (d) | y (rows of pb, then 2q future rows) | z (1 + 2q)]`
//! where `z₀` stands for `pa` and is fixed to 1, and `z_{1+2j}`, `z_{2+2j}`
//! gate the high and low row of future pair `j`. At most one side of each pair
//! is selected.

use super::{solve_milp, MilpParams, MilpProblem, MilpResult};
use crate::error::{Error, Result};
use crate::geometry::{LinearConstraint, Predicate};
use crate::lp::LpProblem;

/// High and low row of one future decision.
pub type FuturePair = (LinearConstraint, LinearConstraint);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseLayout {
    pub dimension: usize,
    pub pb_rows: usize,
    pub future: usize,
}

impl PhaseLayout {
    pub fn y_offset(&self) -> usize {
        self.dimension
    }

    pub fn z_offset(&self) -> usize {
        self.dimension + self.pb_rows + 2 * self.future
    }

    pub fn num_vars(&self) -> usize {
        self.z_offset() + 1 + 2 * self.future
    }
}

/// Largest coordinate magnitude over `predicate`, or `None` if unbounded.
pub fn valuation_radius(predicate: &Predicate) -> Result<Option<f64>> {
    let d = predicate.dimension();
    let mut r: f64 = 0.0;
    for v in 0..d {
        for sign in [1.0, -1.0] {
            let mut obj = vec![0.0; d];
            obj[v] = sign;
            let res = crate::lp::solve(&LpProblem::maximize(obj, predicate.clone()))?;
            match (res.status, res.objective) {
                (crate::lp::LpStatus::Feasible, Some(val)) => r = r.max(val.abs()),
                (crate::lp::LpStatus::Infeasible, _) => return Ok(Some(0.0)),
                _ => return Ok(None),
            }
        }
    }
    Ok(Some(r))
}

fn big_m(c: &LinearConstraint, params: &MilpParams) -> f64 {
    match params.radius {
        Some(r) => c.bound().abs() + c.coefficients().iter().map(|a| a.abs()).sum::<f64>() * r,
        None => params.big_m_floor,
    }
}

/// Builds the phase that looks for a suffix feasible from `pa` but not from `pb`.
pub fn build_phase(
    pa: &Predicate,
    pb: &Predicate,
    future: &[FuturePair],
    params: &MilpParams,
) -> Result<(MilpProblem, PhaseLayout)> {
    let d = pa.dimension();
    if pb.dimension() != d {
        return Err(Error::mismatch("distinguished predicates", d, pb.dimension()));
    }
    let mut rows_f: Vec<&LinearConstraint> = Vec::with_capacity(2 * future.len());
    for (hi, lo) in future {
        for r in [hi, lo] {
            if r.dimension() != d {
                return Err(Error::mismatch("future row", d, r.dimension()));
            }
            rows_f.push(r);
        }
    }
    let layout = PhaseLayout {
        dimension: d,
        pb_rows: pb.len(),
        future: future.len(),
    };
    let nv = layout.num_vars();
    let (yo, zo) = (layout.y_offset(), layout.z_offset());
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();

    // sub-system 1: pa (z0 = 1, so ungated), future row t gated by z_{1+t}
    for c in pa.constraints() {
        let mut a = vec![0.0; nv];
        a[..d].copy_from_slice(c.coefficients());
        rows.push((a, c.bound()));
    }
    for (t, c) in rows_f.iter().enumerate() {
        let m = big_m(c, params);
        let mut a = vec![0.0; nv];
        a[..d].copy_from_slice(c.coefficients());
        a[zo + 1 + t] = m;
        rows.push((a, c.bound() + m));
    }
    // at most one side of each future pair
    for j in 0..future.len() {
        let mut a = vec![0.0; nv];
        a[zo + 1 + 2 * j] = 1.0;
        a[zo + 2 + 2 * j] = 1.0;
        rows.push((a, 1.0));
    }

    // sub-system 2: Hᵀy = 0, gᵀy <= -eps over [pb | future]
    let h: Vec<&LinearConstraint> = pb.constraints().iter().chain(rows_f.iter().copied()).collect();
    for col in 0..d {
        if h.iter().all(|c| c.coefficients()[col] == 0.0) {
            continue;
        }
        let mut a = vec![0.0; nv];
        for (i, c) in h.iter().enumerate() {
            a[yo + i] = c.coefficients()[col];
        }
        let neg = a.iter().map(|v| -v).collect();
        rows.push((a, 0.0));
        rows.push((neg, 0.0));
    }
    let mut g = vec![0.0; nv];
    for (i, c) in h.iter().enumerate() {
        g[yo + i] = c.bound();
    }
    rows.push((g, -params.farkas_eps));

    // linking: eps·z <= y <= cap·z for future multipliers
    for t in 0..rows_f.len() {
        let y = yo + layout.pb_rows + t;
        let z = zo + 1 + t;
        let mut up = vec![0.0; nv];
        up[y] = 1.0;
        up[z] = -params.multiplier_cap;
        rows.push((up, 0.0));
        let mut down = vec![0.0; nv];
        down[y] = -1.0;
        down[z] = params.farkas_eps;
        rows.push((down, 0.0));
    }

    let mut bounds = vec![(f64::NEG_INFINITY, f64::INFINITY); nv];
    for b in &mut bounds[yo..zo] {
        *b = (0.0, f64::INFINITY);
    }
    bounds[zo] = (1.0, 1.0);
    for b in &mut bounds[zo + 1..] {
        *b = (0.0, 1.0);
    }
    let mut objective = vec![0.0; nv];
    for c in &mut objective[zo..] {
        *c = 1.0;
    }
    let problem = MilpProblem {
        lp: LpProblem::maximize(objective, Predicate::from_rows(nv, &rows)?).with_bounds(bounds),
        binaries: (zo..nv).collect(),
    };
    Ok((problem, layout))
}

/// Future decisions `(pair index, high side)` picked by a solved phase.
pub fn phase_selection(result: &MilpResult) -> Vec<(usize, bool)> {
    result
        .selected
        .iter()
        .filter(|&&b| b > 0)
        .map(|&b| ((b - 1) / 2, (b - 1) % 2 == 0))
        .collect()
}

/// True when neither node can be separated from the other by any selection of
/// future rows.
pub fn isomorphs(na: &Predicate, nb: &Predicate, future: &[FuturePair], params: &MilpParams) -> Result<bool> {
    let d = na.dimension().max(nb.dimension());
    let (na, nb) = (na.padded(d)?, nb.padded(d)?);
    for (pa, pb) in [(&na, &nb), (&nb, &na)] {
        let (problem, _) = build_phase(pa, pb, future, params)?;
        if solve_milp(&problem, params)?.is_feasible() {
            return Ok(false);
        }
    }
    Ok(true)
}
