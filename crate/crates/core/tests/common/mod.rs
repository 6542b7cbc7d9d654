#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starbdd::geometry::{GeneralizedStar, Hyperbox, LinearConstraint, Predicate, DEFAULT_NEGATION_EPS};
use starbdd::lp::{self, LpProblem, LpStatus};
use starbdd::reach::{compute_reach, propagate, unsafe_indices, LinearSystem, PropagatedPredicates, ReachSet};
use starbdd::report::Analysis;
use starbdd::spec::load_model;

pub fn oscillator_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/oscillator.json").to_string()
}

pub fn oscillator() -> Analysis {
    Analysis::new(load_model(oscillator_path()).unwrap(), DEFAULT_NEGATION_EPS).unwrap()
}

pub struct RandomCase {
    pub seed: u64,
    pub reach: ReachSet,
    pub psi: LinearConstraint,
    pub pp: PropagatedPredicates,
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

fn extent(star: &GeneralizedStar, dir: &[f64]) -> Option<(f64, f64)> {
    let n = dir.len();
    let a = DVector::from_column_slice(dir);
    let base = a.dot(star.center());
    if star.num_vars() == 0 {
        return Some((base, base));
    }
    let obj: Vec<f64> = (0..star.num_vars())
        .map(|v| (0..n).map(|i| dir[i] * star.basis()[(i, v)]).sum())
        .collect();
    let mut out = [0.0; 2];
    for (slot, sign) in [(0, -1.0), (1, 1.0)] {
        let o: Vec<f64> = obj.iter().map(|c| sign * c).collect();
        let r = lp::solve(&LpProblem::maximize(o, star.predicate().clone())).ok()?;
        if r.status != LpStatus::Feasible {
            return None;
        }
        out[slot] = sign * r.objective? + base;
    }
    Some((out[0], out[1]))
}

/// A random system with `n <= 4`, at most one input and `1 <= k <= max_k`
/// unsafe steps, or `None` when the draw has no violation.
pub fn random_case(seed: u64, max_k: usize) -> Option<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=4usize);
    let m_in = rng.random_range(0..=1usize);
    let mut a = DMatrix::from_fn(n, n, |_, _| uniform(&mut rng, -1.0, 1.0));
    let rho = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if rho < 1e-3 {
        return None;
    }
    a *= uniform(&mut rng, 0.8, 1.05) / rho;
    let system = if m_in == 1 {
        let b = DMatrix::from_fn(n, 1, |_, _| uniform(&mut rng, -0.3, 0.3));
        LinearSystem::new(a, b).ok()?
    } else {
        LinearSystem::autonomous(a).ok()?
    };
    let center: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
    let half: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.05, 0.3)).collect();
    let theta = Hyperbox::new(
        center.iter().zip(&half).map(|(c, h)| c - h).collect(),
        center.iter().zip(&half).map(|(c, h)| c + h).collect(),
    )
    .ok()?;
    let inputs = if m_in == 1 {
        let w = uniform(&mut rng, 0.01, 0.1);
        Some(Hyperbox::new(vec![-w], vec![w]).ok()?)
    } else {
        None
    };
    let horizon = rng.random_range(4..=10usize);
    let reach = compute_reach(&system, &GeneralizedStar::from_box(&theta), inputs.as_ref(), horizon).ok()?;

    let mut dir: Vec<f64> = (0..n).map(|_| uniform(&mut rng, -1.0, 1.0)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 1e-6 {
        return None;
    }
    dir.iter_mut().for_each(|v| *v /= norm);
    let step = rng.random_range(1..=horizon);
    let (lo, hi) = extent(reach.star(step)?, &dir)?;
    let bound = lo + uniform(&mut rng, 0.2, 0.8) * (hi - lo);
    let psi = LinearConstraint::new(dir, bound).ok()?;
    let mut indices = unsafe_indices(&reach, &psi, (0, horizon)).ok()?;
    if indices.is_empty() {
        return None;
    }
    let start = rng.random_range(0..indices.len());
    indices = indices.into_iter().skip(start).take(max_k).collect();
    let pp = propagate(&reach, &psi, &indices, DEFAULT_NEGATION_EPS).ok()?;
    lp::check_feasible(pp.root()).ok()??;
    Some(RandomCase { seed, reach, psi, pp })
}

/// The first `count` usable cases drawn from seeds `base, base + 1, ...`.
pub fn random_cases(base: u64, count: usize, max_k: usize) -> Vec<RandomCase> {
    let mut out = Vec::with_capacity(count);
    let mut seed = base;
    while out.len() < count {
        if let Some(c) = random_case(seed, max_k) {
            out.push(c);
        }
        seed += 1;
        assert!(seed < base + 100 * count as u64 + 1000, "too few usable random systems");
    }
    out
}

/// Random `d`-dimensional predicate with `m` rows; roughly half are empty.
pub fn random_predicate(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Predicate {
    let rows: Vec<(Vec<f64>, f64)> = (0..m)
        .map(|_| {
            let a: Vec<f64> = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
            (a, uniform(rng, -1.0, 1.0))
        })
        .collect();
    Predicate::from_rows(d, &rows).unwrap()
}

pub fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}
