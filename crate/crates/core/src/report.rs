//! End-to-end analysis of a model and size reports across orderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bdd::{make_equivalence, make_ordering, Bdd, Characterization, VariableOrder};
use crate::error::Result;
use crate::reach::{compute_reach, propagate, unsafe_indices, PropagatedPredicates, ReachSet};
use crate::spec::Model;

/// Reach set, unsafe steps and propagated predicates of one model.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub model: Model,
    pub reach: ReachSet,
    pub indices: Vec<usize>,
    /// `None` when the model is safe.
    pub predicates: Option<PropagatedPredicates>,
}

impl Analysis {
    pub fn new(model: Model, eps: f64) -> Result<Self> {
        let reach = compute_reach(&model.system, &model.theta(), model.inputs.as_ref(), model.horizon)?;
        let indices = unsafe_indices(&reach, model.spec.unsafe_set(), model.spec.interval())?;
        let predicates = if indices.is_empty() {
            None
        } else {
            Some(propagate(&reach, model.spec.unsafe_set(), &indices, eps)?)
        };
        Ok(Self {
            model,
            reach,
            indices,
            predicates,
        })
    }

    pub fn is_safe(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    /// Builds the diagram and lists its accepted strings. `equivalence` names
    /// a registered check; `None` keeps the diagram unreduced.
    pub fn characterize(
        &self,
        order: &VariableOrder,
        equivalence: Option<&str>,
    ) -> Result<Option<(Bdd, Vec<Characterization>)>> {
        let Some(pp) = &self.predicates else {
            return Ok(None);
        };
        let bdd = match equivalence {
            Some(name) => {
                let mut check = make_equivalence(name)?;
                Bdd::construct_with(pp, order, Some(check.as_mut()))?
            }
            None => Bdd::construct_with(pp, order, None)?,
        };
        let paths = bdd.traverse(pp)?;
        Ok(Some((bdd, paths)))
    }
}

/// One construction in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub ordering: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub reduced: bool,
    pub n: usize,
    pub w: usize,
    pub seconds: f64,
    pub paths: usize,
}

pub const CSV_HEADER: &str = "ordering,reduced,N,W,build_seconds,num_characterizations";

impl RunRecord {
    pub fn from_bdd(bdd: &Bdd, ordering: &str, seed: Option<u64>, paths: usize, timing: bool) -> Self {
        let stats = bdd.stats();
        Self {
            ordering: ordering.to_string(),
            seed,
            reduced: bdd.is_reduced(),
            n: stats.nodes,
            w: stats.width,
            seconds: if timing { stats.build_time.as_secs_f64() } else { 0.0 },
            paths,
        }
    }

    /// Ordering label with the seed appended for seeded orderings.
    pub fn label(&self) -> String {
        match self.seed {
            Some(s) => format!("{}:{s}", self.ordering),
            None => self.ordering.clone(),
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{}",
            self.label(),
            self.reduced,
            self.n,
            self.w,
            self.seconds,
            self.paths
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub indices: Vec<usize>,
    pub k: usize,
    pub runs: Vec<RunRecord>,
    pub sigma_obdd: f64,
    pub sigma_robdd: f64,
}

/// Percentage spread `(max - min) / max * 100`; zero for fewer than two sizes.
pub fn sigma<I: IntoIterator<Item = usize>>(sizes: I) -> f64 {
    let sizes: Vec<usize> = sizes.into_iter().collect();
    let (Some(&max), Some(&min)) = (sizes.iter().max(), sizes.iter().min()) else {
        return 0.0;
    };
    if sizes.len() < 2 || max == 0 {
        return 0.0;
    }
    (max - min) as f64 / max as f64 * 100.0
}

impl RunReport {
    pub fn new(indices: Vec<usize>, runs: Vec<RunRecord>) -> Self {
        let sigma_obdd = sigma(runs.iter().filter(|r| !r.reduced).map(|r| r.n));
        let sigma_robdd = sigma(runs.iter().filter(|r| r.reduced).map(|r| r.n));
        Self {
            k: indices.len(),
            indices,
            runs,
            sigma_obdd,
            sigma_robdd,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for run in &self.runs {
            let _ = writeln!(out, "{}", run.csv_row());
        }
        out
    }

    /// Aligned text table followed by the two spreads.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<14} {:>7} {:>6} {:>4} {:>10} {:>6}\n",
            "ordering", "reduced", "N", "W", "seconds", "paths"
        );
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{:<14} {:>7} {:>6} {:>4} {:>10.4} {:>6}",
                r.label(),
                r.reduced,
                r.n,
                r.w,
                r.seconds,
                r.paths
            );
        }
        let _ = writeln!(out, "sigma OBDD:  {:.2}%", self.sigma_obdd);
        let _ = write!(out, "sigma ROBDD: {:.2}%", self.sigma_robdd);
        out
    }
}

/// Settings for [`compare`].
#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// One random ordering is built per seed.
    pub seeds: Vec<u64>,
    pub equivalence: String,
    /// When false, build times are reported as zero.
    pub timing: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            seeds: vec![0],
            equivalence: "farkas-milp".to_string(),
            timing: true,
        }
    }
}

/// Builds every ordering, unreduced then reduced. A safe model yields an
/// empty report.
pub fn compare(analysis: &Analysis, options: &CompareOptions) -> Result<RunReport> {
    let k = analysis.k();
    let mut plan: Vec<(&str, Option<u64>)> = vec![("default", None), ("middle", None)];
    plan.extend(options.seeds.iter().map(|&s| ("random", Some(s))));
    let mut runs = Vec::new();
    if analysis.predicates.is_some() {
        for reduce in [false, true] {
            for &(name, seed) in &plan {
                let order = make_ordering(name, k, seed.unwrap_or(0))?;
                let equivalence = reduce.then_some(options.equivalence.as_str());
                if let Some((bdd, paths)) = analysis.characterize(&order, equivalence)? {
                    runs.push(RunRecord::from_bdd(&bdd, name, seed, paths.len(), options.timing));
                }
            }
        }
    }
    Ok(RunReport::new(analysis.indices.clone(), runs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_cases() {
        assert_eq!(sigma([21]), 0.0);
        assert_eq!(sigma(Vec::<usize>::new()), 0.0);
        assert!((sigma([21, 22, 23]) - 2.0 / 23.0 * 100.0).abs() < 1e-12);
        assert_eq!(sigma([13, 13]), 0.0);
    }

    #[test]
    fn csv_row_format() {
        let r = RunRecord {
            ordering: "random".into(),
            seed: Some(3),
            reduced: true,
            n: 13,
            w: 3,
            seconds: 0.0,
            paths: 10,
        };
        assert_eq!(r.csv_row(), "random:3,true,13,3,0.000000,10");
    }

    #[test]
    fn report_json_round_trip() {
        let r = RunReport::new(
            vec![3, 4],
            vec![RunRecord {
                ordering: "default".into(),
                seed: None,
                reduced: false,
                n: 5,
                w: 2,
                seconds: 0.25,
                paths: 3,
            }],
        );
        let text = serde_json::to_string(&r).unwrap();
        assert!(!text.contains("seed"));
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }
}
