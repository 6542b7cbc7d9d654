use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SafetySpec;
use crate::error::{Error, Result};
use crate::geometry::{GeneralizedStar, Hyperbox};
use crate::reach::LinearSystem;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxFile {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// On-disk JSON layout of a model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub names: Vec<String>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Vec<f64>>>,
    pub init: BoxFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<BoxFile>,
    pub horizon: usize,
    pub spec: String,
}

/// A validated model: system, initial box, input box, horizon and spec.
#[derive(Debug, Clone)]
pub struct Model {
    pub names: Vec<String>,
    pub system: LinearSystem,
    pub init: Hyperbox,
    pub inputs: Option<Hyperbox>,
    pub horizon: usize,
    pub spec: SafetySpec,
}

impl Model {
    /// Θ with origin center, identity basis and the box rows.
    pub fn theta(&self) -> GeneralizedStar {
        GeneralizedStar::from_box(&self.init)
    }

    pub fn to_file(&self) -> ModelFile {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect()
        };
        let b = self.system.input_matrix();
        ModelFile {
            names: self.names.clone(),
            a: rows(self.system.dynamics()),
            b: (b.ncols() > 0).then(|| rows(b)),
            init: BoxFile {
                lower: self.init.lower().to_vec(),
                upper: self.init.upper().to_vec(),
            },
            inputs: self.inputs.as_ref().map(|u| BoxFile {
                lower: u.lower().to_vec(),
                upper: u.upper().to_vec(),
            }),
            horizon: self.horizon,
            spec: self.spec.to_text(&self.names),
        }
    }
}

fn matrix(name: &str, rows: &[Vec<f64>], nrows: usize) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(Error::Model(format!(
            "{name} has {} rows, expected {nrows}",
            rows.len()
        )));
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Model(format!(
            "{name} row {i} has {} entries, expected {ncols}",
            rows[i].len()
        )));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Model(format!("{name} contains a non-finite entry")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn hyperbox(name: &str, b: &BoxFile, dim: usize) -> Result<Hyperbox> {
    if b.lower.len() != dim || b.upper.len() != dim {
        return Err(Error::Model(format!(
            "{name} bounds have lengths {}/{}, expected {dim}",
            b.lower.len(),
            b.upper.len()
        )));
    }
    Hyperbox::new(b.lower.clone(), b.upper.clone()).map_err(|e| Error::Model(format!("{name}: {e}")))
}

impl TryFrom<ModelFile> for Model {
    type Error = Error;

    fn try_from(f: ModelFile) -> Result<Self> {
        let n = f.names.len();
        if n == 0 {
            return Err(Error::Model("at least one state variable is required".into()));
        }
        for (i, name) in f.names.iter().enumerate() {
            if name.is_empty()
                || !name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::Model(format!("invalid variable name `{name}`")));
            }
            if f.names[..i].contains(name) {
                return Err(Error::Model(format!("duplicate variable name `{name}`")));
            }
        }
        let a = matrix("A", &f.a, n)?;
        if a.ncols() != n {
            return Err(Error::Model(format!("A has {} columns, expected {n}", a.ncols())));
        }
        let b = match &f.b {
            Some(rows) => matrix("B", rows, n)?,
            None => DMatrix::zeros(n, 0),
        };
        let inputs = match &f.inputs {
            Some(u) => Some(hyperbox("inputs", u, b.ncols())?),
            None if b.ncols() > 0 => {
                return Err(Error::Model(format!(
                    "B has {} columns but no input bounds are given",
                    b.ncols()
                )))
            }
            None => None,
        };
        let init = hyperbox("init", &f.init, n)?;
        let spec = SafetySpec::parse(&f.spec, &f.names)?;
        let (_, upper) = spec.interval();
        if f.horizon < upper {
            return Err(Error::Model(format!(
                "horizon {} is shorter than the specification interval end {upper}",
                f.horizon
            )));
        }
        Ok(Model {
            system: LinearSystem::new(a, b)?,
            names: f.names,
            init,
            inputs,
            horizon: f.horizon,
            spec,
        })
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Model(format!("invalid JSON: {e}")))?;
    Model::try_from(file)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    parse_model(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
        "names": ["x", "y", "z"],
        "A": [[0.722, -0.523, 0], [0.785, 0.696, 0], [0, 0, 0.931]],
        "B": [[0], [0.1], [0.1]],
        "init": {"lower": [-0.1, -0.8, -1.07], "upper": [0.1, -0.4, -1]},
        "inputs": {"lower": [-0.04], "upper": [0.04]},
        "horizon": 15,
        "spec": "G[0,15] !(y >= 0.4)"
    }"#;

    #[test]
    fn loads_oscillating_particle() {
        let m = parse_model(EXAMPLE).unwrap();
        assert_eq!(m.system.dynamics()[(1, 0)], 0.785);
        assert_eq!(m.system.input_matrix().ncols(), 1);
        assert_eq!(m.init.lower(), &[-0.1, -0.8, -1.07]);
        assert_eq!(m.inputs.as_ref().unwrap().upper(), &[0.04]);
        assert_eq!(m.horizon, 15);
        assert_eq!(m.spec.unsafe_set().coefficients(), &[0.0, -1.0, 0.0]);
        let again = Model::try_from(m.to_file()).unwrap();
        assert_eq!(again.to_file(), m.to_file());
    }

    #[test]
    fn missing_inputs_means_no_input() {
        let text = r#"{"names":["x"],"A":[[0.5]],"init":{"lower":[0],"upper":[1]},
                       "horizon":3,"spec":"G[0,3] !(x >= 2)"}"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.system.num_inputs(), 0);
        assert!(m.inputs.is_none());
    }

    #[test]
    fn rejects_inconsistent_models() {
        let bad_inputs = EXAMPLE.replace(r#""lower": [-0.04], "upper": [0.04]"#, r#""lower": [-0.04, 0], "upper": [0.04, 0]"#);
        assert!(parse_model(&bad_inputs).is_err());
        let no_inputs = EXAMPLE.replace(r#""inputs": {"lower": [-0.04], "upper": [0.04]},"#, "");
        assert!(parse_model(&no_inputs).is_err());
        let short = EXAMPLE.replace(r#""horizon": 15"#, r#""horizon": 14"#);
        assert!(parse_model(&short).is_err());
        let ragged = EXAMPLE.replace("[0, 0, 0.931]", "[0, 0.931]");
        assert!(parse_model(&ragged).is_err());
        let extra = EXAMPLE.replace(r#""horizon""#, r#""colour": 1, "horizon""#);
        assert!(parse_model(&extra).is_err());
        assert!(parse_model("{").is_err());
        let unknown = EXAMPLE.replace("y >= 0.4", "w >= 0.4");
        assert!(matches!(parse_model(&unknown), Err(Error::Parse(_))));
    }
}
