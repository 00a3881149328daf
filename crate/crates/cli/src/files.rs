//! JSON file formats read and written by the command-line tool.

use std::fs;
use std::path::Path;

use minreach::{Ball, DenseMatrix, HittingSetInstance, LtiSystem, Vector};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `{"n": int, "a": [[...]], "w": optional [[...]], "seed": optional int}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub a: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl SystemFile {
    pub fn from_system(sys: &LtiSystem, seed: Option<u64>) -> Self {
        Self {
            n: sys.n(),
            a: sys.a().to_rows(),
            w: sys.w().map(DenseMatrix::to_rows),
            seed,
        }
    }

    pub fn to_system(&self) -> Result<LtiSystem, CliError> {
        if self.a.len() != self.n || self.a.iter().any(|r| r.len() != self.n) {
            return Err(CliError::Input(format!(
                "matrix \"a\" must be {n}x{n}",
                n = self.n
            )));
        }
        let a = DenseMatrix::from_rows(&self.a)?;
        let sys = match &self.w {
            None => LtiSystem::new(a)?,
            Some(w) => {
                if w.is_empty() {
                    return Err(CliError::Input("matrix \"w\" has no rows".into()));
                }
                LtiSystem::with_output(a, DenseMatrix::from_rows(w)?)?
            }
        };
        Ok(sys)
    }
}

/// One entry of a balls file: `{"center": [...], "radius_sq": r}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallFile {
    pub center: Vec<f64>,
    pub radius_sq: f64,
}

impl BallFile {
    pub fn to_ball(&self) -> Result<Ball, CliError> {
        Ok(Ball::new(Vector::new(self.center.clone())?, self.radius_sq)?)
    }
}

/// `{"m": int, "sets": [[int, ...], ...]}` with 1-based elements.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub m: usize,
    pub sets: Vec<Vec<usize>>,
}

impl InstanceFile {
    pub fn to_instance(&self) -> Result<HittingSetInstance, CliError> {
        Ok(HittingSetInstance::new(self.m, self.sets.clone())?)
    }
}

/// Target written next to a reduced system.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetFile {
    Point { chi: Vec<f64> },
    Cone { m: usize, p: usize },
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

/// Serializes with keys in sorted order so output is byte-stable.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("plain data serializes");
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    fs::write(path, to_sorted_json(value))
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

/// Parses `1,2.5,-3` or `@path`; the file may hold a JSON array or numbers
/// separated by commas or whitespace.
pub fn parse_vector(arg: &str) -> Result<Vector, CliError> {
    let text = match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    let trimmed = text.trim();
    let values: Vec<f64> = if trimmed.starts_with('[') {
        serde_json::from_str(trimmed)
            .map_err(|e| CliError::Input(format!("bad vector {arg:?}: {e}")))?
    } else {
        trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| CliError::Input(format!("bad number {t:?} in vector")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(CliError::Input(format!("vector {arg:?} is empty")));
    }
    Ok(Vector::new(values)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_from_text() {
        assert_eq!(parse_vector("1,-2.5, 3").unwrap().as_slice(), &[1.0, -2.5, 3.0]);
        assert_eq!(parse_vector("[0, 1]").unwrap().as_slice(), &[0.0, 1.0]);
        assert!(parse_vector("1,x").is_err());
        assert!(parse_vector("").is_err());
        assert!(parse_vector("nan").is_err());
    }

    #[test]
    fn system_file_shape_checks() {
        let ok = SystemFile {
            n: 2,
            a: vec![vec![0.0, 1.0], vec![0.0, 0.0]],
            w: None,
            seed: None,
        };
        assert!(ok.to_system().is_ok());
        let bad = SystemFile { n: 3, ..ok.clone() };
        assert!(bad.to_system().is_err());
        let bad_w = SystemFile {
            w: Some(vec![vec![1.0, 0.0, 0.0]]),
            ..ok
        };
        assert!(bad_w.to_system().is_err());
    }

    #[test]
    fn sorted_keys() {
        let f = SystemFile {
            n: 1,
            a: vec![vec![-1.0]],
            w: None,
            seed: Some(7),
        };
        let s = to_sorted_json(&f);
        let a = s.find("\"a\"").unwrap();
        let n = s.find("\"n\"").unwrap();
        let seed = s.find("\"seed\"").unwrap();
        assert!(a < n && n < seed);
    }
}
