//! On-disk problems: a CSV matrix (plus a CSV right-hand side for the
//! Lasso) next to a JSON sidecar.
//!
//! ```json
//! {"kind": "logreg", "lambda": 100.0, "m": 50, "d": 200, "seed": 1,
//!  "matrix": "matrix.csv", "rhs": null}
//! ```
//!
//! `d` counts matrix columns for every kind. File names are relative to the
//! sidecar's directory.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::experiment::{Instance, ProblemKind};
use crate::error::{check_dim, Error, Result};
use crate::linop::{read_matrix_csv, write_matrix_csv};
use crate::problems::{L1LogReg, Lasso, MatrixGame};

pub const SIDECAR: &str = "problem.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureMeta {
    pub kind: ProblemKind,
    pub lambda: f64,
    pub m: usize,
    #[serde(alias = "n")]
    pub d: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_matrix")]
    pub matrix: String,
    #[serde(default)]
    pub rhs: Option<String>,
}

fn default_matrix() -> String {
    "matrix.csv".into()
}

/// Writes `inst` into `dir` (created if missing) and returns the sidecar
/// path.
pub fn save_fixture(dir: &Path, inst: &Instance) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let (m, d, lambda) = inst.shape();
    let mut meta = FixtureMeta { kind: inst.kind(), lambda, m, d, seed: 0, matrix: default_matrix(), rhs: None };
    let write = |name: &str, a: &ndarray::Array2<f64>| -> Result<()> {
        write_matrix_csv(BufWriter::new(File::create(dir.join(name))?), a)
    };
    match inst {
        Instance::Logreg(p) => write(&meta.matrix, p.b())?,
        Instance::Game { game, seed } => {
            meta.seed = *seed;
            write(&meta.matrix, &game.a.matrix)?;
        }
        Instance::Lasso(p) => {
            write(&meta.matrix, &p.a.matrix)?;
            let rhs = "rhs.csv".to_string();
            write(&rhs, &p.b.clone().insert_axis(ndarray::Axis(1)))?;
            meta.rhs = Some(rhs);
        }
    }
    let path = dir.join(SIDECAR);
    std::fs::write(&path, serde_json::to_string_pretty(&meta)?)?;
    Ok(path)
}

/// Loads a problem from its sidecar, or from a directory holding one.
pub fn load_fixture(path: &Path) -> Result<(Instance, FixtureMeta)> {
    let sidecar = if path.is_dir() { path.join(SIDECAR) } else { path.to_path_buf() };
    let dir = sidecar.parent().unwrap_or(Path::new("."));
    let meta: FixtureMeta = serde_json::from_str(&std::fs::read_to_string(&sidecar)?)?;
    let read = |name: &str| read_matrix_csv(BufReader::new(File::open(dir.join(name))?));
    let a = read(&meta.matrix)?;
    check_dim("fixture rows", meta.m, a.nrows())?;
    check_dim("fixture columns", meta.d, a.ncols())?;
    let inst = match meta.kind {
        ProblemKind::Logreg => Instance::Logreg(L1LogReg::new(a, meta.lambda)?),
        ProblemKind::Game => Instance::Game { game: MatrixGame::new(a, meta.lambda)?, seed: meta.seed },
        ProblemKind::Lasso => {
            let name = meta.rhs.as_deref().ok_or_else(|| Error::Parse("Lasso fixture without rhs".into()))?;
            let rhs = read(name)?;
            check_dim("rhs columns", 1, rhs.ncols())?;
            let b: Array1<f64> = rhs.column(0).to_owned();
            Instance::Lasso(Lasso::new(a, b, meta.lambda)?)
        }
    };
    Ok((inst, meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::experiment::ExperimentSpec;
    use crate::harness::Method;

    #[test]
    fn round_trip_every_kind() {
        let dir = tempfile::tempdir().unwrap();
        for kind in [ProblemKind::Logreg, ProblemKind::Game, ProblemKind::Lasso] {
            let spec = ExperimentSpec::new(kind, 6, 9, 4, vec![Method::Nlpdhg]);
            let inst = spec.instance(0).unwrap();
            let sub = dir.path().join(kind.name());
            save_fixture(&sub, &inst).unwrap();
            let (back, meta) = load_fixture(&sub).unwrap();
            assert_eq!(meta.kind, kind);
            assert_eq!(back.shape(), inst.shape());
            match (&inst, &back) {
                (Instance::Logreg(a), Instance::Logreg(b)) => assert_eq!(a.b(), b.b()),
                (Instance::Game { game: a, seed: s }, Instance::Game { game: b, seed: t }) => {
                    assert_eq!(a.a.matrix, b.a.matrix);
                    assert_eq!(s, t);
                }
                (Instance::Lasso(a), Instance::Lasso(b)) => {
                    assert_eq!(a.a.matrix, b.a.matrix);
                    assert_eq!(a.b, b.b);
                }
                _ => panic!("kind changed"),
            }
        }
    }
}
