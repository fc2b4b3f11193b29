//! Result records: a typed CSV table plus a JSON metadata sidecar.
//!
//! The CSV header carries each column type as `name:type`, with type one of
//! `int`, `float`, `bool`, `str`. Floats are written in shortest round-trip
//! form, so reading a record back reproduces every value bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::spec::{ExperimentSpec, Kind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColType {
    Int,
    Float,
    Bool,
    Str,
}

impl ColType {
    fn tag(self) -> &'static str {
        match self {
            ColType::Int => "int",
            ColType::Float => "float",
            ColType::Bool => "bool",
            ColType::Str => "str",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        Some(match s {
            "int" => ColType::Int,
            "float" => ColType::Float,
            "bool" => ColType::Bool,
            "str" => ColType::Str,
            _ => return None,
        })
    }

    /// Placeholder for outputs of a failed row.
    pub fn missing(self) -> Cell {
        match self {
            ColType::Int => Cell::Int(0),
            ColType::Float => Cell::Float(f64::NAN),
            ColType::Bool => Cell::Bool(false),
            ColType::Str => Cell::Str(String::new()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub ty: ColType,
}

impl Column {
    pub fn new(name: &str, ty: ColType) -> Self {
        Self {
            name: name.to_owned(),
            ty,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Cell {
    pub fn ty(&self) -> ColType {
        match self {
            Cell::Int(_) => ColType::Int,
            Cell::Float(_) => ColType::Float,
            Cell::Bool(_) => ColType::Bool,
            Cell::Str(_) => ColType::Str,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn parse(s: &str, ty: ColType) -> Option<Self> {
        Some(match ty {
            ColType::Int => Cell::Int(s.parse().ok()?),
            ColType::Float => Cell::Float(s.parse().ok()?),
            ColType::Bool => Cell::Bool(s.parse().ok()?),
            ColType::Str => Cell::Str(s.to_owned()),
        })
    }
}

// Bitwise on floats so that NaN placeholders compare equal after a round trip.
impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Cell::Int(a), Cell::Int(b)) => a == b,
            (Cell::Float(a), Cell::Float(b)) => {
                a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
            }
            (Cell::Bool(a), Cell::Bool(b)) => a == b,
            (Cell::Str(a), Cell::Str(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x:?}"),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Str(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::Int(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Str(x.to_owned())
    }
}

/// Finite-N regime conditions for one CUE parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub n: usize,
    pub alpha: f64,
    pub eps: f64,
    pub ell: f64,
    /// `N^{α−1}/ε`: microscopic spacing over smoothing scale.
    pub c1_ratio: f64,
    pub c1_holds: bool,
    /// `ℓ/(N^α log N)`: window length over mesoscopic scale.
    pub c2_ratio: f64,
    pub c2_holds: bool,
}

impl ConditionFlags {
    pub fn new(n: usize, alpha: f64, eps: f64, ell: f64) -> Self {
        let nf = n as f64;
        let c1_ratio = nf.powf(alpha - 1.0) / eps;
        let c2_ratio = ell / (nf.powf(alpha) * nf.ln());
        Self {
            n,
            alpha,
            eps,
            ell,
            c1_ratio,
            c1_holds: c1_ratio < 1.0,
            c2_ratio,
            c2_holds: c2_ratio < 1.0,
        }
    }
}

/// One realized chaos density, kept for figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub label: String,
    pub u: Vec<f64>,
    pub density: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub kind: Kind,
    pub anchor: String,
    pub description: String,
    pub spec: ExperimentSpec,
    pub seed: u64,
    pub code_version: String,
    pub started: String,
    pub wall_time_s: f64,
    pub metadata_only: bool,
    pub columns: Vec<Column>,
    pub row_count: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub conditions: Vec<ConditionFlags>,
    #[serde(default)]
    pub summary: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot: Option<Snapshot>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub meta: RecordMeta,
    pub rows: Vec<Vec<Cell>>,
}

/// Paths of a persisted record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordPaths {
    pub csv: PathBuf,
    pub meta: PathBuf,
}

pub fn meta_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| HarnessError::io(path, e))
}

impl ResultRecord {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.meta.columns.iter().position(|c| c.name == name)
    }

    /// Numeric values of a column, in row order.
    pub fn floats(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column(name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(
            self.meta
                .columns
                .iter()
                .map(|c| format!("{}:{}", c.name, c.ty.tag())),
        )?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))?;
        }
        w.into_inner()
            .map_err(|e| HarnessError::io("<csv buffer>", e.into_error()))
    }

    /// Writes `<dir>/<kind>-<timestamp>.csv` and its `.meta.json` sidecar.
    /// Each file appears complete or not at all.
    pub fn write(&self, dir: &Path) -> Result<RecordPaths> {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let stamp = self.meta.started.replace([':', '-'], "");
        let mut csv = dir.join(format!("{}-{stamp}.csv", self.meta.kind));
        let mut k = 1;
        while csv.exists() {
            csv = dir.join(format!("{}-{stamp}-{k}.csv", self.meta.kind));
            k += 1;
        }
        let meta = meta_path(&csv);
        write_atomic(&meta, &serde_json::to_vec_pretty(&self.meta)?)?;
        write_atomic(&csv, &self.to_csv()?)?;
        Ok(RecordPaths { csv, meta })
    }

    /// Reads a record back from its CSV path; the sidecar is found next to it.
    pub fn read(csv_path: &Path) -> Result<Self> {
        let meta_file = meta_path(csv_path);
        let meta_text = fs::read(&meta_file).map_err(|e| HarnessError::io(&meta_file, e))?;
        let meta: RecordMeta = serde_json::from_slice(&meta_text)?;
        let bad = |message: String| HarnessError::Parse {
            path: csv_path.to_owned(),
            message,
        };
        let mut r = csv::Reader::from_path(csv_path)?;
        let mut columns = Vec::new();
        for h in r.headers()? {
            let (name, tag) = h
                .rsplit_once(':')
                .ok_or_else(|| bad(format!("untyped header `{h}`")))?;
            let ty = ColType::from_tag(tag)
                .ok_or_else(|| bad(format!("unknown column type `{tag}`")))?;
            columns.push(Column::new(name, ty));
        }
        if columns != meta.columns {
            return Err(bad("header does not match the metadata sidecar".into()));
        }
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .zip(&columns)
                .map(|(s, c)| {
                    Cell::parse(s, c.ty)
                        .ok_or_else(|| bad(format!("bad {} value `{s}` in {}", c.ty.tag(), c.name)))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != meta.row_count {
            return Err(bad(format!(
                "expected {} rows, found {}",
                meta.row_count,
                rows.len()
            )));
        }
        Ok(Self { meta, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRecord {
        let columns = vec![
            Column::new("n", ColType::Int),
            Column::new("value", ColType::Float),
            Column::new("pass", ColType::Bool),
            Column::new("status", ColType::Str),
        ];
        let rows = vec![
            vec![4usize.into(), 0.1f64.into(), true.into(), "ok".into()],
            vec![
                8usize.into(),
                (1.0f64 / 3.0).into(),
                false.into(),
                "a, \"quoted\" note".into(),
            ],
            vec![
                16usize.into(),
                f64::NAN.into(),
                false.into(),
                "divergent".into(),
            ],
            vec![32usize.into(), 1e-300f64.into(), true.into(), "".into()],
        ];
        ResultRecord {
            meta: RecordMeta {
                kind: Kind::BoCheck,
                anchor: Kind::BoCheck.anchor().into(),
                description: Kind::BoCheck.description().into(),
                spec: ExperimentSpec::new(Kind::BoCheck),
                seed: 0,
                code_version: "test".into(),
                started: "2026-01-01T00:00:00.000Z".into(),
                wall_time_s: 0.5,
                metadata_only: false,
                columns,
                row_count: rows.len(),
                conditions: vec![ConditionFlags::new(64, 0.5, 0.1, 1.0)],
                summary: BTreeMap::new(),
                snapshot: None,
            },
            rows,
        }
    }

    #[test]
    fn round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        let rec = sample();
        let paths = rec.write(dir.path()).unwrap();
        assert!(paths
            .csv
            .to_string_lossy()
            .ends_with("bo-check-20260101T000000.000Z.csv"));
        let back = ResultRecord::read(&paths.csv).unwrap();
        assert_eq!(back, rec);
        // a second write with the same timestamp does not clobber the first
        let again = rec.write(dir.path()).unwrap();
        assert_ne!(again.csv, paths.csv);
    }

    #[test]
    fn typed_header() {
        let text = String::from_utf8(sample().to_csv().unwrap()).unwrap();
        assert!(
            text.starts_with("n:int,value:float,pass:bool,status:str\n"),
            "{text}"
        );
    }

    #[test]
    fn mismatched_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let paths = sample().write(dir.path()).unwrap();
        let text = fs::read_to_string(&paths.csv)
            .unwrap()
            .replacen("value:float", "value:int", 1);
        fs::write(&paths.csv, text).unwrap();
        assert!(ResultRecord::read(&paths.csv).is_err());
    }

    #[test]
    fn conditions() {
        let c = ConditionFlags::new(512, 0.5, 0.05, 1.0);
        assert!((c.c1_ratio - 512f64.powf(-0.5) / 0.05).abs() < 1e-12);
        assert!(c.c1_holds && c.c2_holds);
        assert!(!ConditionFlags::new(16, 0.5, 0.01, 1.0).c1_holds);
    }
}
