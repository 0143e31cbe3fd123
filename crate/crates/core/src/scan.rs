//! Two-parameter sweeps of the critical visibility, written as CSV grids.
//!
//! A cell holds `v*` when the Werner family is detectable there
//! (`v* ≤ 1`) and is empty otherwise, so the filled region of a grid is
//! exactly the detectable region.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::states::{bloch_state, BlochVector, DensityMatrix};
use crate::tensor::{ComplexMatrix, C64};
use crate::thresholds::{
    admixture_extremes, admixture_threshold, amplitude_damping_threshold, bisect, numeric_threshold,
    pauli_threshold, white_noise_threshold, FormulaId, ThresholdResult,
};

/// Significant digits of every number in a CSV grid.
pub const CSV_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    White,
    /// Admixed states chosen to minimize `A` (least detectable).
    AdmixtureMin,
    /// Admixed states chosen to maximize `A`.
    AdmixtureMax,
    /// Admixture of fixed states given by `x0, x1, x2, y0, y1, y2`.
    Admixture,
    PauliSame,
    PauliDifferent,
    AmplitudeDamping,
}

impl ScanKind {
    pub const ALL: [ScanKind; 7] = [
        ScanKind::White,
        ScanKind::AdmixtureMin,
        ScanKind::AdmixtureMax,
        ScanKind::Admixture,
        ScanKind::PauliSame,
        ScanKind::PauliDifferent,
        ScanKind::AmplitudeDamping,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScanKind::White => "white",
            ScanKind::AdmixtureMin => "admixture_min",
            ScanKind::AdmixtureMax => "admixture_max",
            ScanKind::Admixture => "admixture",
            ScanKind::PauliSame => "pauli_same",
            ScanKind::PauliDifferent => "pauli_different",
            ScanKind::AmplitudeDamping => "amplitude_damping",
        }
    }

    /// Parameters that may be swept along an axis.
    pub fn axis_params(self) -> &'static [&'static str] {
        match self {
            ScanKind::AmplitudeDamping => &["eps1", "eps2"],
            _ => &["p1", "p2"],
        }
    }

    /// Extra parameters with their defaults; `None` means required.
    pub fn extra_params(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            ScanKind::Admixture => &[
                ("x0", None),
                ("x1", None),
                ("x2", None),
                ("y0", None),
                ("y1", None),
                ("y2", None),
            ],
            ScanKind::PauliSame => &[("i", Some(1.0))],
            ScanKind::PauliDifferent => &[("i", Some(1.0)), ("j", Some(3.0))],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanMethod {
    #[default]
    ClosedForm,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn unit(name: &str, steps: usize) -> Self {
        Self {
            name: name.to_string(),
            min: 0.0,
            max: 1.0,
            steps,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub noise_kind: ScanKind,
    pub axis1: Axis,
    pub axis2: Axis,
    #[serde(default, alias = "fixed_params")]
    pub fixed: BTreeMap<String, f64>,
    #[serde(default)]
    pub method: ScanMethod,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
}

impl ScanConfig {
    /// Unit-square sweep of the two axis parameters of `kind`.
    pub fn unit_square(kind: ScanKind, steps: usize) -> Self {
        let [a, b] = [kind.axis_params()[0], kind.axis_params()[1]];
        Self {
            noise_kind: kind,
            axis1: Axis::unit(a, steps),
            axis2: Axis::unit(b, steps),
            fixed: BTreeMap::new(),
            method: ScanMethod::ClosedForm,
            seed: 0,
            output_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.noise_kind;
        let axis_params = kind.axis_params();
        for (field, axis) in [("axis1", &self.axis1), ("axis2", &self.axis2)] {
            if !axis_params.contains(&axis.name.as_str()) {
                return Err(Error::config(
                    format!("{field}.name"),
                    format!("'{}' is not an axis of {} (expected one of {axis_params:?})", axis.name, kind.name()),
                ));
            }
            if axis.steps < 2 {
                return Err(Error::config(format!("{field}.steps"), "need at least 2 steps"));
            }
            if axis.min.is_nan() || axis.max.is_nan() || axis.min >= axis.max {
                return Err(Error::config(format!("{field}.min"), "min must be below max"));
            }
            if axis.min < 0.0 || axis.max > 1.0 {
                return Err(Error::config(format!("{field}.min"), "range must lie in [0, 1]"));
            }
        }
        if self.axis1.name == self.axis2.name {
            return Err(Error::config("axis2.name", "both axes sweep the same parameter"));
        }
        for key in self.fixed.keys() {
            if !kind.extra_params().iter().any(|(name, _)| name == key) {
                return Err(Error::config(
                    format!("fixed.{key}"),
                    format!("not a fixed parameter of {}", kind.name()),
                ));
            }
        }
        let probe = self.params_at(self.axis1.min, self.axis2.min)?;
        if kind == ScanKind::Admixture {
            admixed_states(&probe)?;
        }
        if kind == ScanKind::PauliDifferent && probe["i"] == probe["j"] {
            return Err(Error::config("fixed.j", "pauli_different needs i != j"));
        }
        if let ScanKind::PauliSame | ScanKind::PauliDifferent = kind {
            for key in ["i", "j"] {
                if let Some(v) = probe.get(key) {
                    if ![1.0, 2.0, 3.0].contains(v) {
                        return Err(Error::config(format!("fixed.{key}"), "Pauli index must be 1, 2 or 3"));
                    }
                }
            }
        }
        Ok(())
    }

    fn params_at(&self, a1: f64, a2: f64) -> Result<BTreeMap<String, f64>> {
        let mut params = BTreeMap::new();
        params.insert(self.axis1.name.clone(), a1);
        params.insert(self.axis2.name.clone(), a2);
        for (name, default) in self.noise_kind.extra_params() {
            let value = self.fixed.get(*name).copied().or(*default).ok_or_else(|| {
                Error::config(format!("fixed.{name}"), format!("required by {}", self.noise_kind.name()))
            })?;
            params.insert(name.to_string(), value);
        }
        Ok(params)
    }
}

fn admixed_states(params: &BTreeMap<String, f64>) -> Result<(DensityMatrix, DensityMatrix)> {
    let state = |prefix: &str| {
        let g = |k: usize| params[&format!("{prefix}{k}")];
        let op = ComplexMatrix::from_rows(&[
            vec![C64::new(g(0), 0.0), C64::new(g(1), g(2))],
            vec![C64::new(g(1), -g(2)), C64::new(1.0 - g(0), 0.0)],
        ])?;
        DensityMatrix::single(op).map_err(|e| Error::config(format!("fixed.{prefix}0"), e.to_string()))
    };
    Ok((state("x")?, state("y")?))
}

fn pole(up: bool) -> DensityMatrix {
    bloch_state(&BlochVector::new(0.0, 0.0, if up { 1.0 } else { -1.0 }).expect("unit"))
}

/// Noise specification realizing a scan cell.
pub fn cell_noise(kind: ScanKind, params: &BTreeMap<String, f64>) -> Result<NoiseSpec> {
    let p = |k: &str| params[k];
    Ok(match kind {
        ScanKind::White => NoiseSpec::WhiteNoise { p1: p("p1"), p2: p("p2") },
        // X = Y = |0⟩⟨0| maximizes the overlap term, X = |0⟩⟨0|, Y = |1⟩⟨1| minimizes it.
        ScanKind::AdmixtureMin => NoiseSpec::admixture(p("p1"), p("p2"), &pole(true), &pole(false)),
        ScanKind::AdmixtureMax => NoiseSpec::admixture(p("p1"), p("p2"), &pole(true), &pole(true)),
        ScanKind::Admixture => {
            let (x, y) = admixed_states(params)?;
            NoiseSpec::admixture(p("p1"), p("p2"), &x, &y)
        }
        ScanKind::PauliSame => NoiseSpec::PauliFlip {
            i: p("i") as usize,
            j: p("i") as usize,
            p1: p("p1"),
            p2: p("p2"),
        },
        ScanKind::PauliDifferent => NoiseSpec::PauliFlip {
            i: p("i") as usize,
            j: p("j") as usize,
            p1: p("p1"),
            p2: p("p2"),
        },
        ScanKind::AmplitudeDamping => NoiseSpec::AmplitudeDamping {
            eps1: p("eps1"),
            eps2: p("eps2"),
        },
    })
}

/// Closed-form `v*` of a scan cell.
pub fn cell_closed_form(kind: ScanKind, params: &BTreeMap<String, f64>) -> Result<ThresholdResult> {
    let p = |k: &str| params[k];
    match kind {
        ScanKind::White => white_noise_threshold(p("p1"), p("p2")),
        ScanKind::AdmixtureMin => Ok(ThresholdResult::reciprocal(
            admixture_extremes(p("p1"), p("p2"))?.0,
            FormulaId::Admixture,
        )),
        ScanKind::AdmixtureMax => Ok(ThresholdResult::reciprocal(
            admixture_extremes(p("p1"), p("p2"))?.1,
            FormulaId::Admixture,
        )),
        ScanKind::Admixture => {
            let (x, y) = admixed_states(params)?;
            admixture_threshold(p("p1"), p("p2"), &x, &y)
        }
        ScanKind::PauliSame => pauli_threshold(p("i") as usize, p("i") as usize, p("p1"), p("p2")),
        ScanKind::PauliDifferent => pauli_threshold(p("i") as usize, p("j") as usize, p("p1"), p("p2")),
        ScanKind::AmplitudeDamping => amplitude_damping_threshold(p("eps1"), p("eps2")),
    }
}

fn cell_threshold(config: &ScanConfig, a1: f64, a2: f64) -> Result<ThresholdResult> {
    let params = config.params_at(a1, a2)?;
    match config.method {
        ScanMethod::ClosedForm => cell_closed_form(config.noise_kind, &params),
        ScanMethod::Numeric => numeric_threshold(&cell_noise(config.noise_kind, &params)?),
    }
}

/// Grid of detectable `v*` values with its axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub axis1_name: String,
    pub axis2_name: String,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// `cells[i][j]` at `(axis1[i], axis2[j])`; `None` when not detectable.
    pub cells: Vec<Vec<Option<f64>>>,
}

impl ScanGrid {
    pub fn is_detectable(&self, i: usize, j: usize) -> bool {
        self.cells[i][j].is_some()
    }

    pub fn detectable_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        let mut header = vec![format!("{}\\{}", self.axis1_name, self.axis2_name)];
        header.extend(self.axis2.iter().map(|v| format_sig(*v, CSV_DIGITS)));
        w.write_record(&header)?;
        for (a1, row) in self.axis1.iter().zip(&self.cells) {
            let mut record = vec![format_sig(*a1, CSV_DIGITS)];
            record.extend(row.iter().map(|c| c.map(|v| format_sig(v, CSV_DIGITS)).unwrap_or_default()));
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("CSV of ASCII numbers"))
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(text.as_bytes());
        let mut records = reader.records();
        let header = records.next().ok_or_else(|| Error::arg("empty CSV"))??;
        let corner = header.get(0).unwrap_or_default();
        let (n1, n2) = corner
            .split_once('\\')
            .ok_or_else(|| Error::arg(format!("header cell '{corner}' is not 'axis1\\axis2'")))?;
        let number = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::arg(format!("'{s}' is not a number")))
        };
        let axis2 = header.iter().skip(1).map(number).collect::<Result<Vec<_>>>()?;
        let mut axis1 = Vec::new();
        let mut cells = Vec::new();
        for record in records {
            let record = record?;
            if record.len() != axis2.len() + 1 {
                return Err(Error::arg(format!(
                    "row of {} fields under a header of {}",
                    record.len(),
                    axis2.len() + 1
                )));
            }
            axis1.push(number(&record[0])?);
            cells.push(
                record
                    .iter()
                    .skip(1)
                    .map(|c| if c.trim().is_empty() { Ok(None) } else { number(c).map(Some) })
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        Ok(Self {
            axis1_name: n1.to_string(),
            axis2_name: n2.to_string(),
            axis1,
            axis2,
            cells,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config: ScanConfig,
    pub version: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub grid: ScanGrid,
    pub provenance: Provenance,
}

/// Evaluate every cell of the sweep; rows are computed in parallel and
/// assembled in axis order.
pub fn run_scan(config: &ScanConfig) -> Result<ScanResult> {
    config.validate()?;
    let axis1 = config.axis1.values();
    let axis2 = config.axis2.values();
    let cells = axis1
        .par_iter()
        .map(|&a1| {
            axis2
                .iter()
                .map(|&a2| {
                    let r = cell_threshold(config, a1, a2)?;
                    Ok(r.detectable.then_some(r.v_star))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        grid: ScanGrid {
            axis1_name: config.axis1.name.clone(),
            axis2_name: config.axis2.name.clone(),
            axis1,
            axis2,
            cells,
        },
        provenance: Provenance {
            config: config.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
        },
    })
}

/// `white.csv` → `white.provenance.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("provenance.json")
}

/// Write the CSV grid and its provenance sidecar.
pub fn write_scan(result: &ScanResult, path: &Path) -> Result<PathBuf> {
    fs::write(path, result.grid.to_csv()?).map_err(|e| Error::io(path, e))?;
    let sidecar = sidecar_path(path);
    let json = serde_json::to_string_pretty(&result.provenance)?;
    fs::write(&sidecar, json + "\n").map_err(|e| Error::io(&sidecar, e))?;
    Ok(sidecar)
}

/// Points where detectability changes between neighbouring cells of a row,
/// located by bisecting `v* − 1` of the numerical threshold along axis 2.
pub fn boundary_points(config: &ScanConfig, grid: &ScanGrid, tol: f64) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (i, &a1) in grid.axis1.iter().enumerate() {
        for j in 0..grid.axis2.len() - 1 {
            if grid.is_detectable(i, j) == grid.is_detectable(i, j + 1) {
                continue;
            }
            let f = |a2: f64| {
                let noise = cell_noise(config.noise_kind, &config.params_at(a1, a2)?)?;
                let v = numeric_threshold(&noise)?.v_star;
                Ok(if v.is_finite() { v - 1.0 } else { 1.0 })
            };
            points.push((a1, bisect(f, grid.axis2[j], grid.axis2[j + 1], tol)?));
        }
    }
    Ok(points)
}

/// Shortest decimal rendering with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(format_sig(4.0 / 3.0, 12), "1.33333333333");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(0.25, 12), "0.25");
        assert_eq!(format_sig(0.999_999_999_999_9, 12), "1");
        assert_eq!(format_sig(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_sig(-2.5, 12), "-2.5");
        assert_eq!(format_sig(0.0, 12), "0");
    }

    #[test]
    fn white_scan_examples() {
        let result = run_scan(&ScanConfig::unit_square(ScanKind::White, 101)).unwrap();
        let g = &result.grid;
        assert!((g.cells[100][100].unwrap() - 1.0 / 3.0).abs() < 1e-15);
        for (i, p1) in g.axis1.iter().enumerate() {
            for (j, p2) in g.axis2.iter().enumerate() {
                if p1 * p2 < 1.0 / 3.0 - 1e-12 {
                    assert!(g.cells[i][j].is_none());
                }
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let result = run_scan(&ScanConfig::unit_square(ScanKind::AmplitudeDamping, 17)).unwrap();
        let text = result.grid.to_csv().unwrap();
        assert!(text.starts_with("eps1\\eps2,0,0.0625,"));
        assert!(!text.contains('\r'));
        let parsed = ScanGrid::from_csv(&text).unwrap();
        assert_eq!(parsed.to_csv().unwrap(), text);
        for (row, orig) in parsed.cells.iter().zip(&result.grid.cells) {
            for (a, b) in row.iter().zip(orig) {
                assert_eq!(a.is_some(), b.is_some());
                if let (Some(a), Some(b)) = (a, b) {
                    assert!((a - b).abs() <= 1e-11 * b.abs());
                }
            }
        }
    }

    #[test]
    fn config_errors_name_the_field() {
        let mut cfg = ScanConfig::unit_square(ScanKind::White, 5);
        cfg.axis1.name = "eps1".into();
        match cfg.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "axis1.name"),
            other => panic!("{other:?}"),
        }
        let mut cfg = ScanConfig::unit_square(ScanKind::White, 5);
        cfg.axis2.steps = 1;
        assert!(matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "axis2.steps"));
        let cfg = ScanConfig::unit_square(ScanKind::Admixture, 5);
        assert!(matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "fixed.x0"));
        let mut cfg = ScanConfig::unit_square(ScanKind::PauliDifferent, 5);
        cfg.fixed.insert("j".into(), 1.0);
        assert!(matches!(cfg.validate(), Err(Error::Config { field, .. }) if field == "fixed.j"));
    }

    #[test]
    fn config_json_schema() {
        let cfg = ScanConfig::from_json(
            r#"{"noise_kind":"pauli_same","axis1":{"name":"p1","min":0,"max":1,"steps":3},
                "axis2":{"name":"p2","min":0,"max":1,"steps":3},"fixed":{"i":2},"seed":4}"#,
        )
        .unwrap();
        assert_eq!(cfg.fixed["i"], 2.0);
        assert_eq!(cfg.seed, 4);
        assert!(ScanConfig::from_json(r#"{"noise_kind":"bogus"}"#).is_err());
    }

    #[test]
    fn numeric_scan_matches_closed_form() {
        for kind in [ScanKind::PauliDifferent, ScanKind::AdmixtureMin] {
            let mut cfg = ScanConfig::unit_square(kind, 5);
            let closed = run_scan(&cfg).unwrap();
            cfg.method = ScanMethod::Numeric;
            let numeric = run_scan(&cfg).unwrap();
            for (r1, r2) in closed.grid.cells.iter().zip(&numeric.grid.cells) {
                for (a, b) in r1.iter().zip(r2) {
                    match (a, b) {
                        (Some(a), Some(b)) => assert!((a - b).abs() < 1e-6),
                        (None, None) => {}
                        _ => panic!("{kind:?}: detectability differs"),
                    }
                }
            }
        }
    }
}
