//! On-disk formats: the function JSON, the coefficient CSVs and their
//! summaries, and the real-side step-function JSON.
//!
//! Output is byte-deterministic: collections iterate in their canonical
//! orders and floats are printed with 17 significant digits.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use padic_wavelets::haar::{DyadicStepFn, HaarDecomposition, HaarIndex};
use padic_wavelets::padic::{Ball, PAdicRational};
use padic_wavelets::wavelets::{WaveletExpansion, WaveletIndex};
use padic_wavelets::PiecewiseConstant;

use crate::CliError;

/// 17 significant digits, fixed scientific form.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Schema(format!("bad {what}: {s:?}")))
}

// ---------------------------------------------------------------------
// function JSON

#[derive(Serialize, Deserialize)]
pub struct FunctionFile {
    pub prime: u64,
    pub pieces: Vec<PieceDto>,
}

#[derive(Serialize, Deserialize)]
pub struct PieceDto {
    pub center: String,
    pub radius_exp: i64,
    pub value: [f64; 2],
}

pub fn function_to_file(f: &PiecewiseConstant) -> FunctionFile {
    FunctionFile {
        prime: f.prime(),
        pieces: f
            .pieces()
            .iter()
            .map(|(b, v)| PieceDto {
                center: b.center().to_string(),
                radius_exp: b.radius_exp(),
                value: [v.re, v.im],
            })
            .collect(),
    }
}

pub fn function_from_file(file: &FunctionFile) -> Result<PiecewiseConstant, CliError> {
    if file.prime < 2 {
        return Err(CliError::Schema(format!(
            "prime must be >= 2, got {}",
            file.prime
        )));
    }
    let mut pieces = Vec::with_capacity(file.pieces.len());
    for dto in &file.pieces {
        let center = PAdicRational::parse(&dto.center, file.prime)
            .map_err(|e| CliError::Schema(format!("piece center {:?}: {e}", dto.center)))?;
        pieces.push((
            Ball::new(center, dto.radius_exp),
            Complex64::new(dto.value[0], dto.value[1]),
        ));
    }
    PiecewiseConstant::from_pieces(file.prime, pieces).map_err(|e| CliError::Schema(e.to_string()))
}

pub fn load_function(path: &Path) -> Result<PiecewiseConstant, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let file: FunctionFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    function_from_file(&file)
}

pub fn write_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

// ---------------------------------------------------------------------
// wavelet coefficient CSV + summary JSON

pub const COEFF_HEADER: &str = "gamma,j,n_num,n_den_exp,re,im";

#[derive(Serialize, Deserialize)]
pub struct SummaryFile {
    pub prime: u64,
    pub v: i64,
    pub m: i64,
    pub scaling: [f64; 2],
    pub norm_sq: f64,
    pub parseval_defect: f64,
    pub coefficients: usize,
}

pub fn expansion_to_csv(e: &WaveletExpansion) -> String {
    let mut out = String::from(COEFF_HEADER);
    out.push('\n');
    for (idx, c) in e.coeffs() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            idx.gamma(),
            idx.j(),
            idx.n().mantissa(),
            idx.n().exponent(),
            fmt_f64(c.re),
            fmt_f64(c.im)
        ));
    }
    out
}

pub fn expansion_from_csv(csv: &str, summary: &SummaryFile) -> Result<WaveletExpansion, CliError> {
    let mut lines = csv.lines();
    match lines.next() {
        Some(h) if h.trim() == COEFF_HEADER => {}
        other => {
            return Err(CliError::Schema(format!(
                "coefficient CSV must start with {COEFF_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut e = WaveletExpansion::new(summary.prime, summary.v);
    e.set_scaling_coeff(Complex64::new(summary.scaling[0], summary.scaling[1]));
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(CliError::Schema(format!(
                "coefficient row needs 6 fields: {line:?}"
            )));
        }
        let gamma: i64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad gamma in {line:?}")))?;
        let j: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad j in {line:?}")))?;
        let n_num: num_bigint::BigInt = fields[2]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad n_num in {line:?}")))?;
        let n_den_exp: u32 = fields[3]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad n_den_exp in {line:?}")))?;
        let re = parse_f64(fields[4], "re")?;
        let im = parse_f64(fields[5], "im")?;
        let n = PAdicRational::new(summary.prime, n_num, n_den_exp);
        let idx = WaveletIndex::new(gamma, j, n).map_err(|e| CliError::Schema(e.to_string()))?;
        e.insert(idx, Complex64::new(re, im))
            .map_err(CliError::from)?;
    }
    Ok(e)
}

pub fn load_summary(path: &Path) -> Result<SummaryFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------
// real-side step function JSON + Haar coefficient CSV

#[derive(Serialize, Deserialize)]
pub struct RealFile {
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub values: Vec<[f64; 2]>,
}

pub fn step_to_file(f: &DyadicStepFn) -> RealFile {
    RealFile {
        k: f.k_exp(),
        m: f.m_exp(),
        values: f.values().iter().map(|v| [v.re, v.im]).collect(),
    }
}

pub fn step_from_file(file: &RealFile) -> Result<DyadicStepFn, CliError> {
    let values = file
        .values
        .iter()
        .map(|v| Complex64::new(v[0], v[1]))
        .collect();
    DyadicStepFn::new(file.k, file.m, values).map_err(CliError::from)
}

pub fn load_step(path: &Path) -> Result<DyadicStepFn, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let file: RealFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    step_from_file(&file)
}

pub const HAAR_HEADER: &str = "gamma,n,re,im";

#[derive(Serialize, Deserialize)]
pub struct HaarSummaryFile {
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub scaling: [f64; 2],
}

pub fn haar_to_csv(d: &HaarDecomposition) -> String {
    let mut out = String::from(HAAR_HEADER);
    out.push('\n');
    for (idx, c) in &d.coeffs {
        out.push_str(&format!(
            "{},{},{},{}\n",
            idx.gamma,
            idx.n,
            fmt_f64(c.re),
            fmt_f64(c.im)
        ));
    }
    out
}

pub fn haar_from_csv(csv: &str, summary: &HaarSummaryFile) -> Result<HaarDecomposition, CliError> {
    let mut lines = csv.lines();
    match lines.next() {
        Some(h) if h.trim() == HAAR_HEADER => {}
        other => {
            return Err(CliError::Schema(format!(
                "Haar CSV must start with {HAAR_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut coeffs = BTreeMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(CliError::Schema(format!(
                "Haar row needs 4 fields: {line:?}"
            )));
        }
        let gamma: i64 = fields[0]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad gamma in {line:?}")))?;
        let n: u64 = fields[1]
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad n in {line:?}")))?;
        let re = parse_f64(fields[2], "re")?;
        let im = parse_f64(fields[3], "im")?;
        coeffs.insert(HaarIndex { gamma, n }, Complex64::new(re, im));
    }
    Ok(HaarDecomposition {
        k_exp: summary.k,
        m_exp: summary.m,
        scaling: Complex64::new(summary.scaling[0], summary.scaling[1]),
        coeffs,
    })
}

// ---------------------------------------------------------------------
// verify report JSON

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub all_passed: bool,
    pub properties: Vec<PropertyDto>,
}

#[derive(Serialize)]
pub struct PropertyDto {
    pub name: String,
    pub description: String,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub detail: String,
}

// ---------------------------------------------------------------------
// monna report JSON

#[derive(Serialize)]
pub struct MonnaReport {
    pub prime: u64,
    pub points: Vec<MonnaPointDto>,
    pub balls: Vec<MonnaBallDto>,
    pub sections: Vec<MonnaSectionDto>,
}

#[derive(Serialize)]
pub struct MonnaPointDto {
    pub input: String,
    pub rho: String,
}

#[derive(Serialize)]
pub struct MonnaBallDto {
    pub center: String,
    pub radius_exp: i64,
    pub interval_left: String,
    pub interval_length: String,
}

#[derive(Serialize)]
pub struct MonnaSectionDto {
    pub input: String,
    pub preimage: String,
}
