//! On-disk formats: state files, report files and the JSON writer that
//! prints every real with 17 significant digits.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use qcorr::correlated::{DisentanglementReport, SolverSummary};
use qcorr::criteria::SeparabilityVerdict;
use qcorr::state::Diagnostics;
use qcorr::{BipartiteDensityMatrix, BipartiteDims, CMatrix, DensityMatrix, C64};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    m.rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Fails with a description when the nested arrays are not square.
pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix, String> {
    let n = rows.len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(format!("row {i} has {} entries, expected {n}", r.len()));
    }
    let data = rows
        .iter()
        .flat_map(|r| r.iter().map(|&[re, im]| C64::new(re, im)))
        .collect();
    CMatrix::from_vec(n, data).map_err(|e| e.to_string())
}

/// A density matrix on disk. `dims` is `[n_a, n_b]` for bipartite states
/// and `[n]` for single-subsystem states such as generated pointers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    pub rho: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<BTreeMap<String, String>>,
}

impl StateFile {
    pub fn bipartite(rho: &BipartiteDensityMatrix, meta: BTreeMap<String, String>) -> Self {
        let d = rho.dims();
        Self {
            dims: vec![d.n_a(), d.n_b()],
            rho: matrix_to_json(rho.matrix()),
            meta: Some(meta),
        }
    }

    pub fn local(rho: &DensityMatrix, meta: BTreeMap<String, String>) -> Self {
        Self {
            dims: vec![rho.dim()],
            rho: matrix_to_json(rho.matrix()),
            meta: Some(meta),
        }
    }

    /// Matrix with its shape checked against `dims`; no physical validation.
    pub fn matrix(&self) -> Result<CMatrix, String> {
        let m = matrix_from_json(&self.rho)?;
        let total: usize = self.dims.iter().product();
        if self.dims.is_empty() || self.dims.len() > 2 {
            return Err(format!("dims must have one or two entries, got {}", self.dims.len()));
        }
        if m.dim() != total {
            return Err(format!("rho is {0}x{0} but dims multiply to {total}", m.dim()));
        }
        Ok(m)
    }

    pub fn bipartite_dims(&self) -> Option<(usize, usize)> {
        match self.dims[..] {
            [a, b] => Some((a, b)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsJson {
    pub hermiticity_defect: f64,
    pub trace: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl From<Diagnostics> for DiagnosticsJson {
    fn from(d: Diagnostics) -> Self {
        Self {
            hermiticity_defect: d.hermiticity_defect,
            trace: d.trace,
            trace_defect: d.trace_defect,
            min_eigenvalue: d.min_eigenvalue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictJson {
    pub ppt_min_eig: f64,
    pub ppt_pass: bool,
    pub red_mode: String,
    pub red_min_eig_a: f64,
    pub red_min_eig_b: f64,
    pub red_pass: bool,
    pub entropy_ab: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub subadditivity_pass: bool,
    pub araki_lieb_pass: bool,
}

impl From<SeparabilityVerdict> for VerdictJson {
    fn from(v: SeparabilityVerdict) -> Self {
        Self {
            ppt_min_eig: v.ppt_min_eig,
            ppt_pass: v.ppt_pass,
            red_mode: v.red_mode.as_str().to_owned(),
            red_min_eig_a: v.red_min_eig_a,
            red_min_eig_b: v.red_min_eig_b,
            red_pass: v.red_pass,
            entropy_ab: v.entropy_ab,
            entropy_a: v.entropy_a,
            entropy_b: v.entropy_b,
            subadditivity_pass: v.subadditivity_pass,
            araki_lieb_pass: v.araki_lieb_pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedJson {
    pub rho_a: MatrixJson,
    pub rho_b: MatrixJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverJson {
    pub converged: bool,
    pub iterations: usize,
    pub residual_a: f64,
    pub residual_b: f64,
    pub final_step: f64,
    pub max_hermiticity_defect: f64,
    pub min_eig: f64,
    pub trace_len: usize,
}

impl SolverJson {
    pub fn new(s: &SolverSummary, converged: bool, trace_len: usize) -> Self {
        Self {
            converged,
            iterations: s.iterations,
            residual_a: s.residual_a,
            residual_b: s.residual_b,
            final_step: s.final_step,
            max_hermiticity_defect: s.max_hermiticity_defect,
            min_eig: s.min_eig,
            trace_len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisentanglementJson {
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_a: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_b: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frobenius_to_input: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_input: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_product: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_change: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverJson>,
}

impl DisentanglementJson {
    pub fn from_report(r: &DisentanglementReport, solver: Option<SolverJson>) -> Self {
        Self {
            method: r.method.to_owned(),
            error: None,
            factor_a: Some(matrix_to_json(r.factor_a.matrix())),
            factor_b: Some(matrix_to_json(r.factor_b.matrix())),
            frobenius_to_input: Some(r.frobenius_to_input),
            entropy_input: Some(r.entropy_input),
            entropy_product: Some(r.entropy_product),
            entropy_change: Some(r.entropy_change),
            solver,
        }
    }

    pub fn failed(method: &str, error: String) -> Self {
        Self {
            method: method.to_owned(),
            error: Some(error),
            factor_a: None,
            factor_b: None,
            frobenius_to_input: None,
            entropy_input: None,
            entropy_product: None,
            entropy_change: None,
            solver: None,
        }
    }
}

/// Output of `validate`, `analyze` and `disentangle` for one input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub command: String,
    /// Effective options after applying flags, environment and defaults.
    pub options: BTreeMap<String, serde_json::Value>,
    /// File name of the input, without its directory.
    pub source: String,
    /// SHA-256 of the input bytes; empty when the file could not be read.
    pub input_digest: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<DiagnosticsJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<ReducedJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disentanglement: Vec<DisentanglementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ReportFile {
    pub fn new(command: &str, options: BTreeMap<String, serde_json::Value>, source: String) -> Self {
        Self {
            command: command.to_owned(),
            options,
            source,
            input_digest: String::new(),
            exit_code: 0,
            error: None,
            dims: None,
            diagnostics: None,
            verdict: None,
            reduced: None,
            disentanglement: Vec::new(),
            warning: None,
        }
    }

    pub fn reduced_of(rho: &BipartiteDensityMatrix) -> ReducedJson {
        use qcorr::Subsystem;
        ReducedJson {
            rho_a: matrix_to_json(rho.partial_trace(Subsystem::B).matrix()),
            rho_b: matrix_to_json(rho.partial_trace(Subsystem::A).matrix()),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn dims_of(d: BipartiteDims) -> Vec<usize> {
    vec![d.n_a(), d.n_b()]
}

/// Pretty JSON where each `f64` is written as `d.dddddddddddddddde±x`.
pub struct SigDigits17 {
    inner: PrettyFormatter<'static>,
}

impl Default for SigDigits17 {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for SigDigits17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Serializes `value` with [`SigDigits17`], followed by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigits17::default());
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
