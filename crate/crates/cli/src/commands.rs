use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};

use qcorr::correlated::{
    disentangle, DisentanglementReport, Method, PointerState, SolverConfig, SolverSummary,
};
use qcorr::criteria::{analyze, ReductionMode};
use qcorr::gen::{generate, GenKind, GenSpec, Generated};
use qcorr::state::Diagnostics;
use qcorr::two_qubit::run_bench;
use qcorr::{BipartiteDensityMatrix, BipartiteDims, CMatrix, Error, C64};

use crate::args::{
    AnalyzeArgs, BenchArgs, Command, DisentangleArgs, GenerateArgs, KindArg, MethodArg,
    RedModeArg, ValidateArgs,
};
use crate::format::{
    dims_of, sha256_hex, to_json, DisentanglementJson, ReportFile, SolverJson, StateFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Everything a command prints, plus its exit status.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(command: &Command) -> Outcome {
    match command {
        Command::Validate(a) => run_files(&a.path, |p| validate_one(p, a)),
        Command::Analyze(a) => run_files(&a.path, |p| analyze_one(p, a)),
        Command::Disentangle(a) => run_files(&a.path, |p| disentangle_one(p, a)),
        Command::Generate(a) => cmd_generate(a),
        Command::BenchTwoQubit(a) => cmd_bench(a),
    }
}

fn exit_code_of(e: &Error) -> i32 {
    match e {
        Error::NonConvergence(_) => EXIT_NONCONVERGENCE,
        _ => EXIT_INVALID,
    }
}

/// Single file: one report. Directory: a JSON array of reports over the
/// `*.json` entries sorted by file name, exit code the worst item's.
fn run_files<F>(path: &Path, item: F) -> Outcome
where
    F: Fn(&Path) -> ReportFile + Sync,
{
    if !path.is_dir() {
        let report = item(path);
        return Outcome {
            stderr: error_line(&report),
            code: report.exit_code,
            stdout: to_json(&report),
        };
    }
    let mut files: Vec<PathBuf> = match fs::read_dir(path) {
        Ok(entries) => entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(e) => {
            return Outcome {
                stderr: format!("error: cannot read {}: {e}\n", path.display()),
                code: EXIT_IO,
                ..Outcome::default()
            }
        }
    };
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    let reports: Vec<ReportFile> = files.par_iter().map(|p| item(p)).collect();
    Outcome {
        stderr: reports.iter().map(error_line).collect(),
        code: reports.iter().map(|r| r.exit_code).max().unwrap_or(EXIT_OK),
        stdout: to_json(&reports),
    }
}

fn error_line(r: &ReportFile) -> String {
    let mut s = String::new();
    if let Some(w) = &r.warning {
        s.push_str(&format!("{}: warning: {w}\n", r.source));
    }
    if let Some(e) = &r.error {
        s.push_str(&format!("{}: error: {e}\n", r.source));
    }
    s
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads and parses the file, recording digest, dims and diagnostics in
/// the report. Returns the matrix and its split when the state is valid.
fn load_valid(path: &Path, tol: f64, report: &mut ReportFile) -> Option<(CMatrix, Vec<usize>)> {
    let fail = |report: &mut ReportFile, code, msg: String| {
        report.exit_code = code;
        report.error = Some(msg);
        None
    };
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return fail(report, EXIT_IO, format!("cannot read {}: {e}", path.display())),
    };
    report.input_digest = sha256_hex(&bytes);
    let file: StateFile = match serde_json::from_slice(&bytes) {
        Ok(f) => f,
        Err(e) => return fail(report, EXIT_IO, format!("ParseError: {e}")),
    };
    report.dims = Some(file.dims.clone());
    let m = match file.matrix() {
        Ok(m) => m,
        Err(e) => return fail(report, EXIT_INVALID, Error::InvalidShape(e).to_string()),
    };
    if let Some((a, b)) = file.bipartite_dims() {
        if let Err(e) = BipartiteDims::new(a, b) {
            return fail(report, EXIT_INVALID, e.to_string());
        }
    }
    let diag = Diagnostics::of(&m);
    report.diagnostics = Some(diag.into());
    if let Err(e) = diag.check(tol) {
        return fail(report, EXIT_INVALID, e.to_string());
    }
    Some((m, file.dims))
}

fn load_bipartite(path: &Path, tol: f64, report: &mut ReportFile) -> Option<BipartiteDensityMatrix> {
    let (m, dims) = load_valid(path, tol, report)?;
    let result = match dims[..] {
        [a, b] => BipartiteDims::new(a, b).and_then(|d| BipartiteDensityMatrix::from_matrix(m, d, tol)),
        _ => Err(Error::InvalidDims(format!(
            "command needs a bipartite state, file has dims {dims:?}"
        ))),
    };
    match result {
        Ok(rho) => Some(rho),
        Err(e) => {
            report.exit_code = EXIT_INVALID;
            report.error = Some(e.to_string());
            None
        }
    }
}

fn validate_one(path: &Path, args: &ValidateArgs) -> ReportFile {
    let options = BTreeMap::from([("tol".to_owned(), json!(args.tol))]);
    let mut report = ReportFile::new("validate", options, source_name(path));
    load_valid(path, args.tol, &mut report);
    report
}

fn analyze_one(path: &Path, args: &AnalyzeArgs) -> ReportFile {
    let mode = match args.red_mode {
        RedModeArg::Literal => ReductionMode::Literal,
        RedModeArg::Standard => ReductionMode::Standard,
    };
    let options = BTreeMap::from([
        ("red_mode".to_owned(), json!(mode.as_str())),
        ("tol".to_owned(), json!(args.tol)),
    ]);
    let mut report = ReportFile::new("analyze", options, source_name(path));
    let Some(rho) = load_bipartite(path, args.tol, &mut report) else {
        return report;
    };
    match analyze(&rho, mode, args.tol) {
        Ok(v) => {
            report.verdict = Some(v.into());
            report.reduced = Some(ReportFile::reduced_of(&rho));
        }
        Err(e) => {
            report.exit_code = exit_code_of(&e);
            report.error = Some(e.to_string());
        }
    }
    report
}

fn disentangle_options(args: &DisentangleArgs) -> BTreeMap<String, Value> {
    let names: Vec<&str> = args
        .method
        .iter()
        .map(|m| match m {
            MethodArg::Neumann => "neumann",
            MethodArg::Pointer => "pointer",
            MethodArg::Correlated => "correlated",
        })
        .collect();
    let mut o = BTreeMap::from([
        ("input_tol".to_owned(), json!(args.input_tol)),
        ("method".to_owned(), json!(names)),
        ("m".to_owned(), json!(args.m)),
    ]);
    if args.method.contains(&MethodArg::Pointer) {
        o.insert("p".into(), json!(args.p));
        o.insert("b_re".into(), json!(args.b_re));
        o.insert("b_im".into(), json!(args.b_im));
    }
    if args.method.contains(&MethodArg::Correlated) {
        o.insert("tol".into(), json!(args.tol));
        o.insert("max_iter".into(), json!(args.max_iter));
        o.insert("damping".into(), json!(args.damping));
    }
    o
}

fn method_of(arg: MethodArg, args: &DisentangleArgs, rho: &BipartiteDensityMatrix) -> qcorr::Result<Method> {
    Ok(match arg {
        MethodArg::Neumann => Method::Neumann,
        MethodArg::Pointer => {
            if rho.dims().n_b() != 2 {
                return Err(Error::InvalidConfig(format!(
                    "pointer method needs a qubit B, got n_b = {}",
                    rho.dims().n_b()
                )));
            }
            Method::Pointer {
                pointer: PointerState::coherent(args.p, C64::new(args.b_re, args.b_im))?,
                m: args.m,
            }
        }
        MethodArg::Correlated => Method::Correlated(SolverConfig {
            tol: args.tol,
            max_iter: args.max_iter,
            damping: args.damping,
            m_power: args.m,
            ..SolverConfig::default()
        }),
    })
}

fn disentangle_one(path: &Path, args: &DisentangleArgs) -> ReportFile {
    let mut report = ReportFile::new("disentangle", disentangle_options(args), source_name(path));
    let Some(rho) = load_bipartite(path, args.input_tol, &mut report) else {
        return report;
    };
    report.dims = Some(dims_of(rho.dims()));
    let mut errors = Vec::new();
    for &arg in &args.method {
        let method = match method_of(arg, args, &rho) {
            Ok(m) => m,
            Err(e) => {
                report.exit_code = report.exit_code.max(exit_code_of(&e));
                errors.push(e.to_string());
                let tag = format!("{arg:?}").to_lowercase();
                report.disentanglement.push(DisentanglementJson::failed(&tag, e.to_string()));
                continue;
            }
        };
        if let Method::Correlated(cfg) = &method {
            let d = rho.dims();
            if let Ok(Some(w)) = cfg.check(d.n_a(), d.n_b()) {
                report.warning = Some(w);
            }
        }
        let entry = match disentangle(&rho, &method) {
            Ok(r) => {
                let solver = r.solver.as_ref().map(|s| SolverJson::new(s, true, s.iterations));
                DisentanglementJson::from_report(&r, solver)
            }
            Err(Error::NonConvergence(nc)) => {
                let msg = Error::NonConvergence(nc.clone()).to_string();
                report.exit_code = report.exit_code.max(EXIT_NONCONVERGENCE);
                errors.push(msg.clone());
                let summary = SolverSummary::of(&nc.best);
                let trace_len = nc.best.trace_log.len();
                match DisentanglementReport::from_pair(&rho, nc.best) {
                    Ok(r) => {
                        let mut entry = DisentanglementJson::from_report(
                            &r,
                            Some(SolverJson::new(&summary, false, trace_len)),
                        );
                        entry.error = Some(msg);
                        entry
                    }
                    Err(e) => DisentanglementJson::failed(method.tag(), format!("{msg}; {e}")),
                }
            }
            Err(e) => {
                report.exit_code = report.exit_code.max(exit_code_of(&e));
                errors.push(e.to_string());
                DisentanglementJson::failed(method.tag(), e.to_string())
            }
        };
        report.disentanglement.push(entry);
    }
    if !errors.is_empty() {
        report.error = Some(errors.join("; "));
    }
    report
}

fn cmd_generate(args: &GenerateArgs) -> Outcome {
    let invalid = |msg: String| Outcome {
        stderr: format!("error: {msg}\n"),
        code: EXIT_INVALID,
        ..Outcome::default()
    };
    let dims = match BipartiteDims::new(args.n_a, args.n_b) {
        Ok(d) => d,
        Err(e) => return invalid(e.to_string()),
    };
    let mut meta = BTreeMap::from([
        ("kind".to_owned(), format!("{:?}", args.kind)),
        ("seed".to_owned(), args.seed.to_string()),
    ]);
    let pointer_p = || args.p.ok_or_else(|| Error::InvalidSpec("pointer kinds need --p".into()).to_string());
    let kind = match args.kind {
        KindArg::Bell => GenKind::Bell,
        KindArg::PureProduct => GenKind::PureProduct,
        KindArg::Separable => {
            meta.insert("k_terms".into(), args.k_terms.to_string());
            GenKind::SeparableMixture { k_terms: args.k_terms }
        }
        KindArg::MaximallyMixed => GenKind::MaximallyMixed,
        KindArg::Random => GenKind::Random,
        KindArg::NearPure => {
            meta.insert("max_mix".into(), args.max_mix.to_string());
            GenKind::NearPure { max_mix: args.max_mix }
        }
        KindArg::ThermalPointer => match pointer_p() {
            Ok(p) => {
                meta.insert("p".into(), p.to_string());
                GenKind::ThermalPointer { p }
            }
            Err(e) => return invalid(e),
        },
        KindArg::CoherentPointer => match pointer_p() {
            Ok(p) => {
                meta.insert("p".into(), p.to_string());
                meta.insert("b_re".into(), args.b_re.to_string());
                meta.insert("b_im".into(), args.b_im.to_string());
                GenKind::CoherentPointer { p, b: C64::new(args.b_re, args.b_im) }
            }
            Err(e) => return invalid(e),
        },
    };
    let file = match generate(&GenSpec { kind, dims, seed: args.seed }) {
        Ok(Generated::Bipartite(rho)) => StateFile::bipartite(&rho, meta),
        Ok(Generated::Local(rho)) => StateFile::local(&rho, meta),
        Err(e) => return invalid(e.to_string()),
    };
    let text = to_json(&file);
    match &args.out {
        None => Outcome {
            stdout: text,
            ..Outcome::default()
        },
        Some(out) => match fs::write(out, text) {
            Ok(()) => Outcome::default(),
            Err(e) => Outcome {
                stderr: format!("error: cannot write {}: {e}\n", out.display()),
                code: EXIT_IO,
                ..Outcome::default()
            },
        },
    }
}

fn cmd_bench(args: &BenchArgs) -> Outcome {
    let s = match run_bench(args.seed, args.cases) {
        Ok(s) => s,
        Err(e) => {
            return Outcome {
                stderr: format!("error: {e}\n"),
                code: EXIT_INVALID,
                ..Outcome::default()
            }
        }
    };
    let line = format!(
        "seed={} cases={} thermal_state={:.3e} thermal_product={:.3e} coherent_state={:.3e} \
         coherent_product={:.3e} neumann_pair={:.3e} | literal: thermal_product={:.3e} \
         coherent_product={:.3e} | {}\n",
        s.seed,
        s.cases,
        s.thermal_state,
        s.thermal_product,
        s.coherent_state,
        s.coherent_product,
        s.neumann_pair,
        s.thermal_product_literal,
        s.coherent_product_literal,
        if s.pass() { "PASS" } else { "FAIL" },
    );
    Outcome {
        stdout: line,
        code: if s.pass() { EXIT_OK } else { EXIT_INVALID },
        ..Outcome::default()
    }
}
