//! Separability criteria and entropy diagnostics.
//!
//! Every test here is a necessary condition for separability. A passing
//! PPT or reduction test never proves a state separable.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::{
    embed_local, BipartiteDensityMatrix, DensityMatrix, Observable, Subsystem,
};

/// Slack allowed in the entropy inequalities.
pub const ENTROPY_SLACK: f64 = 1e-9;

/// Von Neumann entropy `-Tr(rho ln rho)` in nats.
///
/// Eigenvalues in `[-tol, 0]` contribute zero; anything below `-tol` is an
/// error.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    entropy_of_spectrum(&rho.eigenvalues(), rho.tol())
}

fn entropy_of_spectrum(eigenvalues: &[f64], tol: f64) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -tol {
            return Err(Error::NotPSD { min_eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.ln();
        }
    }
    Ok(s)
}

/// Display helper: nats to bits.
pub fn nats_to_bits(s: f64) -> f64 {
    s / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PptResult {
    pub min_eig: f64,
    pub pass: bool,
}

/// Peres-Horodecki test on the partial transpose over A.
pub fn ppt_test(rho: &BipartiteDensityMatrix, tol: f64) -> PptResult {
    ppt_test_on(rho, Subsystem::A, tol)
}

/// PPT test with an explicit transposed side. Both sides give the same
/// spectrum, since `rho^{T_B} = (rho^{T_A})^T`.
pub fn ppt_test_on(rho: &BipartiteDensityMatrix, side: Subsystem, tol: f64) -> PptResult {
    let min_eig = rho.partial_transpose(side).eigvalsh()[0];
    PptResult {
        min_eig,
        pass: min_eig >= -tol,
    }
}

/// Which form of the reduction criterion to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReductionMode {
    /// `(1/N_A) I_A ⊗ rho_B - rho` and `rho_A ⊗ (1/N_B) I_B - rho`. A pure
    /// product state already violates this form.
    Literal,
    /// `I_A ⊗ rho_B - rho` and `rho_A ⊗ I_B - rho`.
    #[default]
    Standard,
}

impl ReductionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ReductionMode::Literal => "literal",
            ReductionMode::Standard => "standard",
        }
    }
}

impl std::str::FromStr for ReductionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(ReductionMode::Literal),
            "standard" => Ok(ReductionMode::Standard),
            other => Err(Error::InvalidConfig(format!("unknown reduction mode `{other}`"))),
        }
    }
}

/// `min_eig_a` belongs to the operator with the identity on A
/// (`I_A ⊗ rho_B - rho`), `min_eig_b` to the one with the identity on B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionResult {
    pub min_eig_a: f64,
    pub min_eig_b: f64,
    pub pass: bool,
}

pub fn reduction_criterion_test(
    rho: &BipartiteDensityMatrix,
    mode: ReductionMode,
    tol: f64,
) -> ReductionResult {
    let dims = rho.dims();
    let rho_a = rho.partial_trace(Subsystem::B);
    let rho_b = rho.partial_trace(Subsystem::A);
    let (wa, wb) = match mode {
        ReductionMode::Literal => (1.0 / dims.n_a() as f64, 1.0 / dims.n_b() as f64),
        ReductionMode::Standard => (1.0, 1.0),
    };
    let id_a = CMatrix::identity(dims.n_a()).scale_real(wa);
    let id_b = CMatrix::identity(dims.n_b()).scale_real(wb);
    let op_a = &id_a.kron(rho_b.matrix()) - rho.matrix();
    let op_b = &rho_a.matrix().kron(&id_b) - rho.matrix();
    let min_eig_a = op_a.eigvalsh()[0];
    let min_eig_b = op_b.eigvalsh()[0];
    ReductionResult {
        min_eig_a,
        min_eig_b,
        pass: min_eig_a >= -tol && min_eig_b >= -tol,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyCheck {
    pub s_ab: f64,
    pub s_a: f64,
    pub s_b: f64,
    /// `S_AB <= S_A + S_B`
    pub sub_pass: bool,
    /// `|S_A - S_B| <= S_AB`
    pub araki_pass: bool,
}

pub fn subadditivity_check(rho: &BipartiteDensityMatrix) -> Result<EntropyCheck> {
    let s_ab = von_neumann_entropy(rho.density())?;
    let s_a = von_neumann_entropy(&rho.partial_trace(Subsystem::B))?;
    let s_b = von_neumann_entropy(&rho.partial_trace(Subsystem::A))?;
    Ok(EntropyCheck {
        s_ab,
        s_a,
        s_b,
        sub_pass: s_ab <= s_a + s_b + ENTROPY_SLACK,
        araki_pass: (s_a - s_b).abs() <= s_ab + ENTROPY_SLACK,
    })
}

/// `Re Tr(rho W)`.
pub fn witness_expectation(rho: &BipartiteDensityMatrix, w: &Observable) -> Result<f64> {
    let n = rho.dims().total();
    if w.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.dim(),
        });
    }
    let value = trace_of_product(rho.matrix(), w.matrix());
    debug_assert!(value.im.abs() <= 1e-10, "imaginary expectation {}", value.im);
    Ok(value.re)
}

/// `Tr(x y)` without forming the product.
fn trace_of_product(x: &CMatrix, y: &CMatrix) -> num_complex::Complex64 {
    let n = x.dim();
    let mut t = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            t += x[(i, k)] * y[(k, i)];
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationGap {
    pub joint: f64,
    pub local_a: f64,
    pub local_b: f64,
    pub product_of_locals: f64,
    pub gap: f64,
}

/// `<A ⊗ B> - <A ⊗ I><I ⊗ B>`.
pub fn correlation_gap(
    rho: &BipartiteDensityMatrix,
    a: &Observable,
    b: &Observable,
) -> Result<CorrelationGap> {
    let dims = rho.dims();
    let a_full = embed_local(a.matrix(), Subsystem::A, dims)?;
    let b_full = embed_local(b.matrix(), Subsystem::B, dims)?;
    let joint = trace_of_product(rho.matrix(), &a.matrix().kron(b.matrix())).re;
    let local_a = trace_of_product(rho.matrix(), &a_full).re;
    let local_b = trace_of_product(rho.matrix(), &b_full).re;
    let product_of_locals = local_a * local_b;
    Ok(CorrelationGap {
        joint,
        local_a,
        local_b,
        product_of_locals,
        gap: joint - product_of_locals,
    })
}

/// All criteria bundled for one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub ppt_min_eig: f64,
    pub ppt_pass: bool,
    pub red_min_eig_a: f64,
    pub red_min_eig_b: f64,
    pub red_pass: bool,
    pub red_mode: ReductionMode,
    pub entropy_ab: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub subadditivity_pass: bool,
    pub araki_lieb_pass: bool,
}

pub fn analyze(
    rho: &BipartiteDensityMatrix,
    red_mode: ReductionMode,
    tol: f64,
) -> Result<SeparabilityVerdict> {
    let ppt = ppt_test(rho, tol);
    let red = reduction_criterion_test(rho, red_mode, tol);
    let ent = subadditivity_check(rho)?;
    Ok(SeparabilityVerdict {
        ppt_min_eig: ppt.min_eig,
        ppt_pass: ppt.pass,
        red_min_eig_a: red.min_eig_a,
        red_min_eig_b: red.min_eig_b,
        red_pass: red.pass,
        red_mode,
        entropy_ab: ent.s_ab,
        entropy_a: ent.s_a,
        entropy_b: ent.s_b,
        subadditivity_pass: ent.sub_pass,
        araki_lieb_pass: ent.araki_pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::state::{BipartiteDims, DEFAULT_TOL};

    fn bell() -> BipartiteDensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let psi = [C64::new(s, 0.0), z, z, C64::new(s, 0.0)];
        BipartiteDensityMatrix::new(
            DensityMatrix::pure(&psi).unwrap(),
            BipartiteDims::new(2, 2).unwrap(),
        )
        .unwrap()
    }

    fn mixed4() -> BipartiteDensityMatrix {
        BipartiteDensityMatrix::new(
            DensityMatrix::maximally_mixed(4),
            BipartiteDims::new(2, 2).unwrap(),
        )
        .unwrap()
    }

    fn up_up() -> BipartiteDensityMatrix {
        BipartiteDensityMatrix::from_matrix(
            CMatrix::basis_projector(4, 0),
            BipartiteDims::new(2, 2).unwrap(),
            DEFAULT_TOL,
        )
        .unwrap()
    }

    #[test]
    fn entropy_limits() {
        assert!(von_neumann_entropy(bell().density()).unwrap().abs() < 1e-12);
        for n in 2..=4 {
            let s = von_neumann_entropy(&DensityMatrix::maximally_mixed(n)).unwrap();
            assert!((s - (n as f64).ln()).abs() < 1e-12);
        }
        assert!((nats_to_bits(2f64.ln()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ppt_examples() {
        let r = ppt_test(&bell(), DEFAULT_TOL);
        assert!((r.min_eig + 0.5).abs() < 1e-12 && !r.pass);
        let r = ppt_test(&mixed4(), DEFAULT_TOL);
        assert!((r.min_eig - 0.25).abs() < 1e-12 && r.pass);
        let rb = ppt_test_on(&bell(), Subsystem::B, DEFAULT_TOL);
        assert!((rb.min_eig + 0.5).abs() < 1e-12);
    }

    #[test]
    fn reduction_examples() {
        for mode in [ReductionMode::Literal, ReductionMode::Standard] {
            let r = reduction_criterion_test(&mixed4(), mode, DEFAULT_TOL);
            // Literal mode on I/4 gives (1/2)(I/2) ⊗ ... - I/4 = 0.
            if mode == ReductionMode::Literal {
                assert!(r.min_eig_a.abs() < 1e-15 && r.min_eig_b.abs() < 1e-15);
            }
            assert!(r.pass);
        }
        let lit = reduction_criterion_test(&up_up(), ReductionMode::Literal, DEFAULT_TOL);
        assert!((lit.min_eig_a + 0.5).abs() < 1e-12);
        assert!(!lit.pass);
        let std = reduction_criterion_test(&up_up(), ReductionMode::Standard, DEFAULT_TOL);
        assert!(std.pass);
        let bell_std = reduction_criterion_test(&bell(), ReductionMode::Standard, DEFAULT_TOL);
        assert!((bell_std.min_eig_a + 0.5).abs() < 1e-12);
        assert!((bell_std.min_eig_b + 0.5).abs() < 1e-12);
        assert!(!bell_std.pass);
    }

    #[test]
    fn entropy_inequalities() {
        let e = subadditivity_check(&bell()).unwrap();
        assert!(e.s_ab.abs() < 1e-12);
        assert!((e.s_a - 2f64.ln()).abs() < 1e-12);
        assert!(e.sub_pass && e.araki_pass);
        let e = subadditivity_check(&mixed4()).unwrap();
        assert!((e.s_ab - 4f64.ln()).abs() < 1e-12);
        assert!((e.s_ab - e.s_a - e.s_b).abs() < 1e-12);
    }

    #[test]
    fn witness_and_gap_on_bell() {
        let b = bell();
        let w = &CMatrix::identity(4).scale_real(0.5) - b.matrix();
        let w = Observable::new(w, 1e-12).unwrap();
        assert!((witness_expectation(&b, &w).unwrap() + 0.5).abs() < 1e-12);
        let id = Observable::new(CMatrix::identity(4), 1e-12).unwrap();
        assert!((witness_expectation(&mixed4(), &id).unwrap() - 1.0).abs() < 1e-15);

        let z = Observable::new(CMatrix::from_diagonal(&[1.0, -1.0]), 1e-12).unwrap();
        let g = correlation_gap(&b, &z, &z).unwrap();
        assert!((g.joint - 1.0).abs() < 1e-12);
        assert!(g.local_a.abs() < 1e-12 && g.local_b.abs() < 1e-12);
        assert!((g.gap - 1.0).abs() < 1e-12);
        let g = correlation_gap(&mixed4(), &z, &z).unwrap();
        assert!(g.gap.abs() < 1e-15);
    }

    #[test]
    fn witness_dimension_checked() {
        let id = Observable::new(CMatrix::identity(3), 1e-12).unwrap();
        assert!(matches!(
            witness_expectation(&bell(), &id),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("literal".parse::<ReductionMode>().unwrap(), ReductionMode::Literal);
        assert_eq!(ReductionMode::default(), ReductionMode::Standard);
        assert!("nope".parse::<ReductionMode>().is_err());
    }
}
