//! Density matrices on `H_A ⊗ H_B` and the index bookkeeping around them.
//!
//! The composite basis index is `a * n_b + b` for local indices `a` of A and
//! `b` of B. The element `<a b| rho |a' b'>` therefore sits at
//! `(a * n_b + b, a' * n_b + b')`.

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

/// Validation tolerance used when none is given explicitly.
pub const DEFAULT_TOL: f64 = 1e-9;

/// One of the two subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    n_a: usize,
    n_b: usize,
}

impl BipartiteDims {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a < 2 || n_b < 2 {
            return Err(Error::InvalidDims(format!(
                "subsystem dimensions must be at least 2, got ({n_a}, {n_b})"
            )));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn n_a(&self) -> usize {
        self.n_a
    }

    pub fn n_b(&self) -> usize {
        self.n_b
    }

    pub fn total(&self) -> usize {
        self.n_a * self.n_b
    }

    pub fn side(&self, side: Subsystem) -> usize {
        match side {
            Subsystem::A => self.n_a,
            Subsystem::B => self.n_b,
        }
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        a * self.n_b + b
    }
}

/// Defects measured against the three density-matrix axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub hermiticity_defect: f64,
    pub trace: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
}

impl Diagnostics {
    pub fn of(m: &CMatrix) -> Self {
        let trace = m.trace();
        Self {
            hermiticity_defect: m.hermiticity_defect(),
            trace: trace.re,
            trace_defect: (trace - C64::new(1.0, 0.0)).norm(),
            min_eigenvalue: m.eigvalsh().first().copied().unwrap_or(f64::NAN),
        }
    }

    /// First violated axiom, checked in the order Hermiticity, trace, positivity.
    pub fn check(&self, tol: f64) -> Result<()> {
        if self.hermiticity_defect > tol {
            return Err(Error::NotHermitian {
                defect: self.hermiticity_defect,
                tol,
            });
        }
        if self.trace_defect > tol {
            return Err(Error::TraceNotOne {
                trace: self.trace,
                defect: self.trace_defect,
            });
        }
        if self.min_eigenvalue < -tol {
            return Err(Error::NotPSD {
                min_eigenvalue: self.min_eigenvalue,
            });
        }
        Ok(())
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix together with the
/// tolerance it was validated at.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: CMatrix,
    tol: f64,
}

/// Checks the density-matrix axioms and wraps the matrix on success.
pub fn validate_density(m: CMatrix, tol: f64) -> Result<DensityMatrix> {
    Diagnostics::of(&m).check(tol)?;
    Ok(DensityMatrix { m, tol })
}

impl DensityMatrix {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self> {
        validate_density(m, tol)
    }

    /// `I / n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            m: CMatrix::identity(dim).scale_real(1.0 / dim as f64),
            tol: DEFAULT_TOL,
        }
    }

    /// `|psi><psi|` for a normalized copy of `psi`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidShape("state vector has zero norm".into()));
        }
        let unit: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        validate_density(CMatrix::outer(&unit), DEFAULT_TOL)
    }

    /// Hermitizes, normalizes to unit trace, clamps eigenvalues in
    /// `[-tol, 0)` to zero and validates. Used for the outputs of every
    /// reduction in the crate.
    pub(crate) fn normalized(m: &CMatrix, tol: f64) -> Result<Self> {
        let h = m.hermitize();
        let t = h.trace().re;
        if !(t > tol) {
            return Err(Error::ZeroDenominator { value: t });
        }
        let mut h = h.scale_real(1.0 / t);
        let (vals, vecs) = h.eigh();
        let min = vals[0];
        if min < -tol {
            return Err(Error::NotPSDResult { min_eigenvalue: min });
        }
        if min < 0.0 {
            let clamped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
            let s: f64 = clamped.iter().sum();
            h = CMatrix::from_eigen(&clamped, &vecs).scale_real(1.0 / s);
        }
        validate_density(h, tol)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.m.eigvalsh()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.m * &self.m).trace().re
    }

    pub fn diagnostics(&self) -> Diagnostics {
        Diagnostics::of(&self.m)
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.dim(),
            });
        }
        let out = &(u * &self.m) * &u.adjoint();
        validate_density(out.hermitize(), self.tol)
    }
}

/// Density matrix on `H_A ⊗ H_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDensityMatrix {
    rho: DensityMatrix,
    dims: BipartiteDims,
}

impl BipartiteDensityMatrix {
    pub fn new(rho: DensityMatrix, dims: BipartiteDims) -> Result<Self> {
        if rho.dim() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: rho.dim(),
            });
        }
        Ok(Self { rho, dims })
    }

    pub fn from_matrix(m: CMatrix, dims: BipartiteDims, tol: f64) -> Result<Self> {
        if m.dim() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                found: m.dim(),
            });
        }
        Self::new(validate_density(m, tol)?, dims)
    }

    /// `rho_a ⊗ rho_b`.
    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<Self> {
        let dims = BipartiteDims::new(rho_a.dim(), rho_b.dim())?;
        let tol = rho_a.tol().max(rho_b.tol());
        Self::from_matrix(tensor_product(rho_a.matrix(), rho_b.matrix()), dims, tol)
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn matrix(&self) -> &CMatrix {
        self.rho.matrix()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn tol(&self) -> f64 {
        self.rho.tol()
    }

    /// Reduced state after tracing out `over`.
    pub fn partial_trace(&self, over: Subsystem) -> DensityMatrix {
        let m = partial_trace_matrix(self.matrix(), self.dims, over);
        DensityMatrix {
            m: m.hermitize(),
            tol: self.tol(),
        }
    }

    pub fn partial_transpose(&self, on: Subsystem) -> CMatrix {
        partial_transpose_matrix(self.matrix(), self.dims, on)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kron(b)
}

/// Partial trace of an arbitrary operator on `H_A ⊗ H_B`.
///
/// `over = B` gives `sum_b m[(a b), (a' b)]`, an `n_a × n_a` matrix.
pub fn partial_trace_matrix(m: &CMatrix, dims: BipartiteDims, over: Subsystem) -> CMatrix {
    let (na, nb) = (dims.n_a, dims.n_b);
    match over {
        Subsystem::B => {
            let mut out = CMatrix::zeros(na);
            for a in 0..na {
                for ap in 0..na {
                    out[(a, ap)] = (0..nb).map(|b| m[(a * nb + b, ap * nb + b)]).sum();
                }
            }
            out
        }
        Subsystem::A => {
            let mut out = CMatrix::zeros(nb);
            for b in 0..nb {
                for bp in 0..nb {
                    out[(b, bp)] = (0..na).map(|a| m[(a * nb + b, a * nb + bp)]).sum();
                }
            }
            out
        }
    }
}

/// Partial transpose: for `on = A`, `<a b|m|a' b'>` moves to `<a' b|·|a b'>`.
pub fn partial_transpose_matrix(m: &CMatrix, dims: BipartiteDims, on: Subsystem) -> CMatrix {
    let (na, nb) = (dims.n_a, dims.n_b);
    let mut out = CMatrix::zeros(m.dim());
    for a in 0..na {
        for b in 0..nb {
            for ap in 0..na {
                for bp in 0..nb {
                    let src = m[(a * nb + b, ap * nb + bp)];
                    let (row, col) = match on {
                        Subsystem::A => (ap * nb + b, a * nb + bp),
                        Subsystem::B => (a * nb + bp, ap * nb + b),
                    };
                    out[(row, col)] = src;
                }
            }
        }
    }
    out
}

/// Extends a local operator to the composite space: `op ⊗ I` or `I ⊗ op`.
pub fn embed_local(op: &CMatrix, side: Subsystem, dims: BipartiteDims) -> Result<CMatrix> {
    let expected = dims.side(side);
    if op.dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            found: op.dim(),
        });
    }
    Ok(match side {
        Subsystem::A => op.kron(&CMatrix::identity(dims.n_b)),
        Subsystem::B => CMatrix::identity(dims.n_a).kron(op),
    })
}

/// Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(CMatrix);

impl Projector {
    pub fn new(p: CMatrix, tol: f64) -> Result<Self> {
        let defect = p.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        let idem = (&p * &p).max_abs_diff(&p);
        if idem > tol {
            return Err(Error::NotProjector { defect: idem });
        }
        Ok(Self(p))
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        Self(CMatrix::basis_projector(dim, k))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

/// Hermitian operator. The stored matrix is the exact Hermitian part of the
/// input, so expectation values have no spurious imaginary component.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable(CMatrix);

impl Observable {
    pub fn new(o: CMatrix, tol: f64) -> Result<Self> {
        let defect = o.hermiticity_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(Self(o.hermitize()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}
