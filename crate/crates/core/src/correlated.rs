//! Correlated disentanglement.
//!
//! A bipartite state is approximated by a product `rho_Ac ⊗ rho_Bc` whose
//! factors are coupled through
//!
//! ```text
//! rho_Ac = Sp_B(rho (I ⊗ rho_Bc^m)) / Sp(rho (I ⊗ rho_Bc^m))
//! rho_Bc = Sp_A(rho (rho_Ac^m ⊗ I)) / Sp(rho (rho_Ac^m ⊗ I))
//! ```
//!
//! Fixing one factor and evaluating the other recovers the familiar
//! reductions: a maximally mixed pointer gives the von Neumann reduced
//! state for every `m`, a diagonal pointer gives the averaged projective
//! state. [`fixed_point_solve`] fixes neither and iterates the pair to
//! self-consistency.

use crate::criteria::von_neumann_entropy;
use crate::error::{Error, NonConvergence, Result};
use crate::linalg::{CMatrix, C64};
use crate::reductions::neumann_reduce;
use crate::state::{BipartiteDensityMatrix, DensityMatrix, Subsystem, DEFAULT_TOL};

/// Assumed state of the subsystem that is not observed.
#[derive(Debug, Clone, PartialEq)]
pub struct PointerState {
    rho: DensityMatrix,
}

impl PointerState {
    pub fn new(rho: DensityMatrix) -> Self {
        Self { rho }
    }

    /// `I / n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(DensityMatrix::maximally_mixed(dim))
    }

    /// Qubit pointer `diag(p, 1 - p)`.
    pub fn thermal(p: f64) -> Result<Self> {
        Self::coherent(p, C64::new(0.0, 0.0))
    }

    /// Qubit pointer `[[p, b], [b*, 1 - p]]`; positivity needs
    /// `|b|^2 <= p (1 - p)`.
    pub fn coherent(p: f64, b: C64) -> Result<Self> {
        Ok(Self::new(DensityMatrix::new(coherent_pointer_matrix(p, b)?, DEFAULT_TOL)?))
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }
}

pub(crate) fn coherent_pointer_matrix(p: f64, b: C64) -> Result<CMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidPointer(format!("p = {p} outside [0, 1]")));
    }
    if b.norm_sqr() > p * (1.0 - p) + DEFAULT_TOL {
        return Err(Error::InvalidPointer(format!(
            "|b|^2 = {} exceeds p(1 - p) = {}",
            b.norm_sqr(),
            p * (1.0 - p)
        )));
    }
    CMatrix::from_rows(&[
        vec![C64::new(p, 0.0), b],
        vec![b.conj(), C64::new(1.0 - p, 0.0)],
    ])
}

/// Result of one evaluation of the coupled equation.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUpdate {
    pub state: DensityMatrix,
    /// `max |M - M^dagger|` of the raw partial trace before symmetrization.
    pub hermiticity_defect: f64,
    /// Smallest eigenvalue after symmetrization and normalization.
    pub min_eig: f64,
}

/// `Sp_other(rho · (I ⊗ sigma))` (or `(sigma ⊗ I)` when `side = B`),
/// contracted directly on the indices.
fn contract_with_pointer(rho: &BipartiteDensityMatrix, sigma: &CMatrix, side: Subsystem) -> CMatrix {
    let dims = rho.dims();
    let (na, nb) = (dims.n_a(), dims.n_b());
    let m = rho.matrix();
    match side {
        // out[a, a'] = sum_{b, b'} rho[(a b), (a' b')] sigma[b', b]
        Subsystem::A => {
            let mut out = CMatrix::zeros(na);
            for a in 0..na {
                for ap in 0..na {
                    let mut acc = C64::new(0.0, 0.0);
                    for b in 0..nb {
                        for bp in 0..nb {
                            acc += m[(a * nb + b, ap * nb + bp)] * sigma[(bp, b)];
                        }
                    }
                    out[(a, ap)] = acc;
                }
            }
            out
        }
        // out[b, b'] = sum_{a, a'} rho[(a b), (a' b')] sigma[a', a]
        Subsystem::B => {
            let mut out = CMatrix::zeros(nb);
            for b in 0..nb {
                for bp in 0..nb {
                    let mut acc = C64::new(0.0, 0.0);
                    for a in 0..na {
                        for ap in 0..na {
                            acc += m[(a * nb + b, ap * nb + bp)] * sigma[(ap, a)];
                        }
                    }
                    out[(b, bp)] = acc;
                }
            }
            out
        }
    }
}

/// Evaluates the coupled equation for the factor on `side`, given the
/// other factor `pointer`, with the pointer raised to the power `m`.
pub fn correlated_update(
    rho: &BipartiteDensityMatrix,
    pointer: &DensityMatrix,
    side: Subsystem,
    m: u32,
) -> Result<LocalUpdate> {
    let dims = rho.dims();
    let other = dims.side(side.other());
    if pointer.dim() != other {
        return Err(Error::DimensionMismatch {
            expected: other,
            found: pointer.dim(),
        });
    }
    if m == 0 {
        return Err(Error::InvalidConfig("power m must be positive".into()));
    }
    let sigma = pointer.matrix().powi(m);
    let raw = contract_with_pointer(rho, &sigma, side);
    let hermiticity_defect = raw.hermiticity_defect();
    let state = DensityMatrix::normalized(&raw, rho.tol())?;
    let min_eig = state.eigenvalues()[0];
    Ok(LocalUpdate {
        state,
        hermiticity_defect,
        min_eig,
    })
}

/// The correlated local state of `side` for a fixed assumed state of the
/// other subsystem.
pub fn correlated_local_state(
    rho: &BipartiteDensityMatrix,
    pointer: &PointerState,
    side: Subsystem,
    m: u32,
) -> Result<DensityMatrix> {
    correlated_update(rho, pointer.density(), side, m).map(|u| u.state)
}

/// Starting point of the iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    /// Both von Neumann reduced states.
    #[default]
    Neumann,
    Provided { rho_a: DensityMatrix, rho_b: DensityMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on the successive-iterate Frobenius change.
    pub tol: f64,
    pub max_iter: usize,
    /// Weight of the previous iterate in each update; 0 is plain iteration.
    pub damping: f64,
    pub m_power: u32,
    pub init: Init,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 10_000,
            damping: 0.0,
            m_power: 1,
            init: Init::Neumann,
        }
    }
}

impl SolverConfig {
    /// Rejects invalid settings. Returns a warning when `m_power` exceeds
    /// `min(n_a, n_b)^2 - 1`, past which powers are linearly dependent.
    pub fn check(&self, n_a: usize, n_b: usize) -> Result<Option<String>> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidConfig(format!(
                "damping must lie in [0, 1), got {}",
                self.damping
            )));
        }
        if self.m_power == 0 {
            return Err(Error::InvalidConfig("m_power must be positive".into()));
        }
        if let Init::Provided { rho_a, rho_b } = &self.init {
            if rho_a.dim() != n_a || rho_b.dim() != n_b {
                return Err(Error::DimensionMismatch {
                    expected: n_a * n_b,
                    found: rho_a.dim() * rho_b.dim(),
                });
            }
        }
        let n = n_a.min(n_b);
        let bound = (n * n - 1) as u32;
        Ok((self.m_power > bound).then(|| {
            format!("m_power {} exceeds min(n_a, n_b)^2 - 1 = {bound}", self.m_power)
        }))
    }
}

/// One row of the solver log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub step_a: f64,
    pub step_b: f64,
    /// Larger of the two raw hermiticity defects of this iteration.
    pub hermiticity_defect: f64,
    /// Smaller of the two factor minimum eigenvalues.
    pub min_eig: f64,
}

impl TraceRecord {
    pub fn step(&self) -> f64 {
        self.step_a.max(self.step_b)
    }
}

/// Self-consistent factor pair with its residuals and the iteration log.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedPair {
    pub rho_ac: DensityMatrix,
    pub rho_bc: DensityMatrix,
    pub residual_a: f64,
    pub residual_b: f64,
    pub iterations: usize,
    pub m_power: u32,
    pub trace_log: Vec<TraceRecord>,
}

/// Frobenius distances between each factor and the right-hand side of its
/// coupled equation evaluated at the other factor.
pub fn pair_residuals(
    rho: &BipartiteDensityMatrix,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    m: u32,
) -> Result<(f64, f64)> {
    let a_rhs = correlated_update(rho, rho_b, Subsystem::A, m)?.state;
    let b_rhs = correlated_update(rho, rho_a, Subsystem::B, m)?.state;
    Ok((
        rho_a.matrix().frobenius_distance(a_rhs.matrix()),
        rho_b.matrix().frobenius_distance(b_rhs.matrix()),
    ))
}

fn blend(new: LocalUpdate, prev: &DensityMatrix, damping: f64, tol: f64) -> Result<LocalUpdate> {
    if damping == 0.0 {
        return Ok(new);
    }
    let mixed = &new.state.matrix().scale_real(1.0 - damping) + &prev.matrix().scale_real(damping);
    Ok(LocalUpdate {
        state: DensityMatrix::normalized(&mixed, tol)?,
        ..new
    })
}

/// Sequential approximation of the coupled pair: `rho_A` is updated from
/// the current `rho_B`, then `rho_B` from the fresh `rho_A`. Stops once
/// both successive changes drop below `cfg.tol`.
pub fn fixed_point_solve(rho: &BipartiteDensityMatrix, cfg: &SolverConfig) -> Result<CorrelatedPair> {
    let dims = rho.dims();
    cfg.check(dims.n_a(), dims.n_b())?;
    let tol = rho.tol();
    let (mut a, mut b) = match &cfg.init {
        Init::Neumann => (neumann_reduce(rho, Subsystem::A), neumann_reduce(rho, Subsystem::B)),
        Init::Provided { rho_a, rho_b } => (rho_a.clone(), rho_b.clone()),
    };
    let m = cfg.m_power;
    let mut log = Vec::new();
    let mut best: Option<(f64, DensityMatrix, DensityMatrix, usize)> = None;

    for iteration in 1..=cfg.max_iter {
        let ua = blend(correlated_update(rho, &b, Subsystem::A, m)?, &a, cfg.damping, tol)?;
        let ub = blend(correlated_update(rho, &ua.state, Subsystem::B, m)?, &b, cfg.damping, tol)?;
        let record = TraceRecord {
            iteration,
            step_a: ua.state.matrix().frobenius_distance(a.matrix()),
            step_b: ub.state.matrix().frobenius_distance(b.matrix()),
            hermiticity_defect: ua.hermiticity_defect.max(ub.hermiticity_defect),
            min_eig: ua.min_eig.min(ub.min_eig),
        };
        log.push(record);
        a = ua.state;
        b = ub.state;

        if record.step_a < cfg.tol && record.step_b < cfg.tol {
            let (residual_a, residual_b) = pair_residuals(rho, &a, &b, m)?;
            return Ok(CorrelatedPair {
                rho_ac: a,
                rho_bc: b,
                residual_a,
                residual_b,
                iterations: iteration,
                m_power: m,
                trace_log: log,
            });
        }
        if best.as_ref().is_none_or(|(s, ..)| record.step() < *s) {
            best = Some((record.step(), a.clone(), b.clone(), iteration));
        }
    }

    let last_step = log.last().map_or(f64::NAN, TraceRecord::step);
    let (_, best_a, best_b, best_iter) = best.expect("max_iter is positive");
    let (residual_a, residual_b) = pair_residuals(rho, &best_a, &best_b, m)?;
    Err(Error::NonConvergence(Box::new(NonConvergence {
        iterations: cfg.max_iter,
        last_step,
        best: CorrelatedPair {
            rho_ac: best_a,
            rho_bc: best_b,
            residual_a,
            residual_b,
            iterations: best_iter,
            m_power: m,
            trace_log: log,
        },
    })))
}

/// `rho_Ac ⊗ rho_Bc`.
pub fn disentangled_product(pair: &CorrelatedPair) -> Result<BipartiteDensityMatrix> {
    BipartiteDensityMatrix::product(&pair.rho_ac, &pair.rho_bc)
}

/// Disentanglement algorithm to compare in a report.
#[derive(Debug, Clone, PartialEq)]
pub enum Method {
    /// `rho_AN ⊗ I/n_b`.
    Neumann,
    /// `rho_Ac(pointer) ⊗ pointer` with a fixed pointer on B.
    Pointer { pointer: PointerState, m: u32 },
    /// Self-consistent pair from [`fixed_point_solve`].
    Correlated(SolverConfig),
}

impl Method {
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Neumann => "neumann",
            Method::Pointer { .. } => "pointer",
            Method::Correlated(_) => "correlated",
        }
    }
}

/// Summary of one solver run attached to a correlated report.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverSummary {
    pub iterations: usize,
    pub residual_a: f64,
    pub residual_b: f64,
    pub final_step: f64,
    pub max_hermiticity_defect: f64,
    pub min_eig: f64,
}

impl SolverSummary {
    pub fn of(pair: &CorrelatedPair) -> Self {
        Self {
            iterations: pair.iterations,
            residual_a: pair.residual_a,
            residual_b: pair.residual_b,
            final_step: pair.trace_log.last().map_or(0.0, TraceRecord::step),
            max_hermiticity_defect: pair
                .trace_log
                .iter()
                .map(|r| r.hermiticity_defect)
                .fold(0.0, f64::max),
            min_eig: pair
                .trace_log
                .iter()
                .map(|r| r.min_eig)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisentanglementReport {
    pub method: &'static str,
    pub factor_a: DensityMatrix,
    pub factor_b: DensityMatrix,
    pub product: BipartiteDensityMatrix,
    pub frobenius_to_input: f64,
    pub entropy_input: f64,
    pub entropy_product: f64,
    pub entropy_change: f64,
    pub solver: Option<SolverSummary>,
}

impl DisentanglementReport {
    /// Report for a solver pair, e.g. the best iterate of a run that did not
    /// converge.
    pub fn from_pair(rho: &BipartiteDensityMatrix, pair: CorrelatedPair) -> Result<Self> {
        let summary = SolverSummary::of(&pair);
        Self::build(rho, "correlated", pair.rho_ac, pair.rho_bc, Some(summary))
    }

    fn build(
        rho: &BipartiteDensityMatrix,
        method: &'static str,
        factor_a: DensityMatrix,
        factor_b: DensityMatrix,
        solver: Option<SolverSummary>,
    ) -> Result<Self> {
        let product = BipartiteDensityMatrix::product(&factor_a, &factor_b)?;
        let entropy_input = von_neumann_entropy(rho.density())?;
        let entropy_product = von_neumann_entropy(product.density())?;
        Ok(Self {
            method,
            frobenius_to_input: product.matrix().frobenius_distance(rho.matrix()),
            entropy_input,
            entropy_product,
            entropy_change: entropy_product - entropy_input,
            factor_a,
            factor_b,
            product,
            solver,
        })
    }
}

/// Runs one disentanglement method.
pub fn disentangle(rho: &BipartiteDensityMatrix, method: &Method) -> Result<DisentanglementReport> {
    let n_b = rho.dims().n_b();
    match method {
        Method::Neumann => DisentanglementReport::build(
            rho,
            method.tag(),
            neumann_reduce(rho, Subsystem::A),
            DensityMatrix::maximally_mixed(n_b).with_tol(rho.tol()),
            None,
        ),
        Method::Pointer { pointer, m } => {
            let a = correlated_local_state(rho, pointer, Subsystem::A, *m)?;
            DisentanglementReport::build(rho, method.tag(), a, pointer.density().clone(), None)
        }
        Method::Correlated(cfg) => DisentanglementReport::from_pair(rho, fixed_point_solve(rho, cfg)?),
    }
}

/// Runs every method in order; a failing method yields its error in place
/// without stopping the others.
pub fn disentanglement_report(
    rho: &BipartiteDensityMatrix,
    methods: &[Method],
) -> Vec<Result<DisentanglementReport>> {
    methods.iter().map(|m| disentangle(rho, m)).collect()
}
