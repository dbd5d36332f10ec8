//! Measurement-model reductions of a bipartite state onto subsystem A.
//!
//! Subsystem B plays the pointer and is always measured in its stored
//! (computational) basis. To measure B in another basis, conjugate the state
//! by `I ⊗ U` first.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::state::{
    embed_local, partial_trace_matrix, BipartiteDensityMatrix, DensityMatrix, Projector,
    Subsystem,
};

/// Probabilities `p(beta)` over the basis outcomes of B.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidDistribution(format!("probability {p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Von Neumann reduction: the partial trace over the complement of `keep`.
pub fn neumann_reduce(rho: &BipartiteDensityMatrix, keep: Subsystem) -> DensityMatrix {
    rho.partial_trace(keep.other())
}

/// `P rho P / Tr(P rho P)` and the outcome probability.
pub fn projective_collapse(rho: &DensityMatrix, p: &Projector) -> Result<(DensityMatrix, f64)> {
    if p.matrix().dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: p.matrix().dim(),
        });
    }
    let pm = p.matrix();
    let unnorm = &(pm * rho.matrix()) * &pm.adjoint();
    let probability = unnorm.trace().re;
    if !(probability > rho.tol()) {
        return Err(Error::ZeroProbability { probability });
    }
    let state = DensityMatrix::normalized(&unnorm, rho.tol())?;
    Ok((state, probability))
}

/// `Sp_B(rho (I ⊗ |beta><beta|))`, unnormalized.
fn project_on_pointer(rho: &BipartiteDensityMatrix, beta: usize) -> Result<CMatrix> {
    let dims = rho.dims();
    if beta >= dims.n_b() {
        return Err(Error::InvalidConfig(format!(
            "outcome index {beta} out of range for n_b = {}",
            dims.n_b()
        )));
    }
    let p = embed_local(&CMatrix::basis_projector(dims.n_b(), beta), Subsystem::B, dims)?;
    Ok(partial_trace_matrix(&(rho.matrix() * &p), dims, Subsystem::B))
}

/// State of A conditioned on B being found in basis state `beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    pub state: DensityMatrix,
    pub probability: f64,
}

pub fn conditional_state(rho: &BipartiteDensityMatrix, beta: usize) -> Result<ConditionalState> {
    let unnorm = project_on_pointer(rho, beta)?;
    let probability = unnorm.trace().re;
    if !(probability > rho.tol()) {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(ConditionalState {
        state: DensityMatrix::normalized(&unnorm, rho.tol())?,
        probability,
    })
}

/// Replaces the joint state by `rho_A(beta) ⊗ |beta><beta|`.
pub fn zeno_disentangle(rho: &BipartiteDensityMatrix, beta: usize) -> Result<BipartiteDensityMatrix> {
    let cond = conditional_state(rho, beta)?;
    let pointer = DensityMatrix::new(CMatrix::basis_projector(rho.dims().n_b(), beta), rho.tol())?;
    BipartiteDensityMatrix::product(&cond.state, &pointer)
}

/// Statistical average of the outcome-conditioned A states with weights
/// `p(beta)`, normalized to unit trace.
pub fn averaged_projective_state(
    rho: &BipartiteDensityMatrix,
    probs: &OutcomeDistribution,
) -> Result<DensityMatrix> {
    let n_b = rho.dims().n_b();
    if probs.len() != n_b {
        return Err(Error::DimensionMismatch {
            expected: n_b,
            found: probs.len(),
        });
    }
    let mut acc = CMatrix::zeros(rho.dims().n_a());
    for (beta, &p) in probs.probs().iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        acc = &acc + &project_on_pointer(rho, beta)?.scale_real(p);
    }
    DensityMatrix::normalized(&acc, rho.tol())
}

/// Frobenius distance between the averaged projective state and the von
/// Neumann reduction. Zero for uniform weights on every state.
pub fn neumann_equivalence_gap(
    rho: &BipartiteDensityMatrix,
    probs: &OutcomeDistribution,
) -> Result<f64> {
    let averaged = averaged_projective_state(rho, probs)?;
    Ok(averaged
        .matrix()
        .frobenius_distance(neumann_reduce(rho, Subsystem::A).matrix()))
}
