//! Seeded state generators.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`. Complex
//! Gaussian entries are `x + i y` with `x, y` independent standard normals
//! (`rand_distr::StandardNormal`). Mixture weights are a uniform draw from
//! the simplex: i.i.d. `Exp(1)` variates divided by their sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::correlated::coherent_pointer_matrix;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::state::{BipartiteDensityMatrix, BipartiteDims, DensityMatrix, DEFAULT_TOL};

/// Number of product terms in a separable mixture when not specified.
pub const DEFAULT_K_TERMS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenKind {
    /// Maximally entangled `sum_i |i i> / sqrt(n)`; needs `n_a == n_b`.
    Bell,
    /// `|psi_A><psi_A| ⊗ |psi_B><psi_B|` with random pure factors.
    PureProduct,
    /// Convex combination of `k_terms` random pure products.
    SeparableMixture { k_terms: usize },
    MaximallyMixed,
    /// `G G^dagger / Tr(G G^dagger)` with complex Gaussian `G`.
    Random,
    /// `(1 - w) |psi><psi| + w sigma` with random pure `psi`, random full-rank
    /// `sigma` and `w` uniform in `[0, max_mix]`. Purity is at least
    /// `(1 - max_mix)^2`.
    NearPure { max_mix: f64 },
    /// Local qubit state `diag(p, 1 - p)`.
    ThermalPointer { p: f64 },
    /// Local qubit state `[[p, b], [b*, 1 - p]]`.
    CoherentPointer { p: f64, b: C64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub dims: BipartiteDims,
    pub seed: u64,
}

/// Output of [`generate`]: pointer kinds give a single-subsystem state.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Bipartite(BipartiteDensityMatrix),
    Local(DensityMatrix),
}

impl Generated {
    pub fn into_bipartite(self) -> Option<BipartiteDensityMatrix> {
        match self {
            Generated::Bipartite(b) => Some(b),
            Generated::Local(_) => None,
        }
    }
}

pub fn generate(spec: &GenSpec) -> Result<Generated> {
    let dims = spec.dims;
    let bip = |m: CMatrix| {
        BipartiteDensityMatrix::from_matrix(m, dims, DEFAULT_TOL).map(Generated::Bipartite)
    };
    match spec.kind {
        GenKind::Bell => Ok(Generated::Bipartite(bell_state(dims)?)),
        GenKind::PureProduct => Ok(Generated::Bipartite(pure_product(dims, spec.seed)?)),
        GenKind::SeparableMixture { k_terms } => {
            Ok(Generated::Bipartite(separable_mixture(dims, k_terms, spec.seed)?))
        }
        GenKind::MaximallyMixed => bip(CMatrix::identity(dims.total()).scale_real(1.0 / dims.total() as f64)),
        GenKind::Random => Ok(Generated::Bipartite(random_state(dims, spec.seed)?)),
        GenKind::NearPure { max_mix } => Ok(Generated::Bipartite(near_pure(dims, max_mix, spec.seed)?)),
        GenKind::ThermalPointer { p } => local_pointer(p, C64::new(0.0, 0.0)),
        GenKind::CoherentPointer { p, b } => local_pointer(p, b),
    }
}

fn local_pointer(p: f64, b: C64) -> Result<Generated> {
    let m = coherent_pointer_matrix(p, b).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    Ok(Generated::Local(DensityMatrix::new(m, DEFAULT_TOL)?))
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Normalized complex Gaussian vector.
pub fn random_pure_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

fn ginibre<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let data = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_vec(dim, data).expect("finite Gaussian entries")
}

fn normalized_gram(g: &CMatrix) -> CMatrix {
    let m = (g * &g.adjoint()).hermitize();
    let t = m.trace().re;
    m.scale_real(1.0 / t)
}

pub fn bell_state(dims: BipartiteDims) -> Result<BipartiteDensityMatrix> {
    if dims.n_a() != dims.n_b() {
        return Err(Error::InvalidSpec(format!(
            "maximally entangled state needs n_a == n_b, got ({}, {})",
            dims.n_a(),
            dims.n_b()
        )));
    }
    // Entries set directly so they are exactly 1/n rather than (1/sqrt(n))^2.
    let n = dims.n_a();
    let mut m = CMatrix::zeros(dims.total());
    for i in 0..n {
        for j in 0..n {
            m[(dims.index(i, i), dims.index(j, j))] = C64::new(1.0 / n as f64, 0.0);
        }
    }
    BipartiteDensityMatrix::from_matrix(m, dims, DEFAULT_TOL)
}

pub fn pure_product(dims: BipartiteDims, seed: u64) -> Result<BipartiteDensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = CMatrix::outer(&random_pure_vector(dims.n_a(), &mut rng));
    let b = CMatrix::outer(&random_pure_vector(dims.n_b(), &mut rng));
    BipartiteDensityMatrix::from_matrix(a.kron(&b).hermitize(), dims, DEFAULT_TOL)
}

pub fn separable_mixture(dims: BipartiteDims, k_terms: usize, seed: u64) -> Result<BipartiteDensityMatrix> {
    if k_terms == 0 {
        return Err(Error::InvalidSpec("k_terms must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..k_terms).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = raw.iter().sum();
    let mut acc = CMatrix::zeros(dims.total());
    for w in raw {
        let a = CMatrix::outer(&random_pure_vector(dims.n_a(), &mut rng));
        let b = CMatrix::outer(&random_pure_vector(dims.n_b(), &mut rng));
        acc = &acc + &a.kron(&b).scale_real(w / total);
    }
    BipartiteDensityMatrix::from_matrix(acc.hermitize(), dims, DEFAULT_TOL)
}

pub fn random_state(dims: BipartiteDims, seed: u64) -> Result<BipartiteDensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = normalized_gram(&ginibre(dims.total(), &mut rng));
    BipartiteDensityMatrix::from_matrix(m, dims, DEFAULT_TOL)
}

pub fn near_pure(dims: BipartiteDims, max_mix: f64, seed: u64) -> Result<BipartiteDensityMatrix> {
    if !(0.0..=1.0).contains(&max_mix) {
        return Err(Error::InvalidSpec(format!("max_mix = {max_mix} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = dims.total();
    let pure = CMatrix::outer(&random_pure_vector(n, &mut rng));
    let noise = normalized_gram(&ginibre(n, &mut rng));
    let w = max_mix * rng.random::<f64>();
    let m = &pure.scale_real(1.0 - w) + &noise.scale_real(w);
    BipartiteDensityMatrix::from_matrix(m.hermitize(), dims, DEFAULT_TOL)
}

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Gaussian
/// matrix.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ginibre(dim, &mut rng);
    let mut cols: Vec<Vec<C64>> = (0..dim).map(|j| (0..dim).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            for i in 0..dim {
                let sub = proj * cols[k][i];
                cols[j][i] -= sub;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    let mut u = CMatrix::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}
