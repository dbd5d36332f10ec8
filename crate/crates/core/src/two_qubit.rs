//! Closed-form two-qubit reductions.
//!
//! Elements are addressed with the two-digit labels `rho(22, 21)` meaning
//! `<2_A 2_B| rho |2_A 1_B>`. Local bases are ordered `(|2>, |1>)`, so
//! label `22` is composite index 0, `21` is 1, `12` is 2 and `11` is 3,
//! which matches the generic `a * n_b + b` convention.
//!
//! The functions here expand the products entry by entry and serve as an
//! independent check on the generic reductions in [`crate::reductions`] and
//! [`crate::correlated`]. The `*_literal` variants keep two misprinted
//! entries of the commonly quoted tables so that [`run_bench`] can show
//! where they deviate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlated::{coherent_pointer_matrix, correlated_local_state, PointerState};
use crate::error::{Error, Result};
use crate::gen;
use crate::linalg::{CMatrix, C64};
use crate::reductions::{averaged_projective_state, neumann_reduce, OutcomeDistribution};
use crate::state::{
    tensor_product, BipartiteDensityMatrix, BipartiteDims, DensityMatrix, Subsystem,
};

/// 4×4 two-qubit matrix with label-based element access.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitLayout {
    m: CMatrix,
    tol: f64,
}

fn label_index(label: u8) -> usize {
    match label {
        22 => 0,
        21 => 1,
        12 => 2,
        11 => 3,
        other => panic!("invalid two-qubit label {other}"),
    }
}

impl TwoQubitLayout {
    pub fn from_state(rho: &BipartiteDensityMatrix) -> Result<Self> {
        let dims = rho.dims();
        if dims.n_a() != 2 || dims.n_b() != 2 {
            return Err(Error::InvalidDims(format!(
                "two-qubit layout needs dims (2, 2), got ({}, {})",
                dims.n_a(),
                dims.n_b()
            )));
        }
        Ok(Self {
            m: rho.matrix().clone(),
            tol: rho.tol(),
        })
    }

    /// `<row| rho |col>` by two-digit label.
    pub fn rho(&self, row: u8, col: u8) -> C64 {
        self.m[(label_index(row), label_index(col))]
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidPointer(format!("p = {p} outside [0, 1]")))
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn nonzero(value: C64, tol: f64) -> Result<C64> {
    if value.re > tol {
        Ok(value)
    } else {
        Err(Error::ZeroDenominator { value: value.re })
    }
}

/// Normalizer of the diagonal-pointer state.
pub fn thermal_denominator(r: &TwoQubitLayout, p: f64) -> C64 {
    let q = real(1.0 - p);
    let p = real(p);
    p * r.rho(22, 22) + q * r.rho(21, 21) + p * r.rho(12, 12) + q * r.rho(11, 11)
}

fn thermal_numerator(r: &TwoQubitLayout, p: f64) -> CMatrix {
    let q = real(1.0 - p);
    let p = real(p);
    let rows = [
        vec![
            p * r.rho(22, 22) + q * r.rho(21, 21),
            p * r.rho(22, 12) + q * r.rho(21, 11),
        ],
        vec![
            p * r.rho(12, 22) + q * r.rho(11, 21),
            p * r.rho(12, 12) + q * r.rho(11, 11),
        ],
    ];
    CMatrix::from_rows(&rows).expect("2x2")
}

/// Local state of qubit A for the pointer `diag(p, 1 - p)` on B.
pub fn thermal_pointer_state(r: &TwoQubitLayout, p: f64) -> Result<DensityMatrix> {
    check_p(p)?;
    let d = nonzero(thermal_denominator(r, p), r.tol)?;
    DensityMatrix::new(thermal_numerator(r, p).scale(d.inv()).hermitize(), r.tol)
}

/// Product `thermal_pointer_state ⊗ diag(p, 1 - p)` written out element by element.
pub fn thermal_pointer_product(r: &TwoQubitLayout, p: f64) -> Result<BipartiteDensityMatrix> {
    let m = thermal_product_matrix(r, p, false)?;
    BipartiteDensityMatrix::from_matrix(m.hermitize(), BipartiteDims::new(2, 2)?, r.tol)
}

/// As [`thermal_pointer_product`], with the (|11>, |21>) entry reading
/// `rho(21, 21)` in place of `rho(11, 21)`. Returned unvalidated because
/// the misprint breaks Hermiticity.
pub fn thermal_pointer_product_literal(r: &TwoQubitLayout, p: f64) -> Result<CMatrix> {
    thermal_product_matrix(r, p, true)
}

fn thermal_product_matrix(r: &TwoQubitLayout, p: f64, literal: bool) -> Result<CMatrix> {
    check_p(p)?;
    let d = nonzero(thermal_denominator(r, p), r.tol)?;
    let q = real(1.0 - p);
    let pq = real(p) * q;
    let pp = real(p * p);
    let qq = q * q;
    let z = real(0.0);
    let row11_col21 = if literal { r.rho(21, 21) } else { r.rho(11, 21) };
    let rows = [
        vec![
            pp * r.rho(22, 22) + pq * r.rho(21, 21),
            z,
            pp * r.rho(22, 12) + pq * r.rho(21, 11),
            z,
        ],
        vec![
            z,
            pq * r.rho(22, 22) + qq * r.rho(21, 21),
            z,
            pq * r.rho(22, 12) + qq * r.rho(21, 11),
        ],
        vec![
            pp * r.rho(12, 22) + pq * r.rho(11, 21),
            z,
            pp * r.rho(12, 12) + pq * r.rho(11, 11),
            z,
        ],
        vec![
            z,
            pq * r.rho(12, 22) + qq * row11_col21,
            z,
            pq * r.rho(12, 12) + qq * r.rho(11, 11),
        ],
    ];
    Ok(CMatrix::from_rows(&rows)?.scale(d.inv()))
}


/// Normalizer of the coherent-pointer state.
pub fn coherent_denominator(r: &TwoQubitLayout, p: f64, b: C64) -> C64 {
    let q = real(1.0 - p);
    let p = real(p);
    p * (r.rho(22, 22) + r.rho(12, 12))
        + q * (r.rho(21, 21) + r.rho(11, 11))
        + b * (r.rho(21, 22) + r.rho(11, 12))
        + b.conj() * (r.rho(22, 21) + r.rho(12, 11))
}

fn coherent_numerator(r: &TwoQubitLayout, p: f64, b: C64) -> CMatrix {
    let q = real(1.0 - p);
    let p = real(p);
    let bc = b.conj();
    let rows = [
        vec![
            p * r.rho(22, 22) + bc * r.rho(22, 21) + b * r.rho(21, 22) + q * r.rho(21, 21),
            p * r.rho(22, 12) + bc * r.rho(22, 11) + b * r.rho(21, 12) + q * r.rho(21, 11),
        ],
        vec![
            p * r.rho(12, 22) + bc * r.rho(12, 21) + b * r.rho(11, 22) + q * r.rho(11, 21),
            p * r.rho(12, 12) + bc * r.rho(12, 11) + b * r.rho(11, 12) + q * r.rho(11, 11),
        ],
    ];
    CMatrix::from_rows(&rows).expect("2x2")
}

fn check_pointer(p: f64, b: C64) -> Result<()> {
    check_p(p)?;
    coherent_pointer_matrix(p, b).map(|_| ())
}

/// Local state of qubit A for the coherent pointer `[[p, b], [b*, 1 - p]]`.
pub fn coherent_pointer_state(r: &TwoQubitLayout, p: f64, b: C64) -> Result<DensityMatrix> {
    check_pointer(p, b)?;
    let d = nonzero(coherent_denominator(r, p, b), r.tol)?;
    DensityMatrix::new(coherent_numerator(r, p, b).scale(d.inv()).hermitize(), r.tol)
}

/// Product `coherent_pointer_state ⊗ pointer` written out element by element.
pub fn coherent_pointer_product(r: &TwoQubitLayout, p: f64, b: C64) -> Result<BipartiteDensityMatrix> {
    let m = coherent_product_matrix(r, p, b, false)?;
    BipartiteDensityMatrix::from_matrix(m.hermitize(), BipartiteDims::new(2, 2)?, r.tol)
}

/// As [`coherent_pointer_product`], with the (|12>, |11>) entry carrying
/// `b^2 rho(11, 22)` in place of `b^2 rho(11, 12)`. Returned unvalidated
/// because the misprint breaks Hermiticity.
pub fn coherent_pointer_product_literal(r: &TwoQubitLayout, p: f64, b: C64) -> Result<CMatrix> {
    coherent_product_matrix(r, p, b, true)
}

fn coherent_product_matrix(r: &TwoQubitLayout, p: f64, b: C64, literal: bool) -> Result<CMatrix> {
    check_pointer(p, b)?;
    let d = nonzero(coherent_denominator(r, p, b), r.tol)?;
    let q = real(1.0 - p);
    let pr = real(p);
    let pp = real(p * p);
    let pq = pr * q;
    let qq = q * q;
    let bc = b.conj();
    let bb = b * b;
    let bcbc = bc * bc;
    let b2 = real(b.norm_sqr());
    let e = |x, y| r.rho(x, y);
    let row12_col11_last = if literal { e(11, 22) } else { e(11, 12) };

    let rows = [
        // <22|
        vec![
            pp * e(22, 22) + pq * e(21, 21) + pr * bc * e(22, 21) + pr * b * e(21, 22),
            pr * b * e(22, 22) + q * b * e(21, 21) + b2 * e(22, 21) + bb * e(21, 22),
            pp * e(22, 12) + pq * e(21, 11) + pr * bc * e(22, 11) + pr * b * e(21, 12),
            pr * b * e(22, 12) + q * b * e(21, 11) + b2 * e(22, 11) + bb * e(21, 12),
        ],
        // <21|
        vec![
            pr * bc * e(22, 22) + q * bc * e(21, 21) + bcbc * e(22, 21) + b2 * e(21, 22),
            pq * e(22, 22) + qq * e(21, 21) + q * bc * e(22, 21) + q * b * e(21, 22),
            pr * bc * e(22, 12) + q * bc * e(21, 11) + bcbc * e(22, 11) + b2 * e(21, 12),
            pq * e(22, 12) + qq * e(21, 11) + q * bc * e(22, 11) + q * b * e(21, 12),
        ],
        // <12|
        vec![
            pp * e(12, 22) + pq * e(11, 21) + pr * bc * e(12, 21) + pr * b * e(11, 22),
            pr * b * e(12, 22) + q * b * e(11, 21) + b2 * e(12, 21) + bb * e(11, 22),
            pp * e(12, 12) + pq * e(11, 11) + pr * bc * e(12, 11) + pr * b * e(11, 12),
            pr * b * e(12, 12) + q * b * e(11, 11) + b2 * e(12, 11) + bb * row12_col11_last,
        ],
        // <11|
        vec![
            pr * bc * e(12, 22) + q * bc * e(11, 21) + bcbc * e(12, 21) + b2 * e(11, 22),
            pq * e(12, 22) + qq * e(11, 21) + q * bc * e(12, 21) + q * b * e(11, 22),
            pr * bc * e(12, 12) + q * bc * e(11, 11) + bcbc * e(12, 11) + b2 * e(11, 12),
            pq * e(12, 12) + qq * e(11, 11) + q * bc * e(12, 11) + q * b * e(11, 12),
        ],
    ];
    Ok(CMatrix::from_rows(&rows)?.scale(d.inv()))
}

/// Maximum element-wise deviations between each closed form and its
/// generic counterpart over a batch of seeded cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchSummary {
    pub seed: u64,
    pub cases: usize,
    /// Diagonal-pointer local state vs the averaged projective state.
    pub thermal_state: f64,
    /// Diagonal-pointer product vs the tensor composition.
    pub thermal_product: f64,
    /// Coherent-pointer local state vs the generic correlated update.
    pub coherent_state: f64,
    /// Coherent-pointer product vs the tensor composition.
    pub coherent_product: f64,
    /// `p = 1/2, b = 0` factors vs the von Neumann pair.
    pub neumann_pair: f64,
    pub thermal_product_literal: f64,
    pub coherent_product_literal: f64,
}

/// Threshold every non-literal column of the bench must meet.
pub const BENCH_TOLERANCE: f64 = 1e-12;

impl BenchSummary {
    pub fn pass(&self) -> bool {
        [self.thermal_state, self.thermal_product, self.coherent_state, self.coherent_product, self.neumann_pair]
            .iter()
            .all(|&d| d <= BENCH_TOLERANCE)
    }
}

/// Draws `(p, b)` with `|b|^2 <= p (1 - p)`.
pub fn random_pointer_params<R: Rng>(rng: &mut R) -> (f64, C64) {
    let p: f64 = rng.random_range(0.05..0.95);
    let radius = (p * (1.0 - p)).sqrt() * rng.random::<f64>();
    let phase = rng.random_range(0.0..std::f64::consts::TAU);
    (p, C64::from_polar(radius, phase))
}

/// Compares every closed form against the generic operations over `cases`
/// seeded random two-qubit states.
pub fn run_bench(seed: u64, cases: usize) -> Result<BenchSummary> {
    if cases == 0 {
        return Err(Error::InvalidConfig("cases must be at least 1".into()));
    }
    let dims = BipartiteDims::new(2, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = BenchSummary {
        seed,
        cases,
        thermal_state: 0.0,
        thermal_product: 0.0,
        coherent_state: 0.0,
        coherent_product: 0.0,
        neumann_pair: 0.0,
        thermal_product_literal: 0.0,
        coherent_product_literal: 0.0,
    };
    for _ in 0..cases {
        let rho = gen::random_state(dims, rng.random())?;
        let layout = TwoQubitLayout::from_state(&rho)?;
        let (p, b) = random_pointer_params(&mut rng);

        let thermal = PointerState::thermal(p)?;
        let thermal_a = thermal_pointer_state(&layout, p)?;
        let averaged = averaged_projective_state(&rho, &OutcomeDistribution::new(vec![p, 1.0 - p])?)?;
        s.thermal_state = s.thermal_state.max(thermal_a.matrix().max_abs_diff(averaged.matrix()));

        let composed_thermal = tensor_product(thermal_a.matrix(), thermal.density().matrix());
        s.thermal_product = s.thermal_product.max(thermal_pointer_product(&layout, p)?.matrix().max_abs_diff(&composed_thermal));
        s.thermal_product_literal = s
            .thermal_product_literal
            .max(thermal_pointer_product_literal(&layout, p)?.max_abs_diff(&composed_thermal));

        let coherent = PointerState::coherent(p, b)?;
        let coherent_a = coherent_pointer_state(&layout, p, b)?;
        let generic = correlated_local_state(&rho, &coherent, Subsystem::A, 1)?;
        s.coherent_state = s.coherent_state.max(coherent_a.matrix().max_abs_diff(generic.matrix()));

        let composed_coherent = tensor_product(coherent_a.matrix(), coherent.density().matrix());
        s.coherent_product = s.coherent_product.max(coherent_pointer_product(&layout, p, b)?.matrix().max_abs_diff(&composed_coherent));
        s.coherent_product_literal = s
            .coherent_product_literal
            .max(coherent_pointer_product_literal(&layout, p, b)?.max_abs_diff(&composed_coherent));

        let half = coherent_pointer_state(&layout, 0.5, C64::new(0.0, 0.0))?;
        s.neumann_pair = s
            .neumann_pair
            .max(half.matrix().max_abs_diff(neumann_reduce(&rho, Subsystem::A).matrix()));
    }
    Ok(s)
}
