//! Shared data model: block-structured vectors, traveling-wave parameters,
//! two-body configuration, and the wave argument w = v·r̃ − μt + c.
//!
//! A field value lives in ℝ^(pq), stored as q blocks of dimension p; the
//! spatial coordinate r̃ lives in ℝ^(ℓm), stored as m blocks of dimension ℓ.
//! The two block layouts are independent of each other: the wave argument
//! machinery works for any (ℓ, m), while the solution constructors in
//! [`crate::solutions`] fix p = 3 and q ∈ {1, 2}.
//!
//! All types are immutable after construction and all operations are pure,
//! so values can be shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of ℝ^(pq) stored flat in block-major order: block j occupies
/// `data[j*p .. (j+1)*p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackedVector {
    data: Vec<f64>,
    p: usize,
    q: usize,
}

impl StackedVector {
    /// Builds from a flat slice with explicit block shape.
    ///
    /// Rejects `p·q ≠ data.len()`, zero dimensions, and non-finite entries.
    pub fn new(data: Vec<f64>, p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(
                "block dimensions p, q must be positive".into(),
            ));
        }
        if data.len() != p * q {
            return Err(Error::DimensionMismatch {
                expected: p * q,
                actual: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(
                "stacked vector components must be finite".into(),
            ));
        }
        Ok(Self { data, p, q })
    }

    /// Builds from equally sized blocks.
    pub fn from_blocks(blocks: &[Vec<f64>]) -> Result<Self> {
        let q = blocks.len();
        let p = blocks.first().map(Vec::len).unwrap_or(0);
        if blocks.iter().any(|b| b.len() != p) {
            return Err(Error::InvalidParameter(
                "all blocks must have equal dimension".into(),
            ));
        }
        Self::new(blocks.concat(), p, q)
    }

    /// Internal constructor for values produced by our own arithmetic.
    pub(crate) fn from_raw(data: Vec<f64>, p: usize, q: usize) -> Self {
        debug_assert_eq!(data.len(), p * q);
        Self { data, p, q }
    }

    pub fn block_dim(&self) -> usize {
        self.p
    }

    pub fn block_count(&self) -> usize {
        self.q
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Block j (0-based), a slice of length p.
    pub fn block(&self, j: usize) -> &[f64] {
        &self.data[j * self.p..(j + 1) * self.p]
    }

    /// The flat component list; inverse of [`StackedVector::new`] with the
    /// same (p, q).
    pub fn flatten(&self) -> &[f64] {
        &self.data
    }

    pub fn iter_blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    /// Euclidean norm of the flat vector.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Traveling-wave data: the wave argument is w = v·r̃ − μt + c and the
/// diagonal coupling matrix has entries `lambda_sq` (all > 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    mu: f64,
    c: f64,
    v: StackedVector,
    lambda_sq: Vec<f64>,
}

impl WaveParams {
    /// General constructor: `v` is the direction covector in ℝ^(ℓm), and
    /// `lambda_sq` is the full diagonal of the coupling matrix (pq entries).
    pub fn new(mu: f64, c: f64, v: StackedVector, lambda_sq: Vec<f64>) -> Result<Self> {
        if mu == 0.0 || !mu.is_finite() {
            return Err(Error::InvalidParameter("μ must be finite and nonzero".into()));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParameter("offset c must be finite".into()));
        }
        if lambda_sq.is_empty() || lambda_sq.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(Error::InvalidParameter(
                "every diagonal entry λ² must be finite and > 0".into(),
            ));
        }
        Ok(Self { mu, c, v, lambda_sq })
    }

    /// Block-constant diagonal: one λⱼ² per block of dimension `block_dim`.
    pub fn block_constant(
        mu: f64,
        c: f64,
        v: StackedVector,
        block_lambda_sq: &[f64],
        block_dim: usize,
    ) -> Result<Self> {
        let mut diag = Vec::with_capacity(block_lambda_sq.len() * block_dim);
        for &l in block_lambda_sq {
            diag.extend(std::iter::repeat(l).take(block_dim));
        }
        Self::new(mu, c, v, diag)
    }

    /// Single-block layout (p = 3, q = 1) with v ∈ ℝ³: the layout of the
    /// relative two-body equation.
    pub fn relative(mu: f64, c: f64, v: [f64; 3], lambda12_sq: f64) -> Result<Self> {
        let v = StackedVector::new(v.to_vec(), 3, 1)?;
        Self::block_constant(mu, c, v, &[lambda12_sq], 3)
    }

    /// Two-block layout (p = 3, q = 2) with v ∈ ℝ³: the layout of the
    /// coupled two-body pair.
    pub fn pair(mu: f64, c: f64, v: [f64; 3], lambda1_sq: f64, lambda2_sq: f64) -> Result<Self> {
        let v = StackedVector::new(v.to_vec(), 3, 1)?;
        Self::block_constant(mu, c, v, &[lambda1_sq, lambda2_sq], 3)
    }

    /// The Newtonian specialization v = 0, μ = −1, c = 0, for which the
    /// wave argument reduces to w = t and the reduced equations coincide
    /// with Newton's two-body equations. `blocks` is 1 for the relative
    /// system and 2 for the pair.
    pub fn newtonian(blocks: usize) -> Self {
        let v = StackedVector::from_raw(vec![0.0; 3], 3, 1);
        Self::block_constant(-1.0, 0.0, v, &vec![1.0; blocks], 3)
            .expect("fixed Newtonian parameters are valid")
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn v(&self) -> &StackedVector {
        &self.v
    }

    /// ‖v‖² as a left-to-right sum over the flat components.
    pub fn v_norm_sq(&self) -> f64 {
        self.v.flatten().iter().map(|x| x * x).sum()
    }

    pub fn v_norm(&self) -> f64 {
        self.v_norm_sq().sqrt()
    }

    /// Full diagonal of the coupling matrix.
    pub fn lambda_sq(&self) -> &[f64] {
        &self.lambda_sq
    }

    /// Splits the diagonal into `blocks` chunks and returns the per-block
    /// constants λⱼ². Fails if the diagonal length is not divisible or a
    /// chunk is not constant.
    pub fn block_lambda_sq(&self, blocks: usize) -> Result<Vec<f64>> {
        if blocks == 0 || self.lambda_sq.len() % blocks != 0 {
            return Err(Error::DimensionMismatch {
                expected: blocks,
                actual: self.lambda_sq.len(),
            });
        }
        let p = self.lambda_sq.len() / blocks;
        let mut out = Vec::with_capacity(blocks);
        for chunk in self.lambda_sq.chunks_exact(p) {
            if chunk.iter().any(|&l| l != chunk[0]) {
                return Err(Error::InvalidParameter(
                    "λ² diagonal is not constant within a block".into(),
                ));
            }
            out.push(chunk[0]);
        }
        Ok(out)
    }

    /// μ² − λⱼ²‖v‖², the wave-operator factor of block j under the
    /// traveling-wave reduction.
    pub fn wave_factor(&self, block_lambda_sq: f64) -> f64 {
        self.mu * self.mu - block_lambda_sq * self.v_norm_sq()
    }
}

/// Gravitational constant and the two point masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyConfig {
    g: f64,
    m1: f64,
    m2: f64,
}

impl BodyConfig {
    pub fn new(g: f64, m1: f64, m2: f64) -> Result<Self> {
        for (name, x) in [("G", g), ("m1", m1), ("m2", m2)] {
            if !(x > 0.0) || !x.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0 (got {x})"
                )));
            }
        }
        Ok(Self { g, m1, m2 })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    pub fn total_mass(&self) -> f64 {
        self.m1 + self.m2
    }

    /// G·(m₁+m₂), the coefficient of the relative equation.
    pub fn gm_total(&self) -> f64 {
        self.g * self.total_mass()
    }
}

/// w = v·r̃ − μt + c, with the dot product accumulated left to right over
/// the flat components so repeated runs are bit-identical.
pub fn compute_wave_argument(params: &WaveParams, r_tilde: &[f64], t: f64) -> Result<f64> {
    let v = params.v().flatten();
    if r_tilde.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            actual: r_tilde.len(),
        });
    }
    let mut dot = 0.0;
    for (vi, xi) in v.iter().zip(r_tilde) {
        dot += vi * xi;
    }
    Ok(dot - params.mu() * t + params.c())
}

/// Space-time gradient of the wave argument: ∂w/∂x̃ = v and ∂w/∂t = −μ,
/// constant in (r̃, t).
pub fn wave_argument_gradient(params: &WaveParams) -> (Vec<f64>, f64) {
    (params.v().flatten().to_vec(), -params.mu())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wave_argument_direct_arithmetic() {
        let params = WaveParams::relative(2.0, 0.0, [1.0, 2.0, 3.0], 1.0).unwrap();
        let w = compute_wave_argument(&params, &[1.0, 1.0, 1.0], 0.5).unwrap();
        assert_eq!(w, 5.0);
    }

    #[test]
    fn wave_argument_reduces_to_t_for_zero_v() {
        // v = 0, μ = −1: w = t.
        let params = WaveParams::relative(-1.0, 0.0, [0.0; 3], 1.0).unwrap();
        let w = compute_wave_argument(&params, &[4.0, -2.0, 0.3], 7.0).unwrap();
        assert_eq!(w, 7.0);
    }

    #[test]
    fn wave_argument_vanishes_on_front_locus() {
        let mu = 2.0;
        let t = 0.5;
        let params = WaveParams::relative(mu, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let w = compute_wave_argument(&params, &[mu * t, 0.0, 0.0], t).unwrap();
        assert_eq!(w, 0.0);
    }

    #[test]
    fn wave_argument_rejects_dimension_mismatch() {
        let params = WaveParams::relative(1.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let err = compute_wave_argument(&params, &[1.0, 2.0], 0.0).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, actual: 2 }));
    }

    #[test]
    fn gradient_is_v_and_minus_mu() {
        let params = WaveParams::relative(2.0, 0.0, [1.0, 2.0, 3.0], 1.0).unwrap();
        let (grad, dt) = wave_argument_gradient(&params);
        assert_eq!(grad, vec![1.0, 2.0, 3.0]);
        assert_eq!(dt, -2.0);

        let params = WaveParams::relative(-1.0, 0.0, [0.0; 3], 1.0).unwrap();
        let (grad, dt) = wave_argument_gradient(&params);
        assert_eq!(grad, vec![0.0; 3]);
        assert_eq!(dt, 1.0);
    }

    #[test]
    fn gradient_preserves_unit_norm_of_v() {
        let u = [1.0 / 3f64.sqrt(); 3];
        let params = WaveParams::relative(1.0, 0.0, u, 1.0).unwrap();
        let (grad, _) = wave_argument_gradient(&params);
        let norm: f64 = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn params_reject_zero_mu_and_nonpositive_lambda() {
        assert!(WaveParams::relative(0.0, 0.0, [1.0, 0.0, 0.0], 1.0).is_err());
        assert!(WaveParams::relative(1.0, 0.0, [1.0, 0.0, 0.0], 0.0).is_err());
        assert!(WaveParams::relative(1.0, 0.0, [1.0, 0.0, 0.0], -2.0).is_err());
    }

    #[test]
    fn body_config_requires_positive_entries() {
        assert!(BodyConfig::new(1.0, 1.0, 1.0).is_ok());
        assert!(BodyConfig::new(0.0, 1.0, 1.0).is_err());
        assert!(BodyConfig::new(1.0, -1.0, 1.0).is_err());
        assert!(BodyConfig::new(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn block_lambda_extraction() {
        let params = WaveParams::pair(1.0, 0.0, [0.0; 3], 2.0, 5.0).unwrap();
        assert_eq!(params.lambda_sq().len(), 6);
        assert_eq!(params.block_lambda_sq(2).unwrap(), vec![2.0, 5.0]);
        // Unequal entries within a block are rejected.
        let v = StackedVector::new(vec![0.0; 3], 3, 1).unwrap();
        let params = WaveParams::new(1.0, 0.0, v, vec![1.0, 2.0, 3.0]).unwrap();
        assert!(params.block_lambda_sq(1).is_err());
    }

    #[test]
    fn stacked_vector_shape_checks() {
        assert!(StackedVector::new(vec![1.0; 6], 3, 2).is_ok());
        assert!(StackedVector::new(vec![1.0; 5], 3, 2).is_err());
        assert!(StackedVector::new(vec![f64::INFINITY; 3], 3, 1).is_err());
        assert!(StackedVector::from_blocks(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    proptest! {
        // w is affine in r̃: w(r̃+δ, t) − w(r̃, t) = v·δ.
        #[test]
        fn wave_argument_is_affine(
            v in proptest::array::uniform3(-10.0..10.0f64),
            r in proptest::array::uniform3(-10.0..10.0f64),
            d in proptest::array::uniform3(-10.0..10.0f64),
            t in -5.0..5.0f64,
        ) {
            let params = WaveParams::relative(1.5, 0.25, v, 1.0).unwrap();
            let shifted = [r[0] + d[0], r[1] + d[1], r[2] + d[2]];
            let lhs = compute_wave_argument(&params, &shifted, t).unwrap()
                - compute_wave_argument(&params, &r, t).unwrap();
            let rhs = v[0] * d[0] + v[1] * d[1] + v[2] * d[2];
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }

        // Advancing time by h changes w by exactly −μh (up to rounding).
        #[test]
        fn wave_argument_time_shift(
            mu in prop_oneof![-4.0..-0.1f64, 0.1..4.0f64],
            t in -5.0..5.0f64,
            h in -2.0..2.0f64,
        ) {
            let params = WaveParams::relative(mu, 0.0, [0.3, -0.2, 0.9], 1.0).unwrap();
            let r = [1.0, 2.0, 3.0];
            let dw = compute_wave_argument(&params, &r, t + h).unwrap()
                - compute_wave_argument(&params, &r, t).unwrap();
            prop_assert!((dw + mu * h).abs() <= 1e-12 * (1.0 + (mu * h).abs()));
        }

        // Round-tripping through the flat representation is the identity.
        #[test]
        fn flatten_unflatten_identity(
            p in 1usize..6,
            q in 1usize..5,
            seed in proptest::collection::vec(-100.0..100.0f64, 30),
        ) {
            let data: Vec<f64> = seed.into_iter().take(p * q).collect();
            prop_assume!(data.len() == p * q);
            let sv = StackedVector::new(data.clone(), p, q).unwrap();
            let back = StackedVector::new(sv.flatten().to_vec(), p, q).unwrap();
            prop_assert_eq!(back.flatten(), &data[..]);
            let reassembled: Vec<f64> = sv.iter_blocks().flatten().copied().collect();
            prop_assert_eq!(reassembled, data);
        }
    }
}
