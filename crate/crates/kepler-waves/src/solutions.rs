//! Closed-form power-law traveling waves of the two-body companion
//! equations.
//!
//! Every constructor here returns a profile of the form
//! Ψⱼ(w) = αⱼ·|w|^(2/3)·Sⱼ on an open interval not containing 0, together
//! with the admissibility checks under which the profile actually solves
//! its reduced equation:
//!
//! * [`relative_2body_solution`] — single-block solution of
//!   (μ²−λ₁₂²‖v‖²)·Ψ″ = −G(m₁+m₂)·Ψ/‖Ψ‖³,
//! * [`two_body_pair_solution`] — coupled pair solving the two-block
//!   system with per-block factors μ²−λⱼ²‖v‖²,
//! * [`ncme_collision_solution`] — the Newtonian collision/ejection orbit
//!   r₁(t), r₂(t) ∝ t^(2/3) with the center of mass pinned at the origin.
//!
//! |w|^(2/3) is computed as the even power (w²)^(1/3), so profiles are
//! valid on negative-w domains as well; only w = 0 is singular.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BodyConfig, StackedVector, WaveParams};
use crate::numeric::{
    abs_pow_two_thirds, cbrt, d1_abs_pow_two_thirds, d2_abs_pow_two_thirds, norm3, scale3,
};

/// Which constructor produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    RelativeTwoBody,
    TwoBodyPair,
    NcmeCollision,
}

/// One block of a power-law solution: Ψⱼ(w) = alpha·|w|^(2/3)·S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionBlock {
    pub alpha: f64,
    #[serde(rename = "S")]
    pub s: [f64; 3],
}

impl SolutionBlock {
    /// The effective vector amplitude alpha·S.
    pub fn coefficient(&self) -> [f64; 3] {
        scale3(self.alpha, &self.s)
    }
}

/// The fixed exponent 2/3, carried in serialized form for the file schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct ExponentTag;

impl Serialize for ExponentTag {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str("2/3")
    }
}

impl<'de> Deserialize<'de> for ExponentTag {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        if s == "2/3" {
            Ok(ExponentTag)
        } else {
            Err(serde::de::Error::custom(format!(
                "unsupported exponent {s:?}, expected \"2/3\""
            )))
        }
    }
}

mod domain_serde {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    // Open intervals may be half-infinite; JSON has no infinity literal, so
    // infinite endpoints serialize as null.
    pub fn serialize<S: Serializer>(d: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
        let enc = |x: f64| if x.is_finite() { Some(x) } else { None };
        [enc(d.0), enc(d.1)].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(f64, f64), D::Error> {
        let [a, b] = <[Option<f64>; 2]>::deserialize(d)?;
        Ok((a.unwrap_or(f64::NEG_INFINITY), b.unwrap_or(f64::INFINITY)))
    }
}

/// A power-law traveling-wave solution Ψⱼ(w) = αⱼ·|w|^(2/3)·Sⱼ with its
/// admissible open domain (a, b), 0 ∉ (a, b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSolution {
    provenance: Provenance,
    exponent: ExponentTag,
    blocks: Vec<SolutionBlock>,
    #[serde(with = "domain_serde")]
    domain: (f64, f64),
}

impl PowerLawSolution {
    /// Assembles a solution object from raw blocks.
    ///
    /// Checks the structural invariants (nonzero amplitudes, valid open
    /// domain excluding 0) but not the proposition-specific amplitude
    /// conditions; use the constructors below for residual-verified
    /// objects, or run them through [`crate::residual::ode_residual`].
    pub fn from_blocks(
        blocks: Vec<SolutionBlock>,
        domain: (f64, f64),
        provenance: Provenance,
    ) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameter("solution needs at least one block".into()));
        }
        for b in &blocks {
            if !b.alpha.is_finite() || b.s.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter("solution block must be finite".into()));
            }
            if b.alpha == 0.0 || norm3(&b.s) == 0.0 {
                return Err(Error::InvalidParameter(
                    "solution block amplitude must be nonzero".into(),
                ));
            }
        }
        check_domain(domain)?;
        Ok(Self {
            provenance,
            exponent: ExponentTag,
            blocks,
            domain,
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn blocks(&self) -> &[SolutionBlock] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// The effective vector amplitude αⱼ·Sⱼ of block j.
    pub fn coefficient(&self, j: usize) -> [f64; 3] {
        self.blocks[j].coefficient()
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// Restricts to a sub-interval (a, b) with 0 ∉ (a, b).
    pub fn with_domain(mut self, a: f64, b: f64) -> Result<Self> {
        check_domain((a, b))?;
        self.domain = (a, b);
        Ok(self)
    }

    fn check_w(&self, w: f64) -> Result<()> {
        let (a, b) = self.domain;
        if w == 0.0 || !(w > a && w < b) {
            return Err(Error::OutsideDomain { w, a, b });
        }
        Ok(())
    }

    /// Ψ(w): q blocks of αⱼ·|w|^(2/3)·Sⱼ.
    pub fn evaluate(&self, w: f64) -> Result<StackedVector> {
        self.profile(w, abs_pow_two_thirds)
    }

    /// dΨ/dw: q blocks of (2/3)·w·|w|^(−4/3)·αⱼ·Sⱼ.
    pub fn d1(&self, w: f64) -> Result<StackedVector> {
        self.profile(w, d1_abs_pow_two_thirds)
    }

    /// d²Ψ/dw²: q blocks of −(2/9)·|w|^(−4/3)·αⱼ·Sⱼ.
    pub fn d2(&self, w: f64) -> Result<StackedVector> {
        self.profile(w, d2_abs_pow_two_thirds)
    }

    fn profile(&self, w: f64, shape: impl Fn(f64) -> f64) -> Result<StackedVector> {
        self.check_w(w)?;
        let factor = shape(w);
        let mut data = Vec::with_capacity(3 * self.blocks.len());
        for b in &self.blocks {
            let a = b.alpha * factor;
            data.extend_from_slice(&[a * b.s[0], a * b.s[1], a * b.s[2]]);
        }
        Ok(StackedVector::from_raw(data, 3, self.blocks.len()))
    }
}

fn check_domain((a, b): (f64, f64)) -> Result<()> {
    if a.is_nan() || b.is_nan() || !(a < b) {
        return Err(Error::InvalidParameter(format!(
            "domain ({a}, {b}) is not a valid open interval"
        )));
    }
    if a < 0.0 && b > 0.0 {
        return Err(Error::InvalidParameter(format!(
            "domain ({a}, {b}) must not contain w = 0"
        )));
    }
    Ok(())
}

/// The coupling scalars of the two-block system:
/// θ₁ = Gm₂/(μ²−λ₁²‖v‖²), θ₂ = Gm₁/(μ²−λ₂²‖v‖²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaPair {
    pub theta1: f64,
    pub theta2: f64,
}

impl ThetaPair {
    pub fn sum(&self) -> f64 {
        self.theta1 + self.theta2
    }

    /// θ₁ + θ₂ ≠ 0, equivalently −m₂/m₁ ≠ (μ²−λ₁²‖v‖²)/(μ²−λ₂²‖v‖²).
    pub fn nonzero_sum(&self) -> bool {
        self.sum() != 0.0
    }

    /// θ₁ + θ₂ > 0, the condition under which the coupled pair of
    /// power-law profiles exists.
    pub fn admissible_for_pair(&self) -> bool {
        self.sum() > 0.0
    }
}

/// Computes (θ₁, θ₂) for a two-block parameter set.
///
/// Fails with a degenerate-wave-speed error when μ² = λⱼ²‖v‖² for either
/// block.
pub fn compute_thetas(body: &BodyConfig, params: &WaveParams) -> Result<ThetaPair> {
    let lambdas = params.block_lambda_sq(2)?;
    let d1 = params.wave_factor(lambdas[0]);
    let d2 = params.wave_factor(lambdas[1]);
    if d1 == 0.0 {
        return Err(Error::DegenerateWaveSpeed { block: 1 });
    }
    if d2 == 0.0 {
        return Err(Error::DegenerateWaveSpeed { block: 2 });
    }
    Ok(ThetaPair {
        theta1: body.g() * body.m2() / d1,
        theta2: body.g() * body.m1() / d2,
    })
}

fn check_unit(u: &[f64; 3]) -> Result<()> {
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("direction must be finite".into()));
    }
    let n = norm3(u);
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "direction must be a unit vector (‖U‖ = {n})"
        )));
    }
    Ok(())
}

/// Single-block solution Ψ₁₂(w) = |w|^(2/3)·‖S₁‖·U of the relative
/// two-body companion equation, with
/// ‖S₁‖³ = 9G(m₁+m₂) / (2(μ²−λ₁₂²‖v‖²)).
///
/// Requires μ² − λ₁₂²‖v‖² > 0 strictly: substitution shows the two sides
/// of the vector equation carry opposite signs when the factor is
/// negative, so no profile of this shape exists there, and the factor
/// vanishing removes the second-derivative term altogether. The two
/// failure modes are reported as distinct errors.
pub fn relative_2body_solution(
    body: &BodyConfig,
    params: &WaveParams,
    direction: [f64; 3],
) -> Result<PowerLawSolution> {
    check_unit(&direction)?;
    let lambda12_sq = params.block_lambda_sq(1)?[0];
    let factor = params.wave_factor(lambda12_sq);
    if factor == 0.0 {
        return Err(Error::DegenerateWaveSpeed { block: 1 });
    }
    if factor < 0.0 {
        return Err(Error::SignInconsistency { factor });
    }
    let norm_s1 = cbrt(9.0 * body.gm_total() / (2.0 * factor));
    PowerLawSolution::from_blocks(
        vec![SolutionBlock {
            alpha: 1.0,
            s: scale3(norm_s1, &direction),
        }],
        (0.0, f64::INFINITY),
        Provenance::RelativeTwoBody,
    )
}

/// Coupled pair Ψ₁(w) = −(θ₁/θ₂)·|w|^(2/3)·‖S₂‖·U,
/// Ψ₂(w) = |w|^(2/3)·‖S₂‖·U solving the two-block system, where ‖S₂‖ is
/// fixed by ‖S₁−S₂‖ = |1+θ₁/θ₂|·‖S₂‖ = (9(θ₁+θ₂)/2)^(1/3).
///
/// Requires θ₁ + θ₂ > 0: a negative sum forces (θ₁+θ₂)² = 0 under the
/// distinctness of the two amplitudes, and a zero sum collapses S₁ = S₂.
pub fn two_body_pair_solution(
    body: &BodyConfig,
    params: &WaveParams,
    direction: [f64; 3],
) -> Result<PowerLawSolution> {
    check_unit(&direction)?;
    let thetas = compute_thetas(body, params)?;
    if !thetas.admissible_for_pair() {
        return Err(Error::InadmissibleParameters { sum: thetas.sum() });
    }
    let diff_norm = cbrt(9.0 * thetas.sum() / 2.0);
    let ratio = thetas.theta1 / thetas.theta2;
    let norm_s2 = diff_norm / (1.0 + ratio).abs();
    let s = scale3(norm_s2, &direction);
    PowerLawSolution::from_blocks(
        vec![
            SolutionBlock { alpha: -ratio, s },
            SolutionBlock { alpha: 1.0, s },
        ],
        (0.0, f64::INFINITY),
        Provenance::TwoBodyPair,
    )
}

/// (9G/2)^(1/3), the scale factor of the Newtonian collision orbit.
pub fn collision_gamma(g: f64) -> f64 {
    cbrt(9.0 * g / 2.0)
}

/// The Newtonian collision/ejection orbit along a fixed direction U:
///
/// r₁(t) = −γ̂·m₂·(m₁+m₂)^(−2/3)·t^(2/3)·U,
/// r₂(t) = +γ̂·m₁·(m₁+m₂)^(−2/3)·t^(2/3)·U,  γ̂ = (9G/2)^(1/3),
///
/// on t ∈ (0, ∞). Both bodies reach the origin as t → 0. The sign of r₂
/// is positive: with both coefficients negative the center of mass
/// m₁r₁+m₂r₂ would drift and the pair would not satisfy Newton's
/// equations, as the regression tests pin down.
pub fn ncme_collision_solution(
    body: &BodyConfig,
    direction: [f64; 3],
) -> Result<PowerLawSolution> {
    check_unit(&direction)?;
    let gamma = collision_gamma(body.g());
    let norm_s2 = gamma * body.m1() / abs_pow_two_thirds(body.total_mass());
    let s = scale3(norm_s2, &direction);
    PowerLawSolution::from_blocks(
        vec![
            SolutionBlock {
                alpha: -body.m2() / body.m1(),
                s,
            },
            SolutionBlock { alpha: 1.0, s },
        ],
        (0.0, f64::INFINITY),
        Provenance::NcmeCollision,
    )
}
