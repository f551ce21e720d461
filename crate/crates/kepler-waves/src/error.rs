//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong constructing, verifying, or exporting
/// a traveling-wave solution.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector argument did not have the dimension the receiver expects.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A scalar or vector parameter violated a structural invariant
    /// (zero μ, non-positive mass, non-finite component, non-unit
    /// direction, empty domain, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// μ² = λⱼ²‖v‖² for some block j: the wave-operator factor vanishes
    /// and the reduced equations lose their second-derivative term.
    #[error("degenerate wave speed: μ² − λ²‖v‖² = 0 in block {block}")]
    DegenerateWaveSpeed { block: usize },

    /// μ² − λ²‖v‖² < 0: substituting the power-law profile makes the two
    /// sides of the reduced equation carry opposite signs, so no real
    /// amplitude exists.
    #[error(
        "sign inconsistency: μ² − λ²‖v‖² = {factor:e} < 0 admits no power-law profile"
    )]
    SignInconsistency { factor: f64 },

    /// θ₁ + θ₂ ≤ 0: the coupled two-body profiles would be forced to
    /// coincide, contradicting the distinctness of the two amplitudes.
    #[error("inadmissible parameters: θ₁+θ₂ > 0 required (got θ₁+θ₂ = {sum:e})")]
    InadmissibleParameters { sum: f64 },

    /// Evaluation requested at a wave argument outside the solution's
    /// open domain (w = 0 is the collision singularity).
    #[error("domain error: w = {w:e} outside solution domain ({a:e}, {b:e})")]
    OutsideDomain { w: f64, a: f64, b: f64 },

    /// The sample box passes too close to the singular hyperplane w = 0
    /// for the finite-difference stencil to stay on one side of it.
    #[error(
        "singular lattice: sample box approaches w = 0 within margin {margin:e} (min |w| = {min_abs_w:e})"
    )]
    SingularLattice { margin: f64, min_abs_w: f64 },

    /// Two bodies coincide (or nearly so) and the gravitational
    /// right-hand side blows up.
    #[error("collision singularity: separation {separation:e} at t = {t}")]
    CollisionSingularity { t: f64, separation: f64 },

    /// The requested check carries no information for these parameters
    /// (e.g. the linear wave identity with ‖v‖ = 0).
    #[error("check inapplicable: {0}")]
    Inapplicable(String),

    /// The space-time gradient was requested exactly on the front locus
    /// w = 0, where it is unbounded by construction.
    #[error("singular front: w = 0 is the front locus, gradient unbounded")]
    SingularFront,

    /// A chart/covector combination outside the supported constructions.
    #[error("unsupported chart configuration: {0}")]
    UnsupportedChart(String),

    /// One or more verification checks exceeded their thresholds.
    #[error("verification failed: {0}")]
    VerificationFailed(String),

    /// Run-configuration file problems.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
