//! Closed-form traveling waves for the gravitational two-body problem,
//! independently verified.
//!
//! Replacing d²/dt² in a second-order system y″ = f(y) with the
//! d'Alembert operator ∂²/∂t² − λ²Δ produces that system's companion wave
//! equation; the traveling-wave substitution Ψ(r̃, t) = Ψ(w) with
//! w = v·r̃ − μt + c reduces it back to an ODE in w. Applied to Newton's
//! two-body equations this yields power-law profiles Ψ(w) ∝ |w|^(2/3)
//! along a fixed direction — the collision/ejection orbits in the time
//! domain and expanding gravitational fronts in the spatial one. This
//! crate builds those profiles, checks them against independent oracles,
//! and samples the front geometry:
//!
//! * [`model`] — stacked ℝ^(pq) vectors, wave parameters, the wave
//!   argument and its gradient;
//! * [`solutions`] — closed-form constructors with all admissibility
//!   conditions (degenerate wave speeds, θ₁+θ₂ > 0, sign consistency);
//! * [`residual`] — analytic ODE residuals plus finite-difference
//!   residuals of the full companion and linear wave equations with
//!   convergence-order estimation;
//! * [`nbody`] — Newtonian right-hand sides and a fixed-step RK4 oracle;
//! * [`front`] — gradient blow-up, the w = 0 locus, tangent-plane /
//!   sphere / cylinder fronts in the three coordinate charts;
//! * [`config`] / [`cli`] — the INI-driven command layer behind the
//!   `kepler-waves` binary.
//!
//! Each capability has a runnable demo under `examples/`.
//!
//! ```
//! use kepler_waves::model::{BodyConfig, WaveParams};
//! use kepler_waves::solutions::relative_2body_solution;
//!
//! let body = BodyConfig::new(1.0, 1.0, 1.0)?;
//! let params = WaveParams::relative(1.0, 0.0, [0.0; 3], 1.0)?;
//! let wave = relative_2body_solution(&body, &params, [1.0, 0.0, 0.0])?;
//! let value = wave.evaluate(2.0)?;
//! assert_eq!(value.block_dim(), 3);
//! # Ok::<(), kepler_waves::Error>(())
//! ```

pub mod cli;
pub mod config;
pub mod error;
pub mod front;
pub mod model;
pub mod nbody;
pub mod numeric;
pub mod residual;
pub mod solutions;

pub use error::{Error, Result};
pub use model::{BodyConfig, StackedVector, WaveParams};
pub use solutions::{PowerLawSolution, Provenance, ThetaPair};
