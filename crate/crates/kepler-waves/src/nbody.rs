//! Newtonian reference dynamics: the gravitational right-hand sides of the
//! two-body and relative systems, and a fixed-step classical RK4
//! integrator.
//!
//! This module is the numerical cross-check for the closed forms in
//! [`crate::solutions`]: a power-law orbit evaluated at t₀ seeds the
//! integrator, and the trajectory it produces must track the closed form.
//! Fixed-step RK4 is enough here — trajectories are short and the role is
//! validation, not long-term propagation.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BodyConfig;
use crate::numeric::{cross3, dot3, norm3, scale3, sub3};
use crate::solutions::PowerLawSolution;

/// Bodies closer than this abort the integration: the closed forms are
/// only claimed away from the collision itself.
pub const COLLISION_THRESHOLD: f64 = 1e-8;

/// Full two-body phase state: positions and velocities of both masses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub positions: [[f64; 3]; 2],
    pub velocities: [[f64; 3]; 2],
    pub t: f64,
}

impl PhaseState {
    pub fn separation(&self) -> f64 {
        norm3(&sub3(&self.positions[0], &self.positions[1]))
    }
}

/// Relative phase state: Δ = r₁ − r₂ and its velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeState {
    pub delta: [f64; 3],
    pub delta_dot: [f64; 3],
    pub t: f64,
}

impl RelativeState {
    pub fn separation(&self) -> f64 {
        norm3(&self.delta)
    }
}

/// Accelerations of both bodies:
/// a₁ = Gm₂(r₂−r₁)/‖r₂−r₁‖³, a₂ = Gm₁(r₁−r₂)/‖r₁−r₂‖³.
pub fn ncme_rhs(state: &PhaseState, body: &BodyConfig) -> Result<[[f64; 3]; 2]> {
    let gap = sub3(&state.positions[1], &state.positions[0]);
    let sep = norm3(&gap);
    if !(sep > 0.0) {
        return Err(Error::CollisionSingularity { t: state.t, separation: sep });
    }
    let cube = sep * sep * sep;
    Ok([
        scale3(body.g() * body.m2() / cube, &gap),
        scale3(-body.g() * body.m1() / cube, &gap),
    ])
}

/// Relative acceleration −G(m₁+m₂)Δ/‖Δ‖³; equals the difference
/// a₁ − a₂ of [`ncme_rhs`] up to rounding.
pub fn relative_rhs(delta: &[f64; 3], body: &BodyConfig) -> Result<[f64; 3]> {
    let sep = norm3(delta);
    if !(sep > 0.0) {
        return Err(Error::CollisionSingularity { t: f64::NAN, separation: sep });
    }
    Ok(scale3(-body.gm_total() / (sep * sep * sep), delta))
}

/// How an integration ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum IntegrationStatus {
    Completed,
    /// Separation dipped below [`COLLISION_THRESHOLD`]; the trajectory
    /// holds every sample up to the last valid state.
    AbortedNearCollision { separation: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoBodyTrajectory {
    pub samples: Vec<PhaseState>,
    pub status: IntegrationStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeTrajectory {
    pub samples: Vec<RelativeState>,
    pub status: IntegrationStatus,
}

impl TwoBodyTrajectory {
    pub fn last(&self) -> &PhaseState {
        self.samples.last().expect("trajectory holds at least the initial state")
    }

    /// CSV rows (t, r₁, r₂, v₁, v₂), one line per step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,r1x,r1y,r1z,r2x,r2y,r2z,v1x,v1y,v1z,v2x,v2y,v2z")?;
        for s in &self.samples {
            write!(out, "{:.16e}", s.t)?;
            for block in [&s.positions[0], &s.positions[1], &s.velocities[0], &s.velocities[1]] {
                for x in block {
                    write!(out, ",{x:.16e}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl RelativeTrajectory {
    pub fn last(&self) -> &RelativeState {
        self.samples.last().expect("trajectory holds at least the initial state")
    }

    /// CSV rows (t, Δ, Δ′), one line per step.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,dx,dy,dz,dvx,dvy,dvz")?;
        for s in &self.samples {
            write!(out, "{:.16e}", s.t)?;
            for block in [&s.delta, &s.delta_dot] {
                for x in block {
                    write!(out, ",{x:.16e}")?;
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

fn check_span(t0: f64, t_end: f64, h: f64) -> Result<usize> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidParameter(format!("step size h = {h} must be > 0")));
    }
    if !(t_end > t0) {
        return Err(Error::InvalidParameter(format!(
            "t_end = {t_end} must exceed t0 = {t0}"
        )));
    }
    Ok(((t_end - t0) / h).ceil() as usize)
}

fn rk4_step<const N: usize>(
    y: &[f64; N],
    t: f64,
    h: f64,
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
) -> [f64; N] {
    let add = |a: &[f64; N], k: &[f64; N], s: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, &add(y, &k1, h / 2.0));
    let k3 = f(t + h / 2.0, &add(y, &k2, h / 2.0));
    let k4 = f(t + h, &add(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Classical fixed-step RK4 on the full two-body system, sampling after
/// every step. The final step is shortened to land exactly on `t_end`.
pub fn integrate_two_body(
    initial: &PhaseState,
    body: &BodyConfig,
    t_end: f64,
    h: f64,
) -> Result<TwoBodyTrajectory> {
    check_span(initial.t, t_end, h)?;
    if initial.separation() < COLLISION_THRESHOLD {
        return Err(Error::CollisionSingularity {
            t: initial.t,
            separation: initial.separation(),
        });
    }

    let deriv = |_t: f64, y: &[f64; 12]| -> [f64; 12] {
        let gap = [y[3] - y[0], y[4] - y[1], y[5] - y[2]];
        let sep = norm3(&gap);
        let cube = sep * sep * sep;
        let k1 = body.g() * body.m2() / cube;
        let k2 = -body.g() * body.m1() / cube;
        [
            y[6], y[7], y[8],
            y[9], y[10], y[11],
            k1 * gap[0], k1 * gap[1], k1 * gap[2],
            k2 * gap[0], k2 * gap[1], k2 * gap[2],
        ]
    };

    let pack = |s: &PhaseState| -> [f64; 12] {
        [
            s.positions[0][0], s.positions[0][1], s.positions[0][2],
            s.positions[1][0], s.positions[1][1], s.positions[1][2],
            s.velocities[0][0], s.velocities[0][1], s.velocities[0][2],
            s.velocities[1][0], s.velocities[1][1], s.velocities[1][2],
        ]
    };
    let unpack = |y: &[f64; 12], t: f64| PhaseState {
        positions: [[y[0], y[1], y[2]], [y[3], y[4], y[5]]],
        velocities: [[y[6], y[7], y[8]], [y[9], y[10], y[11]]],
        t,
    };

    let mut samples = vec![*initial];
    let mut y = pack(initial);
    let mut t = initial.t;
    let mut step_index = 0u64;
    while t < t_end {
        let step = h.min(t_end - t);
        y = rk4_step(&y, t, step, &deriv);
        step_index += 1;
        t = if step == h {
            initial.t + step_index as f64 * h
        } else {
            t_end
        };
        let state = unpack(&y, t);
        if state.separation() < COLLISION_THRESHOLD {
            return Ok(TwoBodyTrajectory {
                samples,
                status: IntegrationStatus::AbortedNearCollision {
                    separation: state.separation(),
                },
            });
        }
        samples.push(state);
    }
    Ok(TwoBodyTrajectory { samples, status: IntegrationStatus::Completed })
}

/// Classical fixed-step RK4 on the relative system
/// Δ″ = −G(m₁+m₂)Δ/‖Δ‖³.
pub fn integrate_relative(
    initial: &RelativeState,
    body: &BodyConfig,
    t_end: f64,
    h: f64,
) -> Result<RelativeTrajectory> {
    check_span(initial.t, t_end, h)?;
    if initial.separation() < COLLISION_THRESHOLD {
        return Err(Error::CollisionSingularity {
            t: initial.t,
            separation: initial.separation(),
        });
    }

    let gm = body.gm_total();
    let deriv = |_t: f64, y: &[f64; 6]| -> [f64; 6] {
        let sep = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let k = -gm / (sep * sep * sep);
        [y[3], y[4], y[5], k * y[0], k * y[1], k * y[2]]
    };

    let mut samples = vec![*initial];
    let mut y = [
        initial.delta[0], initial.delta[1], initial.delta[2],
        initial.delta_dot[0], initial.delta_dot[1], initial.delta_dot[2],
    ];
    let mut t = initial.t;
    let mut step_index = 0u64;
    while t < t_end {
        let step = h.min(t_end - t);
        y = rk4_step(&y, t, step, &deriv);
        step_index += 1;
        t = if step == h {
            initial.t + step_index as f64 * h
        } else {
            t_end
        };
        let state = RelativeState {
            delta: [y[0], y[1], y[2]],
            delta_dot: [y[3], y[4], y[5]],
            t,
        };
        if state.separation() < COLLISION_THRESHOLD {
            return Ok(RelativeTrajectory {
                samples,
                status: IntegrationStatus::AbortedNearCollision {
                    separation: state.separation(),
                },
            });
        }
        samples.push(state);
    }
    Ok(RelativeTrajectory { samples, status: IntegrationStatus::Completed })
}

/// Specific orbital energy of the relative motion:
/// E = ½‖Δ′‖² − G(m₁+m₂)/‖Δ‖.
pub fn relative_energy(state: &RelativeState, body: &BodyConfig) -> f64 {
    0.5 * dot3(&state.delta_dot, &state.delta_dot) - body.gm_total() / state.separation()
}

/// Specific angular momentum Δ × Δ′ of the relative motion.
pub fn relative_angular_momentum(state: &RelativeState) -> [f64; 3] {
    cross3(&state.delta, &state.delta_dot)
}

/// Initial conditions for the relative system read off a single-block
/// power-law orbit interpreted in the time domain (w = t):
/// Δ(t₀) and Δ′(t₀).
pub fn relative_state_from_power_law(
    sol: &PowerLawSolution,
    t0: f64,
) -> Result<RelativeState> {
    if sol.block_count() != 1 {
        return Err(Error::InvalidParameter(
            "relative initial conditions need a single-block solution".into(),
        ));
    }
    let value = sol.evaluate(t0)?;
    let slope = sol.d1(t0)?;
    Ok(RelativeState {
        delta: [value.flatten()[0], value.flatten()[1], value.flatten()[2]],
        delta_dot: [slope.flatten()[0], slope.flatten()[1], slope.flatten()[2]],
        t: t0,
    })
}

/// Initial conditions for the full two-body system read off a two-block
/// power-law orbit interpreted in the time domain (w = t).
pub fn two_body_state_from_power_law(
    sol: &PowerLawSolution,
    t0: f64,
) -> Result<PhaseState> {
    if sol.block_count() != 2 {
        return Err(Error::InvalidParameter(
            "two-body initial conditions need a two-block solution".into(),
        ));
    }
    let value = sol.evaluate(t0)?;
    let slope = sol.d1(t0)?;
    let vf = value.flatten();
    let sf = slope.flatten();
    Ok(PhaseState {
        positions: [[vf[0], vf[1], vf[2]], [vf[3], vf[4], vf[5]]],
        velocities: [[sf[0], sf[1], sf[2]], [sf[3], sf[4], sf[5]]],
        t: t0,
    })
}

/// Outcome of integrating the Newtonian relative system from closed-form
/// initial conditions and comparing against the closed form itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    /// Largest ‖Δ_rk4(t) − Δ_closed(t)‖ over the sampled trajectory.
    pub max_deviation: f64,
    /// Largest |E(t)|; the collision orbit has E ≡ 0.
    pub max_abs_energy: f64,
    /// Largest ‖Δ×Δ′‖; the collinear orbit has none.
    pub max_angular_momentum: f64,
    pub t0: f64,
    pub t_end: f64,
    pub h: f64,
    pub samples: usize,
}

/// Integrates the relative collision orbit Δ(t) = t^(2/3)·‖S₁‖·U with RK4
/// from its exact state at `t0` and reports how far the integrator drifts
/// from the closed form, along with energy and angular-momentum
/// conservation. This pits the analytic constructor against an
/// independent numerical oracle.
pub fn collision_crosscheck(
    body: &BodyConfig,
    direction: [f64; 3],
    t0: f64,
    t_end: f64,
    h: f64,
) -> Result<(CrosscheckReport, RelativeTrajectory)> {
    let params = crate::model::WaveParams::newtonian(1);
    let sol = crate::solutions::relative_2body_solution(body, &params, direction)?;
    let initial = relative_state_from_power_law(&sol, t0)?;
    let trajectory = integrate_relative(&initial, body, t_end, h)?;

    let mut max_deviation = 0.0f64;
    let mut max_abs_energy = 0.0f64;
    let mut max_angular_momentum = 0.0f64;
    for s in &trajectory.samples {
        let exact = sol.evaluate(s.t)?;
        let diff = sub3(
            &s.delta,
            &[exact.flatten()[0], exact.flatten()[1], exact.flatten()[2]],
        );
        max_deviation = max_deviation.max(norm3(&diff));
        max_abs_energy = max_abs_energy.max(relative_energy(s, body).abs());
        max_angular_momentum =
            max_angular_momentum.max(norm3(&relative_angular_momentum(s)));
    }
    let report = CrosscheckReport {
        max_deviation,
        max_abs_energy,
        max_angular_momentum,
        t0,
        t_end,
        h,
        samples: trajectory.samples.len(),
    };
    Ok((report, trajectory))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::WaveParams;
    use crate::numeric::add3;
    use crate::solutions::{ncme_collision_solution, relative_2body_solution};
    use proptest::prelude::*;

    fn collision_relative_solution(body: &BodyConfig) -> PowerLawSolution {
        let params = WaveParams::relative(-1.0, 0.0, [0.0; 3], 1.0).unwrap();
        relative_2body_solution(body, &params, [1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn rhs_unit_separation() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let state = PhaseState {
            positions: [[0.0; 3], [1.0, 0.0, 0.0]],
            velocities: [[0.0; 3]; 2],
            t: 0.0,
        };
        let [a1, a2] = ncme_rhs(&state, &body).unwrap();
        assert_eq!(a1, [1.0, 0.0, 0.0]);
        assert_eq!(a2, [-1.0, 0.0, 0.0]);
    }

    #[test]
    fn rhs_inverse_square_scaling() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let near = PhaseState {
            positions: [[0.0; 3], [1.0, 0.0, 0.0]],
            velocities: [[0.0; 3]; 2],
            t: 0.0,
        };
        let far = PhaseState {
            positions: [[0.0; 3], [2.0, 0.0, 0.0]],
            velocities: [[0.0; 3]; 2],
            t: 0.0,
        };
        let [a_near, _] = ncme_rhs(&near, &body).unwrap();
        let [a_far, _] = ncme_rhs(&far, &body).unwrap();
        assert_eq!(a_far[0], a_near[0] / 4.0);
    }

    #[test]
    fn rhs_rejects_coincident_bodies() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let state = PhaseState {
            positions: [[1.0, 2.0, 3.0]; 2],
            velocities: [[0.0; 3]; 2],
            t: 0.5,
        };
        assert!(matches!(
            ncme_rhs(&state, &body),
            Err(Error::CollisionSingularity { .. })
        ));
        assert!(matches!(
            relative_rhs(&[0.0; 3], &body),
            Err(Error::CollisionSingularity { .. })
        ));
    }

    #[test]
    fn relative_rhs_unit_cases() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(relative_rhs(&[1.0, 0.0, 0.0], &body).unwrap(), [-2.0, 0.0, 0.0]);
        assert_eq!(relative_rhs(&[0.0, 2.0, 0.0], &body).unwrap(), [0.0, -0.5, 0.0]);
    }

    #[test]
    fn collision_orbit_tracks_closed_form_to_1e6() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let sol = collision_relative_solution(&body);
        let initial = relative_state_from_power_law(&sol, 1.0).unwrap();
        let traj = integrate_relative(&initial, &body, 2.0, 1e-3).unwrap();
        assert_eq!(traj.status, IntegrationStatus::Completed);
        let mut max_dev = 0.0f64;
        for s in &traj.samples {
            let exact = sol.evaluate(s.t).unwrap();
            for i in 0..3 {
                max_dev = max_dev.max((s.delta[i] - exact.flatten()[i]).abs());
            }
        }
        assert!(max_dev <= 1e-6, "max deviation {max_dev}");
    }

    #[test]
    fn circular_orbit_radius_is_preserved() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let speed = body.gm_total().sqrt();
        let initial = RelativeState {
            delta: [1.0, 0.0, 0.0],
            delta_dot: [0.0, speed, 0.0],
            t: 0.0,
        };
        let period = 2.0 * std::f64::consts::PI / speed;
        let traj = integrate_relative(&initial, &body, period, 1e-3).unwrap();
        for s in &traj.samples {
            assert!((s.separation() - 1.0).abs() <= 1e-6, "r = {}", s.separation());
        }
    }

    #[test]
    fn halving_the_step_divides_the_error_by_sixteen() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let sol = collision_relative_solution(&body);
        let initial = relative_state_from_power_law(&sol, 1.0).unwrap();
        let final_error = |h: f64| -> f64 {
            let traj = integrate_relative(&initial, &body, 2.0, h).unwrap();
            let last = traj.last();
            let exact = sol.evaluate(last.t).unwrap();
            let diff = sub3(
                &last.delta,
                &[exact.flatten()[0], exact.flatten()[1], exact.flatten()[2]],
            );
            norm3(&diff)
        };
        let ratio = final_error(0.02) / final_error(0.01);
        assert!((12.0..=20.0).contains(&ratio), "error ratio {ratio}");
    }

    #[test]
    fn zero_energy_orbit_keeps_zero_energy() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let sol = collision_relative_solution(&body);
        let initial = relative_state_from_power_law(&sol, 1.0).unwrap();
        let traj = integrate_relative(&initial, &body, 2.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert!(relative_energy(s, &body).abs() <= 1e-8);
        }
    }

    #[test]
    fn collinear_orbit_keeps_zero_angular_momentum() {
        let body = BodyConfig::new(1.0, 2.0, 0.5).unwrap();
        let sol = collision_relative_solution(&body);
        let initial = relative_state_from_power_law(&sol, 1.0).unwrap();
        let traj = integrate_relative(&initial, &body, 2.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert!(norm3(&relative_angular_momentum(s)) <= 1e-10);
        }
    }

    #[test]
    fn subtracting_the_full_system_matches_the_relative_system() {
        let body = BodyConfig::new(1.0, 1.0, 2.0).unwrap();
        let pair = ncme_collision_solution(&body, [0.0, 1.0, 0.0]).unwrap();
        let full0 = two_body_state_from_power_law(&pair, 1.0).unwrap();
        let rel0 = RelativeState {
            delta: sub3(&full0.positions[0], &full0.positions[1]),
            delta_dot: sub3(&full0.velocities[0], &full0.velocities[1]),
            t: 1.0,
        };
        let full = integrate_two_body(&full0, &body, 2.0, 1e-3).unwrap();
        let rel = integrate_relative(&rel0, &body, 2.0, 1e-3).unwrap();
        assert_eq!(full.samples.len(), rel.samples.len());
        for (f, r) in full.samples.iter().zip(&rel.samples) {
            let diff = sub3(&sub3(&f.positions[0], &f.positions[1]), &r.delta);
            assert!(norm3(&diff) <= 1e-8);
        }
    }

    #[test]
    fn integration_aborts_near_collision() {
        // Negligible gravity; the bodies drift together on straight lines
        // until the separation monitor fires.
        let body = BodyConfig::new(1e-30, 1.0, 1.0).unwrap();
        let initial = RelativeState {
            delta: [1.5e-8, 0.0, 0.0],
            delta_dot: [-1e-2, 0.0, 0.0],
            t: 0.0,
        };
        let traj = integrate_relative(&initial, &body, 1e-4, 1e-6).unwrap();
        assert!(matches!(
            traj.status,
            IntegrationStatus::AbortedNearCollision { .. }
        ));
        assert!(!traj.samples.is_empty());
        assert!(traj.last().separation() >= COLLISION_THRESHOLD);
    }

    #[test]
    fn starting_inside_the_threshold_is_an_error() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let initial = RelativeState {
            delta: [1e-9, 0.0, 0.0],
            delta_dot: [0.0; 3],
            t: 0.0,
        };
        assert!(matches!(
            integrate_relative(&initial, &body, 1.0, 1e-3),
            Err(Error::CollisionSingularity { .. })
        ));
    }

    #[test]
    fn crosscheck_report_hits_the_pinned_bounds() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let (report, traj) =
            collision_crosscheck(&body, [1.0, 0.0, 0.0], 1.0, 2.0, 1e-3).unwrap();
        assert_eq!(traj.status, IntegrationStatus::Completed);
        assert_eq!(report.samples, 1001);
        assert!(report.max_deviation <= 1e-6);
        assert!(report.max_abs_energy <= 1e-8);
        assert!(report.max_angular_momentum <= 1e-10);
    }

    #[test]
    fn trajectory_csv_shape() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let initial = RelativeState {
            delta: [1.0, 0.0, 0.0],
            delta_dot: [0.0, 1.0, 0.0],
            t: 0.0,
        };
        let traj = integrate_relative(&initial, &body, 0.01, 1e-3).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,dx,dy,dz,dvx,dvy,dvz");
        assert_eq!(lines.len(), 1 + traj.samples.len());
        assert_eq!(lines[1].split(',').count(), 7);
    }

    proptest! {
        // Newton's third law: m₁a₁ + m₂a₂ = 0 for any admissible state.
        #[test]
        fn action_reaction_balance(
            r1 in proptest::array::uniform3(-5.0..5.0f64),
            r2 in proptest::array::uniform3(-5.0..5.0f64),
            m1 in 0.1..10.0f64,
            m2 in 0.1..10.0f64,
        ) {
            prop_assume!(norm3(&sub3(&r1, &r2)) > 1e-3);
            let body = BodyConfig::new(1.0, m1, m2).unwrap();
            let state = PhaseState {
                positions: [r1, r2],
                velocities: [[0.0; 3]; 2],
                t: 0.0,
            };
            let [a1, a2] = ncme_rhs(&state, &body).unwrap();
            let net = add3(&scale3(m1, &a1), &scale3(m2, &a2));
            let scale = norm3(&scale3(m1, &a1));
            prop_assert!(norm3(&net) <= 1e-14 * scale.max(1e-300));
        }

        // relative_rhs(r₁−r₂) equals a₁ − a₂.
        #[test]
        fn relative_rhs_matches_ncme_difference(
            r1 in proptest::array::uniform3(-5.0..5.0f64),
            r2 in proptest::array::uniform3(-5.0..5.0f64),
            m1 in 0.1..10.0f64,
            m2 in 0.1..10.0f64,
            g in 0.1..10.0f64,
        ) {
            prop_assume!(norm3(&sub3(&r1, &r2)) > 1e-3);
            let body = BodyConfig::new(g, m1, m2).unwrap();
            let state = PhaseState {
                positions: [r1, r2],
                velocities: [[0.0; 3]; 2],
                t: 0.0,
            };
            let [a1, a2] = ncme_rhs(&state, &body).unwrap();
            let direct = relative_rhs(&sub3(&r1, &r2), &body).unwrap();
            let via_difference = sub3(&a1, &a2);
            let scale = norm3(&direct).max(1e-300);
            prop_assert!(norm3(&sub3(&direct, &via_difference)) <= 1e-14 * scale);
        }
    }
}
