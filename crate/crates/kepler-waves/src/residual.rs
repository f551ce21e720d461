//! Independent verification engine.
//!
//! Two routes check every closed-form solution:
//!
//! * [`ode_residual`] substitutes the analytic derivatives into the reduced
//!   system (μ²I − ‖v‖²λ²)·Ψ″ = f(Ψ) on a grid of wave arguments,
//! * [`companion_pde_residual`] and [`linear_wave_residual`] rebuild the
//!   space-time field Ψ(r̃, t) and difference the full PDEs with central
//!   second-order stencils on a uniform (r̃, t) lattice, so the only thing
//!   trusted from the analytic side is the field evaluation itself.
//!
//! For an exact solution the first route is zero to rounding while the
//! second decays as O(h²); sweeping h and halving it estimates the
//! convergence order.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BodyConfig, StackedVector, WaveParams};
use crate::solutions::{PowerLawSolution, Provenance};

/// Which equation a report verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationId {
    CompanionOde,
    CompanionPde,
    LinearWave,
    NcmeOde,
}

/// Where the residual was sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GridSpec {
    /// One-dimensional grid of wave arguments.
    WGrid { points: usize, min: f64, max: f64 },
    /// Uniform (r̃, t) box: `steps` intervals of spacing `h` along every
    /// axis, spatial corner `origin`, time corner `t0`.
    Lattice {
        origin: Vec<f64>,
        t0: f64,
        steps: usize,
        h: f64,
    },
}

/// Outcome of one residual evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub equation_id: EquationId,
    pub max_abs_residual: f64,
    pub max_rel_residual: f64,
    pub grid: GridSpec,
    /// log₂(residual(h)/residual(h/2)); present only when a sweep compared
    /// at least two spacings with nonzero residuals.
    pub estimated_order: Option<f64>,
}

impl ResidualReport {
    /// Spacing column for sweep exports; only lattice grids carry one.
    fn spacing(&self) -> Option<f64> {
        match &self.grid {
            GridSpec::Lattice { h, .. } => Some(*h),
            GridSpec::WGrid { .. } => None,
        }
    }
}

/// Uniform sample box for the finite-difference residuals. The box spans
/// `steps·h` along every spatial axis and the time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub origin: Vec<f64>,
    pub t0: f64,
    pub steps: usize,
    pub h: f64,
}

impl Lattice {
    pub fn new(origin: Vec<f64>, t0: f64, steps: usize, h: f64) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidParameter(format!("lattice spacing h = {h} must be > 0")));
        }
        if steps < 2 {
            return Err(Error::InvalidParameter(
                "lattice needs at least 2 intervals per axis to have interior points".into(),
            ));
        }
        if origin.iter().any(|x| !x.is_finite()) || !t0.is_finite() {
            return Err(Error::InvalidParameter("lattice corner must be finite".into()));
        }
        Ok(Self { origin, t0, steps, h })
    }

    /// Same physical box, half the spacing.
    pub fn refined(&self) -> Self {
        Self {
            origin: self.origin.clone(),
            t0: self.t0,
            steps: self.steps * 2,
            h: self.h / 2.0,
        }
    }

    fn spec(&self) -> GridSpec {
        GridSpec::Lattice {
            origin: self.origin.clone(),
            t0: self.t0,
            steps: self.steps,
            h: self.h,
        }
    }

    /// Range of the wave argument over the box (w is affine, so the
    /// extrema sit at box corners).
    fn w_range(&self, params: &WaveParams) -> (f64, f64) {
        let side = self.steps as f64 * self.h;
        let mut lo = params.c();
        let mut hi = params.c();
        for (vi, x0) in params.v().flatten().iter().zip(&self.origin) {
            let (a, b) = (vi * x0, vi * (x0 + side));
            lo += a.min(b);
            hi += a.max(b);
        }
        let (a, b) = (-params.mu() * self.t0, -params.mu() * (self.t0 + side));
        (lo + a.min(b), hi + a.max(b))
    }

    /// Distance of the box from the singular hyperplane w = 0 must beat
    /// 10h(‖v‖+|μ|) so every stencil stays on one side of it.
    fn check_margin(&self, params: &WaveParams) -> Result<()> {
        let margin = 10.0 * self.h * (params.v_norm() + params.mu().abs());
        let (lo, hi) = self.w_range(params);
        let min_abs_w = if lo <= 0.0 && hi >= 0.0 {
            0.0
        } else {
            lo.abs().min(hi.abs())
        };
        if min_abs_w < margin {
            return Err(Error::SingularLattice { margin, min_abs_w });
        }
        Ok(())
    }
}

/// Places a sample box so its center sits at the requested wave argument:
/// spatially along v when v ≠ 0, otherwise by shifting the time corner
/// (w then varies along the time axis only).
pub fn lattice_centered_at(
    params: &WaveParams,
    w_center: f64,
    steps: usize,
    h: f64,
) -> Result<Lattice> {
    let half = steps as f64 * h / 2.0;
    let v = params.v().flatten();
    let vnorm_sq = params.v_norm_sq();
    if vnorm_sq > 0.0 {
        // r̃ center = β·v gives v·r̃ = w_center − c with the time axis
        // centered on t = 0.
        let beta = (w_center - params.c()) / vnorm_sq;
        let origin = v.iter().map(|vi| beta * vi - half).collect();
        Lattice::new(origin, -half, steps, h)
    } else {
        let t_center = (params.c() - w_center) / params.mu();
        let origin = vec![-half; v.len()];
        Lattice::new(origin, t_center - half, steps, h)
    }
}

const REL_FLOOR: f64 = 1e-300;

fn block_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// max(abs, rel) accumulation for one (LHS, RHS) block pair.
fn block_residual(lhs: &[f64], rhs: &[f64]) -> (f64, f64) {
    let diff: Vec<f64> = lhs.iter().zip(rhs).map(|(a, b)| a - b).collect();
    let abs = block_norm(&diff);
    let rel = abs / block_norm(lhs).max(block_norm(rhs)).max(REL_FLOOR);
    (abs, rel)
}

/// Gravitational right-hand side of the reduced/companion system matching
/// the solution's block count: −G(m₁+m₂)Ψ/‖Ψ‖³ for one block, the coupled
/// attraction pair for two.
pub fn gravity_rhs(body: &BodyConfig, value: &StackedVector) -> Result<StackedVector> {
    match value.block_count() {
        1 => {
            let b0 = value.block(0);
            let n = block_norm(b0);
            if n == 0.0 {
                return Err(Error::CollisionSingularity { t: f64::NAN, separation: 0.0 });
            }
            let k = -body.gm_total() / (n * n * n);
            Ok(StackedVector::from_raw(
                b0.iter().map(|x| k * x).collect(),
                value.block_dim(),
                1,
            ))
        }
        2 => {
            let (b1, b2) = (value.block(0), value.block(1));
            let gap: Vec<f64> = b2.iter().zip(b1).map(|(a, b)| a - b).collect();
            let n = block_norm(&gap);
            if n == 0.0 {
                return Err(Error::CollisionSingularity { t: f64::NAN, separation: 0.0 });
            }
            let cube = n * n * n;
            let k1 = body.g() * body.m2() / cube;
            let k2 = -body.g() * body.m1() / cube;
            let mut data: Vec<f64> = gap.iter().map(|x| k1 * x).collect();
            data.extend(gap.iter().map(|x| k2 * x));
            Ok(StackedVector::from_raw(data, value.block_dim(), 2))
        }
        q => Err(Error::InvalidParameter(format!(
            "gravitational right-hand side defined for 1 or 2 blocks, got {q}"
        ))),
    }
}

/// Analytic residual of the reduced system on a grid of wave arguments:
/// per block j, (μ²−λⱼ²‖v‖²)·Ψⱼ″(w) − fⱼ(Ψ(w)), reported as maxima of the
/// block norms over the grid. The relative residual normalizes by
/// max(‖LHS‖, ‖RHS‖).
pub fn ode_residual(
    sol: &PowerLawSolution,
    body: &BodyConfig,
    params: &WaveParams,
    w_grid: &[f64],
) -> Result<ResidualReport> {
    if w_grid.is_empty() {
        return Err(Error::InvalidParameter("empty residual grid".into()));
    }
    let q = sol.block_count();
    let lambdas = params.block_lambda_sq(q)?;
    let factors: Vec<f64> = lambdas.iter().map(|&l| params.wave_factor(l)).collect();

    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for &w in w_grid {
        let value = sol.evaluate(w)?;
        let d2 = sol.d2(w)?;
        let rhs = gravity_rhs(body, &value)?;
        for j in 0..q {
            let lhs: Vec<f64> = d2.block(j).iter().map(|x| factors[j] * x).collect();
            let (abs, rel) = block_residual(&lhs, rhs.block(j));
            max_abs = max_abs.max(abs);
            max_rel = max_rel.max(rel);
        }
    }

    let min = w_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = w_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(ResidualReport {
        equation_id: if sol.provenance() == Provenance::NcmeCollision {
            EquationId::NcmeOde
        } else {
            EquationId::CompanionOde
        },
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
        grid: GridSpec::WGrid { points: w_grid.len(), min, max },
        estimated_order: None,
    })
}

/// Builds the space-time field Ψ(r̃, t) = Ψ(v·r̃ − μt + c) from a solution.
///
/// Callers must keep sample points inside the solution's w-domain; the
/// lattice margin check does this for the default (0, ∞) domain whenever
/// the box sits on the positive-w side.
pub fn traveling_wave_field<'a>(
    sol: &'a PowerLawSolution,
    params: &'a WaveParams,
) -> impl Fn(&[f64], f64) -> StackedVector + Sync + 'a {
    move |r_tilde, t| {
        let w = crate::model::compute_wave_argument(params, r_tilde, t)
            .expect("field coordinate dimension matches v");
        sol.evaluate(w)
            .expect("lattice point maps inside the solution domain")
    }
}

fn decode_interior(mut idx: usize, axes: usize, side: usize) -> Vec<usize> {
    let mut out = vec![0usize; axes];
    for slot in out.iter_mut().rev() {
        *slot = idx % side + 1; // interior offset
        idx /= side;
    }
    out
}

/// Shared stencil walk for both PDE residuals. `combine` receives, per
/// flat component: (second time difference, second-difference Laplacian,
/// center value index) and returns the (lhs, rhs) pair to compare.
fn lattice_residual<F>(
    field: &F,
    params: &WaveParams,
    lattice: &Lattice,
    equation_id: EquationId,
    combine: &(dyn Fn(&[f64], &[f64], &StackedVector) -> (Vec<f64>, Vec<f64>) + Sync),
) -> Result<ResidualReport>
where
    F: Fn(&[f64], f64) -> StackedVector + Sync,
{
    let n_space = lattice.origin.len();
    if n_space != params.v().len() {
        return Err(Error::DimensionMismatch {
            expected: params.v().len(),
            actual: n_space,
        });
    }
    lattice.check_margin(params)?;

    let probe = field(&lattice.origin, lattice.t0);
    let (p, q) = (probe.block_dim(), probe.block_count());
    let total_components = p * q;

    let side = lattice.steps - 1; // interior indices per axis
    let axes = n_space + 1; // spatial axes then time
    let total_points = side.pow(axes as u32);
    let h = lattice.h;
    let inv_h2 = 1.0 / (h * h);

    let eval = |indices: &[usize], shift_axis: Option<(usize, f64)>| -> StackedVector {
        let mut r = Vec::with_capacity(n_space);
        for (a, &k) in indices[..n_space].iter().enumerate() {
            r.push(lattice.origin[a] + k as f64 * h);
        }
        let mut t = lattice.t0 + indices[n_space] as f64 * h;
        if let Some((axis, delta)) = shift_axis {
            if axis < n_space {
                r[axis] += delta;
            } else {
                t += delta;
            }
        }
        field(&r, t)
    };

    let (max_abs, max_rel) = (0..total_points)
        .into_par_iter()
        .map(|linear| {
            let indices = decode_interior(linear, axes, side);
            let center = eval(&indices, None);
            let center_flat = center.flatten();

            let mut d2_time = vec![0.0; total_components];
            let mut laplacian = vec![0.0; total_components];
            for axis in 0..axes {
                let plus = eval(&indices, Some((axis, h)));
                let minus = eval(&indices, Some((axis, -h)));
                for i in 0..total_components {
                    let second =
                        (plus.flatten()[i] - 2.0 * center_flat[i] + minus.flatten()[i]) * inv_h2;
                    if axis < n_space {
                        laplacian[i] += second;
                    } else {
                        d2_time[i] = second;
                    }
                }
            }

            let (lhs, rhs) = combine(&d2_time, &laplacian, &center);
            let mut local = (0.0f64, 0.0f64);
            for j in 0..q {
                let (abs, rel) = block_residual(&lhs[j * p..(j + 1) * p], &rhs[j * p..(j + 1) * p]);
                local.0 = local.0.max(abs);
                local.1 = local.1.max(rel);
            }
            local
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));

    Ok(ResidualReport {
        equation_id,
        max_abs_residual: max_abs,
        max_rel_residual: max_rel,
        grid: lattice.spec(),
        estimated_order: None,
    })
}

/// Finite-difference residual of the companion wave equation
/// ∂²Ψ/∂t² − λ²Δ_r̃Ψ = f(Ψ) at interior lattice points, using the
/// [1, −2, 1]/h² stencil along the time axis and every spatial axis.
pub fn companion_pde_residual<F, R>(
    field: F,
    params: &WaveParams,
    lattice: &Lattice,
    rhs: R,
) -> Result<ResidualReport>
where
    F: Fn(&[f64], f64) -> StackedVector + Sync,
    R: Fn(&StackedVector) -> StackedVector + Sync,
{
    // Validate geometry before touching the field: a singular lattice must
    // surface as an error, not as a panic inside the field closure.
    if lattice.origin.len() != params.v().len() {
        return Err(Error::DimensionMismatch {
            expected: params.v().len(),
            actual: lattice.origin.len(),
        });
    }
    lattice.check_margin(params)?;
    let probe = field(&lattice.origin, lattice.t0);
    let total = probe.len();
    if params.lambda_sq().len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            actual: params.lambda_sq().len(),
        });
    }
    let lambda = params.lambda_sq().to_vec();
    lattice_residual(
        &field,
        params,
        lattice,
        EquationId::CompanionPde,
        &move |d2t, lap, center| {
            let lhs: Vec<f64> = d2t
                .iter()
                .zip(lap)
                .zip(&lambda)
                .map(|((tt, ll), l2)| tt - l2 * ll)
                .collect();
            (lhs, rhs(center).flatten().to_vec())
        },
    )
}

/// Finite-difference residual of the linear wave identity
/// ‖v‖²·∂²Ψ/∂t² − μ²·Δ_r̃Ψ ≡ 0, satisfied by any traveling profile Ψ(w).
///
/// ‖v‖ = 0 collapses the identity to 0 = 0 and is rejected as
/// inapplicable.
pub fn linear_wave_residual<F>(
    field: F,
    params: &WaveParams,
    lattice: &Lattice,
) -> Result<ResidualReport>
where
    F: Fn(&[f64], f64) -> StackedVector + Sync,
{
    let v2 = params.v_norm_sq();
    if v2 == 0.0 {
        return Err(Error::Inapplicable(
            "‖v‖ = 0 makes the linear wave identity vacuous".into(),
        ));
    }
    let mu2 = params.mu() * params.mu();
    lattice_residual(
        &field,
        params,
        lattice,
        EquationId::LinearWave,
        &move |d2t, lap, _| {
            let lhs: Vec<f64> = d2t.iter().map(|tt| v2 * tt).collect();
            let rhs: Vec<f64> = lap.iter().map(|ll| mu2 * ll).collect();
            (lhs, rhs)
        },
    )
}

fn attach_order(reports: &mut [ResidualReport]) {
    for k in 1..reports.len() {
        let coarse = reports[k - 1].max_abs_residual;
        let fine = reports[k].max_abs_residual;
        if coarse > 0.0 && fine > 0.0 {
            reports[k].estimated_order = Some((coarse / fine).log2());
        }
    }
}

/// Runs [`companion_pde_residual`] on `levels` successive halvings of the
/// base lattice spacing (same physical box) and attaches the estimated
/// convergence order between consecutive levels.
pub fn companion_pde_sweep<F, R>(
    field: F,
    params: &WaveParams,
    lattice: &Lattice,
    rhs: R,
    levels: usize,
) -> Result<Vec<ResidualReport>>
where
    F: Fn(&[f64], f64) -> StackedVector + Sync,
    R: Fn(&StackedVector) -> StackedVector + Sync,
{
    let mut reports = Vec::with_capacity(levels);
    let mut current = lattice.clone();
    for _ in 0..levels.max(1) {
        reports.push(companion_pde_residual(&field, params, &current, &rhs)?);
        current = current.refined();
    }
    attach_order(&mut reports);
    Ok(reports)
}

/// Halving sweep for [`linear_wave_residual`].
pub fn linear_wave_sweep<F>(
    field: F,
    params: &WaveParams,
    lattice: &Lattice,
    levels: usize,
) -> Result<Vec<ResidualReport>>
where
    F: Fn(&[f64], f64) -> StackedVector + Sync,
{
    let mut reports = Vec::with_capacity(levels);
    let mut current = lattice.clone();
    for _ in 0..levels.max(1) {
        reports.push(linear_wave_residual(&field, params, &current)?);
        current = current.refined();
    }
    attach_order(&mut reports);
    Ok(reports)
}

/// CSV export of a spacing sweep: columns (h, max_abs, max_rel, order).
pub fn write_sweep_csv<W: Write>(mut out: W, reports: &[ResidualReport]) -> Result<()> {
    writeln!(out, "h,max_abs,max_rel,order")?;
    for r in reports {
        let h = r.spacing().ok_or_else(|| {
            Error::InvalidParameter("sweep export needs lattice reports with a spacing".into())
        })?;
        match r.estimated_order {
            Some(order) => writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                h, r.max_abs_residual, r.max_rel_residual, order
            )?,
            None => writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},",
                h, r.max_abs_residual, r.max_rel_residual
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linspace;
    use crate::solutions::{
        ncme_collision_solution, relative_2body_solution, two_body_pair_solution, SolutionBlock,
    };

    fn wgrid() -> Vec<f64> {
        linspace(0.5, 5.0, 51)
    }

    #[test]
    fn exact_relative_solution_has_tiny_ode_residual() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(2.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [0.0, 1.0, 0.0]).unwrap();
        let report = ode_residual(&sol, &body, &params, &wgrid()).unwrap();
        assert_eq!(report.equation_id, EquationId::CompanionOde);
        assert!(report.max_rel_residual <= 1e-12, "{report:?}");
        assert!(report.estimated_order.is_none());
    }

    #[test]
    fn scaled_amplitude_gives_exact_residual_ratio() {
        // Scaling S by 1.1 scales LHS by 1.1 and RHS by 1.1⁻², so the
        // relative residual is 1 − 1.1⁻³ everywhere on the grid.
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(2.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [0.0, 1.0, 0.0]).unwrap();
        let scaled = PowerLawSolution::from_blocks(
            sol.blocks()
                .iter()
                .map(|b| SolutionBlock {
                    alpha: b.alpha,
                    s: [1.1 * b.s[0], 1.1 * b.s[1], 1.1 * b.s[2]],
                })
                .collect(),
            sol.domain(),
            sol.provenance(),
        )
        .unwrap();
        let report = ode_residual(&scaled, &body, &params, &wgrid()).unwrap();
        let expected = 1.0 - 1.1f64.powi(-3);
        assert!(
            (report.max_rel_residual - expected).abs() <= 1e-12,
            "got {}, want {expected}",
            report.max_rel_residual
        );
    }

    #[test]
    fn pair_solution_block_residuals_vanish() {
        let body = BodyConfig::new(1.0, 2.0, 3.0).unwrap();
        let s3 = 1.0 / 3f64.sqrt();
        let params = WaveParams::pair(2.0, 0.0, [s3, s3, s3], 1.5, 1.5).unwrap();
        let sol = two_body_pair_solution(&body, &params, [1.0, 0.0, 0.0]).unwrap();
        let report = ode_residual(&sol, &body, &params, &wgrid()).unwrap();
        assert!(report.max_rel_residual <= 1e-12, "{report:?}");
    }

    #[test]
    fn collision_solution_reports_ncme_equation() {
        let body = BodyConfig::new(1.0, 1.0, 2.0).unwrap();
        let sol = ncme_collision_solution(&body, [1.0, 0.0, 0.0]).unwrap();
        let params = WaveParams::newtonian(2);
        let report = ode_residual(&sol, &body, &params, &wgrid()).unwrap();
        assert_eq!(report.equation_id, EquationId::NcmeOde);
        assert!(report.max_rel_residual <= 1e-10);
    }

    #[test]
    fn grid_point_outside_domain_is_rejected() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(1.0, 0.0, [0.0; 3], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            ode_residual(&sol, &body, &params, &[1.0, -0.5]),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn pde_residual_of_exact_field_converges_at_order_two() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(2.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [0.0, 1.0, 0.0]).unwrap();
        let field = traveling_wave_field(&sol, &params);
        // Box centered near w = 2 on the positive side.
        let lattice = Lattice::new(vec![2.0, 0.0, 0.0], 0.0, 4, 1e-2).unwrap();
        let reports =
            companion_pde_sweep(&field, &params, &lattice, |v| gravity_rhs(&body, v).unwrap(), 2)
                .unwrap();
        assert_eq!(reports.len(), 2);
        let order = reports[1].estimated_order.unwrap();
        assert!((1.8..=2.2).contains(&order), "order = {order}");
    }

    #[test]
    fn constant_field_with_zero_rhs_is_exact() {
        let params = WaveParams::relative(1.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let field = |_: &[f64], _: f64| {
            StackedVector::new(vec![3.0, -1.0, 2.0], 3, 1).unwrap()
        };
        let zero = |v: &StackedVector| {
            StackedVector::new(vec![0.0; v.len()], v.block_dim(), v.block_count()).unwrap()
        };
        let lattice = Lattice::new(vec![5.0, 0.0, 0.0], 0.0, 4, 1e-2).unwrap();
        let report = companion_pde_residual(&field, &params, &lattice, zero).unwrap();
        assert_eq!(report.max_abs_residual, 0.0);
        assert_eq!(report.max_rel_residual, 0.0);
    }

    #[test]
    fn lattice_crossing_the_front_is_rejected() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(2.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [0.0, 1.0, 0.0]).unwrap();
        let field = traveling_wave_field(&sol, &params);
        // Box centered on w = 0.
        let lattice = Lattice::new(vec![-0.02, 0.0, 0.0], 0.0, 4, 1e-2).unwrap();
        let err = companion_pde_residual(&field, &params, &lattice, |v| {
            gravity_rhs(&body, v).unwrap()
        })
        .unwrap_err();
        assert!(matches!(err, Error::SingularLattice { .. }));
    }

    #[test]
    fn quadratic_time_field_gives_exact_linear_wave_residual() {
        // Ψ(r̃, t) = t² is not a traveling profile: Ψ_tt = 2, ΔΨ = 0, so
        // the residual is exactly 2‖v‖². Dyadic lattice coordinates keep
        // every squared value exact in f64.
        let params = WaveParams::block_constant(
            1.0,
            0.0,
            StackedVector::new(vec![1.0, 0.0, 0.0], 3, 1).unwrap(),
            &[1.0],
            1,
        )
        .unwrap();
        let field = |_: &[f64], t: f64| StackedVector::new(vec![t * t], 1, 1).unwrap();
        let lattice = Lattice::new(vec![2.0, 0.0, 0.0], 0.25, 4, 0.0078125).unwrap();
        let report = linear_wave_residual(&field, &params, &lattice).unwrap();
        assert_eq!(report.max_abs_residual, 2.0);
    }

    #[test]
    fn zero_v_is_inapplicable_for_linear_wave() {
        let params = WaveParams::relative(1.0, 0.0, [0.0; 3], 1.0).unwrap();
        let field = |_: &[f64], t: f64| StackedVector::new(vec![t * t], 1, 1).unwrap();
        let lattice = Lattice::new(vec![2.0, 0.0, 0.0], 0.0, 4, 1e-2).unwrap();
        assert!(matches!(
            linear_wave_residual(&field, &params, &lattice),
            Err(Error::Inapplicable(_))
        ));
    }

    #[test]
    fn smooth_traveling_profiles_pass_linear_wave_at_order_two() {
        let params = WaveParams::relative(1.5, 0.0, [0.6, 0.8, 0.0], 1.0).unwrap();
        let lattice = Lattice::new(vec![3.0, 1.0, -1.0], 0.5, 4, 1e-2).unwrap();
        let profiles: Vec<(&str, Box<dyn Fn(f64) -> f64 + Sync>)> = vec![
            ("sin", Box::new(f64::sin)),
            ("exp", Box::new(|w: f64| (0.3 * w).exp())),
            ("quintic", Box::new(|w: f64| w.powi(5) - 2.0 * w.powi(3))),
        ];
        for (name, g) in &profiles {
            let field = |r: &[f64], t: f64| {
                let w = crate::model::compute_wave_argument(&params, r, t).unwrap();
                StackedVector::new(vec![g(w), 2.0 * g(w), 0.5 * g(w)], 3, 1).unwrap()
            };
            let reports = linear_wave_sweep(&field, &params, &lattice, 2).unwrap();
            let order = reports[1].estimated_order.unwrap();
            assert!((1.7..=2.3).contains(&order), "{name}: order = {order}");
        }
    }

    #[test]
    fn reports_are_deterministic() {
        let body = BodyConfig::new(1.0, 1.0, 1.0).unwrap();
        let params = WaveParams::relative(2.0, 0.0, [1.0, 0.0, 0.0], 1.0).unwrap();
        let sol = relative_2body_solution(&body, &params, [0.0, 1.0, 0.0]).unwrap();
        let field = traveling_wave_field(&sol, &params);
        let lattice = Lattice::new(vec![2.0, 0.0, 0.0], 0.0, 4, 1e-2).unwrap();
        let runs: Vec<ResidualReport> = (0..2)
            .map(|_| {
                companion_pde_residual(&field, &params, &lattice, |v| {
                    gravity_rhs(&body, v).unwrap()
                })
                .unwrap()
            })
            .collect();
        assert_eq!(
            runs[0].max_abs_residual.to_bits(),
            runs[1].max_abs_residual.to_bits()
        );
        assert_eq!(
            runs[0].max_rel_residual.to_bits(),
            runs[1].max_rel_residual.to_bits()
        );
    }

    #[test]
    fn sweep_csv_has_expected_columns() {
        let params = WaveParams::relative(1.5, 0.0, [0.6, 0.8, 0.0], 1.0).unwrap();
        let lattice = Lattice::new(vec![3.0, 1.0, -1.0], 0.5, 4, 1e-2).unwrap();
        let field = |r: &[f64], t: f64| {
            let w = crate::model::compute_wave_argument(&params, r, t).unwrap();
            StackedVector::new(vec![w.sin(); 3], 3, 1).unwrap()
        };
        let reports = linear_wave_sweep(&field, &params, &lattice, 3).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &reports).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "h,max_abs,max_rel,order");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].ends_with(','));
        assert!(!lines[2].ends_with(','));
    }
}
