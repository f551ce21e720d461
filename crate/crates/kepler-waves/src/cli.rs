//! Command implementations behind the thin binary: construct a solution,
//! verify it against the independent checks, export front surfaces.
//!
//! Every command is driven by a [`RunConfig`] and writes its outputs under
//! the configured directory. Outputs are deterministic: the same config
//! and seed produce a byte-identical file tree.

use std::fs;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, UnitSphere};

use crate::config::{Check, RunConfig, Scenario};
use crate::error::{Error, Result};
use crate::front::{
    front_surface_chart, tangent_plane_family, CoordinateChart, FrontSurface, MeshResolution,
};
use crate::nbody::collision_crosscheck;
use crate::numeric::{linspace, norm3};
use crate::residual::{
    companion_pde_sweep, gravity_rhs, lattice_centered_at, linear_wave_sweep, ode_residual,
    traveling_wave_field, write_sweep_csv, ResidualReport,
};
use crate::solutions::{compute_thetas, PowerLawSolution};

/// Verification thresholds, fixed once here.
pub const ODE_MAX_REL: f64 = 1e-10;
pub const PDE_ORDER_RANGE: (f64, f64) = (1.8, 2.2);
pub const RK4_MAX_DEVIATION: f64 = 1e-6;
pub const RK4_MAX_ENERGY: f64 = 1e-8;
pub const RK4_MAX_ANGULAR_MOMENTUM: f64 = 1e-10;

/// Grid of wave arguments used by the `ode` check: w ∈ [0.5, 5], 51 points.
pub fn verification_w_grid() -> Vec<f64> {
    linspace(0.5, 5.0, 51)
}

fn format17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_json<T: serde::Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// What `solve` produced, plus a human-readable account.
#[derive(Debug)]
pub struct SolveOutcome {
    pub solution: PowerLawSolution,
    pub solution_path: PathBuf,
    pub summary: String,
}

/// Constructs the scenario's solution, writes `solution.json`, and
/// renders a summary of amplitudes and admissibility checks.
pub fn run_solve(config: &RunConfig) -> Result<SolveOutcome> {
    let solution = config.build_solution()?;
    fs::create_dir_all(&config.output_dir)?;
    let solution_path = config.output_dir.join("solution.json");
    write_json(&solution_path, &solution)?;

    let mut summary = String::new();
    let scenario_name = match config.scenario {
        Scenario::RelTwoBody => "rel2body",
        Scenario::TwoBody => "twobody",
        Scenario::NcmeCollision => "ncme-collision",
    };
    summary.push_str(&format!("scenario: {scenario_name}\n"));
    for (j, block) in solution.blocks().iter().enumerate() {
        let coeff = solution.coefficient(j);
        summary.push_str(&format!(
            "block {}: alpha = {}, ‖alpha·S‖ = {}\n",
            j + 1,
            format17(block.alpha),
            format17(norm3(&coeff)),
        ));
    }
    match config.scenario {
        Scenario::RelTwoBody => {
            let params = config.wave_params()?;
            let lambda = params.block_lambda_sq(1)?[0];
            let factor = params.wave_factor(lambda);
            summary.push_str(&format!(
                "wave factor μ²−λ₁₂²‖v‖² = {} > 0 ok\n",
                format17(factor)
            ));
        }
        Scenario::TwoBody | Scenario::NcmeCollision => {
            let params = config.wave_params()?;
            let thetas = compute_thetas(&config.body, &params)?;
            summary.push_str(&format!(
                "θ₁ = {}, θ₂ = {}, θ₁+θ₂ = {} > 0 ok\n",
                format17(thetas.theta1),
                format17(thetas.theta2),
                format17(thetas.sum()),
            ));
        }
    }
    summary.push_str(&format!("wrote {}\n", solution_path.display()));
    Ok(SolveOutcome { solution, solution_path, summary })
}

/// One verification pass result.
#[derive(Debug)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub detail: String,
    pub report_path: PathBuf,
}

/// What `verify` produced.
#[derive(Debug)]
pub struct VerifyOutcome {
    pub checks: Vec<CheckOutcome>,
}

impl VerifyOutcome {
    pub fn failures(&self) -> Vec<&CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{}: {} ({}) -> {}\n",
                c.check.name(),
                if c.passed { "pass" } else { "FAIL" },
                c.detail,
                c.report_path.display(),
            ));
        }
        out
    }
}

/// Runs the configured checks against the solution.
///
/// If `solution.json` already exists under the output directory it is
/// verified as-is (so a corrupted or hand-edited artifact fails loudly);
/// otherwise the solution is constructed fresh and written first.
pub fn run_verify(config: &RunConfig) -> Result<VerifyOutcome> {
    fs::create_dir_all(&config.output_dir)?;
    let solution_path = config.output_dir.join("solution.json");
    let solution: PowerLawSolution = if solution_path.exists() {
        serde_json::from_str(&fs::read_to_string(&solution_path)?)?
    } else {
        let sol = config.build_solution()?;
        write_json(&solution_path, &sol)?;
        sol
    };
    let params = config.wave_params()?;

    let mut checks = Vec::new();
    for &check in &config.verify.checks {
        let outcome = match check {
            Check::Ode => {
                let report = ode_residual(&solution, &config.body, &params, &verification_w_grid())?;
                let path = config.output_dir.join("ode_report.json");
                write_json(&path, &report)?;
                CheckOutcome {
                    check,
                    passed: report.max_rel_residual <= ODE_MAX_REL,
                    detail: format!("max_rel = {}", format17(report.max_rel_residual)),
                    report_path: path,
                }
            }
            Check::Pde => {
                let lattice = lattice_centered_at(
                    &params,
                    config.verify.pde_w_center,
                    config.verify.pde_steps,
                    config.verify.pde_h,
                )?;
                let field = traveling_wave_field(&solution, &params);
                let body = config.body;
                let reports =
                    companion_pde_sweep(&field, &params, &lattice, |v| {
                        gravity_rhs(&body, v).expect("solution blocks stay separated on the lattice")
                    }, 2)?;
                let path = config.output_dir.join("pde_report.json");
                write_json(&path, reports.last().unwrap())?;
                let mut csv = Vec::new();
                write_sweep_csv(&mut csv, &reports)?;
                fs::write(config.output_dir.join("pde_sweep.csv"), csv)?;
                check_order(check, reports, path)
            }
            Check::LinearWave => {
                let lattice = lattice_centered_at(
                    &params,
                    config.verify.pde_w_center,
                    config.verify.pde_steps,
                    config.verify.pde_h,
                )?;
                let field = traveling_wave_field(&solution, &params);
                let reports = linear_wave_sweep(&field, &params, &lattice, 2)?;
                let path = config.output_dir.join("linear_wave_report.json");
                write_json(&path, reports.last().unwrap())?;
                let mut csv = Vec::new();
                write_sweep_csv(&mut csv, &reports)?;
                fs::write(config.output_dir.join("linear_wave_sweep.csv"), csv)?;
                check_order(check, reports, path)
            }
            Check::Rk4 => {
                let (report, trajectory) =
                    collision_crosscheck(&config.body, config.direction, 1.0, 2.0, 1e-3)?;
                let path = config.output_dir.join("rk4_report.json");
                write_json(&path, &report)?;
                let mut csv = Vec::new();
                trajectory.write_csv(&mut csv)?;
                fs::write(config.output_dir.join("rk4_trajectory.csv"), csv)?;
                let passed = report.max_deviation <= RK4_MAX_DEVIATION
                    && report.max_abs_energy <= RK4_MAX_ENERGY
                    && report.max_angular_momentum <= RK4_MAX_ANGULAR_MOMENTUM;
                CheckOutcome {
                    check,
                    passed,
                    detail: format!(
                        "deviation = {}, |E| = {}, ‖L‖ = {}",
                        format17(report.max_deviation),
                        format17(report.max_abs_energy),
                        format17(report.max_angular_momentum),
                    ),
                    report_path: path,
                }
            }
        };
        checks.push(outcome);
    }
    Ok(VerifyOutcome { checks })
}

fn check_order(check: Check, reports: Vec<ResidualReport>, path: PathBuf) -> CheckOutcome {
    let order = reports.last().and_then(|r| r.estimated_order);
    let passed = order.is_some_and(|o| o >= PDE_ORDER_RANGE.0 && o <= PDE_ORDER_RANGE.1);
    CheckOutcome {
        check,
        passed,
        detail: match order {
            Some(o) => format!("estimated order = {}", format17(o)),
            None => "estimated order unavailable".into(),
        },
        report_path: path,
    }
}

/// What `front` produced.
#[derive(Debug)]
pub struct FrontOutcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Deterministic seeded unit directions for the cartesian tangent-plane
/// family.
pub fn seeded_directions(seed: u64, count: usize) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| UnitSphere.sample(&mut rng)).collect()
}

/// Exports one front surface per requested time as
/// `front_<index>.json` + `front_<index>.csv` with zero-padded indices.
pub fn run_front(config: &RunConfig) -> Result<FrontOutcome> {
    let settings = config.front.as_ref().ok_or_else(|| {
        Error::Config("front command needs a [front] section".into())
    })?;
    fs::create_dir_all(&config.output_dir)?;

    let mut files = Vec::new();
    let mut summary = String::new();
    for (index, &t) in settings.times.iter().enumerate() {
        let surface: FrontSurface = match settings.chart {
            CoordinateChart::Cartesian => {
                let mesh = settings.mesh.unwrap_or_else(MeshResolution::plane_default);
                let directions = seeded_directions(config.seed, settings.directions);
                tangent_plane_family(config.wave.mu, t, &directions, &mesh)?
            }
            chart => {
                let mesh = settings.mesh.unwrap_or_else(|| match chart {
                    CoordinateChart::Spherical => MeshResolution::sphere_default(),
                    _ => MeshResolution::cylinder_default(),
                });
                front_surface_chart(chart, config.wave.mu, t, settings.v, config.wave.c, &mesh)?
            }
        };

        let json_path = config.output_dir.join(format!("front_{index:03}.json"));
        let csv_path = config.output_dir.join(format!("front_{index:03}.csv"));
        write_json(&json_path, &surface.header())?;
        let mut csv = Vec::new();
        surface.write_csv(&mut csv)?;
        fs::write(&csv_path, csv)?;
        summary.push_str(&format!(
            "t = {}: {} radius {} ({} vertices) -> {}\n",
            format17(t),
            surface.header().shape,
            format17(surface.radius()),
            surface.samples.len(),
            csv_path.display(),
        ));
        files.push(json_path);
        files.push(csv_path);
    }
    Ok(FrontOutcome { files, summary })
}

/// Process exit code for an error, per the command contract:
/// 2 inadmissible parameters, 3 failed verification, 4 singular lattice,
/// 5 unsupported chart, 1 anything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::DegenerateWaveSpeed { .. }
        | Error::SignInconsistency { .. }
        | Error::InadmissibleParameters { .. } => 2,
        Error::VerificationFailed(_) => 3,
        Error::SingularLattice { .. } => 4,
        Error::UnsupportedChart(_) => 5,
        _ => 1,
    }
}
