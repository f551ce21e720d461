//! Wave-front geometry.
//!
//! The space-time gradient of a power-law traveling wave scales as
//! |w|^(−1/3), so it is unbounded exactly on the hyperplane w = 0: that
//! locus is the front. At a fixed time t (with c = 0) the front in the
//! spatial domain is the plane v·r̃ = μt. Sweeping the direction vector
//! over the unit sphere produces the family of planes tangent to the
//! sphere of radius μt; relabeling the coordinates as spherical
//! (ρ̃, θ̃, φ̃) or cylindrical (q̃, θ̃, z̃) with v = (1, 0, 0) turns the same
//! condition into the sphere ρ̃ = μt or the z-axis cylinder q̃ = μt. The
//! charts are pure relabelings — no metric factors enter the wave
//! argument.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::WaveParams;
use crate::numeric::{cross3, d1_abs_pow_two_thirds, log_log_slope, norm3, scale3};
use crate::solutions::PowerLawSolution;

/// Interpretation of the three abstract spatial coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoordinateChart {
    Cartesian,
    Spherical,
    Cylindrical,
}

impl CoordinateChart {
    /// Labels of (x̃₁, x̃₂, x̃₃) in this chart.
    pub fn axis_labels(&self) -> [&'static str; 3] {
        match self {
            CoordinateChart::Cartesian => ["x", "y", "z"],
            CoordinateChart::Spherical => ["rho", "theta", "phi"],
            CoordinateChart::Cylindrical => ["q", "theta", "z"],
        }
    }
}

impl std::str::FromStr for CoordinateChart {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cartesian" => Ok(CoordinateChart::Cartesian),
            "spherical" => Ok(CoordinateChart::Spherical),
            "cylindrical" => Ok(CoordinateChart::Cylindrical),
            other => Err(Error::Config(format!(
                "unknown chart {other:?} (expected cartesian|spherical|cylindrical)"
            ))),
        }
    }
}

/// Mesh density for sampled surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshResolution {
    pub rows: usize,
    pub cols: usize,
}

impl MeshResolution {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows < 2 || cols < 1 {
            return Err(Error::InvalidParameter(format!(
                "mesh resolution {rows}x{cols} too small (need rows ≥ 2, cols ≥ 1)"
            )));
        }
        Ok(Self { rows, cols })
    }

    /// Latitude-longitude default for spheres.
    pub fn sphere_default() -> Self {
        Self { rows: 64, cols: 128 }
    }

    /// Angle-height default for cylinders.
    pub fn cylinder_default() -> Self {
        Self { rows: 64, cols: 64 }
    }

    /// Patch default for tangent planes.
    pub fn plane_default() -> Self {
        Self { rows: 16, cols: 16 }
    }
}

/// One member of the tangent-plane family: {x : normal·x = offset},
/// touching the sphere of radius `offset` at `tangency`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentPlane {
    pub normal: [f64; 3],
    pub offset: f64,
    pub tangency: [f64; 3],
}

/// Geometric kind of a front surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum FrontShape {
    TangentPlaneFamily { planes: Vec<TangentPlane> },
    Sphere,
    Cylinder,
}

impl FrontShape {
    fn name(&self) -> &'static str {
        match self {
            FrontShape::TangentPlaneFamily { .. } => "tangent-plane-family",
            FrontShape::Sphere => "sphere",
            FrontShape::Cylinder => "cylinder",
        }
    }
}

/// A sampled front locus at fixed time in a named chart. Sample points
/// live in the value space (ordinary Euclidean coordinates) in
/// deterministic (row, column) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontSurface {
    pub chart: CoordinateChart,
    pub time: f64,
    pub mu: f64,
    pub shape: FrontShape,
    pub samples: Vec<[f64; 3]>,
}

/// Serializable header of a [`FrontSurface`] (the vertex list goes to CSV
/// instead).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontHeader {
    pub chart: CoordinateChart,
    pub axes: [String; 3],
    pub mu: f64,
    pub t: f64,
    pub shape: String,
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub planes: Option<Vec<TangentPlane>>,
}

impl FrontSurface {
    /// Signed radius μt shared by all three constructions.
    pub fn radius(&self) -> f64 {
        self.mu * self.time
    }

    pub fn header(&self) -> FrontHeader {
        let labels = self.chart.axis_labels();
        FrontHeader {
            chart: self.chart,
            axes: [labels[0].into(), labels[1].into(), labels[2].into()],
            mu: self.mu,
            t: self.time,
            shape: self.shape.name().into(),
            radius: self.radius(),
            planes: match &self.shape {
                FrontShape::TangentPlaneFamily { planes } => Some(planes.clone()),
                _ => None,
            },
        }
    }

    /// Vertex list as CSV rows (x, y, z).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y,z")?;
        for p in &self.samples {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p[0], p[1], p[2])?;
        }
        Ok(())
    }
}

/// The front locus at fixed time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrontLocus {
    /// Hessian normal form {r̃ : normal·r̃ = offset} with a unit normal.
    Plane { normal: Vec<f64>, offset: f64 },
    /// v = 0: no spatial front; the gradient is singular only at the
    /// single instant t* = c/μ.
    TimeOnly { t_star: f64 },
}

/// Space-time gradient of component `component` of block `block`:
/// (2/3)·sign(w)·|w|^(−1/3)·(v₁, v₂, v₃, −μ)·s, where s is the block's
/// amplitude component. Real branch matches the solution's dΨ/dw.
pub fn gradient_vector_block(
    sol: &PowerLawSolution,
    params: &WaveParams,
    w: f64,
    block: usize,
    component: usize,
) -> Result<[f64; 4]> {
    if params.v().len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: params.v().len(),
        });
    }
    if block >= sol.block_count() || component >= 3 {
        return Err(Error::InvalidParameter(format!(
            "block {block} / component {component} out of range"
        )));
    }
    if w == 0.0 {
        return Err(Error::SingularFront);
    }
    let s = sol.coefficient(block)[component];
    let pre = d1_abs_pow_two_thirds(w) * s;
    let v = params.v().flatten();
    Ok([pre * v[0], pre * v[1], pre * v[2], pre * -params.mu()])
}

/// Block-0 gradient, the common case for single-block solutions.
pub fn gradient_vector(
    sol: &PowerLawSolution,
    params: &WaveParams,
    w: f64,
    component: usize,
) -> Result<[f64; 4]> {
    gradient_vector_block(sol, params, w, 0, component)
}

/// Norm of the space-time gradient:
/// (2/3)·|w|^(−1/3)·√(‖v‖²+μ²)·|s|.
pub fn gradient_magnitude_block(
    sol: &PowerLawSolution,
    params: &WaveParams,
    w: f64,
    block: usize,
    component: usize,
) -> Result<f64> {
    if params.v().len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: params.v().len(),
        });
    }
    if block >= sol.block_count() || component >= 3 {
        return Err(Error::InvalidParameter(format!(
            "block {block} / component {component} out of range"
        )));
    }
    if w == 0.0 {
        return Err(Error::SingularFront);
    }
    let s = sol.coefficient(block)[component];
    let scale = (params.v_norm_sq() + params.mu() * params.mu()).sqrt();
    Ok(2.0 / 3.0 / crate::numeric::cbrt(w.abs()) * scale * s.abs())
}

/// Block-0 gradient magnitude.
pub fn gradient_magnitude(
    sol: &PowerLawSolution,
    params: &WaveParams,
    w: f64,
    component: usize,
) -> Result<f64> {
    gradient_magnitude_block(sol, params, w, 0, component)
}

/// Decade grid 10⁻¹ … 10⁻⁶ used by the blow-up exponent fits.
pub fn decade_grid() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

/// Least-squares slope of log(gradient magnitude) against log|w|; −1/3
/// for the power-law profiles.
pub fn fit_blowup_exponent(
    sol: &PowerLawSolution,
    params: &WaveParams,
    block: usize,
    component: usize,
    ws: &[f64],
) -> Result<f64> {
    if ws.len() < 2 {
        return Err(Error::InvalidParameter("blow-up fit needs at least 2 samples".into()));
    }
    let mut pts = Vec::with_capacity(ws.len());
    for &w in ws {
        let mag = gradient_magnitude_block(sol, params, w, block, component)?;
        if mag == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "component {component} of block {block} has zero amplitude; nothing to fit"
            )));
        }
        pts.push((w.abs(), mag));
    }
    Ok(log_log_slope(&pts))
}

/// Threshold-crossing detector for sampled fields: a wave argument counts
/// as "on the front" once the gradient magnitude exceeds
/// `threshold_factor` times its value at |w| = 1. For the |w|^(−1/3) law
/// that band is exactly |w| < threshold_factor⁻³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontDetector {
    pub threshold_factor: f64,
}

impl Default for FrontDetector {
    fn default() -> Self {
        Self { threshold_factor: 1e6 }
    }
}

impl FrontDetector {
    pub fn new(threshold_factor: f64) -> Result<Self> {
        if !(threshold_factor > 1.0) || !threshold_factor.is_finite() {
            return Err(Error::InvalidParameter(
                "detector threshold factor must be finite and > 1".into(),
            ));
        }
        Ok(Self { threshold_factor })
    }

    /// Half-width of the detection band around w = 0.
    pub fn band_halfwidth(&self) -> f64 {
        self.threshold_factor.powi(-3)
    }

    /// Whether the gradient magnitude at w crosses the threshold.
    pub fn is_front(
        &self,
        sol: &PowerLawSolution,
        params: &WaveParams,
        w: f64,
        block: usize,
        component: usize,
    ) -> Result<bool> {
        if w == 0.0 {
            return Ok(true);
        }
        let here = gradient_magnitude_block(sol, params, w, block, component)?;
        let reference = gradient_magnitude_block(sol, params, 1.0, block, component)?;
        Ok(here > self.threshold_factor * reference)
    }
}

/// The spatial front at time t: the plane {r̃ : v·r̃ = μt − c} in Hessian
/// normal form, or the time-only singularity when v = 0.
pub fn front_locus_time(params: &WaveParams, t: f64) -> FrontLocus {
    let v = params.v().flatten();
    let norm = params.v_norm();
    if norm == 0.0 {
        return FrontLocus::TimeOnly { t_star: params.c() / params.mu() };
    }
    FrontLocus::Plane {
        normal: v.iter().map(|x| x / norm).collect(),
        offset: (params.mu() * t - params.c()) / norm,
    }
}

fn check_unit(u: &[f64; 3]) -> Result<()> {
    let n = norm3(u);
    if u.iter().any(|x| !x.is_finite()) || (n - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "direction must be a unit vector (‖U‖ = {n})"
        )));
    }
    Ok(())
}

/// Orthonormal in-plane basis for a unit normal.
fn plane_basis(normal: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
    // Seed with the coordinate axis least aligned with the normal.
    let abs = [normal[0].abs(), normal[1].abs(), normal[2].abs()];
    let seed = if abs[0] <= abs[1] && abs[0] <= abs[2] {
        [1.0, 0.0, 0.0]
    } else if abs[1] <= abs[2] {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1_raw = cross3(&seed, normal);
    let e1 = scale3(1.0 / norm3(&e1_raw), &e1_raw);
    let e2 = cross3(normal, &e1);
    (e1, e2)
}

/// The tangent-plane family: for each unit direction U the plane
/// U·x = μt, touching the sphere of radius μt at μtU. Each plane is
/// sampled as a square patch around its tangency point.
pub fn tangent_plane_family(
    mu: f64,
    t: f64,
    directions: &[[f64; 3]],
    mesh: &MeshResolution,
) -> Result<FrontSurface> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParameter("μ must be finite and nonzero".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t = {t} must be ≥ 0")));
    }
    if directions.is_empty() {
        return Err(Error::InvalidParameter("tangent-plane family needs directions".into()));
    }
    let offset = mu * t;
    let mut planes = Vec::with_capacity(directions.len());
    for u in directions {
        check_unit(u)?;
        let tangency = scale3(offset, u);
        let identity_gap = (u[0] * tangency[0] + u[1] * tangency[1] + u[2] * tangency[2]
            - offset)
            .abs();
        if identity_gap > 1e-12 * offset.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "tangency identity violated by {identity_gap:e}"
            )));
        }
        planes.push(TangentPlane { normal: *u, offset, tangency });
    }

    let half = offset.abs().max(1.0);
    let (rows, cols) = (mesh.rows, mesh.cols);
    let samples: Vec<[f64; 3]> = planes
        .par_iter()
        .flat_map_iter(|plane| {
            let (e1, e2) = plane_basis(&plane.normal);
            let tangency = plane.tangency;
            (0..rows).flat_map(move |i| {
                let a = -half + 2.0 * half * i as f64 / (rows - 1) as f64;
                (0..cols).map(move |j| {
                    let b = if cols == 1 {
                        0.0
                    } else {
                        -half + 2.0 * half * j as f64 / (cols - 1) as f64
                    };
                    [
                        tangency[0] + a * e1[0] + b * e2[0],
                        tangency[1] + a * e1[1] + b * e2[1],
                        tangency[2] + a * e1[2] + b * e2[2],
                    ]
                })
            })
        })
        .collect();

    Ok(FrontSurface {
        chart: CoordinateChart::Cartesian,
        time: t,
        mu,
        shape: FrontShape::TangentPlaneFamily { planes },
        samples,
    })
}

fn sphere_mesh(radius: f64, mesh: &MeshResolution) -> Vec<[f64; 3]> {
    let (rows, cols) = (mesh.rows, mesh.cols);
    (0..rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let polar = std::f64::consts::PI * i as f64 / (rows - 1) as f64;
            let (sin_p, cos_p) = polar.sin_cos();
            (0..cols).map(move |j| {
                let azimuth = 2.0 * std::f64::consts::PI * j as f64 / cols as f64;
                let (sin_a, cos_a) = azimuth.sin_cos();
                [radius * sin_p * cos_a, radius * sin_p * sin_a, radius * cos_p]
            })
        })
        .collect()
}

fn cylinder_mesh(radius: f64, mesh: &MeshResolution) -> Vec<[f64; 3]> {
    let (rows, cols) = (mesh.rows, mesh.cols);
    (0..rows)
        .into_par_iter()
        .flat_map_iter(|i| {
            let z = -2.0 * radius + 4.0 * radius * i as f64 / (rows - 1) as f64;
            (0..cols).map(move |j| {
                let azimuth = 2.0 * std::f64::consts::PI * j as f64 / cols as f64;
                let (sin_a, cos_a) = azimuth.sin_cos();
                [radius * cos_a, radius * sin_a, z]
            })
        })
        .collect()
}

/// Front surface in a named chart.
///
/// The spherical and cylindrical constructions take the covector
/// v = (1, 0, 0) with c = 0, under which w = 0 reads ρ̃ = μt (a sphere in
/// the value space) or q̃ = μt (a z-axis cylinder with base
/// x̃² + ỹ² = (μt)², z free). The Cartesian chart treats v as a single
/// unit direction and returns its tangent plane. Any other (chart, v, c)
/// combination is rejected.
pub fn front_surface_chart(
    chart: CoordinateChart,
    mu: f64,
    t: f64,
    v: [f64; 3],
    c: f64,
    mesh: &MeshResolution,
) -> Result<FrontSurface> {
    if mu == 0.0 || !mu.is_finite() {
        return Err(Error::InvalidParameter("μ must be finite and nonzero".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t = {t} must be ≥ 0")));
    }
    if c != 0.0 {
        return Err(Error::UnsupportedChart(format!(
            "chart constructions fix c = 0 (got c = {c})"
        )));
    }
    match chart {
        CoordinateChart::Cartesian => {
            if check_unit(&v).is_err() {
                return Err(Error::UnsupportedChart(format!(
                    "cartesian front needs a unit covector v = U (got {v:?})"
                )));
            }
            tangent_plane_family(mu, t, &[v], mesh)
        }
        CoordinateChart::Spherical | CoordinateChart::Cylindrical => {
            if v != [1.0, 0.0, 0.0] {
                return Err(Error::UnsupportedChart(format!(
                    "{chart:?} front is constructed with v = (1, 0, 0); got {v:?}"
                )));
            }
            let radius = mu * t;
            let (shape, samples) = match chart {
                CoordinateChart::Spherical => (FrontShape::Sphere, sphere_mesh(radius, mesh)),
                CoordinateChart::Cylindrical => {
                    (FrontShape::Cylinder, cylinder_mesh(radius, mesh))
                }
                CoordinateChart::Cartesian => unreachable!(),
            };
            Ok(FrontSurface { chart, time: t, mu, shape, samples })
        }
    }
}

/// Comparison of the two gradient families of a coupled pair solution:
/// both must blow up with exponent −1/3 on the same locus w = 0, with a
/// constant magnitude ratio |θ₁/θ₂|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontEquivalence {
    pub slope_block1: f64,
    pub slope_block2: f64,
    /// Block-1 over block-2 gradient magnitude; constant in w.
    pub magnitude_ratio: f64,
    /// The shared locus at unit time.
    pub locus: FrontLocus,
    pub same_locus: bool,
}

/// Checks that the two components of a pair solution front on the same
/// hyperplane w = 0 and reports the common description.
pub fn two_body_front_equivalence(
    sol: &PowerLawSolution,
    params: &WaveParams,
) -> Result<FrontEquivalence> {
    if sol.block_count() != 2 {
        return Err(Error::InvalidParameter(
            "front equivalence needs a two-block solution".into(),
        ));
    }
    // Fit along the largest amplitude component of each block.
    let pick = |block: usize| -> usize {
        let coeff = sol.coefficient(block);
        (0..3)
            .max_by(|&a, &b| coeff[a].abs().partial_cmp(&coeff[b].abs()).unwrap())
            .unwrap()
    };
    let grid = decade_grid();
    let slope_block1 = fit_blowup_exponent(sol, params, 0, pick(0), &grid)?;
    let slope_block2 = fit_blowup_exponent(sol, params, 1, pick(1), &grid)?;
    let c1 = pick(0);
    let magnitude_ratio = gradient_magnitude_block(sol, params, 1.0, 0, c1)?
        / gradient_magnitude_block(sol, params, 1.0, 1, c1)?;
    let tol = 0.01;
    let same_locus =
        (slope_block1 + 1.0 / 3.0).abs() <= tol && (slope_block2 + 1.0 / 3.0).abs() <= tol;
    Ok(FrontEquivalence {
        slope_block1,
        slope_block2,
        magnitude_ratio,
        locus: front_locus_time(params, 1.0),
        same_locus,
    })
}
