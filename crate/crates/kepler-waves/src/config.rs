//! Run configuration: a flat INI-style key-value file drives every
//! command, so a run is reproducible from one small text artifact.
//!
//! ```text
//! [body]
//! G = 1.0
//! m1 = 1.0
//! m2 = 1.0
//!
//! [wave]
//! mu = 1.0
//! c = 0.0
//! v = 0, 0, 0
//! lambda12_sq = 1.0
//!
//! [solution]
//! scenario = rel2body
//! direction = 1, 0, 0
//!
//! [verify]
//! checks = ode, pde, rk4
//!
//! [front]
//! chart = spherical
//! times = 1, 2, 3
//!
//! [output]
//! dir = out
//! seed = 0
//! ```
//!
//! Full-line comments start with `#` or `;`. Lists are comma-separated.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::front::{CoordinateChart, MeshResolution};
use crate::model::{BodyConfig, WaveParams};
use crate::solutions::{
    ncme_collision_solution, relative_2body_solution, two_body_pair_solution, PowerLawSolution,
};

/// Which solution family a run constructs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    RelTwoBody,
    TwoBody,
    NcmeCollision,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rel2body" => Ok(Scenario::RelTwoBody),
            "twobody" => Ok(Scenario::TwoBody),
            "ncme-collision" => Ok(Scenario::NcmeCollision),
            other => Err(Error::Config(format!(
                "unknown scenario {other:?} (expected rel2body|twobody|ncme-collision)"
            ))),
        }
    }
}

/// One verification pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Ode,
    Pde,
    LinearWave,
    Rk4,
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::Ode => "ode",
            Check::Pde => "pde",
            Check::LinearWave => "linear-wave",
            Check::Rk4 => "rk4",
        }
    }
}

impl std::str::FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ode" => Ok(Check::Ode),
            "pde" => Ok(Check::Pde),
            "linear-wave" => Ok(Check::LinearWave),
            "rk4" => Ok(Check::Rk4),
            other => Err(Error::Config(format!(
                "unknown check {other:?} (expected ode|pde|linear-wave|rk4)"
            ))),
        }
    }
}

/// Raw wave-section values; which λ² keys must be present depends on the
/// scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSettings {
    pub mu: f64,
    pub c: f64,
    pub v: [f64; 3],
    pub lambda12_sq: Option<f64>,
    pub lambda1_sq: Option<f64>,
    pub lambda2_sq: Option<f64>,
}

/// Which verification passes to run, plus the finite-difference sweep
/// geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub checks: Vec<Check>,
    /// Base finite-difference spacing (halved once for the order check).
    pub pde_h: f64,
    /// Intervals per lattice axis at the base spacing.
    pub pde_steps: usize,
    /// Wave argument at the center of the sample box.
    pub pde_w_center: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            checks: vec![Check::Ode, Check::Pde, Check::Rk4],
            pde_h: 1e-2,
            pde_steps: 4,
            pde_w_center: 2.0,
        }
    }
}

/// Front export request.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontSettings {
    pub chart: CoordinateChart,
    pub times: Vec<f64>,
    pub mesh: Option<MeshResolution>,
    /// Number of seeded random unit directions (cartesian chart).
    pub directions: usize,
    /// Chart covector; defaults to (1, 0, 0) as the chart constructions
    /// require.
    pub v: [f64; 3],
}

/// Everything a command needs, parsed and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub body: BodyConfig,
    pub wave: WaveSettings,
    pub scenario: Scenario,
    pub direction: [f64; 3],
    pub verify: VerifySettings,
    pub front: Option<FrontSettings>,
    pub output_dir: PathBuf,
    pub seed: u64,
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_ini(text: &str) -> Result<Sections> {
    let mut sections: Sections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            sections.entry(name.clone()).or_default();
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "line {}: expected `key = value` or `[section]`, got {line:?}",
                lineno + 1
            )));
        };
        let Some(section) = &current else {
            return Err(Error::Config(format!(
                "line {}: key {key:?} appears before any [section]",
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let entries = sections.get_mut(section).expect("section was just inserted");
        if entries.insert(key.clone(), value).is_some() {
            return Err(Error::Config(format!(
                "line {}: duplicate key {key:?} in section [{section}]",
                lineno + 1
            )));
        }
    }
    Ok(sections)
}

struct Section<'a> {
    name: &'a str,
    entries: Option<&'a BTreeMap<String, String>>,
}

impl<'a> Section<'a> {
    fn raw(&self, key: &str) -> Option<&'a str> {
        self.entries.and_then(|e| e.get(key)).map(String::as_str)
    }

    fn require(&self, key: &str) -> Result<&'a str> {
        self.raw(key).ok_or_else(|| {
            Error::Config(format!("missing required key {}.{key}", self.name))
        })
    }

    fn f64(&self, key: &str) -> Result<f64> {
        parse_f64(self.name, key, self.require(key)?)
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.raw(key).map(|v| parse_f64(self.name, key, v)).transpose()
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64_opt(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                Error::Config(format!("{}.{key}: expected an integer, got {v:?}", self.name))
            }),
        }
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| {
                Error::Config(format!("{}.{key}: expected an integer, got {v:?}", self.name))
            }),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.require(key)?;
        raw.split(',')
            .map(|item| parse_f64(self.name, key, item.trim()))
            .collect()
    }

    fn vec3(&self, key: &str) -> Result<[f64; 3]> {
        let list = self.f64_list(key)?;
        if list.len() != 3 {
            return Err(Error::Config(format!(
                "{}.{key}: expected 3 comma-separated numbers, got {}",
                self.name,
                list.len()
            )));
        }
        Ok([list[0], list[1], list[2]])
    }

    fn vec3_opt(&self, key: &str) -> Result<Option<[f64; 3]>> {
        if self.raw(key).is_none() {
            return Ok(None);
        }
        self.vec3(key).map(Some)
    }
}

fn parse_f64(section: &str, key: &str, value: &str) -> Result<f64> {
    value.trim().parse().map_err(|_| {
        Error::Config(format!("{section}.{key}: expected a number, got {value:?}"))
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let sections = parse_ini(text)?;
        let section = |name: &'static str| Section { name, entries: sections.get(name) };

        let body_sec = section("body");
        if body_sec.entries.is_none() {
            return Err(Error::Config("missing [body] section".into()));
        }
        let body = BodyConfig::new(
            body_sec.f64("G")?,
            body_sec.f64("m1")?,
            body_sec.f64("m2")?,
        )?;

        let wave_sec = section("wave");
        if wave_sec.entries.is_none() {
            return Err(Error::Config("missing [wave] section".into()));
        }
        let wave = WaveSettings {
            mu: wave_sec.f64("mu")?,
            c: wave_sec.f64_or("c", 0.0)?,
            v: wave_sec.vec3("v")?,
            lambda12_sq: wave_sec.f64_opt("lambda12_sq")?,
            lambda1_sq: wave_sec.f64_opt("lambda1_sq")?,
            lambda2_sq: wave_sec.f64_opt("lambda2_sq")?,
        };

        let sol_sec = section("solution");
        let scenario: Scenario = sol_sec.require("scenario")?.parse()?;
        let direction = sol_sec.vec3("direction")?;

        // Scenario-specific presence checks happen here so a bad config
        // fails before any command runs.
        match scenario {
            Scenario::RelTwoBody => {
                if wave.lambda12_sq.is_none() {
                    return Err(Error::Config(
                        "scenario rel2body requires wave.lambda12_sq".into(),
                    ));
                }
            }
            Scenario::TwoBody => {
                if wave.lambda1_sq.is_none() || wave.lambda2_sq.is_none() {
                    return Err(Error::Config(
                        "scenario twobody requires wave.lambda1_sq and wave.lambda2_sq".into(),
                    ));
                }
            }
            Scenario::NcmeCollision => {}
        }

        let verify_sec = section("verify");
        let defaults = VerifySettings::default();
        let verify = VerifySettings {
            checks: match verify_sec.raw("checks") {
                None => defaults.checks.clone(),
                Some(raw) => raw
                    .split(',')
                    .map(|item| item.trim().parse())
                    .collect::<Result<Vec<Check>>>()?,
            },
            pde_h: verify_sec.f64_or("pde_h", defaults.pde_h)?,
            pde_steps: verify_sec.usize_or("pde_steps", defaults.pde_steps)?,
            pde_w_center: verify_sec.f64_or("pde_w_center", defaults.pde_w_center)?,
        };

        let front_sec = section("front");
        let front = if front_sec.entries.is_some() {
            let chart: CoordinateChart = front_sec.require("chart")?.parse()?;
            let times = front_sec.f64_list("times")?;
            let mesh = match (front_sec.raw("mesh_rows"), front_sec.raw("mesh_cols")) {
                (None, None) => None,
                _ => Some(MeshResolution::new(
                    front_sec.usize_or("mesh_rows", 64)?,
                    front_sec.usize_or("mesh_cols", 64)?,
                )?),
            };
            Some(FrontSettings {
                chart,
                times,
                mesh,
                directions: front_sec.usize_or("directions", 16)?,
                v: front_sec.vec3_opt("v")?.unwrap_or([1.0, 0.0, 0.0]),
            })
        } else {
            None
        };

        let out_sec = section("output");
        let output_dir = PathBuf::from(out_sec.raw("dir").unwrap_or("out"));
        let seed = out_sec.u64_or("seed", 0)?;

        Ok(RunConfig {
            body,
            wave,
            scenario,
            direction,
            verify,
            front,
            output_dir,
            seed,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse(&text)
    }

    /// Wave parameters used by the scenario's solution constructor. The
    /// collision scenario lives in the time domain (w = t), so it ignores
    /// the configured wave values.
    pub fn wave_params(&self) -> Result<WaveParams> {
        match self.scenario {
            Scenario::RelTwoBody => WaveParams::relative(
                self.wave.mu,
                self.wave.c,
                self.wave.v,
                self.wave.lambda12_sq.expect("presence checked at parse time"),
            ),
            Scenario::TwoBody => WaveParams::pair(
                self.wave.mu,
                self.wave.c,
                self.wave.v,
                self.wave.lambda1_sq.expect("presence checked at parse time"),
                self.wave.lambda2_sq.expect("presence checked at parse time"),
            ),
            Scenario::NcmeCollision => Ok(WaveParams::newtonian(2)),
        }
    }

    /// Builds the scenario's solution.
    pub fn build_solution(&self) -> Result<PowerLawSolution> {
        match self.scenario {
            Scenario::RelTwoBody => {
                relative_2body_solution(&self.body, &self.wave_params()?, self.direction)
            }
            Scenario::TwoBody => {
                two_body_pair_solution(&self.body, &self.wave_params()?, self.direction)
            }
            Scenario::NcmeCollision => ncme_collision_solution(&self.body, self.direction),
        }
    }
}
