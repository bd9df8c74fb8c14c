//! Declarative run configuration: one TOML file describing the physical
//! point plus optional sweep, optimizer, and oracle sections. All physical
//! quantities are in natural units with the cavity length as the reference
//! scale.

use serde::Deserialize;

use cavity_switch::entanglement::Sign;
use cavity_switch::kinematics::{self, InteractionRegions, TrajectoryParams};
use cavity_switch::{CavityConfig, Error, ProtocolParams, Result};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub cavity: CavitySection,
    pub interaction: InteractionSection,
    pub trajectory: Option<TrajectorySection>,
    pub detector: DetectorSection,
    #[serde(default)]
    pub postselect: PostselectSection,
    pub sweep: Option<SweepSection>,
    pub optimize: Option<OptimizeSection>,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySection {
    pub length: f64,
    #[serde(default)]
    pub mass: f64,
    pub n_modes: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionSection {
    pub x1: f64,
    pub x2: f64,
    /// Cavity-frame offset of the later window. Give either this or a
    /// `[trajectory]` section, not both.
    pub delta_tau: Option<f64>,
    pub duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    pub accel_up: f64,
    pub accel_down: f64,
    pub coordinate_duration: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostselectSection {
    /// "plus" or "minus".
    pub sign: String,
}

impl Default for PostselectSection {
    fn default() -> Self {
        Self { sign: "plus".into() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default)]
    pub axis: Vec<AxisSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: ParamName,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub vars: Vec<VarSpec>,
    #[serde(default = "default_refine_iters")]
    pub refine_iters: usize,
}

fn default_refine_iters() -> usize {
    300
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarSpec {
    pub name: ParamName,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub n_modes: usize,
    pub max_excitations: usize,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self { n_modes: 10, max_excitations: 2 }
    }
}

/// Sweepable / optimizable scalar parameters of the protocol point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamName {
    EnergyGap,
    DeltaTau,
    Duration,
    X1,
    X2,
    Length,
}

impl ParamName {
    pub fn column(&self) -> &'static str {
        match self {
            ParamName::EnergyGap => "energy_gap",
            ParamName::DeltaTau => "delta_tau",
            ParamName::Duration => "duration",
            ParamName::X1 => "x1",
            ParamName::X2 => "x2",
            ParamName::Length => "length",
        }
    }
}

/// Scalar protocol point resolved from the config (trajectory folded into
/// the time offset, mode override applied).
#[derive(Debug, Clone, Copy)]
pub struct Point {
    pub length: f64,
    pub mass: f64,
    pub n_modes: usize,
    pub x1: f64,
    pub x2: f64,
    pub delta_tau: f64,
    pub duration: f64,
    pub energy_gap: f64,
    pub coupling: f64,
}

impl Point {
    pub fn with(&self, name: ParamName, value: f64) -> Point {
        let mut p = *self;
        match name {
            ParamName::EnergyGap => p.energy_gap = value,
            ParamName::DeltaTau => p.delta_tau = value,
            ParamName::Duration => p.duration = value,
            ParamName::X1 => p.x1 = value,
            ParamName::X2 => p.x2 = value,
            ParamName::Length => p.length = value,
        }
        p
    }

    pub fn regions(&self) -> Result<InteractionRegions> {
        InteractionRegions::new(self.x1, self.x2, self.delta_tau, self.duration)
    }

    pub fn protocol(&self) -> Result<ProtocolParams> {
        ProtocolParams::new(
            CavityConfig::new(self.length, self.mass, self.n_modes)?,
            self.regions()?,
            self.energy_gap,
            self.coupling,
        )
    }
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::Usage(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.interaction.delta_tau.is_some() && self.trajectory.is_some() {
            return Err(Error::Usage(
                "give either interaction.delta_tau or a [trajectory] section, not both".into(),
            ));
        }
        if self.interaction.delta_tau.is_none() && self.trajectory.is_none() {
            return Err(Error::Usage(
                "missing time offset: set interaction.delta_tau or a [trajectory] section".into(),
            ));
        }
        if let Some(sweep) = &self.sweep {
            for a in &sweep.axis {
                if a.points == 0 {
                    return Err(Error::Usage(format!(
                        "sweep axis {} needs at least one point",
                        a.name.column()
                    )));
                }
                if !(a.start <= a.stop) {
                    return Err(Error::Usage(format!(
                        "sweep axis {} has unordered bounds {} > {}",
                        a.name.column(),
                        a.start,
                        a.stop
                    )));
                }
            }
        }
        if let Some(opt) = &self.optimize {
            if opt.vars.is_empty() {
                return Err(Error::Usage("[optimize] lists no variables".into()));
            }
            for v in &opt.vars {
                if v.points == 0 {
                    return Err(Error::Usage(format!(
                        "optimizer variable {} needs at least one grid point",
                        v.name.column()
                    )));
                }
                if !(v.min <= v.max) {
                    return Err(Error::Usage(format!(
                        "optimizer variable {} has unordered bounds {} > {}",
                        v.name.column(),
                        v.min,
                        v.max
                    )));
                }
            }
        }
        self.sign()?;
        Ok(())
    }

    pub fn sign(&self) -> Result<Sign> {
        match self.postselect.sign.as_str() {
            "plus" | "+" => Ok(Sign::Plus),
            "minus" | "-" => Ok(Sign::Minus),
            other => Err(Error::Usage(format!(
                "unknown post-selection sign {other:?} (expected \"plus\" or \"minus\")"
            ))),
        }
    }

    /// Resolves the scalar point, folding a trajectory section into the
    /// time-dilation offset and applying a command-line mode override.
    pub fn point(&self, modes_override: Option<usize>) -> Result<Point> {
        let delta_tau = match (&self.interaction.delta_tau, &self.trajectory) {
            (Some(d), None) => *d,
            (None, Some(t)) => kinematics::delta_tau(&TrajectoryParams::new(
                t.accel_up,
                t.accel_down,
                t.coordinate_duration,
            )?),
            _ => unreachable!("validated on load"),
        };
        Ok(Point {
            length: self.cavity.length,
            mass: self.cavity.mass,
            n_modes: modes_override.unwrap_or(self.cavity.n_modes),
            x1: self.interaction.x1,
            x2: self.interaction.x2,
            delta_tau,
            duration: self.interaction.duration,
            energy_gap: self.detector.energy_gap,
            coupling: self.detector.coupling,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub energy_gap: f64,
    pub coupling: f64,
}
