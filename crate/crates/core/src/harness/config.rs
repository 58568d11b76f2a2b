//! Scenario description and its one-time resolution into controller and
//! monitor settings.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::controllers::{compensated_rd, predicted_radius, validate_gain, ControllerParams, GainValidity, Law};
use crate::dynamics::{IntegrationSettings, Scheme};
use crate::error::{Error, Result};
use crate::geometry::{UavState, Vec2};
use crate::monitors::MonitorSettings;

/// Where the controller's range rate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RdotSource {
    #[default]
    GroundTruth,
    /// Dirty-derivative estimate with time constant `tau` seconds.
    Filtered { tau: f64 },
}

impl fmt::Display for RdotSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RdotSource::GroundTruth => f.write_str("truth"),
            RdotSource::Filtered { tau } => write!(f, "filter:{tau}"),
        }
    }
}

impl FromStr for RdotSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "truth" => Ok(RdotSource::GroundTruth),
            other => {
                let tau = other
                    .strip_prefix("filter:")
                    .and_then(|t| t.parse::<f64>().ok())
                    .ok_or_else(|| Error::Config(format!("rdot source must be `truth` or `filter:<tau>`, got `{other}`")))?;
                if !(tau > 0.0 && tau.is_finite()) {
                    return Err(Error::NonPositiveTimeConstant(tau));
                }
                Ok(RdotSource::Filtered { tau })
            }
        }
    }
}

impl Serialize for RdotSource {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RdotSource {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Heading range used when a sampling box does not give one.
pub const DEFAULT_PSI_RANGE: [f64; 2] = [0.0, TAU];

fn default_psi_range() -> [f64; 2] {
    DEFAULT_PSI_RANGE
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InitSpec {
    Explicit { x: f64, y: f64, psi: f64 },
    SampledBox {
        x_range: [f64; 2],
        y_range: [f64; 2],
        /// Half-open `[lo, hi)`.
        #[serde(default = "default_psi_range")]
        psi_range: [f64; 2],
        /// Permits zero-width position ranges.
        #[serde(default)]
        allow_degenerate: bool,
    },
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::SampledBox {
            x_range: [0.0, 10.0],
            y_range: [0.0, 10.0],
            psi_range: default_psi_range(),
            allow_degenerate: false,
        }
    }
}

/// One scenario, as read from a config file. Missing keys fall back to the
/// smooth-law reference scenario: `V = 1`, target `(0, −10)`, `r_d = 10`,
/// `k = 0.01`, initial pose drawn from `[0,10]² × [0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(alias = "speed")]
    pub v: f64,
    pub target: [f64; 2],
    pub r_d: f64,
    pub k: f64,
    pub law: Law,
    pub compensate_rd: bool,
    pub rdot_source: RdotSource,
    pub dt: f64,
    pub scheme: Scheme,
    pub duration: f64,
    pub init: InitSpec,
    pub seed: u64,
    pub runs: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            v: 1.0,
            target: [0.0, -10.0],
            r_d: 10.0,
            k: 0.01,
            law: Law::Smooth,
            compensate_rd: false,
            rdot_source: RdotSource::GroundTruth,
            dt: 0.01,
            scheme: Scheme::Rk4,
            duration: 3000.0,
            init: InitSpec::default(),
            seed: 0,
            runs: 1,
        }
    }
}

impl ScenarioConfig {
    /// Reference signum-law scenario (`k = 0.12`).
    pub fn signum_reference() -> Self {
        Self {
            law: Law::Signum,
            k: 0.12,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn target_point(&self) -> Vec2 {
        Vec2::new(self.target[0], self.target[1])
    }

    pub fn integration(&self) -> IntegrationSettings {
        IntegrationSettings {
            dt: self.dt,
            scheme: self.scheme,
        }
    }

    /// Checks every field and precomputes the effective desired radius and
    /// the monitor thresholds.
    pub fn resolve(&self) -> Result<ResolvedScenario> {
        let finite = |v: f64, what: &str| -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} must be finite")))
            }
        };
        finite(self.v, "v")?;
        finite(self.target[0], "target.x")?;
        finite(self.target[1], "target.y")?;
        finite(self.r_d, "r_d")?;
        finite(self.k, "k")?;
        finite(self.duration, "duration")?;
        if self.v <= 0.0 {
            return Err(Error::Config(format!("v must be positive, got {}", self.v)));
        }
        if self.duration <= 0.0 {
            return Err(Error::Config(format!("duration must be positive, got {}", self.duration)));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        let integration = IntegrationSettings::new(self.dt, self.scheme)?;
        if self.duration < self.dt {
            return Err(Error::Config("duration must cover at least one step".into()));
        }
        if let RdotSource::Filtered { tau } = self.rdot_source {
            if self.dt >= tau {
                return Err(Error::UnstableDiscretization { dt: self.dt, tau });
            }
        }
        self.validate_init()?;

        // validates r_d > 0 and k != 0
        let nominal = ControllerParams::new(self.k, self.r_d, self.v, self.law)?;
        let effective_r_d = if self.compensate_rd {
            if self.law != Law::Smooth {
                return Err(Error::Config("radius compensation applies to the smooth law only".into()));
            }
            compensated_rd(self.r_d, self.k)?
        } else {
            self.r_d
        };
        let params = ControllerParams { r_d: effective_r_d, ..nominal };
        let gain_validity = validate_gain(&params);
        let expected_radius = match self.law {
            Law::Smooth => predicted_radius(effective_r_d, self.k)?,
            Law::Signum => effective_r_d,
        };
        integration.check_resolution(effective_r_d, self.v);

        let half = 0.5 * self.duration;
        let orbit_period = TAU * expected_radius / self.v;
        let monitor = MonitorSettings {
            params,
            gain_valid: gain_validity == GainValidity::Valid,
            exact_range_rate: self.rdot_source == RdotSource::GroundTruth,
            dt: self.dt,
            expected_radius,
            radius_band: match self.law {
                Law::Smooth => 0.05,
                Law::Signum => 0.10,
            },
            bearing_band: 0.02,
            steady_window: half.min(500.0),
            rotation_window: half.min(2.0 * orbit_period),
            convergence_hold: (0.25 * self.duration).min(100.0),
            boundary_tolerance: self.v * self.dt,
        };

        Ok(ResolvedScenario {
            config: self.clone(),
            effective_r_d,
            params,
            gain_validity,
            expected_radius,
            steps: (self.duration / self.dt).round() as usize,
            monitor,
        })
    }

    fn validate_init(&self) -> Result<()> {
        match self.init {
            InitSpec::Explicit { x, y, psi } => {
                UavState::new(x, y, psi)?;
            }
            InitSpec::SampledBox {
                x_range,
                y_range,
                psi_range,
                allow_degenerate,
            } => {
                for (name, [lo, hi]) in [("x_range", x_range), ("y_range", y_range), ("psi_range", psi_range)] {
                    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                        return Err(Error::Config(format!("{name} must be finite with lo <= hi")));
                    }
                }
                let flat = x_range[0] == x_range[1] || y_range[0] == y_range[1];
                if flat && !allow_degenerate {
                    return Err(Error::Config(
                        "sampling box has zero width; set allow_degenerate to sample a point".into(),
                    ));
                }
                if psi_range[1] - psi_range[0] > TAU + 1e-12 {
                    return Err(Error::Config("psi_range wider than 2π".into()));
                }
            }
        }
        Ok(())
    }
}

/// A validated scenario with everything that does not change per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub config: ScenarioConfig,
    /// `r̃_d` when compensation is on, else `r_d`.
    pub effective_r_d: f64,
    /// Controller parameters using `effective_r_d`.
    pub params: ControllerParams,
    pub gain_validity: GainValidity,
    pub expected_radius: f64,
    pub steps: usize,
    pub monitor: MonitorSettings,
}

/// Serialized form of [`ResolvedScenario`] embedded in every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedEcho {
    #[serde(flatten)]
    pub config: ScenarioConfig,
    pub effective_r_d: f64,
    pub expected_radius: f64,
    pub gain_bound: f64,
    pub gain_validity: GainValidity,
    pub steady_window: f64,
    pub rotation_window: f64,
    pub radius_band: f64,
    pub bearing_band: f64,
    pub boundary_tolerance: f64,
}

impl ResolvedScenario {
    pub fn echo(&self) -> ResolvedEcho {
        ResolvedEcho {
            config: self.config.clone(),
            effective_r_d: self.effective_r_d,
            expected_radius: self.expected_radius,
            gain_bound: self.params.gain_bound(),
            gain_validity: self.gain_validity,
            steady_window: self.monitor.steady_window,
            rotation_window: self.monitor.rotation_window,
            radius_band: self.monitor.radius_band,
            bearing_band: self.monitor.bearing_band,
            boundary_tolerance: self.monitor.boundary_tolerance,
        }
    }
}
