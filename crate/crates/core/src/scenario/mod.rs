//! Corridor world model: road, lights, vehicle, limits and run settings.

mod file;
mod path;
mod phase;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::advisor::AdvisorConfig;
use crate::mpc::OcpConfig;

pub use file::{ScenarioFile, BUNDLED};
pub use path::{PathGeometry, Point, Pose, Projection};
pub use phase::{Color, PhaseSchedule, Shift};

pub const KMH: f64 = 1.0 / 3.6;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read scenario file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid scenario field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Name of the offending field for validation errors.
    pub fn field(&self) -> Option<&str> {
        match self {
            ScenarioError::Invalid { field, .. } => Some(field),
            _ => None,
        }
    }
}

/// Longitudinal point-mass vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleParams {
    /// kg
    pub mass: f64,
    /// m²
    pub frontal_area: f64,
    /// kg/m³
    pub air_density: f64,
    pub drag_coefficient: f64,
    pub rolling_coefficient: f64,
    /// m/s²
    pub gravity: f64,
    /// Maximum braking force, N (negative).
    pub force_min: f64,
    /// Maximum traction force, N.
    pub force_max: f64,
    /// m/s²
    pub accel_max: f64,
    /// m/s³
    pub jerk_min: f64,
    /// m/s³
    pub jerk_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            mass: 1500.0,
            frontal_area: 2.2,
            air_density: 1.225,
            drag_coefficient: 0.30,
            rolling_coefficient: 0.012,
            gravity: 9.81,
            force_min: -6000.0,
            force_max: 4000.0,
            accel_max: 2.5,
            jerk_min: -3.0,
            jerk_max: 3.0,
        }
    }
}

impl VehicleParams {
    /// Coefficient of v² in the aerodynamic drag, N·s²/m².
    pub fn drag_factor(&self) -> f64 {
        0.5 * self.frontal_area * self.air_density * self.drag_coefficient
    }

    /// Rolling resistance, N.
    pub fn rolling_force(&self) -> f64 {
        self.mass * self.gravity * self.rolling_coefficient
    }

    /// Drag plus rolling resistance at speed `v`, N.
    pub fn resistance(&self, v: f64) -> f64 {
        self.drag_factor() * v * v + self.rolling_force()
    }

    /// Longitudinal tire force needed to hold acceleration `a` at speed `v`.
    pub fn force_for(&self, a: f64, v: f64) -> f64 {
        self.mass * a + self.resistance(v)
    }

    /// Acceleration produced by force `f` at speed `v`.
    pub fn accel_for(&self, f: f64, v: f64) -> f64 {
        (f - self.resistance(v)) / self.mass
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = [
            ("vehicle.mass_kg", self.mass),
            ("vehicle.frontal_area_m2", self.frontal_area),
            ("vehicle.air_density_kgpm3", self.air_density),
            ("vehicle.drag_coefficient", self.drag_coefficient),
            ("vehicle.rolling_coefficient", self.rolling_coefficient),
            ("vehicle.gravity_mps2", self.gravity),
            ("vehicle.accel_max_mps2", self.accel_max),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(ScenarioError::invalid(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !(self.force_min < 0.0) {
            return Err(ScenarioError::invalid(
                "vehicle.force_min_n",
                "must be negative",
            ));
        }
        if !(self.force_max > 0.0) {
            return Err(ScenarioError::invalid(
                "vehicle.force_max_n",
                "must be positive",
            ));
        }
        if !(self.jerk_min < 0.0) {
            return Err(ScenarioError::invalid(
                "vehicle.jerk_min_mps3",
                "must be negative",
            ));
        }
        if !(self.jerk_max > 0.0) {
            return Err(ScenarioError::invalid(
                "vehicle.jerk_max_mps3",
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Speed limits, activation horizons and the comfort deceleration.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadLimits {
    /// m/s
    pub v_min_road: f64,
    /// m/s
    pub v_max_road: f64,
    /// Single-light activation distance, m.
    pub horizon_single: f64,
    /// Multi-light activation distance, m.
    pub horizon_multi: f64,
    /// m/s²
    pub d_comfort: f64,
}

impl Default for RoadLimits {
    fn default() -> Self {
        RoadLimits {
            v_min_road: 20.0 * KMH,
            v_max_road: 50.0 * KMH,
            horizon_single: 100.0,
            horizon_multi: 500.0,
            d_comfort: 1.0,
        }
    }
}

impl RoadLimits {
    /// Distance needed to stop from `v` at the comfort deceleration.
    pub fn comfort_stopping_distance(&self, v: f64) -> f64 {
        0.5 * v * v / self.d_comfort
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(self.v_min_road > 0.0) {
            return Err(ScenarioError::invalid(
                "limits.v_min_road_kmh",
                "must be positive",
            ));
        }
        if !(self.v_max_road > self.v_min_road) {
            return Err(ScenarioError::invalid(
                "limits.v_max_road_kmh",
                "must exceed v_min_road_kmh",
            ));
        }
        if !(self.horizon_single > 0.0) {
            return Err(ScenarioError::invalid(
                "limits.horizon_single_m",
                "must be positive",
            ));
        }
        if !(self.horizon_single <= self.horizon_multi) {
            return Err(ScenarioError::invalid(
                "limits.horizon_multi_m",
                "must be at least horizon_single_m",
            ));
        }
        if !(self.d_comfort > 0.0) {
            return Err(ScenarioError::invalid(
                "limits.d_comfort_mps2",
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// Friction coefficient sample. Carried with the scenario; no model consumes it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrictionSample {
    pub abscissa: f64,
    pub mu: f64,
}

/// Closed-loop run settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    /// m/s; also the baseline driver's cruise speed.
    pub initial_speed: f64,
    /// Plant step, s.
    pub step: f64,
    /// s
    pub timeout: f64,
    /// Baseline relaunch acceleration, m/s².
    pub launch_accel: f64,
    /// Fraction of negative traction power recovered; `None` disables regeneration.
    pub regen_efficiency: Option<f64>,
    /// Plant steps between MPC re-solves.
    pub mpc_every: usize,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            initial_speed: 40.0 * KMH,
            step: 0.05,
            timeout: 600.0,
            launch_accel: 1.0,
            regen_efficiency: None,
            mpc_every: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub path: PathGeometry,
    /// Sorted by stop-line abscissa.
    pub lights: Vec<PhaseSchedule>,
    pub vehicle: VehicleParams,
    pub limits: RoadLimits,
    pub friction: Vec<FrictionSample>,
    pub sim: SimSettings,
    pub advisor: AdvisorConfig,
    pub mpc: OcpConfig,
}

impl Scenario {
    /// Scenario with default vehicle, limits and settings.
    pub fn new(
        name: impl Into<String>,
        path: PathGeometry,
        lights: Vec<PhaseSchedule>,
    ) -> Result<Self, ScenarioError> {
        let scenario = Scenario {
            name: name.into(),
            path,
            lights,
            vehicle: VehicleParams::default(),
            limits: RoadLimits::default(),
            friction: Vec::new(),
            sim: SimSettings::default(),
            advisor: AdvisorConfig::default(),
            mpc: OcpConfig::default(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Scenario::from_toml_str(&text, path)
    }

    /// Parse scenario text; `origin` only labels errors.
    pub fn from_toml_str(text: &str, origin: impl AsRef<Path>) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.as_ref().to_path_buf(),
            message: e.to_string(),
        })?;
        file.into_scenario()
    }

    /// One of the scenarios shipped with the library, by name.
    pub fn bundled(name: &str) -> Option<Result<Self, ScenarioError>> {
        BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(n, text)| Scenario::from_toml_str(text, format!("<bundled:{n}>")))
    }

    /// The bundled four-light corridor.
    pub fn milan_corridor() -> Self {
        Scenario::bundled("milan_corridor")
            .expect("bundled scenario exists")
            .expect("bundled scenario is valid")
    }

    /// A file path if one exists, otherwise a bundled scenario name.
    pub fn resolve(name_or_path: &str) -> Result<Self, ScenarioError> {
        let as_path = Path::new(name_or_path);
        if !as_path.exists() {
            if let Some(bundled) = Scenario::bundled(name_or_path) {
                return bundled;
            }
        }
        Scenario::load(as_path)
    }

    pub fn length(&self) -> f64 {
        self.path.total_length()
    }

    /// Lights whose stop line is strictly ahead of `s`.
    pub fn lights_ahead(&self, s: f64) -> &[PhaseSchedule] {
        let first = self.lights.partition_point(|l| l.stop_line <= s);
        &self.lights[first..]
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.vehicle.validate()?;
        self.limits.validate()?;
        let length = self.length();
        for (k, light) in self.lights.iter().enumerate() {
            let field = |name: &str| format!("light[{k}].{name}");
            if !(light.cycle > 0.0) || !light.cycle.is_finite() {
                return Err(ScenarioError::invalid(field("cycle_s"), "must be positive"));
            }
            if !(light.green > 0.0 && light.green < light.cycle) {
                return Err(ScenarioError::invalid(
                    field("green_s"),
                    format!(
                        "must lie strictly between 0 and the cycle ({} s)",
                        light.cycle
                    ),
                ));
            }
            if !(light.offset >= 0.0 && light.offset < light.cycle) {
                return Err(ScenarioError::invalid(
                    field("offset_s"),
                    format!("must lie in [0, {}) s", light.cycle),
                ));
            }
            if !(light.stop_line > 0.0 && light.stop_line <= length) {
                return Err(ScenarioError::invalid(
                    field("abscissa_m"),
                    format!("must lie within the road (0, {length}] m"),
                ));
            }
            if k > 0 && !(light.stop_line > self.lights[k - 1].stop_line) {
                return Err(ScenarioError::invalid(
                    field("abscissa_m"),
                    "lights must be listed in strictly increasing abscissa order",
                ));
            }
        }
        for (k, sample) in self.friction.iter().enumerate() {
            if !(sample.mu > 0.0) || !(0.0..=length).contains(&sample.abscissa) {
                return Err(ScenarioError::invalid(
                    format!("road.friction[{k}]"),
                    "needs abscissa on the road and positive mu",
                ));
            }
        }
        let sim = &self.sim;
        if !(sim.initial_speed >= 0.0 && sim.initial_speed <= self.limits.v_max_road) {
            return Err(ScenarioError::invalid(
                "sim.initial_speed_kmh",
                "must lie in [0, v_max_road_kmh]",
            ));
        }
        if !(sim.step > 0.0) {
            return Err(ScenarioError::invalid("sim.step_s", "must be positive"));
        }
        if !(sim.timeout > 0.0) {
            return Err(ScenarioError::invalid("sim.timeout_s", "must be positive"));
        }
        if !(sim.launch_accel > 0.0) {
            return Err(ScenarioError::invalid(
                "sim.launch_accel_mps2",
                "must be positive",
            ));
        }
        if let Some(eta) = sim.regen_efficiency {
            if !(0.0..=1.0).contains(&eta) {
                return Err(ScenarioError::invalid(
                    "sim.regen_efficiency",
                    "must lie in [0, 1]",
                ));
            }
        }
        if sim.mpc_every == 0 {
            return Err(ScenarioError::invalid(
                "sim.mpc_every",
                "must be at least 1",
            ));
        }
        self.advisor.validate()?;
        self.mpc.validate()?;
        Ok(())
    }
}
