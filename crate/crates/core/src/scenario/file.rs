//! On-disk scenario schema (TOML). Every field carries its unit in its name;
//! speeds are given in km/h and converted to m/s on load.

use serde::Deserialize;

use super::{
    FrictionSample, PathGeometry, PhaseSchedule, Point, RoadLimits, Scenario, ScenarioError,
    SimSettings, VehicleParams, KMH,
};
use crate::advisor::AdvisorConfig;
use crate::mpc::OcpConfig;

/// Scenarios compiled into the library, as `(name, toml text)`.
pub const BUNDLED: &[(&str, &str)] = &[(
    "milan_corridor",
    include_str!("../../scenarios/milan_corridor.toml"),
)];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub road: RoadSection,
    #[serde(default)]
    pub limits: LimitsSection,
    #[serde(default)]
    pub vehicle: VehicleSection,
    #[serde(default, rename = "light")]
    pub lights: Vec<LightSection>,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub advisor: AdvisorSection,
    #[serde(default)]
    pub mpc: MpcSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoadSection {
    /// Optional cross-check against the waypoint polyline length.
    pub length_m: Option<f64>,
    /// `[x_m, y_m]` pairs. Defaults to a straight road of `length_m` along +X.
    pub waypoints: Option<Vec<[f64; 2]>>,
    /// `[abscissa_m, mu]` pairs.
    #[serde(default)]
    pub friction: Vec<[f64; 2]>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub v_min_road_kmh: f64,
    pub v_max_road_kmh: f64,
    pub horizon_single_m: f64,
    pub horizon_multi_m: f64,
    pub d_comfort_mps2: f64,
}

impl Default for LimitsSection {
    fn default() -> Self {
        let d = RoadLimits::default();
        LimitsSection {
            v_min_road_kmh: d.v_min_road / KMH,
            v_max_road_kmh: d.v_max_road / KMH,
            horizon_single_m: d.horizon_single,
            horizon_multi_m: d.horizon_multi,
            d_comfort_mps2: d.d_comfort,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleSection {
    pub mass_kg: f64,
    pub frontal_area_m2: f64,
    pub air_density_kgpm3: f64,
    pub drag_coefficient: f64,
    pub rolling_coefficient: f64,
    pub gravity_mps2: f64,
    pub force_min_n: f64,
    pub force_max_n: f64,
    pub accel_max_mps2: f64,
    pub jerk_min_mps3: f64,
    pub jerk_max_mps3: f64,
}

impl Default for VehicleSection {
    fn default() -> Self {
        let d = VehicleParams::default();
        VehicleSection {
            mass_kg: d.mass,
            frontal_area_m2: d.frontal_area,
            air_density_kgpm3: d.air_density,
            drag_coefficient: d.drag_coefficient,
            rolling_coefficient: d.rolling_coefficient,
            gravity_mps2: d.gravity,
            force_min_n: d.force_min,
            force_max_n: d.force_max,
            accel_max_mps2: d.accel_max,
            jerk_min_mps3: d.jerk_min,
            jerk_max_mps3: d.jerk_max,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightSection {
    pub id: Option<String>,
    pub abscissa_m: f64,
    pub cycle_s: f64,
    pub green_s: f64,
    #[serde(default)]
    pub offset_s: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub initial_speed_kmh: f64,
    pub step_s: f64,
    pub timeout_s: f64,
    pub launch_accel_mps2: f64,
    pub regen_efficiency: Option<f64>,
    pub mpc_every: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimSettings::default();
        SimSection {
            initial_speed_kmh: d.initial_speed / KMH,
            step_s: d.step,
            timeout_s: d.timeout,
            launch_accel_mps2: d.launch_accel,
            regen_efficiency: d.regen_efficiency,
            mpc_every: d.mpc_every,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdvisorSection {
    pub max_lights: usize,
    pub window_margin_s: f64,
    pub dead_band_mps: f64,
    pub amc_decel_max_mps2: f64,
    pub urgency: f64,
    pub launch_accel_mps2: f64,
    pub lateral_tolerance_m: f64,
}

impl Default for AdvisorSection {
    fn default() -> Self {
        let d = AdvisorConfig::default();
        AdvisorSection {
            max_lights: d.max_lights,
            window_margin_s: d.window_margin,
            dead_band_mps: d.dead_band,
            amc_decel_max_mps2: d.amc_decel_max,
            urgency: d.urgency,
            launch_accel_mps2: d.launch_accel,
            lateral_tolerance_m: d.lateral_tolerance,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MpcSection {
    pub horizon_s: f64,
    pub steps: usize,
    pub w_v: f64,
    pub w_a: f64,
    pub w_j: f64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub max_sqp_iterations: usize,
}

impl Default for MpcSection {
    fn default() -> Self {
        let d = OcpConfig::default();
        MpcSection {
            horizon_s: d.horizon,
            steps: d.steps,
            w_v: d.w_v,
            w_a: d.w_a,
            w_j: d.w_j,
            tolerance: d.tolerance,
            max_iterations: d.max_iterations,
            max_sqp_iterations: d.max_sqp_iterations,
        }
    }
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let path = match (&self.road.waypoints, self.road.length_m) {
            (Some(points), _) => {
                PathGeometry::new(points.iter().map(|&[x, y]| Point { x, y }).collect())?
            }
            (None, Some(length)) => PathGeometry::straight(length)?,
            (None, None) => {
                return Err(ScenarioError::invalid(
                    "road",
                    "either length_m or waypoints is required",
                ))
            }
        };
        if let Some(length) = self.road.length_m {
            if (length - path.total_length()).abs() > 1e-6 * length.max(1.0) {
                return Err(ScenarioError::invalid(
                    "road.length_m",
                    format!(
                        "{length} m disagrees with the waypoint polyline ({} m)",
                        path.total_length()
                    ),
                ));
            }
        }
        let lights = self
            .lights
            .into_iter()
            .enumerate()
            .map(|(k, l)| {
                PhaseSchedule::new(
                    l.id.unwrap_or_else(|| format!("TL{}", k + 1)),
                    l.abscissa_m,
                    l.cycle_s,
                    l.green_s,
                    l.offset_s,
                )
            })
            .collect();
        let v = self.vehicle;
        let lim = self.limits;
        let sim = self.sim;
        let adv = self.advisor;
        let mpc = self.mpc;
        let scenario = Scenario {
            name: self.name.unwrap_or_else(|| "unnamed".to_string()),
            path,
            lights,
            vehicle: VehicleParams {
                mass: v.mass_kg,
                frontal_area: v.frontal_area_m2,
                air_density: v.air_density_kgpm3,
                drag_coefficient: v.drag_coefficient,
                rolling_coefficient: v.rolling_coefficient,
                gravity: v.gravity_mps2,
                force_min: v.force_min_n,
                force_max: v.force_max_n,
                accel_max: v.accel_max_mps2,
                jerk_min: v.jerk_min_mps3,
                jerk_max: v.jerk_max_mps3,
            },
            limits: RoadLimits {
                v_min_road: lim.v_min_road_kmh * KMH,
                v_max_road: lim.v_max_road_kmh * KMH,
                horizon_single: lim.horizon_single_m,
                horizon_multi: lim.horizon_multi_m,
                d_comfort: lim.d_comfort_mps2,
            },
            friction: self
                .road
                .friction
                .iter()
                .map(|&[abscissa, mu]| FrictionSample { abscissa, mu })
                .collect(),
            sim: SimSettings {
                initial_speed: sim.initial_speed_kmh * KMH,
                step: sim.step_s,
                timeout: sim.timeout_s,
                launch_accel: sim.launch_accel_mps2,
                regen_efficiency: sim.regen_efficiency,
                mpc_every: sim.mpc_every,
            },
            advisor: AdvisorConfig {
                max_lights: adv.max_lights,
                window_margin: adv.window_margin_s,
                dead_band: adv.dead_band_mps,
                amc_decel_max: adv.amc_decel_max_mps2,
                urgency: adv.urgency,
                launch_accel: adv.launch_accel_mps2,
                lateral_tolerance: adv.lateral_tolerance_m,
            },
            mpc: OcpConfig {
                horizon: mpc.horizon_s,
                steps: mpc.steps,
                w_v: mpc.w_v,
                w_a: mpc.w_a,
                w_j: mpc.w_j,
                tolerance: mpc.tolerance,
                max_iterations: mpc.max_iterations,
                max_sqp_iterations: mpc.max_sqp_iterations,
            },
        };
        scenario.validate()?;
        Ok(scenario)
    }
}
