//! Closed-loop simulation of a driver over a scenario.

pub mod driver;
pub mod energy;
pub mod plant;

pub use driver::{
    cruise_accel, follow_advice, stop_accel, BaselineDriver, Driver, DriverKind, UnknownDriver,
    STOP_GAP,
};
pub use energy::{iec, kwh_per_100km, EnergyMeter, EnergySample, J_PER_M_TO_KWH_PER_100KM};
pub use plant::{step_plant, PlantState, PlantStep};

use serde::Serialize;
use thiserror::Error;

use crate::advisor::Warning;
use crate::scenario::{Color, Scenario};

/// Below this speed the vehicle counts as stopped, m/s.
pub const STOP_SPEED: f64 = 0.1;
/// Minimum standstill duration counted as a stop, s.
pub const STOP_DURATION: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(
        "{driver} did not reach the end of '{scenario}' within {timeout} s (stuck at s = {s:.1} m)"
    )]
    Timeout {
        driver: DriverKind,
        scenario: String,
        timeout: f64,
        s: f64,
    },
    #[error("{driver} crossed {light} on red at t = {t:.3} s")]
    RedCrossing {
        driver: DriverKind,
        light: String,
        t: f64,
    },
    #[error("cannot compare runs of different scenarios ('{0}' and '{1}')")]
    ScenarioMismatch(String, String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    pub a: f64,
    /// Finite-difference jerk of the realised acceleration.
    pub j: f64,
    pub force: f64,
    pub warning: Warning,
    /// Color of every light, in scenario order.
    pub colors: Vec<Color>,
    pub iec: f64,
    pub aec: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Crossing {
    pub id: String,
    pub stop_line: f64,
    pub t: f64,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub driver: DriverKind,
    pub scenario: String,
    pub initial_speed: f64,
    pub stops: usize,
    /// Time at which the end of the road is reached, s.
    pub travel_time: f64,
    /// J/m
    pub final_aec: f64,
    pub final_aec_kwh_per_100km: f64,
    pub crossings: Vec<Crossing>,
    /// m/s³
    pub rms_jerk: f64,
    pub mpc_fallbacks: usize,
}

impl Summary {
    pub fn all_green(&self) -> bool {
        self.crossings.iter().all(|c| c.color == Color::Green)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub driver: DriverKind,
    pub scenario: String,
    pub dt: f64,
    pub light_ids: Vec<String>,
    pub samples: Vec<Sample>,
    pub summary: Summary,
}

impl SimTrace {
    pub fn rms_jerk(&self) -> f64 {
        rms_jerk(&self.samples)
    }
}

/// Root mean square of the recorded jerk, excluding the initial sample.
pub fn rms_jerk(samples: &[Sample]) -> f64 {
    let tail = samples.get(1..).unwrap_or_default();
    if tail.is_empty() {
        return 0.0;
    }
    (tail.iter().map(|x| x.j * x.j).sum::<f64>() / tail.len() as f64).sqrt()
}

/// Time within a constant-acceleration step at which `target` is reached.
fn crossing_time(from: &PlantState, to: &PlantState, target: f64) -> f64 {
    let ds = to.s - from.s;
    let dt = to.t - from.t;
    let d = target - from.s;
    let a = to.a;
    let v = from.v;
    let tau = if a.abs() > 1e-12 {
        let disc = v * v + 2.0 * a * d;
        if disc >= 0.0 {
            // stable root of a/2·τ² + v·τ − d = 0
            2.0 * d / (v + disc.sqrt())
        } else {
            dt * d / ds
        }
    } else if v > 0.0 {
        d / v
    } else {
        dt * d / ds
    };
    from.t + tau.clamp(0.0, dt)
}

/// Runs `kind` over `scenario` until the end of the road.
pub fn run(scenario: &Scenario, kind: DriverKind) -> Result<SimTrace, SimError> {
    let dt = scenario.sim.step;
    let length = scenario.length();
    let mut driver = Driver::new(kind, scenario);
    let mut meter = EnergyMeter::new(scenario.sim.regen_efficiency);
    let colors_at = |t: f64| {
        scenario
            .lights
            .iter()
            .map(|l| l.phase_at(t))
            .collect::<Vec<_>>()
    };

    let mut st = PlantState {
        t: 0.0,
        s: 0.0,
        v: scenario.sim.initial_speed,
        a: 0.0,
    };
    let mut samples = vec![Sample {
        t: 0.0,
        s: 0.0,
        v: st.v,
        a: 0.0,
        j: 0.0,
        force: scenario.vehicle.force_for(0.0, st.v),
        warning: Warning::None,
        colors: colors_at(0.0),
        iec: 0.0,
        aec: 0.0,
    }];
    let mut crossings = Vec::new();
    let mut stops = 0;
    let mut still_since: Option<f64> = None;
    let mut counted = false;
    let mut travel_time = None;

    while travel_time.is_none() {
        if st.t > scenario.sim.timeout {
            return Err(SimError::Timeout {
                driver: kind,
                scenario: scenario.name.clone(),
                timeout: scenario.sim.timeout,
                s: st.s,
            });
        }
        let (cmd, warning) = driver.command(&st, scenario);
        let step = step_plant(st, cmd, &scenario.vehicle, dt);
        let next = step.state;

        for light in &scenario.lights {
            if st.s < light.stop_line && next.s >= light.stop_line {
                let t = crossing_time(&st, &next, light.stop_line);
                let color = light.phase_at(t);
                if kind.is_advised() && color == Color::Red {
                    return Err(SimError::RedCrossing {
                        driver: kind,
                        light: light.id.clone(),
                        t,
                    });
                }
                crossings.push(Crossing {
                    id: light.id.clone(),
                    stop_line: light.stop_line,
                    t,
                    color,
                });
            }
        }
        if next.s >= length {
            travel_time = Some(crossing_time(&st, &next, length));
        }

        if next.v < STOP_SPEED {
            let since = *still_since.get_or_insert(next.t);
            if !counted && next.t - since >= STOP_DURATION - 1e-9 {
                stops += 1;
                counted = true;
            }
        } else {
            still_since = None;
            counted = false;
        }

        let sample = meter.record(step.force, dt, next.s - st.s, next.s, next.t);
        let prev_a = samples.last().map_or(0.0, |x| x.a);
        samples.push(Sample {
            t: next.t,
            s: next.s,
            v: next.v,
            a: next.a,
            j: (next.a - prev_a) / dt,
            force: step.force,
            warning,
            colors: colors_at(next.t),
            iec: sample.map_or(0.0, |e| e.iec),
            aec: meter.aec(),
        });
        st = next;
    }

    let summary = Summary {
        driver: kind,
        scenario: scenario.name.clone(),
        initial_speed: scenario.sim.initial_speed,
        stops,
        travel_time: travel_time.expect("loop exits once the end is reached"),
        final_aec: meter.aec(),
        final_aec_kwh_per_100km: kwh_per_100km(meter.aec()),
        crossings,
        rms_jerk: rms_jerk(&samples),
        mpc_fallbacks: driver.mpc_fallbacks(),
    };
    Ok(SimTrace {
        driver: kind,
        scenario: scenario.name.clone(),
        dt,
        light_ids: scenario.lights.iter().map(|l| l.id.clone()).collect(),
        samples,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunDigest {
    pub driver: DriverKind,
    pub stops: usize,
    pub travel_time: f64,
    pub final_aec_kwh_per_100km: f64,
    pub rms_jerk: f64,
    pub crossing_colors: Vec<(String, Color)>,
}

impl From<&Summary> for RunDigest {
    fn from(s: &Summary) -> Self {
        RunDigest {
            driver: s.driver,
            stops: s.stops,
            travel_time: s.travel_time,
            final_aec_kwh_per_100km: s.final_aec_kwh_per_100km,
            rms_jerk: s.rms_jerk,
            crossing_colors: s
                .crossings
                .iter()
                .map(|c| (c.id.clone(), c.color))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub scenario: String,
    pub first: RunDigest,
    pub second: RunDigest,
    /// `100·(aec_first − aec_second)/aec_first`.
    pub energy_reduction_pct: f64,
}

pub fn compare(a: &SimTrace, b: &SimTrace) -> Result<CompareReport, SimError> {
    if a.scenario != b.scenario || a.light_ids != b.light_ids {
        return Err(SimError::ScenarioMismatch(
            a.scenario.clone(),
            b.scenario.clone(),
        ));
    }
    let (ea, eb) = (a.summary.final_aec, b.summary.final_aec);
    let energy_reduction_pct = if ea > 0.0 {
        100.0 * (ea - eb) / ea
    } else {
        0.0
    };
    Ok(CompareReport {
        scenario: a.scenario.clone(),
        first: RunDigest::from(&a.summary),
        second: RunDigest::from(&b.summary),
        energy_reduction_pct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{PathGeometry, PhaseSchedule};

    fn empty(length: f64) -> Scenario {
        Scenario::new("empty", PathGeometry::straight(length).unwrap(), Vec::new()).unwrap()
    }

    #[test]
    fn empty_corridor_is_constant_speed() {
        let sc = empty(500.0);
        for kind in DriverKind::ALL {
            let tr = run(&sc, kind).unwrap();
            let v0 = sc.sim.initial_speed;
            assert!(tr.samples.iter().all(|x| (x.v - v0).abs() < 1e-9), "{kind}");
            assert!((tr.summary.travel_time - 500.0 / v0).abs() < 1e-6);
            assert_eq!(tr.summary.stops, 0);
        }
    }

    #[test]
    fn trace_is_monotone() {
        let sc = Scenario::new(
            "one",
            PathGeometry::straight(600.0).unwrap(),
            vec![PhaseSchedule::new("a", 300.0, 75.0, 40.0, 20.0)],
        )
        .unwrap();
        for kind in DriverKind::ALL {
            let tr = run(&sc, kind).unwrap();
            for w in tr.samples.windows(2) {
                assert!(w[1].t > w[0].t);
                assert!(w[1].s >= w[0].s);
            }
        }
    }

    #[test]
    fn compare_with_itself_is_zero() {
        let sc = empty(300.0);
        let tr = run(&sc, DriverKind::Baseline).unwrap();
        let rep = compare(&tr, &tr).unwrap();
        assert_eq!(rep.energy_reduction_pct, 0.0);
        let mut other = tr.clone();
        other.scenario = "other".into();
        assert!(compare(&tr, &other).is_err());
    }

    #[test]
    fn crossing_time_inside_step() {
        let from = PlantState {
            t: 1.0,
            s: 0.0,
            v: 10.0,
            a: 0.0,
        };
        let to = PlantState {
            t: 1.1,
            s: 1.0 + 0.005,
            v: 11.0,
            a: 1.0,
        };
        let t = crossing_time(&from, &to, 0.5);
        let tau: f64 = t - 1.0;
        assert!((10.0 * tau + 0.5 * tau * tau - 0.5).abs() < 1e-12);
    }
}
