//! Point-mass longitudinal plant.

use crate::scenario::VehicleParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantState {
    pub t: f64,
    pub s: f64,
    pub v: f64,
    /// Acceleration realised over the last step.
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantStep {
    pub state: PlantState,
    /// Saturated tire force applied during the step, N.
    pub force: f64,
}

/// Applies `commanded_a` for `dt` seconds. The required force is clipped to
/// the vehicle's force range and the vehicle never rolls backwards.
pub fn step_plant(
    state: PlantState,
    commanded_a: f64,
    params: &VehicleParams,
    dt: f64,
) -> PlantStep {
    assert!(dt > 0.0, "plant step must be positive");
    let v = state.v;
    let force = params
        .force_for(commanded_a, v)
        .clamp(params.force_min, params.force_max);
    let a = params.accel_for(force, v);
    let v_end = v + a * dt;
    let next = if v_end >= 0.0 {
        PlantState {
            t: state.t + dt,
            s: state.s + v * dt + 0.5 * a * dt * dt,
            v: v_end,
            a,
        }
    } else {
        // stops within the step and stays put
        PlantState {
            t: state.t + dt,
            s: state.s + v * v / (-2.0 * a),
            v: 0.0,
            a: 0.0,
        }
    };
    PlantStep { state: next, force }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(v: f64) -> PlantState {
        PlantState {
            t: 0.0,
            s: 0.0,
            v,
            a: 0.0,
        }
    }

    #[test]
    fn cruise_needs_resistance_force() {
        let p = VehicleParams::default();
        let out = step_plant(at(10.0), 0.0, &p, 0.05);
        assert!((out.force - (40.425 + 176.58)).abs() < 1e-9);
        assert!((out.state.v - 10.0).abs() < 1e-12);
        assert!((out.state.s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn traction_saturates() {
        let p = VehicleParams::default();
        let out = step_plant(at(10.0), 5.0, &p, 0.05);
        assert_eq!(out.force, p.force_max);
        assert!(out.state.a < 5.0);
    }

    #[test]
    fn standstill_does_not_reverse() {
        let p = VehicleParams::default();
        let out = step_plant(at(0.0), -1.0, &p, 0.05);
        assert_eq!(out.state.v, 0.0);
        assert_eq!(out.state.s, 0.0);
    }

    #[test]
    fn stopping_mid_step_lands_on_stop_point() {
        let p = VehicleParams::default();
        let out = step_plant(at(0.1), -3.0, &p, 0.05);
        assert_eq!(out.state.v, 0.0);
        let a = p.accel_for(p.force_for(-3.0, 0.1), 0.1);
        assert!((out.state.s - 0.01 / (-2.0 * a)).abs() < 1e-15);
    }
}
