//! Per-distance energy consumption.

use serde::Serialize;

/// J/m to kWh/100 km.
pub const J_PER_M_TO_KWH_PER_100KM: f64 = 100_000.0 / 3.6e6;

pub fn kwh_per_100km(j_per_m: f64) -> f64 {
    j_per_m * J_PER_M_TO_KWH_PER_100KM
}

/// Instantaneous consumption over one step: `P·dt/ds`, J/m.
pub fn iec(power: f64, dt: f64, ds: f64) -> f64 {
    power * dt / ds
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergySample {
    /// W
    pub power: f64,
    /// J/m
    pub iec: f64,
    /// J/m
    pub aec: f64,
    pub distance: f64,
    pub time: f64,
}

/// Running average of the instantaneous consumption.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyMeter {
    regen_efficiency: Option<f64>,
    samples: usize,
    aec: f64,
}

impl EnergyMeter {
    pub fn new(regen_efficiency: Option<f64>) -> Self {
        EnergyMeter {
            regen_efficiency,
            samples: 0,
            aec: 0.0,
        }
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// J/m; zero before the first sample.
    pub fn aec(&self) -> f64 {
        self.aec
    }

    /// Traction power at mean speed `v_mean`. Braking power is dropped unless
    /// regeneration is enabled.
    pub fn power(&self, force: f64, v_mean: f64) -> f64 {
        let p = force * v_mean;
        if p >= 0.0 {
            p
        } else {
            self.regen_efficiency.map_or(0.0, |eta| eta * p)
        }
    }

    /// Feeds one instantaneous value into the running mean.
    pub fn push_iec(&mut self, iec: f64) -> f64 {
        let n = self.samples as f64;
        self.aec = (iec + n * self.aec) / (n + 1.0);
        self.samples += 1;
        self.aec
    }

    /// Records a plant step. Steps without travelled distance are skipped.
    pub fn record(
        &mut self,
        force: f64,
        dt: f64,
        ds: f64,
        distance: f64,
        time: f64,
    ) -> Option<EnergySample> {
        if !(ds > 0.0) {
            return None;
        }
        let power = self.power(force, ds / dt);
        let iec = iec(power, dt, ds);
        let aec = self.push_iec(iec);
        Some(EnergySample {
            power,
            iec,
            aec,
            distance,
            time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_kilowatts_at_ten_metres_per_second() {
        let j_per_m = iec(10_000.0, 0.05, 10.0 * 0.05);
        assert!((j_per_m - 1000.0).abs() < 1e-9);
        assert!((kwh_per_100km(j_per_m) - 27.78).abs() < 0.01);
    }

    #[test]
    fn running_mean_sequence() {
        let mut m = EnergyMeter::new(None);
        let seq: Vec<f64> = [1.0, 2.0, 3.0].iter().map(|&x| m.push_iec(x)).collect();
        assert_eq!(seq, vec![1.0, 1.5, 2.0]);
    }

    #[test]
    fn braking_power_is_dropped_without_regen() {
        let mut m = EnergyMeter::new(None);
        let s = m.record(-500.0, 0.05, 0.5, 0.5, 0.05).unwrap();
        assert_eq!(s.power, 0.0);
        assert_eq!(s.iec, 0.0);
        let with_regen = EnergyMeter::new(Some(0.6));
        assert!((with_regen.power(-500.0, 10.0) + 3000.0).abs() < 1e-9);
    }

    #[test]
    fn standstill_is_skipped() {
        let mut m = EnergyMeter::new(None);
        assert!(m.record(200.0, 0.05, 0.0, 0.0, 0.05).is_none());
        assert_eq!(m.samples(), 0);
    }
}
