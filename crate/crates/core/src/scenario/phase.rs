//! Periodic two-color signal timing.
//!
//! Yellow is folded into red, so a light is either green or red. The green
//! window of cycle `k` is `[offset + k * cycle, offset + k * cycle + green)`;
//! at a shift instant the new color already applies.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Red,
}

impl Color {
    pub fn flipped(self) -> Color {
        match self {
            Color::Green => Color::Red,
            Color::Red => Color::Green,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Red => "red",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A color change, `after` seconds from the query time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    pub after: f64,
    pub color: Color,
}

/// Timing of one traffic light.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    pub id: String,
    /// Abscissa of the stop line, m.
    pub stop_line: f64,
    /// Cycle length, s.
    pub cycle: f64,
    /// Green duration within one cycle, s.
    pub green: f64,
    /// Start of a green window relative to simulation time zero, s.
    pub offset: f64,
}

impl PhaseSchedule {
    pub fn new(id: impl Into<String>, stop_line: f64, cycle: f64, green: f64, offset: f64) -> Self {
        PhaseSchedule {
            id: id.into(),
            stop_line,
            cycle,
            green,
            offset,
        }
    }

    /// Position inside the current cycle, in `[0, cycle)`.
    fn cycle_time(&self, t: f64) -> f64 {
        let tau = (t - self.offset).rem_euclid(self.cycle);
        // rem_euclid can round up to exactly `cycle` for tiny negative inputs
        if tau >= self.cycle {
            0.0
        } else {
            tau
        }
    }

    pub fn phase_at(&self, t: f64) -> Color {
        if self.cycle_time(t) < self.green {
            Color::Green
        } else {
            Color::Red
        }
    }

    /// Color at simulation time zero.
    pub fn initial_color(&self) -> Color {
        self.phase_at(0.0)
    }

    /// The next `count` color changes strictly after `t`, as offsets from `t`.
    pub fn next_shifts(&self, t: f64, count: usize) -> Vec<Shift> {
        let tau = self.cycle_time(t);
        let mut shifts = Vec::with_capacity(count);
        let (mut after, mut color) = if tau < self.green {
            (self.green - tau, Color::Red)
        } else {
            (self.cycle - tau, Color::Green)
        };
        while shifts.len() < count {
            shifts.push(Shift { after, color });
            after += match color {
                Color::Red => self.cycle - self.green,
                Color::Green => self.green,
            };
            color = color.flipped();
        }
        shifts
    }

    /// Time from `t` until the light next shows `color`; zero if it already does.
    pub fn time_until(&self, t: f64, color: Color) -> f64 {
        if self.phase_at(t) == color {
            0.0
        } else {
            self.next_shifts(t, 1)[0].after
        }
    }
}
