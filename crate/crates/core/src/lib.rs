//! Multi-light speed advisory: admissible-speed planning over a sequence of
//! fixed-time traffic lights, an optimal-control smoother for the advised
//! profile, and a closed-loop simulator to compare drivers.

// negated float comparisons are deliberate (they reject NaN); grid loops index
// several parallel arrays
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod advisor;
pub mod kinematics;
pub mod mpc;
pub mod report;
pub mod scenario;
pub mod sim;

pub use advisor::{Advice, AdviceKind, Advisor, AdvisorConfig, VehicleState, Warning};
pub use mpc::{OcpConfig, OptimalAdvisor};
pub use scenario::{Color, PhaseSchedule, Scenario, ScenarioError};
pub use sim::{compare, run, CompareReport, DriverKind, SimError, SimTrace, Summary};
