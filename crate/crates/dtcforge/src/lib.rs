//! dtcforge — synthesize periodic control pulses that drive many-body systems
//! into discrete-time-crystal (period-doubled) responses.
//!
//! The crate couples a truncated-Fourier (CRAB-style) pulse ansatz with a
//! bounded derivative-free optimizer and two simulated testbeds:
//!
//! * [`dicke`] — the open Dicke model in the mean-field limit: a collective
//!   spin coupled to a damped cavity mode, integrated with fixed-step RK4 and
//!   observed stroboscopically at the drive period.
//! * [`chain`] — a disordered Floquet spin chain evolved exactly in the full
//!   `2^L` state space, diagnosed through site-resolved spin autocorrelations.
//!
//! [`spectral`] supplies the discrete Fourier analysis and the dynamical-phase
//! classifier (period-doubled / limit cycle / thermal / period-1), [`cost`]
//! the two scalar objectives, [`optimizer`] the bounded Nelder–Mead search,
//! and [`workbench`] the configuration, persistence and experiment drivers
//! behind the `dtcforge` command-line tool.
//!
//! Start with the `examples/` directory: each example is a runnable walk
//! through one capability, from pulse arithmetic to the full optimization
//! loops.

pub mod chain;
pub mod cost;
pub mod dicke;
pub mod optimizer;
pub mod pulse;
pub mod spectral;
pub mod workbench;
