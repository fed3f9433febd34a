//! Pseudospectral simulator and verification suite for the damped wave
//! equation
//!
//! `u_tt - Delta u + (-Delta)^alpha u_t + u_t + u + g(u) = f(x)`
//!
//! on a large periodic box, with dissipative index `alpha in (1/2, 1)`.
//! The crate provides exact per-mode linear propagation, an exponential
//! time-differencing integrator, frequency-truncation (low-pass) and
//! spatial cut-off operators, the energy and Lyapunov functionals used to
//! quantify dissipation, smoothing and tail behavior, and experiments
//! measuring the robustness of the long-time dynamics in `alpha`.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod lowpass;
pub mod nonlin;
pub mod robustness;
pub mod sampling;
pub mod spectral;
pub mod tail;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::Grid;
