//! Time evolution: the pseudo-spectral nonlinearity, the integrating-factor
//! RK4 stepper, the Picard iteration for the mild solution and the
//! complexified hierarchy.

pub mod complex_shift;
pub mod nonlinear;
pub mod picard;
pub mod stepper;

pub use complex_shift::{complex_shift_solve, ComplexPair, ComplexShiftConfig, ComplexShiftResult};
pub use nonlinear::{nonlinearity, Dealias, PseudoSpectral};
pub use picard::{picard_mild_solve, PicardConfig, PicardReport};
pub use stepper::{integrate, Integrator, Scheme, StepperConfig};
