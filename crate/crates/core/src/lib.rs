//! Numerical laboratory for blow-up and lifespan scaling of the compressible
//! Euler equations with time-dependent damping.
//!
//! The crate is organized around the objects that drive the blow-up argument
//! for small perturbations of a constant state:
//!
//! * [`orlicz`] — the N-function family Υ built from the adiabatic index γ,
//!   its complementary function, Luxemburg norms of radial grid functions,
//!   and checkers for the inequalities the argument relies on.
//! * [`testfn`] — the exponential test functions φ (with Δφ = φ) and
//!   ψ = e⁻ᵗφ, including the Bessel closed form in two dimensions.
//! * [`solver`] — shock-capturing finite-volume solvers for the damped Euler
//!   system in symmetric-hyperbolic (θ, u) variables (1D and radial 2D/3D),
//!   with an independent Lagrangian p-system backend for 1D cross-checks,
//!   blow-up detection and lifespan measurement.
//! * [`functional`] — the functionals F(t) = ∫(ρ−1)ψ dx and
//!   G(t) = (1+t)^{μ/2} F(t) along solver trajectories, the multipliers that
//!   absorb the damping term, and numerical checks of the differential
//!   identities and inequalities they satisfy.
//! * [`ode`] — the generalized Li–Zhou blow-up lemma as an executable object:
//!   piecewise-power nonlinearities, adaptive integration to blow-up,
//!   comparison/convexity lemma spot checks.
//! * [`fit`] — scaling-law regression for lifespan sweeps.

pub mod fit;
pub mod functional;
pub mod grid;
pub mod ode;
pub mod orlicz;
pub mod sampling;
pub mod solver;
pub mod testfn;

mod error;

pub use error::{Error, Result};
pub use fit::{FitMode, ScalingFit};
pub use grid::RadialGridFunction;
pub use ode::{OdeRunConfig, PiecewisePowerN};
pub use orlicz::NFunctionFamily;
pub use solver::{
    DampingParams, FluidState, InitialDataFamily, LifespanRecord, TerminationReason,
};
pub use testfn::TestFunctionContext;
