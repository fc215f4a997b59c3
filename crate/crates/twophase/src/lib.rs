//! Numerical toolkit for the linearized two-phase Stokes free-boundary
//! problem with surface tension and gravity.
//!
//! The crate constructs the interface boundary symbol from first principles,
//! analyzes its Rayleigh-Taylor dispersion (critical wavenumber, growth-rate
//! curves, right-half-plane zero counts, time-domain mode response), evaluates
//! the graph-coordinate nonlinearities with their directional derivatives, and
//! provides fractional Sobolev-Slobodeckij norm machinery with independent
//! cross-checks.
//!
//! Start with the runnable programs under `examples/`; the `twophase` binary
//! exposes the same capabilities as subcommands emitting CSV/JSON artifacts.

pub mod cli;
pub mod dispersion;
pub mod grid;
pub mod kernels;
pub mod params;
pub mod report;
pub mod spaces;
pub mod symbol;

pub use dispersion::{
    count_zeros_rhp, critical_wavenumber, dispersion_curve, find_growth_rate, mode_response,
    DispersionCurve, ModeResponse, Rectangle, TalbotOptions,
};
pub use grid::{BulkScalar, ScalarField};
pub use kernels::{
    eval_f, eval_f_d, eval_g, eval_g_kappa, eval_h_b, mean_curvature_graph, KernelId,
};
pub use params::{in_sector, jump, FluidParams, Sector, StripDomain};
pub use spaces::{
    extend_c1, hardy_ratio, partition_of_unity, poisson_seminorm, riesz_potential,
    slobodeckij_seminorm, SampledFunction, SeminormReport,
};
pub use symbol::{
    eval_boundary_symbol, eval_extended_symbol, k_of_z, normal_velocity_response, verify_sandwich,
    BoundsReport, SweepGridSpec, SymbolValue,
};
