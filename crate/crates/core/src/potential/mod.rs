//! Dirichlet problems, dipoles, monopoles, boundary sums and the Royden split.

mod boundary;
mod dirichlet;
mod poles;

pub use boundary::{gauss_green_split, normal_derivative, royden_split, GaussGreenReport, GaussGreenWindow, RoydenSplit};
pub use dirichlet::{dirichlet_residual, maximum_principle_check, solve_dirichlet, DirichletProblem, MaximumPrincipleReport};
pub(crate) use poles::monopole_trend;
pub use poles::{
    dipole, dipole_with, monopole, multipole, multipole_with, resistance_distance, Exhaustion, PotentialResult, RadiusEnergy, Truncation, Verdict,
    CONVERGENCE_TOL, RECURRENT_INCREMENT_RATIO,
};
