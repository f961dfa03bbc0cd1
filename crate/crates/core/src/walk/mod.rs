//! Random walks with kernel p(x,y) = c_xy / c(x): Monte-Carlo hitting
//! estimates, truncated Green sums and the probabilistic potentials.

mod engine;
mod estimates;
mod green;
mod level;
mod probabilistic;
mod transience;

pub use engine::{sample_path, McParams, StopRule, WalkEstimate};
pub use estimates::{estimate_f, estimate_green_visits, estimate_u, return_profile, UEstimate};
pub(crate) use green::{classify_growth, doubling_ratio};
pub use green::{green_identities_report, green_truncated, GreenIdentitiesReport, GreenSeries, Growth, IdentityCheck, GREEN_DIVERGENCE_RATIO};
pub use level::{level_hitting_sequence, Compatibility, LevelHittingReport};
pub use probabilistic::{
    dipole_probabilistic, h_energy_report, harmonic_extension, hitting_matrix_d, monopole_probabilistic, monopole_probabilistic_unchecked, DipoleProbabilistic,
    HEnergyReport, HarmonicExtension, HittingMatrixD, McFunction,
};
pub use transience::{transience_test, Classification, TransienceEvidence, TransienceReport, U_RECURRENT, U_SETTLED_RISE};
