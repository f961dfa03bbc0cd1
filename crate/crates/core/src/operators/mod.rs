//! Laplacian, Markov operator, energy form and the dissipation space.

mod energy;
mod function;
mod laplacian;

pub use energy::{
    cycle_pairing, dissipation_norm, dissipation_norm_sq, drop, energy, energy_form, energy_report, harmonic_energy_via_p, interior_energy_sum, norms,
    EnergyReport, Norms,
};
pub use function::{fmt_f64, EdgeFlow, VertexFunction};
pub use laplacian::{
    assemble_laplacian, harmonic_residual, laplacian_apply, laplacian_at, laplacian_values, markov_apply, markov_at, window_graph_laplacian, SparseLaplacian,
};
