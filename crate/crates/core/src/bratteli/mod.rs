//! Weighted Bratteli diagrams: level structure, the level recursion for
//! harmonic functions, currents and energy bounds.

mod currents;
mod diagram;
mod leveling;
mod recursion;

pub use currents::{currents, energy_lower_bound, level_extrema, level_harmonic_residuals, Currents, EnergyBound, EnergyVerdict, LevelExtrema};
pub use diagram::{
    build_diagram, build_diagram_with, subdivide_multi_edges, BratteliDiagram, ConductanceRule, DiagramNetwork, Incidence, LevelFunction, MultiEdge,
};
pub use leveling::{graph_to_bratteli, LevelingReport, LevelingViolation};
pub use recursion::{arrow_matrices, harmonic_exists, harmonic_extend, harmonic_sequence, ArrowMatrices, Assembly, ExistenceReport, Extension};
