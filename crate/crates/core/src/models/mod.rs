//! Model networks and closed-form fixtures.

mod fixtures;
mod networks;

pub use fixtures::{
    binary_tree_fixture, fixture_by_name, lattice_fixture, line_dipole, line_fixture, line_potential, pascal_fixture, pascal_h, registry, stationary_family,
    stationary_fixture, tree_f_lambda, z_unit_dipole, ClosedForm, Expected, Fixture, FixtureParams, FormCheck, FormKind, LineVariant, RegistryEntry,
    BUILD_RADIUS, BUILD_RTOL, DEFAULT_DIAGRAM_DEPTH,
};
pub use networks::{BinaryTree, Lattice, LineDomain, LineNetwork, TREE_MAX_LEVEL};
