//! Divergent diagonal orbits, equidistributing families and the measures
//! they carry.

pub mod family;
pub mod invariants;
pub mod measure;
pub mod permute;
pub mod thin;

pub use family::{a_invariance_defect, w_vector, Family, InvarianceDefect};
pub use invariants::{
    build_x_t, card_delta_hat, coordinate_sublattice, delta_set, delta_x, delta_x_m, directional_systoles, exp_k,
    integral_representative, orbit_invariants, quasicenter_shift, u_t, OrbitInvariants,
};
pub use measure::{
    atom_table, build_measure, check_unit_twist, disc_type_search, eval_observable, interval, mass_where,
    orbit_disc_type, q_to_f64, window_compare, Atom, DiscType, MeasureKind, Observable, SampledMeasure, WindowReport,
};
pub use permute::{check_cycle, check_permutation, cycle_transport, permute_family, CycleImage};
pub use thin::{interval_thin_mass, thin_count_brute, thin_count_direct, thin_count_exact};
