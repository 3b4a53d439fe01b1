//! Constructive checks of minimal-angle preservers: induced line maps,
//! isometry recovery, sharp-triple propagation, certificates and the
//! named property suites.

mod certificates;
mod nonstandard;
mod recovery;
mod sharp;
pub mod suites;

pub use certificates::{
    certificate_complement_not_standard, certificate_degenerate_regime, certificate_two_by_two, rank_one_2x2,
    Certificate, GridPoint, TWO_BY_TWO_TOLERANCE,
};
pub use nonstandard::{find_nonmonotonicity_witness, MonotonicityWitness, WITNESS_THRESHOLD};
pub use recovery::{
    build_line_map, fix_global_phase, preservation_residual, probe_lines, recover_isometry, verify_preserver, Branch,
    LineMap, RecoveryResult, BRANCH_THRESHOLD,
};
pub use sharp::{
    check_sharp_propagation, complete_frame, find_sharp_pair, negative_control_table, random_sharp_pair,
    sharp_configuration_dim, sharp_configurations, sharp_residual, SharpConfiguration,
};
pub use suites::{run_suite, Suite, SuiteConfig};
