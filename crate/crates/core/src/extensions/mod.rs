//! Variations on the two-level chain: a manager who helps his agents,
//! richer reporting of the agents' outputs, and a third management layer.

mod ability;
mod reporting;
mod three_level;

pub use ability::{apply_ability, AbilityParams};
pub use reporting::{
    b_embedding, h_ipc, is_pc_admissible, pc_construction_identical, pc_objective,
    separate_reporting_values, solve_pc, z_ipc, PcResult, RatePC, SeparateVariant,
};
pub use three_level::{
    solve_three_level, three_level_inner, three_level_inner_2d, InnerSolution, OrgSpec, Team,
    ThreeLevelResult, ThreeLevelSolver,
};
