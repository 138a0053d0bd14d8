//! Constrained application problems driven through the continuous optimizer.

pub mod assignment;
pub mod vessel;

pub use assignment::{
    assignment_cost, brute_force_assignment, decode_assignment, AssignmentInstance,
    AssignmentProblem, EncodingError, InstanceError, SizeError,
};
pub use vessel::{
    vessel_campaign, vessel_constraints, vessel_constraints_printed, vessel_cost, vessel_domain,
    vessel_penalized, FeasibleBest, PenaltyConfig, PressureVesselProblem, PressureVesselSolution,
    TrackedVessel, VesselCampaignReport, VesselRunOutcome,
};
