//! Network-design toolkit core: multilayer graph model, instance
//! generation, overlay synthesis, routing with traffic grooming, and
//! cost-minimizing solvers.

pub mod builder;
pub mod error;
pub mod ids;
mod index;
pub mod instance;
pub mod mlg;
pub mod optimizer;
pub mod paths;
pub mod report;
pub mod routing;

pub use builder::{
    build_redundant_mlg, candidate_logical_links, BuilderParams, CandidateLink, CandidateLsrSet,
};
pub use error::{Error, Result};
pub use ids::{EdgeId, LinkId, NodeId};
pub use instance::{
    generate_instance, read_instance, suite_variants, write_instance, CostModel, Demand, Instance,
    InstanceViolation, InstanceViolationCode, Meta, TransportEdge, VariantParams, SUITE_VARIANTS,
};
pub use mlg::{
    layer_subgraph, physical_load, validate, Capacity, EdgeKind, LayerId, LayerSubgraph,
    LayeredVertex, MlgEdge, MultilayerGraph, Violation, ViolationCode,
};
pub use optimizer::{
    evaluate_cost, solve_exact, solve_full_lsr_baseline, solve_multilayer, ChosenLink,
    CostBreakdown, ExactLimits, SearchParams, Solution,
};
pub use report::{
    emit_report, run_comparison, summarize_savings, verify_feasibility, ComparisonRow,
    ComparisonTable, ReportFormat, SavingsSummary, SuiteConfig, CSV_HEADER,
    REFERENCE_SAVINGS_BAND,
};
pub use routing::{
    assign_capacities, route_flows, CapacityPlan, FlowAssignment, Selection,
};
