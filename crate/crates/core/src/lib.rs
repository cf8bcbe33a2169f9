//! Ollivier-Ricci curvature of undirected unweighted graphs: exact values via
//! transportation / matching, constant-query local approximations over
//! instrumented oracles, and sampling estimators for node and graph averages.

pub mod adversarial;
pub mod assignment;
pub mod bounds;
pub mod emd;
pub mod error;
pub mod flow;
pub mod graph;
pub mod local;
pub mod matching;
pub mod numeric;
pub mod oracle;
pub mod par;
pub mod reduction;
pub mod sampling;

pub use adversarial::{
    gen_all_heavy, gen_permutation, gen_single_light, run_experiment, ExperimentReport, FamilyKind,
    FamilyMix, Strategy,
};
pub use bounds::{curvature_bounds, tvd_closed_form, CurvatureBounds};
pub use emd::{
    brute_force_emd, curvature_avg, curvature_edge, curvature_node, emd_matching, emd_transport,
    min_weight_perfect_matching, reduced_instance, EmdMethod, EmdResult, MpmctInstance,
};
pub use error::{Error, Result};
pub use graph::{Graph, GraphBuilder, LocalBipartite, NodeId, OverlapStats};
pub use local::{
    approx_edge, approx_equal_a, approx_equal_b, approx_unequal, make_padded_session, ApproxCase,
    ApproxCurvature, ApproxMode, Bias, PaddedSession, ReducedView, Variant,
};
pub use matching::{estimate_matching, LocalMatchingConfig, MatchingBackend, MatchingEstimate};
pub use oracle::{BipartiteOracle, QueryCounters, QuerySession, Side, Vertex, WeightedBipartite};
pub use reduction::{pad_to_equal, padded_emd, realize_as_graph, PaddedBipartite};
pub use sampling::{
    estimate_avg_curvature, estimate_node_curvature, sample_uniform_edge, EdgeCurvatureOracle,
    EstimatorConfig, ExactEdgeCurvature, SampledCurvature,
};
