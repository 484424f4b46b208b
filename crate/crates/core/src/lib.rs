//! Simulation laboratory for the localization game on random geometric
//! graphs over the torus: geometry primitives, graph sampling with implicit
//! adjacency, hop-distance signatures, the game referee with exact
//! small-graph values, cop and robber strategies, and the experiment harness.

pub mod distances;
pub mod game;
pub mod geometry;
pub mod harness;
pub mod rgg;
pub mod rng;
pub mod strategies;

pub use distances::{
    check_distance_bound, closed_neighborhood, gamma, hop_distances, refine, signatures,
    CandidateClass, DistanceBoundReport, GammaInputs, Signature, INF_HOPS,
};
pub use geometry::{
    annulus_area, boundary_arcs, crown_pair_strip, mc_area, symdiff_area, torus_distance,
    tube_area_budget, ArcSet, Ball, CircularArc, Crown, GeomError, Point, Rect, Strip, TorusBox,
};
pub use rgg::{
    sample_instance, CellGrid, GraphInstance, MetricMode, ModelParams, Profile, Region, RggError,
    SampleMode, VertexId,
};
pub use rng::Stream;
