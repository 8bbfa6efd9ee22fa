//! Ribbon graphs: general maps, `(m,n,r)`-skeletons, weightings and the
//! ribbon-graph count.

pub mod io;
pub mod map;
pub mod medial;
pub mod skeleton;
pub mod weights;

pub use io::{FaceColor, MapJson};
pub use map::CombinatorialMap;
pub use medial::{medial_graph, GjvRibbonGraph};
pub use skeleton::{enumerate_skeletons, for_each_skeleton, RibbonGraph};
pub use weights::{
    count_hurwitz_ribbon, edge_length, enumerate_hrgs, lattice_points, orbit_weighted_count,
    weight_polytope, HurwitzRibbonGraph, WeightPolytope,
};

/// Tail and head vertex labels (1-based) of `edge` with white on the left.
pub fn natural_orientation(g: &RibbonGraph, edge: usize) -> (usize, usize) {
    let (i, j) = g.endpoints(edge);
    (i + 1, j + 1)
}

pub fn aut_order(g: &RibbonGraph) -> usize {
    g.aut_order()
}
