//! Labeled general maps and their medial graphs.

use super::map::CombinatorialMap;
use super::skeleton::RibbonGraph;
use crate::error::{HurwitzError, Result};

/// A connected map with labeled vertices, faces and edges. Labels are
/// 1-based and stored per dart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GjvRibbonGraph {
    pub map: CombinatorialMap,
    pub vertex_label: Vec<usize>,
    pub face_label: Vec<usize>,
    pub edge_label: Vec<usize>,
}

fn label_orbits(orbits: &[Vec<usize>], darts: usize) -> Vec<usize> {
    let mut label = vec![0; darts];
    for (i, orbit) in orbits.iter().enumerate() {
        for &x in orbit {
            label[x] = i + 1;
        }
    }
    label
}

impl GjvRibbonGraph {
    /// Labels vertices, faces and edges in order of their smallest dart.
    pub fn with_default_labels(map: CombinatorialMap) -> Result<Self> {
        let n = map.num_darts();
        let vertex_label = label_orbits(&map.vertices(), n);
        let face_label = label_orbits(&map.faces(), n);
        let edge_label = label_orbits(&map.edges(), n);
        GjvRibbonGraph::new(map, vertex_label, face_label, edge_label)
    }

    pub fn new(
        map: CombinatorialMap,
        vertex_label: Vec<usize>,
        face_label: Vec<usize>,
        edge_label: Vec<usize>,
    ) -> Result<Self> {
        if !map.is_connected() {
            return Err(HurwitzError::InvalidMap("map is not connected".into()));
        }
        let darts = map.num_darts();
        let check = |orbits: Vec<Vec<usize>>, label: &[usize], what: &str| -> Result<()> {
            let count = orbits.len();
            let mut seen = vec![false; count + 1];
            for orbit in &orbits {
                let l = label[orbit[0]];
                if l == 0 || l > count || orbit.iter().any(|&x| label[x] != l) || seen[l] {
                    return Err(HurwitzError::InvalidMap(format!("{what} labels must biject onto 1..={count}")));
                }
                seen[l] = true;
            }
            Ok(())
        };
        if [&vertex_label, &face_label, &edge_label].iter().any(|l| l.len() != darts) {
            return Err(HurwitzError::InvalidMap("one label per dart expected".into()));
        }
        check(map.vertices(), &vertex_label, "vertex")?;
        check(map.faces(), &face_label, "face")?;
        check(map.edges(), &edge_label, "edge")?;
        Ok(GjvRibbonGraph { map, vertex_label, face_label, edge_label })
    }
}

/// One 4-valent vertex per edge and one edge per corner. The corner from dart
/// `x` to `rotation(x)` becomes an edge from the midpoint of `x`'s edge to that
/// of `rotation(x)`'s edge, with the original vertex on its left (white) and
/// the face of the corner on its right (gray).
pub fn medial_graph(g: &GjvRibbonGraph) -> Result<RibbonGraph> {
    let map = &g.map;
    let darts = map.num_darts();
    let r = darts / 2;
    let inv = map.involution();
    // slot of dart x at the medial vertex of its edge: 0 for the smaller dart
    let index = |x: usize| 2 * (g.edge_label[x] - 1) + usize::from(x > inv[x]);
    let mut pairing = vec![0; darts];
    let mut white = vec![0; darts];
    let mut gray = vec![0; darts];
    for x in 0..darts {
        let k = index(x);
        pairing[k] = index(map.rotation()[x]);
        white[k] = g.vertex_label[x] - 1;
        gray[k] = g.face_label[inv[x]] - 1;
    }
    RibbonGraph::new(r, pairing, white, gray)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(k: usize) -> CombinatorialMap {
        // vertex i has darts 2i (towards i+1) and 2i+1 (towards i-1)
        let rotation = (0..2 * k).map(|x| x ^ 1).collect();
        let involution = (0..2 * k)
            .map(|x| if x % 2 == 0 { (2 * (x / 2 + 1) + 1) % (2 * k) } else { (2 * (x / 2 + k - 1)) % (2 * k) })
            .collect();
        CombinatorialMap::new(rotation, involution).unwrap()
    }

    #[test]
    fn medial_of_cycles() {
        for k in 1..6 {
            let map = cycle(k);
            assert_eq!(map.genus().unwrap(), 0);
            let m = medial_graph(&GjvRibbonGraph::with_default_labels(map).unwrap()).unwrap();
            assert_eq!((m.r(), m.num_edges()), (k, 2 * k));
            assert_eq!((m.m(), m.n()), (k, 2));
            assert_eq!(m.to_map().genus().unwrap(), 0);
        }
    }

    #[test]
    fn medial_of_single_loop() {
        let map = CombinatorialMap::new(vec![1, 0], vec![1, 0]).unwrap();
        let m = medial_graph(&GjvRibbonGraph::with_default_labels(map).unwrap()).unwrap();
        assert_eq!((m.m(), m.n(), m.r()), (1, 2, 1));
        assert_eq!(m.genus(), 0);
        assert_eq!(m.to_map().genus().unwrap(), 0);
    }

    #[test]
    fn medial_preserves_genus() {
        let torus = CombinatorialMap::new(vec![1, 2, 3, 0], vec![2, 3, 0, 1]).unwrap();
        let m = medial_graph(&GjvRibbonGraph::with_default_labels(torus).unwrap()).unwrap();
        assert_eq!((m.m(), m.n(), m.r()), (1, 1, 2));
        assert_eq!(m.to_map().genus().unwrap(), 1);
    }

    #[test]
    fn rejects_bad_labels() {
        let map = CombinatorialMap::new(vec![1, 0], vec![1, 0]).unwrap();
        assert!(GjvRibbonGraph::new(map, vec![1, 1], vec![1, 1], vec![1, 1]).is_err());
    }
}
