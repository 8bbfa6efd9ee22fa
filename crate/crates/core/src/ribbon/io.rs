//! JSON and DOT forms of ribbon graphs. Darts and labels are 1-based.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::map::CombinatorialMap;
use super::skeleton::{in_dart, out_dart, RibbonGraph};
use super::weights::HurwitzRibbonGraph;
use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaceColor {
    White,
    Gray,
}

/// Per-dart description of a bicolored map. `face_colors[x]` and
/// `face_labels[x]` describe the face orbit of dart `x` under
/// `rotation ∘ involution`; `weights[x]` is the weight of its edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub darts: usize,
    pub rotation: Vec<usize>,
    pub involution: Vec<usize>,
    pub vertex_labels: Vec<usize>,
    pub face_colors: Vec<FaceColor>,
    pub face_labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
}

impl RibbonGraph {
    pub fn to_json(&self) -> MapJson {
        let map = self.to_map();
        let ann = self.dart_annotations();
        MapJson {
            darts: map.num_darts(),
            rotation: map.rotation().iter().map(|x| x + 1).collect(),
            involution: map.involution().iter().map(|x| x + 1).collect(),
            vertex_labels: ann.iter().map(|a| a.0).collect(),
            face_colors: ann.iter().map(|a| if a.1 { FaceColor::White } else { FaceColor::Gray }).collect(),
            face_labels: ann.iter().map(|a| a.2).collect(),
            weights: None,
        }
    }

    pub fn from_json(json: &MapJson) -> Result<RibbonGraph> {
        let n = json.darts;
        let lens = [
            json.rotation.len(),
            json.involution.len(),
            json.vertex_labels.len(),
            json.face_colors.len(),
            json.face_labels.len(),
        ];
        if lens.iter().any(|&l| l != n) {
            return Err(HurwitzError::InvalidMap("per-dart arrays must have length darts".into()));
        }
        let zero_based = |v: &[usize]| -> Result<Vec<usize>> {
            v.iter()
                .map(|&x| x.checked_sub(1).ok_or_else(|| HurwitzError::InvalidMap("darts are 1-based".into())))
                .collect()
        };
        let map = CombinatorialMap::new(zero_based(&json.rotation)?, zero_based(&json.involution)?)?;
        let white: Vec<bool> = json.face_colors.iter().map(|&c| c == FaceColor::White).collect();
        for face in map.faces() {
            let x = face[0];
            if face.iter().any(|&y| white[y] != white[x] || json.face_labels[y] != json.face_labels[x]) {
                return Err(HurwitzError::InvalidMap("face colors and labels must be constant on faces".into()));
            }
        }
        RibbonGraph::from_map(&map, &json.vertex_labels, &white, &json.face_labels)
    }

    pub fn to_dot(&self) -> String {
        dot(self, None)
    }
}

impl HurwitzRibbonGraph {
    pub fn to_json(&self) -> MapJson {
        let mut json = self.skeleton.to_json();
        let mut weights = vec![0; json.darts];
        for (k, &w) in self.weights.iter().enumerate() {
            weights[out_dart(k)] = w;
            weights[in_dart(self.skeleton.pairing()[k])] = w;
        }
        json.weights = Some(weights);
        json
    }

    pub fn from_json(json: &MapJson, params: HurwitzParams) -> Result<HurwitzRibbonGraph> {
        let g = RibbonGraph::from_json(json)?;
        let per_dart = json
            .weights
            .as_ref()
            .ok_or_else(|| HurwitzError::InvalidMap("weights missing".into()))?;
        // from_map keeps the slot order of each vertex, so recover weights through
        // the outgoing dart of each edge in the input
        let map = CombinatorialMap::new(
            json.rotation.iter().map(|x| x - 1).collect(),
            json.involution.iter().map(|x| x - 1).collect(),
        )?;
        let white: Vec<bool> = json.face_colors.iter().map(|&c| c == FaceColor::White).collect();
        let mut weights = vec![0; g.num_edges()];
        for orbit in map.vertices() {
            let start = orbit.iter().position(|&x| !white[x]).expect("validated");
            let v = json.vertex_labels[orbit[0]] - 1;
            for slot in [0, 2] {
                let x = orbit[(start + slot) % 4];
                if per_dart[x] != per_dart[map.involution()[x]] {
                    return Err(HurwitzError::InvalidMap("both darts of an edge need the same weight".into()));
                }
                weights[2 * v + slot / 2] = per_dart[x];
            }
        }
        HurwitzRibbonGraph::new(g, weights, params)
    }

    pub fn to_dot(&self) -> String {
        dot(&self.skeleton, Some(&self.weights))
    }
}

fn dot(g: &RibbonGraph, weights: Option<&[u64]>) -> String {
    let mut s = String::from("digraph ribbon {\n");
    for v in 0..g.r() {
        let _ = writeln!(s, "  v{} [label=\"{}\"];", v + 1, v + 1);
    }
    for e in 0..g.num_edges() {
        let (i, j) = g.endpoints(e);
        let w = weights.map_or("-".to_string(), |w| w[e].to_string());
        let _ = writeln!(
            s,
            "  v{} -> v{} [label=\"w={w}; {}→{}\", tooltip=\"white {} gray {}\"];",
            i + 1,
            j + 1,
            i + 1,
            j + 1,
            g.white_labels()[e] + 1,
            g.gray_labels()[e] + 1
        );
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::weights::enumerate_hrgs;

    #[test]
    fn json_roundtrip() {
        let p = HurwitzParams::new(0, &[2, 1], &[2, 1]).unwrap();
        for (h, _) in enumerate_hrgs(&p).unwrap() {
            let text = serde_json::to_string(&h.to_json()).unwrap();
            let back: MapJson = serde_json::from_str(&text).unwrap();
            let h2 = HurwitzRibbonGraph::from_json(&back, p.clone()).unwrap();
            assert!(h.is_isomorphic(&h2));
            assert!(h.to_dot().contains("w="));
        }
    }
}
