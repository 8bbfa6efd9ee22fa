//! `(m,n,r)`-ribbon graphs: 4-valent bicolored maps with labeled vertices and
//! labeled white and gray faces.
//!
//! Vertex `v` (label `v+1`) owns darts `4v..4v+4` in counterclockwise order.
//! Positions 0 and 2 are outgoing and 1 and 3 incoming under the natural
//! orientation (white on the left, gray on the right), so the corner after an
//! outgoing dart is white. Edge `k` is identified with its outgoing dart:
//! vertex `k/2`, position `2*(k%2)`. Incoming dart `j` sits at vertex `j/2`,
//! position `2*(j%2)+1`. A map is then a bijection `pairing` from outgoing to
//! incoming darts.
//!
//! Arriving along edge `e` at incoming dart `j`, a left turn leaves along edge
//! `j` and a right turn along edge `j^1`. Hence the white faces are the cycles
//! of `pairing` and the gray faces the cycles of `e -> pairing[e]^1`.
//!
//! Label-preserving orientation-preserving isomorphisms fix each vertex and
//! rotate its darts by an even amount, so they form the group `(Z/2)^r` of
//! vertex flips, encoded as bit masks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use rayon::prelude::*;

use super::map::CombinatorialMap;
use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;

/// An `(m,n,r)`-ribbon graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RibbonGraph {
    pub(crate) r: usize,
    pub(crate) m: usize,
    pub(crate) n: usize,
    /// edge (outgoing dart index) -> incoming dart index
    pub(crate) pairing: Vec<usize>,
    /// edge -> 0-based white face label
    pub(crate) white: Vec<usize>,
    /// edge -> 0-based gray face label
    pub(crate) gray: Vec<usize>,
}

#[inline]
pub(crate) fn flip(mask: u32, k: usize) -> usize {
    if mask >> (k / 2) & 1 == 1 {
        k ^ 1
    } else {
        k
    }
}

/// Cycles of `step` on `0..len`, in order of smallest element; returns the
/// cycle index of each element and the number of cycles.
pub(crate) fn cycle_ids(len: usize, step: impl Fn(usize) -> usize) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; len];
    let mut count = 0;
    for s in 0..len {
        if id[s] != usize::MAX {
            continue;
        }
        let mut x = s;
        while id[x] == usize::MAX {
            id[x] = count;
            x = step(x);
        }
        count += 1;
    }
    (id, count)
}

fn connected(r: usize, pairing: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..r).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = r;
    for (e, &j) in pairing.iter().enumerate() {
        let (a, b) = (find(&mut parent, e / 2), find(&mut parent, j / 2));
        if a != b {
            parent[a] = b;
            comps -= 1;
        }
    }
    comps == 1
}

impl RibbonGraph {
    /// Builds and validates a skeleton from a pairing and per-edge face labels.
    pub fn new(r: usize, pairing: Vec<usize>, white: Vec<usize>, gray: Vec<usize>) -> Result<Self> {
        let e = 2 * r;
        if r == 0 || pairing.len() != e || white.len() != e || gray.len() != e {
            return Err(HurwitzError::InvalidMap("expected 2r edges, r >= 1".into()));
        }
        let mut seen = vec![false; e];
        if pairing.iter().any(|&j| j >= e || std::mem::replace(&mut seen[j], true)) {
            return Err(HurwitzError::InvalidMap("pairing is not a bijection".into()));
        }
        if !connected(r, &pairing) {
            return Err(HurwitzError::InvalidMap("map is not connected".into()));
        }
        let (wid, m) = cycle_ids(e, |k| pairing[k]);
        let (gid, n) = cycle_ids(e, |k| pairing[k] ^ 1);
        let consistent = |ids: &[usize], labels: &[usize], count: usize| {
            let mut map = vec![usize::MAX; count];
            let mut used = vec![false; count];
            ids.iter().zip(labels).all(|(&f, &l)| {
                if l >= count {
                    return false;
                }
                if map[f] == usize::MAX {
                    if std::mem::replace(&mut used[l], true) {
                        return false;
                    }
                    map[f] = l;
                }
                map[f] == l
            })
        };
        if !consistent(&wid, &white, m) || !consistent(&gid, &gray, n) {
            return Err(HurwitzError::InvalidMap("face labels are not a bijection on faces".into()));
        }
        Ok(RibbonGraph { r, m, n, pairing, white, gray })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        2 * self.r
    }

    pub fn pairing(&self) -> &[usize] {
        &self.pairing
    }

    /// 0-based white face label of each edge.
    pub fn white_labels(&self) -> &[usize] {
        &self.white
    }

    /// 0-based gray face label of each edge.
    pub fn gray_labels(&self) -> &[usize] {
        &self.gray
    }

    pub fn genus(&self) -> u32 {
        ((self.r + 2 - self.m - self.n) / 2) as u32
    }

    /// 0-based (tail, head) vertices of `edge` under the natural orientation.
    pub fn endpoints(&self, edge: usize) -> (usize, usize) {
        (edge / 2, self.pairing[edge] / 2)
    }

    /// Edge followed after `edge` when turning left (`true`) or right at its head.
    pub fn turn(&self, edge: usize, left: bool) -> usize {
        if left {
            self.pairing[edge]
        } else {
            self.pairing[edge] ^ 1
        }
    }

    /// Edges of each white face in boundary order, indexed by label.
    pub fn white_faces(&self) -> Vec<Vec<usize>> {
        self.faces_by(|k| self.pairing[k], &self.white, self.m)
    }

    /// Edges of each gray face in boundary order, indexed by label.
    pub fn gray_faces(&self) -> Vec<Vec<usize>> {
        self.faces_by(|k| self.pairing[k] ^ 1, &self.gray, self.n)
    }

    fn faces_by(&self, step: impl Fn(usize) -> usize, labels: &[usize], count: usize) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); count];
        for e in 0..self.num_edges() {
            let l = labels[e];
            if out[l].is_empty() {
                let mut x = e;
                loop {
                    out[l].push(x);
                    x = step(x);
                    if x == e {
                        break;
                    }
                }
            }
        }
        out
    }

    /// The same graph with the flips in `mask` applied to its dart names.
    pub fn flipped(&self, mask: u32) -> RibbonGraph {
        let e = self.num_edges();
        let mut pairing = vec![0; e];
        let mut white = vec![0; e];
        let mut gray = vec![0; e];
        for k in 0..e {
            let fk = flip(mask, k);
            pairing[fk] = flip(mask, self.pairing[k]);
            white[fk] = self.white[k];
            gray[fk] = self.gray[k];
        }
        RibbonGraph { pairing, white, gray, ..*self }
    }

    pub(crate) fn encode(&self) -> Vec<usize> {
        self.pairing
            .iter()
            .chain(&self.white)
            .chain(&self.gray)
            .copied()
            .collect()
    }

    /// Flip masks that fix the graph, labels included.
    pub fn automorphisms(&self) -> Vec<u32> {
        let own = self.encode();
        (0..1u32 << self.r)
            .filter(|&mask| self.flipped(mask).encode() == own)
            .collect()
    }

    pub fn aut_order(&self) -> usize {
        self.automorphisms().len()
    }

    /// The least flipped copy; two skeletons are isomorphic iff these agree.
    pub fn canonical(&self) -> RibbonGraph {
        (0..1u32 << self.r)
            .map(|mask| self.flipped(mask))
            .min_by(|a, b| a.encode().cmp(&b.encode()))
            .expect("at least the identity")
    }

    /// The same surface with face colors exchanged; every natural orientation reverses.
    pub fn with_colors_swapped(&self) -> RibbonGraph {
        let e = self.num_edges();
        // old incoming dart j becomes outgoing dart j, old outgoing k becomes incoming k^1
        let mut pairing = vec![0; e];
        let mut white = vec![0; e];
        let mut gray = vec![0; e];
        for k in 0..e {
            let j = self.pairing[k];
            pairing[j] = k ^ 1;
            white[j] = self.gray[k];
            gray[j] = self.white[k];
        }
        RibbonGraph { r: self.r, m: self.n, n: self.m, pairing, white, gray }
    }

    /// Dart-level view: `4r` darts with the rotation `(4v 4v+1 4v+2 4v+3)`.
    pub fn to_map(&self) -> CombinatorialMap {
        let darts = 4 * self.r;
        let rotation = (0..darts).map(|x| 4 * (x / 4) + (x + 1) % 4).collect();
        let mut involution = vec![0; darts];
        for (k, &j) in self.pairing.iter().enumerate() {
            let (o, i) = (out_dart(k), in_dart(j));
            involution[o] = i;
            involution[i] = o;
        }
        CombinatorialMap::new(rotation, involution).expect("skeleton darts form a map")
    }

    /// For each dart: (vertex label, is the dart's face white, 1-based face
    /// label). A dart's face is its orbit under `rotation ∘ involution`.
    pub fn dart_annotations(&self) -> Vec<(usize, bool, usize)> {
        let mut out = vec![(0, false, 0); 4 * self.r];
        for k in 0..self.num_edges() {
            // incoming dart j belongs to the white face of the edge arriving there
            out[out_dart(k)] = (k / 2 + 1, false, self.gray[k] + 1);
            out[in_dart(self.pairing[k])] = (self.pairing[k] / 2 + 1, true, self.white[k] + 1);
        }
        out
    }

    /// Rebuild from a general 4-valent bicolored map. `white_face[x]` tells
    /// whether dart `x`'s face is white; those darts are the incoming ones.
    pub fn from_map(
        map: &CombinatorialMap,
        vertex_label: &[usize],
        white_face: &[bool],
        face_label: &[usize],
    ) -> Result<RibbonGraph> {
        let darts = map.num_darts();
        if darts % 4 != 0 || darts == 0 {
            return Err(HurwitzError::InvalidMap("dart count must be a positive multiple of 4".into()));
        }
        let r = darts / 4;
        let bad = |msg: &str| Err(HurwitzError::InvalidMap(msg.to_string()));
        // position of each dart: vertex v, slot 0..4 starting from an outgoing dart
        let mut slot = vec![(usize::MAX, 0); darts];
        for orbit in map.vertices() {
            if orbit.len() != 4 {
                return bad("every vertex must be 4-valent");
            }
            let label = vertex_label[orbit[0]];
            if label == 0 || label > r || orbit.iter().any(|&x| vertex_label[x] != label) {
                return bad("vertex labels must be constant on vertices and in 1..=r");
            }
            let start = match orbit.iter().position(|&x| !white_face[x]) {
                Some(s) => s,
                None => return bad("vertex without an outgoing dart"),
            };
            for k in 0..4 {
                let x = orbit[(start + k) % 4];
                let expect_in = k % 2 == 1;
                if white_face[x] != expect_in {
                    return bad("faces around a vertex must alternate in color");
                }
                if slot[x].0 != usize::MAX {
                    return bad("dart on two vertices");
                }
                slot[x] = (label - 1, k);
            }
        }
        if slot.iter().map(|s| s.0).sorted().dedup().count() != r {
            return bad("vertex labels must be a bijection onto 1..=r");
        }
        let index = |x: usize| 2 * slot[x].0 + slot[x].1 / 2;
        let e = 2 * r;
        let (mut pairing, mut white, mut gray) = (vec![0; e], vec![0; e], vec![0; e]);
        for x in 0..darts {
            if white_face[x] {
                continue;
            }
            let y = map.involution()[x];
            if !white_face[y] {
                return bad("an edge must join an outgoing and an incoming dart");
            }
            let (k, j) = (index(x), index(y));
            pairing[k] = j;
            if face_label[x] == 0 || face_label[y] == 0 {
                return bad("face labels are 1-based");
            }
            gray[k] = face_label[x] - 1;
            white[k] = face_label[y] - 1;
        }
        RibbonGraph::new(r, pairing, white, gray)
    }
}

pub(crate) fn out_dart(k: usize) -> usize {
    4 * (k / 2) + 2 * (k % 2)
}

pub(crate) fn in_dart(j: usize) -> usize {
    4 * (j / 2) + 2 * (j % 2) + 1
}

/// A connected face-unlabeled map, least in its flip orbit.
#[derive(Clone, Debug)]
pub(crate) struct RawMap {
    pub(crate) pairing: Vec<u8>,
    pub(crate) stabilizer: Vec<u32>,
    pub(crate) white_face: Vec<u8>,
    pub(crate) gray_face: Vec<u8>,
    pub(crate) whites: usize,
    pub(crate) grays: usize,
    /// least possible weight sum of each white and gray face
    pub(crate) white_lower: Vec<u32>,
    pub(crate) gray_lower: Vec<u32>,
}

/// Returns `None` if some flip yields a smaller pairing, else the stabilizer.
fn orbit_min_stabilizer(r: usize, pairing: &[usize]) -> Option<Vec<u32>> {
    let mut stab = vec![0u32];
    for mask in 1..1u32 << r {
        let mut ord = std::cmp::Ordering::Equal;
        for k in 0..pairing.len() {
            let image = flip(mask, pairing[flip(mask, k)]);
            ord = image.cmp(&pairing[k]);
            if ord != std::cmp::Ordering::Equal {
                break;
            }
        }
        match ord {
            std::cmp::Ordering::Less => return None,
            std::cmp::Ordering::Equal => stab.push(mask),
            std::cmp::Ordering::Greater => {}
        }
    }
    Some(stab)
}

fn search_raw(r: usize, pairing: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<RawMap>) {
    let e = 2 * r;
    let k = pairing.len();
    if k == e {
        if !connected(r, pairing) {
            return;
        }
        if let Some(stabilizer) = orbit_min_stabilizer(r, pairing) {
            let (wf, whites) = cycle_ids(e, |x| pairing[x]);
            let (gf, grays) = cycle_ids(e, |x| pairing[x] ^ 1);
            let (mut white_lower, mut gray_lower) = (vec![0; whites], vec![0; grays]);
            for k in 0..e {
                let lower = u32::from(k / 2 >= pairing[k] / 2);
                white_lower[wf[k]] += lower;
                gray_lower[gf[k]] += lower;
            }
            out.push(RawMap {
                white_lower,
                gray_lower,
                pairing: pairing.iter().map(|&x| x as u8).collect(),
                stabilizer,
                white_face: wf.iter().map(|&x| x as u8).collect(),
                gray_face: gf.iter().map(|&x| x as u8).collect(),
                whites,
                grays,
            });
        }
        return;
    }
    for j in 0..e {
        if !used[j] {
            used[j] = true;
            pairing.push(j);
            search_raw(r, pairing, used, out);
            pairing.pop();
            used[j] = false;
        }
    }
}

fn generate_raw(r: usize) -> Vec<RawMap> {
    let e = 2 * r;
    let mut all: Vec<RawMap> = (0..e)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut used = vec![false; e];
            used[first] = true;
            let mut pairing = vec![first];
            let mut out = Vec::new();
            search_raw(r, &mut pairing, &mut used, &mut out);
            out
        })
        .collect();
    all.sort_by(|a, b| a.pairing.cmp(&b.pairing));
    all
}

/// Connected face-unlabeled 4-valent bicolored maps on `r` labeled vertices,
/// one per flip orbit. Memoized per `r`.
pub(crate) fn raw_maps(r: usize) -> Arc<Vec<RawMap>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<RawMap>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().unwrap().get(&r) {
        return hit.clone();
    }
    let maps = Arc::new(generate_raw(r));
    cache.lock().unwrap().entry(r).or_insert(maps).clone()
}

impl RawMap {
    /// Visits each face labeling of this map up to its stabilizer, with the
    /// automorphism masks of the labeled graph. `accept(wl, gl)` can skip
    /// labelings, where `wl[f]` is the label given to white face `f`.
    pub(crate) fn for_each_labeling(
        &self,
        r: usize,
        accept: impl Fn(&[usize], &[usize]) -> bool,
        mut f: impl FnMut(RibbonGraph, &[u32]),
    ) {
        let e = 2 * r;
        let pairing: Vec<usize> = self.pairing.iter().map(|&x| x as usize).collect();
        let (mut tw, mut tg) = (vec![0; e], vec![0; e]);
        let mut aut = Vec::with_capacity(self.stabilizer.len());
        for wl in (0..self.whites).permutations(self.whites) {
            for gl in (0..self.grays).permutations(self.grays) {
                if !accept(&wl, &gl) {
                    continue;
                }
                let white: Vec<usize> = self.white_face.iter().map(|&f| wl[f as usize]).collect();
                let gray: Vec<usize> = self.gray_face.iter().map(|&f| gl[f as usize]).collect();
                aut.clear();
                let mut minimal = true;
                for &mask in &self.stabilizer {
                    for k in 0..e {
                        tw[flip(mask, k)] = white[k];
                        tg[flip(mask, k)] = gray[k];
                    }
                    match (&tw, &tg).cmp(&(&white, &gray)) {
                        std::cmp::Ordering::Less => {
                            minimal = false;
                            break;
                        }
                        std::cmp::Ordering::Equal => aut.push(mask),
                        std::cmp::Ordering::Greater => {}
                    }
                }
                if minimal {
                    let graph = RibbonGraph {
                        r,
                        m: self.whites,
                        n: self.grays,
                        pairing: pairing.clone(),
                        white,
                        gray,
                    };
                    f(graph, &aut);
                }
            }
        }
    }
}

/// Raw maps with `m` white and `n` gray faces.
pub(crate) fn raw_maps_with_faces(m: usize, n: usize, r: usize) -> Vec<RawMap> {
    if r == 0 || HurwitzParams::genus_for(m, n, r).is_none() {
        return Vec::new();
    }
    raw_maps(r)
        .iter()
        .filter(|raw| raw.whites == m && raw.grays == n)
        .cloned()
        .collect()
}

/// Visits one representative of every isomorphism class of `(m,n,r)`-ribbon
/// graphs together with its automorphism group order.
pub fn for_each_skeleton(m: usize, n: usize, r: usize, mut f: impl FnMut(RibbonGraph, usize)) {
    for raw in raw_maps_with_faces(m, n, r) {
        raw.for_each_labeling(r, |_, _| true, |g, aut| f(g, aut.len()));
    }
}

/// All `(m,n,r)`-ribbon graphs up to isomorphism, with automorphism orders,
/// in a deterministic order.
pub fn enumerate_skeletons(m: usize, n: usize, r: usize) -> Vec<(RibbonGraph, usize)> {
    let mut out = Vec::new();
    for_each_skeleton(m, n, r, |g, aut| out.push((g, aut)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_vertex_maps() {
        // r = 1: the two pairings give (2,1,1) and (1,2,1), both genus 0
        assert_eq!(raw_maps(1).len(), 2);
        assert!(enumerate_skeletons(1, 1, 1).is_empty());
        let s = enumerate_skeletons(2, 1, 1);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].1, 1);
        assert_eq!(s[0].0.genus(), 0);
        assert_eq!(enumerate_skeletons(1, 2, 1).len(), 1);
    }

    #[test]
    fn genus_one_two_vertex_skeleton() {
        let s = enumerate_skeletons(1, 1, 2);
        assert!(!s.is_empty());
        for (g, aut) in &s {
            assert_eq!(g.to_map().genus().unwrap(), 1);
            assert_eq!(g.to_map().faces().len(), 2);
            assert_eq!(*aut, g.aut_order());
        }
    }

    #[test]
    fn color_swap_reverses_orientation() {
        for (g, _) in enumerate_skeletons(2, 2, 2) {
            let s = g.with_colors_swapped();
            let forward: Vec<(usize, usize)> = (0..g.num_edges()).map(|e| g.endpoints(e)).sorted().collect();
            let reversed: Vec<(usize, usize)> =
                (0..s.num_edges()).map(|e| { let (a, b) = s.endpoints(e); (b, a) }).sorted().collect();
            assert_eq!(forward, reversed);
            assert_eq!(s.with_colors_swapped().canonical(), g.canonical());
        }
    }

    #[test]
    fn map_roundtrip_through_darts() {
        for (g, _) in enumerate_skeletons(2, 1, 3) {
            let ann = g.dart_annotations();
            let vl: Vec<usize> = ann.iter().map(|a| a.0).collect();
            let wf: Vec<bool> = ann.iter().map(|a| a.1).collect();
            let fl: Vec<usize> = ann.iter().map(|a| a.2).collect();
            let map = g.to_map();
            // dart faces agree with the face orbits of the map
            for face in map.faces() {
                assert!(face.iter().all(|&x| ann[x].1 == ann[face[0]].1 && ann[x].2 == ann[face[0]].2));
            }
            let back = RibbonGraph::from_map(&map, &vl, &wf, &fl).unwrap();
            assert_eq!(back.canonical(), g.canonical());
        }
    }
}
