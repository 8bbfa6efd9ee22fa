//! Edge weightings, weight polytopes and the ribbon-graph count of `H_g(mu, nu)`.

use num_bigint::BigInt;

use super::skeleton::{flip, raw_maps_with_faces, RibbonGraph};
use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;
use crate::rational::Rational;

/// `w + (j - i)/r`, the length of an edge from vertex `i` to vertex `j` in units of `2 pi`.
pub fn edge_length(w: u64, i: usize, j: usize, r: usize) -> Rational {
    Rational::new(BigInt::from(w) * BigInt::from(r) + BigInt::from(j) - BigInt::from(i), r)
        .expect("r >= 1")
}

/// A skeleton with a positive `(mu, nu)`-balanced edge weighting.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HurwitzRibbonGraph {
    pub skeleton: RibbonGraph,
    pub weights: Vec<u64>,
    pub params: HurwitzParams,
}

/// Smallest legal weight of `edge`: 1 unless the edge strictly ascends.
pub fn min_weight(g: &RibbonGraph, edge: usize) -> u64 {
    let (tail, head) = g.endpoints(edge);
    u64::from(tail >= head)
}

impl HurwitzRibbonGraph {
    pub fn new(skeleton: RibbonGraph, weights: Vec<u64>, params: HurwitzParams) -> Result<Self> {
        if skeleton.m() != params.m || skeleton.n() != params.n || skeleton.r() != params.r {
            return Err(HurwitzError::InvalidMap("skeleton shape does not match parameters".into()));
        }
        if weights.len() != skeleton.num_edges() {
            return Err(HurwitzError::InvalidMap("one weight per edge expected".into()));
        }
        let poly = weight_polytope(&skeleton, params.mu.parts(), params.nu.parts());
        if !poly.contains(&weights) {
            return Err(HurwitzError::InvalidMap("weighting is not positive and balanced".into()));
        }
        Ok(HurwitzRibbonGraph { skeleton, weights, params })
    }

    pub fn edge_length(&self, edge: usize) -> Rational {
        let (i, j) = self.skeleton.endpoints(edge);
        edge_length(self.weights[edge], i + 1, j + 1, self.skeleton.r())
    }

    pub fn flipped(&self, mask: u32) -> HurwitzRibbonGraph {
        let mut weights = vec![0; self.weights.len()];
        for (k, &w) in self.weights.iter().enumerate() {
            weights[flip(mask, k)] = w;
        }
        HurwitzRibbonGraph { skeleton: self.skeleton.flipped(mask), weights, params: self.params.clone() }
    }

    fn encode(&self) -> (Vec<usize>, &[u64]) {
        (self.skeleton.encode(), &self.weights)
    }

    pub fn automorphisms(&self) -> Vec<u32> {
        self.skeleton
            .automorphisms()
            .into_iter()
            .filter(|&mask| {
                (0..self.weights.len()).all(|k| self.weights[flip(mask, k)] == self.weights[k])
            })
            .collect()
    }

    pub fn aut_order(&self) -> usize {
        self.automorphisms().len()
    }

    /// The least flipped copy; isomorphic graphs have equal canonical forms.
    pub fn canonical(&self) -> HurwitzRibbonGraph {
        (0..1u32 << self.skeleton.r())
            .map(|mask| self.flipped(mask))
            .min_by(|a, b| {
                let (ea, eb) = (a.encode(), b.encode());
                ea.0.cmp(&eb.0).then_with(|| ea.1.cmp(eb.1))
            })
            .expect("identity")
    }

    pub fn is_isomorphic(&self, other: &HurwitzRibbonGraph) -> bool {
        self.skeleton.r() == other.skeleton.r() && self.canonical() == other.canonical()
    }
}

/// Balancing equations `A w = b` plus lower bounds `w >= lower`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightPolytope {
    pub rows: Vec<Vec<u64>>,
    pub rhs: Vec<u64>,
    pub lower: Vec<u64>,
}

/// White-face rows first (label order), then gray-face rows.
pub fn weight_polytope(g: &RibbonGraph, mu: &[u32], nu: &[u32]) -> WeightPolytope {
    let e = g.num_edges();
    let mut rows = vec![vec![0u64; e]; g.m() + g.n()];
    for k in 0..e {
        rows[g.white_labels()[k]][k] += 1;
        rows[g.m() + g.gray_labels()[k]][k] += 1;
    }
    let rhs = mu.iter().chain(nu).map(|&x| x as u64).collect();
    let lower = (0..e).map(|k| min_weight(g, k)).collect();
    WeightPolytope { rows, rhs, lower }
}

impl WeightPolytope {
    pub fn contains(&self, w: &[u64]) -> bool {
        w.len() == self.lower.len()
            && w.iter().zip(&self.lower).all(|(x, lo)| x >= lo)
            && self
                .rows
                .iter()
                .zip(&self.rhs)
                .all(|(row, &b)| row.iter().zip(w).map(|(a, x)| a * x).sum::<u64>() == b)
    }

    /// All integer points in lexicographic order.
    pub fn lattice_points(&self) -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        self.for_each_point(|w| out.push(w.to_vec()));
        out
    }

    /// Visits every integer point in lexicographic order.
    pub fn for_each_point(&self, mut f: impl FnMut(&[u64])) {
        let vars = self.lower.len();
        if self.rows.len() != self.rhs.len() {
            return;
        }
        // for each variable, the rows it appears in and the last variable of each row
        let cols: Vec<Vec<(usize, u64)>> = (0..vars)
            .map(|k| {
                self.rows
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row[k] > 0)
                    .map(|(i, row)| (i, row[k]))
                    .collect()
            })
            .collect();
        let last: Vec<Option<usize>> =
            self.rows.iter().map(|row| row.iter().rposition(|&a| a > 0)).collect();
        if self.rows.iter().zip(&self.rhs).any(|(row, &b)| row.iter().all(|&a| a == 0) && b != 0) {
            return;
        }
        // remaining[i]: rhs minus assigned terms minus lower-bound terms of unassigned ones
        let mut slack: Vec<i128> = self.rhs.iter().map(|&b| b as i128).collect();
        for (k, col) in cols.iter().enumerate() {
            for &(i, a) in col {
                slack[i] -= (a * self.lower[k]) as i128;
            }
        }
        if slack.iter().any(|&s| s < 0) {
            return;
        }
        let mut w = vec![0u64; vars];
        self.dfs(0, &cols, &last, &mut slack, &mut w, &mut f);
    }

    fn dfs(
        &self,
        k: usize,
        cols: &[Vec<(usize, u64)>],
        last: &[Option<usize>],
        slack: &mut Vec<i128>,
        w: &mut Vec<u64>,
        f: &mut impl FnMut(&[u64]),
    ) {
        if k == w.len() {
            if slack.iter().all(|&s| s == 0) {
                f(w);
            }
            return;
        }
        let lo = self.lower[k];
        let col = &cols[k];
        // extra above the lower bound, limited by every row's slack
        let mut max_extra = u64::MAX;
        let mut forced: Option<u64> = None;
        for &(i, a) in col {
            let s = slack[i] as u64;
            max_extra = max_extra.min(s / a);
            if last[i] == Some(k) {
                if s % a != 0 {
                    return;
                }
                match forced {
                    Some(x) if x != s / a => return,
                    _ => forced = Some(s / a),
                }
            }
        }
        if col.is_empty() {
            // unconstrained variables are pinned to their bound
            max_extra = 0;
        }
        let range = match forced {
            Some(x) if x <= max_extra => x..=x,
            Some(_) => return,
            None => 0..=max_extra,
        };
        for extra in range {
            for &(i, a) in col {
                slack[i] -= (a * extra) as i128;
            }
            w[k] = lo + extra;
            self.dfs(k + 1, cols, last, slack, w, f);
            for &(i, a) in col {
                slack[i] += (a * extra) as i128;
            }
        }
    }
}

pub fn lattice_points(p: &WeightPolytope) -> Vec<Vec<u64>> {
    p.lattice_points()
}

/// Order of the stabilizer of `w` in `aut`, or `None` when some automorphism
/// maps `w` to a lexicographically smaller weighting.
fn stabilizer_if_minimal(aut: &[u32], w: &[u64], image: &mut [u64]) -> Option<usize> {
    let mut stab = 0;
    for &mask in aut {
        for k in 0..w.len() {
            image[flip(mask, k)] = w[k];
        }
        match (*image).cmp(w) {
            std::cmp::Ordering::Less => return None,
            std::cmp::Ordering::Equal => stab += 1,
            std::cmp::Ordering::Greater => {}
        }
    }
    Some(stab)
}

/// Sum over `Aut(g)`-orbits of lattice points of `1 / |stabilizer|`.
pub fn orbit_weighted_count(g: &RibbonGraph, aut: &[u32], mu: &[u32], nu: &[u32]) -> Rational {
    let poly = weight_polytope(g, mu, nu);
    let mut total = Rational::zero();
    let mut image = vec![0u64; g.num_edges()];
    poly.for_each_point(|w| {
        if let Some(stab) = stabilizer_if_minimal(aut, w, &mut image) {
            total += Rational::new(1, stab as i64).expect("identity fixes every point");
        }
    });
    total
}

fn visit_feasible(p: &HurwitzParams, mut f: impl FnMut(RibbonGraph, &[u32])) {
    let (mu, nu) = (p.mu.parts(), p.nu.parts());
    for raw in raw_maps_with_faces(p.m, p.n, p.r) {
        let accept = |wl: &[usize], gl: &[usize]| {
            raw.white_lower.iter().zip(wl).all(|(&lo, &l)| lo <= mu[l])
                && raw.gray_lower.iter().zip(gl).all(|(&lo, &l)| lo <= nu[l])
        };
        raw.for_each_labeling(p.r, accept, &mut f);
    }
}

/// Every Hurwitz ribbon graph for `p` up to isomorphism, with automorphism orders.
pub fn enumerate_hrgs(p: &HurwitzParams) -> Result<Vec<(HurwitzRibbonGraph, usize)>> {
    if p.r == 0 {
        return Err(HurwitzError::RZero);
    }
    let mut out = Vec::new();
    let mut image = vec![0u64; 2 * p.r];
    visit_feasible(p, |g, aut| {
        let poly = weight_polytope(&g, p.mu.parts(), p.nu.parts());
        poly.for_each_point(|w| {
            if let Some(order) = stabilizer_if_minimal(aut, w, &mut image) {
                let h = HurwitzRibbonGraph { skeleton: g.clone(), weights: w.to_vec(), params: p.clone() };
                out.push((h, order));
            }
        });
    });
    Ok(out)
}

/// `H_g(mu, nu)` as the groupoid count of Hurwitz ribbon graphs.
pub fn count_hurwitz_ribbon(p: &HurwitzParams) -> Result<Rational> {
    if p.r == 0 {
        return Err(HurwitzError::RZero);
    }
    let mut sum = Rational::zero();
    visit_feasible(p, |g, aut| {
        sum += orbit_weighted_count(&g, aut, p.mu.parts(), p.nu.parts());
    });
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ribbon::skeleton::enumerate_skeletons;
    use itertools::Itertools;

    #[test]
    fn edge_length_examples() {
        assert_eq!(edge_length(1, 1, 2, 2), Rational::new(3, 2).unwrap());
        assert_eq!(edge_length(0, 1, 2, 2), Rational::new(1, 2).unwrap());
        assert_eq!(edge_length(0, 2, 1, 2), Rational::new(-1, 2).unwrap());
    }

    #[test]
    fn infeasible_polytope_is_empty() {
        let p = WeightPolytope { rows: vec![vec![1, 1]], rhs: vec![1], lower: vec![1, 1] };
        assert!(p.lattice_points().is_empty());
        let p = WeightPolytope { rows: vec![vec![1, 1]], rhs: vec![2], lower: vec![1, 1] };
        assert_eq!(p.lattice_points(), vec![vec![1, 1]]);
    }

    #[test]
    fn lattice_points_match_brute_force() {
        // every integer vector with entries up to the largest rhs
        for (m, n, r) in [(2, 1, 1), (1, 1, 2), (2, 2, 2), (1, 2, 3)] {
            for (g, _) in enumerate_skeletons(m, n, r) {
                let mu: Vec<u32> = (0..m as u32).map(|i| 2 + i).collect();
                let d: u32 = mu.iter().sum();
                let mut nu = vec![1u32; n];
                nu[0] = d - (n as u32 - 1);
                let poly = weight_polytope(&g, &mu, &nu);
                let e = g.num_edges();
                let brute: Vec<Vec<u64>> = (0..e)
                    .map(|_| 0..=d as u64)
                    .multi_cartesian_product()
                    .filter(|w| poly.contains(w))
                    .collect();
                assert_eq!(poly.lattice_points(), brute);
            }
        }
    }

    #[test]
    fn genus_one_skeleton_for_degree_two() {
        let p = HurwitzParams::new(1, &[2], &[2]).unwrap();
        let supported: Vec<_> = enumerate_skeletons(1, 1, 2)
            .into_iter()
            .filter(|(g, _)| !weight_polytope(g, &[2], &[2]).lattice_points().is_empty())
            .collect();
        assert_eq!(supported.len(), 1);
        let (g, aut) = &supported[0];
        assert_eq!(*aut, 2);
        assert_eq!(weight_polytope(g, &[2], &[2]).lattice_points().len(), 1);
        let mut dirs: Vec<(usize, usize)> = (0..4).map(|e| g.endpoints(e)).collect();
        dirs.sort();
        assert_eq!(dirs, vec![(0, 1), (0, 1), (1, 0), (1, 0)]);
        assert_eq!(count_hurwitz_ribbon(&p).unwrap(), Rational::new(1, 2).unwrap());
    }

    #[test]
    fn counts_small_cases() {
        let cases = [
            (0, vec![1, 1], vec![2], Rational::one()),
            (0, vec![2, 1], vec![2, 1], Rational::from(4)),
            (0, vec![3], vec![1, 1, 1], Rational::from(6)),
        ];
        for (g, mu, nu, expect) in cases {
            let p = HurwitzParams::new(g, &mu, &nu).unwrap();
            assert_eq!(count_hurwitz_ribbon(&p).unwrap(), expect, "{p}");
        }
        let p = HurwitzParams::new(0, &[2], &[2]).unwrap();
        assert_eq!(count_hurwitz_ribbon(&p), Err(HurwitzError::RZero));
    }

    #[test]
    fn orbit_weighting_equals_points_over_aut() {
        for (m, n, r) in [(1, 1, 2), (2, 2, 2), (1, 1, 4), (2, 1, 3)] {
            for (g, aut) in enumerate_skeletons(m, n, r) {
                let mu: Vec<u32> = vec![2; m];
                let d = 2 * m as u32;
                let mut nu = vec![1u32; n];
                nu[0] = d - (n as u32 - 1);
                let auts = g.automorphisms();
                let pts = weight_polytope(&g, &mu, &nu).lattice_points().len();
                assert_eq!(
                    orbit_weighted_count(&g, &auts, &mu, &nu),
                    Rational::new(pts as i64, aut as i64).unwrap()
                );
            }
        }
    }

    #[test]
    fn enumerated_hrgs_sum_to_count() {
        let p = HurwitzParams::new(0, &[2, 1], &[2, 1]).unwrap();
        let hrgs = enumerate_hrgs(&p).unwrap();
        let total: Rational = hrgs.iter().map(|(_, a)| Rational::new(1, *a as i64).unwrap()).sum();
        assert_eq!(total, Rational::from(4));
        for (h, a) in &hrgs {
            assert_eq!(h.aut_order(), *a);
            assert!((0..h.weights.len()).all(|e| h.edge_length(e).is_positive()));
        }
    }
}
