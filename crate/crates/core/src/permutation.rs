//! Symmetric-group side: monodromy sets `(sigma0, tau_1..tau_r, sigma_inf)`,
//! their enumeration and counting, cut-join bookkeeping and isomorphism.
//!
//! Permutations act on the left: `a.compose(&b)` is `a ∘ b`, apply `b` first.
//! A monodromy set satisfies `sigma_inf ∘ tau_r ∘ ... ∘ tau_1 ∘ sigma0 = id`,
//! so `sigma_r = tau_r ∘ ... ∘ tau_1 ∘ sigma0` equals `sigma_inf⁻¹`.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HurwitzError, Result};
use crate::params::{HurwitzParams, Partition};
use crate::rational::Rational;

/// A bijection of `{0, .., d-1}`; displayed 1-based in cycle notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(d: usize) -> Self {
        Permutation((0..d).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return Err(HurwitzError::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
        }
        Ok(Permutation(images))
    }

    /// Build from 1-based disjoint cycles, e.g. `&[&[1, 3], &[2, 4, 5]]`.
    pub fn from_cycles(d: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..d).collect();
        let mut used = vec![false; d];
        for cycle in cycles {
            for (k, &x) in cycle.iter().enumerate() {
                if x == 0 || x > d || std::mem::replace(&mut used[x - 1], true) {
                    return Err(HurwitzError::InvalidPermutation(format!(
                        "bad cycle {cycle:?} in degree {d}"
                    )));
                }
                images[x - 1] = cycle[(k + 1) % cycle.len()] - 1;
            }
        }
        Ok(Permutation(images))
    }

    /// The transposition swapping the 0-based points `i` and `j`.
    pub fn transposition(d: usize, i: usize, j: usize) -> Self {
        let mut images: Vec<usize> = (0..d).collect();
        images.swap(i, j);
        Permutation(images)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Self {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    /// `h⁻¹ ∘ self ∘ h`.
    pub fn conjugate_by(&self, h: &Permutation) -> Self {
        let hinv = h.inverse();
        Permutation(h.0.iter().map(|&x| hinv.0[self.0[x]]).collect())
    }

    /// Disjoint cycles, each starting at its smallest point, ordered by that point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.0.len()];
        let mut out = Vec::new();
        for start in 0..self.0.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            out.push(cycle);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycles().len()
    }

    /// For each point, the index of its cycle in [`Permutation::cycles`].
    pub fn cycle_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.0.len()];
        for (c, cycle) in self.cycles().iter().enumerate() {
            for &x in cycle {
                idx[x] = c;
            }
        }
        idx
    }

    /// `Some((i, j))` with `i < j` when this is a transposition.
    pub fn as_transposition(&self) -> Option<(usize, usize)> {
        let moved: Vec<usize> = (0..self.0.len()).filter(|&i| self.0[i] != i).collect();
        match moved.as_slice() {
            &[i, j] if self.0[i] == j => Some((i, j)),
            _ => None,
        }
    }
}

/// Multiset of cycle lengths, sorted descending.
pub fn cycle_type(p: &Permutation) -> Partition {
    let mut lens: Vec<u32> = p.cycles().iter().map(|c| c.len() as u32).collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    Partition::new(lens).unwrap_or_else(|_| unreachable!("empty permutation has no cycle type"))
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut any = false;
        for cycle in self.cycles().into_iter().filter(|c| c.len() > 1) {
            any = true;
            write!(f, "({})", cycle.iter().map(|x| x + 1).join(" "))?;
        }
        if !any {
            write!(f, "e")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A permutation with a bijection between its cycles and `{1, .., k}`.
/// Stored as the (0-based) label of the cycle through each point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledPermutation {
    pub perm: Permutation,
    point_label: Vec<usize>,
}

impl LabeledPermutation {
    /// `point_label[x]` is the 0-based label of the cycle containing `x`.
    pub fn new(perm: Permutation, point_label: Vec<usize>) -> Result<Self> {
        let cycles = perm.cycles();
        let mut used = vec![false; cycles.len()];
        if point_label.len() != perm.degree() {
            return Err(HurwitzError::InvalidPermutation("label vector has wrong length".into()));
        }
        for cycle in &cycles {
            let l = point_label[cycle[0]];
            if l >= cycles.len()
                || cycle.iter().any(|&x| point_label[x] != l)
                || std::mem::replace(&mut used[l], true)
            {
                return Err(HurwitzError::InvalidPermutation(format!(
                    "labels {point_label:?} are not a cycle labeling of {perm}"
                )));
            }
        }
        Ok(LabeledPermutation { perm, point_label })
    }

    pub fn label_of_point(&self, x: usize) -> usize {
        self.point_label[x]
    }

    pub fn point_labels(&self) -> &[usize] {
        &self.point_label
    }

    /// Cycles ordered by label.
    pub fn labeled_cycles(&self) -> Vec<Vec<usize>> {
        let mut cycles = self.perm.cycles();
        cycles.sort_by_key(|c| self.point_label[c[0]]);
        cycles
    }

    /// Cycle lengths listed by label, i.e. the ordered partition it realizes.
    pub fn labeled_type(&self) -> Vec<u32> {
        self.labeled_cycles().iter().map(|c| c.len() as u32).collect()
    }

    /// `h⁻¹ ∘ self ∘ h` with labels carried along.
    pub fn conjugate_by(&self, h: &Permutation) -> Self {
        LabeledPermutation {
            perm: self.perm.conjugate_by(h),
            point_label: (0..h.degree()).map(|x| self.point_label[h.apply(x)]).collect(),
        }
    }
}

impl fmt::Display for LabeledPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.perm)?;
        let cycles = self.labeled_cycles();
        let parts = cycles
            .iter()
            .enumerate()
            .map(|(l, c)| format!("({})→{}", c.iter().map(|x| x + 1).join(" "), l + 1));
        write!(f, "{}]", parts.collect::<Vec<_>>().join(","))
    }
}

impl fmt::Debug for LabeledPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for LabeledPermutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CutJoinKind {
    Cut,
    Join,
}

/// Effect of multiplying by one transposition. `parts` holds the two small
/// cycle lengths in ascending order and `whole` their sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct CutJoinEvent {
    pub kind: CutJoinKind,
    pub parts: (usize, usize),
    pub whole: usize,
}

impl CutJoinEvent {
    fn new(kind: CutJoinKind, a: usize, b: usize) -> Self {
        CutJoinEvent {
            kind,
            parts: (a.min(b), a.max(b)),
            whole: a + b,
        }
    }
}

fn cycle_len_through(p: &Permutation, x: usize) -> usize {
    let mut len = 1;
    let mut y = p.apply(x);
    while y != x {
        y = p.apply(y);
        len += 1;
    }
    len
}

fn same_cycle(p: &Permutation, i: usize, j: usize) -> bool {
    let mut y = p.apply(i);
    while y != i {
        if y == j {
            return true;
        }
        y = p.apply(y);
    }
    i == j
}

/// Returns `tau ∘ sigma` for `tau = (i j)` and whether a cycle was cut or two joined.
pub fn apply_transposition(sigma: &Permutation, i: usize, j: usize) -> (Permutation, CutJoinEvent) {
    assert!(i != j, "a transposition needs two distinct points");
    let tau = Permutation::transposition(sigma.degree(), i, j);
    let result = tau.compose(sigma);
    let event = if same_cycle(sigma, i, j) {
        CutJoinEvent::new(
            CutJoinKind::Cut,
            cycle_len_through(&result, i),
            cycle_len_through(&result, j),
        )
    } else {
        CutJoinEvent::new(
            CutJoinKind::Join,
            cycle_len_through(sigma, i),
            cycle_len_through(sigma, j),
        )
    };
    (result, event)
}

/// Number of transpositions joining a `k`-cycle and an `l`-cycle, or cutting a
/// `(k+l)`-cycle into a `k`- and an `l`-cycle.
pub fn cut_join_count(k: usize, l: usize, kind: CutJoinKind) -> usize {
    match kind {
        CutJoinKind::Join => k * l,
        CutJoinKind::Cut if k == l => k,
        CutJoinKind::Cut => k + l,
    }
}

/// Whether the group generated by `perms` has a single orbit on `{0..d-1}`.
pub fn is_transitive(perms: &[Permutation], d: usize) -> bool {
    let mut uf = UnionFind::new(d);
    for p in perms {
        for x in 0..d {
            uf.union(x, p.apply(x));
        }
    }
    uf.components() <= 1
}

struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            count: n,
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
            self.count -= 1;
        }
    }

    fn components(&self) -> usize {
        self.count
    }
}

/// A labeled tuple `(sigma0, tau_1..tau_r, sigma_inf)`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonodromySet {
    #[serde(skip)]
    pub params: HurwitzParams,
    pub sigma0: LabeledPermutation,
    pub taus: Vec<Permutation>,
    pub sigma_inf: LabeledPermutation,
}

impl fmt::Debug for MonodromySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}; {}; {}>", self.sigma0, self.taus.iter().join(", "), self.sigma_inf)
    }
}

impl MonodromySet {
    /// Checks all four defining conditions, including the label/length binding.
    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        let d = p.d as usize;
        let bad = |msg: String| Err(HurwitzError::InvalidPermutation(msg));
        if self.sigma0.labeled_type() != p.mu.parts() {
            return bad(format!("sigma0 {} does not realize mu={}", self.sigma0, p.mu));
        }
        if self.sigma_inf.labeled_type() != p.nu.parts() {
            return bad(format!("sigma_inf {} does not realize nu={}", self.sigma_inf, p.nu));
        }
        if self.taus.len() != p.r || self.taus.iter().any(|t| t.as_transposition().is_none()) {
            return bad(format!("expected {} transpositions", p.r));
        }
        let product = self
            .taus
            .iter()
            .fold(self.sigma0.perm.clone(), |acc, t| t.compose(&acc));
        if !self.sigma_inf.perm.compose(&product).is_identity() {
            return bad("product condition fails".into());
        }
        let mut gens: Vec<Permutation> = self.taus.clone();
        gens.push(self.sigma0.perm.clone());
        gens.push(self.sigma_inf.perm.clone());
        if !is_transitive(&gens, d) {
            return bad("not transitive".into());
        }
        Ok(())
    }

    /// Conjugate every entry by `h` (`x ↦ h⁻¹ x h`), carrying labels.
    pub fn conjugate_by(&self, h: &Permutation) -> Self {
        MonodromySet {
            params: self.params.clone(),
            sigma0: self.sigma0.conjugate_by(h),
            taus: self.taus.iter().map(|t| t.conjugate_by(h)).collect(),
            sigma_inf: self.sigma_inf.conjugate_by(h),
        }
    }

    fn encode(&self) -> Vec<usize> {
        let mut key = Vec::with_capacity((self.params.r + 4) * self.params.d as usize);
        key.extend_from_slice(self.sigma0.perm.images());
        key.extend_from_slice(self.sigma0.point_labels());
        for t in &self.taus {
            key.extend_from_slice(t.images());
        }
        key.extend_from_slice(self.sigma_inf.perm.images());
        key.extend_from_slice(self.sigma_inf.point_labels());
        key
    }

    /// Lexicographically least encoding over all conjugates, and the order of
    /// the stabilizer (the automorphism group of the monodromy set).
    pub fn canonical_form(&self) -> (Vec<usize>, usize) {
        let d = self.params.d as usize;
        let mut best: Option<Vec<usize>> = None;
        let mut stab = 0;
        let own = self.encode();
        for h in (0..d).permutations(d) {
            let h = Permutation(h);
            let key = self.conjugate_by(&h).encode();
            if key == own {
                stab += 1;
            }
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        }
        (best.unwrap_or_default(), stab)
    }

    /// Same classes as `canonical_form`, faster: conjugate `sigma0` onto the
    /// block permutation, then minimize over its centralizer, which rotates
    /// each block independently. The key is a different representative.
    pub fn block_normal_form(&self) -> (Vec<usize>, usize) {
        let d = self.params.d as usize;
        let mut h = Vec::with_capacity(d);
        let mut blocks = Vec::new();
        for cycle in self.sigma0.labeled_cycles() {
            blocks.push(h.len()..h.len() + cycle.len());
            h.extend(cycle);
        }
        let base = self.conjugate_by(&Permutation(h));
        let own = base.encode();
        let mut best = own.clone();
        let mut stab = 0;
        let mut c = vec![0; d];
        for shifts in blocks.iter().map(|b| 0..b.len()).multi_cartesian_product() {
            for (b, s) in blocks.iter().zip(shifts) {
                for x in b.clone() {
                    c[x] = b.start + (x - b.start + s) % b.len();
                }
            }
            let key = base.conjugate_by(&Permutation(c.clone())).encode();
            if key == own {
                stab += 1;
            }
            if key < best {
                best = key;
            }
        }
        (best, stab)
    }

    pub fn automorphism_order(&self) -> usize {
        self.canonical_form().1
    }
}

/// `sigma_0, sigma_1 = tau_1 ∘ sigma_0, ..., sigma_r`.
pub fn sigma_chain(ms: &MonodromySet) -> Vec<Permutation> {
    let mut chain = vec![ms.sigma0.perm.clone()];
    for t in &ms.taus {
        let next = t.compose(chain.last().unwrap());
        chain.push(next);
    }
    chain
}

/// Cut/join classification of each step of the sigma chain.
pub fn chain_events(ms: &MonodromySet) -> Vec<CutJoinEvent> {
    let chain = sigma_chain(ms);
    ms.taus
        .iter()
        .zip(&chain)
        .map(|(t, s)| {
            let (i, j) = t.as_transposition().expect("taus are transpositions");
            apply_transposition(s, i, j).1
        })
        .collect()
}

/// Every labeled permutation whose cycle labeled `i` has length `parts[i]`.
/// Each cycle is listed starting from its smallest point.
pub fn labeled_permutations_of_type(parts: &[u32]) -> Vec<LabeledPermutation> {
    let d: usize = parts.iter().map(|&p| p as usize).sum();
    let mut out = Vec::new();
    let mut images = vec![0; d];
    let mut labels = vec![0; d];
    let mut used = vec![false; d];
    fill_blocks(parts, 0, &mut used, &mut images, &mut labels, &mut out);
    out
}

fn fill_blocks(
    parts: &[u32],
    block: usize,
    used: &mut Vec<bool>,
    images: &mut Vec<usize>,
    labels: &mut Vec<usize>,
    out: &mut Vec<LabeledPermutation>,
) {
    if block == parts.len() {
        out.push(LabeledPermutation {
            perm: Permutation(images.clone()),
            point_label: labels.clone(),
        });
        return;
    }
    let len = parts[block] as usize;
    let free: Vec<usize> = (0..used.len()).filter(|&x| !used[x]).collect();
    for set in free.iter().copied().combinations(len) {
        let (head, rest) = (set[0], &set[1..]);
        for order in rest.iter().copied().permutations(rest.len()) {
            let mut cycle = vec![head];
            cycle.extend(order);
            for (k, &x) in cycle.iter().enumerate() {
                images[x] = cycle[(k + 1) % len];
                labels[x] = block;
                used[x] = true;
            }
            fill_blocks(parts, block + 1, used, images, labels, out);
            for &x in &cycle {
                used[x] = false;
            }
        }
    }
}

/// Labeled permutation whose cycle `i` is the consecutive block of length `parts[i]`.
fn block_permutation(parts: &[u32]) -> LabeledPermutation {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    let mut start = 0;
    for (l, &len) in parts.iter().enumerate() {
        let len = len as usize;
        for k in 0..len {
            images.push(start + (k + 1) % len);
            labels.push(l);
        }
        start += len;
    }
    LabeledPermutation {
        perm: Permutation(images),
        point_label: labels,
    }
}

/// Depth-first search over `tau_1..tau_r` from a fixed labeled `sigma0`.
struct TauSearch<'a> {
    params: &'a HurwitzParams,
    nu_sorted: Vec<u32>,
    nu_label_choices: usize,
    sigma: Vec<usize>,
    taus: Vec<(usize, usize)>,
    cycles: usize,
}

impl<'a> TauSearch<'a> {
    fn new(params: &'a HurwitzParams, sigma0: &LabeledPermutation) -> Self {
        let nu_sorted = params.nu.sorted_desc().parts().to_vec();
        let nu_label_choices = nu_sorted
            .iter()
            .dedup_with_count()
            .map(|(c, _)| (1..=c).product::<usize>())
            .product();
        TauSearch {
            params,
            nu_sorted,
            nu_label_choices,
            sigma: sigma0.perm.images().to_vec(),
            taus: Vec::with_capacity(params.r),
            cycles: sigma0.perm.num_cycles(),
        }
    }

    fn same_cycle(&self, i: usize, j: usize) -> bool {
        let mut y = self.sigma[i];
        while y != i {
            if y == j {
                return true;
            }
            y = self.sigma[y];
        }
        false
    }

    /// `sigma ← (i j) ∘ sigma`; an involution, so calling twice undoes it.
    fn apply(&mut self, i: usize, j: usize) {
        for x in self.sigma.iter_mut() {
            if *x == i {
                *x = j;
            } else if *x == j {
                *x = i;
            }
        }
    }

    fn sorted_type(&self) -> Vec<u32> {
        let mut seen = vec![false; self.sigma.len()];
        let mut lens = Vec::new();
        for s in 0..self.sigma.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.sigma[x];
                len += 1;
            }
            lens.push(len);
        }
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    fn transitive(&self, sigma0: &[usize]) -> bool {
        let mut uf = UnionFind::new(sigma0.len());
        for (x, &y) in sigma0.iter().enumerate() {
            uf.union(x, y);
        }
        for &(i, j) in &self.taus {
            uf.union(i, j);
        }
        uf.components() == 1
    }

    /// Calls `visit(taus, sigma_r)` for every valid completion; returns the
    /// number of monodromy sets (counting `sigma_inf` labelings).
    fn run(&mut self, sigma0: &[usize], visit: &mut dyn FnMut(&[(usize, usize)], &[usize])) -> u64 {
        let d = self.sigma.len();
        let step = self.taus.len();
        let r = self.params.r;
        let n = self.params.n;
        if step == r {
            if self.cycles != n || self.sorted_type() != self.nu_sorted || !self.transitive(sigma0) {
                return 0;
            }
            visit(&self.taus, &self.sigma);
            return self.nu_label_choices as u64;
        }
        let remaining = r - step - 1;
        let mut total = 0;
        for i in 0..d {
            for j in i + 1..d {
                let cut = self.same_cycle(i, j);
                let c = if cut { self.cycles + 1 } else { self.cycles - 1 };
                if c.abs_diff(n) > remaining {
                    continue;
                }
                self.apply(i, j);
                let saved = self.cycles;
                self.cycles = c;
                self.taus.push((i, j));
                total += self.run(sigma0, visit);
                self.taus.pop();
                self.cycles = saved;
                self.apply(i, j);
            }
        }
        total
    }
}

/// All `sigma_inf` labelings compatible with `nu` for a given `sigma_r`.
fn sigma_inf_labelings(nu: &[u32], sigma_inf: &Permutation) -> Vec<LabeledPermutation> {
    let cycles = sigma_inf.cycles();
    let mut out = Vec::new();
    for assignment in (0..cycles.len()).permutations(cycles.len()) {
        // cycle c receives label assignment[c]
        if cycles
            .iter()
            .zip(&assignment)
            .all(|(c, &l)| nu[l] as usize == c.len())
        {
            let mut labels = vec![0; sigma_inf.degree()];
            for (c, &l) in cycles.iter().zip(&assignment) {
                for &x in c {
                    labels[x] = l;
                }
            }
            out.push(LabeledPermutation {
                perm: sigma_inf.clone(),
                point_label: labels,
            });
        }
    }
    out
}

/// Visits every monodromy set exactly once, depth first over labeled `sigma0`.
pub fn for_each_monodromy_set(p: &HurwitzParams, mut f: impl FnMut(&MonodromySet)) {
    for sigma0 in labeled_permutations_of_type(p.mu.parts()) {
        visit_from(p, &sigma0, &mut f);
    }
}

/// Visits the monodromy sets whose `sigma0` is the block permutation
/// `(0 .. mu_1-1)(mu_1 .. mu_1+mu_2-1)...` with cycle `i` labeled `i`.
/// Every conjugacy class meets this family.
pub fn for_each_block_monodromy_set(p: &HurwitzParams, mut f: impl FnMut(&MonodromySet)) {
    visit_from(p, &block_permutation(p.mu.parts()), &mut f);
}

fn visit_from(p: &HurwitzParams, sigma0: &LabeledPermutation, f: &mut impl FnMut(&MonodromySet)) {
    let d = p.d as usize;
    let mut search = TauSearch::new(p, sigma0);
    let s0 = sigma0.perm.images().to_vec();
    search.run(&s0, &mut |taus, sigma_r| {
        let sigma_inf = Permutation(sigma_r.to_vec()).inverse();
        let taus: Vec<Permutation> =
            taus.iter().map(|&(i, j)| Permutation::transposition(d, i, j)).collect();
        for labeled in sigma_inf_labelings(p.nu.parts(), &sigma_inf) {
            f(&MonodromySet {
                params: p.clone(),
                sigma0: sigma0.clone(),
                taus: taus.clone(),
                sigma_inf: labeled,
            });
        }
    });
}

pub fn enumerate_monodromy_sets(p: &HurwitzParams) -> Vec<MonodromySet> {
    let mut out = Vec::new();
    for_each_monodromy_set(p, |ms| out.push(ms.clone()));
    out
}

/// Number of monodromy sets, by a full search over every labeled `sigma0`
/// (parallel over `sigma0`).
pub fn count_monodromy_sets(p: &HurwitzParams) -> BigUint {
    labeled_permutations_of_type(p.mu.parts())
        .par_iter()
        .map(|sigma0| {
            let s0 = sigma0.perm.images().to_vec();
            BigUint::from(TauSearch::new(p, sigma0).run(&s0, &mut |_, _| {}))
        })
        .reduce(BigUint::zero, |a, b| a + b)
}

/// Number of monodromy sets whose labeled `sigma0` is the fixed block permutation.
pub fn count_with_fixed_sigma0(p: &HurwitzParams) -> u64 {
    let sigma0 = block_permutation(p.mu.parts());
    let s0 = sigma0.perm.images().to_vec();
    if p.r == 0 {
        return TauSearch::new(p, &sigma0).run(&s0, &mut |_, _| {});
    }
    // split the first transposition across threads
    let d = p.d as usize;
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut search = TauSearch::new(p, &sigma0);
            let cut = search.same_cycle(i, j);
            let c = if cut { search.cycles + 1 } else { search.cycles - 1 };
            if c.abs_diff(p.n) > p.r - 1 {
                return 0;
            }
            search.apply(i, j);
            search.cycles = c;
            search.taus.push((i, j));
            search.run(&s0, &mut |_, _| {})
        })
        .sum()
}

/// `H_g(mu, nu)` as `1/d!` times the number of monodromy sets.
///
/// Conjugation acts transitively on labeled `sigma0` of the prescribed labeled
/// type, and there are `d! / prod(mu_i)` of them, so the count factors as
/// `(d! / prod mu_i) * N(sigma0 fixed)` and `H = N(sigma0 fixed) / prod mu_i`.
pub fn count_hurwitz_permutation(p: &HurwitzParams) -> Rational {
    let fixed = count_with_fixed_sigma0(p);
    let prod_mu: u64 = p.mu.parts().iter().map(|&x| x as u64).product();
    Rational::new(fixed, prod_mu).expect("parts are positive")
}

/// Same value computed literally: full count divided by `d!`.
pub fn count_hurwitz_permutation_exhaustive(p: &HurwitzParams) -> Rational {
    let total = count_monodromy_sets(p);
    let fact: BigUint = (1..=p.d as u64).map(BigUint::from).fold(BigUint::one(), |a, b| a * b);
    Rational::new(
        num_bigint::BigInt::from(total),
        num_bigint::BigInt::from(fact),
    )
    .expect("d! > 0")
}

/// Whether some `h` in `S_d` conjugates `a` onto `b` entrywise, preserving labels.
pub fn are_isomorphic(a: &MonodromySet, b: &MonodromySet) -> bool {
    let d = a.params.d as usize;
    if a.params != b.params {
        return false;
    }
    let target = b.encode();
    (0..d)
        .permutations(d)
        .any(|h| a.conjugate_by(&Permutation(h)).encode() == target)
}

/// Parity condition every nonempty enumeration satisfies.
pub fn parity_allows(p: &HurwitzParams) -> bool {
    let d = p.d as usize;
    (p.r + (d - p.m) + (d - p.n)) % 2 == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    fn perm(d: usize, cycles: &[&[usize]]) -> Permutation {
        Permutation::from_cycles(d, cycles).unwrap()
    }

    #[test]
    fn cycle_type_examples() {
        assert_eq!(cycle_type(&Permutation::identity(3)).parts(), &[1, 1, 1]);
        assert_eq!(cycle_type(&perm(6, &[&[1, 2, 3, 4, 5, 6]])).parts(), &[6]);
        assert_eq!(cycle_type(&perm(6, &[&[1, 2], &[3, 4, 5, 6]])).parts(), &[4, 2]);
    }

    #[test]
    fn cut_and_join_examples() {
        let (res, ev) = apply_transposition(&perm(6, &[&[1, 2, 3, 4, 5, 6]]), 0, 2);
        assert_eq!(res, perm(6, &[&[1, 2], &[3, 4, 5, 6]]));
        assert_eq!(ev, CutJoinEvent { kind: CutJoinKind::Cut, parts: (2, 4), whole: 6 });

        let (res, ev) = apply_transposition(&perm(6, &[&[1, 2], &[3, 4, 5, 6]]), 0, 2);
        assert_eq!(res, perm(6, &[&[1, 2, 3, 4, 5, 6]]));
        assert_eq!(ev, CutJoinEvent { kind: CutJoinKind::Join, parts: (2, 4), whole: 6 });

        let (res, ev) = apply_transposition(&Permutation::identity(2), 0, 1);
        assert_eq!(res, perm(2, &[&[1, 2]]));
        assert_eq!(ev, CutJoinEvent { kind: CutJoinKind::Join, parts: (1, 1), whole: 2 });
    }

    #[test]
    fn cut_join_count_examples() {
        assert_eq!(cut_join_count(2, 4, CutJoinKind::Join), 8);
        assert_eq!(cut_join_count(2, 4, CutJoinKind::Cut), 6);
        assert_eq!(cut_join_count(3, 3, CutJoinKind::Cut), 3);
    }

    #[test]
    fn transitivity_examples() {
        assert!(is_transitive(&[perm(2, &[&[1, 2]])], 2));
        assert!(!is_transitive(&[perm(3, &[&[1, 2]])], 3));
        assert!(is_transitive(&[perm(3, &[&[1, 2]]), perm(3, &[&[1, 3]])], 3));
    }

    #[test]
    fn display_formats() {
        assert_eq!(perm(5, &[&[1, 3], &[2, 4, 5]]).to_string(), "(1 3)(2 4 5)");
        assert_eq!(Permutation::identity(3).to_string(), "e");
        let lp = LabeledPermutation::new(perm(3, &[&[1, 2]]), vec![1, 1, 0]).unwrap();
        assert_eq!(lp.to_string(), "(1 2)[(3)→1,(1 2)→2]");
        assert!(LabeledPermutation::new(perm(3, &[&[1, 2]]), vec![0, 1, 1]).is_err());
    }

    #[test]
    fn chain_examples() {
        let p = HurwitzParams::new(1, &[2], &[2]).unwrap();
        let all = enumerate_monodromy_sets(&p);
        assert_eq!(all.len(), 1);
        let chain = sigma_chain(&all[0]);
        assert_eq!(chain, vec![perm(2, &[&[1, 2]]), Permutation::identity(2), perm(2, &[&[1, 2]])]);

        let p = HurwitzParams::new(0, &[1, 1], &[2]).unwrap();
        let all = enumerate_monodromy_sets(&p);
        assert_eq!(all.len(), 2);
        for ms in &all {
            assert_eq!(sigma_chain(ms), vec![Permutation::identity(2), perm(2, &[&[1, 2]])]);
        }

        let p = HurwitzParams::new(0, &[3], &[3]).unwrap();
        let all = enumerate_monodromy_sets(&p);
        assert!(all.iter().all(|ms| sigma_chain(ms).len() == 1));
    }

    #[test]
    fn enumeration_counts() {
        let cases: &[(u32, &[u32], &[u32], usize)] = &[
            (1, &[2], &[2], 1),
            (0, &[1, 1], &[2], 2),
            (0, &[2, 1], &[2, 1], 24),
        ];
        for &(g, mu, nu, expected) in cases {
            let p = HurwitzParams::new(g, mu, nu).unwrap();
            let all = enumerate_monodromy_sets(&p);
            assert_eq!(all.len(), expected, "{p}");
            for ms in &all {
                ms.validate().unwrap();
            }
            assert_eq!(count_monodromy_sets(&p), BigUint::from(expected));
        }
    }

    #[test]
    fn hurwitz_permutation_values() {
        let h = |g, mu: &[u32], nu: &[u32]| count_hurwitz_permutation(&HurwitzParams::new(g, mu, nu).unwrap());
        assert_eq!(h(0, &[1, 1], &[2]), Rational::one());
        assert_eq!(h(1, &[2], &[2]), Rational::new(1, 2).unwrap());
        assert_eq!(h(0, &[2, 1], &[2, 1]), Rational::from(4));
    }

    #[test]
    fn block_normal_form_matches_full_canonical_form() {
        for (g, mu, nu) in [(0, &[2, 1][..], &[2, 1][..]), (0, &[2, 2], &[3, 1]), (1, &[2, 1], &[3]), (0, &[1, 1, 1], &[3])] {
            let p = HurwitzParams::new(g, mu, nu).unwrap();
            let mut full = HashMap::new();
            let mut block = HashMap::new();
            for_each_monodromy_set(&p, |ms| {
                let (k, a) = ms.canonical_form();
                let (b, a2) = ms.block_normal_form();
                assert_eq!(a, a2);
                assert_eq!(*full.entry(k).or_insert(b.clone()), b);
                block.insert(b, a);
            });
            assert_eq!(full.len(), block.len());
            let mut reached = HashSet::new();
            for_each_block_monodromy_set(&p, |ms| {
                reached.insert(ms.block_normal_form().0);
            });
            assert_eq!(reached.len(), block.len());
        }
    }

    #[test]
    fn isomorphism_examples() {
        let p = HurwitzParams::new(0, &[1, 1], &[2]).unwrap();
        let all = enumerate_monodromy_sets(&p);
        // swapping the two sheets exchanges the labels of sigma_0
        assert_eq!(all.len(), 2);
        assert!(are_isomorphic(&all[0], &all[1]));
        assert_eq!(all[0].automorphism_order(), 1);
        let p = HurwitzParams::new(0, &[2, 1], &[2, 1]).unwrap();
        let all = enumerate_monodromy_sets(&p);
        let classes = all.iter().map(|ms| ms.canonical_form().0).unique().count();
        assert_eq!(classes, 4);
        assert!(all.iter().any(|ms| !are_isomorphic(&all[0], ms)));
    }

    #[test]
    fn labeled_types_are_bound_to_lengths() {
        let all = labeled_permutations_of_type(&[2, 1, 1]);
        // 4!/(2*1*1) = 12 labeled permutations
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(|lp| lp.labeled_type() == vec![2, 1, 1]));
        assert_eq!(all.iter().unique().count(), 12);
    }
}
