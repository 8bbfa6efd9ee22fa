//! Tropical graphs, monodromy graphs and the tropical count, plus the
//! tropicalization of weighted ribbon graphs.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use itertools::Itertools;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;
use crate::permutation::Permutation;
use crate::rational::Rational;
use crate::ribbon::skeleton::RibbonGraph;
use crate::ribbon::weights::HurwitzRibbonGraph;
use crate::traffic::{ribbon_to_chain, TickAssignment};

/// A vertex of a tropical graph; indices are 1-based labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Source(usize),
    Internal(usize),
    Sink(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Source(k) => write!(f, "s{k}"),
            Node::Internal(i) => write!(f, "v{i}"),
            Node::Sink(j) => write!(f, "t{j}"),
        }
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// An `(m,n,r)`-tropical graph. Edges are sorted, parallel edges repeated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropicalGraph {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub edges: Vec<(Node, Node)>,
}

impl TropicalGraph {
    fn connected(&self) -> bool {
        let id = |v: Node| match v {
            Node::Source(k) => k - 1,
            Node::Internal(i) => self.m + i - 1,
            Node::Sink(j) => self.m + self.r + j - 1,
        };
        let total = self.m + self.n + self.r;
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = total;
        for &(a, b) in &self.edges {
            let (x, y) = (find(&mut parent, id(a)), find(&mut parent, id(b)));
            if x != y {
                parent[x] = y;
                comps -= 1;
            }
        }
        comps == 1
    }

    /// `E - V + 1`.
    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - (self.m + self.n + self.r) as i64 + 1
    }

    /// Edges between two internal vertices.
    pub fn is_interior(&self, edge: usize) -> bool {
        matches!(self.edges[edge], (Node::Internal(_), Node::Internal(_)))
    }

    /// Maximal runs of parallel edges (edges are sorted, so runs are contiguous).
    pub fn parallel_classes(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.edges.len() {
            if k == self.edges.len() || self.edges[k] != self.edges[start] {
                out.push(start..k);
                start = k;
            }
        }
        out
    }

    /// Label-fixing automorphisms only permute parallel edges.
    pub fn aut_order(&self) -> u64 {
        self.parallel_classes()
            .iter()
            .map(|c| (1..=c.len() as u64).product::<u64>())
            .product()
    }

    /// Whether internal vertex `i` (1-based) joins two edges.
    pub fn is_join(&self, i: usize) -> bool {
        self.edges.iter().filter(|e| e.1 == Node::Internal(i)).count() == 2
    }

    pub fn to_dot(&self, flows: Option<&[u64]>) -> String {
        let mut s = String::from("digraph tropical {\n  rankdir=LR;\n");
        let nodes = (1..=self.m)
            .map(Node::Source)
            .chain((1..=self.r).map(Node::Internal))
            .chain((1..=self.n).map(Node::Sink));
        for v in nodes {
            let shape = if matches!(v, Node::Internal(_)) { "circle" } else { "point" };
            let _ = writeln!(s, "  {v} [label=\"{v}\", shape={shape}];");
        }
        let _ = writeln!(
            s,
            "  {{ rank=same; {} }}\n  {{ rank=same; {} }}",
            (1..=self.m).map(|k| Node::Source(k).to_string()).join("; "),
            (1..=self.n).map(|j| Node::Sink(j).to_string()).join("; ")
        );
        for (k, (a, b)) in self.edges.iter().enumerate() {
            match flows {
                Some(f) => {
                    let _ = writeln!(s, "  {a} -> {b} [label=\"{}\"];", f[k]);
                }
                None => {
                    let _ = writeln!(s, "  {a} -> {b};");
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

/// Every `(m,n,r)`-tropical graph up to isomorphism, with automorphism orders.
pub fn enumerate_tropical_graphs(m: usize, n: usize, r: usize) -> Vec<(TropicalGraph, u64)> {
    if r == 0 || m == 0 || n == 0 || HurwitzParams::genus_for(m, n, r).is_none() {
        return Vec::new();
    }
    fn build(
        step: usize,
        r: usize,
        open: &mut Vec<Node>,
        edges: &mut Vec<(Node, Node)>,
        out: &mut Vec<(Vec<Node>, Vec<(Node, Node)>)>,
    ) {
        if step > r {
            out.push((open.clone(), edges.clone()));
            return;
        }
        let v = Node::Internal(step);
        let k = open.len();
        // join two open edges
        for a in 0..k {
            for b in a + 1..k {
                let (ta, tb) = (open[a], open[b]);
                edges.push((ta, v));
                edges.push((tb, v));
                let mut rest: Vec<Node> = open.iter().enumerate().filter(|&(i, _)| i != a && i != b).map(|(_, &x)| x).collect();
                rest.push(v);
                build(step + 1, r, &mut rest, edges, out);
                edges.truncate(edges.len() - 2);
            }
        }
        // cut one open edge
        for a in 0..k {
            let ta = open[a];
            edges.push((ta, v));
            let mut rest: Vec<Node> = open.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, &x)| x).collect();
            rest.push(v);
            rest.push(v);
            build(step + 1, r, &mut rest, edges, out);
            edges.pop();
        }
    }
    let mut partial = Vec::new();
    let mut open: Vec<Node> = (1..=m).map(Node::Source).collect();
    build(1, r, &mut open, &mut Vec::new(), &mut partial);
    let mut seen = BTreeSet::new();
    for (open, edges) in partial {
        if open.len() != n {
            continue;
        }
        for perm in (1..=n).permutations(n) {
            let mut all = edges.clone();
            all.extend(open.iter().zip(&perm).map(|(&t, &j)| (t, Node::Sink(j))));
            all.sort();
            let g = TropicalGraph { m, n, r, edges: all };
            if g.connected() {
                seen.insert(g);
            }
        }
    }
    seen.into_iter().map(|g| {
        let a = g.aut_order();
        (g, a)
    }).collect()
}

/// A tropical graph with a positive balanced flow aligned with its edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonodromyGraph {
    pub graph: TropicalGraph,
    pub flows: Vec<u64>,
    pub params: HurwitzParams,
}

#[derive(Serialize)]
struct EdgeJson {
    tail: Node,
    head: Node,
    flow: u64,
}

#[derive(Serialize)]
pub struct MonodromyGraphJson {
    sources: Vec<Node>,
    sinks: Vec<Node>,
    internal: Vec<Node>,
    edges: Vec<EdgeJson>,
}

impl MonodromyGraph {
    pub fn new(graph: TropicalGraph, flows: Vec<u64>, params: HurwitzParams) -> Result<Self> {
        let mg = MonodromyGraph { graph, flows, params };
        mg.validate()?;
        Ok(mg)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.graph;
        let bad = |msg: &str| Err(HurwitzError::InvalidMap(msg.to_string()));
        if self.flows.len() != g.edges.len() || self.flows.contains(&0) {
            return bad("one positive flow per edge expected");
        }
        let mut net: HashMap<Node, i64> = HashMap::new();
        for (&(a, b), &f) in g.edges.iter().zip(&self.flows) {
            *net.entry(a).or_default() -= f as i64;
            *net.entry(b).or_default() += f as i64;
            if let Node::Source(k) = a {
                if f != self.params.mu.get(k - 1) as u64 {
                    return bad("source flow differs from mu");
                }
            }
            if let Node::Sink(j) = b {
                if f != self.params.nu.get(j - 1) as u64 {
                    return bad("sink flow differs from nu");
                }
            }
        }
        if (1..=g.r).any(|i| net.get(&Node::Internal(i)).copied().unwrap_or(0) != 0) {
            return bad("flow is not conserved");
        }
        Ok(())
    }

    /// Product of flows over edges between internal vertices.
    pub fn multiplicity(&self) -> BigInt {
        (0..self.flows.len())
            .filter(|&k| self.graph.is_interior(k))
            .map(|k| BigInt::from(self.flows[k]))
            .product()
    }

    /// Flows sorted within each parallel class.
    pub fn canonical(&self) -> MonodromyGraph {
        let mut flows = self.flows.clone();
        for c in self.graph.parallel_classes() {
            flows[c].sort_unstable();
        }
        MonodromyGraph { graph: self.graph.clone(), flows, params: self.params.clone() }
    }

    /// Permutations of parallel edges that fix the flow.
    pub fn aut_order(&self) -> u64 {
        self.graph
            .parallel_classes()
            .into_iter()
            .map(|c| {
                self.flows[c]
                    .iter()
                    .counts()
                    .values()
                    .map(|&k| (1..=k as u64).product::<u64>())
                    .product::<u64>()
            })
            .product()
    }

    pub fn to_json(&self) -> MonodromyGraphJson {
        let g = &self.graph;
        MonodromyGraphJson {
            sources: (1..=g.m).map(Node::Source).collect(),
            sinks: (1..=g.n).map(Node::Sink).collect(),
            internal: (1..=g.r).map(Node::Internal).collect(),
            edges: g
                .edges
                .iter()
                .zip(&self.flows)
                .map(|(&(tail, head), &flow)| EdgeJson { tail, head, flow })
                .collect(),
        }
    }

    pub fn to_dot(&self) -> String {
        self.graph.to_dot(Some(&self.flows))
    }
}

/// All positive conservative flows with source flows `mu` and sink flows `nu`,
/// in lexicographic order.
pub fn flow_lattice_points(t: &TropicalGraph, mu: &[u32], nu: &[u32]) -> Vec<Vec<u64>> {
    if mu.len() != t.m || nu.len() != t.n {
        return Vec::new();
    }
    let incoming: Vec<Vec<usize>> = (1..=t.r)
        .map(|i| (0..t.edges.len()).filter(|&k| t.edges[k].1 == Node::Internal(i)).collect())
        .collect();
    let outgoing: Vec<Vec<usize>> = (1..=t.r)
        .map(|i| (0..t.edges.len()).filter(|&k| t.edges[k].0 == Node::Internal(i)).collect())
        .collect();
    let mut flows = vec![0u64; t.edges.len()];
    for (k, e) in t.edges.iter().enumerate() {
        if let Node::Source(s) = e.0 {
            flows[k] = mu[s - 1] as u64;
        }
    }
    fn rec(
        i: usize,
        t: &TropicalGraph,
        incoming: &[Vec<usize>],
        outgoing: &[Vec<usize>],
        nu: &[u32],
        flows: &mut Vec<u64>,
        out: &mut Vec<Vec<u64>>,
    ) {
        if i == t.r {
            let ok = t.edges.iter().enumerate().all(|(k, e)| match e.1 {
                Node::Sink(j) => flows[k] == nu[j - 1] as u64,
                _ => true,
            });
            if ok {
                out.push(flows.clone());
            }
            return;
        }
        let total: u64 = incoming[i].iter().map(|&k| flows[k]).sum();
        match outgoing[i].as_slice() {
            &[o] => {
                flows[o] = total;
                rec(i + 1, t, incoming, outgoing, nu, flows, out);
            }
            &[o1, o2] => {
                for a in 1..total {
                    flows[o1] = a;
                    flows[o2] = total - a;
                    rec(i + 1, t, incoming, outgoing, nu, flows, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    rec(0, t, &incoming, &outgoing, nu, &mut flows, &mut out);
    out.sort();
    out
}

pub fn tropical_multiplicity(mg: &MonodromyGraph) -> BigInt {
    mg.multiplicity()
}

/// Monodromy graphs for `p` up to isomorphism, with automorphism orders.
pub fn enumerate_monodromy_graphs(p: &HurwitzParams) -> Result<Vec<(MonodromyGraph, u64)>> {
    if p.r == 0 {
        return Err(HurwitzError::RZero);
    }
    let mut out = Vec::new();
    for (g, _) in enumerate_tropical_graphs(p.m, p.n, p.r) {
        for flows in flow_lattice_points(&g, p.mu.parts(), p.nu.parts()) {
            let mg = MonodromyGraph { graph: g.clone(), flows, params: p.clone() };
            if mg.canonical() == mg {
                let a = mg.aut_order();
                out.push((mg, a));
            }
        }
    }
    Ok(out)
}

/// `H_g(mu, nu)` as a weighted count of monodromy graphs: each orbit of flows
/// under the automorphisms of its graph contributes multiplicity / stabilizer.
pub fn count_hurwitz_tropical(p: &HurwitzParams) -> Result<Rational> {
    if p.r == 0 {
        return Err(HurwitzError::RZero);
    }
    let graphs = enumerate_tropical_graphs(p.m, p.n, p.r);
    Ok(graphs
        .par_iter()
        .map(|(g, _)| {
            let mut sum = Rational::zero();
            for flows in flow_lattice_points(g, p.mu.parts(), p.nu.parts()) {
                let mg = MonodromyGraph { graph: g.clone(), flows, params: p.clone() };
                if mg.canonical() == mg {
                    sum += Rational::new(mg.multiplicity(), mg.aut_order()).expect("positive");
                }
            }
            sum
        })
        .reduce(Rational::zero, |a, b| a + b))
}

/// A circle during the traffic sweep: where it was created and its members.
struct Circle<T> {
    born: Node,
    members: Vec<T>,
}

/// Lifetimes of the cycles of `states[0..=r]`: each cycle not present in the
/// next state ends at the internal vertex of that step. Returns
/// `(tail, head, members)` per tropical edge.
fn sweep<T: Copy + Ord>(
    states: &[Vec<Vec<T>>],
    source_of: impl Fn(&[T]) -> usize,
    sink_of: impl Fn(&[T]) -> usize,
) -> Vec<(Node, Node, Vec<T>)> {
    let key = |c: &[T]| c.iter().copied().sorted().collect::<Vec<T>>();
    let mut alive: Vec<Circle<T>> = states[0]
        .iter()
        .map(|c| Circle { born: Node::Source(source_of(c) + 1), members: key(c) })
        .collect();
    let mut edges = Vec::new();
    for i in 1..states.len() {
        let next: Vec<Vec<T>> = states[i].iter().map(|c| key(c)).collect();
        let v = Node::Internal(i);
        let mut kept = Vec::new();
        for c in alive {
            if next.contains(&c.members) {
                kept.push(c);
            } else {
                edges.push((c.born, v, c.members));
            }
        }
        for c in next {
            if !kept.iter().any(|k| k.members == c) {
                kept.push(Circle { born: v, members: c });
            }
        }
        alive = kept;
    }
    for c in alive {
        let j = sink_of(&c.members);
        edges.push((c.born, Node::Sink(j + 1), c.members));
    }
    edges
}

/// The tropical graph of a skeleton together with the 0/1 matrix sending an
/// edge weighting to the flows. Rows follow the sorted edges of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropicalizationMatrix {
    pub graph: TropicalGraph,
    pub rows: Vec<Vec<u8>>,
}

impl TropicalizationMatrix {
    pub fn apply(&self, weights: &[u64]) -> Vec<u64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(weights).map(|(&a, &w)| a as u64 * w).sum())
            .collect()
    }
}

/// Cycles of the edge successor map in traffic state `i`.
fn edge_circles(g: &RibbonGraph, i: usize) -> Vec<Vec<usize>> {
    let succ: Vec<usize> = (0..g.num_edges()).map(|e| g.turn(e, g.endpoints(e).1 >= i)).collect();
    Permutation::from_images(succ).expect("traffic turns permute edges").cycles()
}

pub fn tropicalization_matrix(g: &RibbonGraph) -> TropicalizationMatrix {
    let states: Vec<Vec<Vec<usize>>> = (0..=g.r()).map(|i| edge_circles(g, i)).collect();
    let mut edges = sweep(&states, |c| g.white_labels()[c[0]], |c| g.gray_labels()[c[0]]);
    edges.sort();
    let rows = edges
        .iter()
        .map(|(_, _, members)| {
            let mut row = vec![0u8; g.num_edges()];
            for &e in members {
                row[e] += 1;
            }
            row
        })
        .collect();
    let graph = TropicalGraph {
        m: g.m(),
        n: g.n(),
        r: g.r(),
        edges: edges.iter().map(|(a, b, _)| (*a, *b)).collect(),
    };
    TropicalizationMatrix { graph, rows }
}

/// The monodromy graph traced by the tick cycles of the traffic chain.
pub fn tropicalize(h: &HurwitzRibbonGraph) -> Result<MonodromyGraph> {
    let t = TickAssignment::identity(h);
    let chain = ribbon_to_chain(h, &t)?;
    let mut edge_of = vec![0; h.params.d as usize];
    for (e, ts) in t.ticks.iter().enumerate() {
        for &x in ts {
            edge_of[x] = e;
        }
    }
    let states: Vec<Vec<Vec<usize>>> = chain.iter().map(|s| s.cycles()).collect();
    let g = &h.skeleton;
    let mut edges = sweep(
        &states,
        |c| g.white_labels()[edge_of[c[0]]],
        |c| g.gray_labels()[edge_of[c[0]]],
    );
    edges.sort_by(|a, b| (a.0, a.1, a.2.len()).cmp(&(b.0, b.1, b.2.len())));
    let graph = TropicalGraph {
        m: g.m(),
        n: g.n(),
        r: g.r(),
        edges: edges.iter().map(|(a, b, _)| (*a, *b)).collect(),
    };
    let flows = edges.iter().map(|(_, _, c)| c.len() as u64).collect();
    MonodromyGraph::new(graph, flows, h.params.clone())
}

/// Checks that the tick-level tropicalization of `h` agrees with the
/// skeleton-level matrix applied to its weights.
pub fn check_fiber(h: &HurwitzRibbonGraph, m: &TropicalizationMatrix) -> Result<MonodromyGraph> {
    let mg = tropicalize(h)?;
    let predicted = MonodromyGraph {
        graph: m.graph.clone(),
        flows: m.apply(&h.weights),
        params: h.params.clone(),
    };
    if mg.graph != m.graph || mg.canonical() != predicted.canonical() {
        return Err(HurwitzError::InconsistentFiber(format!(
            "weights {:?}: traced flows {:?} on {:?}, matrix gives {:?}",
            h.weights, mg.flows, mg.graph.edges, predicted.flows
        )));
    }
    Ok(mg)
}
