//! Traffic rules: reading a permutation chain off a weighted ribbon graph and
//! rebuilding the graph from the chain.
//!
//! At step `i` a trace turns left at vertices with label `> i` and right at
//! the others. With all left turns a trace follows white faces, so `sigma_0`
//! realizes `mu`; with all right turns it follows gray faces, so `sigma_r`
//! realizes `nu` and `sigma_inf = sigma_r⁻¹`.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;
use crate::permutation::{for_each_block_monodromy_set, sigma_chain, LabeledPermutation, MonodromySet, Permutation};
use crate::ribbon::skeleton::{cycle_ids, RibbonGraph};
use crate::ribbon::weights::{enumerate_hrgs, HurwitzRibbonGraph};

/// The tick identifiers on each edge, listed along its natural orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TickAssignment {
    pub ticks: Vec<Vec<usize>>,
}

impl TickAssignment {
    /// Ticks `0..d` numbered edge by edge.
    pub fn identity(h: &HurwitzRibbonGraph) -> Self {
        let mut next = 0;
        let ticks = h
            .weights
            .iter()
            .map(|&w| {
                let t: Vec<usize> = (next..next + w as usize).collect();
                next += w as usize;
                t
            })
            .collect();
        TickAssignment { ticks }
    }

    /// Edge and position of every tick.
    fn locate(&self, d: usize) -> Result<Vec<(usize, usize)>> {
        let mut at = vec![(usize::MAX, 0); d];
        for (e, ts) in self.ticks.iter().enumerate() {
            for (pos, &x) in ts.iter().enumerate() {
                if x >= d || at[x].0 != usize::MAX {
                    return Err(HurwitzError::InvalidChain(format!("tick {} repeated or out of range", x + 1)));
                }
                at[x] = (e, pos);
            }
        }
        if at.iter().any(|a| a.0 == usize::MAX) {
            return Err(HurwitzError::InvalidChain("ticks must be 1..=d".into()));
        }
        Ok(at)
    }
}

/// `sigma_step` for one traffic state: tick -> next tick.
fn trace(h: &HurwitzRibbonGraph, t: &TickAssignment, at: &[(usize, usize)], step: usize) -> Result<Permutation> {
    let g = &h.skeleton;
    let images = at
        .iter()
        .enumerate()
        .map(|(x, &(e, pos))| {
            if pos + 1 < t.ticks[e].len() {
                return Ok(t.ticks[e][pos + 1]);
            }
            let mut edge = e;
            for _ in 0..=g.num_edges() {
                let head = g.endpoints(edge).1;
                edge = g.turn(edge, head >= step);
                if let Some(&y) = t.ticks[edge].first() {
                    return Ok(y);
                }
            }
            Err(HurwitzError::NonterminatingTrace(x + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Permutation::from_images(images)
}

/// `sigma_0, ..., sigma_r` read off `h` with ticks named by `t`.
pub fn ribbon_to_chain(h: &HurwitzRibbonGraph, t: &TickAssignment) -> Result<Vec<Permutation>> {
    let d = h.params.d as usize;
    if t.ticks.len() != h.weights.len()
        || t.ticks.iter().zip(&h.weights).any(|(ts, &w)| ts.len() != w as usize)
    {
        return Err(HurwitzError::InvalidChain("tick counts must equal edge weights".into()));
    }
    let at = t.locate(d)?;
    let chain = (0..=h.skeleton.r())
        .map(|i| trace(h, t, &at, i))
        .collect::<Result<Vec<_>>>()?;
    for w in chain.windows(2) {
        if w[1].compose(&w[0].inverse()).as_transposition().is_none() {
            return Err(HurwitzError::InvalidChain("consecutive traffic states differ by more than a transposition".into()));
        }
    }
    Ok(chain)
}

/// The labeled monodromy set of `h`: `sigma_0` labeled by white faces and
/// `sigma_inf` by gray faces.
pub fn ribbon_to_monodromy(h: &HurwitzRibbonGraph, t: &TickAssignment) -> Result<MonodromySet> {
    let chain = ribbon_to_chain(h, t)?;
    let d = h.params.d as usize;
    let at = t.locate(d)?;
    let white: Vec<usize> = at.iter().map(|&(e, _)| h.skeleton.white_labels()[e]).collect();
    let gray: Vec<usize> = at.iter().map(|&(e, _)| h.skeleton.gray_labels()[e]).collect();
    let taus = chain.windows(2).map(|w| w[1].compose(&w[0].inverse())).collect();
    let ms = MonodromySet {
        params: h.params.clone(),
        sigma0: LabeledPermutation::new(chain[0].clone(), white)?,
        taus,
        sigma_inf: LabeledPermutation::new(chain.last().expect("r+1 states").inverse(), gray)?,
    };
    ms.validate()?;
    Ok(ms)
}

/// A vertex crossing inside the gap after a tick: vertex, in slot, out slot.
#[derive(Clone, Copy, Debug)]
struct Passage {
    vertex: usize,
    in_index: usize,
    out_index: usize,
}

/// Rebuilds the weighted ribbon graph of a monodromy set. Ticks keep their
/// names, so `ribbon_to_chain` on the result returns `sigma_chain(ms)`.
pub fn chain_to_ribbon(ms: &MonodromySet) -> Result<(HurwitzRibbonGraph, TickAssignment)> {
    let p = &ms.params;
    let (d, r) = (p.d as usize, p.r);
    if r == 0 {
        return Err(HurwitzError::RZero);
    }
    let chain = sigma_chain(ms);
    let bad = |msg: String| Err(HurwitzError::InvalidChain(msg));
    // gaps[x]: vertices crossed between tick x and its successor in the current state
    let mut gaps: Vec<Vec<Passage>> = vec![Vec::new(); d];
    for (j, tau) in ms.taus.iter().enumerate() {
        let (pt, qt) = match tau.as_transposition() {
            Some(pq) => pq,
            None => return bad(format!("step {} is not a transposition", j + 1)),
        };
        let prev_inv = chain[j].inverse();
        let (a, b) = (prev_inv.apply(pt), prev_inv.apply(qt));
        gaps[a].push(Passage { vertex: j, in_index: 2 * j, out_index: 2 * j + 1 });
        gaps[b].push(Passage { vertex: j, in_index: 2 * j + 1, out_index: 2 * j });
    }
    let last = chain.last().expect("r+1 states");
    let e = 2 * r;
    let mut pairing = vec![usize::MAX; e];
    let mut ticks: Vec<Vec<usize>> = vec![Vec::new(); e];
    for x in 0..d {
        let gap = &gaps[x];
        for w in gap.windows(2) {
            debug_assert!(w[0].vertex < w[1].vertex);
            pairing[w[0].out_index] = w[1].in_index;
        }
        if let Some(end) = gap.last() {
            // the edge leaving `end` carries the ticks up to the next crossing
            let mut y = last.apply(x);
            let edge = end.out_index;
            let mut steps = 0;
            loop {
                ticks[edge].push(y);
                if let Some(first) = gaps[y].first() {
                    pairing[edge] = first.in_index;
                    break;
                }
                y = last.apply(y);
                steps += 1;
                if steps > d {
                    return bad("a boundary circle crosses no vertex".into());
                }
            }
        }
    }
    if pairing.iter().any(|&j| j == usize::MAX) {
        return bad("chain does not close up into a ribbon graph".into());
    }
    if ticks.iter().map(Vec::len).sum::<usize>() != d {
        return bad("a boundary circle crosses no vertex".into());
    }
    let label_faces = |step: &dyn Fn(usize) -> usize, labels: &LabeledPermutation, count: usize| {
        let (ids, faces) = cycle_ids(e, step);
        let mut face_label = vec![usize::MAX; faces];
        for k in 0..e {
            if let Some(&x) = ticks[k].first() {
                face_label[ids[k]] = labels.label_of_point(x);
            }
        }
        if faces != count || face_label.contains(&usize::MAX) {
            return None;
        }
        Some(ids.iter().map(|&f| face_label[f]).collect::<Vec<_>>())
    };
    let white = label_faces(&|k| pairing[k], &ms.sigma0, p.m);
    let gray = label_faces(&|k| pairing[k] ^ 1, &ms.sigma_inf, p.n);
    let (white, gray) = match (white, gray) {
        (Some(w), Some(g)) => (w, g),
        _ => return bad("face structure does not match the labeled cycles".into()),
    };
    let skeleton = RibbonGraph::new(r, pairing, white, gray)?;
    let weights = ticks.iter().map(|t| t.len() as u64).collect();
    let h = HurwitzRibbonGraph::new(skeleton, weights, p.clone())?;
    let t = TickAssignment { ticks };
    if ribbon_to_chain(&h, &t)? != chain || ribbon_to_monodromy(&h, &t)? != *ms {
        return bad("rebuilt graph does not reproduce the chain".into());
    }
    Ok((h, t))
}

/// Outcome of comparing HRG classes with monodromy-set classes.
#[derive(Clone, Debug, Serialize)]
pub struct RoundtripReport {
    pub params: HurwitzParams,
    pub classes_ribbon: usize,
    pub classes_permutation: usize,
    pub matched: usize,
    pub aut_mismatches: usize,
    pub failures: Vec<String>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.aut_mismatches == 0
            && self.classes_ribbon == self.classes_permutation
            && self.matched == self.classes_ribbon
    }
}

/// Sends every HRG class through the chain and back, and every monodromy
/// class through a graph and back, checking the classes correspond one to one
/// with equal automorphism orders.
pub fn roundtrip_check(p: &HurwitzParams) -> Result<RoundtripReport> {
    let hrgs = enumerate_hrgs(p)?;
    let forward: Vec<std::result::Result<(Vec<usize>, bool), String>> = hrgs
        .par_iter()
        .map(|(h, aut)| {
            let fail = |e: HurwitzError| format!("{:?}: {e}", h.weights);
            let ms = ribbon_to_monodromy(h, &TickAssignment::identity(h)).map_err(fail)?;
            let (back, _) = chain_to_ribbon(&ms).map_err(fail)?;
            if !back.is_isomorphic(h) {
                return Err(format!("{:?}: roundtrip changed the graph", h.weights));
            }
            let (key, ms_aut) = ms.block_normal_form();
            Ok((key, ms_aut == *aut))
        })
        .collect();
    let mut failures = Vec::new();
    let mut image: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut aut_mismatches = 0;
    for f in forward {
        match f {
            Ok((key, same_aut)) => {
                *image.entry(key).or_default() += 1;
                aut_mismatches += usize::from(!same_aut);
            }
            Err(msg) => failures.push(msg),
        }
    }
    if image.values().any(|&c| c > 1) {
        failures.push("two HRG classes map to one monodromy class".into());
    }
    let mut classes: HashSet<Vec<usize>> = HashSet::new();
    let mut reps = Vec::new();
    for_each_block_monodromy_set(p, |ms| {
        if classes.insert(ms.block_normal_form().0) {
            reps.push(ms.clone());
        }
    });
    let hrg_keys: HashSet<HurwitzRibbonGraph> = hrgs.iter().map(|(h, _)| h.canonical()).collect();
    let mut matched = 0;
    for ms in &reps {
        let key = ms.block_normal_form().0;
        match chain_to_ribbon(ms) {
            Ok((h, _)) if image.contains_key(&key) && hrg_keys.contains(&h.canonical()) => matched += 1,
            Ok(_) => failures.push(format!("{ms:?}: no matching HRG class")),
            Err(e) => failures.push(format!("{ms:?}: {e}")),
        }
    }
    Ok(RoundtripReport {
        params: p.clone(),
        classes_ribbon: hrgs.len(),
        classes_permutation: classes.len(),
        matched,
        aut_mismatches,
        failures,
    })
}
