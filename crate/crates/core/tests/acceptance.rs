//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::collections::HashMap;
use std::time::Instant;

use hurwitz::chambers::{chambers, degree_check, fit_chamber_polynomial, walls};
use hurwitz::permutation::{apply_transposition, count_hurwitz_permutation, cut_join_count, CutJoinKind, Permutation};
use hurwitz::ribbon::{count_hurwitz_ribbon, enumerate_hrgs};
use hurwitz::traffic::roundtrip_check;
use hurwitz::tropical::{count_hurwitz_tropical, enumerate_tropical_graphs, flow_lattice_points, tropicalize, MonodromyGraph};
use hurwitz::{HurwitzParams, Rational};
use itertools::Itertools;

/// Brute-force `H_g(mu, nu)` straight from the definition: all `sigma_0` of
/// the right type, all transposition sequences, `sigma_inf` forced by the
/// product. `left` selects `(a b)(x) = a(b(x))`, otherwise `b(a(x))`.
fn oracle(p: &HurwitzParams, left: bool) -> Rational {
    let d = p.d as usize;
    let comp = |a: &[usize], b: &[usize]| -> Vec<usize> {
        if left {
            (0..d).map(|x| a[b[x]]).collect()
        } else {
            (0..d).map(|x| b[a[x]]).collect()
        }
    };
    let cycle_type = |s: &[usize]| -> Vec<u32> {
        let mut seen = vec![false; d];
        let mut t = Vec::new();
        for x in 0..d {
            let mut len = 0;
            let mut y = x;
            while !seen[y] {
                seen[y] = true;
                y = s[y];
                len += 1;
            }
            if len > 0 {
                t.push(len);
            }
        }
        t.sort_unstable_by(|a, b| b.cmp(a));
        t
    };
    let labelings = |parts: &[u32]| -> u64 {
        parts.iter().counts().values().map(|&c| (1..=c as u64).product::<u64>()).product()
    };
    let mu = p.mu.sorted_desc().parts().to_vec();
    let nu = p.nu.sorted_desc().parts().to_vec();
    let transpositions: Vec<Vec<usize>> = (0..d)
        .tuple_combinations()
        .map(|(i, j)| {
            let mut t: Vec<usize> = (0..d).collect();
            t.swap(i, j);
            t
        })
        .collect();
    let mut total: u64 = 0;
    for s0 in (0..d).permutations(d) {
        if cycle_type(&s0) != mu {
            continue;
        }
        let sequences: Vec<Vec<usize>> = if p.r == 0 {
            vec![Vec::new()]
        } else {
            (0..p.r).map(|_| 0..transpositions.len()).multi_cartesian_product().collect()
        };
        for taus in sequences {
            let mut acc = s0.clone();
            let mut parent: Vec<usize> = (0..d).collect();
            fn find(p: &mut [usize], mut x: usize) -> usize {
                while p[x] != x {
                    x = p[x];
                }
                x
            }
            for &t in &taus {
                acc = comp(&transpositions[t], &acc);
            }
            let inf: Vec<usize> = {
                let mut inv = vec![0; d];
                for (x, &y) in acc.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            };
            if cycle_type(&inf) != nu {
                continue;
            }
            let mut gens: Vec<&[usize]> = taus.iter().map(|&t| transpositions[t].as_slice()).collect();
            gens.push(&s0);
            for g in gens {
                for x in 0..d {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, g[x]));
                    parent[a] = b;
                }
            }
            if (0..d).all(|x| find(&mut parent, x) == find(&mut parent, 0)) {
                total += 1;
            }
        }
    }
    let fact: u64 = (1..=d as u64).product();
    Rational::new(total * labelings(&mu) * labelings(&nu), fact).unwrap()
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn report(&mut self, n: usize, name: &str, started: Instant, result: Result<String, String>) {
        let secs = started.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {n}: {name} ({detail}; {secs:.1}s)"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL criterion {n}: {name} ({detail}; {secs:.1}s)");
            }
        }
    }
}

fn params(g: u32, mu: &[u32], nu: &[u32]) -> HurwitzParams {
    HurwitzParams::new(g, mu, nu).unwrap()
}

fn oracle_values() -> Result<String, String> {
    let mut cases = vec![
        (params(0, &[1, 1], &[2]), Rational::one()),
        (params(1, &[2], &[2]), Rational::new(1, 2).unwrap()),
        (params(0, &[2, 1], &[2, 1]), Rational::from(4)),
        (params(0, &[3], &[1, 1, 1]), Rational::from(6)),
    ];
    for d in 1..=6u32 {
        cases.push((params(0, &[d], &[d]), Rational::new(1, d as i64).unwrap()));
    }
    for (p, expected) in &cases {
        let t = Instant::now();
        let got = count_hurwitz_permutation(p);
        if t.elapsed().as_secs_f64() >= 1.0 {
            return Err(format!("{p} took {:?}", t.elapsed()));
        }
        if got != *expected {
            return Err(format!("{p}: got {got}, expected {expected}"));
        }
        for left in [true, false] {
            let o = oracle(p, left);
            if o != *expected {
                return Err(format!("{p}: brute force ({}) gives {o}", if left { "left" } else { "right" }));
            }
        }
    }
    Ok(format!("{} cases exact, brute force agrees under both conventions", cases.len()))
}

fn triple_agreement() -> Result<String, String> {
    let sweep = HurwitzParams::sweep(5, 1, 5);
    for p in &sweep {
        let perm = count_hurwitz_permutation(p);
        let ribbon = count_hurwitz_ribbon(p).map_err(|e| format!("{p}: {e}"))?;
        let trop = count_hurwitz_tropical(p).map_err(|e| format!("{p}: {e}"))?;
        if perm != ribbon || perm != trop {
            return Err(format!("{p}: permutation {perm}, ribbon {ribbon}, tropical {trop}"));
        }
        if p.d <= 4 && p.r <= 4 && oracle(p, true) != perm {
            return Err(format!("{p}: brute force disagrees with {perm}"));
        }
    }
    Ok(format!("{} parameter sets agree", sweep.len()))
}

fn roundtrip() -> Result<String, String> {
    let sweep = HurwitzParams::sweep(4, 1, 4);
    let mut classes = 0;
    for p in &sweep {
        let report = roundtrip_check(p).map_err(|e| format!("{p}: {e}"))?;
        if !report.passed() {
            return Err(format!("{p}: {report:?}"));
        }
        classes += report.classes_ribbon;
    }
    Ok(format!("{} parameter sets, {classes} classes matched", sweep.len()))
}

fn cut_join() -> Result<String, String> {
    let mut checked = 0;
    for d in 2..=8usize {
        for k in 1..d {
            let l = d - k;
            // a k-cycle and an l-cycle on 0..d, and a single d-cycle
            let mut images: Vec<usize> = (0..d).collect();
            for x in 0..k {
                images[x] = (x + 1) % k;
            }
            for x in 0..l {
                images[k + x] = k + (x + 1) % l;
            }
            let two = Permutation::from_images(images).unwrap();
            let one = Permutation::from_images((0..d).map(|x| (x + 1) % d).collect()).unwrap();
            let mut joins = 0;
            let mut cuts = 0;
            for (i, j) in (0..d).tuple_combinations() {
                let (_, e) = apply_transposition(&two, i, j);
                if e.kind == CutJoinKind::Join && e.parts == (k.min(l), k.max(l)) {
                    joins += 1;
                }
                let (_, e) = apply_transposition(&one, i, j);
                if e.kind == CutJoinKind::Cut && e.parts == (k.min(l), k.max(l)) {
                    cuts += 1;
                }
            }
            // independent count of the same: a join needs one point in each cycle
            let brute_join = (0..d).tuple_combinations().filter(|&(i, j): &(usize, usize)| (i < k) != (j < k)).count();
            if joins != cut_join_count(k, l, CutJoinKind::Join) || joins != brute_join {
                return Err(format!("join k={k} l={l}: {joins}"));
            }
            if cuts != cut_join_count(k, l, CutJoinKind::Cut) {
                return Err(format!("cut k={k} l={l}: {cuts}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} (k, l) pairs"))
}

fn genus_coherence() -> Result<String, String> {
    let mut graphs = 0;
    for p in HurwitzParams::sweep(4, 1, 5) {
        for (h, _) in enumerate_hrgs(&p).map_err(|e| e.to_string())? {
            let genus = h.skeleton.to_map().genus().map_err(|e| e.to_string())?;
            let betti = tropicalize(&h).map_err(|e| e.to_string())?.graph.betti();
            if genus != p.g || betti != p.g as i64 {
                return Err(format!("{p}: map genus {genus}, Betti {betti}"));
            }
            graphs += 1;
        }
    }
    Ok(format!("{graphs} HRGs"))
}

fn polynomiality() -> Result<String, String> {
    let mut polys = Vec::new();
    let all = chambers(2, 2, 10);
    for signs in &all {
        let cp = fit_chamber_polynomial(0, 2, 2, signs, 10).map_err(|e| e.to_string())?;
        if !degree_check(&cp, 0, 2, 2) {
            return Err(format!("degree {:?} above 1", cp.degree));
        }
        polys.push(cp.poly.to_string());
    }
    if polys.iter().unique().count() < 2 {
        return Err("all chambers share one polynomial".into());
    }
    let torus = chambers(1, 1, 10);
    if torus.len() != 1 {
        return Err(format!("{} chambers for m = n = 1", torus.len()));
    }
    let cp = fit_chamber_polynomial(1, 1, 1, &torus[0], 10).map_err(|e| e.to_string())?;
    if !degree_check(&cp, 1, 1, 1) {
        return Err(format!("genus 1 degree {:?} above 3", cp.degree));
    }
    Ok(format!("{} planar chambers, {} distinct; genus 1: {}", all.len(), polys.iter().unique().count(), cp.poly))
}

fn wall_detection() -> Result<String, String> {
    let d = 8u32;
    let ws = walls(2, 2);
    let h = |a: u32, c: u32| count_hurwitz_permutation(&params(0, &[a, d - a], &[c, d - c]));
    let grid: HashMap<(u32, u32), Rational> = (1..d).cartesian_product(1..d).map(|(a, c)| ((a, c), h(a, c))).collect();
    let on_wall = |a: u32, c: u32| ws.iter().any(|w| w.eval(&[a, d - a], &[c, d - c]) == 0);
    let second = |x: &Rational, y: &Rational, z: &Rational| x - &(y + y) + z.clone();
    let mut found = 0;
    for fixed in 1..d {
        for k in 2..d - 1 {
            let along_mu = !second(&grid[&(k - 1, fixed)], &grid[&(k, fixed)], &grid[&(k + 1, fixed)]).is_zero();
            let along_nu = !second(&grid[&(fixed, k - 1)], &grid[&(fixed, k)], &grid[&(fixed, k + 1)]).is_zero();
            if along_mu != on_wall(k, fixed) {
                return Err(format!("mu1 = {k}, nu1 = {fixed}: breakpoint {along_mu}, wall {}", on_wall(k, fixed)));
            }
            if along_nu != on_wall(fixed, k) {
                return Err(format!("mu1 = {fixed}, nu1 = {k}: breakpoint {along_nu}, wall {}", on_wall(fixed, k)));
            }
            found += usize::from(along_mu) + usize::from(along_nu);
        }
    }
    Ok(format!("{found} breakpoints, all on walls"))
}

fn aggregate_identity() -> Result<String, String> {
    let mut skeletons = 0;
    for p in HurwitzParams::sweep(5, 1, 5) {
        let mut by_graph: HashMap<Vec<_>, Rational> = HashMap::new();
        for (h, aut) in enumerate_hrgs(&p).map_err(|e| e.to_string())? {
            let mg = tropicalize(&h).map_err(|e| e.to_string())?;
            *by_graph.entry(mg.graph.edges.clone()).or_insert_with(Rational::zero) += Rational::new(1, aut as i64).unwrap();
        }
        for (g, aut) in enumerate_tropical_graphs(p.m, p.n, p.r) {
            let mut trop = Rational::zero();
            for flows in flow_lattice_points(&g, p.mu.parts(), p.nu.parts()) {
                let mg = MonodromyGraph::new(g.clone(), flows, p.clone()).map_err(|e| e.to_string())?;
                trop += Rational::new(mg.multiplicity(), aut).unwrap();
            }
            let ribbon = by_graph.remove(&g.edges).unwrap_or_else(Rational::zero);
            if ribbon != trop {
                return Err(format!("{p} on {:?}: ribbon {ribbon}, tropical {trop}", g.edges));
            }
            skeletons += 1;
        }
        if !by_graph.is_empty() {
            return Err(format!("{p}: HRGs tropicalize outside the enumerated graphs"));
        }
    }
    Ok(format!("{skeletons} tropical skeletons"))
}

fn main() {
    let mut gate = Gate { failures: 0 };
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("oracle values", oracle_values),
        ("triple agreement for d <= 5, 1 <= r <= 5", triple_agreement),
        ("roundtrip bijectivity for d <= 4, r <= 4", roundtrip),
        ("cut-join counts for d <= 8", cut_join),
        ("genus coherence for d <= 4", genus_coherence),
        ("piecewise polynomial fits", polynomiality),
        ("wall detection on mu1+mu2 = nu1+nu2 = 8", wall_detection),
        ("aggregate tropicalization identity for d <= 5", aggregate_identity),
    ];
    for (n, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        gate.report(n + 1, name, t, check());
    }
    if gate.failures > 0 {
        println!("{} criteria failed", gate.failures);
        std::process::exit(1);
    }
}
