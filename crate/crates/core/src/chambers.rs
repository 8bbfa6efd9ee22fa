//! Walls, chambers and exact polynomial fits of `H_g(mu, nu)` on each chamber.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{HurwitzError, Result};
use crate::params::HurwitzParams;
use crate::permutation::count_hurwitz_permutation;
use crate::rational::Rational;

/// The hyperplane `sum_{i in I} mu_i = sum_{j in J} nu_j`, with 0-based index
/// sets. The representative of `(I, J) ~ (I^c, J^c)` has `0 in I`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Wall {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
}

impl Wall {
    /// `sum_I mu - sum_J nu`.
    pub fn eval(&self, mu: &[u32], nu: &[u32]) -> i64 {
        self.i.iter().map(|&k| mu[k] as i64).sum::<i64>() - self.j.iter().map(|&k| nu[k] as i64).sum::<i64>()
    }
}

impl fmt::Display for Wall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |name: &str, s: &[usize]| s.iter().map(|k| format!("{name}{}", k + 1)).join("+");
        write!(f, "{} = {}", side("mu", &self.i), side("nu", &self.j))
    }
}

impl Serialize for Wall {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// All walls for `m` white and `n` gray parts. Both sides are proper and nonempty.
pub fn walls(m: usize, n: usize) -> Vec<Wall> {
    let mut out = Vec::new();
    for imask in 1u32..(1 << m) - 1 {
        if imask & 1 == 0 {
            continue;
        }
        for jmask in 1u32..(1 << n) - 1 {
            let bits = |mask: u32, len: usize| (0..len).filter(|&k| mask >> k & 1 == 1).collect();
            out.push(Wall { i: bits(imask, m), j: bits(jmask, n) });
        }
    }
    out.sort();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Less,
    Greater,
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(match self {
            Sign::Less => "<",
            Sign::Greater => ">",
        })
    }
}

pub fn chamber_of(mu: &[u32], nu: &[u32], walls: &[Wall]) -> Result<Vec<Sign>> {
    walls
        .iter()
        .map(|w| match w.eval(mu, nu) {
            0 => Err(HurwitzError::OnWall(format!("mu={mu:?} nu={nu:?} on {w}"))),
            x if x < 0 => Ok(Sign::Less),
            _ => Ok(Sign::Greater),
        })
        .collect()
}

/// A polynomial in `mu_1..mu_m, nu_1..nu_{n-1}` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub m: usize,
    pub n: usize,
    /// (exponents, coefficient), nonzero coefficients only, in basis order
    pub terms: Vec<(Vec<u32>, Rational)>,
}

impl Polynomial {
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max()
    }

    pub fn eval(&self, x: &[i64]) -> Rational {
        self.terms.iter().map(|(e, c)| c * &Rational::from(monomial(e, x))).sum()
    }

    pub fn variable_names(&self) -> Vec<String> {
        (1..=self.m).map(|k| format!("mu{k}")).chain((1..self.n).map(|k| format!("nu{k}"))).collect()
    }

    fn monomial_name(&self, e: &[u32]) -> String {
        let names = self.variable_names();
        let parts: Vec<String> = e
            .iter()
            .zip(&names)
            .filter(|(&p, _)| p > 0)
            .map(|(&p, v)| if p == 1 { v.clone() } else { format!("{v}^{p}") })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let s = self.terms.iter().map(|(e, c)| format!("({c})*{}", self.monomial_name(e))).join(" + ");
        write!(f, "{s}")
    }
}

fn monomial(e: &[u32], x: &[i64]) -> i64 {
    e.iter().zip(x).map(|(&p, &v)| v.pow(p)).product()
}

/// Exponent vectors of total degree `<= deg` in `vars` variables, ordered by
/// degree and then lexicographically with the first variable largest.
pub fn monomial_basis(vars: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=deg {
        let mut level = Vec::new();
        fn rec(k: usize, vars: usize, rest: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if k + 1 == vars {
                cur.push(rest);
                out.push(cur.clone());
                cur.pop();
                return;
            }
            for p in (0..=rest).rev() {
                cur.push(p);
                rec(k + 1, vars, rest - p, cur, out);
                cur.pop();
            }
        }
        if vars == 0 {
            if total == 0 {
                level.push(Vec::new());
            }
        } else {
            rec(0, vars, total, &mut Vec::new(), &mut level);
        }
        out.extend(level);
    }
    out
}

/// Incrementally reduced row basis over the rationals.
struct RowBasis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl RowBasis {
    /// Adds `row` if it is independent of the current rows.
    fn insert(&mut self, mut row: Vec<Rational>) -> bool {
        for (pivot, b) in &self.rows {
            if !row[*pivot].is_zero() {
                let factor = row[*pivot].clone();
                for (x, y) in row.iter_mut().zip(b) {
                    *x = &*x - &(&factor * y);
                }
            }
        }
        match row.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                let inv = row[p].recip().expect("nonzero pivot");
                for x in row.iter_mut() {
                    *x = &*x * &inv;
                }
                for (_, b) in self.rows.iter_mut() {
                    if !b[p].is_zero() {
                        let factor = b[p].clone();
                        for (x, y) in b.iter_mut().zip(&row) {
                            *x = &*x - &(&factor * y);
                        }
                    }
                }
                self.rows.push((p, row));
                true
            }
            None => false,
        }
    }
}

/// Solves the square system `a x = b` exactly.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].recip().ok()?;
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&factor * y);
                }
                b[r] = &b[r] - &(&factor * &b[col]);
            }
        }
    }
    Some(b)
}

fn compositions(d: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if d == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return if d >= 1 { vec![vec![d]] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..d {
        for mut rest in compositions(d - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// A sample point `(mu, nu)` in the coordinates of [`Polynomial`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplePoint {
    pub mu: Vec<u32>,
    pub nu: Vec<u32>,
}

impl SamplePoint {
    pub fn coords(&self) -> Vec<i64> {
        let n = self.nu.len();
        self.mu.iter().chain(&self.nu[..n - 1]).map(|&x| x as i64).collect()
    }

    pub fn value(&self, g: u32) -> Result<Rational> {
        let p = HurwitzParams::new(g, &self.mu, &self.nu)?;
        Ok(count_hurwitz_permutation(&p))
    }
}

/// All off-wall points with `d <= dmax`, most distant from the walls first.
fn candidates(m: usize, n: usize, dmax: u32, ws: &[Wall]) -> Vec<(Vec<Sign>, SamplePoint)> {
    let mut out = Vec::new();
    for d in 1..=dmax {
        for mu in compositions(d, m) {
            for nu in compositions(d, n) {
                if let Ok(signs) = chamber_of(&mu, &nu, ws) {
                    out.push((signs, SamplePoint { mu: mu.clone(), nu }));
                }
            }
        }
    }
    let distance = |p: &SamplePoint| ws.iter().map(|w| w.eval(&p.mu, &p.nu).abs()).min().unwrap_or(i64::MAX);
    out.sort_by(|(_, a), (_, b)| {
        distance(b)
            .cmp(&distance(a))
            .then_with(|| a.mu.iter().sum::<u32>().cmp(&b.mu.iter().sum::<u32>()))
            .then_with(|| (&a.mu, &a.nu).cmp(&(&b.mu, &b.nu)))
    });
    out
}

/// Sign vectors of every chamber that contains a point with `d <= dmax`.
pub fn chambers(m: usize, n: usize, dmax: u32) -> Vec<Vec<Sign>> {
    let ws = walls(m, n);
    candidates(m, n, dmax, &ws)
        .into_iter()
        .map(|(s, _)| s)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChamberPolynomial {
    pub signs: Vec<Sign>,
    pub poly: Polynomial,
    /// total degree of the fitted polynomial; `None` for the zero polynomial
    pub degree: Option<u32>,
    pub samples_used: usize,
    pub holdout_size: usize,
    /// first hold-out point where the fit disagrees, with expected and fitted values
    pub counterexample: Option<(SamplePoint, Rational, Rational)>,
}

impl ChamberPolynomial {
    pub fn holdout_passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn check_genus(g: u32, m: usize, n: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(HurwitzError::InvalidPartition("m and n must be positive".into()));
    }
    let r = 2 * g as i64 - 2 + m as i64 + n as i64;
    match r {
        r if r < 0 => Err(HurwitzError::NegativeR(r)),
        0 => Err(HurwitzError::RZero),
        r => Ok(r as usize),
    }
}

/// Fits `H_g` on one chamber and tests the fit on up to `holdout` further
/// points. A failed hold-out is recorded in `counterexample`.
pub fn fit_chamber(g: u32, m: usize, n: usize, signs: &[Sign], dmax: u32, holdout: usize) -> Result<ChamberPolynomial> {
    check_genus(g, m, n)?;
    let ws = walls(m, n);
    if signs.len() != ws.len() {
        return Err(HurwitzError::InsufficientSamples("sign vector does not match the walls".into()));
    }
    let deg = HurwitzParams::polynomial_degree_bound(g, m, n).max(0) as u32;
    let basis = monomial_basis(m + n - 1, deg);
    let row = |p: &SamplePoint| -> Vec<Rational> {
        let x = p.coords();
        basis.iter().map(|e| Rational::from(monomial(e, &x))).collect()
    };
    let mut fit_points = Vec::new();
    let mut rest = Vec::new();
    let mut reduced = RowBasis { rows: Vec::new() };
    for (s, p) in candidates(m, n, dmax, &ws) {
        if s != signs {
            continue;
        }
        if fit_points.len() < basis.len() && reduced.insert(row(&p)) {
            fit_points.push(p);
        } else if rest.len() < holdout {
            rest.push(p);
        }
    }
    if fit_points.len() < basis.len() {
        return Err(HurwitzError::InsufficientSamples(format!(
            "chamber {signs:?} has rank {} < {} monomials with d <= {dmax}",
            fit_points.len(),
            basis.len()
        )));
    }
    if rest.is_empty() {
        return Err(HurwitzError::InsufficientSamples(format!("no hold-out points in chamber {signs:?}")));
    }
    let values: Vec<Rational> = fit_points
        .par_iter()
        .map(|p| p.value(g))
        .collect::<Result<_>>()?;
    let a = fit_points.iter().map(row).collect();
    let coeffs = solve(a, values).ok_or_else(|| HurwitzError::InsufficientSamples("singular system".into()))?;
    let poly = Polynomial {
        m,
        n,
        terms: basis.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).collect(),
    };
    let held: Vec<Rational> = rest.par_iter().map(|p| p.value(g)).collect::<Result<_>>()?;
    let counterexample = rest
        .iter()
        .zip(held)
        .map(|(p, v)| (p, v, poly.eval(&p.coords())))
        .find(|(_, v, got)| v != got)
        .map(|(p, v, got)| (p.clone(), v, got));
    Ok(ChamberPolynomial {
        signs: signs.to_vec(),
        degree: poly.degree(),
        poly,
        samples_used: fit_points.len(),
        holdout_size: rest.len(),
        counterexample,
    })
}

/// [`fit_chamber`] with a failed hold-out turned into [`HurwitzError::FitFailed`].
pub fn fit_chamber_polynomial(g: u32, m: usize, n: usize, signs: &[Sign], dmax: u32) -> Result<ChamberPolynomial> {
    let cp = fit_chamber(g, m, n, signs, dmax, DEFAULT_HOLDOUT)?;
    if let Some((p, expected, got)) = &cp.counterexample {
        let mut point: Vec<i64> = p.mu.iter().map(|&x| x as i64).collect();
        point.extend(p.nu.iter().map(|&x| x as i64));
        return Err(HurwitzError::FitFailed { point, expected: expected.to_string(), got: got.to_string() });
    }
    Ok(cp)
}

pub const DEFAULT_HOLDOUT: usize = 16;

/// Whether the fitted degree respects `4g - 3 + m + n`.
pub fn degree_check(cp: &ChamberPolynomial, g: u32, m: usize, n: usize) -> bool {
    let bound = HurwitzParams::polynomial_degree_bound(g, m, n);
    cp.degree.map_or(true, |d| d as i64 <= bound)
}

#[derive(Serialize)]
pub struct CoefficientJson {
    pub monomial: String,
    pub coefficient: Rational,
}

#[derive(Serialize)]
pub struct ChamberJson {
    pub signs: Vec<Sign>,
    pub degree: Option<u32>,
    pub degree_bound: i64,
    pub coefficients: Vec<CoefficientJson>,
    pub samples_used: usize,
    pub holdout_size: usize,
    pub holdout_passed: bool,
}

#[derive(Serialize)]
pub struct ChambersReport {
    pub g: u32,
    pub m: usize,
    pub n: usize,
    pub walls: Vec<Wall>,
    pub chambers: Vec<ChamberJson>,
}

impl ChambersReport {
    pub fn all_passed(&self) -> bool {
        self.chambers.iter().all(|c| c.holdout_passed)
    }
}

/// Fits every chamber reachable with `d <= dmax`.
pub fn chambers_report(g: u32, m: usize, n: usize, dmax: u32) -> Result<ChambersReport> {
    check_genus(g, m, n)?;
    let bound = HurwitzParams::polynomial_degree_bound(g, m, n);
    let mut out = Vec::new();
    for signs in chambers(m, n, dmax) {
        let cp = fit_chamber(g, m, n, &signs, dmax, DEFAULT_HOLDOUT)?;
        out.push(ChamberJson {
            degree: cp.degree,
            degree_bound: bound,
            coefficients: cp
                .poly
                .terms
                .iter()
                .map(|(e, c)| CoefficientJson { monomial: cp.poly.monomial_name(e), coefficient: c.clone() })
                .collect(),
            samples_used: cp.samples_used,
            holdout_size: cp.holdout_size,
            holdout_passed: cp.holdout_passed(),
            signs,
        });
    }
    Ok(ChambersReport { g, m, n, walls: walls(m, n), chambers: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_examples() {
        assert!(walls(1, 1).is_empty());
        assert!(walls(2, 1).is_empty());
        let w = walls(2, 2);
        assert_eq!(w.iter().map(|w| w.to_string()).collect::<Vec<_>>(), vec!["mu1 = nu1", "mu1 = nu2"]);
        // 7 proper nonempty I with 1 in I for m = 3 is 3, times 2 proper nonempty J for n = 2
        assert_eq!(walls(3, 2).len(), 6);
    }

    #[test]
    fn chamber_signs() {
        let w = walls(2, 2);
        assert_eq!(chamber_of(&[3, 1], &[2, 2], &w).unwrap(), vec![Sign::Greater, Sign::Greater]);
        assert_eq!(chamber_of(&[1, 3], &[2, 2], &w).unwrap(), vec![Sign::Less, Sign::Less]);
        assert!(matches!(chamber_of(&[2, 2], &[2, 2], &w), Err(HurwitzError::OnWall(_))));
    }

    #[test]
    fn basis_order() {
        assert_eq!(monomial_basis(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(monomial_basis(0, 3), vec![Vec::<u32>::new()]);
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(HurwitzParams::polynomial_degree_bound(0, 2, 2), 1);
        assert_eq!(HurwitzParams::polynomial_degree_bound(1, 1, 1), 3);
        assert_eq!(HurwitzParams::polynomial_degree_bound(1, 2, 2), 5);
    }

    #[test]
    fn planar_two_two_fits() {
        let all = chambers(2, 2, 10);
        assert_eq!(all.len(), 4);
        let mut polys = Vec::new();
        for signs in &all {
            let cp = fit_chamber_polynomial(0, 2, 2, signs, 10).unwrap();
            assert!(degree_check(&cp, 0, 2, 2));
            // a second grid gives the same polynomial
            let small = fit_chamber_polynomial(0, 2, 2, signs, 8).unwrap();
            assert_eq!(cp.poly, small.poly);
            polys.push(cp.poly);
        }
        assert!(polys.iter().unique_by(|p| p.to_string()).count() > 1);
    }

    #[test]
    fn single_chamber_for_one_sink() {
        let all = chambers(2, 1, 10);
        assert_eq!(all, vec![Vec::<Sign>::new()]);
        let cp = fit_chamber_polynomial(0, 2, 1, &[], 10).unwrap();
        assert!(cp.degree.unwrap() <= 1);
    }

    #[test]
    fn degenerate_family_rejected() {
        assert_eq!(chambers_report(0, 1, 1, 10).err(), Some(HurwitzError::RZero));
    }
}
