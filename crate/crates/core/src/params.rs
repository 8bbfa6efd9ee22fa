//! Partitions and validated Hurwitz parameters `(g, mu, nu)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HurwitzError, Result};

/// An ordered tuple of positive parts. Part `i` is a label, so `(2,1)` and
/// `(1,2)` are different partitions.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.is_empty() {
            return Err(HurwitzError::InvalidPartition("no parts".into()));
        }
        if parts.iter().any(|&p| p == 0) {
            return Err(HurwitzError::InvalidPartition(format!(
                "parts must be positive, got {parts:?}"
            )));
        }
        Ok(Partition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    /// Same parts in descending order.
    pub fn sorted_desc(&self) -> Partition {
        let mut parts = self.0.clone();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    /// All partitions of `d` with parts in descending order, in reverse
    /// lexicographic order (largest first part first).
    pub fn all_of(d: u32) -> Vec<Partition> {
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if d > 0 {
            rec(d, d, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", s.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Partition {
    type Err = HurwitzError;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| HurwitzError::Parse(format!("bad partition part {t:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Validated `(g, mu, nu)` together with the derived `d, m, n, r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct HurwitzParams {
    pub g: u32,
    pub mu: Partition,
    pub nu: Partition,
    pub d: u32,
    pub m: usize,
    pub n: usize,
    pub r: usize,
}

pub fn hurwitz_params(g: u32, mu: Partition, nu: Partition) -> Result<HurwitzParams> {
    if mu.sum() != nu.sum() {
        return Err(HurwitzError::DegreeMismatch {
            mu: mu.sum(),
            nu: nu.sum(),
        });
    }
    let (m, n) = (mu.len(), nu.len());
    let r = 2 * g as i64 - 2 + m as i64 + n as i64;
    if r < 0 {
        return Err(HurwitzError::NegativeR(r));
    }
    Ok(HurwitzParams {
        g,
        d: mu.sum() as u32,
        mu,
        nu,
        m,
        n,
        r: r as usize,
    })
}

impl HurwitzParams {
    pub fn new(g: u32, mu: &[u32], nu: &[u32]) -> Result<Self> {
        hurwitz_params(g, Partition::new(mu.to_vec())?, Partition::new(nu.to_vec())?)
    }

    /// Genus determined by `r = 2g - 2 + m + n`, if it is a nonnegative integer.
    pub fn genus_for(m: usize, n: usize, r: usize) -> Option<u32> {
        let twice = r as i64 + 2 - m as i64 - n as i64;
        (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32)
    }

    /// Upper bound on the degree of the chamber polynomials, `4g - 3 + m + n`.
    pub fn polynomial_degree_bound(g: u32, m: usize, n: usize) -> i64 {
        4 * g as i64 - 3 + m as i64 + n as i64
    }

    /// Every `(g, mu, nu)` with `mu, nu` descending partitions of `d <= max_d`
    /// and `min_r <= r <= max_r`, ordered by `d`, then `g`, then partitions.
    pub fn sweep(max_d: u32, min_r: usize, max_r: usize) -> Vec<HurwitzParams> {
        let mut out = Vec::new();
        for d in 1..=max_d {
            let parts = Partition::all_of(d);
            for g in 0..=(max_r as u32 / 2 + 1) {
                for mu in &parts {
                    for nu in &parts {
                        if let Ok(p) = hurwitz_params(g, mu.clone(), nu.clone()) {
                            if p.r >= min_r && p.r <= max_r {
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for HurwitzParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g={} mu=({}) nu=({})", self.g, self.mu, self.nu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn params_examples() {
        let p = HurwitzParams::new(0, &[1, 1], &[2]).unwrap();
        assert_eq!((p.d, p.m, p.n, p.r), (2, 2, 1, 1));
        let p = HurwitzParams::new(1, &[2], &[2]).unwrap();
        assert_eq!((p.d, p.m, p.n, p.r), (2, 1, 1, 2));
        let p = HurwitzParams::new(0, &[4, 4], &[5, 3]).unwrap();
        assert_eq!((p.d, p.m, p.n, p.r), (8, 2, 2, 2));
    }

    #[test]
    fn params_errors() {
        assert_eq!(
            HurwitzParams::new(0, &[3], &[2]),
            Err(HurwitzError::DegreeMismatch { mu: 3, nu: 2 })
        );
        // r = 0 is accepted
        assert_eq!(HurwitzParams::new(0, &[3], &[3]).unwrap().r, 0);
        assert!(matches!(Partition::new(vec![]), Err(HurwitzError::InvalidPartition(_))));
        assert!(matches!(Partition::new(vec![2, 0]), Err(HurwitzError::InvalidPartition(_))));
    }

    #[test]
    fn partition_io() {
        let p: Partition = "2,1".parse().unwrap();
        assert_eq!(p.parts(), &[2, 1]);
        assert_eq!(p.to_string(), "2,1");
        assert!("2,,1".parse::<Partition>().is_err());
        assert_eq!(Partition::all_of(4).len(), 5);
        assert_eq!(Partition::all_of(5).len(), 7);
    }

    proptest! {
        #[test]
        fn euler_form_of_r(g in 0u32..4, mu in prop::collection::vec(1u32..4, 1..4)) {
            let d: u32 = mu.iter().sum();
            let nu = vec![d];
            let p = HurwitzParams::new(g, &mu, &nu).unwrap();
            prop_assert_eq!(p.m as i64 + p.n as i64 - p.r as i64, 2 - 2 * g as i64);
        }
    }
}
