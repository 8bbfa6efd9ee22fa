//! General combinatorial maps: a rotation permutation (counterclockwise order
//! of darts around each vertex) and a fixed-point-free edge involution.

use crate::error::{HurwitzError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombinatorialMap {
    rotation: Vec<usize>,
    involution: Vec<usize>,
}

fn orbits(step: impl Fn(usize) -> usize, n: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            orbit.push(x);
            x = step(x);
        }
        out.push(orbit);
    }
    out
}

impl CombinatorialMap {
    /// 0-based `rotation` and `involution` over the same dart set.
    pub fn new(rotation: Vec<usize>, involution: Vec<usize>) -> Result<Self> {
        let n = rotation.len();
        if involution.len() != n {
            return Err(HurwitzError::InvalidMap("rotation and involution sizes differ".into()));
        }
        let is_perm = |p: &[usize]| {
            let mut seen = vec![false; n];
            p.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        if !is_perm(&rotation) || !is_perm(&involution) {
            return Err(HurwitzError::InvalidMap("not a permutation".into()));
        }
        if (0..n).any(|x| involution[x] == x || involution[involution[x]] != x) {
            return Err(HurwitzError::InvalidMap(
                "edge involution must be fixed-point free".into(),
            ));
        }
        Ok(CombinatorialMap { rotation, involution })
    }

    pub fn num_darts(&self) -> usize {
        self.rotation.len()
    }

    pub fn rotation(&self) -> &[usize] {
        &self.rotation
    }

    pub fn involution(&self) -> &[usize] {
        &self.involution
    }

    /// The face permutation `rotation ∘ involution`.
    pub fn face_step(&self, x: usize) -> usize {
        self.rotation[self.involution[x]]
    }

    pub fn vertices(&self) -> Vec<Vec<usize>> {
        orbits(|x| self.rotation[x], self.num_darts())
    }

    pub fn edges(&self) -> Vec<Vec<usize>> {
        orbits(|x| self.involution[x], self.num_darts())
    }

    /// Orbits of `rotation ∘ involution`; every dart lies in exactly one.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        orbits(|x| self.face_step(x), self.num_darts())
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_darts();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for y in [self.rotation[x], self.involution[x]] {
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices().len() as i64 - self.edges().len() as i64 + self.faces().len() as i64
    }

    /// `g` with `V - E + F = 2 - 2g`.
    pub fn genus(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(HurwitzError::InvalidMap("genus of a disconnected map".into()));
        }
        let chi = self.euler_characteristic();
        if chi % 2 != 0 {
            return Err(HurwitzError::NonIntegerGenus(chi));
        }
        if chi > 2 {
            return Err(HurwitzError::InvalidMap(format!("Euler characteristic {chi} > 2")));
        }
        Ok(((2 - chi) / 2) as u32)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge_on_sphere() {
        let map = CombinatorialMap::new(vec![0, 1], vec![1, 0]).unwrap();
        assert_eq!(map.faces().len(), 1);
        assert_eq!(map.genus().unwrap(), 0);
    }

    #[test]
    fn loop_on_sphere() {
        let map = CombinatorialMap::new(vec![1, 0], vec![1, 0]).unwrap();
        assert_eq!(map.faces().len(), 2);
        assert_eq!((map.vertices().len(), map.edges().len()), (1, 1));
        assert_eq!(map.genus().unwrap(), 0);
    }

    #[test]
    fn torus_from_one_vertex_two_loops() {
        // rotation (a b a' b') with a~a', b~b'
        let map = CombinatorialMap::new(vec![1, 2, 3, 0], vec![2, 3, 0, 1]).unwrap();
        assert_eq!(map.faces().len(), 1);
        assert_eq!(map.genus().unwrap(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CombinatorialMap::new(vec![0, 1], vec![0, 1]).is_err());
        let disconnected = CombinatorialMap::new(vec![0, 1, 2, 3], vec![1, 0, 3, 2]).unwrap();
        assert!(disconnected.genus().is_err());
    }
}
