//! Finite groups that word measures live on: an algebra g(R) under
//! addition, or SL_n(R) under multiplication. Elements are `u64` keys.

use crate::chevalley::{ChevalleyAlgebra, FiniteGroup};
use crate::error::{check_budget, Error, Result};
use crate::matrix::Mat;
use crate::ring::Ring;

pub trait Carrier: Send + Sync {
    /// Identifies the carrier; measures on different labels never mix.
    fn label(&self) -> String;
    fn order(&self) -> u64;
    fn identity(&self) -> u64;
    fn op(&self, a: u64, b: u64) -> u64;
    fn inv(&self, a: u64) -> u64;
    fn format(&self, a: u64) -> String;
    /// Dimension of the carrier as a scheme over Q.
    fn dim(&self) -> usize;
    fn is_abelian(&self) -> bool;
}

/// g(R) with key Σ c_i |R|^i on basis coordinates.
#[derive(Debug, Clone)]
pub struct ModuleCarrier {
    pub alg: ChevalleyAlgebra,
    pub ring: Ring,
    radix: u64,
    order: u64,
}

impl ModuleCarrier {
    pub fn new(alg: ChevalleyAlgebra, ring: Ring) -> Result<ModuleCarrier> {
        let radix = ring.size();
        let order = (radix as u128).checked_pow(alg.dim as u32).filter(|&o| o <= 1u128 << 62);
        let Some(order) = order else {
            return Err(Error::Budget { needed: u128::MAX, budget: 1 << 62 });
        };
        Ok(ModuleCarrier { alg, ring, radix, order: order as u64 })
    }

    pub fn encode(&self, coords: &[u64]) -> u64 {
        coords.iter().rev().fold(0, |acc, &c| acc * self.radix + c)
    }

    pub fn decode(&self, mut key: u64) -> Vec<u64> {
        (0..self.alg.dim)
            .map(|_| {
                let c = key % self.radix;
                key /= self.radix;
                c
            })
            .collect()
    }
}

impl Carrier for ModuleCarrier {
    fn label(&self) -> String {
        format!("{}/{}", self.alg.literal(), self.ring.literal())
    }
    fn order(&self) -> u64 {
        self.order
    }
    fn identity(&self) -> u64 {
        0
    }
    fn op(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u64> = x.iter().zip(&y).map(|(&u, &v)| self.ring.add(u, v)).collect();
        self.encode(&s)
    }
    fn inv(&self, a: u64) -> u64 {
        let x: Vec<u64> = self.decode(a).iter().map(|&u| self.ring.neg(u)).collect();
        self.encode(&x)
    }
    fn format(&self, a: u64) -> String {
        let parts: Vec<String> = self.decode(a).iter().map(|&c| self.ring.format(c)).collect();
        format!("({})", parts.join(","))
    }
    fn dim(&self) -> usize {
        self.alg.dim
    }
    fn is_abelian(&self) -> bool {
        true
    }
}

/// An enumerated SL_n(R); keys are element indices.
#[derive(Debug, Clone)]
pub struct GroupCarrier {
    pub group: FiniteGroup,
}

impl GroupCarrier {
    pub fn new(n: usize, ring: &Ring, budget: u64) -> Result<GroupCarrier> {
        let g = crate::chevalley::group_make(n, ring)?;
        check_budget(g.order(), budget)?;
        Ok(GroupCarrier { group: g.enumerate(budget)? })
    }

    pub fn element(&self, key: u64) -> &Mat {
        &self.group.elements[key as usize]
    }

    pub fn key_of(&self, m: &Mat) -> Option<u64> {
        self.group.index_of(m).map(u64::from)
    }
}

impl Carrier for GroupCarrier {
    fn label(&self) -> String {
        format!("{}/{}", self.group.group.literal(), self.group.group.ring.literal())
    }
    fn order(&self) -> u64 {
        self.group.len() as u64
    }
    fn identity(&self) -> u64 {
        self.group.identity as u64
    }
    fn op(&self, a: u64, b: u64) -> u64 {
        self.group.mul(a as u32, b as u32) as u64
    }
    fn inv(&self, a: u64) -> u64 {
        self.group.inv(a as u32) as u64
    }
    fn format(&self, a: u64) -> String {
        let m = self.element(a);
        let ring = &self.group.group.ring;
        let rows: Vec<String> = (0..m.n).map(|i| (0..m.n).map(|j| ring.format(m.get(i, j))).collect::<Vec<_>>().join(",")).collect();
        format!("[{}]", rows.join(";"))
    }
    fn dim(&self) -> usize {
        self.group.group.n * self.group.group.n - 1
    }
    fn is_abelian(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_keys() {
        let c = ModuleCarrier::new(ChevalleyAlgebra::parse("A:1").unwrap(), Ring::parse("fp:3", None).unwrap()).unwrap();
        assert_eq!(c.order(), 27);
        for a in 0..27 {
            assert_eq!(c.encode(&c.decode(a)), a);
            assert_eq!(c.op(a, c.inv(a)), 0);
        }
        assert_eq!(c.format(c.encode(&[1, 0, 2])), "(1,0,2)");
    }

    #[test]
    fn group_keys() {
        let ring = Ring::parse("fp:3", None).unwrap();
        let c = GroupCarrier::new(2, &ring, 1 << 20).unwrap();
        assert_eq!(c.order(), 24);
        let e = c.identity();
        assert_eq!(c.format(e), "[1,0;0,1]");
        for a in 0..24 {
            assert_eq!(c.op(a, c.inv(a)), e);
        }
        assert!(GroupCarrier::new(3, &ring, 100).unwrap_err().is_budget());
    }
}
