//! Finite abelian p-groups presented as products of cyclic p-power groups,
//! their elements, componentwise subgroups, and exact multibinomial
//! coefficients.
//!
//! A group is `Z_{p^{r_1}} x ... x Z_{p^{r_m}}`; elements are residue vectors
//! with `residues[j]` reduced into `[0, p^{r_j})`. Subgroups of the form
//! `prod_j p^{e_j} Z_{p^{r_j}}` are the only general subgroups supported;
//! structure-group quotients use F_p-subspaces from [`crate::fp`] instead.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::Arc;

/// Total exponent cap: group order is p^(sum r_j) and must stay desk-sized.
pub const MAX_TOTAL_EXPONENT: u32 = 40;

#[derive(Debug, PartialEq, Eq, Hash)]
struct GroupRepr {
    p: u64,
    orders: Vec<u32>,
    /// p^{r_j} per component, precomputed.
    moduli: Vec<u64>,
}

/// `prod_j Z_{p^{r_j}}` for a fixed prime p. Cheap to clone (shared repr).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteAbelianPGroup(Arc<GroupRepr>);

impl fmt::Debug for FiniteAbelianPGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[")?;
        for (j, r) in self.orders().iter().enumerate() {
            if j > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{}^{}", self.p(), r)?;
        }
        write!(f, "]")
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FiniteAbelianPGroup {
    pub fn new(p: u64, orders: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::precondition(format!("{p} is not prime")));
        }
        if orders.iter().any(|&r| r == 0) {
            return Err(Error::precondition("every component exponent must be >= 1"));
        }
        let total: u32 = orders.iter().sum();
        if total > MAX_TOTAL_EXPONENT {
            return Err(Error::CapExceeded {
                what: "total exponent",
                got: total as u128,
                cap: MAX_TOTAL_EXPONENT as u128,
            });
        }
        let mut moduli = Vec::with_capacity(orders.len());
        for &r in &orders {
            let mut m: u64 = 1;
            for _ in 0..r {
                m = m.checked_mul(p).ok_or(Error::CapExceeded {
                    what: "component modulus",
                    got: u128::MAX,
                    cap: u64::MAX as u128,
                })?;
            }
            moduli.push(m);
        }
        Ok(FiniteAbelianPGroup(Arc::new(GroupRepr { p, orders, moduli })))
    }

    /// The trivial group (empty product) over p.
    pub fn trivial(p: u64) -> Result<Self> {
        Self::new(p, Vec::new())
    }

    /// The cyclic group Z_{p^r}.
    pub fn cyclic(p: u64, r: u32) -> Result<Self> {
        Self::new(p, vec![r])
    }

    /// Z_p^n, the elementary abelian case.
    pub fn elementary(p: u64, n: usize) -> Result<Self> {
        Self::new(p, vec![1; n])
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn orders(&self) -> &[u32] {
        &self.0.orders
    }

    pub fn num_components(&self) -> usize {
        self.0.orders.len()
    }

    pub fn component_modulus(&self, j: usize) -> u64 {
        self.0.moduli[j]
    }

    pub fn moduli(&self) -> &[u64] {
        &self.0.moduli
    }

    pub fn order(&self) -> u128 {
        self.0.moduli.iter().map(|&m| m as u128).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.orders.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.0.orders.len() <= 1
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            group: self.clone(),
            residues: vec![0; self.num_components()],
        }
    }

    /// Build an element, reducing each entry into canonical range.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.num_components() {
            return Err(Error::precondition(format!(
                "element has {} residues, group has {} components",
                residues.len(),
                self.num_components()
            )));
        }
        let reduced = residues
            .iter()
            .zip(self.moduli())
            .map(|(&x, &m)| (x.rem_euclid(m as i64)) as u64)
            .collect();
        Ok(GroupElement {
            group: self.clone(),
            residues: reduced,
        })
    }

    /// Standard generator of component j.
    pub fn generator(&self, j: usize) -> GroupElement {
        let mut residues = vec![0; self.num_components()];
        residues[j] = 1 % self.component_modulus(j);
        GroupElement {
            group: self.clone(),
            residues,
        }
    }

    /// Mixed-radix index of an element, component 0 least significant.
    /// This order is frozen; tables and test vectors depend on it.
    pub fn index_of(&self, x: &GroupElement) -> u128 {
        debug_assert_eq!(&x.group, self);
        let mut idx: u128 = 0;
        for j in (0..self.num_components()).rev() {
            idx = idx * self.component_modulus(j) as u128 + x.residues[j] as u128;
        }
        idx
    }

    pub fn element_at(&self, mut idx: u128) -> GroupElement {
        let mut residues = vec![0u64; self.num_components()];
        for j in 0..self.num_components() {
            let m = self.component_modulus(j) as u128;
            residues[j] = (idx % m) as u64;
            idx /= m;
        }
        GroupElement {
            group: self.clone(),
            residues,
        }
    }

    /// All elements in index order. Errors if the group is larger than `cap`.
    pub fn elements(&self, cap: u128) -> Result<Vec<GroupElement>> {
        let n = self.order();
        if n > cap {
            return Err(Error::CapExceeded {
                what: "group order",
                got: n,
                cap,
            });
        }
        Ok((0..n).map(|i| self.element_at(i)).collect())
    }

    /// Product group: components of `self` followed by components of `other`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.p() != other.p() {
            return Err(Error::mismatch(format!(
                "cannot form product over different primes {} and {}",
                self.p(),
                other.p()
            )));
        }
        let mut orders = self.orders().to_vec();
        orders.extend_from_slice(other.orders());
        Self::new(self.p(), orders)
    }
}

/// Element of a [`FiniteAbelianPGroup`] as a canonical residue vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    group: FiniteAbelianPGroup,
    residues: Vec<u64>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, r) in self.residues.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl GroupElement {
    pub fn group(&self) -> &FiniteAbelianPGroup {
        &self.group
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }

    fn check_same_group(&self, other: &GroupElement) -> Result<()> {
        if self.group != other.group {
            return Err(Error::mismatch(format!(
                "elements of {:?} and {:?}",
                self.group, other.group
            )));
        }
        Ok(())
    }

    /// Componentwise sum reduced mod p^{r_j}.
    pub fn add(&self, other: &GroupElement) -> Result<GroupElement> {
        self.check_same_group(other)?;
        let residues = self
            .residues
            .iter()
            .zip(&other.residues)
            .zip(self.group.moduli())
            .map(|((&a, &b), &m)| {
                let s = a + b;
                if s >= m {
                    s - m
                } else {
                    s
                }
            })
            .collect();
        Ok(GroupElement {
            group: self.group.clone(),
            residues,
        })
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(&a, &m)| if a == 0 { 0 } else { m - a })
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// n*a with n reduced mod each component order.
    pub fn scalar(&self, n: i64) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(&a, &m)| {
                let nm = n.rem_euclid(m as i64) as u64;
                ((a as u128 * nm as u128) % m as u128) as u64
            })
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// Exact scalar action by a big integer (multibinomial coefficients).
    pub fn scalar_big(&self, n: &BigInt) -> GroupElement {
        let residues = self
            .residues
            .iter()
            .zip(self.group.moduli())
            .map(|(&a, &m)| {
                let nm = big_mod_u64(n, m);
                ((a as u128 * nm as u128) % m as u128) as u64
            })
            .collect();
        GroupElement {
            group: self.group.clone(),
            residues,
        }
    }

    /// Additive order of the element (a p-power).
    pub fn order(&self) -> u64 {
        let p = self.group.p();
        self.residues
            .iter()
            .zip(self.group.moduli())
            .map(|(&a, &m)| {
                if a == 0 {
                    1
                } else {
                    // order of a in Z_m is m / gcd(a, m); both are p-powers
                    let mut g = a;
                    let mut o = m;
                    while g % p == 0 && o % p == 0 {
                        g /= p;
                        o /= p;
                    }
                    o
                }
            })
            .max()
            .unwrap_or(1)
    }
}

/// `prod_j p^{e_j} Z_{p^{r_j}}`, stored as the exponent vector.
///
/// The lattice operations are componentwise: intersection is the max of
/// exponents, containment is pointwise comparison.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComponentwiseSubgroup {
    exponents: Vec<u32>,
}

impl fmt::Debug for ComponentwiseSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{:?}", self.exponents)
    }
}

impl ComponentwiseSubgroup {
    pub fn new(group: &FiniteAbelianPGroup, exponents: Vec<u32>) -> Result<Self> {
        if exponents.len() != group.num_components() {
            return Err(Error::precondition(
                "subgroup exponent vector length must match group",
            ));
        }
        for (&e, &r) in exponents.iter().zip(group.orders()) {
            if e > r {
                return Err(Error::precondition(format!(
                    "subgroup exponent {e} exceeds component order {r}"
                )));
            }
        }
        Ok(ComponentwiseSubgroup { exponents })
    }

    pub fn full(group: &FiniteAbelianPGroup) -> Self {
        ComponentwiseSubgroup {
            exponents: vec![0; group.num_components()],
        }
    }

    pub fn zero(group: &FiniteAbelianPGroup) -> Self {
        ComponentwiseSubgroup {
            exponents: group.orders().to_vec(),
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn is_zero(&self, group: &FiniteAbelianPGroup) -> bool {
        self.exponents
            .iter()
            .zip(group.orders())
            .all(|(&e, &r)| e == r)
    }

    /// x is a member iff p^{e_j} divides residues[j] for all j.
    pub fn contains(&self, group: &FiniteAbelianPGroup, x: &GroupElement) -> bool {
        debug_assert_eq!(x.group(), group);
        x.residues()
            .iter()
            .zip(&self.exponents)
            .all(|(&a, &e)| a % group.p().pow(e) == 0)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(&a, &b)| a.max(b))
            .collect();
        ComponentwiseSubgroup { exponents }
    }

    /// True iff self >= other as subgroups (self contains other).
    pub fn contains_subgroup(&self, other: &Self) -> bool {
        self.exponents
            .iter()
            .zip(&other.exponents)
            .all(|(&a, &b)| a <= b)
    }

    pub fn order(&self, group: &FiniteAbelianPGroup) -> u128 {
        self.exponents
            .iter()
            .zip(group.orders())
            .map(|(&e, &r)| (group.p() as u128).pow(r - e))
            .product()
    }

    /// The subgroup p * self.
    pub fn times_p(&self, group: &FiniteAbelianPGroup) -> Self {
        let exponents = self
            .exponents
            .iter()
            .zip(group.orders())
            .map(|(&e, &r)| (e + 1).min(r))
            .collect();
        ComponentwiseSubgroup { exponents }
    }

    /// Generators p^{e_j} * e_j of the subgroup (skipping trivial components).
    pub fn generators(&self, group: &FiniteAbelianPGroup) -> Vec<GroupElement> {
        (0..group.num_components())
            .filter(|&j| self.exponents[j] < group.orders()[j])
            .map(|j| group.generator(j).scalar(group.p().pow(self.exponents[j]) as i64))
            .collect()
    }

    /// All subgroup elements in a deterministic mixed-radix order.
    pub fn elements(&self, group: &FiniteAbelianPGroup, cap: u128) -> Result<Vec<GroupElement>> {
        let n = self.order(group);
        if n > cap {
            return Err(Error::CapExceeded {
                what: "subgroup order",
                got: n,
                cap,
            });
        }
        let radices: Vec<u64> = self
            .exponents
            .iter()
            .zip(group.orders())
            .map(|(&e, &r)| group.p().pow(r - e))
            .collect();
        let steps: Vec<u64> = self
            .exponents
            .iter()
            .map(|&e| group.p().pow(e))
            .collect();
        let mut out = Vec::with_capacity(n as usize);
        let mut counter = vec![0u64; radices.len()];
        loop {
            let residues: Vec<u64> = counter
                .iter()
                .zip(&steps)
                .map(|(&c, &s)| c * s)
                .collect();
            out.push(GroupElement {
                group: group.clone(),
                residues,
            });
            // odometer increment, component 0 fastest
            let mut j = 0;
            loop {
                if j == counter.len() {
                    return Ok(out);
                }
                counter[j] += 1;
                if counter[j] < radices[j] {
                    break;
                }
                counter[j] = 0;
                j += 1;
            }
        }
    }

    /// The quotient self / other (other must be contained in self), in
    /// invariant-factor form: cyclic factors sorted by descending order,
    /// trivial factors dropped.
    pub fn quotient_group(
        &self,
        group: &FiniteAbelianPGroup,
        other: &Self,
    ) -> Result<FiniteAbelianPGroup> {
        if !self.contains_subgroup(other) {
            return Err(Error::precondition(
                "quotient requires the denominator to be a subgroup of the numerator",
            ));
        }
        let mut factors: Vec<u32> = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(&e, &f)| f - e)
            .filter(|&d| d > 0)
            .collect();
        factors.sort_unstable_by(|a, b| b.cmp(a));
        FiniteAbelianPGroup::new(group.p(), factors)
    }
}

/// Binomial coefficient with the standard integer extension:
/// `binom(n, k) = n(n-1)...(n-k+1) / k!` for any integer n, so
/// `binom(n, k) = 0` for `0 <= n < k` and
/// `binom(-n, k) = (-1)^k binom(n+k-1, k)`.
pub fn binom(n: i64, k: u32) -> BigInt {
    let mut num = BigInt::one();
    for j in 0..k as i64 {
        num *= BigInt::from(n - j);
    }
    let mut den = BigInt::one();
    for j in 1..=k as i64 {
        den *= BigInt::from(j);
    }
    num / den
}

/// `binom(n_1, i_1) * ... * binom(n_m, i_m)`, exact.
pub fn multibinom(n: &[i64], i: &[u32]) -> BigInt {
    assert_eq!(n.len(), i.len(), "multibinom arity mismatch");
    let mut acc = BigInt::one();
    for (&nj, &ij) in n.iter().zip(i) {
        if acc.is_zero() {
            return acc;
        }
        acc *= binom(nj, ij);
    }
    acc
}

/// Inverse of `a` modulo `m` (m a prime power, a coprime to it).
pub fn inv_mod(a: i64, m: u64) -> Option<u64> {
    let m_i = m as i64;
    let a = a.rem_euclid(m_i);
    let (mut old_r, mut r) = (a, m_i);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m_i) as u64)
}

/// Reduce a BigInt into [0, m).
pub fn big_mod_u64(x: &BigInt, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let mut r = x % &mb;
    if r.is_negative() {
        r += &mb;
    }
    u64::try_from(&r).expect("reduced value fits u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z9() -> FiniteAbelianPGroup {
        FiniteAbelianPGroup::cyclic(3, 2).unwrap()
    }

    #[test]
    fn add_in_z9() {
        let g = z9();
        let a = g.element(&[5]).unwrap();
        let b = g.element(&[7]).unwrap();
        assert_eq!(a.add(&b).unwrap(), g.element(&[3]).unwrap());
    }

    #[test]
    fn add_in_z3_x_z9() {
        let g = FiniteAbelianPGroup::new(3, vec![1, 2]).unwrap();
        let a = g.element(&[1, 4]).unwrap();
        let b = g.element(&[2, 6]).unwrap();
        assert_eq!(a.add(&b).unwrap(), g.element(&[0, 1]).unwrap());
    }

    #[test]
    fn scalar_examples() {
        let g = z9();
        assert_eq!(g.element(&[1]).unwrap().scalar(3), g.element(&[3]).unwrap());
        for x in 0..9 {
            assert!(g.element(&[x]).unwrap().scalar(9).is_zero());
        }
    }

    #[test]
    fn group_mismatch_is_error() {
        let a = z9().element(&[1]).unwrap();
        let b = FiniteAbelianPGroup::cyclic(3, 1).unwrap().element(&[1]).unwrap();
        assert!(matches!(a.add(&b), Err(Error::Mismatch(_))));
    }

    #[test]
    fn rejects_non_prime_and_zero_exponent() {
        assert!(FiniteAbelianPGroup::new(4, vec![1]).is_err());
        assert!(FiniteAbelianPGroup::new(3, vec![0]).is_err());
        assert!(FiniteAbelianPGroup::new(3, vec![41]).is_err());
    }

    #[test]
    fn multibinom_examples() {
        assert_eq!(multibinom(&[3, 2], &[1, 2]), BigInt::from(3));
        assert_eq!(multibinom(&[5, 1], &[2, 0]), BigInt::from(10));
        assert_eq!(multibinom(&[1, 1], &[2, 0]), BigInt::zero());
        // negative upper entry: binom(-n,k) = (-1)^k binom(n+k-1,k)
        assert_eq!(binom(-3, 2), BigInt::from(6));
        assert_eq!(binom(-1, 3), BigInt::from(-1));
    }

    #[test]
    fn subgroup_membership_and_lattice() {
        let g = z9();
        let s = ComponentwiseSubgroup::new(&g, vec![1]).unwrap(); // 3Z_9
        assert!(s.contains(&g, &g.element(&[3]).unwrap()));
        assert!(!s.contains(&g, &g.element(&[4]).unwrap()));
        assert_eq!(s.order(&g), 3);
        let z = ComponentwiseSubgroup::zero(&g);
        assert!(s.contains_subgroup(&z));
        assert!(!z.contains_subgroup(&s));
        assert_eq!(s.intersect(&z), z);
    }

    #[test]
    fn subgroup_intersection_matches_membership_exhaustively() {
        // all componentwise subgroups of groups of order <= 81
        let groups = [
            FiniteAbelianPGroup::new(3, vec![4]).unwrap(),
            FiniteAbelianPGroup::new(3, vec![2, 2]).unwrap(),
            FiniteAbelianPGroup::new(3, vec![1, 1, 2]).unwrap(),
            FiniteAbelianPGroup::new(2, vec![3, 3]).unwrap(),
        ];
        for g in &groups {
            let mut subs = vec![];
            let mut stack = vec![Vec::new()];
            while let Some(partial) = stack.pop() {
                if partial.len() == g.num_components() {
                    subs.push(ComponentwiseSubgroup::new(g, partial).unwrap());
                    continue;
                }
                for e in 0..=g.orders()[partial.len()] {
                    let mut next = partial.clone();
                    next.push(e);
                    stack.push(next);
                }
            }
            let elements = g.elements(128).unwrap();
            for a in &subs {
                for b in &subs {
                    let cap = a.intersect(b);
                    for x in &elements {
                        assert_eq!(
                            cap.contains(g, x),
                            a.contains(g, x) && b.contains(g, x)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn element_order() {
        let g = z9();
        assert_eq!(g.element(&[1]).unwrap().order(), 9);
        assert_eq!(g.element(&[3]).unwrap().order(), 3);
        assert_eq!(g.zero().order(), 1);
    }

    #[test]
    fn quotient_invariant_factors() {
        let g = FiniteAbelianPGroup::new(3, vec![2, 1]).unwrap();
        let full = ComponentwiseSubgroup::full(&g);
        let zero = ComponentwiseSubgroup::zero(&g);
        let q = full.quotient_group(&g, &zero).unwrap();
        assert_eq!(q.orders(), &[2, 1]);
        // 3Z_9 x Z_3 is isomorphic to Z_3 x Z_3
        let s = ComponentwiseSubgroup::new(&g, vec![1, 0]).unwrap();
        let q2 = s.quotient_group(&g, &zero).unwrap();
        assert_eq!(q2.orders(), &[1, 1]);
    }

    #[test]
    fn index_roundtrip() {
        let g = FiniteAbelianPGroup::new(2, vec![2, 3]).unwrap();
        for i in 0..g.order() {
            assert_eq!(g.index_of(&g.element_at(i)), i);
        }
    }
}
