//! Degree-k filtrations on finite abelian p-groups, the canonical filtered
//! groups `Z_{k,l}` and `D_k(A)`, the algebraic p-homogeneity test, and the
//! classification of cyclic p-homogeneous filtrations by their drop sets.

use crate::group::{ComponentwiseSubgroup, FiniteAbelianPGroup};
use crate::{Error, Result};
use std::fmt;

/// A group together with a non-increasing chain of componentwise subgroups
/// indexed `0..=k+1`, with `chain[0] = chain[1]` and `chain[k+1] = 0`.
///
/// `degree` is an upper bound on the filtration degree; `exact` records that
/// `chain[k]` is nontrivial. Queries beyond `k+1` return the zero subgroup.
#[derive(Clone, PartialEq, Eq)]
pub struct FilteredGroup {
    group: FiniteAbelianPGroup,
    chain: Vec<ComponentwiseSubgroup>,
    degree: u32,
    exact: bool,
}

impl fmt::Debug for FilteredGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F[p={},k={};", self.p(), self.degree)?;
        for i in 1..=self.degree + 1 {
            write!(f, " {:?}", self.subgroup_at(i).exponents())?;
        }
        write!(f, "]")
    }
}

impl FilteredGroup {
    /// Build from the chain at indices `1..=k` (index 0 is implied equal to
    /// index 1 and the zero subgroup is appended at `k+1`).
    pub fn new(
        group: FiniteAbelianPGroup,
        chain_from_1: Vec<ComponentwiseSubgroup>,
        degree: u32,
    ) -> Result<Self> {
        if chain_from_1.len() != degree as usize {
            return Err(Error::precondition(format!(
                "expected {} chain entries for degree {}, got {}",
                degree,
                degree,
                chain_from_1.len()
            )));
        }
        if degree == 0 {
            return Err(Error::precondition("filtration degree must be >= 1"));
        }
        for w in chain_from_1.windows(2) {
            if !w[0].contains_subgroup(&w[1]) {
                return Err(Error::precondition(
                    "filtration chain must be non-increasing",
                ));
            }
        }
        let exact = !chain_from_1[degree as usize - 1].is_zero(&group);
        let mut chain = Vec::with_capacity(degree as usize + 2);
        chain.push(chain_from_1[0].clone()); // index 0 = index 1
        chain.extend(chain_from_1);
        chain.push(ComponentwiseSubgroup::zero(&group));
        Ok(FilteredGroup {
            group,
            chain,
            degree,
            exact,
        })
    }

    /// `D_k(A)`: the degree-k filtration with `chain[i] = A` for `i <= k`.
    pub fn make_dk(group: FiniteAbelianPGroup, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::precondition("D_k requires k >= 1"));
        }
        let full = ComponentwiseSubgroup::full(&group);
        Self::new(group, vec![full; k as usize], k)
    }

    /// `r(k, l, p) = floor((k - l)/(p - 1)) + 1`, the exponent of the cyclic
    /// group underlying `Z_{k,l}`.
    pub fn r_param(p: u64, k: u32, l: u32) -> u32 {
        let _ = p;
        debug_assert!(l <= k);
        (k - l) / (p as u32 - 1) + 1
    }

    /// The building block `Z_{k,l}`: the cyclic group `Z_{p^r}` with
    /// `chain[i] = Z_{p^r}` for `i <= l` and
    /// `chain[i] = p^{floor((i-l-1)/(p-1))+1} Z_{p^r}` for `i in [l+1, k]`.
    pub fn make_zkl(p: u64, k: u32, l: u32) -> Result<Self> {
        if l < 1 || l > k {
            return Err(Error::precondition(format!(
                "Z_(k,l) requires 1 <= l <= k, got l={l}, k={k}"
            )));
        }
        let r = Self::r_param(p, k, l);
        let group = FiniteAbelianPGroup::cyclic(p, r)?;
        let mut chain = Vec::with_capacity(k as usize);
        for i in 1..=k {
            let e = if i <= l {
                0
            } else {
                ((i - l - 1) / (p as u32 - 1) + 1).min(r)
            };
            chain.push(ComponentwiseSubgroup::new(&group, vec![e])?);
        }
        Self::new(group, chain, k)
    }

    /// The product filtration: componentwise product group with
    /// `chain[i] = F.chain[i] x G.chain[i]`, padding the shorter chain with
    /// zero subgroups.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.p() != other.p() {
            return Err(Error::mismatch(format!(
                "product of filtrations over p={} and p={}",
                self.p(),
                other.p()
            )));
        }
        let group = self.group.product(&other.group)?;
        let degree = self.degree.max(other.degree);
        let mut chain = Vec::with_capacity(degree as usize);
        for i in 1..=degree {
            let mut exps = self.subgroup_at(i).exponents().to_vec();
            exps.extend_from_slice(other.subgroup_at(i).exponents());
            chain.push(ComponentwiseSubgroup::new(&group, exps)?);
        }
        Self::new(group, chain, degree)
    }

    pub fn group(&self) -> &FiniteAbelianPGroup {
        &self.group
    }

    pub fn p(&self) -> u64 {
        self.group.p()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Whether `chain[degree]` is nontrivial.
    pub fn exact_degree(&self) -> bool {
        self.exact
    }

    /// `chain[i]`, with every index beyond `k+1` resolving to the zero
    /// subgroup.
    pub fn subgroup_at(&self, i: u32) -> &ComponentwiseSubgroup {
        let i = (i as usize).min(self.chain.len() - 1);
        &self.chain[i]
    }

    /// Order of `chain[i]`.
    pub fn level_order(&self, i: u32) -> u128 {
        self.subgroup_at(i).order(&self.group)
    }

    /// The algebraic p-homogeneity test: `p * chain[i] <= chain[i+p-1]` for
    /// all `i <= degree`. Componentwise this is an exponent comparison; the
    /// generator images are also checked.
    pub fn is_p_homogeneous(&self) -> bool {
        self.first_homogeneity_violation().is_none()
    }

    /// First level i at which `p * chain[i]` is not inside `chain[i+p-1]`.
    pub fn first_homogeneity_violation(&self) -> Option<u32> {
        let p = self.p() as u32;
        for i in 0..=self.degree {
            let scaled = self.subgroup_at(i).times_p(&self.group);
            let target = self.subgroup_at(i + p - 1);
            if !target.contains_subgroup(&scaled) {
                return Some(i);
            }
            debug_assert!(self
                .subgroup_at(i)
                .generators(&self.group)
                .iter()
                .all(|g| target.contains(&self.group, &g.scalar(self.p() as i64))));
        }
        None
    }

    /// The structure group `chain[i] / chain[i+1]` in invariant-factor form.
    pub fn structure_group(&self, i: u32) -> Result<FiniteAbelianPGroup> {
        if i < 1 || i > self.degree {
            return Err(Error::precondition(format!(
                "structure group level {i} outside [1, {}]",
                self.degree
            )));
        }
        self.subgroup_at(i)
            .quotient_group(&self.group, self.subgroup_at(i + 1))
    }

    /// Mark the filtration as having its stated degree exactly (callers that
    /// enumerate chains use this when `chain[k]` is nonzero).
    pub fn has_nonzero_top(&self) -> bool {
        !self.subgroup_at(self.degree).is_zero(&self.group)
    }
}

/// Outcome of [`classify_cyclic`]: either the drop set of a p-homogeneous
/// cyclic filtration, or the first level violating p-homogeneity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclicClassification {
    PHomogeneous { delta: Vec<u32> },
    NotPHomogeneous { violating_level: u32 },
}

/// Classify a cyclic filtration of exact degree k (Prop-3.8 style): if it is
/// p-homogeneous, return the drop set
/// `Delta = { i in [k] : chain[i+1] = p*chain[i] != chain[i] }`, which is
/// (p-1)-separated and contains k; otherwise report the violating level.
pub fn classify_cyclic(f: &FilteredGroup) -> Result<CyclicClassification> {
    if !f.group().is_cyclic() {
        return Err(Error::precondition(
            "cyclic classification requires a cyclic group",
        ));
    }
    if !f.has_nonzero_top() {
        return Err(Error::precondition(
            "cyclic classification requires exact degree (chain[k] nonzero)",
        ));
    }
    if let Some(i) = f.first_homogeneity_violation() {
        return Ok(CyclicClassification::NotPHomogeneous { violating_level: i });
    }
    let r = f.group().orders().first().copied().unwrap_or(0);
    let exp = |i: u32| -> u32 {
        f.subgroup_at(i)
            .exponents()
            .first()
            .copied()
            .unwrap_or(r)
    };
    let mut delta = Vec::new();
    for i in 1..=f.degree() {
        let (e, e_next) = (exp(i), exp(i + 1));
        // chain[i+1] = p*chain[i] != chain[i] means a single-step drop from
        // a nonzero level
        if e < r && e_next == (e + 1).min(r) && e_next != e {
            delta.push(i);
        }
    }
    Ok(CyclicClassification::PHomogeneous { delta })
}

/// The integer filtration `H_i^(p)` on Z: level j is `p^{exponent(j)} Z`,
/// with exponent `floor((j-i-1)/(p-1)) + 1` for `j >= i+1` and 0 below.
/// `H_0 := H_1` by convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerFiltrationProfile {
    p: u64,
    i: u32,
}

impl IntegerFiltrationProfile {
    pub fn new(p: u64, i: u32) -> Self {
        // H_0 is defined as H_1
        IntegerFiltrationProfile { p, i: i.max(1) }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn parameter(&self) -> u32 {
        self.i
    }

    pub fn exponent(&self, j: u32) -> u32 {
        if j <= self.i {
            0
        } else {
            (j - self.i - 1) / (self.p as u32 - 1) + 1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dk_chain_shape() {
        let d2 = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 2).unwrap();
        assert_eq!(d2.degree(), 2);
        assert_eq!(d2.level_order(1), 3);
        assert_eq!(d2.level_order(2), 3);
        assert_eq!(d2.level_order(3), 1);
        assert!(d2.exact_degree());
        assert!(FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 0).is_err());
    }

    #[test]
    fn zkl_worked_example_z42() {
        // Z_{4,2}^(3): r = 2, group Z_9, chain (Z9, Z9, Z9, 3Z9, 3Z9, 0)
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        assert_eq!(f.group().orders(), &[2]);
        let exps: Vec<u32> = (0..=5).map(|i| f.subgroup_at(i).exponents()[0]).collect();
        assert_eq!(exps, vec![0, 0, 0, 1, 1, 2]);
    }

    #[test]
    fn zkk_equals_dk() {
        for p in [2u64, 3, 5, 7] {
            for k in 1..=6 {
                let zkk = FilteredGroup::make_zkl(p, k, k).unwrap();
                let dk =
                    FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(p, 1).unwrap(), k).unwrap();
                assert_eq!(zkk, dk, "Z_(k,k) = D_k(Z_p) failed for p={p}, k={k}");
            }
        }
    }

    #[test]
    fn zp1_shape() {
        // Z_{p,1}: r = 2, G_1 = Z_{p^2}, G_2 = ... = G_p = pZ_{p^2}
        for p in [2u64, 3, 5] {
            let f = FilteredGroup::make_zkl(p, p as u32, 1).unwrap();
            assert_eq!(f.group().orders(), &[2]);
            assert_eq!(f.subgroup_at(1).exponents(), &[0]);
            for i in 2..=p as u32 {
                assert_eq!(f.subgroup_at(i).exponents(), &[1], "p={p}, i={i}");
            }
            assert!(f.subgroup_at(p as u32 + 1).is_zero(f.group()));
        }
    }

    #[test]
    fn hip_profile() {
        let h1 = IntegerFiltrationProfile::new(3, 1);
        assert_eq!(
            (1..=4).map(|j| h1.exponent(j)).collect::<Vec<_>>(),
            vec![0, 1, 1, 2]
        );
        let h5 = IntegerFiltrationProfile::new(3, 5);
        for j in 0..=5 {
            assert_eq!(h5.exponent(j), 0);
        }
        // H_0 := H_1
        let h0 = IntegerFiltrationProfile::new(3, 0);
        assert_eq!(h0, h1);
    }

    #[test]
    fn product_example() {
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        let g = FilteredGroup::make_zkl(3, 4, 4).unwrap();
        let prod = f.product(&g).unwrap();
        assert_eq!(prod.group().orders(), &[2, 1]); // Z_9 x Z_3
        assert_eq!(prod.degree(), 4);
        // F x trivial-degree-1 filtration keeps degree
        let d1 = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 1).unwrap();
        assert_eq!(f.product(&d1).unwrap().degree(), 4);
        let q = FilteredGroup::make_zkl(2, 2, 1);
        assert!(q.unwrap().product(&f).is_err());
    }

    #[test]
    fn homogeneity_examples() {
        for (p, k) in [(2u64, 4u32), (3, 4), (3, 6), (5, 6)] {
            for l in 1..=k {
                assert!(
                    FilteredGroup::make_zkl(p, k, l).unwrap().is_p_homogeneous(),
                    "Z_(k,l) must be p-homogeneous: p={p}, k={k}, l={l}"
                );
            }
        }
        // Z_9 with chain (Z_9, Z_9, 0, 0) for p = 3 is not: 3*Z_9 not in G_3 = 0
        let g = FiniteAbelianPGroup::cyclic(3, 2).unwrap();
        let d2z9 = FilteredGroup::make_dk(g, 2).unwrap();
        assert!(!d2z9.is_p_homogeneous());
        assert_eq!(d2z9.first_homogeneity_violation(), Some(1));
        // D_k(Z_p) is p-homogeneous
        for p in [2u64, 3, 5] {
            for k in 1..=5 {
                let dk =
                    FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(p, 1).unwrap(), k).unwrap();
                assert!(dk.is_p_homogeneous());
            }
        }
    }

    #[test]
    fn classify_cyclic_examples() {
        // Z_{4,2}^(3) -> Delta = {2, 4}
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        assert_eq!(
            classify_cyclic(&f).unwrap(),
            CyclicClassification::PHomogeneous { delta: vec![2, 4] }
        );
        // D_k(Z_p) -> Delta = {k}
        let dk = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 3).unwrap();
        assert_eq!(
            classify_cyclic(&dk).unwrap(),
            CyclicClassification::PHomogeneous { delta: vec![3] }
        );
        // drops at {2,3} on Z_9, p=3: not 2-separated, rejected
        let g = FiniteAbelianPGroup::cyclic(3, 2).unwrap();
        let chain = vec![
            ComponentwiseSubgroup::new(&g, vec![0]).unwrap(),
            ComponentwiseSubgroup::new(&g, vec![0]).unwrap(),
            ComponentwiseSubgroup::new(&g, vec![1]).unwrap(),
        ];
        let f = FilteredGroup::new(g, chain, 3).unwrap();
        assert!(matches!(
            classify_cyclic(&f).unwrap(),
            CyclicClassification::NotPHomogeneous { .. }
        ));
        // non-cyclic group is a precondition error
        let prod = FilteredGroup::make_dk(FiniteAbelianPGroup::elementary(3, 2).unwrap(), 2).unwrap();
        assert!(classify_cyclic(&prod).is_err());
    }

    #[test]
    fn structure_groups() {
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        // level 4: 3Z_9 / 0 = Z_3
        assert_eq!(f.structure_group(4).unwrap().orders(), &[1]);
        // level 3: chain[3] = chain[4], trivial
        assert!(f.structure_group(3).unwrap().is_trivial());
        let d2 = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 2).unwrap();
        assert_eq!(d2.structure_group(2).unwrap().orders(), &[1]);
        assert!(f.structure_group(0).is_err());
        assert!(f.structure_group(5).is_err());
    }
}
