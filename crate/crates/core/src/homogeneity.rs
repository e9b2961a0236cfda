//! Decision procedures and structural algorithms on group nilspaces: the
//! `Q_{p,k}` catalog, quotients by subspaces of the top structure group with
//! change-of-basis certificates, fibration checks, morphism lifting, and the
//! translation calculus for `k <= p`.

use crate::cube::{cube_count, is_cube, CubeMap};
use crate::filtration::FilteredGroup;
use crate::fp::{complete_basis, echelon_by_trailing, FpSubspace};
use crate::group::{inv_mod, ComponentwiseSubgroup, FiniteAbelianPGroup, GroupElement};
use crate::poly::{from_values, is_hom_zpn, MultiIndex};
use crate::{Error, Result};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

/// A filtered abelian group regarded as a nilspace through its Host-Kra
/// cubes. All structure is delegated to the filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupNilspace {
    filtered: FilteredGroup,
}

impl GroupNilspace {
    pub fn new(filtered: FilteredGroup) -> Self {
        GroupNilspace { filtered }
    }

    pub fn filtration(&self) -> &FilteredGroup {
        &self.filtered
    }

    /// The algebraic criterion `p * chain[i] <= chain[i+p-1]`; by the
    /// equivalence validated in the polynomial-map layer this decides
    /// p-homogeneity of the nilspace itself.
    pub fn is_p_homogeneous(&self) -> bool {
        self.filtered.is_p_homogeneous()
    }
}

/// A member of `Q_{p,k}`: multiplicities `a_l` for the product
/// `prod_l Z_{k,l}^{a_l}`, realized with factors in ascending l.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpkMember {
    p: u64,
    k: u32,
    mult: Vec<u32>,
}

impl QpkMember {
    pub fn new(p: u64, k: u32, mult: Vec<u32>) -> Result<Self> {
        if mult.len() != k as usize {
            return Err(Error::precondition(format!(
                "expected {k} multiplicities a_1..a_k"
            )));
        }
        Ok(QpkMember { p, k, mult })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Multiplicity of `Z_{k,l}`.
    pub fn multiplicity(&self, l: u32) -> u32 {
        self.mult[l as usize - 1]
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.mult
    }

    pub fn order(&self) -> u128 {
        let mut o: u128 = 1;
        for l in 1..=self.k {
            let r = FilteredGroup::r_param(self.p, self.k, l);
            for _ in 0..self.multiplicity(l) {
                o = o.saturating_mul((self.p as u128).pow(r));
            }
        }
        o
    }

    /// The realized filtered group, factors in ascending l, each block
    /// repeated `a_l` times. The trivial member realizes to the trivial
    /// group with the degree-k filtration.
    pub fn realize(&self) -> Result<FilteredGroup> {
        let mut acc: Option<FilteredGroup> = None;
        for l in 1..=self.k {
            for _ in 0..self.multiplicity(l) {
                let f = FilteredGroup::make_zkl(self.p, self.k, l)?;
                acc = Some(match acc {
                    None => f,
                    Some(prev) => prev.product(&f)?,
                });
            }
        }
        match acc {
            Some(f) => Ok(f),
            None => {
                let triv = FiniteAbelianPGroup::trivial(self.p)?;
                FilteredGroup::make_dk(triv, self.k)
            }
        }
    }

    /// Component indices (into the realized group) of the factors that
    /// contribute to the k-th structure group, grouped by slot. Slots are
    /// the values `l = k mod (p-1)` in [1,k], ascending l (descending r).
    pub fn contributing_slots(&self) -> Vec<Slot> {
        let pm1 = self.p as u32 - 1;
        let mut by_l: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        let mut component = 0usize;
        for l in 1..=self.k {
            for _ in 0..self.multiplicity(l) {
                if (self.k - l) % pm1 == 0 {
                    by_l.entry(l).or_default().push(component);
                }
                component += 1;
            }
        }
        by_l
            .into_iter()
            .map(|(l, comps)| Slot {
                l,
                r: FilteredGroup::r_param(self.p, self.k, l),
                components: comps,
            })
            .collect()
    }
}

/// One block of factors `Z_{k,l}^{a}` contributing to the top structure
/// group.
#[derive(Clone, Debug)]
pub struct Slot {
    pub l: u32,
    pub r: u32,
    pub components: Vec<usize>,
}

/// All `Q_{p,k}` members with realized order at most `order_bound`, in
/// colexicographic order of the multiplicity vector.
pub fn enumerate_qpk(p: u64, k: u32, order_bound: u128) -> Result<Vec<QpkMember>> {
    if k == 0 {
        return Err(Error::precondition("catalog requires k >= 1"));
    }
    let costs: Vec<u128> = (1..=k)
        .map(|l| (p as u128).pow(FilteredGroup::r_param(p, k, l)))
        .collect();
    fn rec(
        slot: usize,
        order: u128,
        mult: &mut Vec<u32>,
        costs: &[u128],
        bound: u128,
        p: u64,
        k: u32,
        out: &mut Vec<QpkMember>,
    ) {
        if slot == costs.len() {
            out.push(QpkMember::new(p, k, mult.clone()).expect("consistent arity"));
            return;
        }
        let mut o = order;
        let mut a = 0u32;
        loop {
            mult[slot] = a;
            rec(slot + 1, o, mult, costs, bound, p, k, out);
            match o.checked_mul(costs[slot]) {
                Some(next) if next <= bound => {
                    o = next;
                    a += 1;
                }
                _ => break,
            }
        }
        mult[slot] = 0;
    }
    let mut out = Vec::new();
    let mut mult = vec![0u32; k as usize];
    rec(0, 1, &mut mult, &costs, order_bound, p, k, &mut out);
    out.sort_by(|x, y| MultiIndex(x.mult.clone()).cmp(&MultiIndex(y.mult.clone())));
    Ok(out)
}

/// Canonical isomorphism-type tag of a cyclic building block: `Z_{k,l}`
/// reduced to exact degree `k - ((k-l) mod (p-1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockTag {
    pub k: u32,
    pub l: u32,
}

/// Isomorphism type of a finite product of building blocks, compared as a
/// multiset of canonical tags. Never decided by nilspace-isomorphism
/// search.
#[derive(Clone, PartialEq, Eq)]
pub struct IsoType {
    p: u64,
    factors: BTreeMap<BlockTag, u32>,
}

impl IsoType {
    pub fn new(p: u64) -> Self {
        IsoType {
            p,
            factors: BTreeMap::new(),
        }
    }

    /// Add `Z_{k,l}^count`; the tag is canonicalized to exact degree and
    /// trivial blocks (l > k) are dropped.
    pub fn push(&mut self, k: u32, l: u32, count: u32) {
        if count == 0 || l > k {
            return;
        }
        let s = (k - l) % (self.p as u32 - 1);
        let tag = BlockTag { k: k - s, l };
        *self.factors.entry(tag).or_insert(0) += count;
    }

    pub fn factors(&self) -> &BTreeMap<BlockTag, u32> {
        &self.factors
    }

    pub fn order(&self) -> u128 {
        let mut o: u128 = 1;
        for (tag, &count) in &self.factors {
            let r = FilteredGroup::r_param(self.p, tag.k, tag.l);
            for _ in 0..count {
                o = o.saturating_mul((self.p as u128).pow(r));
            }
        }
        o
    }
}

impl fmt::Display for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (tag, &count) in &self.factors {
            for _ in 0..count {
                if !first {
                    write!(f, " x ")?;
                }
                first = false;
                if tag.k == tag.l {
                    write!(f, "D({};Z[{}])", tag.l, self.p)?;
                } else {
                    write!(f, "Z({},{};{})", tag.k, tag.l, self.p)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IsoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Outcome of a quotient by a subspace of the k-th structure group: the
/// resulting isomorphism type, the block-upper-triangular change-of-basis
/// certificate, the realized quotient filtration, and the canonical
/// projection.
pub struct QuotientOutcome {
    pub iso_type: IsoType,
    /// Columns of the certificate matrix A over F_p (ambient x ambient).
    pub certificate: Vec<Vec<u64>>,
    /// Per-slot kill counts b_i.
    pub kill_counts: Vec<u32>,
    pub quotient: FilteredGroup,
    pub projection: FilteredHomomorphism,
}

/// Quotient of a `Q_{p,k}` member by a subspace H of its k-th structure
/// group `Z_p^{a_0 + ... + a_t}` (coordinates ordered slot by slot,
/// ascending l). Executes the block-matrix construction: nested bases of
/// `H cap U_i` extended slot by slot give the certificate A with
/// `det(A_{i,i})` coprime to p, and the factor list is
/// `Z_{k-1,l_i}^{b_i} x Z_{k,l_i}^{a_i - b_i} x (untouched factors)`.
pub fn quotient_by_subspace(member: &QpkMember, h: &FpSubspace) -> Result<QuotientOutcome> {
    let p = member.p();
    let k = member.k();
    if h.p() != p {
        return Err(Error::mismatch("subspace prime differs from member"));
    }
    let slots = member.contributing_slots();
    let ambient: usize = slots.iter().map(|s| s.components.len()).sum();
    if h.ambient_dim() != ambient {
        return Err(Error::precondition(format!(
            "H must live in the k-th structure group Z_{p}^{ambient}, got ambient dimension {}",
            h.ambient_dim()
        )));
    }
    // nested bases of H cap U_i via trailing echelon form
    let rows = echelon_by_trailing(h.basis(), p);
    let slot_end: Vec<usize> = slots
        .iter()
        .scan(0usize, |acc, s| {
            *acc += s.components.len();
            Some(*acc)
        })
        .collect();
    let slot_of_coord = |c: usize| slot_end.iter().position(|&e| c < e).expect("in range");
    let mut kill_counts = vec![0u32; slots.len()];
    let mut slot_rows: Vec<Vec<Vec<u64>>> = vec![Vec::new(); slots.len()];
    for row in &rows {
        let last = row.iter().rposition(|&x| x != 0).expect("nonzero row");
        let s = slot_of_coord(last);
        kill_counts[s] += 1;
        slot_rows[s].push(row.clone());
    }
    // assemble the certificate columns: per slot, the H-basis vectors
    // entering at that slot, then standard vectors completing to a basis
    // of U_i
    let mut columns: Vec<Vec<u64>> = Vec::with_capacity(ambient);
    let mut kill_column: Vec<bool> = Vec::with_capacity(ambient);
    for i in 0..slots.len() {
        for v in &slot_rows[i] {
            columns.push(v.clone());
            kill_column.push(true);
        }
        let want = slot_end[i];
        let current = FpSubspace::from_vectors(p, ambient, &columns)?;
        let u_i_basis: Vec<Vec<u64>> = (0..want)
            .map(|j| {
                let mut e = vec![0u64; ambient];
                e[j] = 1;
                e
            })
            .collect();
        let u_i = FpSubspace::from_vectors(p, ambient, &u_i_basis)?;
        if !u_i.contains_subspace(&current) {
            return Err(Error::Invariant(
                "trailing echelon rows escaped their slot prefix".into(),
            ));
        }
        for w in complete_basis(&current, &u_i)? {
            columns.push(w);
            kill_column.push(false);
        }
    }
    if columns.len() != ambient {
        return Err(Error::Invariant("certificate is not square".into()));
    }
    // block-triangularity and unimodular diagonal blocks
    for (ci, col) in columns.iter().enumerate() {
        let si = slot_of_coord(ci);
        if col[slot_end[si]..].iter().any(|&x| x != 0) {
            return Err(Error::Invariant(
                "certificate is not block-triangular".into(),
            ));
        }
    }
    for i in 0..slots.len() {
        let start = if i == 0 { 0 } else { slot_end[i - 1] };
        let end = slot_end[i];
        let mut block: Vec<Vec<u64>> = (start..end)
            .map(|ci| columns[ci][start..end].to_vec())
            .collect();
        let pivots = crate::fp::rref(&mut block, p);
        if pivots.len() != end - start {
            return Err(Error::Invariant(format!(
                "diagonal block {i} of the certificate is singular mod p"
            )));
        }
    }
    // resulting isomorphism type
    let mut iso = IsoType::new(p);
    for (i, slot) in slots.iter().enumerate() {
        let a_i = slot.components.len() as u32;
        let b_i = kill_counts[i];
        iso.push(k - 1, slot.l, b_i);
        iso.push(k, slot.l, a_i - b_i);
    }
    let pm1 = p as u32 - 1;
    for l in 1..=k {
        if (k - l) % pm1 != 0 {
            iso.push(k, l, member.multiplicity(l));
        }
    }
    // order bookkeeping: |X/H| = |X| / |H|
    let expect = member.order() / (p as u128).pow(h.dim() as u32);
    if iso.order() != expect {
        return Err(Error::Invariant(format!(
            "quotient order {} does not match |X|/|H| = {expect}",
            iso.order()
        )));
    }
    let source = member.realize()?;
    let (quotient, projection) = build_projection(member, &source, &slots, &columns, &kill_column)?;
    if !projection.is_levelwise_surjective()? {
        return Err(Error::Invariant(
            "canonical projection is not levelwise surjective".into(),
        ));
    }
    Ok(QuotientOutcome {
        iso_type: iso,
        certificate: columns,
        kill_counts,
        quotient,
        projection,
    })
}

/// Invert a square matrix over `Z_m` (m a p-power; pivots must be units).
fn invert_mod(mat: &[Vec<u64>], m: u64) -> Result<Vec<Vec<u64>>> {
    let n = mat.len();
    let mut a: Vec<Vec<u64>> = mat
        .iter()
        .map(|r| r.iter().map(|&x| x % m).collect())
        .collect();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| inv_mod(a[r][col] as i64, m).is_some())
            .ok_or_else(|| Error::Invariant("matrix not invertible mod p^r".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pv = inv_mod(a[col][col] as i64, m).expect("unit pivot");
        for j in 0..n {
            a[col][j] = (a[col][j] as u128 * pv as u128 % m as u128) as u64;
            inv[col][j] = (inv[col][j] as u128 * pv as u128 % m as u128) as u64;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let c = a[r][col];
                for j in 0..n {
                    let s = (c as u128 * a[col][j] as u128) % m as u128;
                    a[r][j] = ((a[r][j] as u128 + m as u128 * m as u128 - s) % m as u128) as u64;
                    let s2 = (c as u128 * inv[col][j] as u128) % m as u128;
                    inv[r][j] =
                        ((inv[r][j] as u128 + m as u128 * m as u128 - s2) % m as u128) as u64;
                }
            }
        }
    }
    Ok(inv)
}

/// Build the quotient filtration and the projection homomorphism
/// `proj o phi^{-1}` from the certificate.
fn build_projection(
    member: &QpkMember,
    source: &FilteredGroup,
    slots: &[Slot],
    columns: &[Vec<u64>],
    kill_column: &[bool],
) -> Result<(FilteredGroup, FilteredHomomorphism)> {
    let p = member.p();
    let k = member.k();
    // coordinate c of the structure group -> (slot, source component)
    let mut coord_component: Vec<usize> = Vec::new();
    let mut coord_slot: Vec<usize> = Vec::new();
    for (i, slot) in slots.iter().enumerate() {
        for &c in &slot.components {
            coord_component.push(c);
            coord_slot.push(i);
        }
    }
    let ambient = coord_component.len();
    let num_components = source.group().num_components();
    // target filtration: source components in order, each kill coordinate
    // demoted from Z_{k,l} to Z_{k-1,l} (dropped when trivial)
    let kill_of_component: HashMap<usize, bool> = (0..ambient)
        .map(|c| (coord_component[c], kill_column[c]))
        .collect();
    let mut comp_tag: Vec<u32> = Vec::new(); // l of each component
    for l in 1..=k {
        for _ in 0..member.multiplicity(l) {
            comp_tag.push(l);
        }
    }
    let mut target: Option<FilteredGroup> = None;
    let mut target_component_of: HashMap<usize, usize> = HashMap::new();
    let mut next_target_comp = 0usize;
    for comp in 0..num_components {
        let l = comp_tag[comp];
        let factor = if kill_of_component.get(&comp).copied().unwrap_or(false) {
            if l <= k - 1 {
                Some(FilteredGroup::make_zkl(p, k - 1, l)?)
            } else {
                None // Z_{k-1,k} is trivial
            }
        } else {
            Some(FilteredGroup::make_zkl(p, k, l)?)
        };
        if let Some(f) = factor {
            target = Some(match target.take() {
                None => f,
                Some(prev) => prev.product(&f)?,
            });
            target_component_of.insert(comp, next_target_comp);
            next_target_comp += 1;
        }
    }
    let target = match target {
        Some(t) => t,
        None => FilteredGroup::make_dk(FiniteAbelianPGroup::trivial(p)?, k)?,
    };
    // phi in relabeled coordinates: y_i = sum_{j >= i} A_{i,j} p^{r_i - r_j} x_j
    // (slot blocks); psi = proj o phi^{-1}, so solve phi(x) = e_c per
    // source generator.
    let slot_start: Vec<usize> = {
        let mut acc = 0usize;
        slots
            .iter()
            .map(|s| {
                let st = acc;
                acc += s.components.len();
                st
            })
            .collect()
    };
    let solve_phi = |y: &[u64]| -> Result<Vec<u64>> {
        let mut x = vec![0u64; ambient];
        for i in (0..slots.len()).rev() {
            let r_i = slots[i].r;
            let m_i = p.pow(r_i);
            let start = slot_start[i];
            let len = slots[i].components.len();
            let mut rhs: Vec<u64> = (0..len).map(|row| y[start + row] % m_i).collect();
            for j in i + 1..slots.len() {
                let scale = p.pow(r_i - slots[j].r);
                let jstart = slot_start[j];
                for col_off in 0..slots[j].components.len() {
                    let xj = x[jstart + col_off];
                    if xj == 0 {
                        continue;
                    }
                    let col = &columns[jstart + col_off];
                    for row in 0..len {
                        let a_entry = col[start + row] % p;
                        let sub = (a_entry as u128 * scale as u128 % m_i as u128)
                            * (xj as u128 % m_i as u128)
                            % m_i as u128;
                        rhs[row] =
                            ((rhs[row] as u128 + m_i as u128 - sub) % m_i as u128) as u64;
                    }
                }
            }
            let block: Vec<Vec<u64>> = (0..len)
                .map(|row| {
                    (0..len)
                        .map(|col| columns[start + col][start + row] % p)
                        .collect()
                })
                .collect();
            let binv = invert_mod(&block, m_i)?;
            for row in 0..len {
                let mut acc: u128 = 0;
                for col in 0..len {
                    acc = (acc + binv[row][col] as u128 * rhs[col] as u128) % m_i as u128;
                }
                x[start + row] = acc as u64;
            }
        }
        Ok(x)
    };
    let tgt_group = target.group().clone();
    let coord_of_component: HashMap<usize, usize> = coord_component
        .iter()
        .enumerate()
        .map(|(coord, &comp)| (comp, coord))
        .collect();
    let mut images = Vec::with_capacity(num_components);
    for comp in 0..num_components {
        let image = if let Some(&coord) = coord_of_component.get(&comp) {
            let mut y = vec![0u64; ambient];
            y[coord] = 1;
            let x = solve_phi(&y)?;
            let mut residues = vec![0i64; tgt_group.num_components()];
            for c2 in 0..ambient {
                let comp2 = coord_component[c2];
                let r2 = slots[coord_slot[c2]].r;
                if kill_column[c2] {
                    if r2 >= 2 {
                        let tc = target_component_of[&comp2];
                        residues[tc] = (x[c2] % p.pow(r2 - 1)) as i64;
                    }
                } else {
                    let tc = target_component_of[&comp2];
                    residues[tc] = x[c2] as i64;
                }
            }
            tgt_group.element(&residues)?
        } else {
            let tc = target_component_of[&comp];
            let mut residues = vec![0i64; tgt_group.num_components()];
            residues[tc] = 1;
            tgt_group.element(&residues)?
        };
        images.push(image);
    }
    let hom = FilteredHomomorphism::new(source.clone(), target.clone(), images)?;
    Ok((target, hom))
}

/// A homomorphism of filtered groups given by generator images, validated
/// to respect component orders and to map `chain_src[i]` into
/// `chain_tgt[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredHomomorphism {
    source: FilteredGroup,
    target: FilteredGroup,
    images: Vec<GroupElement>,
}

/// Cap on subgroup closures computed while checking surjectivity.
pub const MAX_CLOSURE: u128 = 1 << 22;

impl FilteredHomomorphism {
    pub fn new(
        source: FilteredGroup,
        target: FilteredGroup,
        images: Vec<GroupElement>,
    ) -> Result<Self> {
        if source.p() != target.p() {
            return Err(Error::mismatch("filtered homomorphism across primes"));
        }
        if images.len() != source.group().num_components() {
            return Err(Error::precondition(
                "one generator image per source component required",
            ));
        }
        for (j, u) in images.iter().enumerate() {
            if u.group() != target.group() {
                return Err(Error::mismatch("generator image in wrong group"));
            }
            let ord = num_bigint::BigInt::from(source.group().component_modulus(j));
            if !u.scalar_big(&ord).is_zero() {
                return Err(Error::precondition(format!(
                    "image of generator {j} does not respect the component order"
                )));
            }
        }
        let hom = FilteredHomomorphism {
            source,
            target,
            images,
        };
        let max_level = hom.source.degree().max(hom.target.degree()) + 1;
        for i in 0..=max_level {
            let tgt = hom.target.subgroup_at(i);
            for g in hom.source.subgroup_at(i).generators(hom.source.group()) {
                if !tgt.contains(hom.target.group(), &hom.apply(&g)?) {
                    return Err(Error::precondition(format!(
                        "image of chain[{i}] escapes the target chain"
                    )));
                }
            }
        }
        Ok(hom)
    }

    pub fn identity(f: &FilteredGroup) -> Result<Self> {
        let images = (0..f.group().num_components())
            .map(|j| f.group().generator(j))
            .collect();
        FilteredHomomorphism::new(f.clone(), f.clone(), images)
    }

    pub fn source(&self) -> &FilteredGroup {
        &self.source
    }

    pub fn target(&self) -> &FilteredGroup {
        &self.target
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        if x.group() != self.source.group() {
            return Err(Error::mismatch("element outside the source group"));
        }
        let mut acc = self.target.group().zero();
        for (xj, u) in x.residues().iter().zip(&self.images) {
            if *xj != 0 {
                acc = acc.add(&u.scalar(*xj as i64))?;
            }
        }
        Ok(acc)
    }

    /// Size of the subgroup generated by the images of `sub`'s generators,
    /// by breadth-first closure.
    fn image_order(&self, sub: &ComponentwiseSubgroup) -> Result<u128> {
        let gens: Vec<GroupElement> = sub
            .generators(self.source.group())
            .iter()
            .map(|g| self.apply(g))
            .collect::<Result<_>>()?;
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let zero = self.target.group().zero();
        seen.insert(zero.residues().to_vec());
        let mut frontier = vec![zero];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = x.add(g)?;
                if seen.insert(y.residues().to_vec()) {
                    if seen.len() as u128 > MAX_CLOSURE {
                        return Err(Error::CapExceeded {
                            what: "subgroup closure",
                            got: seen.len() as u128,
                            cap: MAX_CLOSURE,
                        });
                    }
                    frontier.push(y);
                }
            }
        }
        Ok(seen.len() as u128)
    }

    /// Levelwise surjectivity `psi(chain_src[i]) = chain_tgt[i]`, the
    /// fibration criterion for abelian group nilspaces.
    pub fn is_levelwise_surjective(&self) -> Result<bool> {
        let max_level = self.source.degree().max(self.target.degree()) + 1;
        for i in 0..=max_level {
            let img = self.image_order(self.source.subgroup_at(i))?;
            if img != self.target.level_order(i) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Budget for the brute-force corner-lifting audit (tables enumerated).
pub const FIBRATION_AUDIT_BUDGET: u128 = 2_000_000;

/// Fibration check: levelwise surjectivity (fast path), plus a brute-force
/// corner-lifting audit at dimensions `<= n_max` wherever the table count
/// fits the budget. Disagreement between the two is a hard invariant
/// failure.
pub fn check_fibration(psi: &FilteredHomomorphism, n_max: u32) -> Result<bool> {
    if n_max > 5 {
        return Err(Error::CapExceeded {
            what: "fibration audit dimension",
            got: n_max as u128,
            cap: 5,
        });
    }
    let fast = psi.is_levelwise_surjective()?;
    for n in 1..=n_max {
        let src_order = psi.source().group().order();
        match src_order.checked_pow((1u32 << n) - 1) {
            Some(t) if t <= FIBRATION_AUDIT_BUDGET => {}
            _ => continue,
        }
        let audit = audit_corner_lifting(psi, n)?;
        if audit != fast {
            return Err(Error::Invariant(format!(
                "fibration fast path ({fast}) disagrees with corner-lifting audit ({audit}) at n={n}"
            )));
        }
    }
    Ok(fast)
}

/// For every valid n-corner on the source, the pushforward of its completion
/// set must equal the completion set of the projected corner.
fn audit_corner_lifting(psi: &FilteredHomomorphism, n: u32) -> Result<bool> {
    let src = psi.source();
    let tgt = psi.target();
    let src_elems = src.group().elements(FIBRATION_AUDIT_BUDGET)?;
    let vertices = (1usize << n) - 1;
    let mut table_idx = vec![0usize; vertices];
    loop {
        let values: Vec<GroupElement> =
            table_idx.iter().map(|&i| src_elems[i].clone()).collect();
        let corner = crate::cube::Corner::new(src.group().clone(), n, values.clone())?;
        if let Ok(src_completions) = crate::cube::complete_corner(&corner, src) {
            let pushed: HashSet<Vec<u64>> = src_completions
                .iter()
                .map(|x| psi.apply(x).map(|y| y.residues().to_vec()))
                .collect::<Result<_>>()?;
            let proj_values: Vec<GroupElement> = values
                .iter()
                .map(|x| psi.apply(x))
                .collect::<Result<_>>()?;
            let proj_corner = crate::cube::Corner::new(tgt.group().clone(), n, proj_values)?;
            let tgt_completions = crate::cube::complete_corner(&proj_corner, tgt)
                .map_err(|_| Error::Invariant("projected corner invalid".into()))?;
            let tgt_set: HashSet<Vec<u64>> = tgt_completions
                .iter()
                .map(|x| x.residues().to_vec())
                .collect();
            if pushed != tgt_set {
                return Ok(false);
            }
        }
        let mut j = 0;
        loop {
            if j == vertices {
                return Ok(true);
            }
            table_idx[j] += 1;
            if table_idx[j] < src_elems.len() {
                break;
            }
            table_idx[j] = 0;
            j += 1;
        }
    }
}

/// Caps for the lifting search.
pub const MAX_LIFT_POINTS: u128 = 10_000;
pub const MAX_LIFT_CANDIDATES: u128 = 1 << 20;

/// Lift a morphism `f : Z_p^n -> target` through a fibration
/// `psi : source -> target` with p-homogeneous source: choose coefficient
/// preimages levelwise, then search kernel-valued polynomial corrections in
/// colex coefficient order until the candidate passes the `Z_p^n` morphism
/// test. Existence is guaranteed by the lifting theorem; exhausting the
/// search therefore signals a bug and is reported as such.
pub fn lift_morphism(
    psi: &FilteredHomomorphism,
    f: &crate::cube::BoxMap,
) -> Result<crate::cube::BoxMap> {
    let src = psi.source();
    let tgt = psi.target();
    let p = src.p();
    if !src.is_p_homogeneous() {
        return Err(Error::precondition(
            "lifting requires a p-homogeneous source",
        ));
    }
    if !psi.is_levelwise_surjective()? {
        return Err(Error::precondition("psi is not a fibration"));
    }
    let n = f.extents().len();
    let total = (p as u128).pow(n as u32);
    if total > MAX_LIFT_POINTS {
        return Err(Error::CapExceeded {
            what: "lift domain points",
            got: total,
            cap: MAX_LIFT_POINTS,
        });
    }
    if !is_hom_zpn(f, tgt)? {
        return Err(Error::precondition("f is not a morphism from Z_p^n"));
    }
    let coeffs = from_values(f, tgt.clone())?;
    let mut lifted: BTreeMap<MultiIndex, GroupElement> = BTreeMap::new();
    for (w, a) in coeffs.coeffs() {
        let h = w.height();
        if h > src.degree() {
            return Err(Error::Invariant(format!(
                "coefficient of height {h} cannot be lifted into a degree-{} source",
                src.degree()
            )));
        }
        let candidates = src.subgroup_at(h).elements(src.group(), MAX_CLOSURE)?;
        let pre = candidates
            .into_iter()
            .find(|u| psi.apply(u).map(|y| &y == a).unwrap_or(false))
            .ok_or_else(|| Error::Invariant("fibration has no levelwise preimage (bug)".into()))?;
        lifted.insert(w.clone(), pre);
    }
    let base_poly = crate::poly::PolyMap::new(n, src.clone(), lifted)?;
    let base = base_poly.values_on_box(f.extents())?;
    if is_hom_zpn(&base, src)? {
        return Ok(base);
    }
    // kernel-valued corrections per coefficient slot, colex order
    let mut slots: Vec<(MultiIndex, Vec<GroupElement>)> = Vec::new();
    let mut w = vec![0u32; n];
    let box_total: u128 = f.extents().iter().map(|&l| l as u128 + 1).product();
    for _ in 0..box_total {
        let midx = MultiIndex(w.clone());
        let h = midx.height();
        if h <= src.degree() {
            let kernel: Vec<GroupElement> = src
                .subgroup_at(h)
                .elements(src.group(), MAX_CLOSURE)?
                .into_iter()
                .filter(|u| psi.apply(u).map(|y| y.is_zero()).unwrap_or(false))
                .collect();
            if kernel.len() > 1 {
                slots.push((midx, kernel));
            }
        }
        for j in 0..n {
            w[j] += 1;
            if w[j] <= f.extents()[j] {
                break;
            }
            w[j] = 0;
        }
    }
    let mut budget: u128 = 1;
    for (_, ker) in &slots {
        budget = budget.saturating_mul(ker.len() as u128);
        if budget > MAX_LIFT_CANDIDATES {
            return Err(Error::Budget(format!(
                "correction search space {budget} exceeds cap {MAX_LIFT_CANDIDATES}"
            )));
        }
    }
    let extents = f.extents().to_vec();
    let slot_tables: Vec<Vec<Vec<GroupElement>>> = slots
        .iter()
        .map(|(w, ker)| {
            ker.iter()
                .map(|u| {
                    let mut coeffs = BTreeMap::new();
                    coeffs.insert(w.clone(), u.clone());
                    let poly = crate::poly::PolyMap::new(n, src.clone(), coeffs)?;
                    Ok(poly.values_on_box(&extents)?.values().to_vec())
                })
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let mut choice = vec![0usize; slots.len()];
    loop {
        let mut j = 0;
        loop {
            if j == slots.len() {
                return Err(Error::Budget(
                    "correction search exhausted without a lift; this contradicts the \
                     lifting theorem and signals a bug"
                        .into(),
                ));
            }
            choice[j] += 1;
            if choice[j] < slots[j].1.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        let mut values = base.values().to_vec();
        for (s, &c) in choice.iter().enumerate() {
            if c != 0 {
                for (v, add) in values.iter_mut().zip(&slot_tables[s][c]) {
                    *v = v.add(add)?;
                }
            }
        }
        let candidate =
            crate::cube::BoxMap::new(src.group().clone(), vec![0; n], extents.clone(), values)?;
        if is_hom_zpn(&candidate, src)? {
            return Ok(candidate);
        }
    }
}

/// A product `prod_{i<=k} D_i(Z_p^{a_i})` together with the coordinate
/// blocking, the ambient space of the translation calculus for `k <= p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTower {
    p: u64,
    blocks: Vec<u32>,
}

pub const MAX_TOWER_ORDER: u128 = 10_000;

impl DTower {
    pub fn new(p: u64, blocks: Vec<u32>) -> Result<Self> {
        let k = blocks.len() as u32;
        if k == 0 {
            return Err(Error::precondition("tower needs at least one block"));
        }
        if k as u64 > p {
            return Err(Error::precondition(format!(
                "translation description requires k <= p, got k={k}, p={p}"
            )));
        }
        let total: u32 = blocks.iter().sum();
        let order = (p as u128).pow(total);
        if order > MAX_TOWER_ORDER {
            return Err(Error::CapExceeded {
                what: "tower order",
                got: order,
                cap: MAX_TOWER_ORDER,
            });
        }
        Ok(DTower { p, blocks })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    /// The realized filtration `prod_i D_i(Z_p^{a_i})`, components in block
    /// order.
    pub fn realize(&self) -> Result<FilteredGroup> {
        let mut acc: Option<FilteredGroup> = None;
        for (i, &a) in self.blocks.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let f = FilteredGroup::make_dk(
                FiniteAbelianPGroup::elementary(self.p, a as usize)?,
                i as u32 + 1,
            )?;
            acc = Some(match acc {
                None => f,
                Some(prev) => prev.product(&f)?,
            });
        }
        match acc {
            Some(f) => Ok(f),
            None => FilteredGroup::make_dk(FiniteAbelianPGroup::trivial(self.p)?, self.k()),
        }
    }

    /// Filtration of the prefix `prod_{j < i} D_j(Z_p^{a_j})` (1-based i).
    fn prefix(&self, i: usize) -> Result<FilteredGroup> {
        let blocks = self.blocks[..i - 1].to_vec();
        if blocks.is_empty() || blocks.iter().all(|&a| a == 0) {
            return FilteredGroup::make_dk(FiniteAbelianPGroup::trivial(self.p)?, 1);
        }
        DTower::new(self.p, blocks)?.realize()
    }

    fn block_offset(&self, i: usize) -> usize {
        self.blocks[..i].iter().map(|&a| a as usize).sum()
    }
}

/// A translation of `prod_i D_i(Z_p^{a_i})` given by the tuple
/// `(T_1, T_2(x_1), ..., T_k(x_1..x_{k-1}))`: `T_1` is a constant and each
/// `T_i` a morphism from the prefix into `D_{i-1}(Z_p^{a_i})`, stored as a
/// validated value table. The action is
/// `alpha(x) = x + (T_1, T_2(x_1), ..., T_k(x_1..x_{k-1}))`.
#[derive(Clone, Debug)]
pub struct TranslationTuple {
    tower: DTower,
    t1: Vec<u64>,
    /// maps[i-2][prefix_index] = value of T_i in Z_p^{a_i}
    maps: Vec<Vec<Vec<u64>>>,
}

impl TranslationTuple {
    pub fn new(tower: DTower, t1: Vec<u64>, maps: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let p = tower.p();
        if t1.len() != tower.blocks()[0] as usize || t1.iter().any(|&x| x >= p) {
            return Err(Error::precondition(
                "T_1 must be a reduced vector in Z_p^{a_1}",
            ));
        }
        if maps.len() + 1 != tower.k() as usize {
            return Err(Error::precondition("need one map T_i per level 2..k"));
        }
        for (idx, table) in maps.iter().enumerate() {
            let i = idx + 2;
            let prefix = tower.prefix(i)?;
            let a_i = tower.blocks()[i - 1] as usize;
            if table.len() as u128 != prefix.group().order() {
                return Err(Error::precondition(format!(
                    "T_{i} table must have one entry per prefix element"
                )));
            }
            let tgt =
                FilteredGroup::make_dk(FiniteAbelianPGroup::elementary(p, a_i)?, i as u32 - 1)?;
            let values: Vec<GroupElement> = table
                .iter()
                .map(|v| {
                    if v.len() != a_i {
                        return Err(Error::precondition(format!(
                            "T_{i} values must lie in Z_p^{a_i}"
                        )));
                    }
                    tgt.group()
                        .element(&v.iter().map(|&x| x as i64).collect::<Vec<_>>())
                })
                .collect::<Result<_>>()?;
            if !is_filtered_hom_table(&values, &prefix, &tgt)? {
                return Err(Error::precondition(format!(
                    "T_{i} is not a morphism into D_{}(Z_p^{a_i})",
                    i - 1
                )));
            }
        }
        Ok(TranslationTuple { tower, t1, maps })
    }

    /// The identity translation (all T_i = 0).
    pub fn identity(tower: DTower) -> Result<Self> {
        let t1 = vec![0; tower.blocks()[0] as usize];
        let maps = (2..=tower.k() as usize)
            .map(|i| {
                let prefix_order: usize = tower.blocks()[..i - 1]
                    .iter()
                    .map(|&a| (tower.p() as usize).pow(a))
                    .product();
                vec![vec![0u64; tower.blocks()[i - 1] as usize]; prefix_order]
            })
            .collect();
        TranslationTuple::new(tower, t1, maps)
    }

    pub fn tower(&self) -> &DTower {
        &self.tower
    }

    /// `alpha(x) = x + (T_1, T_2(x_1), ..., T_k(x_1..x_{k-1}))`.
    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement> {
        let p = self.tower.p();
        let mut res: Vec<i64> = x.residues().iter().map(|&v| v as i64).collect();
        for (j, &t) in self.t1.iter().enumerate() {
            res[j] = (res[j] + t as i64).rem_euclid(p as i64);
        }
        for (idx, table) in self.maps.iter().enumerate() {
            let i = idx + 2;
            let prefix_len = self.tower.block_offset(i - 1);
            let mut pidx = 0usize;
            for j in (0..prefix_len).rev() {
                pidx = pidx * p as usize + x.residues()[j] as usize;
            }
            let off = self.tower.block_offset(i - 1);
            for (j, &t) in table[pidx].iter().enumerate() {
                res[off + j] = (res[off + j] + t as i64).rem_euclid(p as i64);
            }
        }
        x.group().element(&res)
    }

    /// Apply vertex-wise to every coefficient-enumerated cube of dimension
    /// n and confirm the images are cubes.
    pub fn preserves_cubes(&self, filt: &FilteredGroup, n: u32, budget: u128) -> Result<bool> {
        translation_preserves_cubes(filt, n, budget, &|x| self.apply(x))
    }
}

/// Check that a pointwise action preserves `Cu^n`, enumerating cubes by
/// coefficients.
pub fn translation_preserves_cubes(
    filt: &FilteredGroup,
    n: u32,
    budget: u128,
    action: &dyn Fn(&GroupElement) -> Result<GroupElement>,
) -> Result<bool> {
    let count = cube_count(filt, n);
    if count > budget {
        return Err(Error::CapExceeded {
            what: "cube enumeration",
            got: count,
            cap: budget,
        });
    }
    let mut ok = true;
    for_each_cube(filt, n, &mut |q| {
        if !ok {
            return Ok(());
        }
        let moved: Vec<GroupElement> = q.values().iter().map(action).collect::<Result<_>>()?;
        let mq = CubeMap::new(filt.group().clone(), n, moved)?;
        if !is_cube(&mq, filt)? {
            ok = false;
        }
        Ok(())
    })?;
    Ok(ok)
}

/// Enumerate `Cu^n(filt)` through the coefficient parametrization, calling
/// `f` on each cube in a deterministic order.
pub fn for_each_cube(
    filt: &FilteredGroup,
    n: u32,
    f: &mut dyn FnMut(&CubeMap) -> Result<()>,
) -> Result<()> {
    let vertex_subgroups: Vec<Vec<GroupElement>> = (0..(1usize << n))
        .map(|idx| {
            filt.subgroup_at(idx.count_ones())
                .elements(filt.group(), MAX_CLOSURE)
        })
        .collect::<Result<_>>()?;
    let mut choice = vec![0usize; 1usize << n];
    loop {
        let coeffs: Vec<GroupElement> = choice
            .iter()
            .enumerate()
            .map(|(idx, &c)| vertex_subgroups[idx][c].clone())
            .collect();
        let q = CubeMap::from_coeffs(filt.group().clone(), n, coeffs)?;
        f(&q)?;
        let mut j = 0;
        loop {
            if j == choice.len() {
                return Ok(());
            }
            choice[j] += 1;
            if choice[j] < vertex_subgroups[j].len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// Morphism test for a value table on a finite filtered group with
/// exponent-p underlying group: iterated cyclic differences along component
/// generators, each weighted by the deepest chain level containing it, must
/// land in the target chain at the accumulated weight.
pub fn is_filtered_hom_table(
    values: &[GroupElement],
    dom: &FilteredGroup,
    tgt: &FilteredGroup,
) -> Result<bool> {
    let p = dom.p();
    if tgt.p() != p {
        return Err(Error::mismatch("domain and target primes differ"));
    }
    if dom.group().orders().iter().any(|&r| r != 1) {
        return Err(Error::precondition(
            "table morphism test requires an exponent-p domain",
        ));
    }
    if values.len() as u128 != dom.group().order() {
        return Err(Error::precondition(
            "table size must match the domain order",
        ));
    }
    let n = dom.group().num_components();
    // weight of generator e_c: deepest level whose chain still contains it
    let weights: Vec<u32> = (0..n)
        .map(|c| {
            (1..=dom.degree())
                .filter(|&i| dom.subgroup_at(i).exponents()[c] == 0)
                .max()
                .unwrap_or(0)
        })
        .collect();
    if weights.iter().any(|&w| w == 0) {
        return Err(Error::precondition(
            "every domain component must appear in chain[1]",
        ));
    }
    let depth = (1..=tgt.degree() + 1)
        .find(|&j| tgt.subgroup_at(j).is_zero(tgt.group()))
        .unwrap_or(tgt.degree() + 1);
    fn diff(values: &[GroupElement], p: usize, axis: usize) -> Vec<GroupElement> {
        let stride = p.pow(axis as u32);
        let block = stride * p;
        (0..values.len())
            .map(|idx| {
                let pos = (idx / stride) % p;
                let shifted = if pos + 1 == p {
                    idx + stride - block
                } else {
                    idx + stride
                };
                values[shifted].sub(&values[idx]).expect("same group")
            })
            .collect()
    }
    fn rec(
        values: &[GroupElement],
        weight: u32,
        min_axis: usize,
        p: usize,
        weights: &[u32],
        depth: u32,
        tgt: &FilteredGroup,
    ) -> bool {
        if weight >= depth {
            return true;
        }
        for axis in min_axis..weights.len() {
            let new_weight = weight + weights[axis];
            let next = diff(values, p, axis);
            let sub = tgt.subgroup_at(new_weight.min(depth));
            if !next.iter().all(|x| sub.contains(tgt.group(), x)) {
                return false;
            }
            if !rec(&next, new_weight, axis, p, weights, depth, tgt) {
                return false;
            }
        }
        true
    }
    Ok(rec(values, 0, 0, p as usize, &weights, depth, tgt))
}

/// Translation data: either translation by a fixed group element or a
/// high-characteristic tuple.
pub enum TranslationData<'a> {
    Add(&'a GroupElement),
    Tuple(&'a TranslationTuple),
}

/// Verify that the order of the translation divides
/// `p^{floor((k - level)/(p-1)) + 1}`, by computing the permutation order
/// of the action on the (capped) space.
pub fn translation_p_power_check(
    filt: &FilteredGroup,
    alpha: &TranslationData<'_>,
    level: u32,
) -> Result<bool> {
    let order = filt.group().order();
    if order > MAX_TOWER_ORDER {
        return Err(Error::CapExceeded {
            what: "translation space order",
            got: order,
            cap: MAX_TOWER_ORDER,
        });
    }
    let n = order as usize;
    let mut perm = vec![0usize; n];
    for (idx, slot) in perm.iter_mut().enumerate() {
        let x = filt.group().element_at(idx as u128);
        let y = match alpha {
            TranslationData::Add(g) => x.add(g)?,
            TranslationData::Tuple(t) => t.apply(&x)?,
        };
        *slot = filt.group().index_of(&y) as usize;
    }
    let mut order_lcm: u128 = 1;
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0u128;
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cur = perm[cur];
            len += 1;
        }
        order_lcm = lcm_u128(order_lcm, len);
    }
    let k = filt.degree();
    let bound = (filt.p() as u128).pow(k.saturating_sub(level) / (filt.p() as u32 - 1) + 1);
    Ok(bound % order_lcm == 0)
}

fn lcm_u128(a: u128, b: u128) -> u128 {
    fn gcd(mut a: u128, mut b: u128) -> u128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::BoxMap;

    #[test]
    fn qpk_enumeration_example() {
        // p=3, k=2, bound 9: six members with orders 1,3,3,9,9,9
        let members = enumerate_qpk(3, 2, 9).unwrap();
        assert_eq!(members.len(), 6);
        let mut orders: Vec<u128> = members.iter().map(|m| m.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![1, 3, 3, 9, 9, 9]);
        // bound 0 keeps only the trivial member
        assert_eq!(enumerate_qpk(3, 2, 0).unwrap().len(), 1);
        // all members realize to p-homogeneous filtrations
        for m in enumerate_qpk(3, 4, 81).unwrap() {
            assert!(GroupNilspace::new(m.realize().unwrap()).is_p_homogeneous());
        }
    }

    #[test]
    fn non_homogeneous_counterexample() {
        let g = FiniteAbelianPGroup::cyclic(3, 2).unwrap();
        let x = GroupNilspace::new(FilteredGroup::make_dk(g, 2).unwrap());
        assert!(!x.is_p_homogeneous());
    }

    fn member_4_2_4() -> QpkMember {
        // Z_{4,2}^(3) x Z_{4,4}^(3)
        QpkMember::new(3, 4, vec![0, 1, 0, 1]).unwrap()
    }

    fn subspace(vs: &[Vec<u64>]) -> FpSubspace {
        FpSubspace::from_vectors(3, 2, vs).unwrap()
    }

    #[test]
    fn quotient_worked_examples() {
        let x = member_4_2_4();
        // H = Z_3^2 -> D_2(Z_3)
        let q = quotient_by_subspace(&x, &subspace(&[vec![1, 0], vec![0, 1]])).unwrap();
        let mut want = IsoType::new(3);
        want.push(3, 2, 1);
        assert_eq!(q.iso_type, want);
        assert_eq!(q.iso_type.to_string(), "D(2;Z[3])");
        // H = <(1,0)> -> D_2(Z_3) x D_4(Z_3)
        let q = quotient_by_subspace(&x, &subspace(&[vec![1, 0]])).unwrap();
        let mut want = IsoType::new(3);
        want.push(3, 2, 1);
        want.push(4, 4, 1);
        assert_eq!(q.iso_type, want);
        // H = <(0,1)> -> Z_{4,2}
        let q = quotient_by_subspace(&x, &subspace(&[vec![0, 1]])).unwrap();
        let mut want = IsoType::new(3);
        want.push(4, 2, 1);
        assert_eq!(q.iso_type, want);
        assert_eq!(q.iso_type.to_string(), "Z(4,2;3)");
        // H = <(1,1)> -> Z_{4,2}
        let q = quotient_by_subspace(&x, &subspace(&[vec![1, 1]])).unwrap();
        assert_eq!(q.iso_type, want);
    }

    #[test]
    fn quotient_certificate_properties() {
        let x = member_4_2_4();
        for h in [
            subspace(&[vec![1, 0], vec![0, 1]]),
            subspace(&[vec![1, 0]]),
            subspace(&[vec![0, 1]]),
            subspace(&[vec![1, 1]]),
            subspace(&[vec![2, 1]]),
        ] {
            let q = quotient_by_subspace(&x, &h).unwrap();
            assert!(q.quotient.is_p_homogeneous());
            assert!(check_fibration(&q.projection, 2).unwrap());
            assert_eq!(
                q.quotient.group().order(),
                x.realize().unwrap().group().order() / 3u128.pow(h.dim() as u32)
            );
        }
        // ambient mismatch is a precondition error
        let bad = FpSubspace::from_vectors(3, 3, &[vec![1, 0, 0]]).unwrap();
        assert!(quotient_by_subspace(&x, &bad).is_err());
    }

    #[test]
    fn quotient_invariant_under_subspace_automorphism() {
        // <(1,1)> and <(2,2)> generate the same subspace
        let x = member_4_2_4();
        let a = quotient_by_subspace(&x, &subspace(&[vec![1, 1]])).unwrap();
        let b = quotient_by_subspace(&x, &subspace(&[vec![2, 2]])).unwrap();
        assert_eq!(a.iso_type, b.iso_type);
    }

    #[test]
    fn fibration_examples() {
        // mod-p projection Z_{3,1} -> D_1(Z_3)
        let src = FilteredGroup::make_zkl(3, 3, 1).unwrap();
        let tgt = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 1).unwrap(), 1).unwrap();
        let psi = FilteredHomomorphism::new(
            src.clone(),
            tgt.clone(),
            vec![tgt.group().element(&[1]).unwrap()],
        )
        .unwrap();
        assert!(check_fibration(&psi, 2).unwrap());
        let id = FilteredHomomorphism::identity(&src).unwrap();
        assert!(check_fibration(&id, 2).unwrap());
        // inclusion D_1(Z_3) -> Z_{3,1} sending 1 -> 3 is filtered but not
        // levelwise surjective
        let incl = FilteredHomomorphism::new(
            tgt.clone(),
            src.clone(),
            vec![src.group().element(&[3]).unwrap()],
        )
        .unwrap();
        assert!(!check_fibration(&incl, 2).unwrap());
    }

    #[test]
    fn lift_identity_through_zp1() {
        // splitting witness: a morphism section of Z_{p,1} -> D_1(Z_p)
        for p in [2u64, 3] {
            let src = FilteredGroup::make_zkl(p, p as u32, 1).unwrap();
            let tgt =
                FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(p, 1).unwrap(), 1).unwrap();
            let psi = FilteredHomomorphism::new(
                src.clone(),
                tgt.clone(),
                vec![tgt.group().element(&[1]).unwrap()],
            )
            .unwrap();
            let f = BoxMap::from_fn(tgt.group().clone(), vec![0], vec![p as u32 - 1], |pt| {
                tgt.group().element(&[pt[0]])
            })
            .unwrap();
            let lift = lift_morphism(&psi, &f).unwrap();
            assert!(is_hom_zpn(&lift, &src).unwrap());
            for x in 0..p as i64 {
                assert_eq!(
                    psi.apply(lift.value_at(&[x]).unwrap()).unwrap(),
                    *f.value_at(&[x]).unwrap()
                );
            }
        }
    }

    #[test]
    fn lift_through_identity_is_trivial() {
        let src = FilteredGroup::make_zkl(3, 3, 1).unwrap();
        let id = FilteredHomomorphism::identity(&src).unwrap();
        let f = BoxMap::from_fn(src.group().clone(), vec![0], vec![2], |pt| {
            src.group().element(&[pt[0]])
        })
        .unwrap();
        let lift = lift_morphism(&id, &f).unwrap();
        assert_eq!(lift.values(), f.values());
    }

    #[test]
    fn exhaustive_lift_of_all_morphisms() {
        // every affine morphism Z_3 -> D_1(Z_3) lifts through Z_{3,1}
        let p = 3u64;
        let src = FilteredGroup::make_zkl(p, 3, 1).unwrap();
        let tgt = FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(p, 1).unwrap(), 1).unwrap();
        let psi = FilteredHomomorphism::new(
            src.clone(),
            tgt.clone(),
            vec![tgt.group().element(&[1]).unwrap()],
        )
        .unwrap();
        let mut count = 0;
        for a in 0..3i64 {
            for b in 0..3i64 {
                let f = BoxMap::from_fn(tgt.group().clone(), vec![0], vec![2], |pt| {
                    tgt.group().element(&[a + b * pt[0]])
                })
                .unwrap();
                if is_hom_zpn(&f, &tgt).unwrap() {
                    let lift = lift_morphism(&psi, &f).unwrap();
                    assert!(is_hom_zpn(&lift, &src).unwrap());
                    count += 1;
                }
            }
        }
        assert_eq!(count, 9);
    }

    #[test]
    fn translation_tuple_action() {
        // X = D_1(Z_3) x D_2(Z_3), alpha with T_2(x_1) = x_1
        let tower = DTower::new(3, vec![1, 1]).unwrap();
        let filt = tower.realize().unwrap();
        let t2: Vec<Vec<u64>> = (0..3).map(|x1| vec![x1 as u64]).collect();
        let alpha = TranslationTuple::new(tower.clone(), vec![0], vec![t2]).unwrap();
        let id = TranslationTuple::identity(tower.clone()).unwrap();
        for idx in 0..9 {
            let x = filt.group().element_at(idx);
            assert_eq!(id.apply(&x).unwrap(), x);
        }
        // constant-only tuple translates the first block
        let c = TranslationTuple::new(tower.clone(), vec![2], vec![vec![vec![0]; 3]]).unwrap();
        let x = filt.group().element(&[1, 1]).unwrap();
        assert_eq!(c.apply(&x).unwrap(), filt.group().element(&[0, 1]).unwrap());
        // cube preservation for n <= 3
        for n in 1..=3 {
            assert!(alpha.preserves_cubes(&filt, n, 1 << 22).unwrap(), "n={n}");
        }
        // a non-morphism table is rejected
        let bad: Vec<Vec<u64>> = vec![vec![0], vec![1], vec![0]];
        assert!(TranslationTuple::new(tower, vec![0], vec![bad]).is_err());
    }

    #[test]
    fn translation_p_power_examples() {
        // adding g of order p^r in Z_{k,l} at level l
        let f = FilteredGroup::make_zkl(3, 4, 2).unwrap();
        let g = f.group().element(&[1]).unwrap();
        assert!(translation_p_power_check(&f, &TranslationData::Add(&g), 2).unwrap());
        let zero = f.group().zero();
        assert!(translation_p_power_check(&f, &TranslationData::Add(&zero), 4).unwrap());
        // tuples with k <= p have order dividing p at level 1
        let tower = DTower::new(3, vec![1, 1]).unwrap();
        let filt = tower.realize().unwrap();
        let t2: Vec<Vec<u64>> = (0..3).map(|x1| vec![(2 * x1 as u64) % 3]).collect();
        let alpha = TranslationTuple::new(tower, vec![1], vec![t2]).unwrap();
        assert!(translation_p_power_check(&filt, &TranslationData::Tuple(&alpha), 1).unwrap());
    }

    #[test]
    fn filtered_hom_table_weighted() {
        // D_1(Z_3) x D_2(Z_3) -> D_1(Z_3): x_1 projects, x_2 does not
        let tower = DTower::new(3, vec![1, 1]).unwrap();
        let dom = tower.realize().unwrap();
        let z3 = FiniteAbelianPGroup::cyclic(3, 1).unwrap();
        let d1 = FilteredGroup::make_dk(z3.clone(), 1).unwrap();
        let proj1: Vec<GroupElement> = (0..9)
            .map(|idx| {
                let x = dom.group().element_at(idx);
                z3.element(&[x.residues()[0] as i64]).unwrap()
            })
            .collect();
        assert!(is_filtered_hom_table(&proj1, &dom, &d1).unwrap());
        let proj2: Vec<GroupElement> = (0..9)
            .map(|idx| {
                let x = dom.group().element_at(idx);
                z3.element(&[x.residues()[1] as i64]).unwrap()
            })
            .collect();
        assert!(!is_filtered_hom_table(&proj2, &dom, &d1).unwrap());
        // but x_2 projects fine into D_2(Z_3)
        let d2 = FilteredGroup::make_dk(z3, 2).unwrap();
        assert!(is_filtered_hom_table(&proj2, &dom, &d2).unwrap());
    }
}
