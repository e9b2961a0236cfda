//! Host-Kra cube calculus: cube membership via the binomial-coefficient
//! expansion, Gray-code sums, corner and box completion, maximal cubes, and
//! p-discrete-cube morphisms.
//!
//! Vertex indexing is frozen: bit `i` of a table index is coordinate
//! `v(i+1)`, so the top vertex `1^n` has index `2^n - 1`. Box tables are
//! mixed-radix with coordinate 1 fastest, which makes table order equal to
//! colexicographic order on box points.

use crate::filtration::FilteredGroup;
use crate::group::{ComponentwiseSubgroup, FiniteAbelianPGroup, GroupElement};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Hard cap on cube dimension (2^n table entries).
pub const MAX_CUBE_DIM: u32 = 20;
/// Hard cap on box tables.
pub const MAX_BOX_POINTS: u128 = 1_000_000;

/// A value table on `{0,1}^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeMap {
    group: FiniteAbelianPGroup,
    n: u32,
    values: Vec<GroupElement>,
}

impl CubeMap {
    pub fn new(group: FiniteAbelianPGroup, n: u32, values: Vec<GroupElement>) -> Result<Self> {
        if n > MAX_CUBE_DIM {
            return Err(Error::CapExceeded {
                what: "cube dimension",
                got: n as u128,
                cap: MAX_CUBE_DIM as u128,
            });
        }
        if values.len() != 1usize << n {
            return Err(Error::precondition(format!(
                "cube of dimension {n} needs {} values, got {}",
                1usize << n,
                values.len()
            )));
        }
        if values.iter().any(|x| x.group() != &group) {
            return Err(Error::mismatch("cube values from a different group"));
        }
        Ok(CubeMap { group, n, values })
    }

    pub fn from_fn(
        group: FiniteAbelianPGroup,
        n: u32,
        mut f: impl FnMut(&[i64]) -> Result<GroupElement>,
    ) -> Result<Self> {
        if n > MAX_CUBE_DIM {
            return Err(Error::CapExceeded {
                what: "cube dimension",
                got: n as u128,
                cap: MAX_CUBE_DIM as u128,
            });
        }
        let mut values = Vec::with_capacity(1usize << n);
        let mut v = vec![0i64; n as usize];
        for idx in 0..(1usize << n) {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = ((idx >> i) & 1) as i64;
            }
            values.push(f(&v)?);
        }
        CubeMap::new(group, n, values)
    }

    pub fn group(&self) -> &FiniteAbelianPGroup {
        &self.group
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, vertex: usize) -> &GroupElement {
        &self.values[vertex]
    }

    /// Inclusion-exclusion coefficients: `a_w = sum_{u <= w} (-1)^{|w|-|u|} q(u)`,
    /// the exact inverse of `q(v) = sum_{w <= v} a_w`.
    pub fn mobius_coeffs(&self) -> Vec<GroupElement> {
        let mut a = self.values.clone();
        for bit in 0..self.n {
            let mask = 1usize << bit;
            for idx in 0..a.len() {
                if idx & mask != 0 {
                    a[idx] = a[idx].sub(&a[idx ^ mask]).expect("same group");
                }
            }
        }
        a
    }

    /// Rebuild the value table from coefficients (zeta transform).
    pub fn from_coeffs(
        group: FiniteAbelianPGroup,
        n: u32,
        coeffs: Vec<GroupElement>,
    ) -> Result<Self> {
        let mut values = coeffs;
        for bit in 0..n {
            let mask = 1usize << bit;
            for idx in 0..values.len() {
                if idx & mask != 0 {
                    values[idx] = values[idx].add(&values[idx ^ mask]).expect("same group");
                }
            }
        }
        CubeMap::new(group, n, values)
    }

    /// `sigma_n(q) = sum_v (-1)^{n-|v|} q(v)`. For `F = D_{n-1}(A)` this
    /// vanishes exactly on cubes.
    pub fn gray_code_sum(&self) -> GroupElement {
        let mut acc = self.group.zero();
        for (idx, x) in self.values.iter().enumerate() {
            let sign_neg = (self.n - (idx.count_ones())) % 2 == 1;
            acc = if sign_neg {
                acc.sub(x).expect("same group")
            } else {
                acc.add(x).expect("same group")
            };
        }
        acc
    }

    /// Restriction to the face `v(axis+1) = fixed`, a cube of dimension n-1.
    pub fn face(&self, axis: u32, fixed: u64) -> CubeMap {
        let mask = 1usize << axis;
        let mut values = Vec::with_capacity(1usize << (self.n - 1));
        for idx in 0..(1usize << self.n) {
            if ((idx & mask != 0) as u64) == fixed {
                values.push(self.values[idx].clone());
            }
        }
        CubeMap {
            group: self.group.clone(),
            n: self.n - 1,
            values,
        }
    }
}

/// Membership in `Cu^n(G_bullet)`: every coefficient `a_w` lies in
/// `chain[|w|]`.
pub fn is_cube(q: &CubeMap, f: &FilteredGroup) -> Result<bool> {
    if q.group() != f.group() {
        return Err(Error::mismatch(format!(
            "cube over {:?}, filtration over {:?}",
            q.group(),
            f.group()
        )));
    }
    let coeffs = q.mobius_coeffs();
    Ok(coeffs.iter().enumerate().all(|(idx, a)| {
        f.subgroup_at(idx.count_ones()).contains(f.group(), a)
    }))
}

/// Number of n-cubes predicted by the coefficient parametrization:
/// `prod_{w in {0,1}^n} |chain[|w|]|`.
pub fn cube_count(f: &FilteredGroup, n: u32) -> u128 {
    let mut total: u128 = 1;
    for weight in 0..=n {
        let binom = crate::group::binom(n as i64, weight);
        let count = u32::try_from(&binom).expect("small binomial");
        let level = f.level_order(weight);
        for _ in 0..count {
            total = total.saturating_mul(level);
        }
    }
    total
}

/// A cube map missing the top vertex `1^n`; `values[i]` is vertex `i` for
/// `i < 2^n - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Corner {
    group: FiniteAbelianPGroup,
    n: u32,
    values: Vec<GroupElement>,
}

impl Corner {
    pub fn new(group: FiniteAbelianPGroup, n: u32, values: Vec<GroupElement>) -> Result<Self> {
        if n == 0 || n > MAX_CUBE_DIM {
            return Err(Error::precondition(format!(
                "corner dimension must be in [1, {MAX_CUBE_DIM}], got {n}"
            )));
        }
        if values.len() != (1usize << n) - 1 {
            return Err(Error::precondition(format!(
                "corner of dimension {n} needs {} values, got {}",
                (1usize << n) - 1,
                values.len()
            )));
        }
        if values.iter().any(|x| x.group() != &group) {
            return Err(Error::mismatch("corner values from a different group"));
        }
        Ok(Corner { group, n, values })
    }

    pub fn of_cube(q: &CubeMap) -> Result<Self> {
        let mut values = q.values().to_vec();
        values.pop();
        Corner::new(q.group().clone(), q.dim(), values)
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    /// The cube obtained by filling the top vertex with `x`.
    pub fn with_top(&self, x: GroupElement) -> Result<CubeMap> {
        let mut values = self.values.clone();
        values.push(x);
        CubeMap::new(self.group.clone(), self.n, values)
    }

    /// The lower face `v(axis+1) = 0`, a full (n-1)-cube.
    fn lower_face(&self, axis: u32) -> CubeMap {
        let mask = 1usize << axis;
        let values: Vec<GroupElement> = (0..(1usize << self.n))
            .filter(|idx| idx & mask == 0)
            .map(|idx| self.values[idx].clone())
            .collect();
        CubeMap {
            group: self.group.clone(),
            n: self.n - 1,
            values,
        }
    }

    /// The canonical completion: the value making the top coefficient zero,
    /// `x_0 = -sum_{u < 1^n} (-1)^{n-|u|} q(u)`.
    pub fn canonical_completion(&self) -> GroupElement {
        let mut acc = self.group.zero();
        for (idx, x) in self.values.iter().enumerate() {
            let sign_neg = (self.n - (idx.count_ones())) % 2 == 1;
            acc = if sign_neg {
                acc.sub(x).expect("same group")
            } else {
                acc.add(x).expect("same group")
            };
        }
        acc.neg()
    }
}

/// All valid top values completing the corner to a cube of `F`: the coset
/// `x_0 + chain[n]`, listed in the subgroup's canonical element order.
/// Errors if some lower face of the corner fails the cube test, naming the
/// failing face.
pub fn complete_corner(c: &Corner, f: &FilteredGroup) -> Result<Vec<GroupElement>> {
    if c.group != *f.group() {
        return Err(Error::mismatch("corner group differs from filtration"));
    }
    for axis in 0..c.n {
        let face = c.lower_face(axis);
        if !is_cube(&face, f)? {
            return Err(Error::precondition(format!(
                "corner face v({}) = 0 is not a cube",
                axis + 1
            )));
        }
    }
    let x0 = c.canonical_completion();
    let fiber = f
        .subgroup_at(c.n)
        .elements(f.group(), MAX_BOX_POINTS)?;
    Ok(fiber
        .into_iter()
        .map(|g| x0.add(&g).expect("same group"))
        .collect())
}

/// An affine map `Z^n -> Z^m` given by a base point and n integer columns,
/// used restricted to `{0,1}^n` or `[0,p-1]^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineCubeMorphism {
    in_dim: u32,
    out_dim: u32,
    base: Vec<i64>,
    cols: Vec<Vec<i64>>,
}

impl AffineCubeMorphism {
    pub fn new(base: Vec<i64>, cols: Vec<Vec<i64>>) -> Result<Self> {
        let out_dim = base.len() as u32;
        if cols.iter().any(|c| c.len() != base.len()) {
            return Err(Error::precondition(
                "affine morphism columns must match output dimension",
            ));
        }
        Ok(AffineCubeMorphism {
            in_dim: cols.len() as u32,
            out_dim,
            base,
            cols,
        })
    }

    /// A p-discrete-cube morphism `[0,p-1]^n -> [0,p-1]^m`: each output
    /// coordinate must be `v_i`, `p-1-v_i`, or a constant in `[0,p-1]`.
    pub fn new_p_discrete(p: u64, base: Vec<i64>, cols: Vec<Vec<i64>>) -> Result<Self> {
        let m = Self::new(base, cols)?;
        let pm1 = p as i64 - 1;
        for j in 0..m.out_dim as usize {
            let nonzero: Vec<(usize, i64)> = (0..m.in_dim as usize)
                .filter_map(|i| {
                    let c = m.cols[i][j];
                    (c != 0).then_some((i, c))
                })
                .collect();
            let ok = match nonzero.as_slice() {
                [] => (0..=pm1).contains(&m.base[j]),
                [(_, 1)] => m.base[j] == 0,
                [(_, -1)] => m.base[j] == pm1,
                _ => false,
            };
            if !ok {
                return Err(Error::precondition(format!(
                    "output coordinate {} is not of the form v_i, p-1-v_i, or a constant",
                    j + 1
                )));
            }
        }
        Ok(m)
    }

    pub fn in_dim(&self) -> u32 {
        self.in_dim
    }

    pub fn out_dim(&self) -> u32 {
        self.out_dim
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        debug_assert_eq!(v.len(), self.in_dim as usize);
        let mut out = self.base.clone();
        for (vi, col) in v.iter().zip(&self.cols) {
            if *vi != 0 {
                for (o, c) in out.iter_mut().zip(col) {
                    *o += vi * c;
                }
            }
        }
        out
    }
}

/// The maximal cube `q*_{p,n} : {0,1}^{n(p-1)} -> [0,p-1]^n`, summing each
/// block of p-1 vertex coordinates into one output coordinate.
pub fn maximal_cube_p(p: u64, n: u32) -> Result<AffineCubeMorphism> {
    let in_dim = n * (p as u32 - 1);
    if in_dim > MAX_CUBE_DIM {
        return Err(Error::CapExceeded {
            what: "maximal cube dimension n(p-1)",
            got: in_dim as u128,
            cap: MAX_CUBE_DIM as u128,
        });
    }
    let mut cols = Vec::with_capacity(in_dim as usize);
    for i in 0..in_dim {
        let mut col = vec![0i64; n as usize];
        col[(i / (p as u32 - 1)) as usize] = 1;
        cols.push(col);
    }
    AffineCubeMorphism::new(vec![0; n as usize], cols)
}

/// The maximal cube `q_{a,l} : {0,1}^{|l|} -> B_{a,l}` of a box.
pub fn maximal_cube_box(base: &[i64], extents: &[u32]) -> Result<AffineCubeMorphism> {
    let total: u32 = extents.iter().sum();
    if total > MAX_CUBE_DIM {
        return Err(Error::CapExceeded {
            what: "box maximal cube dimension |l|",
            got: total as u128,
            cap: MAX_CUBE_DIM as u128,
        });
    }
    let mut cols = Vec::with_capacity(total as usize);
    for (j, &lj) in extents.iter().enumerate() {
        for _ in 0..lj {
            let mut col = vec![0i64; base.len()];
            col[j] = 1;
            cols.push(col);
        }
    }
    AffineCubeMorphism::new(base.to_vec(), cols)
}

/// A value table on the box `B_{a,l} = prod [a_j, a_j + l_j]`, mixed-radix
/// indexed with coordinate 1 fastest (table order = colex point order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxMap {
    group: FiniteAbelianPGroup,
    base: Vec<i64>,
    extents: Vec<u32>,
    values: Vec<GroupElement>,
}

pub fn box_point_count(extents: &[u32]) -> u128 {
    extents.iter().map(|&l| l as u128 + 1).product()
}

impl BoxMap {
    pub fn new(
        group: FiniteAbelianPGroup,
        base: Vec<i64>,
        extents: Vec<u32>,
        values: Vec<GroupElement>,
    ) -> Result<Self> {
        if base.len() != extents.len() {
            return Err(Error::precondition("box base/extents length mismatch"));
        }
        let total = box_point_count(&extents);
        if total > MAX_BOX_POINTS {
            return Err(Error::CapExceeded {
                what: "box points",
                got: total,
                cap: MAX_BOX_POINTS,
            });
        }
        if values.len() as u128 != total {
            return Err(Error::precondition(format!(
                "box needs {total} values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|x| x.group() != &group) {
            return Err(Error::mismatch("box values from a different group"));
        }
        Ok(BoxMap {
            group,
            base,
            extents,
            values,
        })
    }

    pub fn from_fn(
        group: FiniteAbelianPGroup,
        base: Vec<i64>,
        extents: Vec<u32>,
        mut f: impl FnMut(&[i64]) -> Result<GroupElement>,
    ) -> Result<Self> {
        let total = box_point_count(&extents);
        if total > MAX_BOX_POINTS {
            return Err(Error::CapExceeded {
                what: "box points",
                got: total,
                cap: MAX_BOX_POINTS,
            });
        }
        let mut values = Vec::with_capacity(total as usize);
        let mut point = base.clone();
        for _ in 0..total {
            values.push(f(&point)?);
            // odometer on the box, coordinate 0 fastest
            for j in 0..point.len() {
                point[j] += 1;
                if point[j] <= base[j] + extents[j] as i64 {
                    break;
                }
                point[j] = base[j];
            }
        }
        BoxMap::new(group, base, extents, values)
    }

    pub fn group(&self) -> &FiniteAbelianPGroup {
        &self.group
    }

    pub fn base(&self) -> &[i64] {
        &self.base
    }

    pub fn extents(&self) -> &[u32] {
        &self.extents
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn point_index(&self, point: &[i64]) -> Result<usize> {
        if point.len() != self.base.len() {
            return Err(Error::precondition("point dimension mismatch"));
        }
        let mut idx: usize = 0;
        let mut stride: usize = 1;
        for j in 0..point.len() {
            let off = point[j] - self.base[j];
            if off < 0 || off > self.extents[j] as i64 {
                return Err(Error::precondition(format!(
                    "point coordinate {} = {} outside box",
                    j + 1,
                    point[j]
                )));
            }
            idx += off as usize * stride;
            stride *= self.extents[j] as usize + 1;
        }
        Ok(idx)
    }

    pub fn value_at(&self, point: &[i64]) -> Result<&GroupElement> {
        Ok(&self.values[self.point_index(point)?])
    }

    /// Compose vertex-wise with an affine morphism whose image lies in the
    /// box, producing the cube `self o m`.
    pub fn compose(&self, m: &AffineCubeMorphism) -> Result<CubeMap> {
        CubeMap::from_fn(self.group.clone(), m.in_dim(), |v| {
            Ok(self.value_at(&m.apply(v))?.clone())
        })
    }

    /// Restrict to the sub-box with the same base and extents `sub`.
    pub fn restrict(&self, sub: &[u32]) -> Result<BoxMap> {
        if sub.len() != self.extents.len()
            || sub.iter().zip(&self.extents).any(|(&s, &l)| s > l)
        {
            return Err(Error::precondition("restriction is not a sub-box"));
        }
        BoxMap::from_fn(self.group.clone(), self.base.clone(), sub.to_vec(), |pt| {
            Ok(self.value_at(pt)?.clone())
        })
    }
}

/// Membership in `hom_{a,l}`: compose with the box's maximal cube and test
/// cube membership.
pub fn hom_box_test(f: &BoxMap, filt: &FilteredGroup) -> Result<bool> {
    let m = maximal_cube_box(f.base(), f.extents())?;
    is_cube(&f.compose(&m)?, filt)
}

/// A box table missing the far corner `a + l` (all other points present, in
/// box index order).
#[derive(Clone, Debug)]
pub struct BoxCorner {
    group: FiniteAbelianPGroup,
    base: Vec<i64>,
    extents: Vec<u32>,
    values: Vec<GroupElement>,
}

impl BoxCorner {
    pub fn new(
        group: FiniteAbelianPGroup,
        base: Vec<i64>,
        extents: Vec<u32>,
        values: Vec<GroupElement>,
    ) -> Result<Self> {
        let total = box_point_count(&extents);
        if total > MAX_BOX_POINTS {
            return Err(Error::CapExceeded {
                what: "box points",
                got: total,
                cap: MAX_BOX_POINTS,
            });
        }
        if values.len() as u128 != total - 1 {
            return Err(Error::precondition(format!(
                "box corner needs {} values, got {}",
                total - 1,
                values.len()
            )));
        }
        Ok(BoxCorner {
            group,
            base,
            extents,
            values,
        })
    }

    fn as_box_with_top(&self, top: GroupElement) -> Result<BoxMap> {
        let mut values = self.values.clone();
        values.push(top);
        BoxMap::new(
            self.group.clone(),
            self.base.clone(),
            self.extents.clone(),
            values,
        )
    }

    /// Check the Lemma-of-corners precondition: membership in
    /// `hom_{a, l - e_j}` for every j with `l_j > 0`. Returns the failing
    /// direction on error.
    pub fn check_faces(&self, filt: &FilteredGroup) -> Result<()> {
        // the top value is irrelevant for every proper sub-box
        let probe = self.as_box_with_top(self.group.zero())?;
        for j in 0..self.extents.len() {
            if self.extents[j] == 0 {
                continue;
            }
            let mut sub = self.extents.clone();
            sub[j] -= 1;
            if !hom_box_test(&probe.restrict(&sub)?, filt)? {
                return Err(Error::precondition(format!(
                    "box corner fails hom test in direction {}",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// The deterministic completion (top coefficient zero in the composed
    /// corner). `check` controls whether the face precondition is verified.
    pub fn complete(&self, filt: &FilteredGroup, check: bool) -> Result<GroupElement> {
        if check {
            self.check_faces(filt)?;
        }
        let m = maximal_cube_box(&self.base, &self.extents)?;
        let top_value = self.group.zero();
        let probe = self.as_box_with_top(top_value)?;
        let top_point: Vec<i64> = self
            .base
            .iter()
            .zip(&self.extents)
            .map(|(&a, &l)| a + l as i64)
            .collect();
        // compose into a corner: every vertex except 1^{|l|} avoids a + l
        let n = m.in_dim();
        let mut values = Vec::with_capacity((1usize << n) - 1);
        let mut v = vec![0i64; n as usize];
        for idx in 0..((1usize << n) - 1) {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = ((idx >> i) & 1) as i64;
            }
            let pt = m.apply(&v);
            debug_assert_ne!(pt, top_point);
            values.push(probe.value_at(&pt)?.clone());
        }
        let corner = Corner::new(self.group.clone(), n, values)?;
        Ok(corner.canonical_completion())
    }

    /// All completions: the canonical one translated by `chain[|l|]`.
    pub fn complete_all(&self, filt: &FilteredGroup, check: bool) -> Result<Vec<GroupElement>> {
        let x0 = self.complete(filt, check)?;
        let total: u32 = self.extents.iter().sum();
        let fiber = filt
            .subgroup_at(total)
            .elements(filt.group(), MAX_BOX_POINTS)?;
        Ok(fiber
            .into_iter()
            .map(|g| x0.add(&g).expect("same group"))
            .collect())
    }
}

/// Extend a map defined on a simplicial (downward-closed) set `S` of box
/// points to its whole bounding box by corner completion in colex order.
/// The restriction of the result back to `S` equals the input.
pub fn extend_simplicial(
    f: &BTreeMap<Vec<u32>, GroupElement>,
    filt: &FilteredGroup,
) -> Result<BoxMap> {
    let Some(n) = f.keys().next().map(|k| k.len()) else {
        return Err(Error::precondition("empty simplicial set"));
    };
    if f.keys().any(|k| k.len() != n) {
        return Err(Error::precondition("inconsistent point dimensions"));
    }
    // downward closure
    for v in f.keys() {
        for j in 0..n {
            if v[j] > 0 {
                let mut w = v.clone();
                w[j] -= 1;
                if !f.contains_key(&w) {
                    return Err(Error::precondition(format!(
                        "set is not simplicial: {v:?} present but {w:?} missing"
                    )));
                }
            }
        }
    }
    let mut extents = vec![0u32; n];
    for v in f.keys() {
        for j in 0..n {
            extents[j] = extents[j].max(v[j]);
        }
    }
    let group = filt.group().clone();
    // verify the hom condition on every maximal box inside S
    for v in f.keys() {
        let is_maximal = (0..n).all(|j| {
            let mut w = v.clone();
            w[j] += 1;
            !f.contains_key(&w)
        });
        if !is_maximal {
            continue;
        }
        let sub = BoxMap::from_fn(group.clone(), vec![0; n], v.clone(), |pt| {
            let key: Vec<u32> = pt.iter().map(|&x| x as u32).collect();
            f.get(&key)
                .cloned()
                .ok_or_else(|| Error::Invariant("simplicial closure".into()))
        })?;
        if !hom_box_test(&sub, filt)? {
            return Err(Error::precondition(format!(
                "input fails the hom test on the box up to {v:?}"
            )));
        }
    }
    // fill the bounding box in colex (= table index) order
    let total = box_point_count(&extents);
    if total > MAX_BOX_POINTS {
        return Err(Error::CapExceeded {
            what: "box points",
            got: total,
            cap: MAX_BOX_POINTS,
        });
    }
    let mut filled: Vec<GroupElement> = Vec::with_capacity(total as usize);
    let mut point = vec![0u32; n];
    for _ in 0..total {
        if let Some(x) = f.get(&point) {
            filled.push(x.clone());
        } else {
            // corner of the box B_{0, point}: all colex-smaller points known
            let helper = BoxMap::new(
                group.clone(),
                vec![0; n],
                extents.clone(),
                // pad with zeros; only already-filled entries are read
                {
                    let mut padded = filled.clone();
                    padded.resize(total as usize, group.zero());
                    padded
                },
            )?;
            let sub_extents = point.clone();
            let sub_total = box_point_count(&sub_extents);
            let mut corner_vals = Vec::with_capacity(sub_total as usize - 1);
            let mut sub_pt = vec![0i64; n];
            for _ in 0..sub_total - 1 {
                corner_vals.push(helper.value_at(&sub_pt)?.clone());
                for j in 0..n {
                    sub_pt[j] += 1;
                    if sub_pt[j] <= sub_extents[j] as i64 {
                        break;
                    }
                    sub_pt[j] = 0;
                }
            }
            let corner = BoxCorner::new(group.clone(), vec![0; n], sub_extents, corner_vals)?;
            // validity is inherited from the checked input boxes
            filled.push(corner.complete(filt, false)?);
        }
        for j in 0..n {
            point[j] += 1;
            if point[j] <= extents[j] {
                break;
            }
            point[j] = 0;
        }
    }
    BoxMap::new(group, vec![0; n], extents, filled)
}

/// All p-face-maps `[0,p-1]^k -> [0,p-1]^n`: injective p-discrete-cube
/// morphisms fixing n-k coordinates. Each input coordinate is used exactly
/// once, with or without the flip `v -> p-1-v`; the remaining coordinates
/// are constants. Count: `binom(n,k) * k! * 2^k * p^(n-k)`.
pub fn p_face_maps(k: u32, n: u32, p: u64) -> Result<Vec<AffineCubeMorphism>> {
    if k > n {
        return Err(Error::precondition("p-face-maps require k <= n"));
    }
    #[derive(Clone)]
    enum Coord {
        Var { input: u32, flip: bool },
        Const(i64),
    }
    let mut out = Vec::new();
    let mut coords: Vec<Coord> = Vec::with_capacity(n as usize);
    fn rec(
        coords: &mut Vec<Coord>,
        used: &mut Vec<bool>,
        k: u32,
        n: u32,
        p: u64,
        out: &mut Vec<AffineCubeMorphism>,
    ) {
        let pos = coords.len() as u32;
        if pos == n {
            if used.iter().all(|&u| u) {
                let mut base = vec![0i64; n as usize];
                let mut cols = vec![vec![0i64; n as usize]; k as usize];
                for (j, c) in coords.iter().enumerate() {
                    match c {
                        Coord::Var { input, flip } => {
                            if *flip {
                                base[j] = p as i64 - 1;
                                cols[*input as usize][j] = -1;
                            } else {
                                cols[*input as usize][j] = 1;
                            }
                        }
                        Coord::Const(c) => base[j] = *c,
                    }
                }
                out.push(AffineCubeMorphism::new(base, cols).expect("consistent dims"));
            }
            return;
        }
        let remaining_outputs = n - pos;
        let unused = used.iter().filter(|&&u| !u).count() as u32;
        if unused > remaining_outputs {
            return;
        }
        for input in 0..k {
            if !used[input as usize] {
                for flip in [false, true] {
                    used[input as usize] = true;
                    coords.push(Coord::Var { input, flip });
                    rec(coords, used, k, n, p, out);
                    coords.pop();
                    used[input as usize] = false;
                }
            }
        }
        for c in 0..p as i64 {
            coords.push(Coord::Const(c));
            rec(coords, used, k, n, p, out);
            coords.pop();
        }
    }
    let mut used = vec![false; k as usize];
    rec(&mut coords, &mut used, k, n, p, &mut out);
    Ok(out)
}

pub fn subgroup_for_level(f: &FilteredGroup, level: u32) -> &ComponentwiseSubgroup {
    f.subgroup_at(level)
}
