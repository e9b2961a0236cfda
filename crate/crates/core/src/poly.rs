//! Polynomial maps `Z^n -> G` in Taylor (binomial-coefficient) form,
//! morphism tests for maps out of `Z^n` and `Z_p^n`, the periodic basis maps
//! `m_i^(p)`, circular vectors, and the cyclic difference operator `A_p`.

use crate::cube::{is_cube, maximal_cube_p, BoxMap};
use crate::filtration::{FilteredGroup, IntegerFiltrationProfile};
use crate::group::{multibinom, GroupElement};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_traits::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Multi-index `w in Z_{>=0}^n` ordered colexicographically (last differing
/// coordinate decides). Coefficient maps iterate in this order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.0.len(), other.0.len());
        for (a, b) in self.0.iter().rev().zip(other.0.iter().rev()) {
            match a.cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial map `Z^n -> G` as a sparse Taylor-coefficient table:
/// `f(x) = sum_w coeffs[w] * multibinom(x, w)`, heights bounded by the
/// target's filtration degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    n: usize,
    target: FilteredGroup,
    coeffs: BTreeMap<MultiIndex, GroupElement>,
}

impl PolyMap {
    pub fn new(
        n: usize,
        target: FilteredGroup,
        coeffs: BTreeMap<MultiIndex, GroupElement>,
    ) -> Result<Self> {
        for (w, a) in &coeffs {
            if w.0.len() != n {
                return Err(Error::precondition(format!(
                    "coefficient index {:?} has wrong arity",
                    w
                )));
            }
            if a.group() != target.group() {
                return Err(Error::mismatch("coefficient from a different group"));
            }
            if w.height() > target.degree() {
                return Err(Error::precondition(format!(
                    "coefficient height {} exceeds filtration degree {}",
                    w.height(),
                    target.degree()
                )));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        Ok(PolyMap { n, target, coeffs })
    }

    pub fn constant(n: usize, target: FilteredGroup, c: GroupElement) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(MultiIndex::zero(n), c);
        PolyMap::new(n, target, coeffs)
    }

    pub fn domain_dim(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> &FilteredGroup {
        &self.target
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, GroupElement> {
        &self.coeffs
    }

    /// Exact evaluation `f(x) = sum_w coeffs[w] * multibinom(x, w)`.
    pub fn eval(&self, x: &[i64]) -> Result<GroupElement> {
        if x.len() != self.n {
            return Err(Error::precondition("evaluation point has wrong arity"));
        }
        let mut acc = self.target.group().zero();
        for (w, a) in &self.coeffs {
            let c = multibinom(x, &w.0);
            if !c.is_zero() {
                acc = acc.add(&a.scalar_big(&c)).expect("same group");
            }
        }
        Ok(acc)
    }

    /// The difference polynomial `g(x) = f(x+h) - f(x)`, computed in
    /// coefficient space via the Vandermonde shift
    /// `binom(x+h, w) = sum_{u <= w} binom(h, w-u) binom(x, u)`.
    pub fn derivative(&self, h: &[i64]) -> Result<PolyMap> {
        if h.len() != self.n {
            return Err(Error::precondition("direction has wrong arity"));
        }
        let mut out: BTreeMap<MultiIndex, GroupElement> = BTreeMap::new();
        for (w, a) in &self.coeffs {
            // enumerate u <= w componentwise, u != w
            let mut u = vec![0u32; self.n];
            loop {
                if u != w.0 {
                    let diff: Vec<u32> = w.0.iter().zip(&u).map(|(&wi, &ui)| wi - ui).collect();
                    let shift = multibinom(h, &diff);
                    if !shift.is_zero() {
                        let term = a.scalar_big(&shift);
                        let key = MultiIndex(u.clone());
                        let entry = out
                            .entry(key)
                            .or_insert_with(|| self.target.group().zero());
                        *entry = entry.add(&term).expect("same group");
                    }
                }
                // odometer over u <= w
                let mut j = 0;
                loop {
                    if j == self.n {
                        break;
                    }
                    u[j] += 1;
                    if u[j] <= w.0[j] {
                        break;
                    }
                    u[j] = 0;
                    j += 1;
                }
                if j == self.n {
                    break;
                }
            }
        }
        PolyMap::new(self.n, self.target.clone(), out)
    }

    /// Maximum coefficient height (0 for the zero map).
    pub fn height(&self) -> u32 {
        self.coeffs.keys().map(|w| w.height()).max().unwrap_or(0)
    }

    /// Morphism certificate: `coeffs[w] in chain[|w|]` for all w.
    pub fn is_morphism(&self) -> bool {
        is_morphism_into(self, &self.target)
    }

    /// Value table on the box `[0, extents]`.
    pub fn values_on_box(&self, extents: &[u32]) -> Result<BoxMap> {
        BoxMap::from_fn(
            self.target.group().clone(),
            vec![0; self.n],
            extents.to_vec(),
            |pt| self.eval(pt),
        )
    }
}

/// Morphism test for a poly map against an arbitrary filtration on its
/// target group.
pub fn is_morphism_into(f: &PolyMap, filt: &FilteredGroup) -> bool {
    f.coeffs
        .iter()
        .all(|(w, a)| filt.subgroup_at(w.height()).contains(filt.group(), a))
}

/// Newton interpolation on a zero-based box: the unique coefficient table
/// supported in the box whose polynomial agrees with `values` there. The
/// coefficients are iterated finite differences at 0.
pub fn from_values(values: &BoxMap, target: FilteredGroup) -> Result<PolyMap> {
    if values.base().iter().any(|&b| b != 0) {
        return Err(Error::precondition(
            "interpolation requires a zero-based box",
        ));
    }
    if values.group() != target.group() {
        return Err(Error::mismatch("box group differs from target"));
    }
    let n = values.extents().len();
    let mut table: Vec<GroupElement> = values.values().to_vec();
    let extents = values.extents();
    let mut strides = vec![1usize; n];
    for j in 1..n {
        strides[j] = strides[j - 1] * (extents[j - 1] as usize + 1);
    }
    for j in 0..n {
        let len_j = extents[j] as usize + 1;
        // difference in place along axis j, slice by slice
        let outer_stride = strides[j] * len_j;
        for outer in 0..table.len() / outer_stride {
            for inner in 0..strides[j] {
                let base = outer * outer_stride + inner;
                for level in 1..len_j {
                    for i in (level..len_j).rev() {
                        let cur = base + i * strides[j];
                        let prev = base + (i - 1) * strides[j];
                        table[cur] = table[cur].sub(&table[prev]).expect("same group");
                    }
                }
            }
        }
    }
    let mut coeffs = BTreeMap::new();
    let mut w = vec![0u32; n];
    for value in table {
        if !value.is_zero() {
            coeffs.insert(MultiIndex(w.clone()), value);
        }
        for j in 0..n {
            w[j] += 1;
            if w[j] <= extents[j] {
                break;
            }
            w[j] = 0;
        }
    }
    PolyMap::new(n, target, coeffs)
}

/// 1-d integer Newton coefficients of a value window (iterated differences
/// at 0), exact.
pub fn newton_coeffs_int(values: &[i64]) -> Vec<BigInt> {
    let mut table: Vec<BigInt> = values.iter().map(|&v| BigInt::from(v)).collect();
    for level in 1..table.len() {
        for i in (level..table.len()).rev() {
            let prev = table[i - 1].clone();
            table[i] -= prev;
        }
    }
    table
}

/// Membership in `hom_p^n`: the table on `[0,p-1]^n` composed with the
/// maximal cube `q*_{p,n}` must be a cube of dimension n(p-1).
pub fn hom_pn_test(f: &BoxMap, filt: &FilteredGroup) -> Result<bool> {
    let p = filt.p();
    if f.base().iter().any(|&b| b != 0) || f.extents().iter().any(|&l| l as u64 != p - 1) {
        return Err(Error::precondition(
            "hom_p^n test requires a table on [0, p-1]^n",
        ));
    }
    let m = maximal_cube_p(p, f.extents().len() as u32)?;
    is_cube(&f.compose(&m)?, filt)
}

/// Cyclic difference along `axis`: `t'(x) = t(x + e_axis mod p) - t(x)`.
fn cyclic_diff(table: &[GroupElement], p: usize, axis: usize) -> Vec<GroupElement> {
    let stride = p.pow(axis as u32);
    let block = stride * p;
    (0..table.len())
        .map(|idx| {
            let pos = (idx / stride) % p;
            let shifted = if pos + 1 == p {
                idx + stride - block
            } else {
                idx + stride
            };
            table[shifted].sub(&table[idx]).expect("same group")
        })
        .collect()
}

/// Cap for `is_hom_zpn` tables.
pub const MAX_ZPN_POINTS: u128 = 100_000;

/// Morphism test for a table viewed as a map `Z_p^n -> G`: all iterated
/// cyclic differences along standard generators (with repetition) of total
/// order j must land in `chain[j]`, checked up to the first level with
/// trivial chain. Generator directions suffice for abelian targets; see
/// [`is_hom_zpn_all_directions`] for the exhaustive audit.
pub fn is_hom_zpn(f: &BoxMap, filt: &FilteredGroup) -> Result<bool> {
    let p = filt.p();
    if f.base().iter().any(|&b| b != 0) || f.extents().iter().any(|&l| l as u64 != p - 1) {
        return Err(Error::precondition(
            "Z_p^n morphism test requires a table on [0, p-1]^n",
        ));
    }
    if f.group() != filt.group() {
        return Err(Error::mismatch("table group differs from filtration"));
    }
    let n = f.extents().len();
    let total = (p as u128).pow(n as u32);
    if total > MAX_ZPN_POINTS {
        return Err(Error::CapExceeded {
            what: "Z_p^n table points",
            got: total,
            cap: MAX_ZPN_POINTS,
        });
    }
    let depth = first_zero_level(filt);
    fn rec(
        table: &[GroupElement],
        level: u32,
        min_axis: usize,
        p: usize,
        n: usize,
        depth: u32,
        filt: &FilteredGroup,
    ) -> bool {
        if level == depth {
            return true;
        }
        for axis in min_axis..n {
            let next = cyclic_diff(table, p, axis);
            let sub = filt.subgroup_at(level + 1);
            if !next.iter().all(|x| sub.contains(filt.group(), x)) {
                return false;
            }
            if !rec(&next, level + 1, axis, p, n, depth, filt) {
                return false;
            }
        }
        true
    }
    Ok(rec(f.values(), 0, 0, p as usize, n, depth, filt))
}

/// First level j with `chain[j] = 0`; differences of that order must vanish.
fn first_zero_level(filt: &FilteredGroup) -> u32 {
    (1..=filt.degree() + 1)
        .find(|&j| filt.subgroup_at(j).is_zero(filt.group()))
        .unwrap_or(filt.degree() + 1)
}

/// Audit-mode morphism test taking differences along every nonzero domain
/// element, not just generators. Exponential; capped at p^n <= 81.
pub fn is_hom_zpn_all_directions(f: &BoxMap, filt: &FilteredGroup) -> Result<bool> {
    let p = filt.p();
    let n = f.extents().len();
    let total = (p as u128).pow(n as u32);
    if total > 81 {
        return Err(Error::CapExceeded {
            what: "audit table points",
            got: total,
            cap: 81,
        });
    }
    let depth = first_zero_level(filt);
    let directions: Vec<Vec<usize>> = (1..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let r = (idx % p as u128) as usize;
                    idx /= p as u128;
                    r
                })
                .collect()
        })
        .collect();
    fn shift_diff(table: &[GroupElement], p: usize, n: usize, dir: &[usize]) -> Vec<GroupElement> {
        (0..table.len())
            .map(|idx| {
                let mut rem = idx;
                let mut shifted = 0usize;
                let mut stride = 1usize;
                for &d in dir.iter().take(n) {
                    let pos = rem % p;
                    rem /= p;
                    shifted += ((pos + d) % p) * stride;
                    stride *= p;
                }
                table[shifted].sub(&table[idx]).expect("same group")
            })
            .collect()
    }
    fn rec(
        table: &[GroupElement],
        level: u32,
        p: usize,
        n: usize,
        depth: u32,
        dirs: &[Vec<usize>],
        filt: &FilteredGroup,
    ) -> bool {
        if level == depth {
            return true;
        }
        for dir in dirs {
            let next = shift_diff(table, p, n, dir);
            let sub = filt.subgroup_at(level + 1);
            if !next.iter().all(|x| sub.contains(filt.group(), x)) {
                return false;
            }
            if !rec(&next, level + 1, p, n, depth, dirs, filt) {
                return false;
            }
        }
        true
    }
    Ok(rec(f.values(), 0, p as usize, n, depth, &directions, filt))
}

/// One period of `m_i^(p)`: 0 below i, then the alternating binomials
/// `(-1)^(x-i) binom(p-i-1, x-i)` on `[i, p-1]`.
pub fn m_i_p(p: u64, i: u32) -> Result<Vec<i64>> {
    if i as u64 > p - 1 {
        return Err(Error::precondition(format!(
            "m_i requires 0 <= i <= p-1, got i={i}, p={p}"
        )));
    }
    Ok((0..p as u32)
        .map(|x| {
            if x < i {
                0
            } else {
                let b = crate::group::binom((p - 1 - i as u64) as i64, x - i);
                let v = i64::try_from(&b).expect("binomial fits i64 at desk scale");
                if (x - i) % 2 == 1 {
                    -v
                } else {
                    v
                }
            }
        })
        .collect())
}

/// `g'_t(x) = prod_j m_{t_j}^(p)(x_j)` as an integer table on `[0,p-1]^n`,
/// coordinate 0 fastest.
pub fn g_prime_t(p: u64, t: &[u32]) -> Result<Vec<i64>> {
    let m_tables: Vec<Vec<i64>> = t.iter().map(|&tj| m_i_p(p, tj)).collect::<Result<_>>()?;
    let n = t.len();
    let total = (p as usize).pow(n as u32);
    let mut out = Vec::with_capacity(total);
    let mut x = vec![0usize; n];
    for _ in 0..total {
        out.push(x.iter().zip(&m_tables).map(|(&xj, mt)| mt[xj]).product());
        for j in 0..n {
            x[j] += 1;
            if x[j] < p as usize {
                break;
            }
            x[j] = 0;
        }
    }
    Ok(out)
}

/// The cyclic difference operator: `(A_p v)_i = v_{i+1} - v_i` with
/// wraparound, the row convention with -1 on the diagonal.
pub fn apply_ap(v: &[i64]) -> Vec<i64> {
    let p = v.len();
    (0..p).map(|i| v[(i + 1) % p] - v[i]).collect()
}

/// Circularity test: some index i has `v_i = 0` and
/// `v_{(i+j)_p} = -v_{(i-j)_p}` for all j <= (p-1)/2 (p odd);
/// `v_1 = -v_2` for p = 2. Returns a witnessing center (0-based).
pub fn circular_center(v: &[i64]) -> Option<usize> {
    let p = v.len();
    if p == 2 {
        return (v[0] == -v[1]).then_some(0);
    }
    (0..p).find(|&i| {
        v[i] == 0 && (1..=(p - 1) / 2).all(|j| v[(i + j) % p] == -v[(i + p - j) % p])
    })
}

/// A length-p integer vector validated circular at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircularVector {
    p: u64,
    entries: Vec<i64>,
}

impl CircularVector {
    pub fn new(p: u64, entries: Vec<i64>) -> Result<Self> {
        if entries.len() as u64 != p {
            return Err(Error::precondition(format!(
                "circular vector must have length p = {p}"
            )));
        }
        if circular_center(&entries).is_none() {
            return Err(Error::precondition(format!(
                "vector {entries:?} is not circular"
            )));
        }
        Ok(CircularVector { p, entries })
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn p(&self) -> u64 {
        self.p
    }
}

/// `A_p^{p-1}` applied to a circular vector stays circular with all entries
/// divisible by p. Returns whether both hold.
pub fn check_circular_power(v: &CircularVector) -> bool {
    let mut w = v.entries.clone();
    for _ in 0..v.p - 1 {
        w = apply_ap(&w);
    }
    circular_center(&w).is_some() && w.iter().all(|&x| x % v.p as i64 == 0)
}

/// Outcome of checking a p-periodic integer map against an integer
/// filtration profile.
///
/// `Certified` means every level holds: once the level-(i+1) difference is
/// circular and divisible by p, iterating `A_p^{p-1}` gains one factor of p
/// per p-1 levels while keeping circularity, covering all later levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileCheck {
    Certified,
    UpTo(u32),
    Violation { level: u32 },
}

/// Check that level-t cyclic differences of `period` are divisible by
/// `p^{profile.exponent(t)}` for t up to `max_level` (or certified beyond).
///
/// Certification: if the level-t difference is `p^d * u` with `u` circular,
/// then level t+s is divisible by `p^{d + floor(s/(p-1))}` (each `A_p^{p-1}`
/// application keeps circularity and gains a factor p), so it suffices that
/// the profile exponent stays below that line over one window.
pub fn check_against_profile(
    period: &[i64],
    profile: &IntegerFiltrationProfile,
    max_level: u32,
) -> ProfileCheck {
    let p = profile.p();
    let mut w: Vec<i64> = period.to_vec();
    for t in 1..=max_level {
        w = apply_ap(&w);
        let need = profile.exponent(t);
        let modulus = (p as i64).pow(need);
        if w.iter().any(|&x| x % modulus != 0) {
            return ProfileCheck::Violation { level: t };
        }
        if w.iter().all(|&x| x == 0) {
            return ProfileCheck::Certified;
        }
        if circular_center(&w).is_some() {
            let valuation = w
                .iter()
                .filter(|&&x| x != 0)
                .map(|&x| {
                    let mut v = 0u32;
                    let mut x = x.unsigned_abs();
                    while x % p == 0 {
                        x /= p;
                        v += 1;
                    }
                    v
                })
                .min()
                .expect("nonzero entry exists");
            if profile.exponent(t + p as u32 - 2) <= valuation
                && profile.exponent(t + p as u32 - 1) <= valuation + 1
            {
                return ProfileCheck::Certified;
            }
        }
    }
    ProfileCheck::UpTo(max_level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::FilteredGroup;
    use crate::group::FiniteAbelianPGroup;

    fn z9() -> FiniteAbelianPGroup {
        FiniteAbelianPGroup::cyclic(3, 2).unwrap()
    }

    fn z42() -> FilteredGroup {
        FilteredGroup::make_zkl(3, 4, 2).unwrap()
    }

    fn poly(target: &FilteredGroup, coeffs: &[(&[u32], i64)]) -> PolyMap {
        let n = coeffs.first().map_or(1, |(w, _)| w.len());
        let map = coeffs
            .iter()
            .map(|(w, a)| {
                (
                    MultiIndex(w.to_vec()),
                    target.group().element(&[*a]).unwrap(),
                )
            })
            .collect();
        PolyMap::new(n, target.clone(), map).unwrap()
    }

    #[test]
    fn eval_examples() {
        let f = z42();
        let c = poly(&f, &[(&[0], 5)]);
        assert_eq!(c.eval(&[7]).unwrap(), z9().element(&[5]).unwrap());
        let line = poly(&f, &[(&[1], 2)]);
        assert_eq!(line.eval(&[4]).unwrap(), z9().element(&[8]).unwrap());
        // coeffs {0:0, 1:1, 2:1}: f(3) = 3 + binom(3,2) = 6
        let g = poly(&f, &[(&[0], 0), (&[1], 1), (&[2], 1)]);
        assert_eq!(g.eval(&[3]).unwrap(), z9().element(&[6]).unwrap());
    }

    #[test]
    fn derivative_examples() {
        let f = z42();
        let c = poly(&f, &[(&[0], 5)]);
        assert!(c.derivative(&[1]).unwrap().coeffs().is_empty());
        // d of {(2): c} along e_1 is {(1): c}
        let q = poly(&f, &[(&[2], 4)]);
        let d = q.derivative(&[1]).unwrap();
        assert_eq!(
            d.coeffs().get(&MultiIndex(vec![1])),
            Some(&z9().element(&[4]).unwrap())
        );
        assert_eq!(d.height(), 1);
        // pointwise cross-check
        let g = poly(&f, &[(&[0], 1), (&[1], 3), (&[2], 7), (&[3], 2)]);
        let h = 2i64;
        let dg = g.derivative(&[h]).unwrap();
        for x in -5..=5 {
            let lhs = dg.eval(&[x]).unwrap();
            let rhs = g
                .eval(&[x + h])
                .unwrap()
                .sub(&g.eval(&[x]).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "x={x}");
        }
        assert!(g.derivative(&[1]).unwrap().height() <= g.height() - 1);
    }

    #[test]
    fn from_values_roundtrip_and_differences() {
        let f = z42();
        let g = poly(&f, &[(&[0], 1), (&[1], 3), (&[2], 7)]);
        let vals = g.values_on_box(&[4]).unwrap();
        let back = from_values(&vals, f.clone()).unwrap();
        assert_eq!(back.coeffs(), g.coeffs());
        // values (0,1,2) on [0,2] in Z_9: coeffs {1: 1}
        let vb = BoxMap::from_fn(z9(), vec![0], vec![2], |pt| z9().element(&[pt[0]])).unwrap();
        let p = from_values(&vb, f.clone()).unwrap();
        assert_eq!(p.coeffs().len(), 1);
        assert_eq!(
            p.coeffs().get(&MultiIndex(vec![1])),
            Some(&z9().element(&[1]).unwrap())
        );
        // integer Newton of one m_0^(3) period
        assert_eq!(
            newton_coeffs_int(&[1, -2, 1]),
            vec![BigInt::from(1), BigInt::from(-3), BigInt::from(6)]
        );
    }

    #[test]
    fn from_values_2d() {
        let f =
            FilteredGroup::make_dk(FiniteAbelianPGroup::elementary(3, 2).unwrap(), 3).unwrap();
        let g = f.group().clone();
        let vals = BoxMap::from_fn(g.clone(), vec![0, 0], vec![2, 2], |pt| {
            g.element(&[pt[0] * pt[1] + 2 * pt[0], pt[1]])
        })
        .unwrap();
        let p = from_values(&vals, f).unwrap();
        for x in 0..=2i64 {
            for y in 0..=2i64 {
                assert_eq!(
                    p.eval(&[x, y]).unwrap(),
                    *vals.value_at(&[x, y]).unwrap(),
                    "({x},{y})"
                );
            }
        }
    }

    #[test]
    fn morphism_examples() {
        let f = z42();
        assert!(poly(&f, &[(&[2], 1)]).is_morphism());
        assert!(!poly(&f, &[(&[3], 1)]).is_morphism());
        assert!(poly(&f, &[(&[3], 3)]).is_morphism());
        let dk = FilteredGroup::make_dk(z9(), 3).unwrap();
        assert!(poly(&dk, &[(&[0], 1), (&[3], 5)]).is_morphism());
    }

    #[test]
    fn hom_pn_identity_example() {
        let z3 = FiniteAbelianPGroup::cyclic(3, 1).unwrap();
        let d1 = FilteredGroup::make_dk(z3.clone(), 1).unwrap();
        let id = BoxMap::from_fn(z3.clone(), vec![0], vec![2], |pt| z3.element(&[pt[0]])).unwrap();
        assert!(hom_pn_test(&id, &d1).unwrap());
        let bad = BoxMap::from_fn(z3.clone(), vec![0], vec![2], |pt| {
            z3.element(&[if pt[0] == 2 { 1 } else { pt[0] }])
        })
        .unwrap();
        assert!(!hom_pn_test(&bad, &d1).unwrap());
    }

    #[test]
    fn is_hom_zpn_worked_example() {
        // x -> x as a table [0,2] -> Z_9 into Z_{4,2}^(3)
        let f = z42();
        let t = BoxMap::from_fn(z9(), vec![0], vec![2], |pt| z9().element(&[pt[0]])).unwrap();
        assert!(is_hom_zpn(&t, &f).unwrap());
        assert!(is_hom_zpn_all_directions(&t, &f).unwrap());
        let c = BoxMap::from_fn(z9(), vec![0], vec![2], |_| z9().element(&[7])).unwrap();
        assert!(is_hom_zpn(&c, &f).unwrap());
        let z3 = FiniteAbelianPGroup::cyclic(3, 1).unwrap();
        let d1 = FilteredGroup::make_dk(z3.clone(), 1).unwrap();
        let id = BoxMap::from_fn(z3.clone(), vec![0], vec![2], |pt| z3.element(&[pt[0]])).unwrap();
        assert!(is_hom_zpn(&id, &d1).unwrap());
        let bad = BoxMap::from_fn(z3.clone(), vec![0], vec![2], |pt| {
            z3.element(&[pt[0] * pt[0]])
        })
        .unwrap();
        assert!(!is_hom_zpn(&bad, &d1).unwrap());
    }

    #[test]
    fn m_i_tables() {
        assert_eq!(m_i_p(3, 0).unwrap(), vec![1, -2, 1]);
        assert_eq!(m_i_p(3, 1).unwrap(), vec![0, 1, -1]);
        assert_eq!(m_i_p(3, 2).unwrap(), vec![0, 0, 1]);
        for p in [3u64, 5, 7, 11, 13] {
            for i in 0..p as u32 {
                let m = m_i_p(p, i).unwrap();
                for x in 0..i as usize {
                    assert_eq!(m[x], 0);
                }
                assert_eq!(m[i as usize], 1);
            }
        }
        // cyclic difference identity: d m_i = m_{i-1} over one period
        for p in [3u64, 5, 7, 11, 13] {
            for i in 1..p as u32 {
                let m = m_i_p(p, i).unwrap();
                assert_eq!(apply_ap(&m), m_i_p(p, i - 1).unwrap(), "p={p}, i={i}");
            }
        }
    }

    #[test]
    fn g_prime_properties() {
        for p in [3u64, 5] {
            let pu = p as usize;
            for t1 in 0..p as u32 {
                for t2 in 0..p as u32 {
                    let g = g_prime_t(p, &[t1, t2]).unwrap();
                    assert_eq!(g[t1 as usize + pu * t2 as usize], 1);
                    for x1 in 0..pu {
                        for x2 in 0..pu {
                            if (x1 as u32) < t1 || (x2 as u32) < t2 {
                                assert_eq!(g[x1 + pu * x2], 0);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ap_and_circular() {
        assert_eq!(apply_ap(&[0, 1, -1]), vec![1, -2, 1]);
        assert_eq!(apply_ap(&[5, 5, 5]), vec![0, 0, 0]);
        let twice = apply_ap(&apply_ap(&[0, 1, -1]));
        assert_eq!(twice, vec![-3, 3, 0]);
        assert!(circular_center(&twice).is_some());
        assert_eq!(circular_center(&[0, 1, -1]), Some(0));
        assert!(circular_center(&[0, 0, 0]).is_some());
        assert_eq!(circular_center(&[1, 1, 1]), None);
        assert_eq!(circular_center(&[3, -3]), Some(0));
        assert_eq!(circular_center(&[1, 1]), None);
    }

    #[test]
    fn circular_power_examples() {
        let v = CircularVector::new(3, vec![0, 1, -1]).unwrap();
        assert!(check_circular_power(&v));
        let zero = CircularVector::new(5, vec![0; 5]).unwrap();
        assert!(check_circular_power(&zero));
        assert!(CircularVector::new(3, vec![1, 1, 1]).is_err());
    }

    #[test]
    fn profile_certification() {
        for p in [3u64, 5, 7] {
            for i in 0..p as u32 {
                let m = m_i_p(p, i).unwrap();
                let prof = IntegerFiltrationProfile::new(p, i);
                assert_eq!(
                    check_against_profile(&m, &prof, 3 * p as u32),
                    ProfileCheck::Certified,
                    "m_{i} into H_{i} for p={p}"
                );
            }
        }
        let prof = IntegerFiltrationProfile::new(3, 1);
        let bad = vec![0, 1, 0];
        assert!(matches!(
            check_against_profile(&bad, &prof, 9),
            ProfileCheck::Violation { .. }
        ));
    }

    #[test]
    fn derivative_heights_of_g_prime() {
        // iterated differences of g'_t land in p^r Z with
        // r = sum_j max(0, floor((a_j - t_j - 1)/(p-1)) + 1)
        let p = 3u64;
        let pu = p as usize;
        for t in [[0u32, 0], [1, 0], [1, 2], [2, 2]] {
            let g = g_prime_t(p, &t).unwrap();
            for a in [[1u32, 0], [2, 0], [3, 1], [2, 2], [4, 0]] {
                let mut table = g.clone();
                for (axis, &aj) in a.iter().enumerate() {
                    for _ in 0..aj {
                        let stride = pu.pow(axis as u32);
                        let block = stride * pu;
                        table = (0..table.len())
                            .map(|idx| {
                                let pos = (idx / stride) % pu;
                                let shifted = if pos + 1 == pu {
                                    idx + stride - block
                                } else {
                                    idx + stride
                                };
                                table[shifted] - table[idx]
                            })
                            .collect();
                    }
                }
                let r: u32 = a
                    .iter()
                    .zip(&t)
                    .map(|(&aj, &tj)| if aj > tj { (aj - tj - 1) / (p as u32 - 1) + 1 } else { 0 })
                    .sum();
                let modulus = (p as i64).pow(r);
                assert!(
                    table.iter().all(|&x| x % modulus == 0),
                    "t={t:?}, a={a:?}, r={r}"
                );
            }
        }
    }
}
