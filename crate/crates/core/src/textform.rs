//! Text and file formats: the group/filtration mini-language used by the
//! CLI and fixtures, and the JSON schemas for cubes, polynomial maps, and
//! analytic tables. Parse errors cite byte offsets.
//!
//! Grammar (whitespace ignored between tokens):
//!
//! ```text
//! group      := "Z[" factor ("x" factor)* "]"        e.g. Z[3^2 x 3^1]
//! factor     := prime ("^" exponent)?                 "3" means 3^1
//! expr       := term ("x" term)*
//! term       := "Z(" k "," l ";" p ")"                the block Z_{k,l}
//!             | "D(" k ";" group ")"                  degree-k filtration
//! filtration := "F[p=" p ",k=" k ";" level ("," level)* "]"
//! level      := subgroup-factor ("x" subgroup-factor)*   one per chain index 1..k
//! subgroup-factor := coefficient? "Z" modulus | "0"       e.g. 3Z9, Z27, 0
//! ```

use crate::cube::{BoxMap, CubeMap};
use crate::filtration::FilteredGroup;
use crate::fp::FpSubspace;
use crate::gowers::{FpFunction, NCPoly};
use crate::group::{ComponentwiseSubgroup, FiniteAbelianPGroup, GroupElement};
use crate::homogeneity::QpkMember;
use crate::poly::{MultiIndex, PolyMap};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Scanner { src, pos: 0 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            offset: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(' ') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, tok: &str) -> Result<()> {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            Ok(())
        } else {
            Err(self.err(format!("expected '{tok}'")))
        }
    }

    fn try_eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src[self.pos..]
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit())
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.err("number out of range"))
    }

    fn done(&mut self) -> Result<()> {
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err("trailing input"));
        }
        Ok(())
    }
}

/// `Z[3^2 x 3^1]` -> the group Z_9 x Z_3.
pub fn parse_group(src: &str) -> Result<FiniteAbelianPGroup> {
    let mut s = Scanner::new(src);
    let g = parse_group_inner(&mut s)?;
    s.done()?;
    Ok(g)
}

fn parse_group_inner(s: &mut Scanner) -> Result<FiniteAbelianPGroup> {
    s.eat("Z[")?;
    let mut p: Option<u64> = None;
    let mut orders = Vec::new();
    loop {
        let base = s.number()?;
        match p {
            None => p = Some(base),
            Some(q) if q == base => {}
            Some(q) => {
                return Err(s.err(format!("mixed primes {q} and {base} in one group")));
            }
        }
        let r = if s.try_eat("^") { s.number()? } else { 1 };
        orders.push(r as u32);
        if !s.try_eat("x") {
            break;
        }
    }
    s.eat("]")?;
    FiniteAbelianPGroup::new(p.expect("at least one factor"), orders)
}

pub fn format_group(g: &FiniteAbelianPGroup) -> String {
    if g.is_trivial() {
        return format!("Z[{}^0]", g.p());
    }
    let parts: Vec<String> = g
        .orders()
        .iter()
        .map(|r| format!("{}^{}", g.p(), r))
        .collect();
    format!("Z[{}]", parts.join(" x "))
}

/// Comma-separated residues, e.g. `4,6`.
pub fn parse_element(src: &str, group: &FiniteAbelianPGroup) -> Result<GroupElement> {
    let mut residues = Vec::new();
    let mut offset = 0;
    for part in src.split(',') {
        let v: i64 = part.trim().parse().map_err(|_| Error::Parse {
            offset,
            msg: format!("bad residue '{}'", part.trim()),
        })?;
        residues.push(v);
        offset += part.len() + 1;
    }
    group.element(&residues)
}

pub fn format_element(x: &GroupElement) -> String {
    x.residues()
        .iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// The filtered-group expression language: `Z(k,l;p)`, `D(k;Z[...])`, and
/// products with `x`.
pub fn parse_expr(src: &str) -> Result<FilteredGroup> {
    let mut s = Scanner::new(src);
    let mut acc = parse_term(&mut s)?;
    while s.try_eat("x") {
        let next = parse_term(&mut s)?;
        acc = acc.product(&next)?;
    }
    s.done()?;
    Ok(acc)
}

fn parse_term(s: &mut Scanner) -> Result<FilteredGroup> {
    match s.peek() {
        Some('Z') => {
            s.eat("Z(")?;
            let k = s.number()? as u32;
            s.eat(",")?;
            let l = s.number()? as u32;
            s.eat(";")?;
            let p = s.number()?;
            s.eat(")")?;
            FilteredGroup::make_zkl(p, k, l)
        }
        Some('D') => {
            s.eat("D(")?;
            let k = s.number()? as u32;
            s.eat(";")?;
            let g = parse_group_inner(s)?;
            s.eat(")")?;
            FilteredGroup::make_dk(g, k)
        }
        _ => Err(s.err("expected Z(k,l;p) or D(k;Z[...])")),
    }
}

/// Parse an expression as a `Q_{p,k}` member: a product of `Z(k,l;p)` terms
/// with one shared k and p, and `D(l;Z[p])` accepted as `Z(l,l;p)` lifted
/// to the ambient k.
pub fn parse_qpk(src: &str) -> Result<QpkMember> {
    let mut s = Scanner::new(src);
    let mut tags: Vec<(u32, u32, u64)> = Vec::new();
    loop {
        match s.peek() {
            Some('Z') => {
                s.eat("Z(")?;
                let k = s.number()? as u32;
                s.eat(",")?;
                let l = s.number()? as u32;
                s.eat(";")?;
                let p = s.number()?;
                s.eat(")")?;
                tags.push((k, l, p));
            }
            Some('D') => {
                s.eat("D(")?;
                let l = s.number()? as u32;
                s.eat(";")?;
                let g = parse_group_inner(&mut s)?;
                s.eat(")")?;
                if g.orders() != [1] {
                    return Err(s.err("only D(l;Z[p]) blocks can join a catalog product"));
                }
                tags.push((l, l, g.p()));
            }
            _ => return Err(s.err("expected Z(k,l;p) or D(l;Z[p])")),
        }
        if !s.try_eat("x") {
            break;
        }
    }
    s.done()?;
    let k = tags.iter().map(|t| t.0).max().expect("nonempty");
    let p = tags[0].2;
    let mut mult = vec![0u32; k as usize];
    for &(ki, l, pi) in &tags {
        if pi != p {
            return Err(Error::precondition("mixed primes in catalog product"));
        }
        // Z(ki,l) at ambient k must represent the same filtration:
        // requires r(k,l) = r(ki,l) and matching chain, i.e. same exact
        // degree class
        if ki != k {
            let s_k = (k - l) % (p as u32 - 1);
            let canon_k = k - s_k;
            let s_ki = (ki - l) % (p as u32 - 1);
            if ki - s_ki != canon_k {
                return Err(Error::precondition(format!(
                    "factor Z({ki},{l};{p}) does not embed in the degree-{k} catalog"
                )));
            }
        }
        mult[l as usize - 1] += 1;
    }
    QpkMember::new(p, k, mult)
}

/// `F[p=3,k=4; Z9,Z9,Z9,3Z9,3Z9]`: chain levels 1..=k, each a product of
/// `coefficient Z modulus` factors (or `0` for the zero subgroup of a
/// component).
pub fn parse_filtration(src: &str) -> Result<FilteredGroup> {
    let mut s = Scanner::new(src);
    s.eat("F[p=")?;
    let p = s.number()?;
    s.eat(",k=")?;
    let k = s.number()? as u32;
    s.eat(";")?;
    // levels: coefficient/modulus pairs; modulus may be omitted in "0"
    #[derive(Clone)]
    struct Factor {
        coeff: Option<u64>, // None for the "0" token
        modulus: Option<u64>,
    }
    let mut levels: Vec<Vec<Factor>> = Vec::new();
    loop {
        let mut level = Vec::new();
        loop {
            s.skip_ws();
            let f = if s.try_eat("0") {
                Factor {
                    coeff: None,
                    modulus: None,
                }
            } else {
                let coeff = match s.peek() {
                    Some(c) if c.is_ascii_digit() => Some(s.number()?),
                    _ => Some(1),
                };
                s.eat("Z")?;
                let m = s.number()?;
                Factor {
                    coeff,
                    modulus: Some(m),
                }
            };
            level.push(f);
            if !s.try_eat("x") {
                break;
            }
        }
        levels.push(level);
        if !s.try_eat(",") {
            break;
        }
    }
    s.eat("]")?;
    s.done()?;
    // the chain may be given from index 1 (k entries) or from index 0 with
    // the first two entries equal (k+1 entries)
    if levels.len() == k as usize + 1 {
        let eq = {
            let a = &levels[0];
            let b = &levels[1];
            a.len() == b.len()
                && a.iter()
                    .zip(b)
                    .all(|(x, y)| x.coeff == y.coeff && x.modulus == y.modulus)
        };
        if !eq {
            return Err(Error::precondition(
                "a k+1 entry chain must start with two equal levels (index 0 = index 1)",
            ));
        }
        levels.remove(0);
    }
    if levels.len() != k as usize {
        return Err(Error::precondition(format!(
            "expected {k} (or {}) chain levels, got {}",
            k + 1,
            levels.len()
        )));
    }
    let m = levels[0].len();
    if levels.iter().any(|l| l.len() != m) {
        return Err(Error::precondition(
            "every chain level must list the same number of components",
        ));
    }
    // component moduli from the first level that names them
    let mut moduli = vec![None; m];
    for level in &levels {
        for (j, f) in level.iter().enumerate() {
            if let Some(mm) = f.modulus {
                match moduli[j] {
                    None => moduli[j] = Some(mm),
                    Some(old) if old == mm => {}
                    Some(old) => {
                        return Err(Error::precondition(format!(
                            "component {} modulus changes from {old} to {mm}",
                            j + 1
                        )));
                    }
                }
            }
        }
    }
    let mut orders = Vec::with_capacity(m);
    for (j, mm) in moduli.iter().enumerate() {
        let mm = mm.ok_or_else(|| {
            Error::precondition(format!("component {} modulus never named", j + 1))
        })?;
        let mut r = 0u32;
        let mut v = mm;
        while v > 1 {
            if v % p != 0 {
                return Err(Error::precondition(format!(
                    "modulus {mm} is not a power of p={p}"
                )));
            }
            v /= p;
            r += 1;
        }
        orders.push(r);
    }
    let group = FiniteAbelianPGroup::new(p, orders.clone())?;
    let mut chain = Vec::with_capacity(k as usize);
    for level in &levels {
        let mut exps = Vec::with_capacity(m);
        for (j, f) in level.iter().enumerate() {
            let e = match f.coeff {
                None => orders[j],
                Some(c) => {
                    let mut e = 0u32;
                    let mut v = c;
                    while v > 1 {
                        if v % p != 0 {
                            return Err(Error::precondition(format!(
                                "coefficient {c} is not a power of p={p}"
                            )));
                        }
                        v /= p;
                        e += 1;
                    }
                    e
                }
            };
            exps.push(e);
        }
        chain.push(ComponentwiseSubgroup::new(&group, exps)?);
    }
    FilteredGroup::new(group, chain, k)
}

pub fn format_filtration(f: &FilteredGroup) -> String {
    let mut s = format!("F[p={},k={};", f.p(), f.degree());
    for i in 1..=f.degree() {
        if i > 1 {
            s.push(',');
        }
        s.push(' ');
        let sub = f.subgroup_at(i);
        let parts: Vec<String> = sub
            .exponents()
            .iter()
            .zip(f.group().moduli())
            .map(|(&e, &m)| {
                if e == 0 {
                    format!("Z{m}")
                } else {
                    format!("{}Z{m}", f.p().pow(e))
                }
            })
            .collect();
        s.push_str(&parts.join("x"));
    }
    s.push(']');
    s
}

/// Subspace basis: vectors separated by `;`, entries by `,` — e.g.
/// `1,0;0,1`.
pub fn parse_subspace(src: &str, p: u64, ambient: usize) -> Result<FpSubspace> {
    let mut vectors = Vec::new();
    for row in src.split(';') {
        let mut v = Vec::new();
        for part in row.split(',') {
            let x: u64 = part.trim().parse().map_err(|_| Error::Parse {
                offset: 0,
                msg: format!("bad subspace entry '{}'", part.trim()),
            })?;
            v.push(x % p);
        }
        if v.len() != ambient {
            return Err(Error::precondition(format!(
                "subspace vector length {} does not match ambient {ambient}",
                v.len()
            )));
        }
        vectors.push(v);
    }
    FpSubspace::from_vectors(p, ambient, &vectors)
}

// ---------------------------------------------------------------------------
// JSON forms
// ---------------------------------------------------------------------------

/// Cube/box file: `{"group": "Z[3^2]", "n": 2, "values": [[0],[1],[2],[5]]}`
/// with the frozen vertex order (bit i of the index = coordinate v(i+1)).
#[derive(Serialize, Deserialize)]
pub struct CubeJson {
    pub group: String,
    pub n: u32,
    pub values: Vec<Vec<i64>>,
}

impl CubeJson {
    pub fn to_cube(&self) -> Result<CubeMap> {
        let group = parse_group(&self.group)?;
        let values: Vec<GroupElement> = self
            .values
            .iter()
            .map(|v| group.element(v))
            .collect::<Result<_>>()?;
        CubeMap::new(group, self.n, values)
    }

    pub fn to_corner(&self) -> Result<crate::cube::Corner> {
        let group = parse_group(&self.group)?;
        let values: Vec<GroupElement> = self
            .values
            .iter()
            .map(|v| group.element(v))
            .collect::<Result<_>>()?;
        crate::cube::Corner::new(group, self.n, values)
    }

    pub fn of_cube(q: &CubeMap) -> Self {
        CubeJson {
            group: format_group(q.group()),
            n: q.dim(),
            values: q
                .values()
                .iter()
                .map(|x| x.residues().iter().map(|&r| r as i64).collect())
                .collect(),
        }
    }
}

/// Polynomial map file:
/// `{"n":2, "target":"Z(4,2;3)", "coeffs":[{"w":[1,0],"a":[3]}]}`.
#[derive(Serialize, Deserialize)]
pub struct PolyJson {
    pub n: usize,
    pub target: String,
    pub coeffs: Vec<PolyCoeffJson>,
}

#[derive(Serialize, Deserialize)]
pub struct PolyCoeffJson {
    pub w: Vec<u32>,
    pub a: Vec<i64>,
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<PolyMap> {
        let target = parse_expr(&self.target)
            .or_else(|_| parse_filtration(&self.target))?;
        let mut coeffs = BTreeMap::new();
        for c in &self.coeffs {
            coeffs.insert(MultiIndex(c.w.clone()), target.group().element(&c.a)?);
        }
        PolyMap::new(self.n, target, coeffs)
    }

    pub fn of_poly(pm: &PolyMap, target_text: &str) -> Self {
        PolyJson {
            n: pm.domain_dim(),
            target: target_text.to_string(),
            coeffs: pm
                .coeffs()
                .iter()
                .map(|(w, a)| PolyCoeffJson {
                    w: w.0.clone(),
                    a: a.residues().iter().map(|&r| r as i64).collect(),
                })
                .collect(),
        }
    }
}

/// F_p^n function file (JSON form): values as [re, im] pairs in table
/// order.
#[derive(Serialize, Deserialize)]
pub struct FpFunctionJson {
    pub p: u64,
    pub n: u32,
    pub values: Vec<[f64; 2]>,
}

impl FpFunctionJson {
    pub fn to_function(&self) -> Result<FpFunction> {
        FpFunction::new(
            self.p,
            self.n,
            self.values
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect(),
        )
    }

    pub fn of_function(f: &FpFunction) -> Self {
        FpFunctionJson {
            p: f.p(),
            n: f.n(),
            values: f.values().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

/// Magic bytes and layout of the binary F_p^n function format: `NSF1`,
/// little-endian u64 p, u32 n, then 2 * p^n f64 values (re, im pairs).
pub const FP_BINARY_MAGIC: &[u8; 4] = b"NSF1";

pub fn fp_function_to_binary(f: &FpFunction) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + f.len() * 16);
    out.extend_from_slice(FP_BINARY_MAGIC);
    out.extend_from_slice(&f.p().to_le_bytes());
    out.extend_from_slice(&f.n().to_le_bytes());
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn fp_function_from_binary(bytes: &[u8]) -> Result<FpFunction> {
    let err = |offset: usize, msg: &str| Error::Parse {
        offset,
        msg: msg.into(),
    };
    if bytes.len() < 16 || &bytes[0..4] != FP_BINARY_MAGIC {
        return Err(err(0, "missing NSF1 magic"));
    }
    let p = u64::from_le_bytes(bytes[4..12].try_into().expect("sized"));
    let n = u32::from_le_bytes(bytes[12..16].try_into().expect("sized"));
    let total = (p as u128).pow(n);
    let want = 16 + total as usize * 16;
    if bytes.len() != want {
        return Err(err(bytes.len().min(want), "truncated value payload"));
    }
    let values = (0..total as usize)
        .map(|i| {
            let off = 16 + i * 16;
            let re = f64::from_le_bytes(bytes[off..off + 8].try_into().expect("sized"));
            let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().expect("sized"));
            Complex64::new(re, im)
        })
        .collect();
    FpFunction::new(p, n, values)
}

/// Non-classical polynomial file: `{p, n, k, r, values}` with r redundant
/// but validated.
#[derive(Serialize, Deserialize)]
pub struct NCPolyJson {
    pub p: u64,
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub values: Vec<u64>,
}

impl NCPolyJson {
    pub fn to_poly(&self) -> Result<NCPoly> {
        let poly = NCPoly::new(self.p, self.n, self.k, self.values.clone())?;
        if poly.r() != self.r {
            return Err(Error::precondition(format!(
                "stated depth r={} does not match floor((k-1)/(p-1))+1 = {}",
                self.r,
                poly.r()
            )));
        }
        Ok(poly)
    }

    pub fn of_poly(p: &NCPoly) -> Self {
        NCPolyJson {
            p: p.p(),
            n: p.n(),
            k: p.degree_bound(),
            r: p.r(),
            values: p.values().to_vec(),
        }
    }
}

/// Box map JSON (zero-based boxes used by poly and morphism commands).
#[derive(Serialize, Deserialize)]
pub struct BoxJson {
    pub group: String,
    pub extents: Vec<u32>,
    pub values: Vec<Vec<i64>>,
}

impl BoxJson {
    pub fn to_box(&self) -> Result<BoxMap> {
        let group = parse_group(&self.group)?;
        let values: Vec<GroupElement> = self
            .values
            .iter()
            .map(|v| group.element(v))
            .collect::<Result<_>>()?;
        BoxMap::new(group, vec![0; self.extents.len()], self.extents.clone(), values)
    }

    pub fn of_box(b: &BoxMap) -> Self {
        BoxJson {
            group: format_group(b.group()),
            extents: b.extents().to_vec(),
            values: b
                .values()
                .iter()
                .map(|x| x.residues().iter().map(|&r| r as i64).collect())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_roundtrip() {
        let g = parse_group("Z[3^2 x 3^1]").unwrap();
        assert_eq!(g.orders(), &[2, 1]);
        assert_eq!(format_group(&g), "Z[3^2 x 3^1]");
        assert_eq!(parse_group("Z[3]").unwrap().orders(), &[1]);
        // byte offsets in errors
        match parse_group("Z[3^2 x 5]") {
            Err(Error::Parse { offset, .. }) => assert!(offset >= 8),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_group("Z[4]").is_err());
    }

    #[test]
    fn element_roundtrip() {
        let g = parse_group("Z[3^2 x 3^1]").unwrap();
        let x = parse_element("4, 2", &g).unwrap();
        assert_eq!(format_element(&x), "4,2");
        assert!(parse_element("4", &g).is_err());
    }

    #[test]
    fn expr_examples() {
        let f = parse_expr("Z(4,2;3)").unwrap();
        assert_eq!(f, FilteredGroup::make_zkl(3, 4, 2).unwrap());
        let f = parse_expr("Z(4,2;3) x Z(4,4;3)").unwrap();
        assert_eq!(f.group().orders(), &[2, 1]);
        let f = parse_expr("D(2;Z[3^2])").unwrap();
        assert_eq!(
            f,
            FilteredGroup::make_dk(FiniteAbelianPGroup::cyclic(3, 2).unwrap(), 2).unwrap()
        );
        assert!(parse_expr("Q(1,1;3)").is_err());
    }

    #[test]
    fn filtration_roundtrip() {
        // k+1 entries: chain from index 0 with index 0 = index 1
        let f = parse_filtration("F[p=3,k=4; Z9,Z9,Z9,3Z9,3Z9]").unwrap();
        assert_eq!(f, FilteredGroup::make_zkl(3, 4, 2).unwrap());
        // k entries: chain from index 1
        let f = parse_filtration("F[p=3,k=4; Z9,Z9,3Z9,3Z9]").unwrap();
        assert_eq!(f, FilteredGroup::make_zkl(3, 4, 2).unwrap());
        let text = format_filtration(&f);
        assert_eq!(parse_filtration(&text).unwrap(), f);
        // products and zero subgroups
        let g = parse_filtration("F[p=3,k=2; Z9xZ3, 3Z9x0]").unwrap();
        assert_eq!(g.group().orders(), &[2, 1]);
        assert_eq!(g.subgroup_at(2).exponents(), &[1, 1]);
    }

    #[test]
    fn qpk_parse() {
        let m = parse_qpk("Z(4,2;3)xZ(4,4;3)").unwrap();
        assert_eq!(m.multiplicities(), &[0, 1, 0, 1]);
        // Z(3,1;3) has the same chain as Z(4,1;3), so it may join a k=4
        // product; Z(3,2;3) = D_2(Z_3) has a different exact degree class
        // and may not
        assert_eq!(
            parse_qpk("Z(4,2;3)xZ(3,1;3)").unwrap().multiplicities(),
            &[1, 1, 0, 0]
        );
        assert!(parse_qpk("Z(4,2;3)xZ(3,2;3)").is_err());
        let m = parse_qpk("D(2;Z[3])").unwrap();
        assert_eq!(m.multiplicities(), &[0, 1]);
    }

    #[test]
    fn cube_json_roundtrip() {
        let g = parse_group("Z[3^2]").unwrap();
        let q = CubeMap::new(
            g.clone(),
            2,
            vec![
                g.element(&[0]).unwrap(),
                g.element(&[1]).unwrap(),
                g.element(&[2]).unwrap(),
                g.element(&[5]).unwrap(),
            ],
        )
        .unwrap();
        let j = CubeJson::of_cube(&q);
        let text = serde_json::to_string(&j).unwrap();
        let back: CubeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_cube().unwrap(), q);
    }

    #[test]
    fn fp_binary_roundtrip() {
        let f = FpFunction::from_fn(3, 2, |x| {
            Complex64::new(x[0] as f64, x[1] as f64 * 0.5)
        })
        .unwrap();
        let bytes = fp_function_to_binary(&f);
        let back = fp_function_from_binary(&bytes).unwrap();
        assert_eq!(back.values(), f.values());
        assert!(fp_function_from_binary(&bytes[..10]).is_err());
    }

    #[test]
    fn ncpoly_json_depth_validation() {
        let j = NCPolyJson {
            p: 2,
            n: 1,
            k: 2,
            r: 2,
            values: vec![0, 1],
        };
        assert!(j.to_poly().is_ok());
        let bad = NCPolyJson { r: 1, ..j };
        assert!(bad.to_poly().is_err());
    }
}
