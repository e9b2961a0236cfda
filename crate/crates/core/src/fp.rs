//! Linear algebra over F_p: reduced row echelon form, subspaces of Z_p^m in
//! echelon basis, and deterministic basis completion.

use crate::group::inv_mod;
use crate::{Error, Result};

fn reduce(v: &mut [u64], p: u64) {
    for x in v.iter_mut() {
        *x %= p;
    }
}

/// Row-reduce `rows` in place over F_p; returns pivot columns in order.
/// Zero rows are removed.
pub fn rref(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    for row in rows.iter_mut() {
        reduce(row, p);
    }
    let cols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot_row) = (rank..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = inv_mod(rows[rank][col] as i64, p).expect("nonzero mod prime");
        for x in rows[rank].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        for i in 0..rows.len() {
            if i != rank && rows[i][col] != 0 {
                let c = rows[i][col];
                for j in 0..cols {
                    let sub = (c as u128 * rows[rank][j] as u128) % p as u128;
                    rows[i][j] = ((rows[i][j] as u128 + p as u128 * p as u128 - sub)
                        % p as u128) as u64;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    rows.retain(|r| r.iter().any(|&x| x != 0));
    pivots
}

/// A subspace of Z_p^m held as a reduced-row-echelon basis with strictly
/// increasing pivots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpSubspace {
    p: u64,
    ambient: usize,
    basis: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpSubspace {
    pub fn from_vectors(p: u64, ambient: usize, vectors: &[Vec<u64>]) -> Result<Self> {
        for v in vectors {
            if v.len() != ambient {
                return Err(Error::precondition(format!(
                    "vector length {} does not match ambient dimension {ambient}",
                    v.len()
                )));
            }
        }
        let mut basis: Vec<Vec<u64>> = vectors.to_vec();
        let pivots = rref(&mut basis, p);
        Ok(FpSubspace {
            p,
            ambient,
            basis,
            pivots,
        })
    }

    pub fn zero(p: u64, ambient: usize) -> Self {
        FpSubspace {
            p,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(p: u64, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        FpSubspace {
            p,
            ambient,
            basis,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    /// Reduce `v` against the echelon basis; the remainder is zero iff v is
    /// a member.
    fn residual(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut w: Vec<u64> = v.iter().map(|&x| x % p).collect();
        for (row, &piv) in self.basis.iter().zip(&self.pivots) {
            if w[piv] != 0 {
                let c = w[piv];
                for j in 0..self.ambient {
                    let sub = (c as u128 * row[j] as u128) % p as u128;
                    w[j] = ((w[j] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.residual(v).iter().all(|&x| x == 0)
    }

    pub fn contains_subspace(&self, other: &FpSubspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    /// All p^dim member vectors, coefficients enumerated in mixed-radix
    /// order over the basis.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let mut out = Vec::with_capacity((p as usize).pow(self.dim() as u32));
        let mut coeffs = vec![0u64; self.dim()];
        loop {
            let mut v = vec![0u64; self.ambient];
            for (c, row) in coeffs.iter().zip(&self.basis) {
                for j in 0..self.ambient {
                    v[j] = (v[j] + c * row[j]) % p;
                }
            }
            out.push(v);
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return out;
                }
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }
}

/// Extend `partial`'s basis to a basis of `within`, deterministically: scan
/// the echelon basis vectors of `within` in lexicographically increasing
/// order and keep each one that is independent of what has been collected.
/// Returns only the added vectors.
pub fn complete_basis(partial: &FpSubspace, within: &FpSubspace) -> Result<Vec<Vec<u64>>> {
    if partial.p != within.p || partial.ambient != within.ambient {
        return Err(Error::mismatch(
            "basis completion requires matching prime and ambient dimension".to_string(),
        ));
    }
    if !within.contains_subspace(partial) {
        return Err(Error::precondition(
            "partial subspace is not contained in the target subspace",
        ));
    }
    let mut candidates: Vec<Vec<u64>> = within.basis.to_vec();
    candidates.sort();
    let mut current = partial.clone();
    let mut added = Vec::new();
    for cand in candidates {
        if current.dim() == within.dim() {
            break;
        }
        if !current.contains(&cand) {
            let mut vectors = current.basis.clone();
            vectors.push(cand.clone());
            current = FpSubspace::from_vectors(current.p, current.ambient, &vectors)?;
            added.push(cand);
        }
    }
    debug_assert_eq!(current.dim(), within.dim());
    Ok(added)
}

/// Echelonize `rows` by trailing coordinate: the output rows span the same
/// space, have strictly increasing "last nonzero" positions, and therefore
/// give nested bases of the intersections with the coordinate prefixes
/// `Z_p^s x 0`. Used by the quotient algorithm.
pub fn echelon_by_trailing(rows: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x % p).collect())
        .collect();
    rows.retain(|r| r.iter().any(|&x| x != 0));
    let mut out: Vec<Vec<u64>> = Vec::new();
    // eliminate from the rightmost coordinate
    'next: for mut row in rows {
        loop {
            let Some(last) = row.iter().rposition(|&x| x != 0) else {
                continue 'next;
            };
            if let Some(other) = out.iter().find(|o| o.iter().rposition(|&x| x != 0) == Some(last))
            {
                let c = (row[last] as u128
                    * inv_mod(other[last] as i64, p).expect("nonzero mod prime") as u128
                    % p as u128) as u64;
                for j in 0..row.len() {
                    let sub = (c as u128 * other[j] as u128) % p as u128;
                    row[j] =
                        ((row[j] as u128 + p as u128 * p as u128 - sub) % p as u128) as u64;
                }
            } else {
                // normalize the trailing entry to 1
                let inv = inv_mod(row[last] as i64, p).expect("nonzero mod prime");
                for x in row.iter_mut() {
                    *x = (*x as u128 * inv as u128 % p as u128) as u64;
                }
                out.push(row);
                continue 'next;
            }
        }
    }
    out.sort_by_key(|r| r.iter().rposition(|&x| x != 0));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_basic() {
        let mut rows = vec![vec![2, 1], vec![1, 1]];
        let pivots = rref(&mut rows, 3);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rows, vec![vec![1, 0], vec![0, 1]]);
        // dependent rows collapse
        let mut rows = vec![vec![2, 1], vec![1, 2]];
        let pivots = rref(&mut rows, 3);
        assert_eq!(pivots, vec![0]);
        assert_eq!(rows, vec![vec![1, 2]]);
    }

    #[test]
    fn membership() {
        let s = FpSubspace::from_vectors(3, 2, &[vec![1, 1]]).unwrap();
        assert!(s.contains(&[2, 2]));
        assert!(!s.contains(&[1, 2]));
        assert_eq!(s.dim(), 1);
    }

    #[test]
    fn complete_basis_examples() {
        // partial = <(1,1)> in Z_3^2, within = full space: adds (0,1)
        let partial = FpSubspace::from_vectors(3, 2, &[vec![1, 1]]).unwrap();
        let within = FpSubspace::full(3, 2);
        assert_eq!(complete_basis(&partial, &within).unwrap(), vec![vec![0, 1]]);
        // partial = within: adds nothing
        assert!(complete_basis(&within, &within).unwrap().is_empty());
        // partial = 0, within = <e1>: adds (1,0,...)
        let zero = FpSubspace::zero(3, 3);
        let e1 = FpSubspace::from_vectors(3, 3, &[vec![1, 0, 0]]).unwrap();
        assert_eq!(
            complete_basis(&zero, &e1).unwrap(),
            vec![vec![1, 0, 0]]
        );
    }

    #[test]
    fn complete_basis_requires_containment() {
        let a = FpSubspace::from_vectors(3, 2, &[vec![1, 0]]).unwrap();
        let b = FpSubspace::from_vectors(3, 2, &[vec![0, 1]]).unwrap();
        assert!(matches!(
            complete_basis(&a, &b),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn trailing_echelon_gives_nested_prefix_bases() {
        // H = <(1,1)> in Z_3^2: no vector supported in the first coordinate
        let rows = echelon_by_trailing(&[vec![1, 1]], 3);
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].iter().rposition(|&x| x != 0), Some(1));
        // H = Z_3^2: one row ends at coordinate 0, one at coordinate 1
        let rows = echelon_by_trailing(&[vec![1, 1], vec![1, 2]], 3);
        let ends: Vec<_> = rows
            .iter()
            .map(|r| r.iter().rposition(|&x| x != 0).unwrap())
            .collect();
        assert_eq!(ends, vec![0, 1]);
    }
}
