//! Row reduction: a generic exact Gauss–Jordan over any [`Scalars`]
//! implementation, and a dense `u64` kernel for word-size primes.

use crate::exactfield::{FieldElem, FieldError, FieldSpec};
use crate::modp::PrimeField;

pub trait Scalars {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    /// Pivot preference; smaller is better.
    fn weight(&self, _a: &Self::Elem) -> u64 {
        0
    }
}

impl Scalars for FieldSpec {
    type Elem = FieldElem;
    fn zero(&self) -> FieldElem {
        FieldSpec::zero(self)
    }
    fn one(&self) -> FieldElem {
        FieldSpec::one(self)
    }
    fn is_zero(&self, a: &FieldElem) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a + b
    }
    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a - b
    }
    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        a * b
    }
    fn neg(&self, a: &FieldElem) -> FieldElem {
        -a
    }
    fn inv(&self, a: &FieldElem) -> Result<FieldElem, FieldError> {
        a.inv()
    }
    fn weight(&self, a: &FieldElem) -> u64 {
        a.weight()
    }
}

impl Scalars for PrimeField {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::add(self, *a, *b)
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::sub(self, *a, *b)
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        PrimeField::mul(self, *a, *b)
    }
    fn neg(&self, a: &u64) -> u64 {
        PrimeField::neg(self, *a)
    }
    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if *a == 0 {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(PrimeField::inv(self, *a))
        }
    }
}

/// Reduced row echelon form: pivot entries are 1 and pivot columns are
/// otherwise zero.
#[derive(Debug, Clone)]
pub struct Echelon<E> {
    pub ncols: usize,
    pub rows: Vec<Vec<E>>,
    pub pivots: Vec<usize>,
}

impl<E: Clone> Echelon<E> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.ncols - self.rank()
    }

    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols).filter(|&c| !is_pivot[c]).collect()
    }

    /// One kernel vector per free column `f`, with a 1 in position `f` and
    /// zeros at the other free columns.
    pub fn kernel_basis<S: Scalars<Elem = E>>(&self, s: &S) -> Vec<Vec<E>> {
        self.free_columns()
            .into_iter()
            .map(|f| {
                let mut v = vec![s.zero(); self.ncols];
                v[f] = s.one();
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    if !s.is_zero(&row[f]) {
                        v[p] = s.neg(&row[f]);
                    }
                }
                v
            })
            .collect()
    }
}

/// Exact Gauss–Jordan elimination. For each column the pivot is the
/// lightest nonzero entry among the unused rows, ties to the lowest index.
pub fn rref<S: Scalars>(
    s: &S,
    mut rows: Vec<Vec<S::Elem>>,
    ncols: usize,
) -> Result<Echelon<S::Elem>, FieldError> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let best = (r..rows.len())
            .filter(|&i| !s.is_zero(&rows[i][c]))
            .min_by_key(|&i| (s.weight(&rows[i][c]), i));
        let Some(best) = best else { continue };
        rows.swap(r, best);
        let inv = s.inv(&rows[r][c])?;
        let pivot_row: Vec<S::Elem> = rows[r]
            .iter()
            .map(|x| if s.is_zero(x) { s.zero() } else { s.mul(x, &inv) })
            .collect();
        let support: Vec<usize> = (c..ncols).filter(|&j| !s.is_zero(&pivot_row[j])).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || s.is_zero(&row[c]) {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                let t = s.mul(&factor, &pivot_row[j]);
                row[j] = s.sub(&row[j], &t);
            }
        }
        rows[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    Ok(Echelon {
        ncols,
        rows,
        pivots,
    })
}

/// Row-major dense matrix of residues.
#[derive(Debug, Clone)]
pub struct ModMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        ModMatrix {
            nrows,
            ncols,
            data: vec![0; nrows * ncols],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>], ncols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), ncols);
        for (i, r) in rows.iter().enumerate() {
            m.row_mut(i).copy_from_slice(r);
        }
        m
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.ncols + j] = v;
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.ncols + j]
    }
}

/// Updates accumulated in a `u64` before a full reduction; each adds < 2^56.
const LAZY_BUDGET: usize = 120;

fn reduce_slice(fp: &PrimeField, xs: &mut [u64]) {
    let p = fp.p();
    xs.iter_mut().for_each(|x| *x %= p);
}

/// Dense elimination mod `p`. With `reduced` the result is the RREF,
/// otherwise a row echelon form with unit pivots.
pub fn echelon_mod(fp: &PrimeField, mut m: ModMatrix, reduced: bool) -> Echelon<u64> {
    let p = fp.p();
    let n = m.ncols;
    let mut pivots = Vec::new();
    let mut r = 0;
    let mut pending = 0usize;
    reduce_slice(fp, &mut m.data);
    for c in 0..n {
        if r == m.nrows {
            break;
        }
        let mut found = None;
        for i in r..m.nrows {
            let v = m.data[i * n + c] % p;
            m.data[i * n + c] = v;
            if v != 0 {
                found = Some(i);
                break;
            }
        }
        let Some(i) = found else { continue };
        if i != r {
            let (a, b) = m.data.split_at_mut(i * n);
            a[r * n..(r + 1) * n].swap_with_slice(&mut b[..n]);
        }
        if pending + 1 >= LAZY_BUDGET {
            let start = if reduced { 0 } else { r };
            reduce_slice(fp, &mut m.data[start * n..]);
            pending = 0;
        }
        let prow_start = r * n;
        reduce_slice(fp, &mut m.data[prow_start + c..prow_start + n]);
        let inv = fp.inv(m.data[prow_start + c]);
        for x in &mut m.data[prow_start + c..prow_start + n] {
            *x = *x * inv % p;
        }
        let pivot_row: Vec<u64> = m.data[prow_start + c..prow_start + n].to_vec();
        let first = if reduced { 0 } else { r + 1 };
        for i in first..m.nrows {
            if i == r {
                continue;
            }
            let row = &mut m.data[i * n + c..(i + 1) * n];
            let f = row[0] % p;
            if f == 0 {
                row[0] = 0;
                continue;
            }
            let g = p - f;
            for (x, &y) in row.iter_mut().zip(&pivot_row) {
                *x += g * y;
            }
            row[0] = 0;
        }
        pending += 1;
        pivots.push(c);
        r += 1;
    }
    reduce_slice(fp, &mut m.data);
    let rows = (0..r).map(|i| m.row(i).to_vec()).collect();
    Echelon {
        ncols: n,
        rows,
        pivots,
    }
}

pub fn rank_mod(fp: &PrimeField, m: ModMatrix) -> usize {
    echelon_mod(fp, m, false).rank()
}

/// Echelon basis grown one vector at a time.
#[derive(Debug, Clone)]
pub struct IncrementalBasis {
    fp: PrimeField,
    ncols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl IncrementalBasis {
    pub fn new(fp: PrimeField, ncols: usize) -> Self {
        IncrementalBasis {
            fp,
            ncols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    /// Reduces `v` against the basis, returning the (fully reduced) remainder.
    pub fn residue(&self, mut v: Vec<u64>) -> Vec<u64> {
        let p = self.fp.p();
        let mut pending = 0;
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c] % p;
            if f == 0 {
                continue;
            }
            let g = p - f;
            for (x, &y) in v[c..].iter_mut().zip(&row[c..]) {
                *x += g * y;
            }
            pending += 1;
            if pending == LAZY_BUDGET {
                reduce_slice(&self.fp, &mut v);
                pending = 0;
            }
        }
        reduce_slice(&self.fp, &mut v);
        v
    }

    /// Adds `v` if independent; returns whether it was.
    pub fn insert(&mut self, v: Vec<u64>) -> bool {
        let mut v = self.residue(v);
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = self.fp.inv(v[c]);
        v.iter_mut().for_each(|x| *x = self.fp.mul(*x, inv));
        self.rows.push(v);
        self.pivots.push(c);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::rat;
    use proptest::prelude::*;

    fn q_rows(rows: &[&[i64]]) -> Vec<Vec<FieldElem>> {
        let q = FieldSpec::rationals();
        rows.iter()
            .map(|r| r.iter().map(|&x| q.from_int(x)).collect())
            .collect()
    }

    #[test]
    fn exact_kernel_of_small_matrix() {
        let q = FieldSpec::rationals();
        let m = q_rows(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let e = rref(&q, m.clone(), 3).unwrap();
        assert_eq!(e.rank(), 2);
        let ker = e.kernel_basis(&q);
        assert_eq!(ker.len(), 1);
        for row in &m {
            let dot = row
                .iter()
                .zip(&ker[0])
                .fold(q.zero(), |acc, (a, b)| &acc + &(a * b));
            assert!(dot.is_zero());
        }
        assert_eq!(ker[0][2], q.one());
        assert_eq!(ker[0][0], q.from_rational(rat(-1)));
    }

    #[test]
    fn lazy_reduction_survives_many_pivots() {
        let fp = PrimeField::new(268_435_399);
        let n = 300;
        let mut m = ModMatrix::zeros(n, n);
        let mut s = 12345u64;
        for x in m.data.iter_mut() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *x = (s >> 33) % fp.p();
        }
        // make the last row a combination of the first two
        for j in 0..n {
            let v = fp.add(m.get(0, j), fp.mul(3, m.get(1, j)));
            m.set(n - 1, j, v);
        }
        let e = echelon_mod(&fp, m.clone(), true);
        assert_eq!(e.rank(), n - 1);
        let ker = e.kernel_basis(&fp);
        assert_eq!(ker.len(), 1);
        for i in 0..n {
            let dot = (0..n).fold(0, |acc, j| fp.add(acc, fp.mul(m.get(i, j), ker[0][j])));
            assert_eq!(dot, 0);
        }
    }

    proptest! {
        #[test]
        fn modular_matches_generic(entries in proptest::collection::vec(0u64..5, 48)) {
            let fp = PrimeField::new(7);
            let rows: Vec<Vec<u64>> = entries.chunks(8).map(|c| c.to_vec()).collect();
            let generic = rref(&fp, rows.clone(), 8).unwrap();
            let dense = echelon_mod(&fp, ModMatrix::from_rows(&rows, 8), true);
            prop_assert_eq!(&generic.pivots, &dense.pivots);
            prop_assert_eq!(&generic.rows, &dense.rows);
            prop_assert_eq!(rank_mod(&fp, ModMatrix::from_rows(&rows, 8)), generic.rank());
            let mut inc = IncrementalBasis::new(fp, 8);
            for r in rows {
                inc.insert(r);
            }
            prop_assert_eq!(inc.rank(), generic.rank());
        }
    }
}
