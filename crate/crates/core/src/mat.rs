//! Dense matrices over exact scalars, plus the integer normal forms
//! (Hermite, Smith), fraction-free determinants and rational elimination
//! that the lattice layer is built on.
//!
//! Conventions: vectors are rows, a sublattice basis is a matrix whose rows
//! span it, and transformation matrices act on the left (`u * m = h`).

use crate::exact::{Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, Mul};

#[derive(Clone, PartialEq, Eq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IMat = Mat<Int>;
pub type QMat = Mat<Rat>;

impl<T: Clone> Mat<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Self {
        Mat {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<T> {
        self.row(i).to_vec()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(|i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.at(i, j).clone());
            }
        }
        Mat {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Stack `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn submatrix_rows(&self, keep: &[usize]) -> Self {
        Mat {
            rows: keep.len(),
            cols: self.cols,
            data: keep
                .iter()
                .flat_map(|&i| self.row(i).iter().cloned())
                .collect(),
        }
    }
}

impl<T> Mat<T>
where
    T: Clone + Zero + One + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat::filled(rows, cols, T::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if *a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.at(i, j).clone() + a.clone() * other.at(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|v| *v == T::zero())
    }
}

impl<T: fmt::Display> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Row-vector times matrix.
pub fn row_mul<T>(v: &[T], m: &Mat<T>) -> Vec<T>
where
    T: Clone + Zero + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    assert_eq!(v.len(), m.rows(), "row_mul shape mismatch");
    let mut out = vec![T::zero(); m.cols()];
    for (k, a) in v.iter().enumerate() {
        if *a == T::zero() {
            continue;
        }
        for (j, o) in out.iter_mut().enumerate() {
            *o = o.clone() + a.clone() * m.at(k, j).clone();
        }
    }
    out
}

/// Symmetric pairing `a * g * b^T` of two row vectors.
pub fn pair<T>(g: &Mat<T>, a: &[T], b: &[T]) -> T
where
    T: Clone + Zero + PartialEq + Add<Output = T> + Mul<Output = T>,
{
    let ag = row_mul(a, g);
    ag.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

// ---------------------------------------------------------------------------
// Hermite normal form
// ---------------------------------------------------------------------------

/// Row-style Hermite normal form `u * m = h` with `u` unimodular: pivots are
/// positive, entries above a pivot are reduced into `[0, pivot)`, zero rows
/// sink to the bottom. Unique for a given row span, which makes HNF bases
/// canonical and directly comparable.
pub struct Hnf {
    pub h: IMat,
    pub u: IMat,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn hnf(m: &IMat) -> Hnf {
    let rows = m.rows();
    let cols = m.cols();
    let mut h = m.clone();
    let mut u = IMat::identity(rows);
    let mut r = 0usize;
    let mut pivots = Vec::new();

    for col in 0..cols {
        if r == rows {
            break;
        }
        // Gauss-reduce column `col` below row r until a single nonzero remains.
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !h.at(i, col).is_zero() {
                    best = match best {
                        None => Some(i),
                        Some(b) => {
                            if h.at(i, col).abs() < h.at(b, col).abs() {
                                Some(i)
                            } else {
                                Some(b)
                            }
                        }
                    };
                }
            }
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut any_left = false;
            let piv = h.at(r, col).clone();
            for i in r + 1..rows {
                if h.at(i, col).is_zero() {
                    continue;
                }
                let q = h.at(i, col).div_floor(&piv);
                row_sub_scaled(&mut h, i, r, &q);
                row_sub_scaled(&mut u, i, r, &q);
                if !h.at(i, col).is_zero() {
                    any_left = true;
                }
            }
            if !any_left {
                break;
            }
        }
        if h.at(r, col).is_zero() {
            continue;
        }
        if h.at(r, col).is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        let piv = h.at(r, col).clone();
        for i in 0..r {
            let q = h.at(i, col).div_floor(&piv);
            if !q.is_zero() {
                row_sub_scaled(&mut h, i, r, &q);
                row_sub_scaled(&mut u, i, r, &q);
            }
        }
        pivots.push(col);
        r += 1;
    }

    Hnf {
        h,
        u,
        rank: r,
        pivots,
    }
}

fn row_sub_scaled(m: &mut IMat, dst: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    for j in 0..m.cols() {
        let v = m.at(dst, j) - q * m.at(src, j);
        m.set(dst, j, v);
    }
}

fn negate_row(m: &mut IMat, i: usize) {
    for j in 0..m.cols() {
        let v = -m.at(i, j).clone();
        m.set(i, j, v);
    }
}

/// The nonzero rows of the HNF: a canonical basis for the row span.
pub fn hnf_basis(m: &IMat) -> IMat {
    let res = hnf(m);
    res.h.submatrix_rows(&(0..res.rank).collect::<Vec<_>>())
}

/// Basis for the left kernel `{ x : x m = 0 }`, HNF-canonicalized.
pub fn left_kernel(m: &IMat) -> IMat {
    let res = hnf(m);
    let idx: Vec<usize> = (res.rank..m.rows()).collect();
    let raw = res.u.submatrix_rows(&idx);
    if raw.rows() == 0 {
        raw
    } else {
        hnf_basis(&raw)
    }
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

/// Smith normal form `u * m * v = d` with `u`, `v` unimodular and diagonal
/// entries `d1 | d2 | ...`, all nonnegative.
pub struct Snf {
    pub d: IMat,
    pub u: IMat,
    pub v: IMat,
}

pub fn snf(m: &IMat) -> Snf {
    let rows = m.rows();
    let cols = m.cols();
    let mut d = m.clone();
    let mut u = IMat::identity(rows);
    let mut v = IMat::identity(cols);

    let mut t = 0usize;
    while t < rows.min(cols) {
        // Locate the smallest-magnitude nonzero entry of the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d.at(i, j).is_zero() {
                    best = match best {
                        None => Some((i, j)),
                        Some((bi, bj)) => {
                            if d.at(i, j).abs() < d.at(bi, bj).abs() {
                                Some((i, j))
                            } else {
                                Some((bi, bj))
                            }
                        }
                    };
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        // Clear row and column t; restart whenever a reduction leaves a
        // nonzero remainder (the remainder is strictly smaller, so this
        // terminates).
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if d.at(i, t).is_zero() {
                    continue;
                }
                let q = d.at(i, t).div_floor(d.at(t, t));
                row_sub_scaled(&mut d, i, t, &q);
                row_sub_scaled(&mut u, i, t, &q);
                if !d.at(i, t).is_zero() {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d.at(t, j).is_zero() {
                    continue;
                }
                let q = d.at(t, j).div_floor(d.at(t, t));
                col_sub_scaled(&mut d, j, t, &q);
                col_sub_scaled(&mut v, j, t, &q);
                if !d.at(t, j).is_zero() {
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                    dirty = true;
                }
            }
        }

        // Divisibility fix: fold any non-multiple into row t and redo.
        let piv = d.at(t, t).clone();
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if !(d.at(i, j) % &piv).is_zero() {
                    row_add(&mut d, t, i);
                    row_add(&mut u, t, i);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d.at(t, t).is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }

    Snf { d, u, v }
}

fn swap_cols(m: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn col_sub_scaled(m: &mut IMat, dst: usize, src: usize, q: &Int) {
    if q.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let v = m.at(i, dst) - q * m.at(i, src);
        m.set(i, dst, v);
    }
}

fn row_add(m: &mut IMat, dst: usize, src: usize) {
    for j in 0..m.cols() {
        let v = m.at(dst, j) + m.at(src, j);
        m.set(dst, j, v);
    }
}

/// Determinant by the Bareiss fraction-free algorithm (exact, no rationals).
pub fn bareiss_det(m: &IMat) -> Int {
    assert_eq!(m.rows(), m.cols(), "determinant of non-square matrix");
    let n = m.rows();
    if n == 0 {
        return Int::one();
    }
    let mut a = m.clone();
    let mut prev = Int::one();
    let mut sign = 1i32;
    for k in 0..n - 1 {
        if a.at(k, k).is_zero() {
            let swap = (k + 1..n).find(|&i| !a.at(i, k).is_zero());
            match swap {
                None => return Int::zero(),
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                a.set(i, j, num / &prev);
            }
            a.set(i, k, Int::zero());
        }
        prev = a.at(k, k).clone();
    }
    let det = a.at(n - 1, n - 1).clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

// ---------------------------------------------------------------------------
// Rational elimination
// ---------------------------------------------------------------------------

/// Reduced row echelon form; returns pivot column indices.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let rows = m.rows();
    let cols = m.cols();
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a.at(i, col).is_zero()) else {
            continue;
        };
        a.swap_rows(r, p);
        let inv = a.at(r, col).clone();
        for j in 0..cols {
            let v = a.at(r, j) / &inv;
            a.set(r, j, v);
        }
        for i in 0..rows {
            if i == r || a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).clone();
            for j in 0..cols {
                let v = a.at(i, j) - &f * a.at(r, j);
                a.set(i, j, v);
            }
        }
        pivots.push(col);
        r += 1;
    }
    (a, pivots)
}

/// Solve `c * basis = target` for a row of coefficients `c`.
/// Returns `None` when `target` is not in the row span. When the rows of
/// `basis` are dependent an arbitrary preimage is returned.
pub fn solve_in_row_span(target: &[Rat], basis: &QMat) -> Option<Vec<Rat>> {
    assert_eq!(target.len(), basis.cols(), "solve shape mismatch");
    // Transpose to the column picture: basis^T c^T = target^T.
    let rows = basis.cols();
    let cols = basis.rows();
    let mut aug = QMat::zero(rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            aug.set(i, j, basis.at(j, i).clone());
        }
        aug.set(i, cols, target[i].clone());
    }
    let (e, pivots) = rref(&aug);
    if pivots.contains(&cols) {
        return None; // inconsistent
    }
    let mut c = vec![Rat::zero(); cols];
    for (k, &pc) in pivots.iter().enumerate() {
        c[pc] = e.at(k, cols).clone();
    }
    Some(c)
}

/// Basis for the rational left kernel `{ x : x m = 0 }`.
pub fn q_left_kernel(m: &QMat) -> QMat {
    let t = m.transpose();
    let (e, pivots) = rref(&t);
    let n = m.rows();
    let free: Vec<usize> = (0..n).filter(|j| !pivots.contains(j)).collect();
    let mut rows = Vec::new();
    for &f in &free {
        let mut x = vec![Rat::zero(); n];
        x[f] = Rat::one();
        for (k, &pc) in pivots.iter().enumerate() {
            x[pc] = -e.at(k, f).clone();
        }
        rows.push(x);
    }
    if rows.is_empty() {
        QMat::zero(0, n)
    } else {
        QMat::from_rows(rows)
    }
}

/// Inverse of a square rational matrix, `None` if singular.
pub fn q_inverse(m: &QMat) -> Option<QMat> {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    let mut aug = QMat::zero(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.at(i, j).clone());
        }
        aug.set(i, n + i, Rat::one());
    }
    let (e, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    let mut inv = QMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, e.at(i, n + j).clone());
        }
    }
    Some(inv)
}

/// Rank of a rational matrix.
pub fn q_rank(m: &QMat) -> usize {
    rref(m).1.len()
}

/// Scale a rational matrix to an integer one; returns the common denominator.
pub fn clear_denominators(m: &QMat) -> (IMat, Int) {
    let all: Vec<Rat> = m.to_rows().into_iter().flatten().collect();
    let d = crate::exact::common_denominator(&all);
    let scaled = m.map(|r| {
        let v = r * crate::exact::rat_int(&d);
        debug_assert!(v.denom().is_one());
        v.numer().clone()
    });
    (scaled, d)
}

/// Signature `(positive, negative, zero)` of a symmetric rational matrix,
/// computed by exact symmetric Gaussian reduction (Sylvester's law makes the
/// counts basis-independent). A zero diagonal with a nonzero off-diagonal
/// entry is repaired by adding that row and column first.
pub fn signature(g: &QMat) -> (usize, usize, usize) {
    assert_eq!(g.rows(), g.cols(), "signature of non-square matrix");
    debug_assert!(is_symmetric(g), "signature of non-symmetric matrix");
    let n = g.rows();
    let mut a = g.clone();
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    for k in 0..n {
        if a.at(k, k).is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a.at(j, j).is_zero()) {
                a.swap_rows(k, j);
                q_swap_cols(&mut a, k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a.at(k, j).is_zero()) {
                // Trailing diagonal is all zero: a(k,k) becomes 2*a(k,j) != 0.
                for c in 0..n {
                    let v = a.at(k, c) + a.at(j, c);
                    a.set(k, c, v);
                }
                for r in 0..n {
                    let v = a.at(r, k) + a.at(r, j);
                    a.set(r, k, v);
                }
            } else {
                zero += 1;
                continue;
            }
        }
        let piv = a.at(k, k).clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if a.at(i, k).is_zero() {
                continue;
            }
            let f = a.at(i, k) / &piv;
            for c in 0..n {
                let v = a.at(i, c) - &f * a.at(k, c);
                a.set(i, c, v);
            }
            for r in 0..n {
                let v = a.at(r, i) - &f * a.at(r, k);
                a.set(r, i, v);
            }
        }
    }
    (pos, neg, zero)
}

pub fn is_symmetric<T: Clone + PartialEq>(m: &Mat<T>) -> bool {
    if m.rows() != m.cols() {
        return false;
    }
    for i in 0..m.rows() {
        for j in 0..i {
            if m.at(i, j) != m.at(j, i) {
                return false;
            }
        }
    }
    true
}

fn q_swap_cols(m: &mut QMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let x = m.at(i, a).clone();
        let y = m.at(i, b).clone();
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

pub fn imat_to_q(m: &IMat) -> QMat {
    m.map(crate::exact::rat_int)
}

pub fn ivec_to_q(v: &[Int]) -> Vec<Rat> {
    v.iter().map(crate::exact::rat_int).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn imat(rows: &[&[i64]]) -> IMat {
        IMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| int(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn hnf_canonical_example() {
        let m = imat(&[&[2, 4, 4], &[-6, 6, 12], &[10, 4, 16]]);
        let res = hnf(&m);
        assert_eq!(res.u.mul(&m), res.h);
        assert_eq!(res.rank, 3);
        // Pivots positive, entries above reduced.
        for (k, &c) in res.pivots.iter().enumerate() {
            assert!(res.h.at(k, c) > &int(0));
            for i in 0..k {
                assert!(res.h.at(i, c) >= &int(0) && res.h.at(i, c) < res.h.at(k, c));
            }
        }
        assert_eq!(bareiss_det(&res.u).abs(), int(1));
    }

    #[test]
    fn hnf_row_span_invariance() {
        let a = imat(&[&[1, 2, 3], &[4, 5, 6]]);
        let b = imat(&[&[5, 7, 9], &[4, 5, 6], &[9, 12, 15]]);
        assert_eq!(hnf_basis(&a), hnf_basis(&b));
    }

    #[test]
    fn snf_divisors() {
        let m = imat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let res = snf(&m);
        assert_eq!(res.u.mul(&m).mul(&res.v), res.d);
        let d: Vec<Int> = (0..3).map(|i| res.d.at(i, i).clone()).collect();
        assert!(!d[0].is_zero());
        assert!((&d[1] % &d[0]).is_zero());
        assert!((&d[2] % &d[1]).is_zero());
        assert_eq!(bareiss_det(&res.u).abs(), int(1));
        assert_eq!(bareiss_det(&res.v).abs(), int(1));
        let prod: Int = d.iter().product();
        assert_eq!(prod, bareiss_det(&m).abs());
    }

    #[test]
    fn det_matches_cofactor_small() {
        let m = imat(&[&[0, 1], &[1, 0]]);
        assert_eq!(bareiss_det(&m), int(-1));
        let m = imat(&[&[2, 1, 0], &[1, 2, 1], &[0, 1, 2]]);
        assert_eq!(bareiss_det(&m), int(4));
        let sing = imat(&[&[1, 2], &[2, 4]]);
        assert_eq!(bareiss_det(&sing), int(0));
    }

    #[test]
    fn left_kernel_annihilates() {
        let m = imat(&[&[1, 2], &[2, 4], &[0, 1]]);
        let k = left_kernel(&m);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&m).is_zero_matrix());
        // (2, -1, 0) spans the kernel.
        assert_eq!(k.row_vec(0), vec![int(2), int(-1), int(0)]);
    }

    #[test]
    fn rational_solve_and_kernel() {
        let basis = QMat::from_rows(vec![
            vec![rat(1, 1), rat(0, 1), rat(1, 2)],
            vec![rat(0, 1), rat(1, 3), rat(0, 1)],
        ]);
        let target = vec![rat(2, 1), rat(1, 1), rat(1, 1)];
        let c = solve_in_row_span(&target, &basis).unwrap();
        assert_eq!(c, vec![rat(2, 1), rat(3, 1)]);
        let missing = vec![rat(0, 1), rat(0, 1), rat(1, 1)];
        assert!(solve_in_row_span(&missing, &basis).is_none());

        let m = QMat::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]);
        let k = q_left_kernel(&m);
        assert_eq!(k.rows(), 1);
        assert!(k.mul(&m).is_zero_matrix());
    }

    #[test]
    fn signature_hyperbolic_and_definite() {
        // Hyperbolic plane: zero diagonal exercised.
        let u = imat_to_q(&imat(&[&[0, 1], &[1, 0]]));
        assert_eq!(signature(&u), (1, 1, 0));
        let diag = imat_to_q(&imat(&[&[2, 0, 0], &[0, -2, 0], &[0, 0, 0]]));
        assert_eq!(signature(&diag), (1, 1, 1));
        // Three copies of U plus <-2>^2: signature (3, 5).
        let mut rows = vec![vec![0i64; 8]; 8];
        for k in 0..3 {
            rows[2 * k][2 * k + 1] = 1;
            rows[2 * k + 1][2 * k] = 1;
        }
        rows[6][6] = -2;
        rows[7][7] = -2;
        let g = imat_to_q(&IMat::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(int).collect())
                .collect(),
        ));
        assert_eq!(signature(&g), (3, 5, 0));
    }

    #[test]
    fn q_inverse_roundtrip() {
        let m = QMat::from_rows(vec![vec![rat(2, 1), rat(1, 1)], vec![rat(1, 1), rat(1, 1)]]);
        let inv = q_inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), QMat::identity(2));
        let sing = QMat::from_rows(vec![vec![rat(1, 1), rat(2, 1)], vec![rat(2, 1), rat(4, 1)]]);
        assert!(q_inverse(&sing).is_none());
    }
}
