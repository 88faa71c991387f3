//! Dense matrices over `Z_q` and canonical row reduction over the chain ring `Z_{p^e}`.
//!
//! Over a field, reduced row echelon form is the canonical representative of a
//! row space. Over `Z_{p^e}` that is no longer enough: the Howell form adds the
//! saturation rows `p^{e-k} * pivot_row` so that every row-space element with
//! leading zeros is reachable from the rows below it. This gives canonical,
//! comparable row spaces, membership tests, kernels and intersections.

use crate::error::{PirError, Result};
use crate::zmod::{mod_inv, mul_mod, sub_mod, valuation, PrimePower};

/// Row-major dense matrix with `u64` entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(PirError::LengthMismatch { expected: rows * cols, got: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equal-length rows. An empty list gives a `0 x cols` matrix.
    pub fn from_rows(rows: &[Vec<u64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(PirError::LengthMismatch { expected: cols, got: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u64> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.iter_rows().map(<[u64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Entrywise reduction mod `q`.
    pub fn reduce(&self, q: u64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x % q).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * other mod q`. Entries are assumed reduced below `2^32`.
    pub fn mul_mod(&self, other: &Matrix, q: u64) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(PirError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        let mut acc = vec![0u128; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(other.row(k)) {
                    *slot += a as u128 * b as u128;
                }
            }
            for (dst, &a) in out.row_mut(i).iter_mut().zip(&acc) {
                *dst = (a % q as u128) as u64;
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, mod `q`.
    pub fn vec_mul(&self, v: &[u64], q: u64) -> Result<Vec<u64>> {
        let row = Matrix::from_vec(1, v.len(), v.to_vec())?;
        Ok(row.mul_mod(self, q)?.into_data())
    }

    /// `v * self^T mod q`, i.e. the inner product of `v` with every row.
    pub fn vec_mul_transposed(&self, v: &[u64], q: u64) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        self.iter_rows()
            .map(|row| {
                let s: u128 = row.iter().zip(v).map(|(&a, &b)| a as u128 * b as u128).sum();
                (s % q as u128) as u64
            })
            .collect()
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(PirError::DimensionMismatch("vstack column count".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(PirError::DimensionMismatch("hstack row count".into()));
        }
        let mut out = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            out.row_mut(i)[..self.cols].copy_from_slice(self.row(i));
            out.row_mut(i)[self.cols..].copy_from_slice(other.row(i));
        }
        Ok(out)
    }

    /// The rows whose indices are not in `skip`.
    pub fn without_rows(&self, skip: std::ops::Range<usize>) -> Matrix {
        let rows: Vec<Vec<u64>> = (0..self.rows)
            .filter(|i| !skip.contains(i))
            .map(|i| self.row(i).to_vec())
            .collect();
        Matrix::from_rows(&rows, self.cols).expect("rows share width")
    }

    pub fn select_cols(&self, range: std::ops::Range<usize>) -> Matrix {
        let width = range.len();
        let mut out = Matrix::zeros(self.rows, width);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[range.clone()]);
        }
        out
    }
}

fn row_is_zero(r: &[u64]) -> bool {
    r.iter().all(|&x| x == 0)
}

/// `dst -= f * src (mod q)` on equal-length rows.
fn row_axpy(dst: &mut [u64], f: u64, src: &[u64], q: u64) {
    if f == 0 {
        return;
    }
    for (d, &s) in dst.iter_mut().zip(src) {
        if s != 0 {
            *d = sub_mod(*d, mul_mod(f, s, q), q);
        }
    }
}

fn row_scale(r: &mut [u64], f: u64, q: u64) {
    for x in r.iter_mut() {
        *x = mul_mod(*x, f, q);
    }
}

/// Howell form of a row space over `Z_{p^e}`.
///
/// Rows are sorted by pivot column; each pivot is `p^k` and entries above a
/// pivot lie in `[0, p^k)`. Two matrices span the same module iff their Howell
/// forms are equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellForm {
    ring: PrimePower,
    cols: usize,
    rows: Vec<Vec<u64>>,
    /// `(column, valuation)` of each row's pivot.
    pivots: Vec<(usize, u32)>,
}

impl HowellForm {
    pub fn new(mat: &Matrix, ring: PrimePower) -> Self {
        Self::from_rows(mat.iter_rows().map(<[u64]>::to_vec), mat.cols(), ring)
    }

    pub fn from_rows(rows: impl IntoIterator<Item = Vec<u64>>, cols: usize, ring: PrimePower) -> Self {
        let q = ring.q;
        let mut pool: Vec<Vec<u64>> = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x % q).collect::<Vec<_>>())
            .filter(|r| !row_is_zero(r))
            .collect();
        let mut done: Vec<Vec<u64>> = Vec::new();
        let mut pivots = Vec::new();

        for c in 0..cols {
            let best = pool
                .iter()
                .enumerate()
                .filter(|(_, r)| r[c] != 0)
                .min_by_key(|(_, r)| valuation(r[c], ring.p, ring.e))
                .map(|(i, _)| i);
            let Some(best) = best else { continue };
            let mut piv = pool.swap_remove(best);
            let k = valuation(piv[c], ring.p, ring.e);
            let pk = ring.pow(k);
            let unit = piv[c] / pk;
            let inv = mod_inv(unit, q).expect("quotient by p^valuation is a unit");
            row_scale(&mut piv, inv, q);
            debug_assert_eq!(piv[c], pk);
            for r in pool.iter_mut() {
                if r[c] != 0 {
                    let f = r[c] / pk;
                    row_axpy(r, f, &piv, q);
                }
            }
            pool.retain(|r| !row_is_zero(r));
            if k > 0 {
                let mut extra = piv.clone();
                row_scale(&mut extra, ring.pow(ring.e - k), q);
                if !row_is_zero(&extra) {
                    pool.push(extra);
                }
            }
            done.push(piv);
            pivots.push((c, k));
        }
        debug_assert!(pool.iter().all(|r| row_is_zero(r)));

        for j in 0..done.len() {
            let (c, k) = pivots[j];
            let pk = ring.pow(k);
            let (above, rest) = done.split_at_mut(j);
            let pivot_row = &rest[0];
            for r in above.iter_mut() {
                let f = r[c] / pk;
                row_axpy(r, f, pivot_row, q);
            }
        }
        HowellForm { ring, cols, rows: done, pivots }
    }

    pub fn ring(&self) -> PrimePower {
        self.ring
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[(usize, u32)] {
        &self.pivots
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.rows, self.cols).expect("rows share width")
    }

    /// `log_p` of the number of elements in the row space.
    pub fn log_size(&self) -> u64 {
        self.pivots.iter().map(|&(_, k)| (self.ring.e - k) as u64).sum()
    }

    /// Reduces `v` against the form; returns the remainder (zero iff `v` is a member).
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let q = self.ring.q;
        let mut w: Vec<u64> = v.iter().map(|&x| x % q).collect();
        for (row, &(c, k)) in self.rows.iter().zip(&self.pivots) {
            let pk = self.ring.pow(k);
            if w[c] % pk != 0 {
                return w;
            }
            let f = w[c] / pk;
            row_axpy(&mut w, f, row, q);
        }
        w
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        v.len() == self.cols && row_is_zero(&self.reduce(v))
    }

    /// True iff every row of `other` lies in this row space.
    pub fn contains_all(&self, other: &HowellForm) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }
}

/// Generators of `{x : x * mat = 0}` over `Z_{p^e}`, as rows of a Howell form.
pub fn left_kernel(mat: &Matrix, ring: PrimePower) -> HowellForm {
    let (r, c) = (mat.rows(), mat.cols());
    let aug = mat.reduce(ring.q).hstack(&Matrix::identity(r)).expect("same row count");
    let h = HowellForm::new(&aug, ring);
    let gens = h
        .rows()
        .iter()
        .filter(|row| row_is_zero(&row[..c]))
        .map(|row| row[c..].to_vec());
    HowellForm::from_rows(gens, r, ring)
}

/// Generators of `{v : mat * v^T = 0}`, the dual of the row space of `mat`.
pub fn dual_rowspace(mat: &Matrix, ring: PrimePower) -> HowellForm {
    left_kernel(&mat.transpose(), ring)
}

/// Intersection of the row spaces of `a` and `b` (same width).
pub fn intersect_rowspaces(a: &Matrix, b: &Matrix, ring: PrimePower) -> Result<HowellForm> {
    if a.cols() != b.cols() {
        return Err(PirError::DimensionMismatch("intersection widths differ".into()));
    }
    let n = a.cols();
    let top = a.hstack(a)?;
    let bottom = b.hstack(&Matrix::zeros(b.rows(), n))?;
    let h = HowellForm::new(&top.vstack(&bottom)?, ring);
    let gens = h
        .rows()
        .iter()
        .filter(|row| row_is_zero(&row[..n]))
        .map(|row| row[n..].to_vec());
    Ok(HowellForm::from_rows(gens, n, ring))
}

/// Module type of the row space: `ks[j]` counts summands `Z_{p^{e-j}}`.
///
/// Computed by diagonalizing over the local ring (Smith normal form).
pub fn module_type_of(mat: &Matrix, ring: PrimePower) -> Vec<usize> {
    let q = ring.q;
    let mut a: Vec<Vec<u64>> = mat.reduce(q).to_rows();
    let rows = a.len();
    let cols = mat.cols();
    let mut ks = vec![0usize; ring.e as usize];
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = valuation(x, ring.p, ring.e);
                    if best.map_or(true, |b| v < b.2) {
                        best = Some((i, j, v));
                        if v == 0 {
                            break;
                        }
                    }
                }
            }
            if matches!(best, Some((_, _, 0))) {
                break;
            }
        }
        let Some((bi, bj, k)) = best else { break };
        a.swap(t, bi);
        for row in a.iter_mut() {
            row.swap(t, bj);
        }
        let pk = ring.pow(k);
        let inv = mod_inv(a[t][t] / pk, q).expect("unit part");
        row_scale(&mut a[t], inv, q);
        let pivot_row = a[t].clone();
        for row in a.iter_mut().skip(t + 1) {
            if row[t] != 0 {
                let f = row[t] / pk;
                row_axpy(row, f, &pivot_row, q);
            }
        }
        // column operations clear the rest of the pivot row
        for j in t + 1..cols {
            let x = a[t][j];
            if x != 0 {
                let f = x / pk;
                for row in a.iter_mut() {
                    let s = row[t];
                    if s != 0 {
                        row[j] = sub_mod(row[j], mul_mod(f, s, q), q);
                    }
                }
            }
        }
        ks[k as usize] += 1;
        t += 1;
    }
    ks
}
