//! Dense factorization kernels: column-pivoted Householder QR, row-pivoted
//! Gaussian elimination on rectangular matrices, square LU solves and the
//! infinity-norm condition number.
//!
//! Pivot searches use a strict greater-than comparison over the candidates in
//! their original order, so among exact ties the lowest index wins. Candidate
//! rows/columns are never physically swapped.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Relative threshold below which a pivot is considered numerically zero.
pub const RANK_TOL: f64 = 1e-12;

/// Dense real matrix stored in row-major order.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Wraps row-major data, rejecting empty shapes and non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix shape {rows}x{cols} is empty"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * ncols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{ncols} columns"),
                    got: format!("{} columns", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(rows.len(), ncols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.data[r * self.cols + c])
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (c, &v) in self.row(r).iter().enumerate() {
                t.data[c * self.rows + r] = v;
            }
        }
        t
    }

    /// New matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// New matrix made of the leading `cols` columns.
    pub fn leading_columns(&self, cols: usize) -> Self {
        assert!(
            cols <= self.cols,
            "requested {cols} of {} columns",
            self.cols
        );
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(&self.row(r)[..cols]);
        }
        Self {
            rows: self.rows,
            cols,
            data,
        }
    }

    /// Matrix product `self * rhs`.
    ///
    /// # Panics
    /// If the inner dimensions differ.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for (k, &a) in self.row(r).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, rhs.row(k), out_row);
                }
            }
        }
        out
    }

    /// `self^T * rhs` without forming the transpose.
    pub fn transpose_matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.rows, rhs.rows, "transpose_matmul row mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for r in 0..self.rows {
            let rhs_row = rhs.row(r);
            for (i, &a) in self.row(r).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, rhs_row, &mut out.data[i * rhs.cols..(i + 1) * rhs.cols]);
                }
            }
        }
        out
    }

    /// `self * x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec length mismatch");
        (0..self.rows).map(|r| dot(self.row(r), x)).collect()
    }

    /// `self^T * x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len(), "tr_mul_vec length mismatch");
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            axpy(xr, self.row(r), &mut out);
        }
        out
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Largest entry of `|self - rhs|`.
    pub fn max_abs_diff(&self, rhs: &DenseMatrix) -> f64 {
        assert_eq!(self.shape(), rhs.shape());
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(8) {
            writeln!(f, "  {:?}", &self.row(r)[..self.cols.min(8)])?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Outcome of a pivoted factorization.
///
/// `order` is always a full permutation of the pivoted dimension: the first
/// `selected` entries are the pivots in the order they were chosen, the rest
/// are the unpivoted indices in their original order.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotRecord {
    pub order: Vec<usize>,
    pub selected: usize,
    /// Magnitude of each chosen pivot (residual column norm for QR,
    /// absolute pivot entry for LU).
    pub magnitudes: Vec<f64>,
}

impl PivotRecord {
    /// The chosen pivots, in selection order.
    pub fn pivots(&self) -> &[usize] {
        &self.order[..self.selected]
    }

    /// Checks that `order` is a permutation of `0..order.len()`.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.order.len()];
        self.order
            .iter()
            .all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
    }
}

// Four independent partial sums let the compiler vectorize the reduction
// while keeping the summation order fixed.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0_f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        acc[0] += x[0] * y[0];
        acc[1] += x[1] * y[1];
        acc[2] += x[2] * y[2];
        acc[3] += x[3] * y[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Column-pivoted Householder QR of an `N x M` matrix (`N <= M`), keeping
/// only the column selection order.
///
/// At every step the unselected column with the largest residual Euclidean
/// norm is chosen. `steps` limits the number of pivots (default `N`).
pub fn qr_col_pivot(a: &DenseMatrix, steps: Option<usize>) -> Result<PivotRecord> {
    // column-contiguous copy
    let t = a.transpose();
    pivoted_qr_columns(t.data, a.rows, a.cols, steps)
}

/// [`qr_col_pivot`] applied to `v^T`, i.e. pivoting over the rows of `v`.
///
/// This is the form used for Fekete-point extraction, where the columns of
/// the transposed Vandermonde matrix are mesh points; the row-major storage
/// of `v` already holds those columns contiguously.
pub fn qr_col_pivot_transposed(v: &DenseMatrix, steps: Option<usize>) -> Result<PivotRecord> {
    pivoted_qr_columns(v.data.clone(), v.cols, v.rows, steps)
}

/// Kernel: `cols` holds `count` columns of length `len`, each contiguous.
fn pivoted_qr_columns(
    mut cols: Vec<f64>,
    len: usize,
    count: usize,
    steps: Option<usize>,
) -> Result<PivotRecord> {
    if len == 0 || count == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if len > count {
        return Err(Error::InvalidArgument(format!(
            "column-pivoted QR needs rows <= columns, got {len}x{count}"
        )));
    }
    let steps = steps.unwrap_or(len);
    if steps > len {
        return Err(Error::InvalidArgument(format!(
            "{steps} pivot steps requested for {len} rows"
        )));
    }

    let column = |c: usize| c * len..(c + 1) * len;
    let mut norms2: Vec<f64> = (0..count)
        .map(|c| {
            let col = &cols[column(c)];
            dot(col, col)
        })
        .collect();
    let mut reference2 = norms2.clone();
    let threshold = RANK_TOL * norms2.iter().fold(0.0_f64, |m, &v| m.max(v)).sqrt();

    let mut remaining: Vec<usize> = (0..count).collect();
    let mut order = Vec::with_capacity(count);
    let mut magnitudes = Vec::with_capacity(steps);
    let mut v = vec![0.0; len];

    for k in 0..steps {
        let mut best_pos = 0;
        let mut best = f64::NEG_INFINITY;
        for (pos, &c) in remaining.iter().enumerate() {
            if norms2[c] > best {
                best = norms2[c];
                best_pos = pos;
            }
        }
        let p = remaining.remove(best_pos);

        let pivot_col = &cols[p * len + k..(p + 1) * len];
        let sigma = dot(pivot_col, pivot_col).sqrt();
        if sigma.is_nan() || sigma < threshold || sigma == 0.0 {
            return Err(Error::RankDeficient {
                step: k,
                norm: sigma,
                threshold,
            });
        }
        order.push(p);
        magnitudes.push(sigma);

        // Householder vector v = x - alpha e1, alpha = -sign(x0) |x|
        let tail = len - k;
        v[..tail].copy_from_slice(pivot_col);
        let alpha = if v[0] >= 0.0 { -sigma } else { sigma };
        v[0] -= alpha;
        let beta = 2.0 / dot(&v[..tail], &v[..tail]);
        let v = &v[..tail];

        for &c in &remaining {
            let col = &mut cols[c * len + k..(c + 1) * len];
            let s = beta * dot(v, col);
            axpy(-s, v, col);
            let r = col[0];
            norms2[c] -= r * r;
            if norms2[c] <= 1e-4 * reference2[c] {
                norms2[c] = dot(&col[1..], &col[1..]);
                reference2[c] = norms2[c];
            }
        }
    }

    order.extend(remaining);
    Ok(PivotRecord {
        order,
        selected: steps,
        magnitudes,
    })
}

/// Upper-triangular factor `R` (`N x N`) of an unpivoted Householder QR of an
/// `M x N` matrix with `M >= N`.
pub fn qr_r_factor(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "QR needs rows >= columns, got {m}x{n}"
        )));
    }
    let mut cols = a.transpose().data;
    let column = |c: usize| c * m..(c + 1) * m;
    let threshold = RANK_TOL
        * (0..n)
            .map(|c| {
                let col = &cols[column(c)];
                dot(col, col).sqrt()
            })
            .fold(0.0_f64, f64::max);

    let mut r = DenseMatrix::zeros(n, n);
    let mut v = vec![0.0; m];
    for k in 0..n {
        let x = &cols[k * m + k..(k + 1) * m];
        let sigma = dot(x, x).sqrt();
        if sigma.is_nan() || sigma < threshold || sigma == 0.0 {
            return Err(Error::RankDeficient {
                step: k,
                norm: sigma,
                threshold,
            });
        }
        let tail = m - k;
        v[..tail].copy_from_slice(x);
        let alpha = if v[0] >= 0.0 { -sigma } else { sigma };
        v[0] -= alpha;
        let beta = 2.0 / dot(&v[..tail], &v[..tail]);
        let v = &v[..tail];
        r[(k, k)] = alpha;
        for c in k + 1..n {
            let col = &mut cols[c * m + k..(c + 1) * m];
            let s = beta * dot(v, col);
            axpy(-s, v, col);
            r[(k, c)] = col[0];
        }
    }
    Ok(r)
}

/// Overwrites `x` with `x * r^{-1}` for upper-triangular `r`.
pub fn solve_upper_right_in_place(x: &mut DenseMatrix, r: &DenseMatrix) -> Result<()> {
    let n = r.rows;
    if !r.is_square() || x.cols != n {
        return Err(Error::DimensionMismatch {
            expected: format!("X with {n} columns and square R"),
            got: format!("X {}x{}, R {}x{}", x.rows, x.cols, r.rows, r.cols),
        });
    }
    for i in 0..n {
        if r[(i, i)] == 0.0 {
            return Err(Error::Singular {
                step: i,
                pivot: 0.0,
                threshold: 0.0,
            });
        }
    }
    for row in 0..x.rows {
        let xr = x.row_mut(row);
        for i in 0..n {
            let yi = xr[i] / r[(i, i)];
            xr[i] = yi;
            if yi != 0.0 {
                axpy(-yi, &r.row(i)[i + 1..], &mut xr[i + 1..]);
            }
        }
    }
    Ok(())
}

/// Row-pivoted Gaussian elimination on an `M x N` matrix (`M >= N`).
///
/// At column `k` the unpivoted row with the largest absolute entry becomes
/// the pivot. The first `N` entries of the returned order are the pivot rows.
pub fn lu_row_pivot(a: &DenseMatrix) -> Result<PivotRecord> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "row-pivoted LU needs rows >= columns, got {m}x{n}"
        )));
    }
    let mut work = a.data.clone();
    let threshold = RANK_TOL * a.max_abs();
    let mut remaining: Vec<usize> = (0..m).collect();
    let mut order = Vec::with_capacity(m);
    let mut magnitudes = Vec::with_capacity(n);
    let mut pivot_row = vec![0.0; n];

    for k in 0..n {
        let mut best_pos = 0;
        let mut best = f64::NEG_INFINITY;
        for (pos, &r) in remaining.iter().enumerate() {
            let v = work[r * n + k].abs();
            if v > best {
                best = v;
                best_pos = pos;
            }
        }
        if best.is_nan() || best < threshold || best == 0.0 {
            return Err(Error::Singular {
                step: k,
                pivot: best.max(0.0),
                threshold,
            });
        }
        let p = remaining.remove(best_pos);
        order.push(p);
        magnitudes.push(best);

        let tail = n - k;
        pivot_row[..tail].copy_from_slice(&work[p * n + k..(p + 1) * n]);
        let piv = pivot_row[0];
        let upper = &pivot_row[1..tail];
        for &r in &remaining {
            let row = &mut work[r * n + k..(r + 1) * n];
            let l = row[0] / piv;
            row[0] = 0.0;
            if l != 0.0 {
                axpy(-l, upper, &mut row[1..]);
            }
        }
    }

    order.extend(remaining);
    Ok(PivotRecord {
        order,
        selected: n,
        magnitudes,
    })
}

/// `P A = L U` factorization of a square matrix with partial pivoting.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: "square matrix".into(),
                got: format!("{}x{}", a.rows, a.cols),
            });
        }
        let n = a.rows;
        let threshold = RANK_TOL * a.max_abs();
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = f64::NEG_INFINITY;
            for r in k..n {
                let v = lu[r * n + k].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best.is_nan() || best < threshold || best == 0.0 {
                return Err(Error::Singular {
                    step: k,
                    pivot: best.max(0.0),
                    threshold,
                });
            }
            if p != k {
                for c in 0..n {
                    lu.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let (head, rest) = lu.split_at_mut((k + 1) * n);
            let pivot_row = &head[k * n + k..];
            let piv = pivot_row[0];
            for r in 0..n - k - 1 {
                let row = &mut rest[r * n + k..(r + 1) * n];
                let l = row[0] / piv;
                row[0] = l;
                if l != 0.0 {
                    axpy(-l, &pivot_row[1..], &mut row[1..]);
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu[i * n..i * n + i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu[i * n + i + 1..(i + 1) * n], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `A^T x = b` in place.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        // A^T = U^T L^T P, so solve U^T y = b, L^T w = y, x = P^T w.
        let y = b;
        for i in 0..n {
            let yi = y[i] / self.lu[i * n + i];
            y[i] = yi;
            if yi != 0.0 {
                let (_, tail) = y.split_at_mut(i + 1);
                axpy(-yi, &self.lu[i * n + i + 1..(i + 1) * n], tail);
            }
        }
        for i in (0..n).rev() {
            let wi = y[i];
            if wi != 0.0 {
                let (head, _) = y.split_at_mut(i);
                axpy(-wi, &self.lu[i * n..i * n + i], head);
            }
        }
        let w = y.to_vec();
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = w[i];
        }
    }

    /// Solves `A X = B` for a matrix right-hand side.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        let n = self.n;
        if b.rows != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n} rows"),
                got: format!("{} rows", b.rows),
            });
        }
        let k = b.cols;
        let mut x = b.select_rows(&self.perm);
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                if l != 0.0 {
                    let (head, tail) = x.data.split_at_mut(i * k);
                    axpy(-l, &head[j * k..(j + 1) * k], &mut tail[..k]);
                }
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                if u != 0.0 {
                    let (head, tail) = x.data.split_at_mut(j * k);
                    axpy(-u, &tail[..k], &mut head[i * k..(i + 1) * k]);
                }
            }
            let d = self.lu[i * n + i];
            for v in &mut x.data[i * k..(i + 1) * k] {
                *v /= d;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.n))
            .expect("identity has matching shape")
    }
}

/// Solves `A X = B` with a row-pivoted LU factorization of `A`.
pub fn solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    LuFactors::new(a)?.solve_matrix(b)
}

/// `||A||_inf * ||A^{-1}||_inf`, with the inverse formed explicitly.
pub fn cond_inf(a: &DenseMatrix) -> Result<f64> {
    let inv = LuFactors::new(a)?.inverse();
    Ok(a.norm_inf() * inv.norm_inf())
}
