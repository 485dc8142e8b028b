//! Small dense real matrices: LU factorization, determinants, inverses, and
//! eigenvalues via Hessenberg reduction followed by Francis double-shift QR.
//!
//! Everything here targets the tiny systems this crate works with (n ≤ 24 or
//! so), stored row-major in a flat `Vec<f64>`.

use std::fmt;

use serde::Serialize;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Build from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// v^T A as a row vector.
    pub fn vec_mul(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| v[i] * self[(i, j)]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Principal submatrix with the given (strictly increasing) row/column indices.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Matrix {
        let k = idx.len();
        let mut out = Matrix::zeros(k, k);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    /// I - self (square only).
    pub fn eye_minus(&self) -> Matrix {
        assert!(self.is_square());
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = if i == j { 1.0 - self[(i, j)] } else { -self[(i, j)] };
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// LU determinant; 0.0 for a singular factorization.
    pub fn det(&self) -> f64 {
        match Lu::factor(self) {
            Some(lu) => lu.det(),
            None => 0.0,
        }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        Lu::factor(self).and_then(|lu| lu.inverse())
    }

    pub fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        Lu::factor(self).map(|lu| lu.solve(b))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{:.6}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// LU factorization with partial pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Returns `None` when a pivot collapses to exactly zero (structurally
    /// singular); near-singular systems still factor and `det()` reports the
    /// tiny determinant.
    pub fn factor(a: &Matrix) -> Option<Lu> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.data.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut max = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > max {
                    max = v;
                    p = i;
                }
            }
            if max == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Some(Lu { n, lu, piv, sign })
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for k in 0..self.n {
            d *= self.lu[k * self.n + k];
        }
        d
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    pub fn inverse(&self) -> Option<Matrix> {
        let n = self.n;
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let col = self.solve(&e);
            e[j] = 0.0;
            if col.iter().any(|v| !v.is_finite()) {
                return None;
            }
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Some(inv)
    }
}

/// Principal minor det(A[S,S]) for the index set `S` (no transpositions).
pub fn principal_minor(a: &Matrix, idx: &[usize]) -> f64 {
    a.principal_submatrix(idx).det()
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EigenError {
    #[error("QR iteration failed to converge within {0} sweeps")]
    NoConvergence(usize),
}

/// Eigenvalues of a general real square matrix as (re, im) pairs, in the
/// deflation order produced by the QR iteration.
///
/// Householder reduction to upper Hessenberg form followed by the Francis
/// implicit double-shift QR step, after the classic EISPACK/JAMA `orthes` +
/// `hqr` routines, with eigenvector accumulation stripped out and a hard
/// iteration cap instead of an endless loop.
pub fn eigenvalues(a: &Matrix) -> Result<Vec<(f64, f64)>, EigenError> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    let n = a.rows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![(a[(0, 0)], 0.0)]);
    }
    let mut h = a.data.clone();
    hessenberg(n, &mut h);
    hqr(n, &mut h)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(n: usize, h: &mut [f64]) {
    if n < 3 {
        return;
    }
    let high = n - 1;
    let mut ort = vec![0.0; n];
    for m in 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += h[i * n + m - 1].abs();
        }
        if scale == 0.0 {
            continue;
        }
        let mut hsum = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i * n + m - 1] / scale;
            hsum += ort[i] * ort[i];
        }
        let mut g = hsum.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hsum -= ort[m] * g;
        ort[m] -= g;

        // H <- (I - u u'/h) H (I - u u'/h)
        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * h[i * n + j];
            }
            f /= hsum;
            for i in m..=high {
                h[i * n + j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * h[i * n + j];
            }
            f /= hsum;
            for j in m..=high {
                h[i * n + j] -= f * ort[j];
            }
        }
        h[m * n + m - 1] = scale * g;
    }
    // Zero the area below the subdiagonal left dirty by the reduction.
    for i in 2..n {
        for j in 0..(i - 1) {
            h[i * n + j] = 0.0;
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn hqr(nn: usize, h: &mut [f64]) -> Result<Vec<(f64, f64)>, EigenError> {
    let cap = 60 * nn.max(4);
    let mut re = vec![0.0; nn];
    let mut im = vec![0.0; nn];
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut x, mut y, mut w);
    p = 0.0;
    q = 0.0;
    r = 0.0;

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += h[i * nn + j].abs();
        }
    }
    if norm == 0.0 {
        return Ok(vec![(0.0, 0.0); nn]);
    }

    let mut n = nn as isize - 1;
    let mut iter = 0usize;
    let mut total_iter = 0usize;
    while n >= 0 {
        let nu = n as usize;
        // Look for a single small subdiagonal element.
        let mut l = nu;
        while l > 0 {
            s = h[(l - 1) * nn + (l - 1)].abs() + h[l * nn + l].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[l * nn + (l - 1)].abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == nu {
            // One root found.
            re[nu] = h[nu * nn + nu] + exshift;
            im[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == nu - 1 {
            // Two roots found.
            w = h[nu * nn + (nu - 1)] * h[(nu - 1) * nn + nu];
            p = (h[(nu - 1) * nn + (nu - 1)] - h[nu * nn + nu]) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            x = h[nu * nn + nu] + exshift;
            if q >= 0.0 {
                // Real pair.
                z = if p >= 0.0 { p + z } else { p - z };
                re[nu - 1] = x + z;
                re[nu] = if z != 0.0 { x - w / z } else { re[nu - 1] };
                im[nu - 1] = 0.0;
                im[nu] = 0.0;
            } else {
                // Complex pair.
                re[nu - 1] = x + p;
                re[nu] = x + p;
                im[nu - 1] = z;
                im[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form shift.
            x = h[nu * nn + nu];
            y = h[(nu - 1) * nn + (nu - 1)];
            w = h[nu * nn + (nu - 1)] * h[(nu - 1) * nn + nu];

            // Wilkinson's original ad hoc shift.
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i * nn + i] -= x;
                }
                s = h[nu * nn + (nu - 1)].abs() + h[(nu - 1) * nn + (nu - 2)].abs();
                y = 0.75 * s;
                x = y;
                w = -0.4375 * s * s;
            }
            // MATLAB's ad hoc shift.
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i * nn + i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;
            if total_iter > cap {
                return Err(EigenError::NoConvergence(cap));
            }

            // Look for two consecutive small subdiagonal elements.
            let mut m = nu - 2;
            loop {
                z = h[m * nn + m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / h[(m + 1) * nn + m] + h[m * nn + (m + 1)];
                q = h[(m + 1) * nn + (m + 1)] - z - r - s;
                r = h[(m + 2) * nn + (m + 1)];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if h[m * nn + (m - 1)].abs() * (q.abs() + r.abs())
                    < eps
                        * (p.abs()
                            * (h[(m - 1) * nn + (m - 1)].abs()
                                + z.abs()
                                + h[(m + 1) * nn + (m + 1)].abs()))
                {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nu {
                h[i * nn + (i - 2)] = 0.0;
                if i > m + 2 {
                    h[i * nn + (i - 3)] = 0.0;
                }
            }

            // Double QR step on rows l..=n, columns m..=n.
            for k in m..nu {
                let notlast = k != nu - 1;
                if k != m {
                    p = h[k * nn + (k - 1)];
                    q = h[(k + 1) * nn + (k - 1)];
                    r = if notlast { h[(k + 2) * nn + (k - 1)] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s == 0.0 {
                    continue;
                }
                if k != m {
                    h[k * nn + (k - 1)] = -s * x;
                } else if l != m {
                    h[k * nn + (k - 1)] = -h[k * nn + (k - 1)];
                }
                p += s;
                x = p / s;
                y = q / s;
                z = r / s;
                q /= p;
                r /= p;

                for j in k..nn {
                    p = h[k * nn + j] + q * h[(k + 1) * nn + j];
                    if notlast {
                        p += r * h[(k + 2) * nn + j];
                        h[(k + 2) * nn + j] -= p * z;
                    }
                    h[k * nn + j] -= p * x;
                    h[(k + 1) * nn + j] -= p * y;
                }
                let upper = nu.min(k + 3);
                for i in 0..=upper {
                    p = x * h[i * nn + k] + y * h[i * nn + (k + 1)];
                    if notlast {
                        p += z * h[i * nn + (k + 2)];
                        h[i * nn + (k + 2)] -= p * r;
                    }
                    h[i * nn + k] -= p;
                    h[i * nn + (k + 1)] -= p * q;
                }
            }
        }
    }
    Ok(re.into_iter().zip(im).collect())
}

/// Largest eigenvalue modulus.
pub fn spectral_radius_of(a: &Matrix) -> Result<f64, EigenError> {
    let eig = eigenvalues(a)?;
    Ok(eig
        .iter()
        .map(|&(re, im)| re.hypot(im))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> Matrix {
        Matrix::from_rows(&[vec![a, b], vec![c, d]])
    }

    #[test]
    fn lu_det_and_solve() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0, 1.0], vec![4.0, -6.0, 0.0], vec![-2.0, 7.0, 2.0]]);
        let lu = Lu::factor(&a).unwrap();
        assert!((lu.det() - (-16.0)).abs() < 1e-12);
        let x = lu.solve(&[5.0, -2.0, 9.0]);
        // A x = b check:
        let b = a.mul_vec(&x);
        for (bi, want) in b.iter().zip([5.0, -2.0, 9.0]) {
            assert!((bi - want).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_reports_zero_det() {
        let a = m2(1.0, 2.0, 2.0, 4.0);
        assert_eq!(a.det(), 0.0);
        assert!(a.inverse().is_none() || a.inverse().unwrap().max_abs().is_infinite());
    }

    #[test]
    fn inverse_round_trip() {
        let a = Matrix::from_rows(&[vec![1.0, -2.0], vec![-0.25, 1.0]]);
        let inv = a.inverse().unwrap();
        let prod = a.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - want).abs() < 1e-12);
            }
        }
        // (I-J)^{-1} for a=2, b=0.25 is [[2,4],[0.5,2]].
        assert!((inv[(0, 0)] - 2.0).abs() < 1e-12);
        assert!((inv[(0, 1)] - 4.0).abs() < 1e-12);
        assert!((inv[(1, 0)] - 0.5).abs() < 1e-12);
        assert!((inv[(1, 1)] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_zero_and_identity() {
        let z = Matrix::zeros(3, 3);
        for (re, im) in eigenvalues(&z).unwrap() {
            assert_eq!((re, im), (0.0, 0.0));
        }
        let id = Matrix::identity(4);
        for (re, im) in eigenvalues(&id).unwrap() {
            assert!((re - 1.0).abs() < 1e-12 && im == 0.0);
        }
    }

    #[test]
    fn complex_pair_modulus() {
        // [[0, 2], [-1, 0]] has eigenvalues ±i√2.
        let a = m2(0.0, 2.0, -1.0, 0.0);
        let rho = spectral_radius_of(&a).unwrap();
        assert!((rho - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn known_3x3_spectrum() {
        // Companion matrix of λ³ - 6λ² + 11λ - 6 = (λ-1)(λ-2)(λ-3).
        let a = Matrix::from_rows(&[
            vec![6.0, -11.0, 6.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let mut eig: Vec<f64> = eigenvalues(&a)
            .unwrap()
            .into_iter()
            .map(|(re, im)| {
                assert!(im.abs() < 1e-9);
                re
            })
            .collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in eig.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn principal_minors_by_subset() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 1.0]]);
        assert!((principal_minor(&a, &[0]) - 1.0).abs() < 1e-15);
        assert!((principal_minor(&a, &[1]) - 1.0).abs() < 1e-15);
        assert!((principal_minor(&a, &[0, 1]) + 1.0).abs() < 1e-15);
    }
}
