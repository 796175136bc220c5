//! Small dense linear algebra on row-major `Vec<f64>` data.
//!
//! Everything here works on matrices of at most a few dozen rows, so the
//! routines favour clarity over blocking or SIMD.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Determinant of an `n x n` row-major matrix by LU with partial pivoting.
pub fn determinant(mut a: Vec<f64>, n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))
            .unwrap_or(col);
        let p = a[pivot * n + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            det = -det;
        }
        det *= p;
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Solves `a x = b` for square `a`; `None` when singular.
pub fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        let p = a[pivot * n + col];
        if p.abs() < f64::MIN_POSITIVE {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(pivot * n + k, col * n + k);
            }
            b.swap(pivot, col);
        }
        for row in col + 1..n {
            let f = a[row * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[row * n + k] -= f * a[col * n + k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row * n + k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row * n + row];
    }
    Some(x)
}

/// Vector orthogonal to the `rows.len() = n - 1` given vectors of length `n`,
/// via signed cofactors (generalized cross product). Not normalized.
pub fn cofactor_normal(rows: &[Vec<f64>], n: usize) -> Vec<f64> {
    debug_assert_eq!(rows.len() + 1, n);
    let m = n - 1;
    let mut out = vec![0.0; n];
    let mut minor = vec![0.0; m * m];
    for (j, o) in out.iter_mut().enumerate() {
        for (r, row) in rows.iter().enumerate() {
            let mut c = 0;
            for (k, &v) in row.iter().enumerate() {
                if k != j {
                    minor[r * m + c] = v;
                    c += 1;
                }
            }
        }
        let sign = if (j + m) % 2 == 0 { 1.0 } else { -1.0 };
        *o = sign * determinant(minor.clone(), m);
    }
    out
}

/// Gram determinant of the given vectors.
pub fn gram_determinant(vectors: &[Vec<f64>]) -> f64 {
    let k = vectors.len();
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        for j in i..k {
            let v = dot(&vectors[i], &vectors[j]);
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    determinant(g, k)
}

/// `k`-volume of the parallelotope spanned by `k` vectors: the product of
/// the residual norms under two-pass modified Gram-Schmidt. The relative
/// error grows like `1/sin` of the smallest angle, not its square as with
/// the Gram determinant.
pub fn parallelotope_volume(vectors: &[Vec<f64>]) -> f64 {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    let mut volume = 1.0;
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let r = norm(&w);
        if r == 0.0 {
            return 0.0;
        }
        volume *= r;
        basis.push(w.into_iter().map(|x| x / r).collect());
    }
    volume
}

/// Orthonormal basis of the span of `vectors` (modified Gram-Schmidt, two
/// passes). Vectors whose residual falls below `rel_tol` times their original
/// norm are dropped, so the output length is the numerical rank.
pub fn orthonormalize(vectors: &[Vec<f64>], rel_tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let original = norm(v);
        if original == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let n = norm(&w);
        if n > rel_tol * original {
            w.iter_mut().for_each(|x| *x /= n);
            basis.push(w);
        }
    }
    basis
}

/// Householder QR with column pivoting of an `m x n` column-major matrix
/// given as a list of columns. Returns the numerical rank: the number of
/// diagonal entries of R above `rel_tol * |R_00|`.
pub fn pivoted_qr_rank(columns: &[Vec<f64>], rel_tol: f64) -> usize {
    let n = columns.len();
    if n == 0 {
        return 0;
    }
    let m = columns[0].len();
    let mut a: Vec<Vec<f64>> = columns.to_vec();
    let mut lead = 0.0;
    let steps = m.min(n);
    for k in 0..steps {
        let (best, best_norm) = (k..n)
            .map(|j| (j, a[j][k..].iter().map(|x| x * x).sum::<f64>()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        a.swap(k, best);
        let alpha = best_norm.sqrt();
        if k == 0 {
            lead = alpha;
        }
        if lead == 0.0 || alpha <= rel_tol * lead {
            return k;
        }
        let mut v: Vec<f64> = a[k][k..].to_vec();
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for col in a.iter_mut().skip(k) {
            let s: f64 = col[k..].iter().zip(&v).map(|(x, y)| x * y).sum();
            let f = 2.0 * s / vnorm2;
            for (x, y) in col[k..].iter_mut().zip(&v) {
                *x -= f * y;
            }
        }
    }
    steps
}

/// Least-squares solution of `min || A x - b ||` where `A` is given by its
/// columns (full column rank assumed). Solved through the normal equations
/// with Cholesky; `None` when they are numerically singular.
pub fn least_squares(columns: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let k = columns.len();
    let mut g = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for i in 0..k {
        rhs[i] = dot(columns[i], b);
        for j in i..k {
            let v = dot(columns[i], columns[j]);
            g[i * k + j] = v;
            g[j * k + i] = v;
        }
    }
    let scale = (0..k).map(|i| g[i * k + i]).fold(0.0, f64::max);
    // Cholesky, lower triangle stored in place.
    for j in 0..k {
        let mut d = g[j * k + j];
        for p in 0..j {
            d -= g[j * k + p] * g[j * k + p];
        }
        if d <= 1e-14 * scale {
            return None;
        }
        let d = d.sqrt();
        g[j * k + j] = d;
        for i in j + 1..k {
            let mut s = g[i * k + j];
            for p in 0..j {
                s -= g[i * k + p] * g[j * k + p];
            }
            g[i * k + j] = s / d;
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let s: f64 = (0..i).map(|p| g[i * k + p] * y[p]).sum();
        y[i] = (rhs[i] - s) / g[i * k + i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let s: f64 = (i + 1..k).map(|p| g[p * k + i] * x[p]).sum();
        x[i] = (y[i] - s) / g[i * k + i];
    }
    Some(x)
}
