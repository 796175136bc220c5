use super::Point;
use crate::linalg;
use crate::tolerances;

/// Outcome of a [`FeasibilityLp`].
#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { x: Vec<f64>, value: f64 },
}

/// `min c.x` subject to `A x = b`, `x >= 0`, solved by the two-phase dense
/// tableau simplex method with Bland's rule. Without an objective only the
/// first phase does any work.
#[derive(Clone, Debug)]
pub struct FeasibilityLp {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
}

impl FeasibilityLp {
    pub fn new(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Self {
        assert_eq!(rows.len(), rhs.len(), "one right-hand side per row");
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged constraint matrix");
        Self { rows, rhs, cost: vec![0.0; n] }
    }

    pub fn with_objective(mut self, cost: Vec<f64>) -> Self {
        assert_eq!(cost.len(), self.cost.len(), "one cost per column");
        self.cost = cost;
        self
    }

    pub fn solve(&self) -> LpOutcome {
        let m = self.rows.len();
        let n = self.cost.len();
        let width = n + m + 1;
        let tol = tolerances::LP_FEASIBILITY;
        // Tableau rows 0..m are constraints, row m is the objective; the last
        // column holds the right-hand side.
        let mut t = vec![vec![0.0; width]; m + 1];
        let mut basis: Vec<usize> = (n..n + m).collect();
        for i in 0..m {
            let flip = if self.rhs[i] < 0.0 { -1.0 } else { 1.0 };
            for j in 0..n {
                t[i][j] = flip * self.rows[i][j];
            }
            t[i][n + i] = 1.0;
            t[i][width - 1] = flip * self.rhs[i];
        }
        // Phase one: minimize the sum of artificials.
        for i in 0..m {
            for j in 0..width {
                if !(n..n + m).contains(&j) {
                    t[m][j] -= t[i][j];
                }
            }
        }
        if !run(&mut t, &mut basis, n + m, tol) {
            unreachable!("phase one is bounded below by zero");
        }
        if -t[m][width - 1] > tol {
            return LpOutcome::Infeasible;
        }
        // Drive artificials out of the basis where possible.
        for i in 0..m {
            if basis[i] >= n {
                if let Some(j) = (0..n).find(|&j| t[i][j].abs() > tol) {
                    pivot(&mut t, &mut basis, i, j);
                }
            }
        }
        // Phase two on the original columns.
        for j in 0..width {
            t[m][j] = 0.0;
        }
        for j in 0..n {
            t[m][j] = self.cost[j];
        }
        for i in 0..m {
            let b = basis[i];
            if b < n && self.cost[b] != 0.0 {
                let f = self.cost[b];
                for j in 0..width {
                    t[m][j] -= f * t[i][j];
                }
            }
        }
        for row in t.iter_mut() {
            for v in &mut row[n..n + m] {
                *v = 0.0;
            }
        }
        for (i, &b) in basis.iter().enumerate() {
            if b >= n {
                t[i][b] = 1.0;
            }
        }
        if !run(&mut t, &mut basis, n, tol) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; n];
        for (i, &b) in basis.iter().enumerate() {
            if b < n {
                x[b] = t[i][width - 1].max(0.0);
            }
        }
        let value = linalg::dot(&self.cost, &x);
        LpOutcome::Optimal { x, value }
    }
}

/// Simplex iterations over columns `0..cols` with Bland's rule. Returns
/// `false` on an unbounded ray.
fn run(t: &mut [Vec<f64>], basis: &mut [usize], cols: usize, tol: f64) -> bool {
    let m = basis.len();
    let rhs = t[0].len() - 1;
    loop {
        let Some(enter) = (0..cols).find(|&j| t[m][j] < -tol) else {
            return true;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let a = t[i][enter];
            if a > tol {
                let ratio = t[i][rhs] / a;
                let better = match leave {
                    None => true,
                    Some((k, r)) => ratio < r - 1e-15 || (ratio <= r + 1e-15 && basis[i] < basis[k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            return false;
        };
        pivot(t, basis, row, enter);
    }
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col];
    t[row].iter_mut().for_each(|v| *v /= p);
    let pivot_row = t[row].clone();
    for (i, r) in t.iter_mut().enumerate() {
        if i == row {
            continue;
        }
        let f = r[col];
        if f != 0.0 {
            for (v, pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    basis[row] = col;
}

/// Whether `x` is a convex combination of `points`, decided by linear
/// programming on data translated to `x` and scaled to unit size.
pub fn point_in_conv_lp(x: &Point, points: &[Point]) -> bool {
    assert!(!points.is_empty(), "need at least one point");
    let d = x.dim();
    assert!(points.iter().all(|p| p.dim() == d), "dimension mismatch");
    let shifted: Vec<Vec<f64>> = points.iter().map(|p| linalg::sub(p.coords(), x.coords())).collect();
    let scale = shifted.iter().map(|v| linalg::norm(v)).fold(0.0, f64::max);
    if scale == 0.0 {
        return true;
    }
    let mut rows = vec![vec![0.0; points.len()]; d + 1];
    for (j, v) in shifted.iter().enumerate() {
        for i in 0..d {
            rows[i][j] = v[i] / scale;
        }
        rows[d][j] = 1.0;
    }
    let mut rhs = vec![0.0; d + 1];
    rhs[d] = 1.0;
    !matches!(FeasibilityLp::new(rows, rhs).solve(), LpOutcome::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_two_optimum() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
        let lp = FeasibilityLp::new(
            vec![vec![1.0, 2.0, 1.0, 0.0], vec![3.0, 1.0, 0.0, 1.0]],
            vec![4.0, 6.0],
        )
        .with_objective(vec![-1.0, -1.0, 0.0, 0.0]);
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
                assert!((value + 2.8).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn detects_unbounded_and_infeasible() {
        let lp = FeasibilityLp::new(vec![vec![1.0, -1.0]], vec![1.0]).with_objective(vec![0.0, -1.0]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
        let lp = FeasibilityLp::new(vec![vec![1.0, 1.0]], vec![-1.0]);
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
    }

    #[test]
    fn membership_examples() {
        let p = |a: f64, b: f64| Point::new(vec![a, b]);
        let pts = vec![p(0.0, 0.0), p(4.0, 0.0), p(0.0, 2.0)];
        assert!(point_in_conv_lp(&pts[0], &pts));
        assert!(point_in_conv_lp(&p(2.0, 0.0), &pts));
        assert!(point_in_conv_lp(&p(1.0, 0.5), &pts));
        assert!(!point_in_conv_lp(&p(5.0, 5.0), &pts));
        assert!(!point_in_conv_lp(&p(2.0, 1.01), &pts));
    }
}
