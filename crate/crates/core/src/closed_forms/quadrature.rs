//! Adaptive Gauss-Legendre quadrature with interval bisection.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

const ORDER: usize = 20;
const MAX_PANELS: usize = 4000;

/// Nodes and weights on `[-1, 1]`, found by Newton iteration on the Legendre
/// polynomial of degree [`ORDER`].
fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut derivative = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                derivative = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / derivative;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * derivative * derivative);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}

fn fixed(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes.iter().zip(weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// A panel with its rule value on each half; `error` compares their sum
/// with the rule on the whole panel.
struct Panel {
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    error: f64,
}

impl Panel {
    fn new(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64) -> Self {
        let mid = 0.5 * (a + b);
        let left = fixed(f, a, mid);
        let right = fixed(f, mid, b);
        Self { a, b, left, right, error: (left + right - whole).abs() }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

/// `int_a^b f` to absolute error `tol` by globally adaptive bisection: the
/// panel with the largest error estimate is split until the summed estimate
/// meets `tol`, reaches the rounding-noise floor, or the panel budget runs
/// out.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut heap = BinaryHeap::new();
    heap.push(Panel::new(&f, a, b, fixed(&f, a, b)));
    let mut total_error = heap.peek().map_or(0.0, |p| p.error);
    let mut magnitude = heap.peek().map_or(0.0, |p| p.left.abs() + p.right.abs());
    for _ in 0..MAX_PANELS {
        if total_error <= tol.max(64.0 * f64::EPSILON * magnitude) {
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(Panel { error: 0.0, ..worst });
            break;
        }
        let lo = Panel::new(&f, worst.a, mid, worst.left);
        let hi = Panel::new(&f, mid, worst.b, worst.right);
        total_error += lo.error + hi.error - worst.error;
        magnitude += lo.left.abs() + lo.right.abs() + hi.left.abs() + hi.right.abs()
            - worst.left.abs()
            - worst.right.abs();
        heap.push(lo);
        heap.push(hi);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    panels.iter().map(Panel::value).sum()
}
