//! Brute-force check of the joint throughput optimum.
//!
//! Scans the simplex `{p1, p2 ≥ 0, p1 + p2 ≤ 1}` on a regular grid, then
//! refines with nested golden-section searches. `T` is log-concave in
//! `(p1, p2)`, so each one-dimensional slice and the profile over `p1` are
//! unimodal and the refinement is safe over the full range.

use super::Analysis;

const INV_PHI: f64 = 0.618_033_988_749_894_8;
const GOLDEN_ITERS: usize = 120;
const TIE_ULPS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSearch {
    /// Best grid point `(p1, p2, T)`.
    pub grid_best: (f64, f64, f64),
    /// Best point after refinement `(p1, p2, T)`.
    pub refined: (f64, f64, f64),
    pub steps: usize,
}

impl SimplexSearch {
    /// Largest throughput seen anywhere in the search.
    pub fn best_throughput(&self) -> f64 {
        self.grid_best.2.max(self.refined.2)
    }
}

/// Maximizes a unimodal `f` on `[lo, hi]`. Endpoints win ties up to a few
/// ulps of the maximum, which the bracketing cannot resolve, so boundary
/// maxima come back exactly on the boundary.
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if b - a <= f64::EPSILON * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [hi, lo] {
        let fx = f(x);
        if fx >= best.1 - TIE_ULPS * f64::EPSILON * best.1.abs() {
            best = (x, fx);
        }
    }
    best
}

pub fn simplex_search(analysis: &Analysis, steps: usize) -> SimplexSearch {
    assert!(steps >= 1, "simplex grid needs at least one step");
    let h = 1.0 / steps as f64;

    let mut grid_best = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let p1 = i as f64 * h;
        for j in 0..=(steps - i) {
            let p2 = j as f64 * h;
            let t = analysis.throughput_at(p1, p2);
            if t > grid_best.2 {
                grid_best = (p1, p2, t);
            }
        }
    }

    let profile = |p1: f64| golden_max(|p2| analysis.throughput_at(p1, p2), 0.0, 1.0 - p1);
    let (p1, t) = golden_max(|p1| profile(p1).1, 0.0, 1.0);
    let (p2, _) = profile(p1);

    SimplexSearch {
        grid_best,
        refined: (p1, p2, t),
        steps,
    }
}
