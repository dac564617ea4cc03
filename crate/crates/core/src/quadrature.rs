//! Adaptive Simpson quadrature.

/// Absolute tolerance used for the phase integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Integrate `f` over `[a, b]`, bisecting panels until the two-halves estimate
/// and the single-panel estimate differ by less than `15·tol`. The returned
/// value carries the Richardson correction.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol,
        depth: 0,
    }];
    let mut total = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if p.depth >= MAX_DEPTH || delta.abs() <= 15.0 * p.tol {
            total += left + right + delta / 15.0;
        } else {
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: 0.5 * p.tol,
                depth: p.depth + 1,
            });
        }
    }
    total
}

/// Integrate on a fixed partition, returning the running integral at every
/// node (first entry 0).
pub fn cumulative<F>(f: F, nodes: &[f64], tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in nodes.windows(2) {
        acc += adaptive_simpson(&f, w[0], w[1], tol / nodes.len() as f64);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = adaptive_simpson(|x| 3.0 * x * x * x - x + 2.0, -1.0, 2.0, 1e-12);
        // ∫ = 3/4·(16−1) − (4−1)/2 + 2·3
        assert!((v - (11.25 - 1.5 + 6.0)).abs() < 1e-12);
    }

    #[test]
    fn smooth_integrand() {
        let v = adaptive_simpson(|x| 1.0 / (2.0 + x.sin()), 0.0, 2.0 * PI, 1e-12);
        assert!((v - 2.0 * PI / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_empty_intervals() {
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0, 1e-10), 0.0);
        let fwd = adaptive_simpson(|x| x.exp(), 0.0, 1.0, 1e-12);
        let back = adaptive_simpson(|x| x.exp(), 1.0, 0.0, 1e-12);
        assert!((fwd + back).abs() < 1e-12);
    }

    #[test]
    fn cumulative_matches_direct() {
        let nodes: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
        let run = cumulative(|x| x.cos(), &nodes, 1e-12);
        for (t, v) in nodes.iter().zip(&run) {
            assert!((v - t.sin()).abs() < 1e-11);
        }
    }
}
