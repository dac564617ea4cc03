//! Bracketed scalar root finding: bisection safeguarding secant steps.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Stop once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    /// Stop once the bracket is narrower than this.
    pub x_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            f_tol: 1e-10,
            x_tol: 1e-14,
            max_iter: 200,
        }
    }
}

/// Find a zero of `f` in `[lo, hi]`. Secant steps from the two bracket ends
/// are taken while they land strictly inside the bracket; a bisection step is
/// interleaved whenever the same end moves twice in a row.
pub fn solve_bracketed<F>(mut f: F, lo: f64, hi: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    if fa.abs() <= opts.f_tol {
        return Ok(Root {
            x: a,
            residual: fa,
            iterations: 0,
        });
    }
    let mut fb = f(b)?;
    if fb.abs() <= opts.f_tol {
        return Ok(Root {
            x: b,
            residual: fb,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Bracket {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        });
    }
    // Which end moved last; two moves of the same end in a row force a
    // bisection so a one-sided secant cannot stall.
    let mut moved = 0i8;
    let mut stalled = false;
    for iter in 1..=opts.max_iter {
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if !stalled && secant > a && secant < b {
            secant
        } else {
            0.5 * (a + b)
        };
        let fx = f(x)?;
        if fx.abs() <= opts.f_tol {
            return Ok(Root {
                x,
                residual: fx,
                iterations: iter,
            });
        }
        let side = if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            -1
        } else {
            b = x;
            fb = fx;
            1
        };
        stalled = side == moved && !stalled;
        moved = side;
        if b - a <= opts.x_tol {
            let (x, r) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
            return Ok(Root {
                x,
                residual: r,
                iterations: iter,
            });
        }
    }
    let (x, r) = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    if r.abs() <= opts.f_tol * 1e3 {
        Ok(Root {
            x,
            residual: r,
            iterations: opts.max_iter,
        })
    } else {
        Err(Error::Calibration(format!(
            "root finder did not converge in {} iterations (best x = {x}, residual = {r:e})",
            opts.max_iter
        )))
    }
}
