//! Deterministic adaptive quadrature: 1-D intervals and 2-D rectangles.
//!
//! Both integrators use a 7-point Gauss-Legendre panel compared against its
//! bisected refinement; panels split recursively until the local error fits
//! inside an area-proportional share of the requested tolerance. Subdivision
//! and summation order are fixed, so results are bit-identical run to run.

use thiserror::Error;

/// Integral value with an a-posteriori error estimate and evaluation count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
}

#[derive(Debug, Error)]
pub enum QuadError {
    #[error(
        "quadrature did not converge within the evaluation budget \
         (best value {}, error estimate {})",
        .0.value,
        .0.error_estimate
    )]
    NoConvergence(QuadResult),
    #[error("invalid integration domain: {0}")]
    BadDomain(String),
}

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
const GL_NODES: [f64; 7] = [
    -0.949_107_912_342_758_5,
    -0.741_531_185_599_394_4,
    -0.405_845_151_377_397_2,
    0.0,
    0.405_845_151_377_397_2,
    0.741_531_185_599_394_4,
    0.949_107_912_342_758_5,
];
const GL_WEIGHTS: [f64; 7] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
    0.381_830_050_505_118_9,
    0.279_705_391_489_276_7,
    0.129_484_966_168_869_7,
];

const MAX_DEPTH_1D: u32 = 48;
const BUDGET_1D: u64 = 4_000_000;
const MAX_DEPTH_2D: u32 = 20;
const BUDGET_2D: u64 = 40_000_000;

fn gl7<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let h = 0.5 * (b - a);
    let c = 0.5 * (a + b);
    let mut s = 0.0;
    for i in 0..7 {
        s += GL_WEIGHTS[i] * f(c + h * GL_NODES[i]);
    }
    s * h
}

struct Acc {
    value: f64,
    err: f64,
    evals: u64,
    exhausted: bool,
}

fn adapt_1d<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, coarse: f64, tol: f64, depth: u32, acc: &mut Acc) {
    let m = 0.5 * (a + b);
    let left = gl7(f, a, m);
    let right = gl7(f, m, b);
    acc.evals += 14;
    let fine = left + right;
    let err = (fine - coarse).abs();
    if err <= tol || depth >= MAX_DEPTH_1D || acc.evals >= BUDGET_1D {
        if err > tol {
            acc.exhausted = true;
        }
        acc.value += fine;
        acc.err += err;
        return;
    }
    adapt_1d(f, a, m, left, 0.5 * tol, depth + 1, acc);
    adapt_1d(f, m, b, right, 0.5 * tol, depth + 1, acc);
}

/// Adaptive integration of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate_1d<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<QuadResult, QuadError> {
    if !(a <= b) || !tol.is_finite() || !(tol > 0.0) {
        return Err(QuadError::BadDomain(format!("a={a}, b={b}, tol={tol}")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 });
    }
    let coarse = gl7(&f, a, b);
    let mut acc = Acc { value: 0.0, err: 0.0, evals: 7, exhausted: false };
    adapt_1d(&f, a, b, coarse, tol, 0, &mut acc);
    let result = QuadResult {
        value: acc.value,
        error_estimate: acc.err,
        evaluations: acc.evals,
    };
    if acc.exhausted {
        Err(QuadError::NoConvergence(result))
    } else {
        Ok(result)
    }
}

fn gl7x7<F: Fn(f64, f64) -> f64>(f: &F, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let hx = 0.5 * (x1 - x0);
    let cx = 0.5 * (x0 + x1);
    let hy = 0.5 * (y1 - y0);
    let cy = 0.5 * (y0 + y1);
    let mut s = 0.0;
    for i in 0..7 {
        let x = cx + hx * GL_NODES[i];
        let mut row = 0.0;
        for j in 0..7 {
            row += GL_WEIGHTS[j] * f(x, cy + hy * GL_NODES[j]);
        }
        s += GL_WEIGHTS[i] * row;
    }
    s * hx * hy
}

#[allow(clippy::too_many_arguments)]
fn adapt_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    coarse: f64,
    tol: f64,
    depth: u32,
    acc: &mut Acc,
) {
    let xm = 0.5 * (x0 + x1);
    let ym = 0.5 * (y0 + y1);
    let quads = [
        gl7x7(f, x0, xm, y0, ym),
        gl7x7(f, xm, x1, y0, ym),
        gl7x7(f, x0, xm, ym, y1),
        gl7x7(f, xm, x1, ym, y1),
    ];
    acc.evals += 4 * 49;
    let fine: f64 = quads.iter().sum();
    let err = (fine - coarse).abs();
    if err <= tol || depth >= MAX_DEPTH_2D || acc.evals >= BUDGET_2D {
        if err > tol {
            acc.exhausted = true;
        }
        acc.value += fine;
        acc.err += err;
        return;
    }
    let t = 0.25 * tol;
    adapt_2d(f, x0, xm, y0, ym, quads[0], t, depth + 1, acc);
    adapt_2d(f, xm, x1, y0, ym, quads[1], t, depth + 1, acc);
    adapt_2d(f, x0, xm, ym, y1, quads[2], t, depth + 1, acc);
    adapt_2d(f, xm, x1, ym, y1, quads[3], t, depth + 1, acc);
}

/// Adaptive tensor-product integration of `f` over the rectangle
/// `[x0, x1] x [y0, y1]` to absolute tolerance `tol`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    tol: f64,
) -> Result<QuadResult, QuadError> {
    if !(x0 < x1) || !(y0 < y1) || !tol.is_finite() || !(tol > 0.0) {
        return Err(QuadError::BadDomain(format!(
            "[{x0},{x1}]x[{y0},{y1}], tol={tol}"
        )));
    }
    let coarse = gl7x7(&f, x0, x1, y0, y1);
    let mut acc = Acc { value: 0.0, err: 0.0, evals: 49, exhausted: false };
    adapt_2d(&f, x0, x1, y0, y1, coarse, tol, 0, &mut acc);
    let result = QuadResult {
        value: acc.value,
        error_estimate: acc.err,
        evaluations: acc.evals,
    };
    if acc.exhausted {
        Err(QuadError::NoConvergence(result))
    } else {
        Ok(result)
    }
}
