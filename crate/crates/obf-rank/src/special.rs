//! Scalar special functions: principal-branch Lambert-W and the (non
//! regularized) lower incomplete gamma function.
//!
//! Both are required by the closed-form rank results: Lambert-W inverts the
//! two-cell Wyner constraint `a*L + b*log(1 + c*L) <= d`, and
//! `gamma(2/alpha, .)` appears when the single-cell outage is averaged over
//! uniformly dropped user locations.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecialError {
    #[error("lambert_w0 argument {0} below branch point -1/e")]
    BelowBranchPoint(f64),
    #[error("lower_incomplete_gamma requires a > 0, got a = {0}")]
    NonPositiveShape(f64),
    #[error("lower_incomplete_gamma requires x >= 0, got x = {0}")]
    NegativeArgument(f64),
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
}

const MAX_ITER: usize = 200;

/// Principal branch of the Lambert-W function, defined by `w * exp(w) = x`.
///
/// Valid for `x >= -1/e`; the intended domain in this crate is `x >= 0`
/// (negative arguments down to the branch point are handled defensively).
/// Uses Halley iteration from a branch-dependent initial guess.
pub fn lambert_w0(x: f64) -> Result<f64, SpecialError> {
    const NEG_INV_E: f64 = -0.367_879_441_171_442_33;
    if !(x >= NEG_INV_E) {
        return Err(SpecialError::BelowBranchPoint(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let w = if x > std::f64::consts::E {
        let lx = x.ln();
        lx - lx.ln()
    } else if x < -0.25 {
        // near the branch point, expand in sqrt(2(e*x + 1))
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0
    } else {
        x * (1.0 - x)
    };
    halley_w(w.max(-1.0 + 1e-12), x)
}

/// `W(exp(y))` without forming `exp(y)`, so arguments far beyond f64 range
/// stay usable. Solves `w + ln(w) = y` by Newton for large `y`.
pub fn lambert_w0_exp(y: f64) -> Result<f64, SpecialError> {
    if y < 700.0 {
        return lambert_w0(y.exp());
    }
    let mut w = y - y.ln();
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - y;
        let step = f / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-15 * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(SpecialError::NoConvergence("lambert_w0_exp"))
}

fn halley_w(mut w: f64, x: f64) -> Result<f64, SpecialError> {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-15 * x.abs().max(1e-300) || f == 0.0 {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        w -= step;
        // a step within a few ulps of w cannot improve the residual further
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            return Ok(w);
        }
    }
    Err(SpecialError::NoConvergence("lambert_w0"))
}

/// Lower incomplete gamma function `gamma(a, x) = int_0^x t^(a-1) e^(-t) dt`.
///
/// Power series for `x < a + 1`, continued fraction of the upper complement
/// otherwise. Requires `a > 0`, `x >= 0`.
pub fn lower_incomplete_gamma(a: f64, x: f64) -> Result<f64, SpecialError> {
    if !(a > 0.0) {
        return Err(SpecialError::NonPositiveShape(a));
    }
    if !(x >= 0.0) {
        return Err(SpecialError::NegativeArgument(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x < a + 1.0 {
        lower_gamma_series(a, x)
    } else {
        Ok(gamma(a) - upper_gamma_cf(a, x)?)
    }
}

/// Series branch: `gamma(a,x) = x^a e^{-x} sum_n x^n / (a (a+1) ... (a+n))`.
pub(crate) fn lower_gamma_series(a: f64, x: f64) -> Result<f64, SpecialError> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-16 {
            return Ok(sum * (a * x.ln() - x).exp());
        }
    }
    Err(SpecialError::NoConvergence("lower_gamma_series"))
}

/// Continued-fraction branch for the upper complement `Gamma(a,x)` (modified
/// Lentz), valid for `x >= a + 1`.
pub(crate) fn upper_gamma_cf(a: f64, x: f64) -> Result<f64, SpecialError> {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            return Ok(h * (a * x.ln() - x).exp());
        }
    }
    Err(SpecialError::NoConvergence("upper_gamma_cf"))
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 coefficients).
pub fn ln_gamma(a: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if a < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * a).sin()).ln() - ln_gamma(1.0 - a);
    }
    let a = a - 1.0;
    let mut x = 0.999_999_999_999_809_9;
    for (i, c) in COEFFS.iter().enumerate() {
        x += c / (a + (i as f64) + 1.0);
    }
    let t = a + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (a + 0.5) * t.ln() - t + x.ln()
}

/// Gamma function for positive real arguments.
pub fn gamma(a: f64) -> f64 {
    ln_gamma(a).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: fixed-point Newton on w*e^w = x, run to 1e-14.
    fn lambert_oracle(x: f64, mut w: f64) -> f64 {
        for _ in 0..500 {
            let ew = w.exp();
            let f = w * ew - x;
            if f.abs() <= 1e-14 * (1.0 + x.abs()) {
                break;
            }
            w -= f / (ew * (1.0 + w));
        }
        w
    }

    /// Independent oracle: erf via its Taylor series.
    fn erf_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        for n in 1..200 {
            let n = n as f64;
            term *= -z * z / n;
            sum += term / (2.0 * n + 1.0);
            if term.abs() < 1e-18 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn lambert_at_zero_and_e() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        let w = lambert_w0(std::f64::consts::E).unwrap();
        assert!((w - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambert_at_one_matches_fixed_point_oracle() {
        let expected = lambert_oracle(1.0, 0.5);
        assert!((expected - 0.567_143_290_4).abs() < 1e-9);
        let w = lambert_w0(1.0).unwrap();
        assert!((w - expected).abs() < 1e-13);
    }

    #[test]
    fn lambert_defining_equation_residual() {
        let mut x = 1e-6;
        while x <= 1e6 {
            let w = lambert_w0(x).unwrap();
            let resid = (w * w.exp() - x).abs();
            assert!(resid <= 1e-12 * x.max(1.0), "x={x} resid={resid}");
            x *= 3.7;
        }
    }

    #[test]
    fn lambert_negative_principal_branch() {
        // defensive coverage of [-1/e, 0)
        for &x in &[-0.36, -0.3, -0.2, -0.05, -1e-4] {
            let w = lambert_w0(x).unwrap();
            assert!((-1.0..=0.0).contains(&w));
            assert!((w * w.exp() - x).abs() <= 1e-13);
        }
        assert!(lambert_w0(-0.4).is_err());
    }

    #[test]
    fn lambert_exp_consistency_and_large_arguments() {
        for &y in &[0.0, 1.0, 10.0, 100.0, 650.0] {
            let a = lambert_w0_exp(y).unwrap();
            let b = lambert_w0(y.exp()).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }
        let w = lambert_w0_exp(1e4).unwrap();
        assert!((w + w.ln() - 1e4).abs() < 1e-9);
    }

    #[test]
    fn gamma_a_one_closed_form() {
        for &x in &[0.5, 1.0, 2.0] {
            let g = lower_incomplete_gamma(1.0, x).unwrap();
            let expected = -(-x).exp_m1();
            assert!((g - expected).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn gamma_at_zero_is_zero() {
        assert_eq!(lower_incomplete_gamma(2.3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gamma_half_one_matches_erf_oracle() {
        // gamma(1/2, x) = sqrt(pi) * erf(sqrt(x))
        let expected = std::f64::consts::PI.sqrt() * erf_series(1.0);
        assert!((expected - 1.493_648_266).abs() < 1e-9);
        let g = lower_incomplete_gamma(0.5, 1.0).unwrap();
        assert!((g - expected).abs() < 1e-10);
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(lower_incomplete_gamma(0.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(-1.0, 1.0).is_err());
        assert!(lower_incomplete_gamma(1.0, -0.1).is_err());
    }

    #[test]
    fn gamma_monotone_in_x() {
        for &a in &[0.3, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let mut prev = 0.0;
            let mut x = 0.0;
            while x <= 30.0 {
                let g = lower_incomplete_gamma(a, x).unwrap();
                assert!(g >= prev - 1e-15, "a={a} x={x}");
                prev = g;
                x += 0.37;
            }
        }
    }

    /// Stirling-series gamma, independent of the Lanczos path.
    fn gamma_stirling(a: f64) -> f64 {
        // push argument up for series accuracy, then divide back down
        let mut a = a;
        let mut scale = 1.0;
        while a < 20.0 {
            scale *= a;
            a += 1.0;
        }
        let series = 1.0 + 1.0 / (12.0 * a) + 1.0 / (288.0 * a * a)
            - 139.0 / (51_840.0 * a * a * a)
            - 571.0 / (2_488_320.0 * a * a * a * a);
        (2.0 * std::f64::consts::PI / a).sqrt() * (a / std::f64::consts::E).powf(a) * series
            / scale
    }

    #[test]
    fn gamma_limit_at_large_x() {
        for &a in &[0.5, 1.0, 2.5, 7.0, 10.0] {
            let g = lower_incomplete_gamma(a, 700.0).unwrap();
            let full = gamma_stirling(a);
            assert!(
                (g - full).abs() <= 1e-8 * full,
                "a={a} gamma={g} full={full}"
            );
        }
    }

    #[test]
    fn series_cf_switchover_continuity() {
        for &a in &[0.4, 1.0, 2.7, 6.0, 10.0] {
            let x = a + 1.0;
            let from_series = lower_gamma_series(a, x).unwrap();
            let from_cf = gamma(a) - upper_gamma_cf(a, x).unwrap();
            assert!(
                (from_series - from_cf).abs() <= 1e-10 * from_series.abs(),
                "a={a}: {from_series} vs {from_cf}"
            );
        }
    }
}
