//! Small numerical helpers shared across modules: adaptive quadrature and
//! a real log-gamma for coefficient ratios.

use crate::error::{Error, Result};

/// Adaptive Simpson quadrature with an absolute tolerance.
///
/// The integrand is fallible so domain violations inside the interval
/// propagate instead of silently producing NaNs.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let m = 0.5 * (lo + hi);
    let flo = f(lo)?;
    let fm = f(m)?;
    let fhi = f(hi)?;
    let whole = simpson(lo, hi, flo, fm, fhi);
    let v = adapt(f, lo, hi, flo, fm, fhi, whole, tol, 0)?;
    Ok(sign * v)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || b - a < 1e-14 * (a.abs() + b.abs() + 1.0) {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= 60 {
        return Err(Error::QuadratureFailure);
    }
    let lv = adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
    let rv = adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?;
    Ok(lv + rv)
}

/// ln Gamma(x) for real x > 0 via the Lanczos approximation.
pub fn ln_gamma(x: f64) -> f64 {
    // g = 7, n = 9 coefficient set.
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.5203681218851,
        -1259.1392167224028,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507343278686905,
        -0.13857109526572012,
        9.984_369_578_019_572e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection, needed only for robustness
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().abs().ln()
            - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = integrate(&|x| Ok(x * x), 0.0, 3.0, 1e-12).unwrap();
        assert!((v - 9.0).abs() < 1e-10);
    }

    #[test]
    fn integrates_oscillatory() {
        let v = integrate(&|x: f64| Ok(x.sin()), 0.0, std::f64::consts::PI, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(&|x| Ok(x), 2.0, 0.0, 1e-12).unwrap();
        assert!((v + 2.0).abs() < 1e-10);
    }

    #[test]
    fn propagates_integrand_error() {
        let r = integrate(
            &|x| {
                if x > 0.5 {
                    Err(Error::QuadratureFailure)
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            1e-8,
        );
        assert!(r.is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!((ln_gamma(1.0)).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((ln_gamma(5.0) - 24.0f64.ln()).abs() < 1e-12);
    }
}
