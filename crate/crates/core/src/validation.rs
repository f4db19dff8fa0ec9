//! The oracle suite behind `torsc validate`: each check compares a library
//! result against an independently computed reference and reports the
//! measured error.

use num_complex::Complex64;

use crate::duality;
use crate::phase_shift::compute_phase_shift;
use crate::potentials::{NIndex, Potential, PotentialSpec, Regime};
use crate::radial_solver::{integrate, RadialProblem};
use crate::reference_solutions::{coulomb_exact, kummer_m, log_gamma};
use crate::tortoise::{eval_hypergeometric, remainder_potential, sigma, TortoiseMap};

pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Measured error, compared against `tolerance`.
    pub error: f64,
    pub tolerance: f64,
}

fn check(name: &'static str, error: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name,
        passed: error.is_finite() && error < tolerance,
        error,
        tolerance,
    }
}

/// Run every check; the CLI turns this into the pass/fail table.
pub fn run_all() -> Vec<CheckResult> {
    let mut out = Vec::new();

    // sigma recurrence vs the Gamma-function definition
    let err = (1..=32)
        .map(|eta| {
            let e = eta as f64;
            let direct = (crate::numeric::ln_gamma(e - 0.5)
                - (2.0 * std::f64::consts::PI.sqrt()).ln()
                - crate::numeric::ln_gamma(e + 1.0))
            .exp();
            ((sigma(eta) - direct) / direct).abs()
        })
        .fold(0.0f64, f64::max);
    out.push(check("sigma-recurrence-vs-gamma", err, 1e-12));

    // classification of the section-7 examples
    let classify_ok = [
        (-1.0, Regime::Vanishing, 1u32),
        (-0.5, Regime::Vanishing, 2),
        (-1.5, Regime::Vanishing, 0),
        (2.0, Regime::Rising, 1),
        (2.0 / 3.0, Regime::Rising, 2),
        (6.0, Regime::Rising, 0),
    ]
    .iter()
    .all(|&(p, regime, n)| {
        let c = PotentialSpec::single(1.0, p).unwrap().classify();
        c.regime == regime && c.n_index == NIndex::Finite(n)
    });
    out.push(check(
        "classification-section7",
        if classify_ok { 0.0 } else { 1.0 },
        0.5,
    ));

    // Coulomb map against the literal closed form, as a difference
    let coulomb = Potential::parse(r#"[{"c":2.0,"p":-1.0}]"#).unwrap();
    let map = TortoiseMap::build(&coulomb, 1.0).unwrap();
    let diff = map.eval(100.0).unwrap() - map.eval(10.0).unwrap();
    let exact = 90.0 - 10.0f64.ln();
    out.push(check(
        "coulomb-map-closed-form",
        ((diff - exact) / exact).abs(),
        1e-12,
    ));

    // hypergeometric identity for the Coulomb map
    let spec = coulomb.as_power_sum().unwrap();
    let hyper = eval_hypergeometric(spec, 1.0, 1, 500.0, 50.0).unwrap();
    let closed = map.eval(500.0).unwrap() - map.eval(50.0).unwrap();
    out.push(check(
        "hypergeometric-identity",
        (hyper - closed).abs(),
        1e-8,
    ));

    // log-gamma recurrence on a complex grid
    let err = (0..25)
        .map(|i| {
            let z = Complex64::new(0.5 + 0.15 * i as f64, -3.0 + 0.25 * i as f64);
            (log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln()).norm()
        })
        .fold(0.0f64, f64::max);
    out.push(check("log-gamma-recurrence", err, 1e-12));

    // Kummer M(1,2,1) = e - 1
    let m = kummer_m(
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, 0.0),
    )
    .unwrap();
    out.push(check(
        "kummer-exponential-identity",
        (m.re - (std::f64::consts::E - 1.0)).abs() + m.im.abs(),
        1e-13,
    ));

    // free Coulomb reduces to 2i sin(kr)
    let err = [1.0, 7.0, 30.0]
        .iter()
        .map(|&r| {
            (coulomb_exact(0, 0.0, 1.0, r).unwrap() - Complex64::new(0.0, 2.0 * r.sin())).norm()
        })
        .fold(0.0f64, f64::max);
    out.push(check("coulomb-oracle-free-limit", err, 1e-10));

    // ODE solution vs the Whittaker oracle, one-constant normalization
    let problem = RadialProblem::new(coulomb.clone(), 1.0, 0, 30.0).with_checkpoints(&[5.0, 30.0]);
    let sol = integrate(&problem).unwrap();
    let (u5, _) = sol.sample(5.0).unwrap();
    let (u30, _) = sol.sample(30.0).unwrap();
    let w5 = coulomb_exact(0, 2.0, 1.0, 5.0).unwrap().norm();
    let w30 = coulomb_exact(0, 2.0, 1.0, 30.0).unwrap().norm();
    out.push(check(
        "solver-vs-whittaker-oracle",
        (u30.abs() / u5.abs() - w30 / w5).abs(),
        1e-6,
    ));

    // free-particle phase shift
    let free = compute_phase_shift(&Potential::free(), 1.0, 1, 40.0).unwrap();
    out.push(check("free-particle-null-phase", free.delta.abs(), 1e-8));

    // Coulomb phase shift vs arg Gamma(1 + i alpha/2k)
    let delta = compute_phase_shift(&coulomb, 1.0, 0, 500.0).unwrap().delta;
    let reference = log_gamma(Complex64::new(1.0, 1.0)).unwrap().im;
    out.push(check(
        "coulomb-phase-vs-gamma",
        (delta - reference).abs(),
        1e-4,
    ));

    // duality exponents and N preservation
    let err = [(1.0, 2.0), (0.5, 2.0 / 3.0), (1.5, 6.0)]
        .iter()
        .map(|&(a, big_a)| (duality::dual_exponent(a).unwrap() - big_a).abs())
        .fold(0.0f64, f64::max);
    out.push(check("duality-exponent-map", err, 1e-12));
    let preserved = [(-1.0, 1u32), (-0.5, 2), (-1.5, 0)].iter().all(|&(p, n)| {
        let s = PotentialSpec::single(1.0, p).unwrap();
        duality::check_n_preserved(&s, 1.0).unwrap() == (n, n, true)
    });
    out.push(check(
        "duality-n-preservation",
        if preserved { 0.0 } else { 1.0 },
        0.5,
    ));

    // remainder decays faster than 1/r for the vanishing examples
    let decays = [(-1.0, 1u32), (-0.5, 2), (-1.5, 0)].iter().all(|&(p, n)| {
        let s = PotentialSpec::single(1.0, p).unwrap();
        let vals: Vec<f64> = (2..=6)
            .map(|j| {
                let r = 10f64.powi(j);
                r * remainder_potential(&s, 1.0, n, r).unwrap().abs()
            })
            .collect();
        vals.windows(2).all(|w| w[1] < w[0])
    });
    out.push(check(
        "remainder-decay",
        if decays { 0.0 } else { 1.0 },
        0.5,
    ));

    out
}
