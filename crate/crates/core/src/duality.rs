//! Newton duality between vanishing and rising power-law potentials:
//! V(r) = xi/r^a + sum lambda_n / r^{b_n} is dual to
//! U(rho) = zeta rho^A + sum lambda_n rho^{B_n} under
//!
//!   (2 - a)/2 = 2/(2 + A),
//!   sqrt(2/(2-a)) (2 - b_n) = sqrt(2/(2+A)) (2 + B_n),
//!
//! with the coordinate change r -> rho^{(A+2)/2}, the wavefunction change
//! u -> rho^{A/4} v, and the coupling/energy exchange
//! k^2 -> -zeta (2/(A+2))^2, xi -> -kappa^2 (2/(A+2))^2. One side of a dual
//! pair is always at negative squared energy, so the exchanged couplings are
//! carried with their signs and kappa is reported as sqrt of the magnitude.

use crate::error::{Error, Result};
use crate::potentials::{NIndex, PotentialSpec, PowerTerm};

/// A = 2a/(2 - a) for a leading decay exponent a in (0, 2).
pub fn dual_exponent(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::OutOfDualityDomain { a });
    }
    Ok(2.0 * a / (2.0 - a))
}

/// Inverse direction: a = 2A/(2 + A) for A > 0.
pub fn dual_exponent_inverse(big_a: f64) -> Result<f64> {
    if big_a.is_nan() || big_a <= 0.0 {
        return Err(Error::OutOfDualityDomain { a: big_a });
    }
    Ok(2.0 * big_a / (2.0 + big_a))
}

/// B_n = (2a - 2 b_n)/(2 - a) for a subleading decay exponent b_n >= a.
pub fn dual_subleading(a: f64, b_n: f64) -> Result<f64> {
    if !(a > 0.0 && a < 2.0) {
        return Err(Error::OutOfDualityDomain { a });
    }
    if b_n < a {
        return Err(Error::OutOfDualityDomain { a: b_n });
    }
    Ok((2.0 * a - 2.0 * b_n) / (2.0 - a))
}

/// The full dual data for one vanishing potential at one wavenumber.
#[derive(Clone, Debug)]
pub struct DualityMap {
    /// Leading decay exponent of the original, V ~ xi / r^a.
    pub a: f64,
    /// Leading growth exponent of the dual, U ~ zeta rho^A.
    pub big_a: f64,
    pub coupling_xi: f64,
    /// Signed dual coupling zeta = -k^2 ((A+2)/2)^2; negative for a
    /// scattering-side original.
    pub coupling_zeta: f64,
    pub k: f64,
    /// kappa = sqrt(|kappa^2|) with kappa^2 = -xi ((A+2)/2)^2; the sign of
    /// kappa^2 is recorded separately.
    pub kappa: f64,
    pub kappa_sq_sign: f64,
    /// The dual potential, subleading couplings carried unchanged.
    pub dual: PotentialSpec,
}

/// Map a vanishing power sum to its rising Newton dual.
pub fn dual_potential(spec: &PotentialSpec, k: f64) -> Result<DualityMap> {
    let lead = spec
        .leading_behavior()
        .ok_or(Error::OutOfDualityDomain { a: 0.0 })?;
    let a = -lead.exponent;
    let big_a = dual_exponent(a)?;
    let scale = (big_a + 2.0) / 2.0;
    let coupling_xi = lead.coefficient;
    let coupling_zeta = -k * k * scale * scale;
    let kappa_sq = -coupling_xi * scale * scale;
    let mut terms = vec![PowerTerm {
        coefficient: coupling_zeta,
        exponent: big_a,
    }];
    for t in spec.terms() {
        if t.exponent == lead.exponent {
            continue;
        }
        terms.push(PowerTerm {
            coefficient: t.coefficient,
            exponent: dual_subleading(a, -t.exponent)?,
        });
    }
    Ok(DualityMap {
        a,
        big_a,
        coupling_xi,
        coupling_zeta,
        k,
        kappa: kappa_sq.abs().sqrt(),
        kappa_sq_sign: kappa_sq.signum(),
        dual: PotentialSpec::new(terms)?,
    })
}

/// Classify a vanishing spec and its dual; the section-6 theorem says the
/// truncation index N is shared.
pub fn check_n_preserved(spec: &PotentialSpec, k: f64) -> Result<(u32, u32, bool)> {
    let original = spec.classify();
    let map = dual_potential(spec, k)?;
    let dual = map.dual.classify();
    let (NIndex::Finite(n0), NIndex::Finite(n1)) = (original.n_index, dual.n_index) else {
        return Err(Error::OutOfDualityDomain { a: map.a });
    };
    Ok((n0, n1, n0 == n1))
}

/// Verification helper for the wavefunction transform u -> rho^{A/4} v:
/// a dual-side sample (rho, v) pulled back to the original coordinates.
pub fn transform_wave(rho: f64, v: f64, big_a: f64) -> (f64, f64) {
    (rho.powf((big_a + 2.0) / 2.0), rho.powf(big_a / 4.0) * v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::Potential;
    use crate::tortoise::TortoiseMap;

    #[test]
    fn exponent_examples() {
        assert!((dual_exponent(1.0).unwrap() - 2.0).abs() < 1e-15);
        assert!((dual_exponent(0.5).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((dual_exponent(1.5).unwrap() - 6.0).abs() < 1e-15);
        assert!(matches!(
            dual_exponent(2.0),
            Err(Error::OutOfDualityDomain { .. })
        ));
    }

    #[test]
    fn exponent_involution() {
        let mut a = 0.05;
        while a < 1.95 {
            let big_a = dual_exponent(a).unwrap();
            assert!(
                (dual_exponent_inverse(big_a).unwrap() - a).abs() < 1e-12,
                "a = {a}"
            );
            a += 0.05;
        }
    }

    #[test]
    fn subleading_examples() {
        assert!((dual_subleading(1.0, 1.0).unwrap() - 0.0).abs() < 1e-15);
        assert!((dual_subleading(1.0, 1.5).unwrap() - -1.0).abs() < 1e-15);
        assert!((dual_subleading(0.5, 1.0).unwrap() - -2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn dual2_identity_holds() {
        // sqrt(2/(2-a)) (2 - b) = sqrt(2/(2+A)) (2 + B)
        for (a, b) in [(1.0, 1.3), (0.5, 0.9), (1.5, 1.7), (0.25, 1.9)] {
            let big_a = dual_exponent(a).unwrap();
            let big_b = dual_subleading(a, b).unwrap();
            let lhs = (2.0 / (2.0 - a)).sqrt() * (2.0 - b);
            let rhs = (2.0 / (2.0 + big_a)).sqrt() * (2.0 + big_b);
            assert!((lhs - rhs).abs() < 1e-12, "a = {a}, b = {b}");
        }
    }

    #[test]
    fn dual_potential_examples() {
        // the three section-7 pairs, exponents only (couplings are signed
        // and energy-dependent)
        for (p, big_a) in [(-1.0, 2.0), (-0.5, 2.0 / 3.0), (-1.5, 6.0)] {
            let spec = PotentialSpec::single(1.0, p).unwrap();
            let map = dual_potential(&spec, 1.0).unwrap();
            assert!((map.big_a - big_a).abs() < 1e-12, "p = {p}");
            let lead = map.dual.leading_behavior().unwrap();
            assert!((lead.exponent - big_a).abs() < 1e-12);
            // scattering original: zeta < 0, and xi > 0 gives kappa^2 < 0
            assert!(map.coupling_zeta < 0.0);
            assert!(map.kappa_sq_sign < 0.0);
        }
        // attractive Coulomb: bound-side dual energy is positive
        let attractive = PotentialSpec::single(-2.0, -1.0).unwrap();
        let map = dual_potential(&attractive, 1.0).unwrap();
        assert!(map.kappa_sq_sign > 0.0);
        assert!((map.kappa * map.kappa - 8.0).abs() < 1e-12); // -xi (2)^2
    }

    #[test]
    fn coupling_exchange_round_trip() {
        // k^2 = -zeta (2/(A+2))^2 recovers the original energy
        let spec = PotentialSpec::single(3.0, -0.5).unwrap();
        let map = dual_potential(&spec, 1.7).unwrap();
        let s = 2.0 / (map.big_a + 2.0);
        assert!((-map.coupling_zeta * s * s - 1.7f64 * 1.7).abs() < 1e-12);
        assert!((-map.kappa_sq_sign * map.kappa * map.kappa * s * s - 3.0).abs() < 1e-12);
    }

    #[test]
    fn n_preserved_examples() {
        for (p, n) in [(-1.0, 1), (-0.5, 2), (-1.5, 0)] {
            let spec = PotentialSpec::single(1.0, p).unwrap();
            let (n0, n1, same) = check_n_preserved(&spec, 1.0).unwrap();
            assert_eq!((n0, n1, same), (n, n, true), "p = {p}");
        }
    }

    #[test]
    fn n_preserved_random_sweep() {
        // 200 leading exponents a in (0, 1]
        let mut state = 0x243F6A8885A308D3u64;
        for _ in 0..200 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = 1e-3 + (state >> 11) as f64 / (1u64 << 53) as f64 * (1.0 - 1e-3);
            let spec = PotentialSpec::single(1.0, -a).unwrap();
            let (n0, n1, same) = check_n_preserved(&spec, 1.0).unwrap();
            assert!(same, "a = {a}: N {n0} vs {n1}");
        }
    }

    #[test]
    fn duals_of_long_range_exponents_stay_in_range() {
        // a in (0, 1] maps into A in (0, 2]
        for i in 1..=100 {
            let a = i as f64 / 100.0;
            let big_a = dual_exponent(a).unwrap();
            assert!(
                big_a > 0.0 && big_a <= 2.0 + 1e-15,
                "a = {a} -> A = {big_a}"
            );
        }
    }

    #[test]
    fn coulomb_oscillator_coordinate_consistency() {
        // Bound Coulomb (energy -kb^2, coupling xi < 0) is dual to the
        // scattering oscillator U = omega^2 rho^2 with omega = 2 kb and
        // kappa^2 = -4 xi. The asymptotic exponents must satisfy
        //   kb * r*_V(rho^2) = kappa * rho*_U(rho) - (A/4) ln rho + const,
        // the ln rho mismatch being exactly the rho^{A/4} wavefunction
        // prefactor. r*_V for the bound side is the literal closed form
        // r + (xi / (2 kb^2)) ln r.
        let (omega, kappa) = (2.0, 3.0);
        let kb = omega / 2.0;
        let xi = -kappa * kappa / 4.0;
        let osc = Potential::PowerSum(PotentialSpec::single(omega * omega, 2.0).unwrap());
        let map_u = TortoiseMap::build(&osc, kappa).unwrap();
        let mut consts = Vec::new();
        for rho in [3.0f64, 5.0, 8.0, 13.0, 21.0] {
            let r = rho * rho;
            let rstar_v = r + xi / (2.0 * kb * kb) * r.ln();
            let lhs = kb * rstar_v;
            let rhs = kappa * map_u.eval(rho).unwrap() - 0.5 * rho.ln();
            consts.push(lhs - rhs);
        }
        for c in &consts[1..] {
            assert!((c - consts[0]).abs() < 1e-10, "{consts:?}");
        }
    }

    #[test]
    fn transform_wave_helper() {
        let (r, u) = transform_wave(4.0, 1.5, 2.0);
        assert!((r - 16.0).abs() < 1e-12);
        assert!((u - 3.0).abs() < 1e-12);
    }
}
