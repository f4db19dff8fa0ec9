//! The tortoise coordinate map r -> r*(r; k) for a classified potential.
//!
//! For vanishing potentials with finite N the map is
//!
//!   r* = r - sum_{eta=1..N} sigma_eta Int (V/k^2)^eta dr
//!
//! and for rising potentials
//!
//!   r* = (1/4k) ln(V/k^2) - sum_{eta=0..N} sigma_eta Int (k^2/V)^{eta-1/2} dr,
//!
//! with sigma_eta = Gamma(eta - 1/2) / (2 sqrt(pi) eta!). Power-sum potentials
//! expand term-wise into a closed list of power/log terms; marginal potentials
//! and multi-term rising potentials fall back to adaptive quadrature of the
//! unexpanded integrand. All additive constants of integration are dropped, so
//! r* is defined up to a constant and cross-checks compare differences.

use crate::error::{Error, Result};
use crate::numeric;
use crate::potentials::{NIndex, Potential, PotentialClass, PotentialSpec, Regime};

/// sigma_eta = Gamma(eta - 1/2) / (2 sqrt(pi) eta!), by the stable recurrence
/// sigma_{eta+1} = sigma_eta (eta - 1/2) / (eta + 1) from sigma_0 = -1.
pub fn sigma(eta: u32) -> f64 {
    let mut s = -1.0;
    for i in 0..eta {
        let i = i as f64;
        s *= (i - 0.5) / (i + 1.0);
    }
    s
}

/// One closed-form term of the map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MapTerm {
    PowerOfR { coefficient: f64, exponent: f64 },
    LogOfR { coefficient: f64 },
}

#[derive(Clone, Debug)]
enum MapForm {
    /// Explicit term list; covers all power-sum vanishing maps and
    /// single-term rising maps.
    Closed(Vec<MapTerm>),
    /// dr*/dr = sqrt(1 - V/k^2), integrated from the anchor. Marginal
    /// vanishing-side potentials (constant, inv_log).
    MarginalVanishing,
    /// Rising with finite N but no finite power expansion of
    /// (k^2/V)^{eta-1/2}: the truncated sum is integrated numerically and
    /// the (1/4k) ln(V/k^2) piece is kept in closed form.
    RisingSum { n: u32 },
    /// dr*/dr = (1/4k) V'/V + sqrt(V/k^2 - 1). Rising marginal (log builtin).
    MarginalRising,
}

/// The tortoise map for one potential at one wavenumber.
#[derive(Clone, Debug)]
pub struct TortoiseMap {
    pub class: PotentialClass,
    pub k: f64,
    pub validity_floor: f64,
    potential: Potential,
    form: MapForm,
    quad_tol: f64,
}

impl TortoiseMap {
    /// Build the map for a classified potential. Quadrature-backed maps are
    /// anchored at the validity floor.
    pub fn build(potential: &Potential, k: f64) -> Result<TortoiseMap> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Parse(format!("wavenumber k = {k} must be positive")));
        }
        let class = potential.classify();
        let form = match (&class.regime, &class.n_index, potential) {
            (Regime::Vanishing, NIndex::Finite(n), Potential::PowerSum(spec)) => {
                MapForm::Closed(vanishing_terms(spec, k, *n))
            }
            (Regime::Rising, NIndex::Finite(n), Potential::PowerSum(spec)) => {
                if spec.terms().len() == 1 {
                    MapForm::Closed(rising_terms_single(spec, k, *n)?)
                } else {
                    let lead = spec.leading_behavior().expect("nonempty");
                    if lead.coefficient <= 0.0 {
                        return Err(Error::InvalidPotential(
                            "rising tortoise map needs a positive leading coefficient".into(),
                        ));
                    }
                    MapForm::RisingSum { n: *n }
                }
            }
            (Regime::Constant, NIndex::Marginal, _) => MapForm::MarginalVanishing,
            (Regime::Vanishing, NIndex::Marginal, _) => MapForm::MarginalVanishing,
            (Regime::Rising, NIndex::Marginal, _) => MapForm::MarginalRising,
            _ => unreachable!("classification covers all regimes"),
        };
        if let MapForm::Closed(terms) = &form {
            if let Some(MapTerm::PowerOfR { coefficient, .. }) = terms
                .first()
                .filter(|_| matches!(class.regime, Regime::Rising))
            {
                if !coefficient.is_finite() {
                    return Err(Error::EvaluationOverflow { r: f64::NAN });
                }
            }
        }
        let validity_floor = validity_floor(potential, k);
        Ok(TortoiseMap {
            class,
            k,
            validity_floor,
            potential: potential.clone(),
            form,
            quad_tol: 1e-10,
        })
    }

    /// A copy of this map with `extra` additional sigma orders beyond the
    /// classification N, for vanishing power-sum potentials. The sigma series
    /// is the WKB phase integral k^{-1} Int sqrt(k^2 - V) dr expanded in
    /// V/k^2, so extra orders track the true scattering phase more closely;
    /// the truncation at N is only what defines the published map. Returns
    /// `None` when no closed extension exists (rising, marginal).
    pub fn refined(&self, extra: u32) -> Option<TortoiseMap> {
        let spec = self.potential.as_power_sum()?;
        let (Regime::Vanishing, NIndex::Finite(n)) = (&self.class.regime, &self.class.n_index)
        else {
            return None;
        };
        Some(TortoiseMap {
            form: MapForm::Closed(vanishing_terms(spec, self.k, n + extra)),
            ..self.clone()
        })
    }

    /// Closed-form term list, when one exists.
    pub fn terms(&self) -> Option<&[MapTerm]> {
        match &self.form {
            MapForm::Closed(t) => Some(t),
            _ => None,
        }
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        if r > self.validity_floor && r.is_finite() {
            Ok(())
        } else {
            Err(Error::OutOfDomain {
                r,
                floor: self.validity_floor,
            })
        }
    }

    /// r*(r). Quadrature forms integrate from the anchor at the validity
    /// floor; the additive constant is conventional either way.
    pub fn eval(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        match &self.form {
            MapForm::Closed(terms) => Ok(eval_terms(terms, r)),
            _ => {
                let anchor = self.validity_floor * (1.0 + 1e-9);
                let integral =
                    numeric::integrate(&|x| self.integrand(x), anchor, r, self.quad_tol)?;
                Ok(integral + self.closed_log_part(r)?)
            }
        }
    }

    /// dr*/dr, analytic.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        match &self.form {
            MapForm::Closed(terms) => Ok(terms
                .iter()
                .map(|t| match t {
                    MapTerm::PowerOfR {
                        coefficient,
                        exponent,
                    } => coefficient * exponent * r.powf(exponent - 1.0),
                    MapTerm::LogOfR { coefficient } => coefficient / r,
                })
                .sum()),
            _ => Ok(self.integrand(r)? + self.closed_log_part_derivative(r)?),
        }
    }

    /// d^2 r*/dr^2, analytic.
    pub fn second_derivative(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        let k2 = self.k * self.k;
        match &self.form {
            MapForm::Closed(terms) => Ok(terms
                .iter()
                .map(|t| match t {
                    MapTerm::PowerOfR {
                        coefficient,
                        exponent,
                    } => coefficient * exponent * (exponent - 1.0) * r.powf(exponent - 2.0),
                    MapTerm::LogOfR { coefficient } => -coefficient / (r * r),
                })
                .sum()),
            MapForm::MarginalVanishing => {
                let v = self.potential.evaluate(r)?;
                let dv = self.potential.derivative(r)?;
                let arg = 1.0 - v / k2;
                if arg <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                Ok(-dv / (2.0 * k2 * arg.sqrt()))
            }
            MapForm::RisingSum { n } => {
                let v = self.potential.evaluate(r)?;
                let dv = self.potential.derivative(r)?;
                let ddv = self.potential.second_derivative(r)?;
                if v <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                let log_part = (ddv / v - (dv / v).powi(2)) / (4.0 * self.k);
                let mut sum = 0.0;
                for eta in 0..=*n {
                    let e = eta as f64 - 0.5;
                    sum += sigma(eta) * e * (k2 / v).powf(e) * (dv / v);
                }
                Ok(log_part + sum)
            }
            MapForm::MarginalRising => {
                let v = self.potential.evaluate(r)?;
                let dv = self.potential.derivative(r)?;
                let ddv = self.potential.second_derivative(r)?;
                let arg = v / k2 - 1.0;
                if arg <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                let log_part = (ddv / v - (dv / v).powi(2)) / (4.0 * self.k);
                Ok(log_part + dv / (2.0 * k2 * arg.sqrt()))
            }
        }
    }

    /// The numerically integrated part of dr*/dr for quadrature forms.
    fn integrand(&self, r: f64) -> Result<f64> {
        let k2 = self.k * self.k;
        match &self.form {
            MapForm::Closed(_) => unreachable!("closed maps are not integrated"),
            MapForm::MarginalVanishing => {
                let v = self.potential.evaluate(r)?;
                let arg = 1.0 - v / k2;
                if arg <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                Ok(arg.sqrt())
            }
            MapForm::RisingSum { n } => {
                let v = self.potential.evaluate(r)?;
                if v <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                let mut sum = 0.0;
                for eta in 0..=*n {
                    let e = eta as f64 - 0.5;
                    sum += sigma(eta) * (k2 / v).powf(e);
                }
                Ok(-sum)
            }
            MapForm::MarginalRising => {
                let v = self.potential.evaluate(r)?;
                let arg = v / k2 - 1.0;
                if arg <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                Ok(arg.sqrt())
            }
        }
    }

    /// (1/4k) ln(V/k^2) for the rising quadrature forms; zero otherwise.
    fn closed_log_part(&self, r: f64) -> Result<f64> {
        match &self.form {
            MapForm::RisingSum { .. } | MapForm::MarginalRising => {
                let v = self.potential.evaluate(r)?;
                if v <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                Ok((v / (self.k * self.k)).ln() / (4.0 * self.k))
            }
            _ => Ok(0.0),
        }
    }

    fn closed_log_part_derivative(&self, r: f64) -> Result<f64> {
        match &self.form {
            MapForm::RisingSum { .. } | MapForm::MarginalRising => {
                let v = self.potential.evaluate(r)?;
                let dv = self.potential.derivative(r)?;
                if v <= 0.0 {
                    return Err(Error::TurningPointInRange { r });
                }
                Ok(dv / v / (4.0 * self.k))
            }
            _ => Ok(0.0),
        }
    }
}

/// Real-exponent polynomial as (coefficient, exponent) pairs.
type Poly = Vec<(f64, f64)>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out: Poly = Vec::with_capacity(a.len() * b.len());
    for &(ca, pa) in a {
        for &(cb, pb) in b {
            push_merged(&mut out, ca * cb, pa + pb);
        }
    }
    out
}

fn push_merged(out: &mut Poly, c: f64, p: f64) {
    for entry in out.iter_mut() {
        if (entry.1 - p).abs() <= 1e-9 * entry.1.abs().max(p.abs()).max(1.0) {
            entry.0 += c;
            return;
        }
    }
    out.push((c, p));
}

fn push_map_term(terms: &mut Vec<MapTerm>, c: f64, exponent: f64) {
    if c == 0.0 {
        return;
    }
    // a 1/r integrand integrates to a log term
    if (exponent + 1.0).abs() <= 1e-9 {
        for t in terms.iter_mut() {
            if let MapTerm::LogOfR { coefficient } = t {
                *coefficient += c;
                return;
            }
        }
        terms.push(MapTerm::LogOfR { coefficient: c });
    } else {
        let q = exponent + 1.0;
        for t in terms.iter_mut() {
            if let MapTerm::PowerOfR {
                coefficient,
                exponent: e,
            } = t
            {
                if (*e - q).abs() <= 1e-9 * e.abs().max(q.abs()).max(1.0) {
                    *coefficient += c / q;
                    return;
                }
            }
        }
        terms.push(MapTerm::PowerOfR {
            coefficient: c / q,
            exponent: q,
        });
    }
}

/// Term list for a vanishing power sum with finite N:
/// r* = r - sum sigma_eta Int (V/k^2)^eta dr, expanded multinomially.
fn vanishing_terms(spec: &PotentialSpec, k: f64, n: u32) -> Vec<MapTerm> {
    let mut terms = vec![MapTerm::PowerOfR {
        coefficient: 1.0,
        exponent: 1.0,
    }];
    let k2 = k * k;
    let base: Poly = spec
        .terms()
        .iter()
        .map(|t| (t.coefficient / k2, t.exponent))
        .collect();
    let mut power: Poly = vec![(1.0, 0.0)];
    for eta in 1..=n {
        power = poly_mul(&power, &base);
        let s = sigma(eta);
        for &(c, p) in &power {
            push_map_term(&mut terms, -s * c, p);
        }
    }
    terms
}

/// Term list for a single-term rising potential c r^p with finite N:
/// the (1/4k) ln(V/k^2) piece contributes a log term (constant dropped) and
/// each (k^2/V)^{eta-1/2} integrates in closed form.
fn rising_terms_single(spec: &PotentialSpec, k: f64, n: u32) -> Result<Vec<MapTerm>> {
    let lead = spec.leading_behavior().expect("nonempty");
    let (c, p) = (lead.coefficient, lead.exponent);
    if c <= 0.0 {
        return Err(Error::InvalidPotential(
            "rising tortoise map needs a positive leading coefficient".into(),
        ));
    }
    let k2 = k * k;
    let mut terms = vec![MapTerm::LogOfR {
        coefficient: p / (4.0 * k),
    }];
    for eta in 0..=n {
        let e = eta as f64 - 0.5;
        let coefficient = -sigma(eta) * (k2 / c).powf(e);
        push_map_term(&mut terms, coefficient, -p * e);
    }
    // drop terms that merged to zero
    terms.retain(|t| match t {
        MapTerm::PowerOfR { coefficient, .. } | MapTerm::LogOfR { coefficient } => {
            *coefficient != 0.0
        }
    });
    Ok(terms)
}

fn eval_terms(terms: &[MapTerm], r: f64) -> f64 {
    terms
        .iter()
        .map(|t| match t {
            MapTerm::PowerOfR {
                coefficient,
                exponent,
            } => {
                if *exponent == 1.0 {
                    coefficient * r
                } else {
                    coefficient * r.powf(*exponent)
                }
            }
            MapTerm::LogOfR { coefficient } => coefficient * r.ln(),
        })
        .sum()
}

const FLOOR_SCAN_LO: f64 = 1e-6;
const FLOOR_SCAN_HI: f64 = 1e9;

/// Largest real root of V(r)/k^2 = 1 on [1e-6, 1e9], times a 1.01 safety
/// factor; the scan lower bound when no root exists.
fn validity_floor(potential: &Potential, k: f64) -> f64 {
    let k2 = k * k;
    let f = |r: f64| potential.evaluate(r).map(|v| v / k2 - 1.0);
    let steps = 901;
    let ratio = (FLOOR_SCAN_HI / FLOOR_SCAN_LO).powf(1.0 / (steps - 1) as f64);
    let mut bracket: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut r = FLOOR_SCAN_LO;
    for _ in 0..steps {
        match f(r) {
            Ok(v) => {
                if let Some((rp, vp)) = prev {
                    if (vp > 0.0) != (v > 0.0) {
                        bracket = Some((rp, r));
                    }
                }
                prev = Some((r, v));
            }
            Err(_) => {
                prev = None;
            }
        }
        r *= ratio;
    }
    let Some((mut lo, mut hi)) = bracket else {
        return FLOOR_SCAN_LO;
    };
    let flo = f(lo).unwrap_or(0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Ok(v) => {
                if (v > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Err(_) => break,
        }
    }
    0.5 * (lo + hi) * 1.01
}

/// Gauss hypergeometric series, |z| <= 0.9.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z.is_nan() || z.abs() > 0.9 {
        return Err(Error::HypergeometricDomain { z });
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..10_000 {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-16 * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::HypergeometricDomain { z })
}

/// Gamma(N + 1/2) / (2 sqrt(pi) Gamma(N + 2)).
fn tail_coefficient(n: u32) -> f64 {
    let n = n as f64;
    (numeric::ln_gamma(n + 0.5) - numeric::ln_gamma(n + 2.0)).exp()
        / (2.0 * std::f64::consts::PI.sqrt())
}

/// r*(r) - r*(r_anchor) through the hypergeometric form of the map: the
/// square-root integral plus the 2F1-resummed tail, evaluated by quadrature.
/// Serves as an independent oracle for differences of [`TortoiseMap::eval`].
pub fn eval_hypergeometric(
    spec: &PotentialSpec,
    k: f64,
    n: u32,
    r: f64,
    r_anchor: f64,
) -> Result<f64> {
    let k2 = k * k;
    let class = spec.classify();
    let coef = tail_coefficient(n);
    let tol = 1e-11;
    match class.regime {
        Regime::Rising => {
            let sqrt_part = numeric::integrate(
                &|x| {
                    let v = spec.evaluate(x)?;
                    if v <= k2 {
                        return Err(Error::TurningPointInRange { r: x });
                    }
                    Ok((v / k2).sqrt() * (1.0 - k2 / v).sqrt())
                },
                r_anchor,
                r,
                tol,
            )?;
            let tail = numeric::integrate(
                &|x| {
                    let v = spec.evaluate(x)?;
                    let z = k2 / v;
                    Ok(coef
                        * hyp2f1(1.0, n as f64 + 0.5, n as f64 + 2.0, z)?
                        * z.powf(n as f64 + 0.5))
                },
                r_anchor,
                r,
                tol,
            )?;
            let log_diff =
                ((spec.evaluate(r)? / k2).ln() - (spec.evaluate(r_anchor)? / k2).ln()) / (4.0 * k);
            Ok(sqrt_part + tail + log_diff)
        }
        _ => {
            let sqrt_part = numeric::integrate(
                &|x| {
                    let v = spec.evaluate(x)?;
                    let arg = 1.0 - v / k2;
                    if arg <= 0.0 {
                        return Err(Error::TurningPointInRange { r: x });
                    }
                    Ok(arg.sqrt())
                },
                r_anchor,
                r,
                tol,
            )?;
            let tail = numeric::integrate(
                &|x| {
                    let z = spec.evaluate(x)? / k2;
                    Ok(coef
                        * hyp2f1(1.0, n as f64 + 0.5, n as f64 + 2.0, z)?
                        * z.powi(n as i32 + 1))
                },
                r_anchor,
                r,
                tol,
            )?;
            Ok(sqrt_part + tail)
        }
    }
}

/// The short-range remainder 2 sigma_{N+1} (V/k^2)^N V left after the
/// tortoise transformation of a vanishing potential.
pub fn remainder_potential(spec: &PotentialSpec, k: f64, n: u32, r: f64) -> Result<f64> {
    let v = spec.evaluate(r)?;
    let k2 = k * k;
    Ok(2.0 * sigma(n + 1) * (v / k2).powi(n as i32) * v)
}
