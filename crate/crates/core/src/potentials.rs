//! Radial potentials as finite sums of real-power terms, plus the two
//! logarithmic builtins, and their classification by the truncation index N
//! of the tortoise-coordinate series.
//!
//! Classification of a power sum depends only on the maximal exponent p:
//!
//! * p < -1            -> vanishing, N = 0 (already short range)
//! * -1 <= p < 0       -> vanishing, N the unique integer with 1/(N+1) < -p <= 1/N
//! * p = 0             -> constant, marginal (N -> infinity)
//! * 0 < p <= 2        -> rising, N with 1/(N+1/2) < p <= 1/(N-1/2)
//! * p > 2             -> rising, N = 0
//!
//! Borderline exponents take the inclusive upper bound.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One term c * r^p of a potential.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    #[serde(rename = "c")]
    pub coefficient: f64,
    #[serde(rename = "p")]
    pub exponent: f64,
}

/// A potential V(r) = sum of power terms, exponents strictly increasing.
///
/// An empty term list represents the free potential V = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    terms: Vec<PowerTerm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Vanishing,
    Rising,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NIndex {
    Finite(u32),
    Marginal,
}

/// Classification outcome: large-r regime, N-index, and the dominant term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialClass {
    pub regime: Regime,
    pub n_index: NIndex,
    /// Maximal-exponent term; `None` for the free potential and the
    /// logarithmic builtins, which have no power-law leading term.
    pub leading: Option<PowerTerm>,
}

impl PotentialSpec {
    /// Build a spec from raw terms: sorts by exponent, merges duplicate
    /// exponents by summing coefficients, drops terms that cancel to zero.
    pub fn new(terms: Vec<PowerTerm>) -> Result<Self> {
        for t in &terms {
            if !t.coefficient.is_finite() || !t.exponent.is_finite() {
                return Err(Error::InvalidPotential(format!(
                    "non-finite term (c = {}, p = {})",
                    t.coefficient, t.exponent
                )));
            }
        }
        let mut sorted = terms;
        sorted.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<PowerTerm> = Vec::with_capacity(sorted.len());
        for t in sorted {
            match merged.last_mut() {
                Some(last) if same_exponent(last.exponent, t.exponent) => {
                    last.coefficient += t.coefficient;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        Ok(Self { terms: merged })
    }

    pub fn free() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn single(coefficient: f64, exponent: f64) -> Result<Self> {
        Self::new(vec![PowerTerm {
            coefficient,
            exponent,
        }])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_free(&self) -> bool {
        self.terms.is_empty()
    }

    /// V(r) for r > 0.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        require_positive_r(r)?;
        let v: f64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * r.powf(t.exponent))
            .sum();
        finite_or_overflow(v, r)
    }

    /// Term-wise derivative V'(r).
    pub fn derivative(&self, r: f64) -> Result<f64> {
        require_positive_r(r)?;
        let v: f64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.exponent * r.powf(t.exponent - 1.0))
            .sum();
        finite_or_overflow(v, r)
    }

    /// Term-wise second derivative V''(r).
    pub fn second_derivative(&self, r: f64) -> Result<f64> {
        require_positive_r(r)?;
        let v: f64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.exponent * (t.exponent - 1.0) * r.powf(t.exponent - 2.0))
            .sum();
        finite_or_overflow(v, r)
    }

    /// The maximal-exponent term, which dominates as r -> infinity.
    pub fn leading_behavior(&self) -> Option<PowerTerm> {
        self.terms.last().copied()
    }

    /// Classify by the leading exponent. The free potential counts as a
    /// short-range (N = 0) vanishing potential.
    pub fn classify(&self) -> PotentialClass {
        let leading = match self.leading_behavior() {
            Some(t) => t,
            None => {
                return PotentialClass {
                    regime: Regime::Vanishing,
                    n_index: NIndex::Finite(0),
                    leading: None,
                }
            }
        };
        let p = leading.exponent;
        let (regime, n_index) = if p < -1.0 {
            (Regime::Vanishing, NIndex::Finite(0))
        } else if p < 0.0 {
            (Regime::Vanishing, NIndex::Finite(vanishing_n(-p)))
        } else if p == 0.0 {
            (Regime::Constant, NIndex::Marginal)
        } else if p <= 2.0 {
            (Regime::Rising, NIndex::Finite(rising_n(p)))
        } else {
            (Regime::Rising, NIndex::Finite(0))
        };
        PotentialClass {
            regime,
            n_index,
            leading: Some(leading),
        }
    }
}

/// N for a vanishing leading exponent -p, p in (0, 1]: 1/(N+1) < p <= 1/N.
fn vanishing_n(p: f64) -> u32 {
    debug_assert!(p > 0.0 && p <= 1.0);
    (1.0 / p).floor() as u32
}

/// N for a rising leading exponent p in (0, 2]: 1/(N+1/2) < p <= 1/(N-1/2).
fn rising_n(p: f64) -> u32 {
    debug_assert!(p > 0.0 && p <= 2.0);
    (1.0 / p).round() as u32
}

fn same_exponent(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

fn require_positive_r(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfDomain { r, floor: 0.0 })
    }
}

fn finite_or_overflow(v: f64, r: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::EvaluationOverflow { r })
    }
}

/// A potential accepted by the front end: either a finite power sum or one
/// of the two named logarithmic builtins, which classify directly to the
/// marginal (N -> infinity) type.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    PowerSum(PotentialSpec),
    /// V(r) = strength / ln r (vanishing, marginal). Only defined for r > 1.
    InvLog {
        strength: f64,
    },
    /// V(r) = strength * ln r (rising, marginal).
    Log {
        strength: f64,
    },
}

impl Potential {
    pub fn free() -> Self {
        Potential::PowerSum(PotentialSpec::free())
    }

    /// Parse a potential literal: a JSON list of {"c": .., "p": ..} pairs,
    /// or a builtin `inv_log:<strength>` / `log:<strength>`.
    pub fn parse(literal: &str) -> Result<Self> {
        let s = literal.trim();
        if s.starts_with('[') {
            let terms: Vec<PowerTerm> = serde_json::from_str(s)
                .map_err(|e| Error::Parse(format!("bad potential literal: {e}")))?;
            return Ok(Potential::PowerSum(PotentialSpec::new(terms)?));
        }
        if let Some((name, arg)) = s.split_once(':') {
            let strength: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad builtin strength `{arg}`")))?;
            if !strength.is_finite() || strength == 0.0 {
                return Err(Error::Parse(
                    "builtin strength must be finite and nonzero".into(),
                ));
            }
            return match name.trim() {
                "inv_log" => Ok(Potential::InvLog { strength }),
                "log" => Ok(Potential::Log { strength }),
                other => Err(Error::Parse(format!("unknown builtin `{other}`"))),
            };
        }
        Err(Error::Parse(format!(
            "unrecognized potential literal `{s}`"
        )))
    }

    /// Canonical literal that reparses to an equal potential.
    pub fn to_literal(&self) -> String {
        match self {
            Potential::PowerSum(spec) => {
                serde_json::to_string(spec.terms()).expect("serializable terms")
            }
            Potential::InvLog { strength } => format!("inv_log:{strength}"),
            Potential::Log { strength } => format!("log:{strength}"),
        }
    }

    pub fn as_power_sum(&self) -> Option<&PotentialSpec> {
        match self {
            Potential::PowerSum(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn evaluate(&self, r: f64) -> Result<f64> {
        match self {
            Potential::PowerSum(spec) => spec.evaluate(r),
            Potential::InvLog { strength } => {
                require_positive_r(r)?;
                finite_or_overflow(strength / r.ln(), r)
            }
            Potential::Log { strength } => {
                require_positive_r(r)?;
                Ok(strength * r.ln())
            }
        }
    }

    pub fn derivative(&self, r: f64) -> Result<f64> {
        match self {
            Potential::PowerSum(spec) => spec.derivative(r),
            Potential::InvLog { strength } => {
                require_positive_r(r)?;
                let ln_r = r.ln();
                finite_or_overflow(-strength / (r * ln_r * ln_r), r)
            }
            Potential::Log { strength } => {
                require_positive_r(r)?;
                Ok(strength / r)
            }
        }
    }

    pub fn second_derivative(&self, r: f64) -> Result<f64> {
        match self {
            Potential::PowerSum(spec) => spec.second_derivative(r),
            Potential::InvLog { strength } => {
                require_positive_r(r)?;
                let ln_r = r.ln();
                // d/dr [-s / (r ln^2 r)] = s (ln r + 2) / (r^2 ln^3 r)
                finite_or_overflow(strength * (ln_r + 2.0) / (r * r * ln_r.powi(3)), r)
            }
            Potential::Log { strength } => {
                require_positive_r(r)?;
                Ok(-strength / (r * r))
            }
        }
    }

    pub fn classify(&self) -> PotentialClass {
        match self {
            Potential::PowerSum(spec) => spec.classify(),
            Potential::InvLog { .. } => PotentialClass {
                regime: Regime::Vanishing,
                n_index: NIndex::Marginal,
                leading: None,
            },
            Potential::Log { .. } => PotentialClass {
                regime: Regime::Rising,
                n_index: NIndex::Marginal,
                leading: None,
            },
        }
    }

    /// Same potential with every coupling scaled by `t`; used for the
    /// branch-fixing coupling homotopy in phase extraction.
    pub fn scaled(&self, t: f64) -> Potential {
        match self {
            Potential::PowerSum(spec) => {
                let terms = spec
                    .terms()
                    .iter()
                    .map(|term| PowerTerm {
                        coefficient: t * term.coefficient,
                        exponent: term.exponent,
                    })
                    .collect();
                Potential::PowerSum(PotentialSpec::new(terms).expect("scaled terms stay valid"))
            }
            Potential::InvLog { strength } => Potential::InvLog {
                strength: t * strength,
            },
            Potential::Log { strength } => Potential::Log {
                strength: t * strength,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(terms: &[(f64, f64)]) -> PotentialSpec {
        PotentialSpec::new(
            terms
                .iter()
                .map(|&(c, p)| PowerTerm {
                    coefficient: c,
                    exponent: p,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((spec(&[(2.0, -1.0)]).evaluate(10.0).unwrap() - 0.2).abs() < 1e-15);
        assert!((spec(&[(1.0, 2.0)]).evaluate(3.0).unwrap() - 9.0).abs() < 1e-15);
        // 0.25 + 0.125 by hand
        let v = spec(&[(1.0, -1.0), (1.0, -1.5)]).evaluate(4.0).unwrap();
        assert!((v - 0.375).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        assert!((spec(&[(2.0, -1.0)]).derivative(2.0).unwrap() + 0.5).abs() < 1e-15);
        assert!((spec(&[(1.0, 2.0)]).derivative(3.0).unwrap() - 6.0).abs() < 1e-15);
        // -0.5 * 4^{-1.5}
        assert!((spec(&[(1.0, -0.5)]).derivative(4.0).unwrap() + 0.0625).abs() < 1e-15);
    }

    #[test]
    fn evaluate_rejects_nonpositive_r() {
        assert!(spec(&[(1.0, -1.0)]).evaluate(0.0).is_err());
        assert!(spec(&[(1.0, -1.0)]).evaluate(-2.0).is_err());
    }

    #[test]
    fn overflow_signals_error() {
        let s = spec(&[(1.0, 300.0)]);
        assert!(matches!(
            s.evaluate(1e10),
            Err(Error::EvaluationOverflow { .. })
        ));
    }

    #[test]
    fn leading_behavior_examples() {
        assert_eq!(
            spec(&[(3.0, -2.0), (1.0, -1.0)])
                .leading_behavior()
                .unwrap(),
            PowerTerm {
                coefficient: 1.0,
                exponent: -1.0
            }
        );
        assert_eq!(
            spec(&[(1.0, 2.0), (5.0, 0.5)]).leading_behavior().unwrap(),
            PowerTerm {
                coefficient: 1.0,
                exponent: 2.0
            }
        );
        assert_eq!(
            spec(&[(7.0, 0.0)]).leading_behavior().unwrap(),
            PowerTerm {
                coefficient: 7.0,
                exponent: 0.0
            }
        );
    }

    #[test]
    fn duplicate_exponents_merge_and_cancel() {
        let s = spec(&[(1.0, -1.0), (2.0, -1.0), (0.5, 2.0), (-0.5, 2.0)]);
        assert_eq!(s.terms().len(), 1);
        assert!((s.terms()[0].coefficient - 3.0).abs() < 1e-15);
    }

    #[test]
    fn classify_worked_examples() {
        let cases = [
            ((2.0, -1.0), Regime::Vanishing, NIndex::Finite(1)), // Coulomb
            ((1.0, -0.5), Regime::Vanishing, NIndex::Finite(2)), // 1/sqrt(r)
            ((1.0, -1.5), Regime::Vanishing, NIndex::Finite(0)), // 1/r^{3/2}
            ((1.0, 2.0), Regime::Rising, NIndex::Finite(1)),     // oscillator
            ((1.0, 2.0 / 3.0), Regime::Rising, NIndex::Finite(2)), // r^{2/3}
            ((1.0, 6.0), Regime::Rising, NIndex::Finite(0)),     // r^6
            ((7.0, 0.0), Regime::Constant, NIndex::Marginal),    // constant
        ];
        for ((c, p), regime, n) in cases {
            let cl = spec(&[(c, p)]).classify();
            assert_eq!(cl.regime, regime, "p = {p}");
            assert_eq!(cl.n_index, n, "p = {p}");
        }
    }

    #[test]
    fn classify_builtins_marginal() {
        let inv = Potential::parse("inv_log:1.5").unwrap();
        assert_eq!(inv.classify().regime, Regime::Vanishing);
        assert_eq!(inv.classify().n_index, NIndex::Marginal);
        let log = Potential::parse("log:0.5").unwrap();
        assert_eq!(log.classify().regime, Regime::Rising);
        assert_eq!(log.classify().n_index, NIndex::Marginal);
    }

    #[test]
    fn classify_free_is_short_range() {
        let cl = PotentialSpec::free().classify();
        assert_eq!(cl.regime, Regime::Vanishing);
        assert_eq!(cl.n_index, NIndex::Finite(0));
        assert!(cl.leading.is_none());
    }

    #[test]
    fn vanishing_condition_sweep() {
        // exhaustive sweep over p = -0.99 .. -0.01 in steps of 0.01:
        // the returned N must satisfy 1/(N+1) < -p <= 1/N exactly.
        for i in 1..100 {
            let p = -(i as f64) / 100.0;
            let cl = spec(&[(1.0, p)]).classify();
            let NIndex::Finite(n) = cl.n_index else {
                panic!("expected finite N for p = {p}")
            };
            let n = n as f64;
            let x = -p;
            assert!(
                1.0 / (n + 1.0) < x && x <= 1.0 / n + 1e-12,
                "p = {p}, N = {n}"
            );
        }
    }

    #[test]
    fn borderline_exponents_inclusive() {
        // p = -1/N classifies as N; p = 1/(N-1/2) classifies as N.
        assert_eq!(
            spec(&[(1.0, -1.0 / 3.0)]).classify().n_index,
            NIndex::Finite(3)
        );
        assert_eq!(
            spec(&[(1.0, 1.0 / 2.5)]).classify().n_index,
            NIndex::Finite(3)
        );
    }

    #[test]
    fn builtin_calculus() {
        let inv = Potential::parse("inv_log:2.0").unwrap();
        let r = 5.0;
        let h = 1e-6 * r;
        let fd = (inv.evaluate(r + h).unwrap() - inv.evaluate(r - h).unwrap()) / (2.0 * h);
        assert!((fd - inv.derivative(r).unwrap()).abs() < 1e-8);
        let fd2 = (inv.derivative(r + h).unwrap() - inv.derivative(r - h).unwrap()) / (2.0 * h);
        assert!((fd2 - inv.second_derivative(r).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn parse_roundtrip() {
        let p = Potential::parse(r#"[{"c":2.0,"p":-1.0},{"c":0.5,"p":-1.5}]"#).unwrap();
        let again = Potential::parse(&p.to_literal()).unwrap();
        assert_eq!(p, again);
        let b = Potential::parse("inv_log:1.25").unwrap();
        assert_eq!(b, Potential::parse(&b.to_literal()).unwrap());
        assert_eq!(Potential::parse("[]").unwrap(), Potential::free());
    }

    proptest! {
        #[test]
        fn classify_scale_invariant(c in prop::num::f64::NORMAL.prop_filter("nonzero", |c| *c != 0.0 && c.abs() < 1e100 && c.abs() > 1e-100),
                                    p in -3.0f64..3.0) {
            let a = spec(&[(1.0, p)]).classify();
            let b = spec(&[(c, p)]).classify();
            prop_assert_eq!(a.regime, b.regime);
            prop_assert_eq!(a.n_index, b.n_index);
        }

        #[test]
        fn classify_ignores_subleading(p in -3.0f64..3.0, dq in 0.1f64..2.0, c2 in -5.0f64..5.0) {
            prop_assume!(c2 != 0.0);
            let a = spec(&[(1.0, p)]).classify();
            let b = spec(&[(1.0, p), (c2, p - dq)]).classify();
            prop_assert_eq!(a.regime, b.regime);
            prop_assert_eq!(a.n_index, b.n_index);
        }

        #[test]
        fn derivative_matches_finite_differences(
            c in -10.0f64..10.0, p in -2.0f64..2.0, r in 0.1f64..100.0
        ) {
            prop_assume!(c.abs() > 1e-3);
            let s = spec(&[(c, p)]);
            let h = 1e-5 * r;
            let fd = (s.evaluate(r + h).unwrap() - s.evaluate(r - h).unwrap()) / (2.0 * h);
            let d = s.derivative(r).unwrap();
            let scale = d.abs().max(1e-12);
            prop_assert!((fd - d).abs() / scale < 1e-6);
        }
    }
}
