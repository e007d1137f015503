//! Exact rationals and the float-to-rational policy.
//!
//! Every probability that enters a measure, a correlation vector or the
//! simplex is a [`Rational`]. Floats only appear on the quantum side and are
//! converted at the boundary with [`RationalizationPolicy::rationalize`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"3/8"`, `"-2"`, `"0.375"` or `"1.5e-3"` exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad numerator in `{s}`")))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad denominator in `{s}`")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(num, den));
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("not a rational literal: `{s}`"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 4096 {
        return Err(bad());
    }
    let pow = Rational::from_integer(num_traits::pow(BigInt::from(10), scale.unsigned_abs() as usize));
    if scale >= 0 {
        value *= pow;
    } else {
        value /= pow;
    }
    Ok(if negative { -value } else { value })
}

/// How floats are turned into rationals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RationalizationPolicy {
    pub tolerance: f64,
    pub max_denominator: u64,
    /// Reject file floats whose decimal value is not reproduced exactly.
    pub strict: bool,
}

impl Default for RationalizationPolicy {
    fn default() -> Self {
        Self {
            tolerance: 1e-9,
            max_denominator: 1_000_000,
            strict: false,
        }
    }
}

impl RationalizationPolicy {
    pub fn new(tolerance: f64, max_denominator: u64, strict: bool) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::Parse(format!("tolerance must be positive, got {tolerance}")));
        }
        if max_denominator == 0 {
            return Err(Error::Parse("max denominator must be at least 1".into()));
        }
        Ok(Self {
            tolerance,
            max_denominator,
            strict,
        })
    }

    /// Nearest rational with denominator at most `max_denominator`, provided
    /// it lies within `tolerance` of `x`.
    pub fn rationalize(&self, x: f64) -> Result<Rational> {
        if !x.is_finite() {
            return Err(Error::NumericalFailure(format!("non-finite value {x}")));
        }
        let exact = Rational::from_float(x).expect("finite float");
        let best = best_approximation(&exact, &BigInt::from(self.max_denominator));
        let tol = Rational::from_float(self.tolerance).expect("finite tolerance");
        if (&best - &exact).abs() > tol {
            return Err(Error::NumericalFailure(format!(
                "{x} has no rational within {} with denominator <= {}",
                self.tolerance, self.max_denominator
            )));
        }
        Ok(best)
    }

    /// Converts a float read from an input file. In strict mode the float's
    /// shortest decimal form must equal its rationalization.
    pub fn from_file_float(&self, x: f64) -> Result<Rational> {
        let r = self.rationalize(x)?;
        if self.strict {
            let literal = parse_decimal(&format!("{x}"))?;
            if literal != r {
                return Err(Error::Parse(format!(
                    "strict mode: {x} is not an exact fraction with denominator <= {}",
                    self.max_denominator
                )));
            }
        }
        Ok(r)
    }
}

/// Best rational approximation with bounded denominator, via continued
/// fraction convergents and the final semiconvergent.
pub fn best_approximation(x: &Rational, max_den: &BigInt) -> Rational {
    let one = BigInt::one();
    let (mut p0, mut q0) = (BigInt::zero(), one.clone());
    let (mut p1, mut q1) = (one.clone(), BigInt::zero());
    let mut r = x.clone();
    loop {
        let a = r.floor().to_integer();
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            let t = (max_den - &q0).div_floor(&q1);
            let semi = Rational::new(&p0 + &t * &p1, &q0 + &t * &q1);
            let conv = Rational::new(p1, q1);
            return if (&semi - x).abs() < (&conv - x).abs() {
                semi
            } else {
                conv
            };
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = &r - Rational::from_integer(a);
        if frac.is_zero() {
            return Rational::new(p1, q1);
        }
        r = frac.recip();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3/8").unwrap(), rat(3, 8));
        assert_eq!(parse_rational(" -6/16 ").unwrap(), rat(-3, 8));
        assert_eq!(parse_rational("0.375").unwrap(), rat(3, 8));
        assert_eq!(parse_rational("2").unwrap(), rat(2, 1));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn display_is_lowest_terms() {
        assert_eq!(rat(6, 16).to_string(), "3/8");
        assert_eq!(rat(4, 4).to_string(), "1");
        assert_eq!(rat(0, 7).to_string(), "0");
        assert_eq!(rat(-7, 32).to_string(), "-7/32");
    }

    #[test]
    fn rationalizes_noisy_small_fractions() {
        let p = RationalizationPolicy::default();
        assert_eq!(p.rationalize(0.375 + 3e-16).unwrap(), rat(3, 8));
        assert_eq!(p.rationalize(1.0 / 3.0).unwrap(), rat(1, 3));
        assert_eq!(p.rationalize(-1e-17).unwrap(), rat(0, 1));
        assert_eq!(p.rationalize(3.0 / 32.0).unwrap(), rat(3, 32));
        assert!(p.rationalize(f64::NAN).is_err());
    }

    #[test]
    fn rejects_values_outside_tolerance() {
        let p = RationalizationPolicy::new(1e-9, 10, false).unwrap();
        assert!(p.rationalize(std::f64::consts::PI).is_err());
        assert_eq!(p.rationalize(0.7).unwrap(), rat(7, 10));
    }

    #[test]
    fn best_approximation_matches_known_pi_convergents() {
        let pi = Rational::from_float(std::f64::consts::PI).unwrap();
        assert_eq!(best_approximation(&pi, &BigInt::from(7)), rat(22, 7));
        assert_eq!(best_approximation(&pi, &BigInt::from(200)), rat(355, 113));
        // semiconvergent 311/99 beats 22/7 below 106
        assert_eq!(best_approximation(&pi, &BigInt::from(100)), rat(311, 99));
    }

    #[test]
    fn strict_mode_only_takes_exact_fractions() {
        let strict = RationalizationPolicy::new(1e-9, 1_000_000, true).unwrap();
        assert_eq!(strict.from_file_float(0.375).unwrap(), rat(3, 8));
        assert!(strict.from_file_float(0.3333333333).is_err());
        let lax = RationalizationPolicy::default();
        assert_eq!(lax.from_file_float(0.3333333333).unwrap(), rat(1, 3));
    }

    #[test]
    fn policy_validates_parameters() {
        assert!(RationalizationPolicy::new(0.0, 10, false).is_err());
        assert!(RationalizationPolicy::new(1e-9, 0, false).is_err());
    }
}
