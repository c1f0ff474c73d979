//! Exact rational parameters.
//!
//! Every tolerance that decides a verdict (δ, δ′, σ, η, ε, slack) is carried
//! as a `Ratio<i128>` and compared by cross-multiplication, so verdicts never
//! depend on floating point rounding.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Ratio<i128>;

/// Parses `"0.2"`, `"1/5"`, `"3"` or `"-0.125"` into an exact rational.
///
/// Decimal strings are read digit by digit, so `"0.2"` is exactly `1/5`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 30 {
        return Err(Error::Parse(format!("too many decimal digits in {s:?}")));
    }
    let int_value: i128 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let scale = 10i128.pow(frac_part.len() as u32);
    let frac_value: i128 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let numer = int_value.checked_mul(scale).and_then(|v| v.checked_add(frac_value)).ok_or_else(bad)?;
    let r = Rational::new(numer, scale);
    Ok(if negative { -r } else { r })
}

/// Checks `0 < r <= 1`.
pub fn require_unit_interval(name: &str, r: Rational) -> Result<()> {
    if r <= Rational::zero() || r > Rational::one() {
        return Err(Error::InvalidArgument(format!("{name} must lie in (0, 1], got {r}")));
    }
    Ok(())
}

pub fn to_f64(r: Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

/// `⌈r⌉` for rationals.
pub fn ceil_int(r: Rational) -> i128 {
    let (q, rem) = r.numer().div_mod_floor(r.denom());
    if rem.is_zero() {
        q
    } else {
        q + 1
    }
}

/// `⌊r⌋` for rationals.
pub fn floor_int(r: Rational) -> i128 {
    r.numer().div_floor(r.denom())
}

/// A rational no larger than `x`, within `1/den` of it.
///
/// Used where a real constant (for instance ε/8π) must be replaced by a
/// rational that errs on the conservative side.
pub fn rational_below(x: f64, den: i128) -> Rational {
    let scaled = (x * den as f64).floor() as i128 - 1;
    Rational::new(scaled, den)
}

/// `x ∼_δ y`, that is `(1-δ)y <= x <= (1+δ)y`, evaluated exactly.
pub fn sim(x: Rational, y: Rational, delta: Rational) -> bool {
    let one = Rational::one();
    (one - delta) * y <= x && x <= (one + delta) * y
}

/// `|x - y| / y`, or zero when both vanish; `None` when only `y` vanishes.
pub fn relative_deviation(x: Rational, y: Rational) -> Option<Rational> {
    if y.is_zero() {
        return if x.is_zero() { Some(Rational::zero()) } else { None };
    }
    Some(((x - y) / y).abs())
}

/// Serializes a rational as the string `"p/q"` (or `"p"` when `q = 1`).
pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_strings_are_exact() {
        assert_eq!(parse_rational("0.2").unwrap(), Rational::new(1, 5));
        assert_eq!(parse_rational("0.0169").unwrap(), Rational::new(169, 10000));
        assert_eq!(parse_rational("1").unwrap(), Rational::one());
        assert_eq!(parse_rational(".5").unwrap(), Rational::new(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), Rational::new(-1, 8));
        assert_eq!(parse_rational("1/10").unwrap(), Rational::new(1, 10));
    }

    #[test]
    fn garbage_is_rejected() {
        for s in ["", "abc", "1/0", "0.2.3", "1e-3", "-", "."] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn sim_is_inclusive() {
        let d = Rational::new(1, 5);
        assert!(sim(Rational::from(12), Rational::from(10), d));
        assert!(sim(Rational::from(8), Rational::from(10), d));
        assert!(!sim(Rational::new(121, 10), Rational::from(10), d));
    }

    #[test]
    fn rounding_helpers() {
        assert_eq!(ceil_int(Rational::new(16, 5)), 4);
        assert_eq!(ceil_int(Rational::from(3)), 3);
        assert_eq!(floor_int(Rational::new(-1, 2)), -1);
        let r = rational_below(1.0 / (8.0 * std::f64::consts::PI), 1_000_000_000);
        assert!(to_f64(r) < 1.0 / (8.0 * std::f64::consts::PI));
    }
}
