//! Exact rational scalars.
//!
//! Every matrix entry, stoichiometric coefficient, and kinetic order in this
//! crate is a [`Rat`] (an arbitrary-precision fraction kept in lowest terms
//! with a positive denominator). Decimal literals in input files are converted
//! to exact fractions, so `0.36` is stored as `9/25` and survives any number
//! of eliminations without rounding.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Exact rational number: `BigInt` numerator over positive `BigInt` denominator,
/// always in lowest terms.
pub type Rat = BigRational;

/// Error produced when a token cannot be read as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid number `{text}`: {reason}")]
pub struct NumberError {
    pub text: String,
    pub reason: &'static str,
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for the fraction `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `2`, `-7`, `25/9`, `0.36`, or `-1.5` into an exact rational.
///
/// Decimals become fractions over a power of ten and are reduced, so the
/// conversion is exact. A slash form requires a positive denominator.
pub fn parse_rat(text: &str) -> Result<Rat, NumberError> {
    let err = |reason| NumberError {
        text: text.to_string(),
        reason,
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(err("empty"));
    }
    let (negative, body) = match trimmed.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, trimmed.strip_prefix('+').unwrap_or(trimmed)),
    };
    if body.is_empty() {
        return Err(err("sign without digits"));
    }

    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num).ok_or_else(|| err("bad numerator"))?;
        let den = parse_digits(den).ok_or_else(|| err("bad denominator"))?;
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Rat::new(num, den)
    } else if let Some((int_part, frac_part)) = body.split_once('.') {
        if frac_part.is_empty() {
            return Err(err("missing digits after decimal point"));
        }
        let int_part = if int_part.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int_part).ok_or_else(|| err("bad integer part"))?
        };
        let frac_digits = parse_digits(frac_part).ok_or_else(|| err("bad fractional part"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        Rat::new(int_part * &scale + frac_digits, scale)
    } else {
        Rat::from_integer(parse_digits(body).ok_or_else(|| err("bad digits"))?)
    };

    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::parse_bytes(s.as_bytes(), 10)
}

/// Nearest `f64` to the exact value.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Fixed six-decimal rendering used in JSON reports, e.g. `2.777778`.
pub fn decimal_string(r: &Rat) -> String {
    format!("{:.6}", rat_to_f64(r))
}

/// Compact exact rendering: `2`, `-7/3`, `9/25`.
pub fn rat_display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// True when all coordinates are strictly positive.
pub fn all_positive(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_become_exact_fractions() {
        assert_eq!(parse_rat("0.36").unwrap(), rat(9, 25));
        assert_eq!(parse_rat("9.4").unwrap(), rat(47, 5));
        assert_eq!(parse_rat("-1.5").unwrap(), rat(-3, 2));
        assert_eq!(parse_rat(".5").unwrap(), rat(1, 2));
    }

    #[test]
    fn fractions_and_integers() {
        assert_eq!(parse_rat("25/9").unwrap(), rat(25, 9));
        assert_eq!(parse_rat("-2/4").unwrap(), rat(-1, 2));
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
        assert_eq!(parse_rat("+3").unwrap(), rat_int(3));
    }

    #[test]
    fn rejects_malformed_numbers() {
        for bad in ["", "-", "1/0", "1/ 2", "a", "1.2.3", "1.", "--2", "1/-2"] {
            assert!(parse_rat(bad).is_err(), "expected error for {bad:?}");
        }
    }

    #[test]
    fn decimal_rendering_rounds_to_six_places() {
        assert_eq!(decimal_string(&rat(25, 9)), "2.777778");
        assert_eq!(decimal_string(&rat(125, 423)), "0.295508");
        assert_eq!(decimal_string(&rat_int(1)), "1.000000");
    }

    #[test]
    fn display_round_trips_through_parse() {
        for r in [rat(9, 25), rat_int(-4), rat(-7, 3)] {
            assert_eq!(parse_rat(&rat_display(&r)).unwrap(), r);
        }
    }
}
