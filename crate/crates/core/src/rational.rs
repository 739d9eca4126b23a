//! Exact rational arithmetic. All invariant values live in `Rat`; the engine
//! contains no floating point anywhere.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Zero};
use std::str::FromStr;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (guaranteed by `num_rational::Ratio`).
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// (-1)^k as a rational.
pub fn sign_pow(k: u64) -> Rat {
    if k % 2 == 0 {
        Rat::one()
    } else {
        -Rat::one()
    }
}

/// Parse "p/q" or "p" (exact, no floats).
pub fn parse_rat(s: &str) -> Result<Rat> {
    Rat::from_str(s.trim()).map_err(|e| Error::InvalidConfig(format!("bad rational {s:?}: {e}")))
}

pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// Generalized binomial coefficient C(e, j) for rational e.
pub fn binomial_rat(e: &Rat, j: u64) -> Rat {
    let mut num = Rat::one();
    for i in 0..j {
        num *= e - rat_int(i as i64);
    }
    let mut fact = Rat::one();
    for i in 1..=j {
        fact *= rat_int(i as i64);
    }
    num / fact
}

/// True iff `r` is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

pub fn rat_is_zero(r: &Rat) -> bool {
    r.is_zero()
}
