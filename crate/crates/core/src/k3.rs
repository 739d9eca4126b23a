//! K3-local invariants J(v): Mukai pairing, Euler characteristics of Hilbert
//! schemes via the 24th-power eta-style product, the primitive-class value
//! and the multiple cover divisor sum.

use crate::rational::{rat_int, Rat};
use num::{BigInt, Zero};

/// A Mukai vector (r, m·c₁(L), n) on a K3 surface with Pic = ℤ·L and
/// L² = 2d − 2, so β² = m²(2d − 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MukaiVector {
    pub r: i64,
    pub m: i64,
    pub d: i64,
    pub n: i64,
}

impl MukaiVector {
    pub fn new(r: i64, m: i64, d: i64, n: i64) -> Self {
        MukaiVector { r, m, d, n }
    }

    /// Largest k dividing all three components (gcd(0, x) = x).
    pub fn divisibility(&self) -> i64 {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a % b)
            }
        }
        gcd(gcd(self.r, self.m), self.n)
    }

    pub fn divide(&self, k: i64) -> MukaiVector {
        MukaiVector {
            r: self.r / k,
            m: self.m / k,
            d: self.d,
            n: self.n / k,
        }
    }
}

/// (v₁, v₂) = β₁·β₂ − r₁n₂ − r₂n₁, with β·β' = m m'(2d − 2).
pub fn mukai_pairing(v1: &MukaiVector, v2: &MukaiVector) -> i64 {
    assert_eq!(v1.d, v2.d, "Mukai vectors must share the lattice");
    v1.m * v2.m * (2 * v1.d - 2) - v1.r * v2.n - v2.r * v1.n
}

/// χ(Hilb⁰(S)) .. χ(Hilb^D(S)) from ∏_{m≥1} (1 − q^m)^{−24}, computed by the
/// standard recurrence over the 24 geometric-series factors.
pub fn gottsche_coeffs(max_d: usize) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); max_d + 1];
    coeffs[0] = BigInt::from(1);
    for m in 1..=max_d {
        for _ in 0..24 {
            // Multiply by 1/(1 − q^m) in place: prefix sums with stride m.
            for i in m..=max_d {
                let prev = coeffs[i - m].clone();
                coeffs[i] += prev;
            }
        }
    }
    coeffs
}

/// Independent oracle: expand ∏ (1 − q^m)^{−24} by naive polynomial
/// multiplication of each factor's binomial series.
pub fn gottsche_coeffs_naive(max_d: usize) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::zero(); max_d + 1];
    coeffs[0] = BigInt::from(1);
    for m in 1..=max_d {
        // (1 − q^m)^{−24} = Σ_j C(j + 23, 23) q^{m j}.
        let mut factor = vec![BigInt::zero(); max_d + 1];
        let mut j = 0usize;
        while m * j <= max_d {
            let mut c = BigInt::from(1);
            for i in 1..=23u64 {
                c = c * BigInt::from(j as u64 + i) / BigInt::from(i);
            }
            factor[m * j] = c;
            j += 1;
        }
        let mut next = vec![BigInt::zero(); max_d + 1];
        for (i, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in factor.iter().enumerate() {
                if i + k > max_d {
                    break;
                }
                next[i + k] += a * b;
            }
        }
        coeffs = next;
    }
    coeffs
}

fn chi_hilb(index: i64) -> Rat {
    if index < 0 {
        // Empty moduli: no value is claimed here, so this term contributes
        // nothing. Callers surface a warning.
        return Rat::zero();
    }
    let coeffs = gottsche_coeffs(index as usize);
    Rat::from_integer(coeffs[index as usize].clone())
}

/// Whether any divisor-sum term of J(v) hits a negative Hilbert index.
pub fn j_value_has_negative_index(v: &MukaiVector) -> bool {
    let div = v.divisibility().max(1);
    (1..=div)
        .filter(|k| div % k == 0)
        .any(|k| mukai_pairing(&v.divide(k), &v.divide(k)) / 2 + 1 < 0)
}

/// J(v) = Σ_{k | v} (1/k²) χ(Hilb^{(v/k, v/k)/2 + 1}); the k = 1 term alone
/// for primitive v.
pub fn j_value(v: &MukaiVector) -> Rat {
    let div = v.divisibility().max(1);
    let mut total = Rat::zero();
    for k in 1..=div {
        if div % k != 0 {
            continue;
        }
        let w = v.divide(k);
        let index = mukai_pairing(&w, &w) / 2 + 1;
        total += chi_hilb(index) / rat_int(k * k);
    }
    total
}

/// Exact primality by trial division; ample at desk scale.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// J(0, p·c₁(L), 0) = χ(Hilb^{(d−1)p²+1}) + (1/p²) χ(Hilb^d) for prime p.
pub fn j_prime_case(d: i64, p: u64) -> Rat {
    assert!(is_prime(p), "multiplicity must be prime");
    assert!(d >= 1);
    let p = p as i64;
    chi_hilb((d - 1) * p * p + 1) + chi_hilb(d) / rat_int(p * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn pairing_examples() {
        let v = MukaiVector::new(0, 1, 2, 0);
        assert_eq!(mukai_pairing(&v, &v), 2);
        let w = MukaiVector::new(0, 2, 2, 0);
        assert_eq!(mukai_pairing(&w, &w), 8);
        // r = 0 on both sides: pairing reduces to β₁·β₂.
        let a = MukaiVector::new(0, 2, 3, 5);
        let b = MukaiVector::new(0, 3, 3, -1);
        assert_eq!(mukai_pairing(&a, &b), 2 * 3 * 4);
    }

    #[test]
    fn gottsche_prefix() {
        let c = gottsche_coeffs(5);
        let expect: Vec<BigInt> = [1, 24, 324, 3200, 25650, 176256]
            .iter()
            .map(|&x| BigInt::from(x))
            .collect();
        assert_eq!(c, expect);
    }

    #[test]
    fn gottsche_matches_naive_oracle() {
        assert_eq!(gottsche_coeffs(12), gottsche_coeffs_naive(12));
    }

    #[test]
    fn j_value_examples() {
        // Primitive with (v,v) = 2.
        let v = MukaiVector::new(0, 1, 2, 0);
        assert_eq!(j_value(&v), rat_int(324));
        // (0, c₁(L), 1): (v,v)/2 + 1 = d.
        for d in 1..=4 {
            let v = MukaiVector::new(0, 1, d, 1);
            let idx = (mukai_pairing(&v, &v) / 2 + 1) as usize;
            assert_eq!(idx as i64, d);
            assert_eq!(
                j_value(&v),
                Rat::from_integer(gottsche_coeffs(idx)[idx].clone())
            );
        }
        // Divisible by 2: two-term sum.
        let v = MukaiVector::new(0, 2, 1, 0);
        assert_eq!(v.divisibility(), 2);
        assert_eq!(j_value(&v), rat_int(24) + rat(24, 4));
    }

    #[test]
    fn j_prime_examples() {
        assert_eq!(j_prime_case(2, 2), rat_int(176337));
        for p in [2u64, 3, 5] {
            assert_eq!(
                j_prime_case(1, p),
                rat_int(24) * (Rat::from_integer(1.into()) + rat(1, (p * p) as i64))
            );
        }
        for d in 1..=4 {
            for p in [2u64, 3] {
                assert_eq!(
                    j_prime_case(d, p),
                    j_value(&MukaiVector::new(0, p as i64, d, 0)),
                    "d={d} p={p}"
                );
            }
        }
    }

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&x| is_prime(x)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn negative_index_flag() {
        // r ≠ 0 can push (v,v)/2 + 1 negative; the term is dropped.
        let v = MukaiVector::new(1, 0, 2, 3);
        assert!(j_value_has_negative_index(&v));
        assert_eq!(j_value(&v), Rat::zero());
    }
}
