//! Ground-ring coefficients: exact rationals, residues mod 2 and mod 4.

use std::fmt;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Tag for the coefficient ring a polynomial lives over.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum RingTag {
    /// Arbitrary-precision rationals; 2-locality is checked separately.
    Rational,
    /// Residues mod 2.
    Mod2,
    /// Residues mod 4.
    Mod4,
}

impl fmt::Display for RingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingTag::Rational => write!(f, "Q"),
            RingTag::Mod2 => write!(f, "Z/2"),
            RingTag::Mod4 => write!(f, "Z/4"),
        }
    }
}

/// A single coefficient, tagged by its ring.
///
/// Rational payloads are kept in lowest terms with positive denominator
/// (`BigRational` maintains this); residues lie in `{0,1}` resp. `{0,1,2,3}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Coeff {
    Q(BigRational),
    F2(u8),
    Z4(u8),
}

impl Coeff {
    pub fn ring(&self) -> RingTag {
        match self {
            Coeff::Q(_) => RingTag::Rational,
            Coeff::F2(_) => RingTag::Mod2,
            Coeff::Z4(_) => RingTag::Mod4,
        }
    }

    pub fn zero(ring: RingTag) -> Self {
        Coeff::from_int(0, ring)
    }

    pub fn one(ring: RingTag) -> Self {
        Coeff::from_int(1, ring)
    }

    pub fn from_int(n: i64, ring: RingTag) -> Self {
        match ring {
            RingTag::Rational => Coeff::Q(BigRational::from(BigInt::from(n))),
            RingTag::Mod2 => Coeff::F2((n.rem_euclid(2)) as u8),
            RingTag::Mod4 => Coeff::Z4((n.rem_euclid(4)) as u8),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Coeff::Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_zero(),
            Coeff::F2(r) | Coeff::Z4(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Q(r) => r.is_one(),
            Coeff::F2(r) | Coeff::Z4(r) => *r == 1,
        }
    }

    fn check(&self, other: &Coeff) {
        debug_assert_eq!(self.ring(), other.ring(), "coefficient ring mismatch");
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        self.check(other);
        match (self, other) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a + b),
            (Coeff::F2(a), Coeff::F2(b)) => Coeff::F2((a + b) % 2),
            (Coeff::Z4(a), Coeff::Z4(b)) => Coeff::Z4((a + b) % 4),
            _ => unreachable!(),
        }
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        self.check(other);
        match (self, other) {
            (Coeff::Q(a), Coeff::Q(b)) => Coeff::Q(a * b),
            (Coeff::F2(a), Coeff::F2(b)) => Coeff::F2((a * b) % 2),
            (Coeff::Z4(a), Coeff::Z4(b)) => Coeff::Z4((a * b) % 4),
            _ => unreachable!(),
        }
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Q(a) => Coeff::Q(-a),
            Coeff::F2(a) => Coeff::F2(*a),
            Coeff::Z4(a) => Coeff::Z4((4 - a) % 4),
        }
    }

    /// True iff the coefficient is a rational with odd denominator.
    pub fn is_2_integral(&self) -> bool {
        match self {
            Coeff::Q(r) => r.denom().is_odd(),
            _ => true,
        }
    }

    /// Reduce a 2-integral rational mod 2^k (k = 1 or 2).
    pub fn reduce_mod(&self, k: u8) -> Result<Coeff, Error> {
        let r = match self {
            Coeff::Q(r) => r,
            _ => return Err(Error::Internal("reduce_mod on a residue coefficient".into())),
        };
        if !r.denom().is_odd() {
            return Err(Error::NotTwoIntegral {
                monomial: String::new(),
            });
        }
        let modulus: i64 = 1 << k;
        let m = BigInt::from(modulus);
        let num = r.numer().mod_floor(&m);
        let den = r.denom().mod_floor(&m);
        // An odd residue d mod 4 satisfies d*d = 1 mod 8, so d is its own
        // inverse mod 4 (and mod 2 everything odd is 1).
        let inv = den.clone();
        let res = (num * inv).mod_floor(&m);
        let v = res.to_string().parse::<u8>().unwrap();
        Ok(match k {
            1 => Coeff::F2(v),
            2 => Coeff::Z4(v),
            _ => return Err(Error::InvalidArgument("reduce_mod expects k = 1 or 2".into())),
        })
    }

    /// Lift a residue to the corresponding small nonnegative rational.
    pub fn lift_to_rational(&self) -> Coeff {
        match self {
            Coeff::Q(r) => Coeff::Q(r.clone()),
            Coeff::F2(a) | Coeff::Z4(a) => Coeff::from_int(*a as i64, RingTag::Rational),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Q(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Q(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Coeff::F2(a) | Coeff::Z4(a) => write!(f, "{a}"),
        }
    }
}

/// Binomial coefficient C(n, 2) mod 2, for pushing integer scalars through
/// the power operation.
pub fn choose2_mod2(n: &BigInt) -> u8 {
    let m = BigInt::from(4);
    let r = n.mod_floor(&m).to_string().parse::<i64>().unwrap();
    // n(n-1)/2 mod 2 depends only on n mod 4: 0,0,1,1.
    ((r * (r - 1) / 2) % 2).unsigned_abs() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_lowest_terms() {
        let c = Coeff::from_ratio(2, 4);
        match &c {
            Coeff::Q(r) => {
                assert_eq!(r.numer(), &BigInt::from(1));
                assert_eq!(r.denom(), &BigInt::from(2));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn reduce_three_fifths_mod2() {
        // 3/5 = 3 * 5^{-1} = 1 mod 2.
        let c = Coeff::from_ratio(3, 5);
        assert_eq!(c.reduce_mod(1).unwrap(), Coeff::F2(1));
    }

    #[test]
    fn reduce_half_fails() {
        let c = Coeff::from_ratio(1, 2);
        assert!(c.reduce_mod(1).is_err());
    }

    #[test]
    fn reduce_mod4() {
        // 7/3 mod 4: 3^{-1} = 3 mod 4, so 7*3 = 21 = 1 mod 4.
        let c = Coeff::from_ratio(7, 3);
        assert_eq!(c.reduce_mod(2).unwrap(), Coeff::Z4(1));
        let c = Coeff::from_int(-1, RingTag::Rational);
        assert_eq!(c.reduce_mod(2).unwrap(), Coeff::Z4(3));
    }

    #[test]
    fn choose2() {
        for (n, want) in [(0i64, 0u8), (1, 0), (2, 1), (3, 1), (4, 0), (-1, 1), (-2, 1)] {
            assert_eq!(choose2_mod2(&BigInt::from(n)), want, "n={n}");
        }
    }
}
