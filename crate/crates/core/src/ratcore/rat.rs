use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact signed rational in lowest terms with a positive denominator.
///
/// Zero is `0/1`. Text form is `a/b` or `a`; input need not be reduced,
/// output always is.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::arg("zero denominator"));
        }
        Ok(Rat(BigRational::new(num.into(), den)))
    }

    /// Panics on a zero denominator; for literals in code and tests.
    pub fn frac(num: i64, den: i64) -> Self {
        Rat::new(num, den).expect("nonzero denominator")
    }

    pub fn int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// `1 / base^exp`.
    pub fn inv_pow(base: u64, exp: u32) -> Self {
        Rat(BigRational::new(
            BigInt::one(),
            num_traits::pow(BigInt::from(base), exp as usize),
        ))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn denom_u64(&self) -> Option<u64> {
        self.0.denom().to_u64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::arg("reciprocal of zero"));
        }
        Ok(Rat(self.0.recip()))
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> Self {
        Rat(&self.0 * BigRational::from_integer(k.into()))
    }

    pub fn scale_u(&self, k: &BigUint) -> Self {
        self.scale(BigInt::from_biguint(Sign::Plus, k.clone()))
    }

    /// `self * other` is an integer when `other` is a multiple of the denominator.
    pub fn times_int(&self, k: &BigInt) -> Self {
        Rat(&self.0 * BigRational::from_integer(k.clone()))
    }

    /// Integer value if `self` is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    /// `self / other` as an integer when `other` divides `self` in Z.
    pub fn integer_ratio(&self, other: &Rat) -> Option<BigInt> {
        if other.is_zero() {
            return None;
        }
        let q = &self.0 / &other.0;
        q.is_integer().then(|| q.to_integer())
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }

    /// Least common multiple of the denominators of `values`.
    pub fn lcm_denoms<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
        values
            .into_iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
    }
}

impl From<BigRational> for Rat {
    fn from(r: BigRational) -> Self {
        Rat(r)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(text: &str, offset: usize) -> Result<BigInt> {
    let bytes = text.as_bytes();
    let digits_start = usize::from(matches!(bytes.first(), Some(b'+' | b'-')));
    if digits_start == bytes.len() {
        return Err(Error::parse(offset + digits_start, "expected digits"));
    }
    if let Some(bad) = bytes[digits_start..]
        .iter()
        .position(|b| !b.is_ascii_digit())
    {
        return Err(Error::parse(
            offset + digits_start + bad,
            format!("unexpected character {:?}", text[digits_start + bad..].chars().next().unwrap()),
        ));
    }
    text.parse::<BigInt>()
        .map_err(|e| Error::parse(offset, e.to_string()))
}

impl Rat {
    /// Parses `a/b` or `a`; `offset` shifts reported error positions so that
    /// callers embedding rationals in longer strings get absolute positions.
    pub fn parse_at(text: &str, offset: usize) -> Result<Self> {
        let text_trim = text.trim();
        let lead = text.len() - text.trim_start().len();
        let offset = offset + lead;
        match text_trim.split_once('/') {
            None => Ok(Rat::int(parse_int(text_trim, offset)?)),
            Some((n, d)) => {
                let num = parse_int(n, offset)?;
                let den = parse_int(d, offset + n.len() + 1)?;
                if den.is_zero() {
                    return Err(Error::parse(offset + n.len() + 1, "zero denominator"));
                }
                Ok(Rat(BigRational::new(num, den)))
            }
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Rat::parse_at(s, 0)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
        impl<'a, 'b> $trait<&'b Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'b Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let q: Rat = "6/-8".parse().unwrap();
        assert_eq!(q.to_string(), "-3/4");
        assert_eq!(q.denom(), &BigInt::from(4));
        assert_eq!(Rat::frac(0, 7).to_string(), "0");
        assert_eq!(Rat::frac(0, 7).denom(), &BigInt::from(1));
        assert_eq!("12/4".parse::<Rat>().unwrap().to_string(), "3");
    }

    #[test]
    fn parse_errors_carry_positions() {
        match "1/0".parse::<Rat>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 2),
            other => panic!("{other:?}"),
        }
        match "12/3x".parse::<Rat>() {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        assert!("".parse::<Rat>().is_err());
        assert!("/3".parse::<Rat>().is_err());
        assert!(Rat::parse_at("1/x", 10).is_err_and(|e| matches!(e, Error::Parse { position: 12, .. })));
    }

    #[test]
    fn arithmetic() {
        let a = Rat::frac(1, 2);
        let b = Rat::frac(1, 3);
        assert_eq!(&a + &b, Rat::frac(5, 6));
        assert_eq!(&a - &b, Rat::frac(1, 6));
        assert_eq!(&a * &b, Rat::frac(1, 6));
        assert_eq!(&a / &b, Rat::frac(3, 2));
        assert_eq!(Rat::frac(5, 6).integer_ratio(&Rat::frac(5, 12)), Some(BigInt::from(2)));
        assert_eq!(Rat::frac(5, 6).integer_ratio(&Rat::frac(1, 4)), None);
        assert_eq!(Rat::lcm_denoms(&[a, b, Rat::frac(3, 4)]), BigInt::from(12));
    }
}
