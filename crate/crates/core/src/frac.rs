//! Elements of Q/Z, read as roots of unity `exp(2 pi i num/den)`.

use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A reduced fraction `num/den` with `0 <= num < den` and `gcd(num, den) = 1`.
/// The group law is addition mod 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Frac1 {
    num: u64,
    den: u64,
}

impl Frac1 {
    pub const ZERO: Frac1 = Frac1 { num: 0, den: 1 };

    /// Reduces `num/den` mod 1. Panics if `den == 0`.
    pub fn new(num: i128, den: u64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let d = den as i128;
        let n = num.rem_euclid(d);
        let g = n.gcd(&d);
        Frac1 {
            num: (n / g) as u64,
            den: (d / g) as u64,
        }
    }

    pub fn from_bigint(num: &BigInt, den: u64) -> Self {
        let r = num.mod_floor(&BigInt::from(den));
        Self::new(r.to_i128().expect("residue fits"), den)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// True for the values `0` and `1/2`, i.e. the roots of unity `+1` and `-1`.
    pub fn is_sign(self) -> bool {
        self.den <= 2
    }

    /// `k * self` mod 1.
    pub fn scale(self, k: i64) -> Self {
        let k = (k as i128).rem_euclid(self.den as i128);
        Self::new(k * self.num as i128, self.den)
    }

    pub fn scale_big(self, k: &BigInt) -> Self {
        let k = k.mod_floor(&BigInt::from(self.den));
        let k = k.to_i128().expect("residue fits");
        Self::new(k * self.num as i128, self.den)
    }
}

impl Default for Frac1 {
    fn default() -> Self {
        Frac1::ZERO
    }
}

impl Add for Frac1 {
    type Output = Frac1;
    fn add(self, rhs: Frac1) -> Frac1 {
        let l = self.den.lcm(&rhs.den) as u128;
        let a = self.num as u128 * (l / self.den as u128);
        let b = rhs.num as u128 * (l / rhs.den as u128);
        let l = u64::try_from(l).expect("denominator overflow");
        Frac1::new(((a + b) % l as u128) as i128, l)
    }
}

impl AddAssign for Frac1 {
    fn add_assign(&mut self, rhs: Frac1) {
        *self = *self + rhs;
    }
}

impl Neg for Frac1 {
    type Output = Frac1;
    fn neg(self) -> Frac1 {
        Frac1::new(-(self.num as i128), self.den)
    }
}

impl Sub for Frac1 {
    type Output = Frac1;
    fn sub(self, rhs: Frac1) -> Frac1 {
        self + (-rhs)
    }
}

impl std::iter::Sum for Frac1 {
    fn sum<I: Iterator<Item = Frac1>>(iter: I) -> Frac1 {
        iter.fold(Frac1::ZERO, Add::add)
    }
}

impl fmt::Display for Frac1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl fmt::Debug for Frac1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Frac1 {
    type Err = Error;

    /// Strict parse: the string must already be reduced and in `[0, 1)`.
    /// `"0/1"` is the only spelling of zero; `"1/1"` and `"2/4"` are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedFraction(s.to_string());
        let (n, d) = s.split_once('/').ok_or_else(bad)?;
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(n) || !digits(d) {
            return Err(bad());
        }
        let num: u64 = n.parse().map_err(|_| bad())?;
        let den: u64 = d.parse().map_err(|_| bad())?;
        if den == 0 || num >= den || num.gcd(&den) != 1 {
            return Err(bad());
        }
        Ok(Frac1 { num, den })
    }
}

impl Serialize for Frac1 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Frac1 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All reduced fractions in `[0, 1)` with denominator at most `max_den`.
pub fn fractions_up_to(max_den: u64) -> Vec<Frac1> {
    let mut out = vec![Frac1::ZERO];
    for den in 2..=max_den {
        for num in 1..den {
            if num.gcd(&den) == 1 {
                out.push(Frac1 { num, den });
            }
        }
    }
    out
}
