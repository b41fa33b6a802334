//! Exact scalars and vectors.
//!
//! Every real quantity in this crate is a [`Rational`]; lengths are carried as
//! squared norms so they stay rational.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rational = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

pub fn rat_int(v: Int) -> Rational {
    Rational::from_integer(v)
}

/// Parses `"a/b"`, `"a"` or a finite decimal such as `"1.05"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse rational `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n = Int::from_str(n.trim()).map_err(|_| bad())?;
        let d = Int::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.trim_start().starts_with('-');
        let whole_abs = whole.trim_start_matches(['-', '+']);
        let whole_abs = if whole_abs.is_empty() { "0" } else { whole_abs };
        let digits = format!("{whole_abs}{frac}");
        let mut num = Int::from_str(&digits).map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(int(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    Int::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// `"num/den"`, with the denominator omitted when it is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Nearest integer, ties to even.
pub fn round_half_even(q: &Rational) -> Int {
    let floor = q.floor().to_integer();
    let frac = q - Rational::from_integer(floor.clone());
    let half = rat(1, 2);
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    }
}

pub fn floor(q: &Rational) -> Int {
    q.floor().to_integer()
}

pub fn ceil(q: &Rational) -> Int {
    q.ceil().to_integer()
}

/// Floor of the square root of a non-negative integer.
pub fn isqrt(v: &Int) -> Int {
    if v.sign() == Sign::Minus {
        return Int::zero();
    }
    v.sqrt()
}

/// Least common multiple of the denominators of `values` (one for an empty input).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Int {
    values
        .into_iter()
        .fold(Int::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a Int>) -> Int {
    values.into_iter().fold(Int::zero(), |acc, v| acc.gcd(v))
}

/// `base^exp` for a rational base and a non-negative exponent.
pub fn pow_rational(base: &Rational, exp: u32) -> Rational {
    num_traits::pow(base.clone(), exp as usize)
}

/// Exact test of `2^a >= x` for rational `a = u/v` (`v > 0`) and positive rational `x`.
///
/// Equivalent to `2^u >= x^v`.
pub fn two_pow_at_least(a: &Rational, x: &Rational) -> bool {
    assert!(x.is_positive(), "two_pow_at_least needs a positive bound");
    let v = a.denom().to_usize().expect("exponent denominator too large");
    let u = a.numer();
    let xv = num_traits::pow(x.clone(), v);
    let lhs = if u.is_negative() {
        let e = (-u).to_usize().expect("exponent too large");
        Rational::new(Int::one(), Int::one() << e)
    } else {
        let e = u.to_usize().expect("exponent too large");
        Rational::from_integer(Int::one() << e)
    };
    lhs >= xv
}

/// Smallest `u` such that `2^(u/den) >= x`, i.e. `ceil(den * log2 x)` computed exactly.
pub fn ceil_log2_scaled(x: &Rational, den: u32) -> i64 {
    assert!(x.is_positive());
    let approx = x.to_f64().map(f64::log2).unwrap_or(0.0) * den as f64;
    let mut u = approx.floor() as i64 - 2;
    let d = Int::from(den);
    while !two_pow_at_least(&Rational::new(Int::from(u), d.clone()), x) {
        u += 1;
    }
    while two_pow_at_least(&Rational::new(Int::from(u - 1), d.clone()), x) {
        u -= 1;
    }
    u
}

/// A rational `r` with `r <= sqrt(q)` and `sqrt(q) - r < 2^-bits * max(1, sqrt(q))`.
pub fn sqrt_floor_approx(q: &Rational, bits: u32) -> Rational {
    if !q.is_positive() {
        return Rational::zero();
    }
    let scale = Int::one() << bits;
    let scaled = q * Rational::from_integer(&scale * &scale);
    let root = isqrt(&scaled.floor().to_integer());
    Rational::new(root, scale)
}

/// Dense vector of rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalVector(pub Vec<Rational>);

impl RationalVector {
    pub fn zeros(dim: usize) -> Self {
        RationalVector(vec![Rational::zero(); dim])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        RationalVector(values.iter().map(|&v| rat(v, 1)).collect())
    }

    pub fn from_big_ints(values: &[Int]) -> Self {
        RationalVector(values.iter().cloned().map(Rational::from_integer).collect())
    }

    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }

    pub fn dot(&self, other: &Self) -> Rational {
        debug_assert_eq!(self.dim(), other.dim());
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn norm_sq(&self) -> Rational {
        self.dot(self)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RationalVector(self.0.iter().map(|a| a * c).collect())
    }

    pub fn scale_int(&self, c: &Int) -> Self {
        let c = Rational::from_integer(c.clone());
        self.scale(&c)
    }

    /// `self + c * other`
    pub fn add_scaled(&self, c: &Rational, other: &Self) -> Self {
        RationalVector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn add_scaled_int(&self, c: &Int, other: &Self) -> Self {
        self.add_scaled(&Rational::from_integer(c.clone()), other)
    }

    /// Appends extra coordinates.
    pub fn extended(&self, extra: impl IntoIterator<Item = Rational>) -> Self {
        let mut v = self.0.clone();
        v.extend(extra);
        RationalVector(v)
    }

    pub fn denominator_lcm(&self) -> Int {
        common_denominator(&self.0)
    }
}

impl Index<usize> for RationalVector {
    type Output = Rational;
    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

impl IndexMut<usize> for RationalVector {
    fn index_mut(&mut self, i: usize) -> &mut Rational {
        &mut self.0[i]
    }
}

impl Add for &RationalVector {
    type Output = RationalVector;
    fn add(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &RationalVector {
    type Output = RationalVector;
    fn sub(self, rhs: &RationalVector) -> RationalVector {
        RationalVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RationalVector {
    type Output = RationalVector;
    fn neg(self) -> RationalVector {
        RationalVector(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(format_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}
