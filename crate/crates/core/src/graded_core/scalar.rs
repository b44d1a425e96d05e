//! Exact scalars and the coefficient rings the engine is generic over.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn factorial(n: usize) -> Rational {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= BigInt::from(k);
    }
    Rational::from_integer(acc)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer string.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Height `max(|p|, |q|)` of a reduced fraction.
pub fn height(x: &Rational) -> BigInt {
    let n = x.numer().abs();
    let d = x.denom().abs();
    if n > d {
        n
    } else {
        d
    }
}

pub fn to_f64(x: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation with denominator at most `max_den`, by continued fractions.
pub fn rationalize(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1): (i128, i128) = (0, 1);
    let (mut k0, mut k1): (i128, i128) = (1, 0);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    Some(Rational::new(BigInt::from(h1), BigInt::from(k1)))
}

/// A commutative coefficient ring containing the rationals.
pub trait Coeff: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_rational(x: &Rational) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
    fn scale(&self, x: &Rational) -> Self {
        self.mul(&Self::from_rational(x))
    }
}

impl Coeff for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_rational(x: &Rational) -> Self {
        x.clone()
    }
    fn scale(&self, x: &Rational) -> Self {
        self * x
    }
}

/// Truncated polynomials in `eps` with rational coefficients, `Q[eps]/(eps^(N+1))`.
///
/// `order == None` marks an exact constant, which adopts the order of whatever it meets.
#[derive(Clone, Debug)]
pub struct EpsScalar {
    coeffs: Vec<Rational>,
    order: Option<usize>,
}

impl EpsScalar {
    pub fn new(mut coeffs: Vec<Rational>, order: usize) -> Self {
        coeffs.truncate(order + 1);
        let mut s = EpsScalar { coeffs, order: Some(order) };
        s.trim();
        s
    }

    pub fn constant(x: Rational) -> Self {
        let mut s = EpsScalar { coeffs: vec![x], order: None };
        s.trim();
        s
    }

    /// `a + b*eps` at the given truncation order.
    pub fn linear(a: Rational, b: Rational, order: usize) -> Self {
        Self::new(vec![a, b], order)
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(|| q(0))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    fn join(a: Option<usize>, b: Option<usize>) -> Option<usize> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        }
    }
}

impl PartialEq for EpsScalar {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl Coeff for EpsScalar {
    fn zero() -> Self {
        EpsScalar { coeffs: vec![], order: None }
    }
    fn one() -> Self {
        Self::constant(q(1))
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add(&self, other: &Self) -> Self {
        let order = Self::join(self.order, other.order);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs: Vec<Rational> = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        if let Some(o) = order {
            coeffs.truncate(o + 1);
        }
        let mut s = EpsScalar { coeffs, order };
        s.trim();
        s
    }
    fn mul(&self, other: &Self) -> Self {
        let order = Self::join(self.order, other.order);
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return EpsScalar { coeffs: vec![], order };
        }
        let mut n = self.coeffs.len() + other.coeffs.len() - 1;
        if let Some(o) = order {
            n = n.min(o + 1);
        }
        let mut coeffs = vec![q(0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] += a * b;
                }
            }
        }
        let mut s = EpsScalar { coeffs, order };
        s.trim();
        s
    }
    fn neg(&self) -> Self {
        EpsScalar { coeffs: self.coeffs.iter().map(|c| -c).collect(), order: self.order }
    }
    fn from_rational(x: &Rational) -> Self {
        Self::constant(x.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_square_vanishes_at_order_one() {
        let e = EpsScalar::linear(q(0), q(1), 1);
        assert!(e.mul(&e).is_zero());
        let e2 = EpsScalar::linear(q(0), q(1), 2);
        assert_eq!(e2.mul(&e2).coeff(2), q(1));
    }

    #[test]
    fn rationalize_recovers_small_fractions() {
        assert_eq!(rationalize(2.0 / 3.0, 100), Some(frac(2, 3)));
        assert_eq!(rationalize(-1.5, 100), Some(frac(-3, 2)));
        assert_eq!(rationalize(0.0, 10), Some(q(0)));
    }

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-2", "0", "-7/9"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("1/0"), None);
    }
}
