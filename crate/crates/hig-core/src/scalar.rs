//! Exact coefficient field: rational functions in a single transcendental
//! symbol `Π` (standing for π) with arbitrary-precision rational
//! coefficients.
//!
//! A [`Scalar`] is kept in the canonical form `Π^shift · num/den` where
//! `num` and `den` are coprime polynomials in `Π` with nonzero constant
//! term and `den` is monic. Equality of canonical forms is therefore
//! syntactic equality of rational functions, which keeps every identity
//! check in the crate exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinatorics::{double_factorial, factorial};
use crate::error::Error;

/// Arbitrary-precision rational number, always reduced with positive
/// denominator.
pub type Rational = BigRational;

/// Convenience constructor for a small rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

// ---- dense univariate polynomials over Q ----

/// Polynomial in `Π` with rational coefficients, dense ascending order.
/// The coefficient vector never has trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PiPoly {
    coeffs: Vec<Rational>,
}

impl PiPoly {
    pub fn zero() -> Self {
        PiPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        PiPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = PiPoly { coeffs: vec![c] };
        p.trim();
        p
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = PiPoly { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Multiplicity of the root at zero: the smallest index with a
    /// nonzero coefficient. Zero polynomial reports 0.
    pub fn order(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(0)
    }

    /// Divides by `Π^k`; all coefficients below `k` must vanish.
    fn shift_down(&self, k: usize) -> PiPoly {
        debug_assert!(self.coeffs.iter().take(k).all(|c| c.is_zero()));
        PiPoly::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    fn scale(&self, c: &Rational) -> PiPoly {
        if c.is_zero() {
            return PiPoly::zero();
        }
        PiPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    fn mul(&self, other: &PiPoly) -> PiPoly {
        if self.is_zero() || other.is_zero() {
            return PiPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PiPoly::from_coeffs(out)
    }

    fn add(&self, other: &PiPoly) -> PiPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for i in 0..len {
            out.push(self.coeff(i) + other.coeff(i));
        }
        PiPoly::from_coeffs(out)
    }

    /// Euclidean division; panics on zero divisor.
    fn div_rem(&self, divisor: &PiPoly) -> (PiPoly, PiPoly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        if self.is_zero() || self.degree() < divisor.degree() {
            return (PiPoly::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let dlead = divisor.leading();
        let ddeg = divisor.degree();
        let mut quot = vec![Rational::zero(); rem.len() - ddeg];
        for i in (ddeg..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / &dlead;
            quot[i - ddeg] = q.clone();
            for (j, d) in divisor.coeffs.iter().enumerate() {
                let idx = i - ddeg + j;
                let sub = d * &q;
                rem[idx] -= sub;
            }
        }
        (PiPoly::from_coeffs(quot), PiPoly::from_coeffs(rem))
    }

    /// Monic greatest common divisor via the Euclidean algorithm.
    pub fn gcd(&self, other: &PiPoly) -> PiPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading();
        a.scale(&lead.recip())
    }

    fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            let cf = rational_to_f64(c);
            acc = acc * x + cf;
        }
        acc
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

impl fmt::Debug for PiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self, 0))
    }
}

fn format_poly(p: &PiPoly, shift: i64) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (i, c) in p.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + shift;
        let pow = match e {
            0 => String::new(),
            1 => "Pi".to_string(),
            _ => format!("Pi^{e}"),
        };
        let part = if pow.is_empty() {
            format!("{c}")
        } else if c.is_one() {
            pow
        } else if (-c).is_one() {
            format!("-{pow}")
        } else {
            format!("{c}*{pow}")
        };
        parts.push(part);
    }
    let mut out = String::new();
    for (i, part) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(part);
        } else if let Some(rest) = part.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(part);
        }
    }
    out
}

// ---- the scalar field ----

/// Element of the fraction field of Laurent polynomials `Q[Π, Π⁻¹]`.
///
/// Invariants: value is `Π^shift · num/den`; `num` and `den` have nonzero
/// constant terms, `den` is monic, `gcd(num, den) = 1`; zero is stored as
/// `shift = 0, num = 0, den = 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    shift: i64,
    num: PiPoly,
    den: PiPoly,
}

impl Scalar {
    fn make(shift: i64, num: PiPoly, den: PiPoly) -> Self {
        assert!(!den.is_zero(), "scalar with zero denominator");
        if num.is_zero() {
            return Scalar {
                shift: 0,
                num: PiPoly::zero(),
                den: PiPoly::one(),
            };
        }
        let mut shift = shift;
        let mut num = num;
        let mut den = den;
        // Move all Π factors into the shift.
        let nord = num.order();
        if nord > 0 {
            num = num.shift_down(nord);
            shift += nord as i64;
        }
        let dord = den.order();
        if dord > 0 {
            den = den.shift_down(dord);
            shift -= dord as i64;
        }
        let g = num.gcd(&den);
        if g.degree() > 0 {
            num = num.div_rem(&g).0;
            den = den.div_rem(&g).0;
        }
        let lead = den.leading();
        if !lead.is_one() {
            let inv = lead.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Scalar { shift, num, den }
    }

    pub fn zero() -> Self {
        Scalar {
            shift: 0,
            num: PiPoly::zero(),
            den: PiPoly::one(),
        }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::from_rational(Rational::from(BigInt::from(n)))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::make(0, PiPoly::constant(r), PiPoly::one())
    }

    /// `num/den` as a scalar; panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rational(rat(num, den))
    }

    /// `Π^e` for any integer `e`.
    pub fn pi_pow(e: i64) -> Self {
        Scalar::make(e, PiPoly::one(), PiPoly::one())
    }

    /// Builds `c · Π^e` from big-integer parts.
    pub fn monomial(c: Rational, e: i64) -> Self {
        Scalar::make(e, PiPoly::constant(c), PiPoly::one())
    }

    /// Constructs from Laurent numerator terms and polynomial denominator
    /// terms given as `(coefficient, power)` pairs.
    pub fn from_terms(num: &[(Rational, i64)], den: &[(Rational, i64)]) -> Result<Self, Error> {
        let build = |terms: &[(Rational, i64)]| -> (PiPoly, i64) {
            if terms.is_empty() {
                return (PiPoly::zero(), 0);
            }
            let min = terms.iter().map(|t| t.1).min().unwrap().min(0);
            let max = terms.iter().map(|t| t.1).max().unwrap();
            let mut coeffs = vec![Rational::zero(); (max - min + 1) as usize];
            for (c, p) in terms {
                coeffs[(p - min) as usize] += c;
            }
            (PiPoly::from_coeffs(coeffs), min)
        };
        let (np, ns) = build(num);
        let (dp, ds) = build(den);
        if dp.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::make(ns - ds, np, dp))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self == &Scalar::one()
    }

    /// Laurent terms `(coefficient, power)` of the numerator, ascending.
    pub fn numerator_terms(&self) -> Vec<(Rational, i64)> {
        self.num
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.clone(), i as i64 + self.shift))
            .collect()
    }

    /// Terms `(coefficient, power)` of the (monic, Π-free-order)
    /// denominator, ascending.
    pub fn denominator_terms(&self) -> Vec<(Rational, i64)> {
        self.den
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (c.clone(), i as i64))
            .collect()
    }

    /// The rational value when the scalar is free of `Π`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        if self.shift == 0 && self.num.degree() == 0 && self.den.degree() == 0 {
            Some(self.num.coeff(0))
        } else {
            None
        }
    }

    pub fn inverse(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar::make(-self.shift, self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Self, Error> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, Error> {
        if e == 0 {
            return Ok(Scalar::one());
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Numeric value with `Π ↦ π`, for display only.
    pub fn approx_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let pi = std::f64::consts::PI;
        pi.powi(self.shift as i32) * self.num.eval_f64(pi) / self.den.eval_f64(pi)
    }

    /// Total ordering for deterministic output; has no algebraic meaning.
    pub fn sort_key(&self) -> (i64, Vec<(BigInt, BigInt)>, Vec<(BigInt, BigInt)>) {
        let key = |p: &PiPoly| {
            p.coeffs()
                .iter()
                .map(|c| (c.numer().clone(), c.denom().clone()))
                .collect()
        };
        (self.shift, key(&self.num), key(&self.den))
    }
}

/// Volume of the `k`-dimensional Euclidean unit ball as an exact scalar:
/// `Π^{k/2}/(k/2)!` for even `k` and `Π^{(k-1)/2} 2^{(k+1)/2}/k!!` for
/// odd `k`.
pub fn omega(k: u32) -> Scalar {
    if k % 2 == 0 {
        let m = k / 2;
        Scalar::monomial(Rational::new(BigInt::one(), factorial(m)), m as i64)
    } else {
        let m = (k - 1) / 2;
        let num = BigInt::from(2).pow(m + 1);
        Scalar::monomial(
            Rational::new(num, double_factorial(k as i64)),
            m as i64,
        )
    }
}

/// `k!` as a scalar.
pub fn factorial_scalar(k: u32) -> Scalar {
    Scalar::from_rational(Rational::from(factorial(k)))
}

/// `k!!` as a scalar, with `(-1)!! = 0!! = 1`.
pub fn double_factorial_scalar(k: i64) -> Scalar {
    Scalar::from_rational(Rational::from(double_factorial(k)))
}

/// `C(n, k)` as a scalar.
pub fn binomial_scalar(n: u32, k: u32) -> Scalar {
    Scalar::from_rational(Rational::from(crate::combinatorics::binomial(n, k)))
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let num = format_poly(&self.num, self.shift);
        if self.den.degree() == 0 {
            write!(f, "{num}")
        } else {
            let needs_paren = self.num.coeffs().iter().filter(|c| !c.is_zero()).count() > 1;
            let den = format_poly(&self.den, 0);
            if needs_paren {
                write!(f, "({num})/({den})")
            } else {
                write!(f, "{num}/({den})")
            }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.sort_key().cmp(&other.sort_key()))
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let m = self.shift.min(rhs.shift);
        let a = shift_up(&self.num, (self.shift - m) as usize).mul(&rhs.den);
        let b = shift_up(&rhs.num, (rhs.shift - m) as usize).mul(&self.den);
        Scalar::make(m, a.add(&b), self.den.mul(&rhs.den))
    }
}

fn shift_up(p: &PiPoly, k: usize) -> PiPoly {
    if p.is_zero() || k == 0 {
        return p.clone();
    }
    let mut coeffs = vec![Rational::zero(); k];
    coeffs.extend(p.coeffs().iter().cloned());
    PiPoly::from_coeffs(coeffs)
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_zero() || rhs.is_zero() {
            return Scalar::zero();
        }
        Scalar::make(
            self.shift + rhs.shift,
            self.num.mul(&rhs.num),
            self.den.mul(&rhs.den),
        )
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            shift: self.shift,
            num: self.num.scale(&-Rational::one()),
            den: self.den.clone(),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

/// Panics on division by zero; use [`Scalar::checked_div`] when the
/// divisor is data-dependent.
impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("scalar division by zero")
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}
