//! Bigraded polynomials in the generators `t` (degree 1) and `s`
//! (degree 2), truncated above total degree `2n`. Truncation is built
//! into the type: every valuation space is trivial above degree `2n`,
//! which makes all the series appearing in the curved dictionary finite.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Monomial exponents `(a, b)` for `t^a s^b`; total degree is `a + 2b`.
pub type Exponents = (u32, u32);

#[derive(Clone, PartialEq, Eq)]
pub struct TsPoly {
    n: u32,
    terms: BTreeMap<Exponents, Scalar>,
}

impl TsPoly {
    pub fn zero(n: u32) -> Self {
        assert!(n >= 1, "context dimension must be positive");
        TsPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: u32) -> Self {
        TsPoly::monomial(n, 0, 0, Scalar::one())
    }

    pub fn t(n: u32) -> Self {
        TsPoly::monomial(n, 1, 0, Scalar::one())
    }

    pub fn s(n: u32) -> Self {
        TsPoly::monomial(n, 0, 1, Scalar::one())
    }

    pub fn monomial(n: u32, a: u32, b: u32, coeff: Scalar) -> Self {
        let mut p = TsPoly::zero(n);
        p.add_term(a, b, coeff);
        p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> Scalar {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    /// Terms in ascending `(total degree, s-power)` order, the canonical
    /// display and serialization order.
    pub fn terms_ordered(&self) -> Vec<(Exponents, Scalar)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        v.sort_by_key(|((a, b), _)| (a + 2 * b, *b));
        v
    }

    pub fn add_term(&mut self, a: u32, b: u32, coeff: Scalar) {
        if coeff.is_zero() || a + 2 * b > 2 * self.n {
            return;
        }
        let entry = self.terms.entry((a, b)).or_default();
        *entry += &coeff;
        if entry.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    pub fn scale(&self, c: &Scalar) -> TsPoly {
        if c.is_zero() {
            return TsPoly::zero(self.n);
        }
        TsPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (*k, v * c))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// The homogeneous component of total degree `k`.
    pub fn degree_component(&self, k: u32) -> TsPoly {
        TsPoly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|((a, b), _)| a + 2 * b == k)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + 2 * b).max().unwrap_or(0)
    }

    /// Re-truncates the polynomial into a different context dimension.
    pub fn in_context(&self, n: u32) -> TsPoly {
        let mut out = TsPoly::zero(n);
        for ((a, b), c) in &self.terms {
            out.add_term(*a, *b, c.clone());
        }
        out
    }

    fn check_context(&self, other: &TsPoly) {
        assert_eq!(
            self.n, other.n,
            "mixed polynomial contexts: n={} vs n={}",
            self.n, other.n
        );
    }

    /// `self^k` by repeated multiplication.
    pub fn pow(&self, k: u32) -> TsPoly {
        let mut acc = TsPoly::one(self.n);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Binomial series `self^exponent` for half-integer exponents, exact
    /// and truncated at degree `2n`. The base must have constant term 1.
    pub fn series_pow(&self, exp_num: i64, exp_den: i64) -> Result<TsPoly> {
        if exp_den != 1 && exp_den != 2 && exp_den != -1 && exp_den != -2 {
            return Err(Error::BadExponent);
        }
        if !self.coeff(0, 0).is_one() {
            return Err(Error::NonUnitConstantTerm);
        }
        let exponent = Rational::new(BigInt::from(exp_num), BigInt::from(exp_den));
        // (1 + x)^e = Σ C(e, j) x^j with x = self − 1; x has positive
        // degree, so the sum is finite after truncation.
        let mut x = self.clone();
        x.add_term(0, 0, -Scalar::one());
        let mut acc = TsPoly::one(self.n);
        let mut xpow = TsPoly::one(self.n);
        let mut coeff = Rational::one();
        for j in 1..=(2 * self.n) as i64 {
            xpow = &xpow * &x;
            if xpow.is_zero() {
                break;
            }
            // C(e, j) = C(e, j−1) · (e − j + 1)/j
            let factor = (&exponent - Rational::from(BigInt::from(j - 1)))
                / Rational::from(BigInt::from(j));
            coeff *= factor;
            if coeff.is_zero() {
                break;
            }
            acc = &acc + &xpow.scale(&Scalar::from_rational(coeff.clone()));
        }
        Ok(acc)
    }
}

/// Coefficient of `t^a s^b` in `log(1 + t + s)`:
/// `(−1)^{a+b+1} (a+b−1)! / (a! b!)`.
fn log_coeff(a: u32, b: u32) -> Rational {
    use crate::combinatorics::factorial;
    if a + b == 0 {
        return Rational::zero();
    }
    let num = factorial(a + b - 1);
    let den = factorial(a) * factorial(b);
    let sign = if (a + b) % 2 == 0 { -1 } else { 1 };
    Rational::new(num * BigInt::from(sign), den)
}

/// The homogeneous degree-`k` component of `log(1 + t + s)`, in context
/// `n`. Terms above degree `2n` are truncated away like any other
/// polynomial in the context.
pub fn log_component(n: u32, k: u32) -> TsPoly {
    let mut p = TsPoly::zero(n);
    for b in 0..=(k / 2) {
        let a = k - 2 * b;
        p.add_term(a, b, Scalar::from_rational(log_coeff(a, b)));
    }
    p
}

/// Components `f_1, …, f_{n+2}` of `log(1 + t + s)` in context `n`.
/// These generate the defining ideal of the invariant-valuation algebra
/// through `f_{n+1}` and `f_{n+2}`.
pub fn log_components(n: u32) -> Vec<TsPoly> {
    (1..=n + 2).map(|k| log_component(n, k)).collect()
}

/// Raw coefficient list of the degree-`k` component of `log(1 + t + s)`,
/// independent of any truncation context.
pub fn log_component_terms(k: u32) -> Vec<(Exponents, Rational)> {
    (0..=(k / 2))
        .map(|b| ((k - 2 * b, b), log_coeff(k - 2 * b, b)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

impl Add for &TsPoly {
    type Output = TsPoly;
    fn add(self, rhs: &TsPoly) -> TsPoly {
        self.check_context(rhs);
        let mut out = self.clone();
        for ((a, b), c) in &rhs.terms {
            out.add_term(*a, *b, c.clone());
        }
        out
    }
}

impl Sub for &TsPoly {
    type Output = TsPoly;
    fn sub(self, rhs: &TsPoly) -> TsPoly {
        self + &(-rhs)
    }
}

impl Neg for &TsPoly {
    type Output = TsPoly;
    fn neg(self) -> TsPoly {
        TsPoly {
            n: self.n,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }
}

impl Mul for &TsPoly {
    type Output = TsPoly;
    fn mul(self, rhs: &TsPoly) -> TsPoly {
        self.check_context(rhs);
        let cap = 2 * self.n;
        let mut out = TsPoly::zero(self.n);
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                let (a, b) = (a1 + a2, b1 + b2);
                if a + 2 * b > cap {
                    continue;
                }
                out.add_term(a, b, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Debug for TsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms_ordered()
            .iter()
            .map(|((a, b), c)| {
                let mono = match (a, b) {
                    (0, 0) => "1".to_string(),
                    (a, 0) if *a == 1 => "t".to_string(),
                    (a, 0) => format!("t^{a}"),
                    (0, b) if *b == 1 => "s".to_string(),
                    (0, b) => format!("s^{b}"),
                    (1, 1) => "t*s".to_string(),
                    (a, b) => format!(
                        "t{}*s{}",
                        if *a == 1 { String::new() } else { format!("^{a}") },
                        if *b == 1 { String::new() } else { format!("^{b}") }
                    ),
                };
                if mono == "1" {
                    format!("({c})")
                } else {
                    format!("({c})*{mono}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn sc(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(rat(n, d))
    }

    #[test]
    fn product_basics() {
        let n = 3;
        let t = TsPoly::t(n);
        let t2 = &t * &t;
        assert_eq!(t2, TsPoly::monomial(n, 2, 0, Scalar::one()));
        // Truncation above degree 2n: in context n=1, t²·t = 0.
        let t1 = TsPoly::t(1);
        let sq = &t1 * &t1;
        assert!((&sq * &t1).is_zero());
    }

    #[test]
    fn telescoping_product() {
        // (1 + t)(1 − t + t²) = 1 + t³ for n ≥ 2, by direct expansion.
        let n = 2;
        let mut a = TsPoly::one(n);
        a.add_term(1, 0, Scalar::one());
        let mut b = TsPoly::one(n);
        b.add_term(1, 0, -Scalar::one());
        b.add_term(2, 0, Scalar::one());
        let mut expected = TsPoly::one(n);
        expected.add_term(3, 0, Scalar::one());
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn log_components_small() {
        let n = 3;
        let f = log_components(n);
        assert_eq!(f.len(), (n + 2) as usize);
        // f₁ = t
        assert_eq!(f[0], TsPoly::t(n));
        // f₂ = s − t²/2
        let mut f2 = TsPoly::s(n);
        f2.add_term(2, 0, sc(-1, 2));
        assert_eq!(f[1], f2);
        // f₃ = t³/3 − t·s
        let mut f3 = TsPoly::monomial(n, 3, 0, sc(1, 3));
        f3.add_term(1, 1, sc(-1, 1));
        assert_eq!(f[2], f3);
    }

    /// Independent series oracle: evaluate log(1 + t + s) as
    /// Σ (−1)^{m+1}(t+s)^m/m by repeated multiplication and compare the
    /// homogeneous components with the closed form.
    #[test]
    fn log_components_match_series_oracle() {
        for n in 1..=5u32 {
            // Compute in a context wide enough to hold degree n+2.
            let big = n + 2;
            let mut x = TsPoly::t(big);
            x.add_term(0, 1, Scalar::one());
            let mut series = TsPoly::zero(big);
            let mut xpow = TsPoly::one(big);
            for m in 1..=(2 * big) as i64 {
                xpow = &xpow * &x;
                let c = Scalar::from_rational(rat(if m % 2 == 1 { 1 } else { -1 }, m));
                series = &series + &xpow.scale(&c);
            }
            for k in 1..=n + 2 {
                let expected = series.degree_component(k).in_context(n);
                assert_eq!(log_component(n, k), expected, "degree {k} at n={n}");
            }
        }
    }

    /// exp(Σ f_i) reconstructed by the exponential series equals 1 + t + s
    /// up to degree n + 2.
    #[test]
    fn exp_of_log_components_recovers_argument() {
        for n in 1..=6u32 {
            let big = n + 2; // wide enough context for degree n+2
            let mut f_sum = TsPoly::zero(big);
            for k in 1..=n + 2 {
                f_sum = &f_sum + &log_component(big, k);
            }
            // Degrees above n+2 of the log series are deliberately missing,
            // so compare only up to n+2.
            let mut exp = TsPoly::one(big);
            let mut pow = TsPoly::one(big);
            let mut fact = Scalar::one();
            for m in 1..=(2 * big) as i64 {
                pow = &pow * &f_sum;
                fact = &fact * &sc(m, 1);
                exp = &exp + &pow.scale(&fact.inverse().unwrap());
            }
            for k in 0..=n + 2 {
                let got = exp.degree_component(k);
                let expected = match k {
                    0 => TsPoly::one(big),
                    1 => TsPoly::t(big),
                    2 => TsPoly::s(big),
                    _ => TsPoly::zero(big),
                };
                assert_eq!(got, expected, "exp∘log degree {k} at n={n}");
            }
        }
    }

    #[test]
    fn sqrt_series_examples() {
        // (1 − λs)^{1/2} at λ = 0 is 1.
        let base = TsPoly::one(2);
        assert_eq!(base.series_pow(1, 2).unwrap(), TsPoly::one(2));
        // (1 − s)^{1/2} at n = 2 is 1 − s/2 − s²/8, the binomial series.
        let mut base = TsPoly::one(2);
        base.add_term(0, 1, -Scalar::one());
        let mut expected = TsPoly::one(2);
        expected.add_term(0, 1, sc(-1, 2));
        expected.add_term(0, 2, sc(-1, 8));
        assert_eq!(base.series_pow(1, 2).unwrap(), expected);
    }

    #[test]
    fn sqrt_series_squares_back() {
        for n in 1..=4u32 {
            let mut p = TsPoly::one(n);
            p.add_term(1, 0, sc(2, 3));
            p.add_term(0, 1, sc(-1, 2));
            let r = p.series_pow(1, 2).unwrap();
            assert_eq!(&r * &r, p);
        }
    }

    #[test]
    fn series_pow_rejects_bad_input() {
        let p = TsPoly::t(2); // constant term 0
        assert!(p.series_pow(1, 2).is_err());
        let q = TsPoly::one(2);
        assert!(q.series_pow(1, 3).is_err());
    }

    fn arb_poly(n: u32) -> impl Strategy<Value = TsPoly> {
        let term = (0u32..=4, 0u32..=2, -4i64..=4, 1i64..=4);
        proptest::collection::vec(term, 0..6).prop_map(move |terms| {
            let mut p = TsPoly::zero(n);
            for (a, b, num, den) in terms {
                p.add_term(a, b, sc(num, den));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn mul_commutative_and_associative(a in arb_poly(3), b in arb_poly(3), c in arb_poly(3)) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn mul_distributes(a in arb_poly(2), b in arb_poly(2), c in arb_poly(2)) {
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn series_pow_additive_in_exponent(a in arb_poly(3)) {
            let mut base = TsPoly::one(3);
            // force constant term 1 and strictly positive degree elsewhere
            for ((x, y), c) in a.terms_ordered() {
                if (x, y) != (0, 0) {
                    base.add_term(x, y, c);
                }
            }
            // exponent pairs (1/2, 1/2), (1/2, −1/2), (3/2, −1) as half-integers
            let h = base.series_pow(1, 2).unwrap();
            let hm = base.series_pow(-1, 2).unwrap();
            let th = base.series_pow(3, 2).unwrap();
            let one = base.series_pow(1, 1).unwrap();
            prop_assert_eq!(&h * &h, one.clone());
            prop_assert_eq!(&h * &hm, TsPoly::one(3));
            prop_assert_eq!(&th, &(&one * &h));
        }
    }
}
