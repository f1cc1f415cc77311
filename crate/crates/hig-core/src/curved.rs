//! Valuation algebras on the complex space forms of holomorphic
//! curvature `4λ`. Elements are stored by their flat preimage under the
//! isomorphism `t ↦ t√(1−λs)`, `s ↦ s`, so the quotient-ring machinery
//! is reused verbatim; the curved polynomial expression is materialized
//! only for display and for cross-checks.
//!
//! `λ` is an exact rational parameter, not a symbolic variable.
//! λ-independence statements are certified by multi-point evaluation
//! with an explicitly computed λ-degree bound.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::basis::{self, BasisFamily};
use crate::error::{Error, Result};
use crate::kinematic;
use crate::linalg::Matrix;
use crate::poly::TsPoly;
use crate::scalar::{factorial_scalar, omega, Rational, Scalar};
use crate::valuation::{pmax, Context, Valuation};

/// Element of the curved valuation algebra, stored by its flat
/// representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurvedValuation {
    lambda: Rational,
    flat: Valuation,
}

impl CurvedValuation {
    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    pub fn flat_rep(&self) -> &Valuation {
        &self.flat
    }

    pub fn n(&self) -> u32 {
        self.flat.n()
    }

    pub fn is_zero(&self) -> bool {
        self.flat.is_zero()
    }

    fn check(&self, other: &CurvedValuation) {
        assert_eq!(self.lambda, other.lambda, "mixed curvature parameters");
        assert_eq!(self.flat.n(), other.flat.n(), "context mismatch");
    }

    pub fn add(&self, other: &CurvedValuation) -> CurvedValuation {
        self.check(other);
        CurvedValuation {
            lambda: self.lambda.clone(),
            flat: self.flat.add(&other.flat),
        }
    }

    pub fn sub(&self, other: &CurvedValuation) -> CurvedValuation {
        self.check(other);
        CurvedValuation {
            lambda: self.lambda.clone(),
            flat: self.flat.sub(&other.flat),
        }
    }

    pub fn scale(&self, c: &Scalar) -> CurvedValuation {
        CurvedValuation {
            lambda: self.lambda.clone(),
            flat: self.flat.scale(c),
        }
    }

    /// Product in the curved algebra; by construction this is the flat
    /// product of the representatives.
    pub fn mul(&self, ctx: &Context, other: &CurvedValuation) -> CurvedValuation {
        self.check(other);
        CurvedValuation {
            lambda: self.lambda.clone(),
            flat: ctx.mul(&self.flat, &other.flat),
        }
    }

    /// Curved polynomial expression: the image of the flat representative
    /// under `t ↦ t√(1−λs)`, truncated at degree `2n`. Display only;
    /// equality of curved elements is equality of flat representatives.
    pub fn curved_expr(&self) -> TsPoly {
        substitute_t_power(self.flat.poly(), &self.lambda, 1)
    }
}

/// Applies `t^a ↦ t^a (1−λs)^{a·dir/2}` to every term (`dir = ±1`).
fn substitute_t_power(p: &TsPoly, lambda: &Rational, dir: i64) -> TsPoly {
    let n = p.n();
    let g = one_minus_lambda_s(n, lambda);
    let mut out = TsPoly::zero(n);
    for ((a, b), c) in p.terms_ordered() {
        let factor = g
            .series_pow(dir * a as i64, 2)
            .expect("base has constant term 1");
        let term = &TsPoly::monomial(n, a, b, c) * &factor;
        out = &out + &term;
    }
    out
}

/// `1 − λs` in context `n`.
pub fn one_minus_lambda_s(n: u32, lambda: &Rational) -> TsPoly {
    let mut g = TsPoly::one(n);
    g.add_term(0, 1, -Scalar::from_rational(lambda.clone()));
    g
}

/// Transport of a flat valuation into curvature `λ`; the inverse of
/// [`iso_pull`]. An algebra isomorphism.
pub fn iso_push(v: &Valuation, lambda: Rational) -> CurvedValuation {
    CurvedValuation {
        lambda,
        flat: v.clone(),
    }
}

pub fn iso_pull(cv: &CurvedValuation) -> Valuation {
    cv.flat.clone()
}

/// Reads a curved polynomial expression (in the curved generators) back
/// into a curved element by substituting `t ↦ t(1−λs)^{−1/2}` and
/// reducing.
pub fn from_curved_expr(ctx: &Context, expr: &TsPoly, lambda: Rational) -> CurvedValuation {
    let flat_poly = substitute_t_power(expr, &lambda, -1);
    CurvedValuation {
        lambda,
        flat: ctx.reduce(&flat_poly),
    }
}

/// The basis valuation `μ^λ_{k,q}`, evaluated from its curved dictionary
/// expression
/// `(1−λs) Σ_i (−1)^{i+q} C(i,q) Π^k/(ω_k (k−2i)!(2i)!) v^{k/2−i} u^i`
/// with `v = t²(1−λs)` and `u = 4s − v`, then pulled back.
pub fn mu_lambda(ctx: &Context, k: u32, q: u32, lambda: Rational) -> Result<CurvedValuation> {
    let n = ctx.n();
    if !BasisFamily::Mu.admissible(n, k, q) {
        return Err(Error::InadmissibleIndex(format!("mu_lambda({k},{q}) at n={n}")));
    }
    let g = one_minus_lambda_s(n, &lambda);
    let v = &TsPoly::monomial(n, 2, 0, Scalar::one()) * &g;
    let u = &TsPoly::monomial(n, 0, 1, Scalar::from_int(4)) - &v;
    let pi_k_over_omega = &Scalar::pi_pow(k as i64) / &omega(k);
    let mut acc = TsPoly::zero(n);
    for i in q..=k / 2 {
        let sign = if (i + q) % 2 == 0 { 1 } else { -1 };
        let c = &(&(&Scalar::from_int(sign) * &crate::scalar::binomial_scalar(i, q))
            * &pi_k_over_omega)
            / &(&factorial_scalar(k - 2 * i) * &factorial_scalar(2 * i));
        // v^{(k−2i)/2}: a plain power for even k, else t^{k−2i}·(1−λs)^{(k−2i)/2}.
        let m = k - 2 * i;
        let v_half = if m % 2 == 0 {
            v.pow(m / 2)
        } else {
            &TsPoly::monomial(n, m, 0, Scalar::one())
                * &g.series_pow(m as i64, 2).expect("constant term 1")
        };
        acc = &acc + &(&v_half * &u.pow(i)).scale(&c);
    }
    let expr = &g * &acc;
    Ok(from_curved_expr(ctx, &expr, lambda))
}

/// Coefficients of a curved element over the `μ^λ` basis, keyed by
/// `(k, q)`. Uses that the flat representative of `μ^λ_{kq}` is
/// `(1−λs)·μ_{kq}`, so dividing by the unit `1−λs` diagonalizes the
/// conversion to flat `μ` coordinates.
pub fn mu_lambda_coords(ctx: &Context, cv: &CurvedValuation) -> BTreeMap<(u32, u32), Scalar> {
    let inv = one_minus_lambda_s(ctx.n(), &cv.lambda)
        .series_pow(-1, 1)
        .expect("unit constant term");
    let shifted = ctx.reduce(&(cv.flat.poly() * &inv));
    basis::coeffs(ctx, &shifted, BasisFamily::Mu)
}

/// Rebuilds a curved element from `μ^λ` coefficients.
pub fn from_mu_lambda_coords(
    ctx: &Context,
    coords: &BTreeMap<(u32, u32), Scalar>,
    lambda: Rational,
) -> Result<CurvedValuation> {
    let mut acc = iso_push(&ctx.zero(), lambda.clone());
    for ((k, q), c) in coords {
        let e = mu_lambda(ctx, *k, *q, lambda.clone())?;
        acc = acc.add(&e.scale(c));
    }
    Ok(acc)
}

/// The normalized volume functional: it takes the value
/// `λ^{n−q}·n!/(Π^{n−q} q!)` on `μ^λ_{2q,q}` and vanishes on every
/// `μ^λ_{kq}` with `k > 2q`.
///
/// Derivation of the row: `μ^λ_{kq}` is the `λ`-globalization of
/// `Σ_i λ^i (q+i)!/(Π^i q!)·Δ_{k+2i,q+i}`, and the volume label
/// `Δ_{2n,n}` occurs in that sum only when `k = 2q`, at `i = n−q` with
/// the stated weight; the functional kills everything except the volume
/// label, and `⟨vol*, vol⟩ = 1` fixes the normalization.
pub fn vol_star(ctx: &Context, cv: &CurvedValuation) -> Scalar {
    let n = ctx.n();
    let coords = mu_lambda_coords(ctx, cv);
    let mut acc = Scalar::zero();
    for ((k, q), c) in coords {
        if k != 2 * q {
            continue;
        }
        let weight = vol_star_weight(n, q, &cv.lambda);
        acc += &(&weight * &c);
    }
    acc
}

fn vol_star_weight(n: u32, q: u32, lambda: &Rational) -> Scalar {
    let lam_pow = Scalar::from_rational(pow_rational(lambda, n - q));
    let num = &lam_pow * &factorial_scalar(n);
    let den = &Scalar::pi_pow((n - q) as i64) * &factorial_scalar(q);
    &num / &den
}

fn pow_rational(r: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// Normalized Poincaré pairing `⟨pd(a), b⟩ = ⟨vol*, a·b⟩`.
pub fn pd_lambda(ctx: &Context, a: &CurvedValuation, b: &CurvedValuation) -> Scalar {
    vol_star(ctx, &a.mul(ctx, b))
}

/// Tensor over `μ^λ ⊗ μ^λ`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurvedTensor {
    pub n: u32,
    pub lambda: Rational,
    pub terms: BTreeMap<((u32, u32), (u32, u32)), Scalar>,
}

impl CurvedTensor {
    pub fn is_swap_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(&(l, r), c)| self.terms.get(&(r, l)) == Some(c))
    }

    /// Coefficient table with the λ-dependence stripped, for comparison
    /// across different curvatures.
    pub fn coefficients(&self) -> &BTreeMap<((u32, u32), (u32, u32)), Scalar> {
        &self.terms
    }
}

/// All admissible `μ^λ` indices, ascending.
pub fn mu_indices(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for k in 0..=2 * n {
        for q in BasisFamily::Mu.indices(n, k) {
            out.push((k, q));
        }
    }
    out
}

/// Gram matrix of `pd_λ` on the `μ^λ` basis at a fixed curvature.
pub fn gram_lambda(ctx: &Context, lambda: &Rational) -> Result<Matrix> {
    let idx = mu_indices(ctx.n());
    let basis: Vec<CurvedValuation> = idx
        .iter()
        .map(|&(k, q)| mu_lambda(ctx, k, q, lambda.clone()))
        .collect::<Result<_>>()?;
    Ok(Matrix::from_fn(idx.len(), idx.len(), |i, j| {
        pd_lambda(ctx, &basis[i], &basis[j])
    }))
}

/// Curved kinematic coproduct by Gram inversion over the `μ^λ` basis.
pub fn kinematic_lambda(ctx: &Context, phi: &CurvedValuation) -> Result<CurvedTensor> {
    let n = ctx.n();
    let lambda = phi.lambda.clone();
    let idx = mu_indices(n);
    let basis: Vec<CurvedValuation> = idx
        .iter()
        .map(|&(k, q)| mu_lambda(ctx, k, q, lambda.clone()))
        .collect::<Result<_>>()?;
    let gram = Matrix::from_fn(idx.len(), idx.len(), |i, j| {
        pd_lambda(ctx, &basis[i], &basis[j])
    });
    let ginv = gram.inverse()?;
    let m = Matrix::from_fn(idx.len(), idx.len(), |i, j| {
        pd_lambda(ctx, &phi.mul(ctx, &basis[i]), &basis[j])
    });
    let c = &(&ginv * &m) * &ginv;
    let mut terms = BTreeMap::new();
    for (i, &bi) in idx.iter().enumerate() {
        for (j, &bj) in idx.iter().enumerate() {
            if !c[(i, j)].is_zero() {
                terms.insert((bi, bj), c[(i, j)].clone());
            }
        }
    }
    Ok(CurvedTensor { n, lambda, terms })
}

/// Certificate that the coefficients of `kinematic_λ(χ)` over
/// `μ^λ ⊗ μ^λ` do not depend on `λ`.
pub struct LambdaIndependence {
    /// Computed bound on the λ-degree of every entry of the adjugate and
    /// determinant of the λ-polynomial Gram matrix.
    pub degree_bound: usize,
    /// The sampled curvatures; at least `degree_bound + 1` and at least
    /// `2n + 2` of them.
    pub samples: Vec<Rational>,
    /// The common coefficient matrix (equal to the flat tensor).
    pub tensor: BTreeMap<((u32, u32), (u32, u32)), Scalar>,
}

/// Establishes λ-independence of the principal kinematic formula in the
/// `μ^λ` basis.
///
/// The Gram entry `pd_λ(μ^λ_a, μ^λ_b)` is assembled as an exact
/// polynomial in λ: the `μ^λ` coordinates of the product are
/// `A − λB` with `A, B` the flat `μ`-coordinates of `μ_aμ_b` and
/// `s·μ_aμ_b`, and the volume functional contributes weights
/// `λ^{n−q}·n!/(Π^{n−q}q!)`. Row-wise degree bounds then bound the
/// λ-degree of the determinant and of every adjugate entry, so agreement
/// of the inverse at `degree_bound + 1` distinct sample points proves the
/// polynomial identity `adj(G)(λ) = C·det(G)(λ)`, i.e. `G(λ)⁻¹ = C` for
/// every λ where the pairing is nondegenerate.
pub fn certify_lambda_independence(ctx: &Context) -> Result<LambdaIndependence> {
    let n = ctx.n();
    let idx = mu_indices(n);
    let dim = idx.len();
    let max_pow = (n + 2) as usize;

    // λ-coefficient matrices of the Gram matrix.
    let mut coeff_mats: Vec<Matrix> = (0..=max_pow).map(|_| Matrix::zeros(dim, dim)).collect();
    let mu_vals: Vec<Valuation> = idx
        .iter()
        .map(|&(k, q)| basis::mu_valuation(ctx, k, q).expect("admissible"))
        .collect();
    let s = ctx.s();
    for i in 0..dim {
        for j in 0..dim {
            let prod = ctx.mul(&mu_vals[i], &mu_vals[j]);
            let a = basis::coeffs(ctx, &prod, BasisFamily::Mu);
            let b = basis::coeffs(ctx, &ctx.mul(&s, &prod), BasisFamily::Mu);
            for q in 0..=n {
                let w = {
                    let num = factorial_scalar(n);
                    let den = &Scalar::pi_pow((n - q) as i64) * &factorial_scalar(q);
                    &num / &den
                };
                if let Some(ca) = a.get(&(2 * q, q)) {
                    let m = (n - q) as usize;
                    coeff_mats[m][(i, j)] += &(&w * ca);
                }
                if let Some(cb) = b.get(&(2 * q, q)) {
                    let m = (n - q) as usize + 1;
                    coeff_mats[m][(i, j)] -= &(&w * cb);
                }
            }
        }
    }

    // Row-wise λ-degree bounds: deg det ≤ Σ_rows max-entry-degree, and
    // every (dim−1)-minor obeys the same bound.
    let mut degree_bound = 0usize;
    for i in 0..dim {
        let mut row_deg = 0usize;
        for j in 0..dim {
            for (m, mat) in coeff_mats.iter().enumerate() {
                if !mat[(i, j)].is_zero() {
                    row_deg = row_deg.max(m);
                }
            }
        }
        degree_bound += row_deg;
    }

    let sample_count = (degree_bound + 1).max((2 * n + 2) as usize);
    let samples: Vec<Rational> = sample_values(sample_count);

    let mut reference: Option<Matrix> = None;
    for lam in &samples {
        // Evaluate the λ-polynomial Gram matrix at the sample.
        let mut g = Matrix::zeros(dim, dim);
        let mut lam_pow = Rational::one();
        for mat in &coeff_mats {
            let lam_scalar = Scalar::from_rational(lam_pow.clone());
            for i in 0..dim {
                for j in 0..dim {
                    if !mat[(i, j)].is_zero() {
                        g[(i, j)] += &(&mat[(i, j)] * &lam_scalar);
                    }
                }
            }
            lam_pow *= lam;
        }
        // Cross-check the assembly against the directly computed Gram
        // matrix on a couple of samples.
        if reference.is_none() || lam == &Rational::one() {
            let direct = gram_lambda(ctx, lam)?;
            if direct != g {
                return Err(Error::Infeasible(
                    "λ-polynomial Gram assembly disagrees with direct evaluation".into(),
                ));
            }
        }
        let inv = g.inverse()?;
        match &reference {
            None => reference = Some(inv),
            Some(r) => {
                if r != &inv {
                    return Err(Error::Infeasible(format!(
                        "kinematic coefficients vary with λ at sample {lam}"
                    )));
                }
            }
        }
    }
    let inv = reference.expect("at least one sample");
    let mut tensor = BTreeMap::new();
    for (i, &bi) in idx.iter().enumerate() {
        for (j, &bj) in idx.iter().enumerate() {
            if !inv[(i, j)].is_zero() {
                tensor.insert((bi, bj), inv[(i, j)].clone());
            }
        }
    }
    Ok(LambdaIndependence {
        degree_bound,
        samples,
        tensor,
    })
}

fn sample_values(count: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    let mut k = 1i64;
    while out.len() < count {
        out.push(Rational::from_integer(k.into()));
        if out.len() < count {
            out.push(Rational::from_integer((-k).into()));
        }
        k += 1;
    }
    out
}

/// Flat kinematic coproduct of χ in `μ ⊗ μ` coordinates, for comparison
/// with the curved tensors.
pub fn flat_chi_tensor(ctx: &Context) -> Result<BTreeMap<((u32, u32), (u32, u32)), Scalar>> {
    let k = kinematic::kinematic(ctx, &ctx.chi(), BasisFamily::Mu, BasisFamily::Mu)?;
    Ok(k.terms().clone())
}

/// Parses a rational in `p/q` or integer form.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<num_bigint::BigInt> {
        t.trim()
            .parse()
            .map_err(|_| Error::Json(format!("invalid rational `{s}`")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Formats a rational as `p/q` (or `p` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lam(p: i64, q: i64) -> Rational {
        rat(p, q)
    }

    fn random_valuation(ctx: &Context, rng: &mut ChaCha8Rng) -> Valuation {
        let n = ctx.n();
        let mut p = TsPoly::zero(n);
        for k in 0..=2 * n {
            for pw in 0..=pmax(n, k) {
                if rng.gen_bool(0.6) {
                    let c = Scalar::from_rational(rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
                    p.add_term(k - 2 * pw, pw, c);
                }
            }
        }
        ctx.reduce(&p)
    }

    #[test]
    fn iso_at_lambda_zero_is_identity() {
        let ctx = Context::new(2);
        let v = ctx.mul(&ctx.t(), &ctx.s());
        let cv = iso_push(&v, Rational::zero());
        assert_eq!(cv.curved_expr(), *v.poly());
        assert_eq!(iso_pull(&cv), v);
    }

    #[test]
    fn iso_roundtrip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=4 {
            let ctx = Context::new(n);
            for _ in 0..5 {
                let v = random_valuation(&ctx, &mut rng);
                let cv = iso_push(&v, lam(1, 2));
                assert_eq!(iso_pull(&cv), v);
                // Pullback of the materialized curved expression recovers
                // the element.
                let back = from_curved_expr(&ctx, &cv.curved_expr(), lam(1, 2));
                assert_eq!(back, cv);
            }
        }
    }

    #[test]
    fn curved_expr_of_t() {
        // iso_push(t) has flat representative t and curved expression
        // t·(1−λs)^{1/2}.
        let ctx = Context::new(2);
        let cv = iso_push(&ctx.t(), lam(1, 1));
        let g = one_minus_lambda_s(2, &lam(1, 1));
        let expected = &TsPoly::t(2) * &g.series_pow(1, 2).unwrap();
        assert_eq!(cv.curved_expr(), expected);
    }

    #[test]
    fn mu_lambda_examples() {
        let ctx = Context::new(2);
        // μ^λ_{0,0} has flat representative 1 − λs.
        let cv = mu_lambda(&ctx, 0, 0, lam(1, 1)).unwrap();
        let mut expected = TsPoly::one(2);
        expected.add_term(0, 1, -Scalar::one());
        assert_eq!(cv.flat_rep(), &ctx.reduce(&expected));
        // μ^0_{kq} = μ_{kq}.
        for (k, q) in mu_indices(2) {
            let cv = mu_lambda(&ctx, k, q, Rational::zero()).unwrap();
            assert_eq!(
                cv.flat_rep(),
                &basis::mu_valuation(&ctx, k, q).unwrap(),
                "mu^0 at ({k},{q})"
            );
        }
    }

    /// Dual-route check of the dictionary: the pullback of the curved
    /// expression must equal the flat product `(1 − λs)·μ_{kq}`.
    #[test]
    fn mu_lambda_matches_flat_shortcut() {
        for n in 1..=3 {
            let ctx = Context::new(n);
            for lambda in [lam(0, 1), lam(1, 1), lam(-1, 1), lam(1, 2), lam(2, 1)] {
                let unit = ctx.reduce(&one_minus_lambda_s(n, &lambda));
                for (k, q) in mu_indices(n) {
                    let direct = mu_lambda(&ctx, k, q, lambda.clone()).unwrap();
                    let shortcut =
                        ctx.mul(&unit, &basis::mu_valuation(&ctx, k, q).unwrap());
                    assert_eq!(
                        direct.flat_rep(),
                        &shortcut,
                        "n={n} λ={lambda} (k,q)=({k},{q})"
                    );
                }
            }
        }
    }

    #[test]
    fn mu_lambda_1_0_curved_expression() {
        // μ^λ_{1,0} reads (Π/2)·t·(1−λs)^{3/2} in curved variables:
        // compare after pulling both back.
        for n in 1..=3 {
            let ctx = Context::new(n);
            let lambda = lam(1, 3);
            let g = one_minus_lambda_s(n, &lambda);
            let expr = (&TsPoly::t(n) * &g.series_pow(3, 2).unwrap())
                .scale(&(&Scalar::pi_pow(1) * &Scalar::ratio(1, 2)));
            let direct = mu_lambda(&ctx, 1, 0, lambda.clone()).unwrap();
            assert_eq!(from_curved_expr(&ctx, &expr, lambda), direct);
        }
    }

    #[test]
    fn vol_star_row() {
        for n in 1..=3 {
            let ctx = Context::new(n);
            let lambda = lam(2, 3);
            // ⟨vol*, μ^λ_{2n,n}⟩ = 1.
            let top = mu_lambda(&ctx, 2 * n, n, lambda.clone()).unwrap();
            assert_eq!(vol_star(&ctx, &top), Scalar::one());
            // ⟨vol*, μ^λ_{kq}⟩ = 0 for k > 2q and the stated weight on
            // μ^λ_{2q,q}.
            for (k, q) in mu_indices(n) {
                let e = mu_lambda(&ctx, k, q, lambda.clone()).unwrap();
                let value = vol_star(&ctx, &e);
                if k > 2 * q {
                    assert!(value.is_zero(), "vol* must kill mu^λ({k},{q})");
                } else {
                    assert_eq!(value, vol_star_weight(n, q, &lambda));
                }
            }
        }
    }

    #[test]
    fn vol_star_weight_example() {
        // n = 2: ⟨vol*, μ^λ_{2,1}⟩ = 2λ/Π.
        let ctx = Context::new(2);
        let lambda = lam(5, 7);
        let e = mu_lambda(&ctx, 2, 1, lambda.clone()).unwrap();
        let expected = &(&Scalar::from_int(2) * &Scalar::from_rational(lambda))
            * &Scalar::pi_pow(-1);
        assert_eq!(vol_star(&ctx, &e), expected);
    }

    #[test]
    fn pd_lambda_basics() {
        let ctx = Context::new(1);
        let lambda = lam(-3, 2);
        let chi = iso_push(&ctx.chi(), lambda.clone());
        let top = mu_lambda(&ctx, 2, 1, lambda.clone()).unwrap();
        assert_eq!(pd_lambda(&ctx, &chi, &top), Scalar::one());
        // At λ = 0 the pairing coincides with the flat one.
        let a = iso_push(&ctx.t(), Rational::zero());
        assert_eq!(
            pd_lambda(&ctx, &a, &a),
            ctx.pd_pair(&ctx.t(), &ctx.t())
        );
        // Gram invertibility at a nonzero curvature.
        let g = gram_lambda(&ctx, &lambda).unwrap();
        assert!(g.inverse().is_ok());
    }

    #[test]
    fn mu_lambda_basis_is_complete() {
        // The flat representatives of the μ^λ basis span the algebra.
        for n in 1..=3 {
            let ctx = Context::new(n);
            for lambda in [lam(1, 1), lam(-1, 2)] {
                let idx = mu_indices(n);
                let flat_basis = kinematic::flat_basis(n);
                let mat = Matrix::from_fn(flat_basis.len(), idx.len(), |r, c| {
                    let (k, q) = idx[c];
                    let cv = mu_lambda(&ctx, k, q, lambda.clone()).unwrap();
                    let (dk, dp) = flat_basis[r];
                    cv.flat_rep().mono_coeff(dk, dp)
                });
                assert!(mat.inverse().is_ok(), "μ^λ basis at n={n}, λ={lambda}");
            }
        }
    }

    #[test]
    fn iso_push_is_multiplicative_through_curved_expressions() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for n in 1..=3 {
            let ctx = Context::new(n);
            for lambda in [lam(1, 1), lam(-1, 1), lam(1, 2)] {
                for _ in 0..5 {
                    let a = random_valuation(&ctx, &mut rng);
                    let b = random_valuation(&ctx, &mut rng);
                    let pushed_product = iso_push(&ctx.mul(&a, &b), lambda.clone());
                    // Multiply the curved expressions and pull back.
                    let ca = iso_push(&a, lambda.clone()).curved_expr();
                    let cb = iso_push(&b, lambda.clone()).curved_expr();
                    let prod = from_curved_expr(&ctx, &(&ca * &cb), lambda.clone());
                    assert_eq!(prod, pushed_product, "n={n} λ={lambda}");
                }
            }
        }
    }

    #[test]
    fn kinematic_lambda_reduces_to_flat_at_zero() {
        for n in 1..=2 {
            let ctx = Context::new(n);
            let chi = iso_push(&ctx.chi(), Rational::zero());
            let curved = kinematic_lambda(&ctx, &chi).unwrap();
            let flat = flat_chi_tensor(&ctx).unwrap();
            assert_eq!(curved.terms, flat);
        }
    }

    #[test]
    fn lambda_independence_small() {
        for n in 1..=2 {
            let ctx = Context::new(n);
            let cert = certify_lambda_independence(&ctx).unwrap();
            assert!(cert.samples.len() >= (2 * n + 2) as usize);
            assert!(cert.samples.len() > cert.degree_bound);
            assert_eq!(cert.tensor, flat_chi_tensor(&ctx).unwrap());
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-2").unwrap(), rat(-2, 1));
        assert!(parse_rational("1/0").is_err());
        assert_eq!(format_rational(&rat(-5, 3)), "-5/3");
        assert_eq!(format_rational(&rat(4, 2)), "2");
    }
}
