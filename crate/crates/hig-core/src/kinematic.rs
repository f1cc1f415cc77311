//! The global kinematic coproduct and the closed-form data of the
//! principal kinematic formula: the constants `a_{n,k,r}` of the
//! anti-diagonal primitive-basis expansion and the auxiliary valuations
//! `ρ_{k,r}` entering the local formulas.
//!
//! The coproduct is computed by Gram inversion of the Poincaré pairing:
//! `k(φ) = Σ_{i,j} (Σ_{k,l} G⁻¹_{ik} G⁻¹_{jl} pd(φ·e_k, e_l)) e_i ⊗ e_j`.

use std::collections::BTreeMap;

use crate::basis::{tables, BasisFamily};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::TsPoly;
use crate::scalar::{
    binomial_scalar, double_factorial_scalar, factorial_scalar, omega, Scalar,
};
use crate::valuation::{dim_val, pmax, Context, Valuation};

/// Enumeration of the reduced monomial basis of the whole algebra,
/// ascending in `(degree, s-power)`.
pub fn flat_basis(n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for k in 0..=2 * n {
        for p in 0..=pmax(n, k) {
            out.push((k, p));
        }
    }
    out
}

fn flat_index(n: u32, k: u32, p: u32) -> usize {
    let mut idx = 0usize;
    for j in 0..k {
        idx += dim_val(n, j);
    }
    idx + p as usize
}

/// Gram matrix of the Poincaré pairing on the monomial basis.
pub fn gram(ctx: &Context) -> &Matrix {
    ctx.gram.get_or_init(|| {
        let basis = flat_basis(ctx.n());
        let vals: Vec<Valuation> = basis.iter().map(|&(k, p)| ctx.monomial(k, p)).collect();
        Matrix::from_fn(basis.len(), basis.len(), |i, j| {
            ctx.pd_pair(&vals[i], &vals[j])
        })
    })
}

/// Inverse Gram matrix; the pairing is perfect, so this must exist.
pub fn gram_inverse(ctx: &Context) -> Result<&Matrix> {
    if let Some(m) = ctx.gram_inv.get() {
        return Ok(m);
    }
    let inv = gram(ctx).inverse()?;
    Ok(ctx.gram_inv.get_or_init(|| inv))
}

/// Constant of the principal kinematic formula:
/// `a_{n,k,r} = ω_k ω_{2n−k}/Π^n · (n−r)!/(8^r (2n−4r)!) ·
/// (2n−2r+1)!!/(2n−4r+1)!! · C(n,2r)⁻¹`.
pub fn a_coeff(n: u32, k: u32, r: u32) -> Result<Scalar> {
    if k > 2 * n || r > pmax(n, k) {
        return Err(Error::InadmissibleIndex(format!("a({n},{k},{r})")));
    }
    let omegas = &(&omega(k) * &omega(2 * n - k)) / &Scalar::pi_pow(n as i64);
    let f1 = &factorial_scalar(n - r)
        / &(&Scalar::from_int(8).pow(r as i64).unwrap() * &factorial_scalar(2 * n - 4 * r));
    let f2 = &double_factorial_scalar(2 * (n - r) as i64 + 1)
        / &double_factorial_scalar(2 * n as i64 - 4 * r as i64 + 1);
    let f3 = binomial_scalar(n, 2 * r).inverse().expect("binomial is nonzero");
    Ok(&(&(&omegas * &f1) * &f2) * &f3)
}

/// The valuation `ρ_{k,r}` of the local kinematic formulas, homogeneous
/// of degree `k − 1`:
/// prefactor `2(−1)^r (2n−4r+1)!! Π^{k−1}/ω_k` times the two displayed
/// sums in `t^{k−2i−1} u^i`, `u = 4s − t²`.
pub fn rho(ctx: &Context, k: u32, r: u32) -> Result<Valuation> {
    let n = ctx.n();
    if k < 1 || k > 2 * n - 1 || r > pmax(n, k) {
        return Err(Error::InadmissibleIndex(format!("rho({k},{r}) at n={n}")));
    }
    let sign = if r % 2 == 0 { 1 } else { -1 };
    let prefactor = &(&(&Scalar::from_int(2 * sign)
        * &double_factorial_scalar(2 * n as i64 - 4 * r as i64 + 1))
        * &Scalar::pi_pow(k as i64 - 1))
        / &omega(k);

    let u = crate::basis::u_poly(n);
    let mut body = TsPoly::zero(n);

    // First sum, weighted by (2r−1)!!(k+1)!/((2n−2r+1)!!(2r)!).
    let w = &(&double_factorial_scalar(2 * r as i64 - 1) * &factorial_scalar(k + 1))
        / &(&double_factorial_scalar(2 * (n - r) as i64 + 1) * &factorial_scalar(2 * r));
    if k >= 1 {
        for i in 0..=(k - 1) / 2 {
            let isign = if i % 2 == 0 { -1 } else { 1 }; // (−1)^{i+1}
            let c = &(&Scalar::from_int(isign) * &w)
                / &(&factorial_scalar(2 * i + 3) * &factorial_scalar(k - 2 * i - 1));
            let term = TsPoly::monomial(n, k - 2 * i - 1, 0, c);
            body = &body + &(&term * &u.pow(i));
        }
    }

    // Second sum, present only for r ≥ 1.
    for i in 0..r {
        let isign = if i % 2 == 0 { 1 } else { -1 };
        let num = &Scalar::from_int(isign)
            * &double_factorial_scalar(2 * (r - i) as i64 - 3);
        let den = &(&double_factorial_scalar(2 * n as i64 - 2 * r as i64 - 2 * i as i64 - 1)
            * &factorial_scalar(2 * (r - i) - 2))
            * &factorial_scalar(2 * i + 2);
        let c = &num / &den;
        let term = TsPoly::monomial(n, k - 2 * i - 1, 0, c);
        body = &body + &(&term * &u.pow(i));
    }

    Ok(ctx.reduce(&body.scale(&prefactor)))
}

/// Exact tensor over a pair of valuation bases.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorElement {
    n: u32,
    left: BasisFamily,
    right: BasisFamily,
    /// `((k, idx), (k', idx')) → coefficient`, zero coefficients absent.
    terms: BTreeMap<((u32, u32), (u32, u32)), Scalar>,
}

impl TensorElement {
    pub fn zero(n: u32, left: BasisFamily, right: BasisFamily) -> Self {
        TensorElement {
            n,
            left,
            right,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn left_basis(&self) -> BasisFamily {
        self.left
    }

    pub fn right_basis(&self) -> BasisFamily {
        self.right
    }

    pub fn terms(&self) -> &BTreeMap<((u32, u32), (u32, u32)), Scalar> {
        &self.terms
    }

    pub fn add_term(&mut self, left: (u32, u32), right: (u32, u32), c: Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry((left, right)).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&(left, right));
        }
    }

    pub fn coeff(&self, left: (u32, u32), right: (u32, u32)) -> Scalar {
        self.terms.get(&(left, right)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn swap(&self) -> TensorElement {
        TensorElement {
            n: self.n,
            left: self.right,
            right: self.left,
            terms: self
                .terms
                .iter()
                .map(|(&(l, r), c)| ((r, l), c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorElement) -> TensorElement {
        assert_eq!((self.left, self.right), (other.left, other.right));
        let mut out = self.clone();
        for (&(l, r), c) in &other.terms {
            out.add_term(l, r, -c);
        }
        out
    }

    pub fn is_swap_symmetric(&self) -> bool {
        self.left == self.right && self.sub(&self.swap()).is_zero()
    }

    /// Re-expresses the tensor over another pair of bases. Coefficients
    /// transform blockwise by the inverse change-of-basis matrices.
    pub fn convert(&self, ctx: &Context, left: BasisFamily, right: BasisFamily) -> TensorElement {
        assert_eq!(ctx.n(), self.n, "context mismatch");
        if left == self.left && right == self.right {
            return self.clone();
        }
        let t = tables(ctx);
        // Group into blocks by degree pair.
        let mut blocks: BTreeMap<(u32, u32), Matrix> = BTreeMap::new();
        for (&((kl, il), (kr, ir)), c) in &self.terms {
            let dim_l = dim_val(self.n, kl);
            let dim_r = dim_val(self.n, kr);
            let block = blocks
                .entry((kl, kr))
                .or_insert_with(|| Matrix::zeros(dim_l, dim_r));
            let row = index_position(self.left, self.n, kl, il);
            let col = index_position(self.right, self.n, kr, ir);
            block[(row, col)] = c.clone();
        }
        let mut out = TensorElement::zero(self.n, left, right);
        for ((kl, kr), block) in blocks {
            // old basis → mono → new basis
            let to_mono_l = t.to_mono(self.left, kl);
            let to_mono_r = t.to_mono(self.right, kr);
            let from_mono_l = t.from_mono(left, kl);
            let from_mono_r = t.from_mono(right, kr);
            let mono_block = &(to_mono_l * &block) * &to_mono_r.transpose();
            let new_block = &(from_mono_l * &mono_block) * &from_mono_r.transpose();
            let idx_l = left.indices(self.n, kl);
            let idx_r = right.indices(self.n, kr);
            for (row, &il) in idx_l.iter().enumerate() {
                for (col, &ir) in idx_r.iter().enumerate() {
                    out.add_term((kl, il), (kr, ir), new_block[(row, col)].clone());
                }
            }
        }
        out
    }
}

fn index_position(fam: BasisFamily, n: u32, k: u32, idx: u32) -> usize {
    fam.indices(n, k)
        .iter()
        .position(|&i| i == idx)
        .expect("index admissible for its family")
}

/// Kinematic coproduct of `φ` as a full-space coefficient matrix over
/// the monomial basis.
pub fn kinematic_matrix(ctx: &Context, phi: &Valuation) -> Result<Matrix> {
    let basis = flat_basis(ctx.n());
    let vals: Vec<Valuation> = basis.iter().map(|&(k, p)| ctx.monomial(k, p)).collect();
    let ginv = gram_inverse(ctx)?;
    let m = Matrix::from_fn(basis.len(), basis.len(), |i, j| {
        ctx.pd_pair(&ctx.mul(phi, &vals[i]), &vals[j])
    });
    Ok(&(ginv * &m) * ginv)
}

/// Kinematic coproduct of `φ`, expressed over the requested bases.
pub fn kinematic(
    ctx: &Context,
    phi: &Valuation,
    left: BasisFamily,
    right: BasisFamily,
) -> Result<TensorElement> {
    let c = kinematic_matrix(ctx, phi)?;
    let basis = flat_basis(ctx.n());
    let mut out = TensorElement::zero(ctx.n(), BasisFamily::Mono, BasisFamily::Mono);
    for (i, &bi) in basis.iter().enumerate() {
        for (j, &bj) in basis.iter().enumerate() {
            out.add_term(bi, bj, c[(i, j)].clone());
        }
    }
    Ok(out.convert(ctx, left, right))
}

/// The principal kinematic formula assembled from its closed form:
/// `Σ_{k,r} a_{n,k,r} π_{k,r} ⊗ π_{2n−k,r}` in the primitive basis.
pub fn pkf_closed_form(ctx: &Context) -> Result<TensorElement> {
    let n = ctx.n();
    let mut out = TensorElement::zero(n, BasisFamily::Prim, BasisFamily::Prim);
    for k in 0..=2 * n {
        for r in 0..=pmax(n, k) {
            out.add_term((k, r), (2 * n - k, r), a_coeff(n, k, r)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{coeffs, mu_valuation};
    use crate::scalar::rat;

    fn sc(a: i64, b: i64) -> Scalar {
        Scalar::from_rational(rat(a, b))
    }

    #[test]
    fn a_coeff_examples() {
        // a_{1,0,0} = 1/2 and a_{1,1,0} = 2/Π by direct evaluation.
        assert_eq!(a_coeff(1, 0, 0).unwrap(), sc(1, 2));
        assert_eq!(
            a_coeff(1, 1, 0).unwrap(),
            &Scalar::from_int(2) * &Scalar::pi_pow(-1)
        );
        // symmetry under k ↔ 2n−k
        for n in 1..=4 {
            for k in 0..=2 * n {
                for r in 0..=pmax(n, k) {
                    assert_eq!(
                        a_coeff(n, k, r).unwrap(),
                        a_coeff(n, 2 * n - k, r).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn rho_examples() {
        // ρ_{1,0} = −χ/3 for every n: only the i = 0 term of the first
        // sum survives and the prefactor cancels the double factorial.
        for n in 1..=4 {
            let ctx = Context::new(n);
            let r = rho(&ctx, 1, 0).unwrap();
            assert_eq!(r, ctx.chi().scale(&sc(-1, 3)));
        }
    }

    #[test]
    fn rho_is_homogeneous_of_degree_k_minus_1() {
        for n in 1..=4 {
            let ctx = Context::new(n);
            for k in 1..=2 * n - 1 {
                for r in 0..=pmax(n, k) {
                    let v = rho(&ctx, k, r).unwrap();
                    if !v.is_zero() {
                        assert_eq!(v.degrees(), vec![k - 1], "rho({k},{r}) at n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn rho_rejects_out_of_range_indices() {
        let ctx = Context::new(2);
        assert!(rho(&ctx, 0, 0).is_err());
        assert!(rho(&ctx, 4, 0).is_err());
        assert!(rho(&ctx, 2, 2).is_err());
    }

    #[test]
    fn kinematic_chi_n1_classical() {
        // k(χ) = χ⊗vol + (2/Π)μ₁⊗μ₁ + vol⊗χ in the plane.
        let ctx = Context::new(1);
        let k = kinematic(&ctx, &ctx.chi(), BasisFamily::Mu, BasisFamily::Mu).unwrap();
        let mut expected = TensorElement::zero(1, BasisFamily::Mu, BasisFamily::Mu);
        expected.add_term((0, 0), (2, 1), Scalar::one());
        expected.add_term((1, 0), (1, 0), &Scalar::from_int(2) * &Scalar::pi_pow(-1));
        expected.add_term((2, 1), (0, 0), Scalar::one());
        assert_eq!(k, expected);
    }

    #[test]
    fn kinematic_vol_is_vol_tensor_vol() {
        for n in 1..=2 {
            let ctx = Context::new(n);
            let k = kinematic(&ctx, &ctx.vol(), BasisFamily::Mu, BasisFamily::Mu).unwrap();
            let mut expected = TensorElement::zero(n, BasisFamily::Mu, BasisFamily::Mu);
            expected.add_term((2 * n, n), (2 * n, n), Scalar::one());
            assert_eq!(k, expected);
        }
    }

    #[test]
    fn kinematic_chi_matches_closed_form() {
        for n in 1..=3 {
            let ctx = Context::new(n);
            let computed =
                kinematic(&ctx, &ctx.chi(), BasisFamily::Prim, BasisFamily::Prim).unwrap();
            let closed = pkf_closed_form(&ctx).unwrap();
            assert_eq!(computed, closed, "principal kinematic formula at n={n}");
        }
    }

    #[test]
    fn gram_prim_blocks_are_anti_diagonal() {
        // pd(π_{k,r}, π_{2n−k,r'}) vanishes unless r = r'.
        for n in 1..=3 {
            let ctx = Context::new(n);
            for k in 0..=2 * n {
                for r in 0..=pmax(n, k) {
                    for r2 in 0..=pmax(n, k) {
                        let a = crate::basis::prim_valuation(&ctx, k, r).unwrap();
                        let b = crate::basis::prim_valuation(&ctx, 2 * n - k, r2).unwrap();
                        let pairing = ctx.pd_pair(&a, &b);
                        if r != r2 {
                            assert!(pairing.is_zero(), "n={n} k={k} r={r} r2={r2}");
                        } else {
                            assert!(!pairing.is_zero(), "n={n} k={k} r={r}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_conversion_roundtrip() {
        let ctx = Context::new(2);
        let k = kinematic(&ctx, &ctx.chi(), BasisFamily::Mono, BasisFamily::Mono).unwrap();
        let there = k.convert(&ctx, BasisFamily::Prim, BasisFamily::Tau);
        let back = there.convert(&ctx, BasisFamily::Mono, BasisFamily::Mono);
        assert_eq!(back, k);
    }

    #[test]
    fn dual_basis_identity_small() {
        // Σ_{k,r} a_{n,k,r}·pd(π_{2n−k,r}, φ)·π_{k,r} = φ
        let n = 2;
        let ctx = Context::new(n);
        let phi = {
            let mut p = TsPoly::one(n);
            p.add_term(1, 0, sc(3, 1));
            p.add_term(0, 1, sc(-2, 5));
            p.add_term(2, 0, &Scalar::pi_pow(1) * &sc(1, 7));
            ctx.reduce(&p)
        };
        let mut acc = ctx.zero();
        for k in 0..=2 * n {
            for r in 0..=pmax(n, k) {
                let a = a_coeff(n, k, r).unwrap();
                let dual = crate::basis::prim_valuation(&ctx, 2 * n - k, r).unwrap();
                let basis = crate::basis::prim_valuation(&ctx, k, r).unwrap();
                let weight = &a * &ctx.pd_pair(&dual, &phi);
                acc = acc.add(&basis.scale(&weight));
            }
        }
        assert_eq!(acc, phi);
    }

    #[test]
    fn mu_products_in_mu_basis() {
        // t·t at n = 1 equals (2/Π)·μ_{2,1}.
        let ctx = Context::new(1);
        let t2 = ctx.mul(&ctx.t(), &ctx.t());
        let c = coeffs(&ctx, &t2, BasisFamily::Mu);
        assert_eq!(c.len(), 1);
        assert_eq!(c[&(2, 1)], &Scalar::from_int(2) * &Scalar::pi_pow(-1));
        // μ₁·μ₁ = (Π/2)·vol, the classical planar identity.
        let mu1 = mu_valuation(&ctx, 1, 0).unwrap();
        let sq = ctx.mul(&mu1, &mu1);
        assert_eq!(sq, ctx.vol().scale(&(&sc(1, 2) * &Scalar::pi_pow(1))));
    }
}
