//! Bases of the invariant-valuation algebra and the conversions between
//! them: reduced monomials `s^p t^{k-2p}`, Alesker's `U_{k,p}`, hermitian
//! intrinsic volumes `μ_{k,q}`, Tasaki valuations `τ_{k,q}` and the
//! primitive basis `π_{k,r}`, plus the Alesker-Fourier transform and the
//! convolution product it intertwines.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::TsPoly;
use crate::scalar::{
    binomial_scalar, double_factorial_scalar, factorial_scalar, omega, Rational, Scalar,
};
use crate::valuation::{dim_val, pmax, Context, Valuation};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum BasisFamily {
    Mono,
    U,
    Mu,
    Tau,
    Prim,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 5] = [
        BasisFamily::Mono,
        BasisFamily::U,
        BasisFamily::Mu,
        BasisFamily::Tau,
        BasisFamily::Prim,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BasisFamily::Mono => "mono",
            BasisFamily::U => "u",
            BasisFamily::Mu => "mu",
            BasisFamily::Tau => "tau",
            BasisFamily::Prim => "prim",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mono" => Ok(BasisFamily::Mono),
            "u" => Ok(BasisFamily::U),
            "mu" => Ok(BasisFamily::Mu),
            "tau" => Ok(BasisFamily::Tau),
            "prim" => Ok(BasisFamily::Prim),
            other => Err(Error::Json(format!("unknown basis family `{other}`"))),
        }
    }

    /// Admissible indices at degree `k`, ascending. `Mu` and `Tau` are
    /// indexed from `max(0, k−n)`, the others from 0.
    pub fn indices(&self, n: u32, k: u32) -> Vec<u32> {
        let lo = match self {
            BasisFamily::Mu | BasisFamily::Tau => (k as i64 - n as i64).max(0) as u32,
            _ => 0,
        };
        let hi = match self {
            BasisFamily::Mu | BasisFamily::Tau => k / 2,
            _ => pmax(n, k),
        };
        (lo..=hi).collect()
    }

    pub fn admissible(&self, n: u32, k: u32, idx: u32) -> bool {
        k <= 2 * n && self.indices(n, k).contains(&idx)
    }
}

/// Raw monomial expansion of the hermitian intrinsic volume `μ_{k,q}`:
/// `Σ_{i=q}^{⌊k/2⌋} (−1)^{i+q} C(i,q) Π^k/(ω_k (k−2i)! (2i)!) · t^{k−2i} u^i`
/// with `u = 4s − t²`. Not reduced.
pub fn mu_poly(n: u32, k: u32, q: u32) -> TsPoly {
    let mut acc = TsPoly::zero(n);
    let u = u_poly(n);
    let pi_k_over_omega = &Scalar::pi_pow(k as i64) / &omega(k);
    for i in q..=k / 2 {
        let sign = if (i + q) % 2 == 0 { 1 } else { -1 };
        let c = &(&(&Scalar::from_int(sign) * &binomial_scalar(i, q)) * &pi_k_over_omega)
            / &(&factorial_scalar(k - 2 * i) * &factorial_scalar(2 * i));
        let term = TsPoly::monomial(n, k - 2 * i, 0, c);
        acc = &acc + &(&term * &u.pow(i));
    }
    acc
}

/// `u = 4s − t²`.
pub fn u_poly(n: u32) -> TsPoly {
    let mut u = TsPoly::monomial(n, 0, 1, Scalar::from_int(4));
    u.add_term(2, 0, -Scalar::one());
    u
}

/// The hermitian intrinsic volume `μ_{k,q}` as a reduced valuation.
pub fn mu_valuation(ctx: &Context, k: u32, q: u32) -> Result<Valuation> {
    check_index(BasisFamily::Mu, ctx.n(), k, q)?;
    Ok(ctx.reduce(&mu_poly(ctx.n(), k, q)))
}

/// Alesker's valuation `U_{k,p}`, a rescaled monomial:
/// `U_{k,p} = (n−p)! Π^{k−2p} / ((k−2p)! n! ω_{k−2p}) · s^p t^{k−2p}`.
pub fn u_valuation(ctx: &Context, k: u32, p: u32) -> Result<Valuation> {
    check_index(BasisFamily::U, ctx.n(), k, p)?;
    Ok(ctx.monomial(k, p).scale(&u_normalization(ctx.n(), k, p)))
}

fn u_normalization(n: u32, k: u32, p: u32) -> Scalar {
    let num = &factorial_scalar(n - p) * &Scalar::pi_pow((k - 2 * p) as i64);
    let den = &(&factorial_scalar(k - 2 * p) * &factorial_scalar(n)) * &omega(k - 2 * p);
    &num / &den
}

/// Expansion of the Tasaki valuation `τ_{k,q} = Σ_i C(i,q) μ_{k,i}` over
/// the admissible hermitian intrinsic volumes. Defined for every
/// `0 ≤ q ≤ ⌊k/2⌋`; when `k > n` the sum is restricted to the existing
/// `μ_{k,i}` with `i ≥ k−n`.
pub fn tau_in_mu(n: u32, k: u32, q: u32) -> Result<Vec<(u32, Scalar)>> {
    if k > 2 * n || q > k / 2 {
        return Err(Error::InadmissibleIndex(format!("tau({k},{q}) at n={n}")));
    }
    let lo = ((k as i64 - n as i64).max(0) as u32).max(q);
    Ok((lo..=k / 2)
        .map(|i| (i, Scalar::from_rational(Rational::from(binomial(i, q)))))
        .collect())
}

/// Expansion of the primitive-basis element `π_{k,r}` over Tasaki
/// valuations:
/// `π_{k,r} = (−1)^r (2n−4r+1)!! Σ_{i=0}^r (−1)^i (k−2i)!/(2r−2i)! ·
/// (2r−2i−1)!!/(2n−2r−2i+1)!! τ_{k,i}`,
/// with the conventions `(−1)!! = 0!! = 1`.
pub fn prim_in_tau(n: u32, k: u32, r: u32) -> Result<Vec<(u32, Scalar)>> {
    check_index(BasisFamily::Prim, n, k, r)?;
    let sign = if r % 2 == 0 { 1 } else { -1 };
    let prefactor = &Scalar::from_int(sign)
        * &double_factorial_scalar(2 * n as i64 - 4 * r as i64 + 1);
    let mut out = Vec::new();
    for i in 0..=r {
        let isign = if i % 2 == 0 { 1 } else { -1 };
        let num = &(&Scalar::from_int(isign) * &factorial_scalar(k - 2 * i))
            * &double_factorial_scalar(2 * (r - i) as i64 - 1);
        let den = &factorial_scalar(2 * (r - i))
            * &double_factorial_scalar(2 * n as i64 - 2 * r as i64 - 2 * i as i64 + 1);
        let c = &prefactor * &(&num / &den);
        if !c.is_zero() {
            out.push((i, c));
        }
    }
    Ok(out)
}

/// `π_{k,r}` as a reduced valuation, composed through the (possibly
/// restricted) Tasaki expansion.
pub fn prim_valuation(ctx: &Context, k: u32, r: u32) -> Result<Valuation> {
    let n = ctx.n();
    let mut acc = ctx.zero();
    for (i, c) in prim_in_tau(n, k, r)? {
        for (j, b) in tau_in_mu(n, k, i)? {
            let mu = mu_valuation(ctx, k, j)?;
            acc = acc.add(&mu.scale(&(&c * &b)));
        }
    }
    Ok(acc)
}

/// `τ_{k,q}` as a reduced valuation (admissible basis range only).
pub fn tau_valuation(ctx: &Context, k: u32, q: u32) -> Result<Valuation> {
    check_index(BasisFamily::Tau, ctx.n(), k, q)?;
    let mut acc = ctx.zero();
    for (j, b) in tau_in_mu(ctx.n(), k, q)? {
        acc = acc.add(&mu_valuation(ctx, k, j)?.scale(&b));
    }
    Ok(acc)
}

fn check_index(fam: BasisFamily, n: u32, k: u32, idx: u32) -> Result<()> {
    if !fam.admissible(n, k, idx) {
        return Err(Error::InadmissibleIndex(format!(
            "{}({k},{idx}) at n={n}",
            fam.name()
        )));
    }
    Ok(())
}

/// Per-degree change-of-basis matrices between each family and the
/// reduced monomials.
pub struct BasisTables {
    /// `to_mono[fam][k]`: columns are the family elements expressed in
    /// monomial coordinates.
    to_mono: BTreeMap<BasisFamily, Vec<Matrix>>,
    from_mono: BTreeMap<BasisFamily, Vec<Matrix>>,
}

impl BasisTables {
    fn build(ctx: &Context) -> BasisTables {
        let n = ctx.n();
        let mut to_mono = BTreeMap::new();
        let mut from_mono = BTreeMap::new();
        for fam in BasisFamily::ALL {
            let mut mats = Vec::new();
            let mut invs = Vec::new();
            for k in 0..=2 * n {
                let dim = dim_val(n, k);
                let idxs = fam.indices(n, k);
                assert_eq!(idxs.len(), dim, "family {} size at degree {k}", fam.name());
                let mat = Matrix::from_fn(dim, dim, |row, col| {
                    let v = basis_element(ctx, fam, k, idxs[col])
                        .expect("admissible by construction");
                    v.mono_coeff(k, row as u32)
                });
                let inv = mat
                    .inverse()
                    .unwrap_or_else(|_| panic!("{} basis is singular at degree {k}", fam.name()));
                mats.push(mat);
                invs.push(inv);
            }
            to_mono.insert(fam, mats);
            from_mono.insert(fam, invs);
        }
        BasisTables { to_mono, from_mono }
    }

    pub fn to_mono(&self, fam: BasisFamily, k: u32) -> &Matrix {
        &self.to_mono[&fam][k as usize]
    }

    pub fn from_mono(&self, fam: BasisFamily, k: u32) -> &Matrix {
        &self.from_mono[&fam][k as usize]
    }
}

/// The basis element of `fam` at `(k, idx)` as a reduced valuation.
pub fn basis_element(ctx: &Context, fam: BasisFamily, k: u32, idx: u32) -> Result<Valuation> {
    match fam {
        BasisFamily::Mono => {
            check_index(fam, ctx.n(), k, idx)?;
            Ok(ctx.monomial(k, idx))
        }
        BasisFamily::U => u_valuation(ctx, k, idx),
        BasisFamily::Mu => mu_valuation(ctx, k, idx),
        BasisFamily::Tau => tau_valuation(ctx, k, idx),
        BasisFamily::Prim => prim_valuation(ctx, k, idx),
    }
}

pub(crate) fn tables(ctx: &Context) -> &BasisTables {
    ctx.basis_tables.get_or_init(|| BasisTables::build(ctx))
}

/// Coefficients of `v` over the chosen family, keyed by `(k, idx)`.
pub fn coeffs(ctx: &Context, v: &Valuation, fam: BasisFamily) -> BTreeMap<(u32, u32), Scalar> {
    assert_eq!(v.n(), ctx.n(), "context mismatch");
    let t = tables(ctx);
    let mut out = BTreeMap::new();
    for k in v.degrees() {
        let dim = dim_val(ctx.n(), k);
        let mono = Matrix::column((0..dim).map(|p| v.mono_coeff(k, p as u32)).collect());
        let x = t.from_mono(fam, k) * &mono;
        let idxs = fam.indices(ctx.n(), k);
        for (row, idx) in idxs.iter().enumerate() {
            if !x[(row, 0)].is_zero() {
                out.insert((k, *idx), x[(row, 0)].clone());
            }
        }
    }
    out
}

/// Rebuilds a valuation from family coefficients.
pub fn from_coeffs(
    ctx: &Context,
    fam: BasisFamily,
    coeffs: &BTreeMap<(u32, u32), Scalar>,
) -> Result<Valuation> {
    let mut acc = ctx.zero();
    for ((k, idx), c) in coeffs {
        let e = basis_element(ctx, fam, *k, *idx)?;
        acc = acc.add(&e.scale(c));
    }
    Ok(acc)
}

/// Alesker-Fourier transform: the linear extension of
/// `μ_{k,q} ↦ μ_{2n−k, n−k+q}`. An involution on the (even) invariant
/// valuations.
pub fn fourier(ctx: &Context, v: &Valuation) -> Valuation {
    let n = ctx.n();
    let mu = coeffs(ctx, v, BasisFamily::Mu);
    let mut out = ctx.zero();
    for ((k, q), c) in mu {
        // q ≥ max(0, k − n) guarantees n + q ≥ k.
        let (k2, q2) = (2 * n - k, n + q - k);
        let e = mu_valuation(ctx, k2, q2).expect("Fourier image is admissible");
        out = out.add(&e.scale(&c));
    }
    out
}

/// Convolution product, implemented through the Fourier transform:
/// `a * b = 𝔽(𝔽a · 𝔽b)`.
pub fn convolve(ctx: &Context, a: &Valuation, b: &Valuation) -> Valuation {
    let fa = fourier(ctx, a);
    let fb = fourier(ctx, b);
    fourier(ctx, &ctx.mul(&fa, &fb))
}
