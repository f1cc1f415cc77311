//! The algebra of unitarily invariant valuations on ℂⁿ, modeled as the
//! polynomial algebra in `t`, `s` modulo the ideal generated by the two
//! log components `f_{n+1}`, `f_{n+2}`.
//!
//! Reduction to a canonical representative is per-degree exact linear
//! algebra: the ideal is graded, and the degree-`k` slice is spanned by
//! monomial multiples of the two generators. The canonical complement
//! consists of the monomials `s^p t^{k-2p}` with
//! `p ≤ min{⌊k/2⌋, ⌊(2n−k)/2⌋}`, which matches the dimension formula for
//! the degree-`k` invariant valuations.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::linalg::Matrix;
use crate::poly::{log_component_terms, TsPoly};
use crate::scalar::Scalar;

/// Largest admissible `s`-power in degree `k`:
/// `min{⌊k/2⌋, ⌊(2n−k)/2⌋}`. Requires `k ≤ 2n`.
pub fn pmax(n: u32, k: u32) -> u32 {
    assert!(k <= 2 * n, "degree {k} out of range for n={n}");
    (k / 2).min((2 * n - k) / 2)
}

/// Dimension of the degree-`k` space of invariant valuations.
pub fn dim_val(n: u32, k: u32) -> usize {
    pmax(n, k) as usize + 1
}

/// Per-dimension structure tables. All tables are deterministic
/// functions of `n`; lazily built ones are computed once and then
/// read-only, so a context can be shared freely across threads.
pub struct Context {
    n: u32,
    /// Per degree `k`: expansion of each non-complement monomial
    /// (indexed by its `s`-power) over the complement monomials
    /// `p = 0..=pmax`.
    reduction: Vec<BTreeMap<u32, Vec<Scalar>>>,
    /// `vol = μ_{2n,n}` has reduced representative `vol_coeff · t^{2n}`.
    vol_coeff: Scalar,
    pub(crate) basis_tables: OnceLock<crate::basis::BasisTables>,
    pub(crate) gram: OnceLock<Matrix>,
    pub(crate) gram_inv: OnceLock<Matrix>,
}

impl Context {
    pub fn new(n: u32) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        let reduction = build_reduction_tables(n);
        let mut ctx = Context {
            n,
            reduction,
            vol_coeff: Scalar::zero(),
            basis_tables: OnceLock::new(),
            gram: OnceLock::new(),
            gram_inv: OnceLock::new(),
        };
        let vol = ctx.reduce(&crate::basis::mu_poly(n, 2 * n, n));
        let c = vol.poly().coeff(2 * n, 0);
        assert!(!c.is_zero(), "volume valuation must not vanish");
        ctx.vol_coeff = c;
        ctx
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=2 * self.n).map(|k| dim_val(self.n, k)).collect()
    }

    /// Rank of the reduced degree-`k` space, computed from the stored
    /// reduction table rather than the dimension formula.
    pub fn reduced_rank(&self, k: u32) -> usize {
        let monomials = (k / 2) as usize + 1;
        monomials - self.reduction[k as usize].len()
    }

    /// Canonical representative of `p` modulo the ideal.
    pub fn reduce(&self, p: &TsPoly) -> Valuation {
        assert_eq!(p.n(), self.n, "polynomial context mismatch");
        let mut out = TsPoly::zero(self.n);
        for ((a, b), c) in p.terms_ordered() {
            let k = a + 2 * b;
            let cap = pmax(self.n, k);
            if b <= cap {
                out.add_term(a, b, c);
            } else {
                let expansion = &self.reduction[k as usize][&b];
                for (p_new, coeff) in expansion.iter().enumerate() {
                    if !coeff.is_zero() {
                        out.add_term(k - 2 * p_new as u32, p_new as u32, &c * coeff);
                    }
                }
            }
        }
        Valuation {
            n: self.n,
            poly: out,
        }
    }

    pub fn zero(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: TsPoly::zero(self.n),
        }
    }

    /// The Euler characteristic, the unit of the algebra.
    pub fn chi(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: TsPoly::one(self.n),
        }
    }

    pub fn t(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: TsPoly::t(self.n),
        }
    }

    pub fn s(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: TsPoly::s(self.n),
        }
    }

    /// The volume valuation `μ_{2n,n}`.
    pub fn vol(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: TsPoly::monomial(self.n, 2 * self.n, 0, self.vol_coeff.clone()),
        }
    }

    /// Monomial valuation `s^p t^{k-2p}`; requires `p ≤ pmax(k)`, so the
    /// result is already reduced.
    pub fn monomial(&self, k: u32, p: u32) -> Valuation {
        assert!(p <= pmax(self.n, k), "monomial outside the canonical complement");
        Valuation {
            n: self.n,
            poly: TsPoly::monomial(self.n, k - 2 * p, p, Scalar::one()),
        }
    }

    /// Alesker product of two valuations.
    pub fn mul(&self, a: &Valuation, b: &Valuation) -> Valuation {
        assert_eq!(a.n, self.n, "context mismatch");
        assert_eq!(b.n, self.n, "context mismatch");
        self.reduce(&(&a.poly * &b.poly))
    }

    /// Poincaré pairing: the coefficient of `vol` in `a · b`. Zero unless
    /// the degrees are complementary.
    pub fn pd_pair(&self, a: &Valuation, b: &Valuation) -> Scalar {
        let prod = self.mul(a, b);
        let top = prod.poly.coeff(2 * self.n, 0);
        &top / &self.vol_coeff
    }

    pub(crate) fn vol_coeff(&self) -> &Scalar {
        &self.vol_coeff
    }
}

fn build_reduction_tables(n: u32) -> Vec<BTreeMap<u32, Vec<Scalar>>> {
    let gen1 = log_component_terms(n + 1);
    let gen2 = log_component_terms(n + 2);
    let mut tables = Vec::with_capacity((2 * n + 1) as usize);
    for k in 0..=2 * n {
        tables.push(reduce_degree_slice(n, k, &gen1, &gen2));
    }
    tables
}

/// Row-reduce the degree-`k` ideal slice against the monomial order that
/// puts complement monomials last, and read off the expansion of every
/// non-complement monomial.
fn reduce_degree_slice(
    n: u32,
    k: u32,
    gen1: &[((u32, u32), crate::scalar::Rational)],
    gen2: &[((u32, u32), crate::scalar::Rational)],
) -> BTreeMap<u32, Vec<Scalar>> {
    let cap = pmax(n, k);
    let monomials = k / 2 + 1; // s-powers 0..=k/2
    let excess = (monomials - 1 - cap) as usize;
    if excess == 0 {
        return BTreeMap::new();
    }
    // Column order: s-powers descending, so pivots prefer the monomials
    // outside the complement.
    let col_of = |p: u32| (monomials - 1 - p) as usize;
    let mut rows: Vec<Vec<Scalar>> = Vec::new();
    for (gen, gdeg) in [(gen1, n + 1), (gen2, n + 2)] {
        if k < gdeg {
            continue;
        }
        let mdeg = k - gdeg; // degree of the monomial multiplier
        for mb in 0..=mdeg / 2 {
            let ma = mdeg - 2 * mb;
            let mut row = vec![Scalar::zero(); monomials as usize];
            for ((a, b), c) in gen {
                let (ta, tb) = (a + ma, b + mb);
                debug_assert_eq!(ta + 2 * tb, k);
                row[col_of(tb)] = Scalar::from_rational(c.clone());
            }
            rows.push(row);
        }
    }
    let mut m = Matrix::from_rows(rows);
    let pivots = m.rref();
    assert_eq!(
        pivots.len(),
        excess,
        "ideal slice rank at degree {k} does not match the dimension formula"
    );
    assert!(
        pivots.iter().all(|&c| c < excess),
        "pivot landed on a complement monomial at degree {k}; the canonical complement is invalid"
    );
    let mut table = BTreeMap::new();
    for (r, &c) in pivots.iter().enumerate() {
        let p = monomials - 1 - c as u32;
        // Row reads  mono_p + Σ_{p' ≤ cap} coeff·mono_{p'} = 0 in the quotient.
        let mut expansion = vec![Scalar::zero(); cap as usize + 1];
        for p_new in 0..=cap {
            expansion[p_new as usize] = -&m[(r, col_of(p_new))];
        }
        table.insert(p, expansion);
    }
    table
}

/// Element of the invariant-valuation algebra, stored by its canonical
/// reduced representative.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Valuation {
    n: u32,
    poly: TsPoly,
}

impl Valuation {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn poly(&self) -> &TsPoly {
        &self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn add(&self, other: &Valuation) -> Valuation {
        assert_eq!(self.n, other.n, "context mismatch");
        Valuation {
            n: self.n,
            poly: &self.poly + &other.poly,
        }
    }

    pub fn sub(&self, other: &Valuation) -> Valuation {
        assert_eq!(self.n, other.n, "context mismatch");
        Valuation {
            n: self.n,
            poly: &self.poly - &other.poly,
        }
    }

    pub fn neg(&self) -> Valuation {
        Valuation {
            n: self.n,
            poly: -&self.poly,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Valuation {
        Valuation {
            n: self.n,
            poly: self.poly.scale(c),
        }
    }

    /// Homogeneous component of degree `k`.
    pub fn degree_component(&self, k: u32) -> Valuation {
        Valuation {
            n: self.n,
            poly: self.poly.degree_component(k),
        }
    }

    /// Degrees with a nonzero component, ascending.
    pub fn degrees(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self
            .poly
            .terms_ordered()
            .iter()
            .map(|((a, b), _)| a + 2 * b)
            .collect();
        ds.dedup();
        ds
    }

    /// Coefficient on the reduced monomial `s^p t^{k-2p}`.
    pub fn mono_coeff(&self, k: u32, p: u32) -> Scalar {
        self.poly.coeff(k - 2 * p, p)
    }

    /// Wraps an already-reduced polynomial. Callers must guarantee the
    /// representative is canonical; `Context::reduce` is the safe route.
    pub(crate) fn from_reduced(n: u32, poly: TsPoly) -> Valuation {
        Valuation { n, poly }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn sc(a: i64, b: i64) -> Scalar {
        Scalar::from_rational(rat(a, b))
    }

    #[test]
    fn reduce_n1_examples() {
        let ctx = Context::new(1);
        // s ≡ t²/2 because f₂ = s − t²/2 lies in the ideal.
        let s = TsPoly::s(1);
        let reduced = ctx.reduce(&s);
        assert_eq!(reduced.poly().coeff(2, 0), sc(1, 2));
        assert_eq!(reduced.poly().coeff(0, 1), Scalar::zero());
        // t³ is already truncated away by the context.
        let t3 = TsPoly::monomial(1, 3, 0, Scalar::one());
        assert!(ctx.reduce(&t3).is_zero());
    }

    #[test]
    fn reduce_is_idempotent() {
        for n in 1..=4 {
            let ctx = Context::new(n);
            for k in 0..=2 * n {
                for p in 0..=pmax(n, k) {
                    let v = ctx.monomial(k, p);
                    assert_eq!(ctx.reduce(v.poly()), v);
                }
            }
        }
    }

    /// Independent echelon oracle for the n = 1 degree-2 slice: the only
    /// ideal row is f₂ = s − t²/2, so eliminating s against {t², s}
    /// yields s ↦ t²/2 directly.
    #[test]
    fn reduction_matches_hand_echelon_n1() {
        let ctx = Context::new(1);
        let table = &ctx.reduction[2];
        assert_eq!(table.len(), 1);
        assert_eq!(table[&1], vec![sc(1, 2)]);
    }

    #[test]
    fn dimension_formula_examples() {
        assert_eq!(dim_val(2, 2), 2);
        assert_eq!(dim_val(1, 1), 1);
        assert_eq!(dim_val(3, 0), 1);
        assert_eq!(dim_val(4, 4), 3);
    }

    #[test]
    fn reduced_rank_agrees_with_dimension_formula() {
        for n in 1..=6 {
            let ctx = Context::new(n);
            for k in 0..=2 * n {
                assert_eq!(ctx.reduced_rank(k), dim_val(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn chi_is_the_unit() {
        let ctx = Context::new(2);
        let chi = ctx.chi();
        let phi = ctx.reduce(&{
            let mut p = TsPoly::t(2);
            p.add_term(0, 1, sc(3, 2));
            p.add_term(2, 0, sc(-1, 3));
            p
        });
        assert_eq!(ctx.mul(&chi, &phi), phi);
        assert_eq!(ctx.mul(&phi, &chi), phi);
    }

    #[test]
    fn pd_pair_examples() {
        let ctx = Context::new(1);
        // pd(χ, vol) = 1
        assert_eq!(ctx.pd_pair(&ctx.chi(), &ctx.vol()), Scalar::one());
        // pd(t, t) = 2/Π because t² = (2/Π)·vol at n = 1.
        let expected = &Scalar::from_int(2) * &Scalar::pi_pow(-1);
        assert_eq!(ctx.pd_pair(&ctx.t(), &ctx.t()), expected);
        // degree mismatch pairs to zero
        assert_eq!(ctx.pd_pair(&ctx.t(), &ctx.chi()), Scalar::zero());
    }

    #[test]
    fn product_is_graded() {
        let ctx = Context::new(3);
        let t = ctx.t();
        let s = ctx.s();
        let ts = ctx.mul(&t, &s);
        assert_eq!(ts.degrees(), vec![3]);
    }
}
