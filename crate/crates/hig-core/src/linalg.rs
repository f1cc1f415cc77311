//! Exact dense linear algebra over the scalar field: row reduction,
//! linear solves, inverses, ranks and kernels. Everything is fraction
//! arithmetic in `Q(Π)`, so results are exact and residuals vanish
//! identically.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn column(entries: Vec<Scalar>) -> Self {
        let rows = entries.len();
        Matrix {
            rows,
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[Scalar] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// In-place reduced row echelon form. Returns the pivot column of
    /// each pivot row, in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = self[(row, col)]
                .inverse()
                .expect("pivot is nonzero by construction");
            for c in col..self.cols {
                self[(row, c)] = &self[(row, c)] * &inv;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for c in col..self.cols {
                        self[(r, c)] = &self[(r, c)] - &(&factor * &self[(row, c)]);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = Some(r);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free].is_some() {
                continue;
            }
            let mut vec = vec![Scalar::zero(); self.cols];
            vec[free] = Scalar::one();
            for (col, &pr) in pivot_set.iter().enumerate() {
                if let Some(r) = pr {
                    vec[col] = -&m[(r, free)];
                }
            }
            basis.push(vec);
        }
        basis
    }

    /// Solves `self · X = rhs` for square invertible `self`. A singular
    /// matrix is reported together with its rank and one kernel vector.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "solve requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, expected {}",
                rhs.rows, self.rows
            )));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, n + rhs.cols);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            for c in 0..rhs.cols {
                aug[(r, n + c)] = rhs[(r, c)].clone();
            }
        }
        let pivots = aug.rref();
        let rank = pivots.iter().filter(|&&c| c < n).count();
        if rank < n {
            let kernel = self
                .kernel()
                .into_iter()
                .next()
                .expect("rank-deficient matrix has a kernel vector");
            return Err(Error::Singular { rank, kernel });
        }
        Ok(Matrix::from_fn(n, rhs.cols, |r, c| aug[(r, n + c)].clone()))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m[(r, col)].is_zero()) else {
                return Scalar::zero();
            };
            if p != col {
                m.swap_rows(col, p);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = &det * &pivot;
            let inv = pivot.inverse().expect("pivot nonzero");
            for r in col + 1..n {
                if m[(r, col)].is_zero() {
                    continue;
                }
                let factor = &m[(r, col)] * &inv;
                for c in col..n {
                    m[(r, c)] = &m[(r, c)] - &(&factor * &m[(col, c)]);
                }
            }
        }
        det
    }

    pub fn map(&self, f: impl Fn(&Scalar) -> Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (r, c): (usize, usize)) -> &Scalar {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Scalar {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |r, c| {
            let mut acc = Scalar::zero();
            for k in 0..self.cols {
                if !self[(r, k)].is_zero() && !rhs[(k, c)].is_zero() {
                    acc += &(&self[(r, k)] * &rhs[(k, c)]);
                }
            }
            acc
        })
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] + &rhs[(r, c)])
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |r, c| &self[(r, c)] - &rhs[(r, c)])
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}{}", self[(r, c)], if c + 1 < self.cols { ", " } else { "" })?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Exact solution of `m · x = rhs`; see [`Matrix::solve`].
pub fn solve_linear(m: &Matrix, rhs: &Matrix) -> Result<Matrix> {
    m.solve(rhs)
}

/// Particular solution and nullspace basis of a (possibly rectangular)
/// system `m · x = rhs`, or `Infeasible` when inconsistent.
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Scalar>>,
}

pub fn solve_affine(m: &Matrix, rhs: &[Scalar]) -> Result<AffineSolution> {
    assert_eq!(m.rows(), rhs.len(), "rhs length mismatch");
    let cols = m.cols();
    let mut aug = Matrix::from_fn(m.rows(), cols + 1, |r, c| {
        if c < cols {
            m[(r, c)].clone()
        } else {
            rhs[r].clone()
        }
    });
    let pivots = aug.rref();
    if pivots.iter().any(|&c| c == cols) {
        return Err(Error::Infeasible(
            "no solution: augmented column contains a pivot".into(),
        ));
    }
    let mut particular = vec![Scalar::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[(r, cols)].clone();
    }
    let mut pivot_of_col = vec![None; cols];
    for (r, &c) in pivots.iter().enumerate() {
        pivot_of_col[c] = Some(r);
    }
    let mut nullspace = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut vec = vec![Scalar::zero(); cols];
        vec[free] = Scalar::one();
        for (col, &pr) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pr {
                vec[col] = -&aug[(r, free)];
            }
        }
        nullspace.push(vec);
    }
    Ok(AffineSolution {
        particular,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::from_rational(rat(n, d))
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let id = Matrix::identity(3);
        let rhs = Matrix::column(vec![s(1, 1), s(2, 3), Scalar::pi_pow(1)]);
        assert_eq!(id.solve(&rhs).unwrap(), rhs);
    }

    #[test]
    fn diagonal_solve() {
        // [[Π,0],[0,2]]·X = [[1],[1]] → X = [[1/Π],[1/2]]
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = Scalar::pi_pow(1);
        m[(1, 1)] = s(2, 1);
        let rhs = Matrix::column(vec![Scalar::one(), Scalar::one()]);
        let x = m.solve(&rhs).unwrap();
        assert_eq!(x[(0, 0)], Scalar::pi_pow(-1));
        assert_eq!(x[(1, 0)], s(1, 2));
    }

    #[test]
    fn random_systems_have_exactly_zero_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = Matrix::from_fn(4, 4, |_, _| s(rng.gen_range(-9..=9), rng.gen_range(1..=9)));
            let rhs = Matrix::from_fn(4, 2, |_, _| {
                s(rng.gen_range(-9..=9), rng.gen_range(1..=9))
            });
            match m.solve(&rhs) {
                Ok(x) => {
                    let residual = &(&m * &x) - &rhs;
                    assert!(residual.is_zero(), "residual must vanish identically");
                }
                Err(Error::Singular { rank, kernel }) => {
                    assert!(rank < 4);
                    // The reported kernel vector must actually lie in the kernel.
                    let kv = Matrix::column(kernel);
                    assert!((&m * &kv).is_zero());
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn singular_matrix_reports_rank_and_kernel() {
        let m = Matrix::from_rows(vec![
            vec![s(1, 1), s(2, 1)],
            vec![s(2, 1), s(4, 1)],
        ]);
        let rhs = Matrix::column(vec![s(1, 1), s(2, 1)]);
        match m.solve(&rhs) {
            Err(Error::Singular { rank, kernel }) => {
                assert_eq!(rank, 1);
                let kv = Matrix::column(kernel);
                assert!((&m * &kv).is_zero());
            }
            _ => panic!("expected singular error"),
        }
    }

    #[test]
    fn inverse_over_function_field() {
        let m = Matrix::from_rows(vec![
            vec![Scalar::pi_pow(1), Scalar::one()],
            vec![Scalar::one(), Scalar::pi_pow(-1)],
        ]);
        // det = 1 − 1 = 0: singular.
        assert!(m.inverse().is_err());

        let m = Matrix::from_rows(vec![
            vec![Scalar::pi_pow(1), Scalar::one()],
            vec![Scalar::one(), Scalar::one()],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Matrix::identity(2));
        assert_eq!(&inv * &m, Matrix::identity(2));
    }

    #[test]
    fn affine_solver_reports_nullspace() {
        // x + y = 1 has a one-dimensional solution space.
        let m = Matrix::from_rows(vec![vec![s(1, 1), s(1, 1)]]);
        let sol = solve_affine(&m, &[s(1, 1)]).unwrap();
        assert_eq!(sol.nullspace.len(), 1);
        // Infeasible system: x + y = 1 and x + y = 2.
        let m2 = Matrix::from_rows(vec![
            vec![s(1, 1), s(1, 1)],
            vec![s(1, 1), s(1, 1)],
        ]);
        assert!(solve_affine(&m2, &[s(1, 1), s(2, 1)]).is_err());
    }
}
