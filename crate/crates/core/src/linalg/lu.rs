use super::{ComplexMatrix, LinalgError};
use crate::xprec::{Complex, Real};

/// `P A = L U` with unit lower `L` and upper `U` packed in one matrix.
#[derive(Debug, Clone)]
pub struct LuFactors<R> {
    lu: ComplexMatrix<R>,
    /// `perm[i]` is the row of `A` that ended up in row `i`.
    perm: Vec<usize>,
    min_pivot: f64,
    max_pivot: f64,
    singular_to_working_precision: bool,
}

impl<R: Real> LuFactors<R> {
    pub fn n(&self) -> usize {
        self.lu.rows()
    }

    pub fn packed(&self) -> &ComplexMatrix<R> {
        &self.lu
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Smallest over largest pivot modulus.
    pub fn pivot_ratio(&self) -> f64 {
        if self.max_pivot == 0.0 {
            0.0
        } else {
            self.min_pivot / self.max_pivot
        }
    }

    /// Set when the smallest pivot is below `n * eps` times the largest.
    pub fn is_singular_to_working_precision(&self) -> bool {
        self.singular_to_working_precision
    }

    pub fn lower(&self) -> ComplexMatrix<R> {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => Complex::one(),
            std::cmp::Ordering::Less => Complex::zero(),
        })
    }

    pub fn upper(&self) -> ComplexMatrix<R> {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { Complex::zero() })
    }

    /// Solves with the factors regardless of the working-precision flag.
    pub fn solve_unchecked(&self, b: &[Complex<R>]) -> Vec<Complex<R>> {
        let n = self.n();
        let mut x: Vec<Complex<R>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in 0..i {
                acc -= row[j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        x
    }
}

/// Gaussian elimination with partial pivoting. Pivots are chosen by
/// `|re| + |im|`.
pub fn lu_factor<R: Real>(a: &ComplexMatrix<R>) -> Result<LuFactors<R>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot = 0.0f64;
    for k in 0..n {
        let (p, best) =
            (k..n)
                .map(|i| (i, lu[(i, k)].norm1()))
                .fold((k, R::zero()), |(bi, bv), (i, v)| if v > bv { (i, v) } else { (bi, bv) });
        if best.is_zero() {
            return Err(LinalgError::Singular { column: k });
        }
        lu.swap_rows(k, p);
        perm.swap(k, p);
        let pivot = lu[(k, k)];
        let magnitude = pivot.abs().to_f64();
        min_pivot = min_pivot.min(magnitude);
        max_pivot = max_pivot.max(magnitude);
        let inv = pivot.recip();
        for i in k + 1..n {
            let l = lu[(i, k)] * inv;
            lu[(i, k)] = l;
            if l.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = l * lu[(k, j)];
                lu[(i, j)] -= v;
            }
        }
    }
    let flagged = n > 0 && min_pivot < n as f64 * R::EPSILON * max_pivot;
    Ok(LuFactors { lu, perm, min_pivot, max_pivot, singular_to_working_precision: flagged })
}

/// Solves `A x = b` with the factors of `A`.
pub fn lu_solve<R: Real>(f: &LuFactors<R>, b: &[Complex<R>]) -> Result<Vec<Complex<R>>, LinalgError> {
    if b.len() != f.n() {
        return Err(LinalgError::DimensionMismatch { expected: f.n(), got: b.len() });
    }
    if f.singular_to_working_precision {
        return Err(LinalgError::SingularToWorkingPrecision { ratio: f.pivot_ratio() });
    }
    Ok(f.solve_unchecked(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_norm;
    use crate::xprec::{DoubleDouble, QuadDouble};
    use num_rational::BigRational;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c<R: Real>(re: f64) -> Complex<R> {
        Complex::from_f64(re, 0.0)
    }

    #[test]
    fn identity_and_permutation() {
        let f = lu_factor(&ComplexMatrix::<DoubleDouble>::identity(4)).unwrap();
        assert_eq!(f.lower(), ComplexMatrix::identity(4));
        assert_eq!(f.upper(), ComplexMatrix::identity(4));
        assert_eq!(f.permutation(), &[0, 1, 2, 3]);
        let b: Vec<_> = (0..4).map(|i| c(i as f64)).collect();
        assert_eq!(lu_solve(&f, &b).unwrap(), b);

        let swap = ComplexMatrix::<DoubleDouble>::from_f64_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let f = lu_factor(&swap).unwrap();
        assert_eq!(f.permutation(), &[1, 0]);
        assert_eq!(f.upper(), ComplexMatrix::identity(2));
        assert_eq!(f.lower(), ComplexMatrix::identity(2));

        let d = ComplexMatrix::<DoubleDouble>::from_f64_rows(&[&[2.0]]);
        assert_eq!(lu_solve(&lu_factor(&d).unwrap(), &[c(4.0)]).unwrap(), vec![c(2.0)]);
    }

    #[test]
    fn singular_cases() {
        let z = ComplexMatrix::<f64>::from_f64_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(matches!(lu_factor(&z), Err(LinalgError::Singular { column: 1 })));
        let near = ComplexMatrix::<f64>::from_f64_rows(&[&[1.0, 0.5], &[0.0, 1e-17]]);
        let f = lu_factor(&near).unwrap();
        assert!(f.is_singular_to_working_precision());
        assert!(matches!(lu_solve(&f, &[c(1.0), c(1.0)]), Err(LinalgError::SingularToWorkingPrecision { .. })));
        let rect = ComplexMatrix::<f64>::zeros(2, 3);
        assert!(matches!(lu_factor(&rect), Err(LinalgError::NotSquare { .. })));
    }

    fn residual_check<R: Real>(n: usize, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = ComplexMatrix::<R>::random_gaussian(n, n, &mut rng);
        let f = lu_factor(&a).unwrap();
        let mut pa = ComplexMatrix::zeros(n, n);
        for (i, &p) in f.permutation().iter().enumerate() {
            pa.row_mut(i).copy_from_slice(a.row(p));
        }
        let lu = f.lower().matmul(&f.upper()).unwrap();
        let err = pa.sub(&lu).unwrap().frobenius_norm().to_f64() / a.frobenius_norm().to_f64();
        assert!(err <= 8.0 * n as f64 * R::EPSILON, "{err:e}");

        let b: Vec<Complex<R>> = (0..n).map(|_| Complex::from_f64(rng.random(), rng.random())).collect();
        let x = lu_solve(&f, &b).unwrap();
        let r = super::super::vec_sub(&a.mul_vec(&x).unwrap(), &b);
        let bound = 8.0 * n as f64 * R::EPSILON * (a.frobenius_norm() * vec_norm(&x) + vec_norm(&b)).to_f64();
        assert!(vec_norm(&r).to_f64() <= bound);
    }

    #[test]
    fn random_residuals() {
        residual_check::<f64>(8, 1);
        residual_check::<DoubleDouble>(8, 2);
        residual_check::<QuadDouble>(8, 3);
    }

    /// Exact rational Gaussian elimination on a real matrix.
    fn exact_solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Vec<BigRational> {
        let n = b.len();
        let mut m: Vec<Vec<BigRational>> =
            a.iter().zip(b).map(|(r, bi)| r.iter().cloned().chain([bi.clone()]).collect()).collect();
        for k in 0..n {
            let p = (k..n).find(|&i| !m[i][k].is_zero()).unwrap();
            m.swap(k, p);
            for i in 0..n {
                if i != k && !m[i][k].is_zero() {
                    let f = &m[i][k] / &m[k][k];
                    for j in k..=n {
                        let v = &f * &m[k][j];
                        m[i][j] -= v;
                    }
                }
            }
        }
        (0..n).map(|i| &m[i][n] / &m[i][i]).collect()
    }

    fn to_rational<R: Real>(x: R) -> BigRational {
        crate::xprec::decimal::limbs_to_rational(x.limbs()).unwrap()
    }

    #[test]
    fn quad_double_solve_against_exact_rationals() {
        let n = 16;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = ComplexMatrix::<QuadDouble>::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0)));
        let b: Vec<Complex<QuadDouble>> = (0..n).map(|_| c(rng.random_range(-1.0..1.0))).collect();
        let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();

        let ar: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| to_rational(a[(i, j)].re)).collect()).collect();
        let br: Vec<BigRational> = b.iter().map(|z| to_rational(z.re)).collect();
        let exact = exact_solve(&ar, &br);
        let kappa = crate::linalg::condition(&a).unwrap().to_f64();
        let mut num = BigRational::zero();
        let mut den = BigRational::zero();
        for (xi, ei) in x.iter().zip(&exact) {
            let d = to_rational(xi.re) - ei;
            num += &d * &d;
            den += ei * ei;
            assert!(xi.im.is_zero());
        }
        let ratio = crate::xprec::decimal::nearest_f64(&(num / den));
        let rel = ratio.sqrt();
        assert!(rel <= kappa * 1e-60, "rel {rel:e}, kappa {kappa:e}");
    }

    #[test]
    fn hilbert_like_backward_stability() {
        let n = 8;
        let a = ComplexMatrix::<QuadDouble>::from_fn(n, n, |i, j| {
            Complex::from_real(QuadDouble::one() / QuadDouble::from_f64((i + j + 1) as f64))
        });
        let x_true: Vec<Complex<QuadDouble>> = (0..n).map(|i| c(1.0 + i as f64)).collect();
        let b = a.mul_vec(&x_true).unwrap();
        let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();
        let kappa = crate::linalg::condition(&a).unwrap().to_f64();
        let rel = vec_norm(&super::super::vec_sub(&x, &x_true)).to_f64() / vec_norm(&x_true).to_f64();
        assert!(rel <= kappa * 16.0 * QuadDouble::EPSILON, "rel {rel:e} kappa {kappa:e}");
    }
}
