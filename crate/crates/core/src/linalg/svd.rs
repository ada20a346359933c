use super::{ComplexMatrix, LinalgError};
use crate::xprec::{Complex, Real};

/// Maximum number of Jacobi sweeps.
pub const SWEEP_CAP: usize = 30;

/// `A = U diag(sigma) V*` with `sigma` sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct SvdResult<R> {
    pub sigma: Vec<R>,
    pub u: Option<ComplexMatrix<R>>,
    pub v: Option<ComplexMatrix<R>>,
    pub sweeps: usize,
}

impl<R: Real> SvdResult<R> {
    pub fn largest(&self) -> R {
        self.sigma.first().copied().unwrap_or_else(R::zero)
    }

    pub fn smallest(&self) -> R {
        self.sigma.last().copied().unwrap_or_else(R::zero)
    }
}

/// Column-oriented working copy.
struct Columns<R> {
    m: usize,
    cols: Vec<Vec<Complex<R>>>,
}

impl<R: Real> Columns<R> {
    fn from_matrix(a: &ComplexMatrix<R>) -> Self {
        let cols = (0..a.cols()).map(|j| (0..a.rows()).map(|i| a[(i, j)]).collect()).collect();
        Columns { m: a.rows(), cols }
    }

    fn identity(n: usize) -> Self {
        let cols =
            (0..n).map(|j| (0..n).map(|i| if i == j { Complex::one() } else { Complex::zero() }).collect()).collect();
        Columns { m: n, cols }
    }

    fn norm_sqr(&self, j: usize) -> R {
        self.cols[j].iter().fold(R::zero(), |s, z| s + z.norm_sqr())
    }

    /// `w_p^* w_q`.
    fn dot(&self, p: usize, q: usize) -> Complex<R> {
        self.cols[p].iter().zip(&self.cols[q]).fold(Complex::zero(), |s, (&a, &b)| s + a.conj() * b)
    }

    /// `w_p <- c w_p - s conj(phase) w_q`, `w_q <- s phase w_p + c w_q`.
    fn rotate(&mut self, p: usize, q: usize, c: R, s: R, phase: Complex<R>) {
        let (lo, hi) = self.cols.split_at_mut(q);
        let (wp, wq) = (&mut lo[p], &mut hi[0]);
        let sp = phase.scale(s);
        let sp_conj = phase.conj().scale(s);
        for (a, b) in wp.iter_mut().zip(wq.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = x.scale(c) - sp_conj * y;
            *b = sp * x + y.scale(c);
        }
    }

    fn to_matrix(&self, order: &[usize]) -> ComplexMatrix<R> {
        ComplexMatrix::from_fn(self.m, order.len(), |i, j| self.cols[order[j]][i])
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Pairs of columns are rotated until every pair satisfies
/// `|w_p^* w_q| <= n eps sqrt(|w_p|^2 |w_q|^2)`. Wide matrices are handled
/// through their conjugate transpose. Fails after [`SWEEP_CAP`] sweeps, with
/// the singular values of the last iterate in the error.
pub fn svd<R: Real>(a: &ComplexMatrix<R>, want_vectors: bool) -> Result<SvdResult<R>, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    if a.rows() < a.cols() {
        let t = svd(&a.conj_transpose(), want_vectors)?;
        return Ok(SvdResult { sigma: t.sigma, u: t.v, v: t.u, sweeps: t.sweeps });
    }
    let n = a.cols();
    let mut w = Columns::from_matrix(a);
    let mut v = want_vectors.then(|| Columns::identity(n));
    let tol = R::from_f64(n.max(1) as f64 * R::EPSILON);
    let mut sweeps = 0;
    let mut converged = n < 2;
    while !converged && sweeps < SWEEP_CAP {
        sweeps += 1;
        converged = true;
        let mut norms: Vec<R> = (0..n).map(|j| w.norm_sqr(j)).collect();
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha.is_zero() || beta.is_zero() {
                    continue;
                }
                let gamma = w.dot(p, q);
                let g = gamma.abs();
                if g <= tol * alpha.sqrt() * beta.sqrt() {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (g + g);
                let root = (R::one() + zeta * zeta).sqrt();
                let t =
                    if zeta.is_sign_negative() { -(zeta.abs() + root).recip() } else { (zeta.abs() + root).recip() };
                let c = (R::one() + t * t).sqrt().recip();
                let s = c * t;
                let phase = gamma.scale(g.recip());
                w.rotate(p, q, c, s, phase);
                if let Some(v) = v.as_mut() {
                    v.rotate(p, q, c, s, phase);
                }
                norms[p] = alpha - t * g;
                norms[q] = beta + t * g;
            }
        }
    }
    let mut sigma: Vec<R> = (0..n).map(|j| w.norm_sqr(j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap_or(std::cmp::Ordering::Equal));
    sigma = order.iter().map(|&j| sigma[j]).collect();
    if !converged {
        return Err(LinalgError::NoConvergence { sweeps, best: sigma.iter().map(|s| s.to_f64()).collect() });
    }
    let u = want_vectors.then(|| {
        for (k, &j) in order.iter().enumerate() {
            let s = sigma[k];
            if !s.is_zero() {
                let inv = s.recip();
                for z in &mut w.cols[j] {
                    *z = z.scale(inv);
                }
            }
        }
        w.to_matrix(&order)
    });
    let v = v.map(|v| v.to_matrix(&order));
    Ok(SvdResult { sigma, u, v, sweeps })
}

pub fn singular_values<R: Real>(a: &ComplexMatrix<R>) -> Result<Vec<R>, LinalgError> {
    Ok(svd(a, false)?.sigma)
}

/// `sigma_1 / sigma_n`, or `+inf` when `sigma_n` is zero.
pub fn condition<R: Real>(a: &ComplexMatrix<R>) -> Result<R, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare { rows: a.rows(), cols: a.cols() });
    }
    let r = svd(a, false)?;
    let small = r.smallest();
    if small.is_zero() {
        Ok(R::infinity())
    } else {
        Ok(r.largest() / small)
    }
}
