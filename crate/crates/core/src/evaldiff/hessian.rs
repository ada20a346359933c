use super::{check_input, monomial_kernel, products, EvalError, OpCounts, WorkCrew};
use crate::linalg::ComplexMatrix;
use crate::polysys::{Monomial, MonomialShape, PowerTable, SparseSystem};
use crate::ring::Ring;
use crate::xprec::{Complex, Real};

/// Value, gradient and Hessian of one polynomial at a point.
#[derive(Debug, Clone)]
pub struct HessResult<R> {
    pub value: Complex<R>,
    pub gradient: Vec<Complex<R>>,
    /// Symmetric; the lower triangle is a copy of the upper one.
    pub hessian: ComplexMatrix<R>,
}

fn times<R: Real>(a: Option<&Complex<R>>, b: Option<&Complex<R>>, count: &mut u64) -> Option<Complex<R>> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.mul_counted(b, count)),
        (Some(a), None) | (None, Some(a)) => Some(*a),
        (None, None) => None,
    }
}

/// Adds the second derivatives of one monomial into the upper triangle.
///
/// Off the diagonal, entry `(a, b)` of the variable product is the product
/// of everything except `x_a` and `x_b`: a running row product times a
/// stored backward product. It is scaled by the common factor and by
/// `e_a e_b`. On the diagonal, with `M` the variables of exponent at least
/// two, `d^2/dx_k^2 = c e_k (e_k - 1) G prod_{j in M, j != k} x_j^2` where
/// `G = prod_M x^{e-2} prod_{e=1} x`; the products of squares come from the
/// same scheme applied to the squares.
fn monomial_hessian<R: Real>(
    mono: &Monomial<R>,
    x: &[Complex<R>],
    table: &PowerTable<Complex<R>>,
    counts: &mut OpCounts,
    hess: &mut ComplexMatrix<R>,
) {
    if mono.shape() != MonomialShape::General {
        return;
    }
    let support = mono.support();
    let e = mono.exponents();
    let c = mono.coefficient().coeff(0);
    let m = support.len();

    if m >= 2 {
        let vars: Vec<&Complex<R>> = support.iter().map(|&i| &x[i]).collect();
        let p = products(&vars, &mut counts.product);
        let mut cf = c;
        for (i, k) in mono.common_factor() {
            cf = cf.mul_counted(table.power(x, i, k), &mut counts.common_factor);
        }
        for a in 0..m - 1 {
            let mut running = p.prefix(a).copied();
            for b in a + 1..m {
                let rest = times(running.as_ref(), p.suffix(b + 1), &mut counts.other);
                let entry = match rest {
                    Some(r) => cf.mul_counted(&r, &mut counts.other),
                    None => cf,
                };
                let w = e[support[a]] as u64 * e[support[b]] as u64;
                hess[(support[a], support[b])] += entry.mul_int(w);
                if b + 1 < m {
                    running = times(running.as_ref(), Some(vars[b]), &mut counts.other);
                }
            }
        }
    }

    let heavy: Vec<usize> = support.iter().copied().filter(|&i| e[i] >= 2).collect();
    if heavy.is_empty() {
        return;
    }
    let mut g: Option<Complex<R>> = None;
    for &i in support {
        let k = if e[i] >= 2 { e[i] - 2 } else { 1 };
        if k >= 1 {
            g = times(g.as_ref(), Some(table.power(x, i, k)), &mut counts.other);
        }
    }
    let cg = match g {
        Some(g) => c.mul_counted(&g, &mut counts.other),
        None => c,
    };
    let squares: Vec<&Complex<R>> = heavy.iter().map(|&i| table.get(i, 2)).collect();
    let others: Vec<Option<Complex<R>>> = match squares.len() {
        1 => vec![None],
        2 => vec![Some(*squares[1]), Some(*squares[0])],
        _ => products(&squares, &mut counts.product).gradient.into_iter().map(Some).collect(),
    };
    for (&i, o) in heavy.iter().zip(others) {
        let entry = match o {
            Some(o) => cg.mul_counted(&o, &mut counts.other),
            None => cg,
        };
        hess[(i, i)] += entry.mul_int(e[i] as u64 * (e[i] as u64 - 1));
    }
}

/// Value, gradient and Hessian of every polynomial at `x`, with coefficients
/// taken at `t = 0`. Polynomials are distributed over the crew.
pub fn hessian_point<R: Real>(
    sys: &SparseSystem<R>,
    x: &[Complex<R>],
    crew: &WorkCrew,
) -> Result<Vec<HessResult<R>>, EvalError> {
    hessian_point_counted(sys, x, crew).map(|(r, _)| r)
}

pub fn hessian_point_counted<R: Real>(
    sys: &SparseSystem<R>,
    x: &[Complex<R>],
    crew: &WorkCrew,
) -> Result<(Vec<HessResult<R>>, OpCounts), EvalError> {
    check_input(sys, x)?;
    let n = sys.n();
    let mut counts = OpCounts::default();
    let need = PowerTable::<Complex<R>>::hessian_exponents(sys);
    let table = PowerTable::build(x, &need, &mut counts.power_table);
    let (results, scratch) = crew.map_with(sys.num_polys(), OpCounts::default, |c, i| {
        let mut value = Complex::zero();
        let mut gradient = vec![Complex::zero(); n];
        let mut hessian = ComplexMatrix::zeros(n, n);
        for mono in &sys.polys()[i] {
            value += monomial_kernel(mono, x, &table, c, |k, g| gradient[k] += g);
            monomial_hessian(mono, x, &table, c, &mut hessian);
        }
        for a in 0..n {
            for b in a + 1..n {
                hessian[(b, a)] = hessian[(a, b)];
            }
        }
        HessResult { value, gradient, hessian }
    });
    for c in &scratch {
        counts.add(c);
    }
    Ok((results, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polysys::random_point;
    use crate::series::TruncatedSeries;
    use crate::xprec::QuadDouble;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type QD = QuadDouble;

    fn single(mono: Monomial<QD>) -> SparseSystem<QD> {
        let n = mono.exponents().len();
        SparseSystem::new(n, 0, vec![vec![mono]]).unwrap()
    }

    #[test]
    fn square_of_one_variable() {
        let sys = single(Monomial::new(TruncatedSeries::one(0), vec![2]));
        let c = Complex::<QD>::from_f64(0.3, -0.7);
        let r = &hessian_point(&sys, &[c], &WorkCrew::sequential()).unwrap()[0];
        assert_eq!(r.value, c * c);
        assert_eq!(r.gradient, vec![c.mul_f64(2.0)]);
        assert_eq!(r.hessian[(0, 0)], Complex::from_f64(2.0, 0.0));
    }

    #[test]
    fn eight_variable_product_entries() {
        // distinct primes make each entry identify the factors it contains
        let primes = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
        let x: Vec<Complex<QD>> = primes.iter().map(|&p| Complex::from_f64(p, 0.0)).collect();
        let sys = single(Monomial::new(TruncatedSeries::one(0), vec![1; 8]));
        let r = &hessian_point(&sys, &x, &WorkCrew::sequential()).unwrap()[0];
        let all: f64 = primes.iter().product();
        for i in 0..8 {
            assert!(r.hessian[(i, i)].is_zero());
            for j in 0..8 {
                if i != j {
                    assert_eq!(r.hessian[(i, j)].re.to_f64(), all / (primes[i] * primes[j]), "({i},{j})");
                }
            }
        }
    }

    #[test]
    fn symmetric_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let sys = crate::polysys::generate_random::<QD>(5, 6, 4, rng.random(), 0).unwrap();
        let x = random_point::<QD>(5, 5);
        for r in hessian_point(&sys, &x, &WorkCrew::new(2).unwrap()).unwrap() {
            for a in 0..5 {
                for b in 0..5 {
                    assert_eq!(r.hessian[(a, b)].re.limbs(), r.hessian[(b, a)].re.limbs());
                    assert_eq!(r.hessian[(a, b)].im.limbs(), r.hessian[(b, a)].im.limbs());
                }
            }
        }
    }

    #[test]
    fn squares_use_the_product_scheme() {
        // four variables with exponent >= 2: off-diagonal products need
        // 3*4-5 = 7 and the squares another 7
        let sys = single(Monomial::new(TruncatedSeries::one(0), vec![2, 3, 2, 4]));
        let x = random_point::<QD>(4, 6);
        let (_, counts) = hessian_point_counted(&sys, &x, &WorkCrew::sequential()).unwrap();
        // one run of the kernel for value and gradient, one for the
        // off-diagonal part, one for the squares
        assert_eq!(counts.product, 7 * 3);
    }

    /// `f(x + h e_a + h e_b)`-style second difference with the naive
    /// evaluator.
    fn second_difference(mono: &Monomial<QD>, x: &[Complex<QD>], a: usize, b: usize, h: Complex<QD>) -> Complex<QD> {
        let f = |da: f64, db: f64| {
            let mut y = x.to_vec();
            y[a] += h.mul_f64(da);
            y[b] += h.mul_f64(db);
            mono.eval_naive(&y, Complex::zero())
        };
        if a == b {
            (f(1.0, 0.0) - f(0.0, 0.0).mul_f64(2.0) + f(-1.0, 0.0)) / (h * h)
        } else {
            (f(1.0, 1.0) - f(1.0, -1.0) - f(-1.0, 1.0) + f(-1.0, -1.0)) / (h * h).mul_f64(4.0)
        }
    }

    #[test]
    fn degree_eight_monomial_against_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = Complex::<QD>::from_real(QD::parse_decimal("1e-15").unwrap());
        for trial in 0..6 {
            // total degree eight spread over five variables
            let mut e = vec![0u32; 5];
            for _ in 0..8 {
                e[rng.random_range(0..5)] += 1;
            }
            let c = Complex::<QD>::from_angle(rng.random_range(0.0..std::f64::consts::TAU));
            let mono = Monomial::new(TruncatedSeries::constant(c, 0), e.clone());
            let x = random_point::<QD>(5, 100 + trial);
            let r = &hessian_point(&single(mono.clone()), &x, &WorkCrew::sequential()).unwrap()[0];
            let scale = r.hessian.max_abs().to_f64();
            for a in 0..5 {
                for b in 0..5 {
                    let fd = second_difference(&mono, &x, a, b, h);
                    let err = (r.hessian[(a, b)] - fd).abs().to_f64() / scale;
                    assert!(err <= 1e-20, "e = {e:?}, ({a},{b}): {err:e}");
                }
            }
        }
    }

    #[test]
    fn gradients_match_series_jacobian() {
        let sys = crate::polysys::generate_random::<QD>(4, 7, 5, 77, 0).unwrap();
        let x = random_point::<QD>(4, 78);
        let crew = WorkCrew::sequential();
        let hess = hessian_point(&sys, &x, &crew).unwrap();
        let xs: Vec<TruncatedSeries<QD>> = x.iter().map(|&c| TruncatedSeries::constant(c, 0)).collect();
        let jac = super::super::eval_diff_system(&sys, &xs, &crew).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = hess[i].gradient[j];
                let b = jac.jacobian[i][j].coeff(0);
                assert!((a - b).abs().to_f64() <= 4.0 * QD::EPSILON * b.abs().to_f64().max(1.0));
            }
        }
    }
}
