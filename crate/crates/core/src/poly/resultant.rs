use num_rational::BigRational;
use num_traits::Zero;

use super::bi::{BiPoly, Variable};
use super::scalar::Scalar;
use super::uni::UniPoly;
use crate::error::{Result, VortexError};

/// Banded Sylvester layout from coefficient lists given lowest degree first.
fn layout<E: Clone>(a: &[E], b: &[E], zero: E) -> Vec<Vec<E>> {
    let m = a.len() - 1;
    let n = b.len() - 1;
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in a.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in b.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

fn nonzero<T: Scalar>(p: &UniPoly<T>, name: &str) -> Result<usize> {
    p.degree()
        .ok_or_else(|| VortexError::DegeneratePolynomial(format!("{name} is the zero polynomial")))
}

/// Sylvester matrix of dimension `deg a + deg b`, rows of `a` first.
pub fn sylvester_matrix<T: Scalar>(a: &UniPoly<T>, b: &UniPoly<T>) -> Result<Vec<Vec<T>>> {
    nonzero(a, "first argument")?;
    nonzero(b, "second argument")?;
    Ok(layout(a.coeffs(), b.coeffs(), T::zero()))
}

/// Sylvester matrix with `a` and `b` treated as having degrees `m` and `n`
/// (leading coefficients may vanish).
pub fn sylvester_matrix_formal<T: Scalar>(
    a: &UniPoly<T>,
    m: usize,
    b: &UniPoly<T>,
    n: usize,
) -> Result<Vec<Vec<T>>> {
    Ok(layout(&a.padded(m)?, &b.padded(n)?, T::zero()))
}

pub fn resultant<T: Scalar>(a: &UniPoly<T>, b: &UniPoly<T>) -> Result<T> {
    Ok(T::determinant(sylvester_matrix(a, b)?))
}

pub fn resultant_formal<T: Scalar>(a: &UniPoly<T>, m: usize, b: &UniPoly<T>, n: usize) -> Result<T> {
    Ok(T::determinant(sylvester_matrix_formal(a, m, b, n)?))
}

/// Resultant of `a` and `b` with respect to `v`; the result is a polynomial in
/// the other variable.
pub fn resultant_in(v: Variable, a: &BiPoly<BigRational>, b: &BiPoly<BigRational>) -> Result<UniPoly<BigRational>> {
    let m = a
        .degree_in(v)
        .ok_or_else(|| VortexError::DegeneratePolynomial("first argument is zero".into()))?;
    let n = b
        .degree_in(v)
        .ok_or_else(|| VortexError::DegeneratePolynomial("second argument is zero".into()))?;
    resultant_in_formal(v, a, m, b, n)
}

/// As [`resultant_in`] with prescribed formal degrees in `v`.
pub fn resultant_in_formal(
    v: Variable,
    a: &BiPoly<BigRational>,
    m: usize,
    b: &BiPoly<BigRational>,
    n: usize,
) -> Result<UniPoly<BigRational>> {
    let ca = pad_rows(a.coeffs_in(v), m)?;
    let cb = pad_rows(b.coeffs_in(v), n)?;
    let max_deg = |c: &[UniPoly<BigRational>]| c.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
    let bound = n * max_deg(&ca) + m * max_deg(&cb);
    let nodes: Vec<BigRational> = (0..=bound as i64).map(BigRational::from_i64).collect();
    let values: Vec<BigRational> = nodes
        .iter()
        .map(|t| {
            let ea: Vec<BigRational> = ca.iter().map(|p| p.eval(t)).collect();
            let eb: Vec<BigRational> = cb.iter().map(|p| p.eval(t)).collect();
            BigRational::determinant(layout(&ea, &eb, BigRational::zero()))
        })
        .collect();
    Ok(interpolate(&nodes, &values))
}

fn pad_rows(mut rows: Vec<UniPoly<BigRational>>, deg: usize) -> Result<Vec<UniPoly<BigRational>>> {
    if rows.len() > deg + 1 {
        return Err(VortexError::DegeneratePolynomial(format!(
            "degree {} exceeds formal degree {deg}",
            rows.len() - 1
        )));
    }
    rows.resize(deg + 1, UniPoly::zero());
    Ok(rows)
}

/// Newton divided-difference interpolation, converted to monomial form.
fn interpolate(nodes: &[BigRational], values: &[BigRational]) -> UniPoly<BigRational> {
    let n = nodes.len();
    let mut dd = values.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&nodes[i] - &nodes[i - level]);
        }
    }
    let mut p = UniPoly::constant(dd[n - 1].clone());
    for i in (0..n - 1).rev() {
        let factor = UniPoly::new(vec![-nodes[i].clone(), BigRational::from_i64(1)]);
        p = &(&p * &factor) + &UniPoly::constant(dd[i].clone());
    }
    p
}

/// Discriminant with the sign convention that makes the quadratic case `b²−4ac`.
pub fn discriminant<T: Scalar>(p: &UniPoly<T>) -> Result<T> {
    let n = p.degree().unwrap_or(0);
    if n < 2 {
        return Err(VortexError::DegeneratePolynomial(
            "discriminant needs degree at least 2".into(),
        ));
    }
    let r = resultant(p, &p.derivative())? / p.leading();
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -r } else { r })
}

/// Result of eliminating `y` and then `x` from three bivariate polynomials.
#[derive(Debug, Clone)]
pub struct Elimination {
    pub value: BigRational,
    /// `res(f, g; y)`
    pub first: UniPoly<BigRational>,
    /// `res(g, h; y)`
    pub second: UniPoly<BigRational>,
}

/// `res(res(f,g;y), res(g,h;y); x)`. Vanishing is necessary, not sufficient,
/// for a common root of all three.
pub fn eliminate_three(
    f: &BiPoly<BigRational>,
    g: &BiPoly<BigRational>,
    h: &BiPoly<BigRational>,
) -> Result<Elimination> {
    let first = resultant_in(Variable::Y, f, g)?;
    let second = resultant_in(Variable::Y, g, h)?;
    if first.is_zero() || second.is_zero() {
        return Err(VortexError::DegeneratePolynomial(
            "an intermediate resultant vanishes identically; perturb the inputs".into(),
        ));
    }
    let value = resultant(&first, &second)?;
    Ok(Elimination { value, first, second })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn qp(c: &[i64]) -> UniPoly<BigRational> {
        UniPoly::new(c.iter().map(|&v| q(v, 1)).collect())
    }

    #[test]
    fn sylvester_layout_example() {
        let m = sylvester_matrix(&qp(&[-1, 0, 1]), &qp(&[-1, 1])).unwrap();
        let expect = vec![
            vec![q(1, 1), q(0, 1), q(-1, 1)],
            vec![q(1, 1), q(-1, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1), q(-1, 1)],
        ];
        assert_eq!(m, expect);
        let m = sylvester_matrix(&qp(&[1, 2, 3]), &qp(&[1, 1, 1, 1])).unwrap();
        assert_eq!((m.len(), m[0].len()), (5, 5));
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(resultant(&qp(&[-1, 0, 1]), &qp(&[-1, 1])).unwrap(), q(0, 1));
        assert_eq!(resultant(&qp(&[1, 0, 1]), &qp(&[-1, 1])).unwrap(), q(2, 1));
        assert!(resultant(&qp(&[]), &qp(&[1, 1])).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let (a, b, c) = (q(3, 2), q(-5, 1), q(7, 3));
        let p = UniPoly::new(vec![c.clone(), b.clone(), a.clone()]);
        assert_eq!(discriminant(&p).unwrap(), &b * &b - q(4, 1) * &a * &c);
        let dbl = UniPoly::from_roots(&[q(1, 1), q(1, 1), q(-2, 1)]);
        assert_eq!(discriminant(&dbl).unwrap(), q(0, 1));
        let (pp, qq) = (q(-2, 1), q(3, 5));
        let dep = UniPoly::new(vec![qq.clone(), pp.clone(), q(0, 1), q(1, 1)]);
        let expect = q(-4, 1) * &pp * &pp * &pp - q(27, 1) * &qq * &qq;
        assert_eq!(discriminant(&dep).unwrap(), expect);
        assert!(discriminant(&qp(&[1, 1])).is_err());
    }

    #[test]
    fn bivariate_resultant_eliminates() {
        // x² + y² − 5 and x − y − 1 meet at (2,1) and (−1,−2).
        let f = &(&BiPoly::x().pow(2) + &BiPoly::y().pow(2)) - &BiPoly::constant(q(5, 1));
        let g = BiPoly::linear(q(1, 1), q(-1, 1), q(-1, 1));
        let r = resultant_in(Variable::X, &f, &g).unwrap();
        assert_eq!(r.eval(&q(1, 1)), q(0, 1));
        assert_eq!(r.eval(&q(-2, 1)), q(0, 1));
        assert_eq!(r.degree(), Some(2));
    }

    #[test]
    fn three_lines_through_origin() {
        let f = BiPoly::linear(q(1, 1), q(1, 1), q(0, 1));
        let g = BiPoly::linear(q(1, 1), q(-1, 1), q(0, 1));
        let h = &BiPoly::x().pow(2) + &BiPoly::y().pow(2);
        assert_eq!(eliminate_three(&f, &g, &h).unwrap().value, q(0, 1));
    }

    #[test]
    fn formal_degree_pads_leading_zeros() {
        let a = qp(&[1, 1]);
        let b = qp(&[-2, 1]);
        // One vanishing leading coefficient of `a` contributes −lead(b).
        let actual = resultant(&a, &b).unwrap();
        assert_eq!(resultant_formal(&a, 2, &b, 1).unwrap(), -actual);
        let b3 = qp(&[-2, 3]);
        assert_eq!(
            resultant_formal(&a, 2, &b3, 1).unwrap(),
            q(-3, 1) * resultant(&a, &b3).unwrap()
        );
    }
}
