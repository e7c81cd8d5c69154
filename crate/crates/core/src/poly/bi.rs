use std::ops::{Add, Mul, Neg, Sub};

use super::scalar::Scalar;
use super::uni::UniPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    X,
    Y,
}

/// Polynomial in `x` and `y`, stored as coefficients of `x^i` that are
/// themselves polynomials in `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly<T> {
    rows: Vec<UniPoly<T>>,
}

impl<T: Scalar> BiPoly<T> {
    pub fn new(mut rows: Vec<UniPoly<T>>) -> Self {
        while rows.last().is_some_and(|r| r.is_zero()) {
            rows.pop();
        }
        BiPoly { rows }
    }

    /// `grid[i][j]` is the coefficient of `x^i y^j`.
    pub fn from_grid(grid: Vec<Vec<T>>) -> Self {
        Self::new(grid.into_iter().map(UniPoly::new).collect())
    }

    pub fn zero() -> Self {
        BiPoly { rows: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![UniPoly::constant(c)])
    }

    pub fn x() -> Self {
        Self::new(vec![UniPoly::zero(), UniPoly::constant(T::one())])
    }

    pub fn y() -> Self {
        Self::new(vec![UniPoly::x()])
    }

    /// `a·x + b·y + c`
    pub fn linear(a: T, b: T, c: T) -> Self {
        Self::new(vec![UniPoly::new(vec![c, b]), UniPoly::constant(a)])
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.rows.get(i).map(|r| r.coeff(j)).unwrap_or_else(T::zero)
    }

    pub fn degree_in(&self, v: Variable) -> Option<usize> {
        match v {
            Variable::X => self.rows.len().checked_sub(1),
            Variable::Y => self.rows.iter().filter_map(|r| r.degree()).max(),
        }
    }

    /// Coefficients of successive powers of `v`, each a polynomial in the other variable.
    pub fn coeffs_in(&self, v: Variable) -> Vec<UniPoly<T>> {
        match v {
            Variable::X => self.rows.clone(),
            Variable::Y => {
                let dy = match self.degree_in(Variable::Y) {
                    Some(d) => d,
                    None => return Vec::new(),
                };
                (0..=dy)
                    .map(|j| UniPoly::new(self.rows.iter().map(|r| r.coeff(j)).collect()))
                    .collect()
            }
        }
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        self.rows
            .iter()
            .rev()
            .fold(T::zero(), |acc, r| acc * x.clone() + r.eval(y))
    }

    /// Substitutes a value for one variable.
    pub fn eval_in(&self, v: Variable, value: &T) -> UniPoly<T> {
        let parts = self.coeffs_in(v);
        parts
            .iter()
            .rev()
            .fold(UniPoly::zero(), |acc, r| &acc.scale(value) + r)
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.rows.iter().map(|r| r.scale(s)).collect())
    }

    pub fn derivative(&self, v: Variable) -> Self {
        match v {
            Variable::X => Self::new(
                self.rows
                    .iter()
                    .enumerate()
                    .skip(1)
                    .map(|(i, r)| r.scale(&T::from_i64(i as i64)))
                    .collect(),
            ),
            Variable::Y => Self::new(self.rows.iter().map(|r| r.derivative()).collect()),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::constant(T::one()), |acc, _| &acc * self)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U + Copy) -> BiPoly<U> {
        BiPoly::new(self.rows.iter().map(|r| r.map(f)).collect())
    }
}

impl<T: Scalar> Add for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn add(self, o: &BiPoly<T>) -> BiPoly<T> {
        let n = self.rows.len().max(o.rows.len());
        let z = UniPoly::zero();
        BiPoly::new(
            (0..n)
                .map(|i| self.rows.get(i).unwrap_or(&z) + o.rows.get(i).unwrap_or(&z))
                .collect(),
        )
    }
}

impl<T: Scalar> Sub for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn sub(self, o: &BiPoly<T>) -> BiPoly<T> {
        self + &(-o)
    }
}

impl<T: Scalar> Neg for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn neg(self) -> BiPoly<T> {
        BiPoly::new(self.rows.iter().map(|r| -r).collect())
    }
}

impl<T: Scalar> Mul for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn mul(self, o: &BiPoly<T>) -> BiPoly<T> {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero();
        }
        let mut rows = vec![UniPoly::zero(); self.rows.len() + o.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.rows.iter().enumerate() {
                rows[i + j] = &rows[i + j] + &(a * b);
            }
        }
        BiPoly::new(rows)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for BiPoly<T> {
            type Output = BiPoly<T>;
            fn $m(self, o: BiPoly<T>) -> BiPoly<T> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
