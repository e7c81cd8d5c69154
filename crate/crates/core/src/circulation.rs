use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, VortexError};

/// One of the three vortex pairs, by one-based labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pair {
    P12,
    P13,
    P23,
}

impl Pair {
    pub const ALL: [Pair; 3] = [Pair::P12, Pair::P13, Pair::P23];

    /// Zero-based indices of the two vortices.
    pub fn indices(self) -> (usize, usize) {
        match self {
            Pair::P12 => (0, 1),
            Pair::P13 => (0, 2),
            Pair::P23 => (1, 2),
        }
    }

    pub fn from_indices(i: usize, j: usize) -> Option<Pair> {
        match (i.min(j), i.max(j)) {
            (0, 1) => Some(Pair::P12),
            (0, 2) => Some(Pair::P13),
            (1, 2) => Some(Pair::P23),
            _ => None,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Pair::P12 => 0,
            Pair::P13 => 1,
            Pair::P23 => 2,
        }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, j) = self.indices();
        write!(f, "S{}{}", i + 1, j + 1)
    }
}

/// Parses `"p/q"`, an integer, or a decimal literal into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || VortexError::InvalidInput(format!("cannot parse {t:?} as a number"));
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(VortexError::InvalidInput(format!("zero denominator in {t:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    let v: f64 = t.parse().map_err(|_| bad())?;
    rational_from_f64(v)
}

pub fn rational_from_f64(v: f64) -> Result<BigRational> {
    BigRational::from_float(v)
        .ok_or_else(|| VortexError::InvalidInput(format!("non-finite value {v}")))
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// The three vortex strengths, each nonzero. Values are kept exactly as given:
/// the `f64` view drives the dynamics, the rational view drives the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct Circulations {
    g: [f64; 3],
    exact: [BigRational; 3],
}

impl Circulations {
    pub fn new(g1: f64, g2: f64, g3: f64) -> Result<Self> {
        let exact = [rational_from_f64(g1)?, rational_from_f64(g2)?, rational_from_f64(g3)?];
        Self::from_rationals(exact)
    }

    pub fn from_rationals(exact: [BigRational; 3]) -> Result<Self> {
        for (k, q) in exact.iter().enumerate() {
            if q.is_zero() {
                return Err(VortexError::InvalidInput(format!("circulation {} is zero", k + 1)));
            }
        }
        let g = [rational_to_f64(&exact[0]), rational_to_f64(&exact[1]), rational_to_f64(&exact[2])];
        Ok(Circulations { g, exact })
    }

    /// Accepts comma-separated entries such as `1/3,1/3,1/3`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(',').collect();
        if parts.len() != 3 {
            return Err(VortexError::InvalidInput(format!(
                "expected three circulations, got {}",
                parts.len()
            )));
        }
        Self::from_rationals([parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?])
    }

    /// Circulations on the symmetric line: Γ₁ = Γ₂ = (1 − Γ₃)/2.
    pub fn symmetric(gamma3: f64) -> Result<Self> {
        let g3 = rational_from_f64(gamma3)?;
        Self::symmetric_exact(g3)
    }

    pub fn symmetric_exact(gamma3: BigRational) -> Result<Self> {
        let half = (BigRational::from_integer(1.into()) - &gamma3) / BigRational::from_integer(2.into());
        Self::from_rationals([half.clone(), half, gamma3])
    }

    pub fn g1(&self) -> f64 {
        self.g[0]
    }
    pub fn g2(&self) -> f64 {
        self.g[1]
    }
    pub fn g3(&self) -> f64 {
        self.g[2]
    }
    pub fn as_array(&self) -> [f64; 3] {
        self.g
    }
    pub fn exact(&self) -> &[BigRational; 3] {
        &self.exact
    }

    /// Circulations reordered so that entry k is the original entry `perm[k]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Circulations {
            g: [self.g[perm[0]], self.g[perm[1]], self.g[perm[2]]],
            exact: [
                self.exact[perm[0]].clone(),
                self.exact[perm[1]].clone(),
                self.exact[perm[2]].clone(),
            ],
        }
    }

    pub fn invariants(&self) -> SymmetricInvariants {
        symmetric_invariants(self)
    }

    pub fn pair_sum(&self, p: Pair) -> f64 {
        let (i, j) = p.indices();
        self.g[i] + self.g[j]
    }

    pub fn pair_product(&self, p: Pair) -> f64 {
        let (i, j) = p.indices();
        self.g[i] * self.g[j]
    }
}

impl fmt::Display for Circulations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exact
            .iter()
            .map(|q| {
                if q.denom().bits() <= 20 {
                    q.to_string()
                } else {
                    format!("{}", rational_to_f64(q))
                }
            })
            .collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for Circulations {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.g.serialize(s)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrText {
    Number(f64),
    Text(String),
}

impl NumberOrText {
    fn to_rational(&self) -> Result<BigRational> {
        match self {
            NumberOrText::Number(v) => rational_from_f64(*v),
            NumberOrText::Text(t) => parse_rational(t),
        }
    }
}

/// Deserializes a number or a `"p/q"` string.
pub fn deserialize_real<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    let v = NumberOrText::deserialize(d)?;
    v.to_rational().map(|q| rational_to_f64(&q)).map_err(serde::de::Error::custom)
}

impl<'de> Deserialize<'de> for Circulations {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<NumberOrText> = Vec::deserialize(d)?;
        if raw.len() != 3 {
            return Err(serde::de::Error::custom("expected three circulations"));
        }
        let q: Result<Vec<BigRational>> = raw.iter().map(|r| r.to_rational()).collect();
        let q = q.map_err(serde::de::Error::custom)?;
        Circulations::from_rationals([q[0].clone(), q[1].clone(), q[2].clone()])
            .map_err(serde::de::Error::custom)
    }
}

/// Elementary symmetric polynomials of the circulations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricInvariants {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

pub fn symmetric_invariants(c: &Circulations) -> SymmetricInvariants {
    let [a, b, d] = c.g;
    SymmetricInvariants { gamma1: a + b + d, gamma2: a * b + d * a + b * d, gamma3: a * b * d }
}

/// Exact symmetric invariants.
pub fn symmetric_invariants_exact(c: &Circulations) -> [BigRational; 3] {
    let [a, b, d] = &c.exact;
    [a + b + d, a * b + d * a + b * d, a * b * d]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_of_examples() {
        let s = symmetric_invariants(&Circulations::new(1.0, 1.0, 1.0).unwrap());
        assert_eq!((s.gamma1, s.gamma2, s.gamma3), (3.0, 3.0, 1.0));
        let s = symmetric_invariants(&Circulations::new(2.0, 1.0, -3.0).unwrap());
        assert_eq!((s.gamma1, s.gamma2, s.gamma3), (0.0, -7.0, -6.0));
        let c = Circulations::parse("1/3,1/3,1/3").unwrap();
        let e = symmetric_invariants_exact(&c);
        assert_eq!(e[0], BigRational::from_integer(1.into()));
        assert_eq!(e[1], BigRational::new(1.into(), 3.into()));
        assert_eq!(e[2], BigRational::new(1.into(), 27.into()));
    }

    #[test]
    fn zero_circulation_rejected() {
        assert!(Circulations::new(1.0, 0.0, 2.0).is_err());
        assert!(Circulations::parse("1,0/5,1").is_err());
        assert!(Circulations::parse("1,2").is_err());
    }

    #[test]
    fn parses_mixed_forms() {
        let c = Circulations::parse(" -3/2, 0.25 ,2").unwrap();
        assert_eq!(c.as_array(), [-1.5, 0.25, 2.0]);
        let c: Circulations = serde_json::from_str(r#"["1/3", 0.5, "-2"]"#).unwrap();
        assert_eq!(c.exact()[0], BigRational::new(1.into(), 3.into()));
        assert_eq!(c.g2(), 0.5);
    }

    #[test]
    fn permutation_keeps_invariants() {
        let c = Circulations::new(1.0, -1.0, 1.0).unwrap();
        let p = c.permuted([0, 2, 1]);
        assert_eq!(p.as_array(), [1.0, 1.0, -1.0]);
        assert_eq!(symmetric_invariants(&c), symmetric_invariants(&p));
    }
}
