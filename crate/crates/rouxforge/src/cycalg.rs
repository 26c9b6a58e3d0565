//! The integral group algebra `Z[C_r]`, its characters and the Cayley lift.
//!
//! A cyclic element is an exponent `e` mod `r` standing for `exp(2 pi i e / r)`.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycError {
    #[error("group algebra orders differ: {0} vs {1}")]
    MismatchedR(u32, u32),
    #[error("matrix shapes differ")]
    MismatchedShape,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicElement {
    pub exp: u32,
    pub r: u32,
}

impl CyclicElement {
    pub fn new(exp: i64, r: u32) -> Self {
        CyclicElement { exp: exp.rem_euclid(r as i64) as u32, r }
    }
    pub fn mul(self, other: Self) -> Self {
        Self::new(self.exp as i64 + other.exp as i64, self.r)
    }
    pub fn inv(self) -> Self {
        Self::new(-(self.exp as i64), self.r)
    }
}

/// `exp(2 pi i e / r)`, exact at multiples of a quarter turn.
pub fn root_of_unity(e: i64, r: u32) -> Complex<f64> {
    let e = e.rem_euclid(r as i64) as u64;
    let r = r as u64;
    if (4 * e) % r == 0 {
        return match 4 * e / r {
            0 => Complex::new(1.0, 0.0),
            1 => Complex::new(0.0, 1.0),
            2 => Complex::new(-1.0, 0.0),
            _ => Complex::new(0.0, -1.0),
        };
    }
    Complex::from_polar(1.0, 2.0 * PI * e as f64 / r as f64)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupAlgebraElement {
    pub r: u32,
    pub coeffs: Vec<i64>,
}

impl GroupAlgebraElement {
    pub fn zero(r: u32) -> Self {
        GroupAlgebraElement { r, coeffs: vec![0; r as usize] }
    }

    pub fn delta(e: i64, r: u32) -> Self {
        let mut z = Self::zero(r);
        z.coeffs[e.rem_euclid(r as i64) as usize] = 1;
        z
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        GroupAlgebraElement { r: coeffs.len() as u32, coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycError> {
        if self.r != other.r {
            return Err(CycError::MismatchedR(self.r, other.r));
        }
        Ok(GroupAlgebraElement { r: self.r, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    /// Multiplication by the group element with exponent `e`.
    pub fn shift(&self, e: i64) -> Self {
        let r = self.r as i64;
        let mut out = Self::zero(self.r);
        for (h, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[(h as i64 + e).rem_euclid(r) as usize] += c;
        }
        out
    }

    /// The involution `g -> g^{-1}`.
    pub fn conj(&self) -> Self {
        let r = self.r as usize;
        let mut out = Self::zero(self.r);
        for (h, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[(r - h) % r] = c;
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.conj()
    }

    pub fn sum(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn support(&self) -> Vec<u32> {
        (0..self.r).filter(|&h| self.coeffs[h as usize] != 0).collect()
    }
}

pub fn algebra_mul(a: &GroupAlgebraElement, b: &GroupAlgebraElement) -> Result<GroupAlgebraElement, CycError> {
    if a.r != b.r {
        return Err(CycError::MismatchedR(a.r, b.r));
    }
    let r = a.r as usize;
    let mut out = GroupAlgebraElement::zero(a.r);
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            out.coeffs[(i + j) % r] += x * y;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicCharacter {
    pub r: u32,
    pub k: u32,
}

impl CyclicCharacter {
    pub fn new(k: i64, r: u32) -> Self {
        CyclicCharacter { r, k: k.rem_euclid(r as i64) as u32 }
    }
    /// Exponent of `alpha(g)` for the group element with exponent `e`.
    pub fn exponent(&self, e: u32) -> u32 {
        ((self.k as u64 * e as u64) % self.r as u64) as u32
    }
    pub fn eval(&self, e: u32) -> Complex<f64> {
        root_of_unity(self.exponent(e) as i64, self.r)
    }
    pub fn inverse(&self) -> Self {
        Self::new(-(self.k as i64), self.r)
    }
    /// `alpha(g)` is real, i.e. `+1` or `-1`.
    pub fn is_real_at(&self, e: u32) -> bool {
        (2 * self.exponent(e)) % self.r == 0
    }
}

/// `c_hat = sum_h c_h conj(alpha(h))`.
pub fn fourier_transform(c: &GroupAlgebraElement, alpha: CyclicCharacter) -> Complex<f64> {
    c.coeffs.iter().enumerate().map(|(h, &ch)| alpha.eval(h as u32).conj() * ch as f64).sum()
}

/// An `n x n` matrix over `Z[C_r]`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraMatrix {
    pub n: usize,
    pub r: u32,
    pub entries: Vec<GroupAlgebraElement>,
}

impl AlgebraMatrix {
    pub fn zero(n: usize, r: u32) -> Self {
        AlgebraMatrix { n, r, entries: vec![GroupAlgebraElement::zero(r); n * n] }
    }

    pub fn scalar(n: usize, e: i64, r: u32) -> Self {
        let mut m = Self::zero(n, r);
        for i in 0..n {
            m.entries[i * n + i] = GroupAlgebraElement::delta(e, r);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &GroupAlgebraElement {
        &self.entries[i * self.n + j]
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CycError> {
        if self.r != other.r {
            return Err(CycError::MismatchedR(self.r, other.r));
        }
        if self.n != other.n {
            return Err(CycError::MismatchedShape);
        }
        let n = self.n;
        let mut out = Self::zero(n, self.r);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let prod = algebra_mul(a, other.get(k, j))?;
                    out.entries[i * n + j] = out.entries[i * n + j].add(&prod)?;
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zero(n, self.r);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.get(i, j).conj();
            }
        }
        out
    }
}

/// Replaces each group element by its `r x r` left-regular permutation matrix.
///
/// Row `(i, h')` and column `(j, h)` sit at `i*r + h'` and `j*r + h`; the
/// entry is the coefficient of `h' - h` in `M_ij`.
pub fn cayley_lift(m: &AlgebraMatrix) -> Vec<Vec<i64>> {
    let r = m.r as usize;
    let dim = m.n * r;
    let mut out = vec![vec![0i64; dim]; dim];
    for i in 0..m.n {
        for j in 0..m.n {
            let c = m.get(i, j);
            for hp in 0..r {
                for h in 0..r {
                    out[i * r + hp][j * r + h] = c.coeffs[(hp + r - h) % r];
                }
            }
        }
    }
    out
}

/// Entrywise linear extension of `alpha`.
pub fn apply_character(m: &AlgebraMatrix, alpha: CyclicCharacter) -> DMatrix<Complex<f64>> {
    DMatrix::from_fn(m.n, m.n, |i, j| {
        m.get(i, j).coeffs.iter().enumerate().map(|(h, &c)| alpha.eval(h as u32) * c as f64).sum()
    })
}
