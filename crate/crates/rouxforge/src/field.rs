//! Finite fields `F_p[x]/(f)` with table-driven arithmetic.
//!
//! Elements are `u32` codes: the polynomial `c_0 + c_1 x + ... + c_{k-1} x^{k-1}`
//! is stored as `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`. The code is the canonical
//! key, so `0` is zero, `1` is one and the prime subfield is `0..p`.

use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

const MAX_ORDER: u64 = 1 << 20;
const ADD_TABLE_LIMIT: u32 = 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("polynomial has degree {found}, expected a monic polynomial of degree {expected}")]
    BadPolynomial { expected: u32, found: usize },
    #[error("polynomial is reducible over F_{0}")]
    Reducible(u64),
    #[error("no built-in irreducible polynomial for q = {0}; supply one")]
    NoBuiltin(u64),
    #[error("field order {0} exceeds 2^20")]
    TooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    MismatchedSpecs,
    #[error("q = {0} is even; the only real character is trivial")]
    EvenOrder(u64),
    #[error("coefficient vector has length {found}, expected {expected}")]
    BadCoefficients { expected: usize, found: usize },
}

/// `irreducible` is low-degree-first and includes the leading 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: u32,
    pub irreducible: Vec<u64>,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q = p^k`, or `None` when `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut m, mut k) = (q, 0);
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

impl FieldSpec {
    pub fn new(p: u64, k: u32, irreducible: Vec<u64>) -> Result<Self, FieldError> {
        let mut poly: Vec<u64> = irreducible.iter().map(|c| c % p.max(1)).collect();
        if poly.len() == k as usize {
            poly.push(1);
        }
        let spec = FieldSpec { p, k, irreducible: poly };
        spec.validate()?;
        Ok(spec)
    }

    pub fn prime(p: u64) -> Result<Self, FieldError> {
        Self::new(p, 1, vec![0, 1])
    }

    /// Built-in choice for `q`: prime fields directly, a fixed table otherwise.
    pub fn for_order(q: u64) -> Result<Self, FieldError> {
        let (p, k) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        if k == 1 {
            return Self::prime(p);
        }
        let poly: &[u64] = match q {
            4 => &[1, 1, 1],
            8 => &[1, 1, 0, 1],
            9 => &[1, 0, 1],
            16 => &[1, 1, 0, 0, 1],
            25 => &[2, 0, 1],
            27 => &[1, 2, 0, 1],
            32 => &[1, 0, 1, 0, 0, 1],
            49 => &[4, 0, 1],
            64 => &[1, 1, 0, 0, 0, 0, 1],
            81 => &[2, 0, 0, 2, 1],
            121 => &[1, 0, 1],
            169 => &[2, 0, 1],
            _ => return Err(FieldError::NoBuiltin(q)),
        };
        Self::new(p, k, poly.to_vec())
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    fn validate(&self) -> Result<(), FieldError> {
        if !is_prime(self.p) {
            return Err(FieldError::NotPrime(self.p));
        }
        let q = self.p.checked_pow(self.k).unwrap_or(u64::MAX);
        if q > MAX_ORDER {
            return Err(FieldError::TooLarge(q));
        }
        let f = &self.irreducible;
        if self.k == 0 || f.len() != self.k as usize + 1 || f[self.k as usize] != 1 {
            return Err(FieldError::BadPolynomial { expected: self.k, found: f.len().saturating_sub(1) });
        }
        if !is_irreducible(f, self.p) {
            return Err(FieldError::Reducible(self.p));
        }
        Ok(())
    }
}

/// Remainder of `a` modulo the monic `b` over `F_p`.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree at most `deg/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g: Vec<u64> = (0..d).map(|i| (code / p.pow(i as u32)) % p).collect();
            g.push(1);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    p: u32,
    k: u32,
    q: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec
    }
}
impl Eq for Field {}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self, FieldError> {
        spec.validate()?;
        let p = spec.p as u32;
        let k = spec.k;
        let q = spec.order() as u32;
        let mut field = Field { spec, p, k, q, exp: Vec::new(), log: Vec::new(), neg: Vec::new(), add: None };
        field.neg = (0..q).map(|a| field.neg_slow(a)).collect();
        if k > 1 && q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = field.add_slow(a, b);
                }
            }
            field.add = Some(table);
        }
        field.build_logs();
        Ok(field)
    }

    pub fn of_order(q: u64) -> Result<Self, FieldError> {
        Self::new(FieldSpec::for_order(q)?)
    }

    fn build_logs(&mut self) {
        let q = self.q;
        for cand in 1..q.max(2) {
            let mut exp = Vec::with_capacity((q - 1) as usize);
            let mut seen = vec![false; q as usize];
            let mut a = 1u32;
            let mut ok = true;
            for _ in 0..q - 1 {
                if seen[a as usize] {
                    ok = false;
                    break;
                }
                seen[a as usize] = true;
                exp.push(a);
                a = self.mul_slow(a, cand);
            }
            if ok && a == 1 {
                let mut log = vec![0u32; q as usize];
                for (i, &e) in exp.iter().enumerate() {
                    log[e as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("a finite field always has a primitive element");
    }

    fn digits(&self, a: u32) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut a = a;
        for _ in 0..self.k {
            out.push((a % self.p) as u64);
            a /= self.p;
        }
        out
    }

    fn undigits(&self, c: &[u64]) -> u32 {
        c.iter().rev().fold(0u32, |acc, &d| acc * self.p + d as u32)
    }

    fn add_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let c: Vec<u64> = self.digits(a).iter().zip(self.digits(b)).map(|(x, y)| (x + y) % p).collect();
        self.undigits(&c)
    }

    fn neg_slow(&self, a: u32) -> u32 {
        let p = self.p as u64;
        let c: Vec<u64> = self.digits(a).iter().map(|x| (p - x) % p).collect();
        self.undigits(&c)
    }

    fn mul_slow(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let (x, y) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * self.k as usize];
        for (i, &u) in x.iter().enumerate() {
            for (j, &v) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u * v) % p;
            }
        }
        let mut r = poly_rem(&prod, &self.spec.irreducible, p);
        r.resize(self.k as usize, 0);
        self.undigits(&r)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }
    pub fn order(&self) -> u32 {
        self.q
    }
    pub fn characteristic(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            (a + b) % self.p
        } else if let Some(t) = &self.add {
            t[(a * self.q + b) as usize]
        } else {
            self.add_slow(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let m = self.q - 1;
        let e = (self.log[a as usize] + self.log[b as usize]) % m;
        self.exp[e as usize]
    }

    /// Panics on zero; use [`Field::checked_inv`] for fallible inversion.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let m = self.q - 1;
        self.exp[((m - self.log[a as usize]) % m) as usize]
    }

    pub fn checked_inv(&self, a: u32) -> Result<u32, FieldError> {
        if a == 0 {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(self.inv(a))
        }
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, FieldError> {
        Ok(self.mul(a, self.checked_inv(b)?))
    }

    /// `a^e` for a signed exponent; `0^e` is 0 for `e > 0` and 1 for `e = 0`.
    pub fn pow(&self, a: u32, e: i64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            assert!(e > 0, "negative power of zero");
            return 0;
        }
        let m = (self.q - 1) as i64;
        let l = (self.log[a as usize] as i64 * e.rem_euclid(m)).rem_euclid(m);
        self.exp[l as usize]
    }

    /// `a^(p^power)`.
    pub fn frobenius(&self, a: u32, power: u32) -> u32 {
        let e = (self.p as u64).pow(power % self.k) as i64;
        self.pow(a, e)
    }

    /// The smallest code of multiplicative order `q - 1`.
    pub fn primitive_element(&self) -> u32 {
        if self.q == 2 {
            1
        } else {
            self.exp[1]
        }
    }

    /// Discrete log to the base [`Field::primitive_element`].
    pub fn log(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    pub fn exp(&self, e: i64) -> u32 {
        let m = (self.q - 1) as i64;
        self.exp[e.rem_euclid(m) as usize]
    }

    pub fn multiplicative_order(&self, a: u32) -> Option<u32> {
        let l = self.log(a)?;
        let m = self.q - 1;
        Some(m / gcd(l, m))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> u32 {
        n.rem_euclid(self.p as i64) as u32
    }

    pub fn from_coeffs(&self, c: &[u64]) -> Result<u32, FieldError> {
        if c.len() != self.k as usize {
            return Err(FieldError::BadCoefficients { expected: self.k as usize, found: c.len() });
        }
        let p = self.p as u64;
        let reduced: Vec<u64> = c.iter().map(|x| x % p).collect();
        Ok(self.undigits(&reduced))
    }

    pub fn coeffs(&self, a: u32) -> Vec<u64> {
        self.digits(a)
    }

    /// The polynomial variable `x` (equal to `0*1 + 1*x`), or 1 when `k = 1`.
    pub fn generator_x(&self) -> u32 {
        if self.k == 1 {
            1
        } else {
            self.p
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.q
    }

    pub fn is_square(&self, a: u32) -> bool {
        match self.log(a) {
            None => true,
            Some(l) => self.p == 2 || l % 2 == 0,
        }
    }

    pub fn quadratic_residue_character(&self) -> Result<MultiplicativeCharacter, FieldError> {
        if self.p == 2 {
            return Err(FieldError::EvenOrder(self.q as u64));
        }
        Ok(MultiplicativeCharacter::new(self, (self.q - 1) / 2))
    }
}

pub fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// `alpha'(lambda^j) = j * level` in `Z_{q-1}`, with `lambda` the primitive element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicativeCharacter {
    pub generator: u32,
    pub level: u32,
    pub modulus: u32,
}

impl MultiplicativeCharacter {
    pub fn new(field: &Field, level: u32) -> Self {
        let modulus = field.order() - 1;
        MultiplicativeCharacter { generator: field.primitive_element(), level: level % modulus.max(1), modulus }
    }

    /// Exponent of `alpha'(a)` in `Z_modulus`; `a` must be nonzero.
    pub fn eval(&self, field: &Field, a: u32) -> u32 {
        let l = field.log(a).expect("character evaluated at zero") as u64;
        ((l * self.level as u64) % self.modulus as u64) as u32
    }

    pub fn image_order(&self) -> u32 {
        self.modulus / gcd(self.level, self.modulus)
    }

    pub fn is_trivial(&self) -> bool {
        self.level == 0
    }

    /// `+1` or `-1` for a real character; `None` otherwise.
    pub fn sign(&self, field: &Field, a: u32) -> Option<i32> {
        let e = self.eval(field, a);
        if e == 0 {
            Some(1)
        } else if 2 * e == self.modulus {
            Some(-1)
        } else {
            None
        }
    }
}

/// A field element carrying its field, for checked arithmetic across APIs.
#[derive(Clone, Debug)]
pub struct FieldElement {
    pub field: Arc<Field>,
    pub value: u32,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field.spec == other.field.spec && self.value == other.value
    }
}
impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &Arc<Field>, value: u32) -> Self {
        FieldElement { field: Arc::clone(field), value: value % field.order() }
    }

    pub fn coeffs(&self) -> Vec<u64> {
        self.field.coeffs(self.value)
    }

    pub fn frobenius(&self, power: u32) -> Self {
        FieldElement { field: Arc::clone(&self.field), value: self.field.frobenius(self.value, power) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn field_arith(a: &FieldElement, b: &FieldElement, op: FieldOp) -> Result<FieldElement, FieldError> {
    if a.field.spec != b.field.spec {
        return Err(FieldError::MismatchedSpecs);
    }
    let f = &a.field;
    let value = match op {
        FieldOp::Add => f.add(a.value, b.value),
        FieldOp::Sub => f.sub(a.value, b.value),
        FieldOp::Mul => f.mul(a.value, b.value),
        FieldOp::Div => f.div(a.value, b.value)?,
    };
    Ok(FieldElement { field: Arc::clone(f), value })
}

pub fn primitive_element(spec: &FieldSpec) -> Result<FieldElement, FieldError> {
    let field = Arc::new(Field::new(spec.clone())?);
    let g = field.primitive_element();
    Ok(FieldElement { field, value: g })
}

pub fn quadratic_residue_character(spec: &FieldSpec) -> Result<MultiplicativeCharacter, FieldError> {
    Field::new(spec.clone())?.quadratic_residue_character()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(f: &Arc<Field>, v: u32) -> FieldElement {
        FieldElement::new(f, v)
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = Arc::new(Field::of_order(5).unwrap());
        let r = field_arith(&el(&f5, 2), &el(&f5, 3), FieldOp::Mul).unwrap();
        assert_eq!(r.value, 1);
        let f7 = Field::of_order(7).unwrap();
        assert_eq!(f7.inv(3), 5);
        assert_eq!(field_arith(&el(&f5, 2), &el(&f5, 0), FieldOp::Div), Err(FieldError::DivisionByZero));
        let f7 = Arc::new(f7);
        assert_eq!(field_arith(&el(&f5, 1), &el(&f7, 1), FieldOp::Add), Err(FieldError::MismatchedSpecs));
    }

    #[test]
    fn f9_defining_relation_and_frobenius() {
        let f = Field::of_order(9).unwrap();
        let x = f.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f.mul(x, x), f.neg(1));
        assert_eq!(f.frobenius(x, 1), f.neg(x));
        for a in f.elements() {
            assert_eq!(f.frobenius(a, 2), a);
        }
    }

    #[test]
    fn frobenius_is_identity_on_prime_fields() {
        for p in [2u64, 3, 5, 7, 11, 13] {
            let f = Field::of_order(p).unwrap();
            for a in f.elements() {
                assert_eq!(f.frobenius(a, 1), a);
            }
        }
    }

    #[test]
    fn frobenius_is_automorphism_of_f49() {
        let f = Field::new(FieldSpec::new(7, 2, vec![4, 0, 1]).unwrap()).unwrap();
        let pow7 = |a: u32| (0..7).fold(1u32, |acc, _| f.mul_slow(acc, a));
        for a in f.elements() {
            assert_eq!(f.frobenius(a, 1), pow7(a));
            for b in f.elements() {
                assert_eq!(pow7(f.add_slow(a, b)), f.add_slow(pow7(a), pow7(b)));
                assert_eq!(pow7(f.mul_slow(a, b)), f.mul_slow(pow7(a), pow7(b)));
            }
        }
    }

    #[test]
    fn primitive_elements() {
        let order = |q: u64| {
            let f = Field::of_order(q).unwrap();
            let g = f.primitive_element();
            let mut a = g;
            let mut n = 1;
            while a != 1 {
                a = f.mul_slow(a, g);
                n += 1;
            }
            (g, n)
        };
        assert_eq!(order(5), (2, 4));
        assert_eq!(order(7), (3, 6));
        let f4 = Field::of_order(4).unwrap();
        assert_eq!(f4.primitive_element(), f4.generator_x());
        assert_eq!(order(4).1, 3);
        for q in [8u64, 9, 16, 25, 27, 32, 49] {
            assert_eq!(order(q).1 as u64, q - 1);
        }
    }

    #[test]
    fn builtin_table_fields_satisfy_axioms() {
        for q in [4u64, 8, 9, 16, 25, 27, 32, 49, 64, 81] {
            let f = Field::of_order(q).unwrap();
            let els: Vec<u32> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add_slow(a, b));
                    assert_eq!(f.mul(a, b), f.mul_slow(a, b));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
            let mut rng = 12345u64;
            for _ in 0..2000 {
                let mut next = || {
                    rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    ((rng >> 33) % q) as u32
                };
                let (a, b, c) = (next(), next(), next());
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            }
        }
        for q in [121u64, 169] {
            assert!(Field::of_order(q).is_ok());
        }
    }

    #[test]
    fn reducible_polynomials_are_rejected() {
        assert_eq!(FieldSpec::new(3, 2, vec![2, 0, 1]), Err(FieldError::Reducible(3)));
        assert_eq!(FieldSpec::new(2, 4, vec![1, 0, 1, 0, 1]), Err(FieldError::Reducible(2)));
        assert_eq!(FieldSpec::new(4, 1, vec![0, 1]), Err(FieldError::NotPrime(4)));
        assert!(FieldSpec::for_order(12).is_err());
        assert!(FieldSpec::new(3, 1, vec![0]).is_ok());
    }

    #[test]
    fn quadratic_character_values() {
        let f5 = Field::of_order(5).unwrap();
        let chi = f5.quadratic_residue_character().unwrap();
        assert_eq!(chi.sign(&f5, 4), Some(1));
        assert_eq!(chi.sign(&f5, 2), Some(-1));
        let f7 = Field::of_order(7).unwrap();
        let chi7 = f7.quadratic_residue_character().unwrap();
        assert_eq!(chi7.sign(&f7, f7.neg(1)), Some(-1));
        let f13 = Field::of_order(13).unwrap();
        let chi13 = f13.quadratic_residue_character().unwrap();
        assert_eq!(chi13.sign(&f13, f13.neg(1)), Some(1));
        assert!(Field::of_order(8).unwrap().quadratic_residue_character().is_err());
        for q in [5u64, 7, 9, 11, 13, 25, 27, 49, 81] {
            let f = Field::of_order(q).unwrap();
            let chi = f.quadratic_residue_character().unwrap();
            let squares: std::collections::HashSet<u32> = f.elements().map(|a| f.mul(a, a)).collect();
            for a in 1..f.order() {
                assert_eq!(chi.sign(&f, a) == Some(1), squares.contains(&a));
            }
        }
    }

    #[test]
    fn characters_are_homomorphisms() {
        for q in [5u64, 8, 9, 16, 27, 49, 81] {
            let f = Field::of_order(q).unwrap();
            for level in 0..f.order() - 1 {
                let chi = MultiplicativeCharacter::new(&f, level);
                let m = chi.modulus;
                for a in 1..f.order() {
                    for b in 1..f.order() {
                        assert_eq!(chi.eval(&f, f.mul(a, b)), (chi.eval(&f, a) + chi.eval(&f, b)) % m);
                    }
                }
                let image: std::collections::HashSet<u32> = (1..f.order()).map(|a| chi.eval(&f, a)).collect();
                assert_eq!(image.len() as u32, chi.image_order());
            }
        }
    }

    #[test]
    fn norm_map_is_onto_with_kernel_q_plus_one() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = Field::of_order(q * q).unwrap();
            let norm = |a: u32| f.pow(a, q as i64 + 1);
            let mut counts = std::collections::HashMap::new();
            for a in 1..f.order() {
                let n = norm(a);
                assert_eq!(f.frobenius(n, f.degree() / 2), n, "norm lands in the subfield");
                *counts.entry(n).or_insert(0u64) += 1;
            }
            assert_eq!(counts.len() as u64, q - 1);
            assert!(counts.values().all(|&c| c == q + 1));
        }
    }
}
