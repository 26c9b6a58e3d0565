//! Roux matrices over `C_r`: axioms, exact parameters, switching and idempotents.

use crate::cycalg::{fourier_transform, root_of_unity, AlgebraMatrix, CyclicCharacter, GroupAlgebraElement};
use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RouxError {
    #[error("entry grid is not square")]
    Ragged,
    #[error("need n >= 2, got {0}")]
    TooSmall(usize),
    #[error("R1 fails: diagonal entry ({0},{0}) is nonzero")]
    Diagonal(usize),
    #[error("R2 fails: entry ({0},{1}) is zero")]
    MissingEntry(usize, usize),
    #[error("R2 fails: entry ({0},{1}) is out of range for C_r")]
    OutOfRange(usize, usize),
    #[error("R3 fails: entries ({0},{1}) and ({1},{0}) are not inverse")]
    NotInverse(usize, usize),
    #[error("B^2 identity fails at cell ({0},{1})")]
    SquareIdentity(usize, usize),
    #[error("switching diagonal has length {found}, expected {expected}")]
    BadDiagonal { expected: usize, found: usize },
    #[error("{0} does not divide r = {1}")]
    BadSubgroup(u32, u32),
    #[error("parameter support is not contained in the subgroup of order {0}")]
    SupportNotInSubgroup(u32),
    #[error("first-row normalization leaves entry ({0},{1}) outside the subgroup")]
    CompressionDiagnostic(usize, usize),
}

/// Off-diagonal entries are exponents mod `r`; the diagonal is zero (`None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouxMatrix {
    pub n: usize,
    pub r: u32,
    pub entries: Vec<Vec<Option<u32>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouxParameters {
    pub n: usize,
    pub r: u32,
    pub c: Vec<i64>,
}

impl RouxParameters {
    pub fn algebra(&self) -> GroupAlgebraElement {
        GroupAlgebraElement::from_coeffs(self.c.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdempotentData {
    pub k: u32,
    pub eps: i8,
    pub c_hat: f64,
    pub mu: f64,
    pub d: f64,
}

impl RouxMatrix {
    pub fn new(r: u32, entries: Vec<Vec<Option<u32>>>) -> Result<Self, RouxError> {
        let b = RouxMatrix { n: entries.len(), r, entries };
        b.check_axioms()?;
        Ok(b)
    }

    /// `J - I` over `C_r`, all off-diagonal entries the identity.
    pub fn all_ones(n: usize, r: u32) -> Self {
        let entries = (0..n).map(|i| (0..n).map(|j| (i != j).then_some(0)).collect()).collect();
        RouxMatrix { n, r, entries }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i][j].expect("off-diagonal entry")
    }

    pub fn check_axioms(&self) -> Result<(), RouxError> {
        let n = self.n;
        if self.entries.iter().any(|row| row.len() != n) {
            return Err(RouxError::Ragged);
        }
        if n < 2 {
            return Err(RouxError::TooSmall(n));
        }
        for i in 0..n {
            if self.entries[i][i].is_some() {
                return Err(RouxError::Diagonal(i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                match self.entries[i][j] {
                    None => return Err(RouxError::MissingEntry(i, j)),
                    Some(e) if e >= self.r => return Err(RouxError::OutOfRange(i, j)),
                    Some(e) => {
                        if let Some(f) = self.entries[j][i] {
                            if (e + f) % self.r != 0 {
                                return Err(RouxError::NotInverse(i.min(j), i.max(j)));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_algebra(&self) -> AlgebraMatrix {
        let mut m = AlgebraMatrix::zero(self.n, self.r);
        for i in 0..self.n {
            for j in 0..self.n {
                if let Some(e) = self.entries[i][j] {
                    m.entries[i * self.n + j] = GroupAlgebraElement::delta(e as i64, self.r);
                }
            }
        }
        m
    }
}

/// Reads `c` from cell (0,1) of `B^2` and checks every other off-diagonal cell against it.
pub fn verify_roux(b: &RouxMatrix) -> Result<RouxParameters, RouxError> {
    b.check_axioms()?;
    let (n, r) = (b.n, b.r as usize);
    let cell = |i: usize, j: usize| {
        let mut counts = vec![0i64; r];
        let bij = b.get(i, j) as usize;
        for k in 0..n {
            if k != i && k != j {
                let e = b.get(i, k) as usize + b.get(k, j) as usize;
                counts[(e + r - bij) % r] += 1;
            }
        }
        counts
    };
    let c = cell(0, 1);
    for i in 0..n {
        for j in 0..n {
            if i != j && (i, j) != (0, 1) && cell(i, j) != c {
                return Err(RouxError::SquareIdentity(i, j));
            }
        }
    }
    let params = RouxParameters { n, r: b.r, c };
    debug_assert_eq!(params.algebra().sum(), n as i64 - 2);
    debug_assert!(params.algebra().is_symmetric());
    Ok(params)
}

/// `D B D^{-1}` for a diagonal of group elements; the parameters are re-verified.
pub fn switch(b: &RouxMatrix, d: &[u32]) -> Result<RouxMatrix, RouxError> {
    if d.len() != b.n {
        return Err(RouxError::BadDiagonal { expected: b.n, found: d.len() });
    }
    let r = b.r;
    let before = verify_roux(b)?;
    let entries = (0..b.n)
        .map(|i| {
            (0..b.n)
                .map(|j| b.entries[i][j].map(|e| ((d[i] % r) + e + r - (d[j] % r)) % r))
                .collect()
        })
        .collect();
    let out = RouxMatrix { n: b.n, r, entries };
    let after = verify_roux(&out)?;
    assert_eq!(before, after, "switching changed roux parameters");
    Ok(out)
}

/// Switches row 0 to the identity and reads the entries in `C_{r'} <= C_r`.
pub fn compress_to_subgroup(b: &RouxMatrix, r_prime: u32) -> Result<RouxMatrix, RouxError> {
    if r_prime == 0 || b.r % r_prime != 0 {
        return Err(RouxError::BadSubgroup(r_prime, b.r));
    }
    let s = b.r / r_prime;
    let params = verify_roux(b)?;
    if params.c.iter().enumerate().any(|(h, &c)| c != 0 && h as u32 % s != 0) {
        return Err(RouxError::SupportNotInSubgroup(r_prime));
    }
    let mut d = vec![0u32; b.n];
    for j in 1..b.n {
        d[j] = b.get(0, j);
    }
    let switched = switch(b, &d)?;
    let mut entries = switched.entries.clone();
    for i in 0..b.n {
        for j in 0..b.n {
            if let Some(e) = switched.entries[i][j] {
                if e % s != 0 {
                    return Err(RouxError::CompressionDiagnostic(i, j));
                }
                entries[i][j] = Some(e / s);
            }
        }
    }
    let out = RouxMatrix { n: b.n, r: r_prime, entries };
    let reduced = verify_roux(&out)?;
    for (w, &c) in reduced.c.iter().enumerate() {
        assert_eq!(c, params.c[w * s as usize], "compression changed parameters");
    }
    Ok(out)
}

/// Both sign branches of the primitive idempotent attached to the character `k`.
pub fn idempotent_data(params: &RouxParameters, k: u32) -> (IdempotentData, IdempotentData) {
    let n = params.n as f64;
    let c_hat = fourier_transform(&params.algebra(), CyclicCharacter::new(k as i64, params.r)).re;
    let root = (c_hat * c_hat + 4.0 * (n - 1.0)).sqrt();
    let branch = |eps: i8| {
        let mu = (c_hat + eps as f64 * root) / (2.0 * (n - 1.0));
        let d = n / (1.0 + (n - 1.0) * mu * mu);
        IdempotentData { k: k % params.r, eps, c_hat, mu, d }
    };
    (branch(1), branch(-1))
}

/// `alpha_k` applied entrywise.
pub fn signature_matrix(b: &RouxMatrix, k: u32) -> DMatrix<Complex<f64>> {
    let alpha = CyclicCharacter::new(k as i64, b.r);
    DMatrix::from_fn(b.n, b.n, |i, j| match b.entries[i][j] {
        None => Complex::new(0.0, 0.0),
        Some(e) => alpha.eval(e),
    })
}

/// The signature whose Gram `I + |mu| S` spans the lines of branch `data`.
///
/// The `(i,0),(j,0)` block of `G_k^eps` is `I + mu * alpha_{-k}(B)`, so the
/// sign of `mu` is folded into the signature.
pub fn branch_signature(b: &RouxMatrix, data: &IdempotentData) -> DMatrix<Complex<f64>> {
    let s = signature_matrix(b, (b.r - data.k % b.r) % b.r);
    if data.mu < 0.0 {
        -s
    } else {
        s
    }
}

/// `G = sum_g alpha(g) lift(gI) + mu sum_g alpha(g) lift(gB)` as an `rn x rn` matrix.
pub fn gram_from_idempotent(b: &RouxMatrix, k: u32, eps: i8) -> Result<(DMatrix<Complex<f64>>, IdempotentData), RouxError> {
    let params = verify_roux(b)?;
    let (plus, minus) = idempotent_data(&params, k);
    let data = if eps >= 0 { plus } else { minus };
    Ok((gram_with(b, &data), data))
}

pub fn gram_with(b: &RouxMatrix, data: &IdempotentData) -> DMatrix<Complex<f64>> {
    let r = b.r as usize;
    let alpha = |e: i64| root_of_unity(data.k as i64 * e, b.r);
    DMatrix::from_fn(b.n * r, b.n * r, |row, col| {
        let (i, hp) = (row / r, (row % r) as i64);
        let (j, h) = (col / r, (col % r) as i64);
        match b.entries[i][j] {
            None => alpha(hp - h),
            Some(e) => alpha(hp - h - e as i64) * data.mu,
        }
    })
}

/// `alpha_k(g)` is real on the support of `c`.
pub fn is_real_lines(params: &RouxParameters, k: u32) -> bool {
    let alpha = CyclicCharacter::new(k as i64, params.r);
    params.c.iter().enumerate().all(|(g, &c)| c == 0 || alpha.is_real_at(g as u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lines::numerical_rank;
    use proptest::prelude::*;

    /// Paley conference matrix on `F_p u {inf}` as a roux over `C_2`.
    fn paley(p: u32) -> RouxMatrix {
        let chi = |a: u32| {
            let a = a % p;
            (1..p).any(|x| (x * x) % p == a)
        };
        let n = p as usize + 1;
        let mut e = vec![vec![None; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let plus = if i == 0 || j == 0 { true } else { chi((i as u32 + p - j as u32) % p) };
                e[i][j] = Some(if plus { 0 } else { 1 });
            }
        }
        RouxMatrix::new(2, e).unwrap()
    }

    fn oracle_params(b: &RouxMatrix, c: &[i64]) -> bool {
        let m = b.to_algebra();
        let sq = m.mul(&m).unwrap();
        let n = b.n;
        for i in 0..n {
            for j in 0..n {
                let mut want = GroupAlgebraElement::zero(b.r);
                if i == j {
                    want.coeffs[0] = n as i64 - 1;
                } else {
                    let bij = b.get(i, j) as i64;
                    for (g, &cg) in c.iter().enumerate() {
                        want.coeffs[((g as i64 + bij).rem_euclid(b.r as i64)) as usize] += cg;
                    }
                }
                if *sq.get(i, j) != want {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn all_ones_parameters() {
        for n in 2..8 {
            let p = verify_roux(&RouxMatrix::all_ones(n, 1)).unwrap();
            assert_eq!(p.c, vec![n as i64 - 2]);
        }
    }

    #[test]
    fn asymmetric_pair_violates_r3() {
        let e = vec![vec![None, Some(1), Some(0)], vec![Some(0), None, Some(0)], vec![Some(0), Some(0), None]];
        assert_eq!(RouxMatrix::new(2, e), Err(RouxError::NotInverse(0, 1)));
        let diag = vec![vec![Some(0), Some(0)], vec![Some(0), None]];
        assert_eq!(RouxMatrix::new(2, diag), Err(RouxError::Diagonal(0)));
    }

    #[test]
    fn paley_conference_is_a_roux() {
        for p in [5u32, 13, 17] {
            let b = paley(p);
            let params = verify_roux(&b).unwrap();
            let half = (p as i64 - 1) / 2;
            assert_eq!(params.c, vec![half, half]);
            assert!(oracle_params(&b, &params.c));
            assert!(is_real_lines(&params, 1));
        }
    }

    #[test]
    fn corrupted_cell_is_located() {
        let mut b = paley(5);
        b.entries[2][4] = Some(1 - b.entries[2][4].unwrap());
        b.entries[4][2] = Some(1 - b.entries[4][2].unwrap());
        assert!(matches!(verify_roux(&b), Err(RouxError::SquareIdentity(_, _))));
    }

    #[test]
    fn idempotent_examples() {
        let p = RouxParameters { n: 8, r: 1, c: vec![6] };
        let (plus, minus) = idempotent_data(&p, 0);
        assert!((plus.mu - 1.0).abs() < 1e-12 && (plus.d - 1.0).abs() < 1e-12);
        assert!((minus.mu + 1.0 / 7.0).abs() < 1e-12 && (minus.d - 7.0).abs() < 1e-12);
        let zero = RouxParameters { n: 8, r: 4, c: vec![0, 3, 0, 3] };
        let (plus, minus) = idempotent_data(&zero, 1);
        assert!((plus.mu - 1.0 / 7f64.sqrt()).abs() < 1e-12 && (minus.mu + 1.0 / 7f64.sqrt()).abs() < 1e-12);
        assert!((plus.d - 4.0).abs() < 1e-12 && (minus.d - 4.0).abs() < 1e-12);
        let psu = RouxParameters { n: 28, r: 4, c: vec![2, 8, 8, 8] };
        let (plus, minus) = idempotent_data(&psu, 1);
        assert!((plus.c_hat + 6.0).abs() < 1e-12);
        assert!((plus.mu - 1.0 / 9.0).abs() < 1e-12 && (minus.mu + 1.0 / 3.0).abs() < 1e-12);
        assert!((plus.d - 21.0).abs() < 1e-9 && (minus.d - 7.0).abs() < 1e-9);
    }

    #[test]
    fn paley_signature_and_grams() {
        let b = paley(5);
        let s = signature_matrix(&b, 1);
        let eig = crate::lines::hermitian_eigenvalues(&s);
        for v in eig {
            assert!((v.abs() - 5f64.sqrt()).abs() < 1e-9);
        }
        let t = signature_matrix(&b, 0);
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 0.0 } else { 1.0 };
                assert!((t[(i, j)].re - want).abs() < 1e-15);
            }
        }
        for (k, eps, rank) in [(0u32, 1i8, 1usize), (0, -1, 5), (1, 1, 3), (1, -1, 3)] {
            let (g, data) = gram_from_idempotent(&b, k, eps).unwrap();
            assert_eq!(numerical_rank(&g), rank);
            assert_eq!(data.d.round() as usize, rank);
            let g2 = &g * &g;
            let scale = g2[(0, 0)].re / g[(0, 0)].re;
            assert!((g2 - g * Complex::new(scale, 0.0)).iter().all(|z| z.norm() < 1e-9));
        }
    }

    #[test]
    fn compression_of_embedded_roux() {
        let b = paley(5);
        let embedded = RouxMatrix {
            n: b.n,
            r: 4,
            entries: b.entries.iter().map(|row| row.iter().map(|e| e.map(|x| 2 * x)).collect()).collect(),
        };
        let d: Vec<u32> = (0..6).map(|i| (i * 3 % 4) as u32).collect();
        let scrambled = switch(&embedded, &d).unwrap();
        let back = compress_to_subgroup(&scrambled, 2).unwrap();
        assert_eq!(verify_roux(&back).unwrap(), verify_roux(&b).unwrap());
        assert_eq!(compress_to_subgroup(&embedded, 2).unwrap(), b);
        assert_eq!(compress_to_subgroup(&switch(&paley(5), &[0, 1, 0, 0, 1, 0]).unwrap(), 1), Err(RouxError::SupportNotInSubgroup(1)));
        assert_eq!(compress_to_subgroup(&b, 3), Err(RouxError::BadSubgroup(3, 2)));
    }

    proptest! {
        #[test]
        fn switching_preserves_parameters(d in proptest::collection::vec(0u32..4, 14), p in prop_oneof![Just(5u32), Just(13)]) {
            let base = paley(p);
            let b = RouxMatrix {
                n: base.n,
                r: 4,
                entries: base.entries.iter().map(|row| row.iter().map(|e| e.map(|x| 2 * x)).collect()).collect(),
            };
            let dd: Vec<u32> = d.iter().cycle().take(b.n).copied().collect();
            let s = switch(&b, &dd).unwrap();
            let params = verify_roux(&s).unwrap();
            prop_assert_eq!(&params, &verify_roux(&b).unwrap());
            prop_assert!(oracle_params(&s, &params.c));
            let inv: Vec<u32> = dd.iter().map(|x| (4 - x) % 4).collect();
            prop_assert_eq!(switch(&s, &inv).unwrap(), b);
        }

        #[test]
        fn idempotent_identities(c in proptest::collection::vec(0i64..6, 3), k in 0u32..5) {
            let r = 5u32;
            let coeffs = vec![c[0], c[1], c[2], c[2], c[1]];
            let n = coeffs.iter().sum::<i64>() as usize + 2;
            let params = RouxParameters { n, r, c: coeffs };
            let (plus, minus) = idempotent_data(&params, k);
            prop_assert!((plus.mu * minus.mu + 1.0 / (n as f64 - 1.0)).abs() < 1e-9);
            prop_assert!((plus.d + minus.d - n as f64).abs() < 1e-9);
        }
    }
}
