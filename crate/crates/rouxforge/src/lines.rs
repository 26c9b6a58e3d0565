//! Numeric layer: signatures, Gram matrices, ETF certificates, Naimark
//! complements and two-graphs.

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

pub type CMatrix = DMatrix<Complex<f64>>;

pub const TOL_ETF: f64 = 1e-9;
pub const TOL_SIGNATURE: f64 = 1e-12;
pub const TOL_REAL: f64 = 1e-9;
/// Relative cutoff for singular values and eigenvalue clusters.
pub const TOL_RANK: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinesError {
    #[error("matrix is not square")]
    NotSquare,
    #[error("S1 fails at ({0},{0})")]
    NonzeroDiagonal(usize),
    #[error("S2 fails at ({0},{1}): |S_ij| = {2}")]
    NotUnimodular(usize, usize, f64),
    #[error("S3 fails at ({0},{1})")]
    NotHermitian(usize, usize),
    #[error("Gram diagonal entry {0} is {1}, expected 1")]
    NonUnitDiagonal(usize, f64),
    #[error("Gram is not positive semidefinite (least eigenvalue {0})")]
    NotPsd(f64),
    #[error("column {0} has norm {1}, expected 1")]
    NonUnitColumn(usize, f64),
    #[error("frame is not tight (residual {0})")]
    NotTight(f64),
    #[error("complement undefined for n = d")]
    FullRank,
    #[error("lines are not real")]
    NotReal,
    #[error("parity fails on 4-subset {0:?}")]
    Parity([usize; 4]),
}

/// Eigenvalues ascending with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// Singular values below `TOL_RANK` times the largest count as zero.
pub fn numerical_rank(m: &CMatrix) -> usize {
    numerical_rank_with(m, TOL_RANK)
}

pub fn numerical_rank_with(m: &CMatrix, rel: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    sv.iter().filter(|&&s| s > rel * top).count()
}

fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Groups sorted values whose gaps stay below the relative tolerance; returns (mean, multiplicity).
pub fn cluster(values: &[f64], rel: f64) -> Vec<(f64, usize)> {
    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in values {
        match out.last_mut() {
            Some((sum, count, last)) if (v - *last).abs() <= rel * scale => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, c, _)| (s / c as f64, c)).collect()
}

pub fn check_signature(s: &CMatrix) -> Result<(), LinesError> {
    let n = s.nrows();
    if s.ncols() != n {
        return Err(LinesError::NotSquare);
    }
    for i in 0..n {
        if s[(i, i)].norm() > TOL_SIGNATURE {
            return Err(LinesError::NonzeroDiagonal(i));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = s[(i, j)].norm();
            if (a - 1.0).abs() > TOL_SIGNATURE {
                return Err(LinesError::NotUnimodular(i, j, a));
            }
            if (s[(i, j)] - s[(j, i)].conj()).norm() > TOL_SIGNATURE {
                return Err(LinesError::NotHermitian(i, j));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct LineGram {
    pub n: usize,
    pub d: usize,
    pub matrix: CMatrix,
}

impl LineGram {
    pub fn new(matrix: CMatrix) -> Result<Self, LinesError> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(LinesError::NotSquare);
        }
        for i in 0..n {
            let diag = matrix[(i, i)];
            if (diag.re - 1.0).abs() > TOL_ETF || diag.im.abs() > TOL_ETF {
                return Err(LinesError::NonUnitDiagonal(i, diag.re));
            }
            for j in 0..i {
                if (matrix[(i, j)] - matrix[(j, i)].conj()).norm() > TOL_ETF {
                    return Err(LinesError::NotHermitian(i, j));
                }
            }
        }
        let least = hermitian_eigenvalues(&matrix)[0];
        if least < -TOL_ETF {
            return Err(LinesError::NotPsd(least));
        }
        let d = numerical_rank(&matrix);
        Ok(LineGram { n, d, matrix })
    }

    /// `d x n` factor `Phi` with `Phi^* Phi = G`, from the eigenpairs above threshold.
    pub fn factor(&self) -> CMatrix {
        let (values, vectors) = hermitian_eigen(&self.matrix);
        let top = values.iter().cloned().fold(0.0, f64::max);
        let keep: Vec<usize> = (0..values.len()).filter(|&i| values[i] > TOL_RANK * top).collect();
        CMatrix::from_fn(keep.len(), self.n, |r, c| vectors[(c, keep[r])].conj() * values[keep[r]].sqrt())
    }

    pub fn tightness_residual(&self) -> f64 {
        let a = self.n as f64 / self.d as f64;
        max_norm(&(&self.matrix * &self.matrix - &self.matrix * Complex::new(a, 0.0)))
    }
}

/// `G = I - S / lambda_min`, with its unit-norm factor vectors as columns.
pub fn gram_from_signature(s: &CMatrix) -> Result<(LineGram, CMatrix), LinesError> {
    check_signature(s)?;
    let n = s.nrows();
    let least = hermitian_eigenvalues(s)[0];
    let g = CMatrix::identity(n, n) - s * Complex::new(1.0 / least, 0.0);
    let gram = LineGram::new(g)?;
    let phi = gram.factor();
    Ok((gram, phi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EtfCertificate {
    pub n: usize,
    pub d: usize,
    pub mu: f64,
    pub welch: f64,
    /// `n / d`, the frame bound.
    pub a: f64,
    pub tightness_residual: f64,
    pub equiangularity_residual: f64,
    pub welch_equality: bool,
    pub real: bool,
    pub degenerate: bool,
}

impl EtfCertificate {
    pub fn certified(&self) -> bool {
        self.certified_with(TOL_ETF)
    }

    pub fn certified_with(&self, tol: f64) -> bool {
        !self.degenerate && self.welch_equality && self.tightness_residual < tol && self.equiangularity_residual < tol
    }
}

pub fn welch_bound(n: usize, d: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    ((n - d) as f64 / (d as f64 * (n - 1) as f64)).max(0.0).sqrt()
}

fn coherence_stats(g: &CMatrix) -> (f64, f64) {
    let n = g.nrows();
    let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let a = g[(i, j)].norm();
                hi = hi.max(a);
                lo = lo.min(a);
            }
        }
    }
    if n < 2 {
        lo = 0.0;
    }
    (hi, lo)
}

fn gram_is_real(g: &CMatrix, mu: f64) -> bool {
    if mu <= TOL_REAL {
        return (0..g.nrows()).all(|i| (0..g.ncols()).all(|j| g[(i, j)].im.abs() < TOL_REAL));
    }
    let n = g.nrows();
    let s = CMatrix::from_fn(n, n, |i, j| if i == j { Complex::new(0.0, 0.0) } else { g[(i, j)] / g[(i, j)].norm() });
    is_real_line_sequence(&s)
}

fn certificate(g: &CMatrix, d: usize, tightness: f64, tol: f64) -> EtfCertificate {
    let n = g.nrows();
    let (mu, lo) = coherence_stats(g);
    let welch = welch_bound(n, d);
    EtfCertificate {
        n,
        d,
        mu,
        welch,
        a: n as f64 / d as f64,
        tightness_residual: tightness,
        equiangularity_residual: mu - lo,
        welch_equality: (mu - welch).abs() < tol,
        real: gram_is_real(g, mu),
        degenerate: n == d,
    }
}

/// Certificate for the columns of a `d x n` frame.
pub fn verify_etf_vectors(phi: &CMatrix) -> Result<EtfCertificate, LinesError> {
    let (d, n) = phi.shape();
    for j in 0..n {
        let norm = phi.column(j).norm();
        if (norm - 1.0).abs() > TOL_ETF {
            return Err(LinesError::NonUnitColumn(j, norm));
        }
    }
    let frame = phi * phi.adjoint();
    let tight = max_norm(&(frame - CMatrix::identity(d, d) * Complex::new(n as f64 / d as f64, 0.0)));
    Ok(certificate(&(phi.adjoint() * phi), d, tight, TOL_ETF))
}

/// Certificate for a Gram matrix; `d` is its numerical rank and tightness is `|G^2 - (n/d) G|`.
pub fn verify_etf_gram(g: &CMatrix) -> Result<EtfCertificate, LinesError> {
    verify_etf_gram_with(g, TOL_RANK, TOL_ETF)
}

pub fn verify_etf_gram_with(g: &CMatrix, rank_tol: f64, etf_tol: f64) -> Result<EtfCertificate, LinesError> {
    let n = g.nrows();
    if g.ncols() != n {
        return Err(LinesError::NotSquare);
    }
    for i in 0..n {
        let norm = g[(i, i)].norm().sqrt();
        if (norm - 1.0).abs() > etf_tol {
            return Err(LinesError::NonUnitColumn(i, norm));
        }
    }
    let d = numerical_rank_with(g, rank_tol).max(1);
    let a = n as f64 / d as f64;
    let tight = max_norm(&(g * g - g * Complex::new(a, 0.0)));
    Ok(certificate(g, d, tight, etf_tol))
}

pub fn min_chordal_distance(g: &LineGram) -> f64 {
    let n = g.n;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            best = best.min((1.0 - g.matrix[(i, j)].norm_sqr()).max(0.0).sqrt());
        }
    }
    best
}

/// Gram of the complementary tight frame, `n/(n-d) (I - (d/n) G)`.
pub fn naimark_complement(g: &LineGram) -> Result<LineGram, LinesError> {
    if g.n == g.d {
        return Err(LinesError::FullRank);
    }
    let tight = g.tightness_residual();
    if tight > TOL_ETF {
        return Err(LinesError::NotTight(tight));
    }
    let (n, d) = (g.n as f64, g.d as f64);
    let m = (CMatrix::identity(g.n, g.n) - &g.matrix * Complex::new(d / n, 0.0)) * Complex::new(n / (n - d), 0.0);
    LineGram::new(m)
}

/// `S_bar = W^* S W` with `W = diag(w)` chosen so row 0 is all ones off the diagonal.
pub fn normalized_signature(s: &CMatrix) -> Result<(CMatrix, Vec<Complex<f64>>), LinesError> {
    check_signature(s)?;
    let n = s.nrows();
    let w: Vec<Complex<f64>> = (0..n).map(|j| if j == 0 { Complex::new(1.0, 0.0) } else { s[(0, j)].conj() }).collect();
    let out = CMatrix::from_fn(n, n, |i, j| w[i].conj() * s[(i, j)] * w[j]);
    Ok((out, w))
}

pub fn is_real_line_sequence(s: &CMatrix) -> bool {
    match normalized_signature(s) {
        Ok((sbar, _)) => sbar.iter().all(|z| z.im.abs() < TOL_REAL),
        Err(_) => false,
    }
}

/// 3-subsets of `[n]`, stored sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoGraph {
    pub n: usize,
    pub triples: BTreeSet<[usize; 3]>,
}

fn sorted3(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

impl TwoGraph {
    pub fn contains(&self, a: usize, b: usize, c: usize) -> bool {
        self.triples.contains(&sorted3(a, b, c))
    }

    /// Every 4-subset holds an even number of triples.
    pub fn check_parity(&self) -> Result<(), LinesError> {
        let n = self.n;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let count = [(a, b, c), (a, b, d), (a, c, d), (b, c, d)]
                            .iter()
                            .filter(|&&(x, y, z)| self.contains(x, y, z))
                            .count();
                        if count % 2 == 1 {
                            return Err(LinesError::Parity([a, b, c, d]));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub fn two_graph_from_lines(s: &CMatrix) -> Result<TwoGraph, LinesError> {
    let (sbar, _) = normalized_signature(s)?;
    if !sbar.iter().all(|z| z.im.abs() < TOL_REAL) {
        return Err(LinesError::NotReal);
    }
    let n = s.nrows();
    let mut triples = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if (sbar[(i, j)] * sbar[(j, k)] * sbar[(k, i)]).re < 0.0 {
                    triples.insert([i, j, k]);
                }
            }
        }
    }
    let t = TwoGraph { n, triples };
    t.check_parity()?;
    Ok(t)
}

/// Normalized signature: row 0 is all ones, `S_ij = -1` iff `{0,i,j}` is a triple.
pub fn signature_from_two_graph(t: &TwoGraph) -> Result<CMatrix, LinesError> {
    t.check_parity()?;
    let n = t.n;
    Ok(CMatrix::from_fn(n, n, |i, j| {
        let v = if i == j {
            0.0
        } else if i == 0 || j == 0 || !t.contains(0, i, j) {
            1.0
        } else {
            -1.0
        };
        Complex::new(v, 0.0)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub regular: bool,
    pub lambda1: f64,
    pub lambda2: f64,
    pub d: Option<f64>,
}

/// With `G = I - S / lambda2`, the span has dimension `mult(lambda1) = -n lambda2 / (lambda1 - lambda2)`.
pub fn two_graph_regularity(t: &TwoGraph) -> Result<Regularity, LinesError> {
    let s = signature_from_two_graph(t)?;
    let values = hermitian_eigenvalues(&s);
    let clusters = cluster(&values, TOL_RANK);
    let n = t.n as f64;
    if clusters.len() == 2 && clusters[0].0 < 0.0 && clusters[1].0 > 0.0 {
        let (l2, l1) = (clusters[0].0, clusters[1].0);
        Ok(Regularity { regular: true, lambda1: l1, lambda2: l2, d: Some(-n * l2 / (l1 - l2)) })
    } else {
        Ok(Regularity { regular: false, lambda1: values[values.len() - 1], lambda2: values[0], d: None })
    }
}

/// Consistency of `(n, d)` with a triply transitive symmetry group.
pub fn triple_transitive_guard(n: usize, d: usize) -> bool {
    d == 1 || d + 1 == n
}

/// Dense matrix file format: `{"n": .., "entries": [[re, im], ..]}` row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let entries = (0..n * n).map(|t| [m[(t / n, t % n)].re, m[(t / n, t % n)].im]).collect();
        MatrixFile { n, entries }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, LinesError> {
        if self.entries.len() != self.n * self.n {
            return Err(LinesError::NotSquare);
        }
        Ok(CMatrix::from_fn(self.n, self.n, |i, j| {
            let [re, im] = self.entries[i * self.n + j];
            Complex::new(re, im)
        }))
    }
}
