use crate::group::{FiniteGroup, GroupError, GroupRule, LinearCharacter, MatrixRule};
use crate::lines::{is_real_line_sequence, numerical_rank_with, verify_etf_gram_with, CMatrix, EtfCertificate, LinesError, TOL_ETF, TOL_RANK};
use crate::radical::{
    find_key_with, radicalize, roux_from_higman_pair, roux_params_from_radicalization, CoverData, RadicalError, RootChoice,
};
use crate::roux::{branch_signature, compress_to_subgroup, idempotent_data, is_real_lines, verify_roux, RouxError, RouxMatrix, RouxParameters};
use crate::field::FieldError;
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Debug;
use std::sync::Arc;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
/// Detector independence is sampled only on covers at most this large.
pub const INDEPENDENCE_CAP: usize = 10_000;
/// The lifted `rn x rn` Gram is ranked only up to this size.
pub const LIFT_RANK_CAP: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Radical(#[from] RadicalError),
    #[error(transparent)]
    Roux(#[from] RouxError),
    #[error(transparent)]
    Lines(#[from] LinesError),
    #[error("construction check failed: {0}")]
    Construction(String),
}

/// Persistent store for closed element lists, keyed by a description of the generators.
pub trait ClosureCache: Send + Sync + Debug {
    fn load(&self, key: &str) -> Option<Vec<Vec<u32>>>;
    fn store(&self, key: &str, elements: &[Vec<u32>]);
}

#[derive(Clone, Debug)]
pub struct FamilyOptions {
    pub jobs: usize,
    pub tol_eig: f64,
    pub tol_etf: f64,
    /// Random choices of `x` used to re-run the detector.
    pub independence_samples: usize,
    pub seed: u64,
    /// Admits the larger instances behind a flag, e.g. `SU(3,5)`.
    pub allow_large: bool,
    pub cache: Option<Arc<dyn ClosureCache>>,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions { jobs: 1, tol_eig: TOL_RANK, tol_etf: TOL_ETF, independence_samples: 5, seed: 0x5eed, allow_large: false, cache: None }
    }
}

/// Closure of a group with list-valued elements, read from or written to `opts.cache` when one is set.
pub fn cached_closure<R: GroupRule<Element = Vec<u32>> + Clone>(
    rule: R,
    gens: Vec<Vec<u32>>,
    label: &str,
    opts: &FamilyOptions,
) -> Result<FiniteGroup<R>, FamilyError> {
    let Some(cache) = &opts.cache else {
        return Ok(FiniteGroup::closure(rule, gens)?);
    };
    let key = format!("{label} generators={gens:?}");
    if let Some(elements) = cache.load(&key) {
        if let Ok(g) = FiniteGroup::from_closed_elements(rule.clone(), elements, gens.clone()) {
            return Ok(g);
        }
    }
    let g = FiniteGroup::closure(rule, gens)?;
    cache.store(&key, g.elements());
    Ok(g)
}

pub fn matrix_closure(rule: MatrixRule, gens: Vec<Vec<u32>>, opts: &FamilyOptions) -> Result<FiniteGroup<MatrixRule>, FamilyError> {
    let label = format!("matrix q={} dim={}", rule.field.order(), rule.dim);
    cached_closure(rule, gens, &label, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyRecord {
    pub x: usize,
    pub z: u32,
    pub r: u32,
    pub xi: usize,
    pub eta: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub k: u32,
    pub eps: i8,
    pub c_hat: f64,
    pub mu: f64,
    pub d: f64,
    pub rank: usize,
    pub lift_rank: Option<usize>,
    pub real_algebraic: bool,
    pub real_numeric: bool,
    pub certificate: Option<EtfCertificate>,
    pub certified: bool,
}

impl BranchRecord {
    pub fn d_rounded(&self) -> usize {
        self.d.round() as usize
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterRecord {
    pub index: usize,
    /// Exponents on the abelianization basis of the stabilizer.
    pub label: Vec<u32>,
    /// Family-specific level, e.g. `j` with `alpha'(lambda) = exp(2 pi i j / (q-1))`.
    pub level: Option<u32>,
    pub image_order: u32,
    pub higman: bool,
    pub detector_witness: Option<usize>,
    pub x_independent: Option<bool>,
    pub key: Option<KeyRecord>,
    /// Parameters over `C_r`, `r = 2 r'`, from the radicalization formula.
    pub params: Option<Vec<i64>>,
    /// Formula parameters equal those read back from the constructed roux.
    pub roux_params_agree: Option<bool>,
    /// Parameters over `C_{r'}` when the roux compresses.
    pub compressed: Option<Vec<i64>>,
    /// Order of the cyclic group the branches are computed over.
    pub working_r: Option<u32>,
    pub branches: Vec<BranchRecord>,
}

impl CharacterRecord {
    pub fn branch(&self, k: u32, eps: i8) -> Option<&BranchRecord> {
        self.branches.iter().find(|b| b.k == k && b.eps == eps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(id: &str, pass: bool, detail: impl Into<String>) -> Self {
        Check { id: id.to_string(), pass, detail: detail.into() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyReport {
    pub schema: u32,
    pub family: String,
    pub q: u64,
    pub n: usize,
    pub group_order: usize,
    pub stabilizer_order: usize,
    pub kernel_order: usize,
    pub x: usize,
    pub characters: Vec<CharacterRecord>,
    pub checks: Vec<Check>,
    pub all_pass: bool,
    #[serde(skip)]
    pub roux: Vec<(usize, RouxMatrix)>,
}

impl FamilyReport {
    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn finish(mut self) -> Self {
        self.all_pass = self.checks.iter().all(|c| c.pass);
        self
    }

    pub fn higman_characters(&self) -> impl Iterator<Item = &CharacterRecord> {
        self.characters.iter().filter(|c| c.higman)
    }

    pub fn roux_for(&self, index: usize) -> Option<&RouxMatrix> {
        self.roux.iter().find(|(i, _)| *i == index).map(|(_, b)| b)
    }
}

/// Branch data for one `(k, eps)` of a roux, with its ETF certificate.
pub fn analyze_branches(b: &RouxMatrix, params: &RouxParameters, opts: &FamilyOptions) -> Result<Vec<BranchRecord>, FamilyError> {
    let n = b.n;
    let mut out = Vec::with_capacity(2 * b.r as usize);
    for k in 0..b.r {
        let (plus, minus) = idempotent_data(params, k);
        for data in [plus, minus] {
            let s = branch_signature(b, &data);
            let gram = CMatrix::identity(n, n) + &s * Complex::new(data.mu.abs(), 0.0);
            let rank = numerical_rank_with(&gram, opts.tol_eig);
            let lift_rank = (n * b.r as usize <= LIFT_RANK_CAP)
                .then(|| numerical_rank_with(&crate::roux::gram_with(b, &data), opts.tol_eig));
            let certificate = verify_etf_gram_with(&gram, opts.tol_eig, opts.tol_etf).ok();
            let d_ok = (data.d - data.d.round()).abs() < 1e-9 && rank == data.d.round() as usize;
            let certified = d_ok && certificate.as_ref().map(|c| c.certified_with(opts.tol_etf)).unwrap_or(false);
            out.push(BranchRecord {
                k,
                eps: data.eps,
                c_hat: data.c_hat,
                mu: data.mu,
                d: data.d,
                rank,
                lift_rank,
                real_algebraic: is_real_lines(params, k),
                real_numeric: is_real_line_sequence(&s),
                certificate,
                certified,
            });
        }
    }
    Ok(out)
}

/// Detector, key, parameters, roux, compression and branch certificates for one character.
pub fn analyze_character<R: GroupRule>(
    cover: &CoverData<R>,
    alpha: &LinearCharacter,
    index: usize,
    x: usize,
    root: RootChoice,
    opts: &FamilyOptions,
) -> Result<(CharacterRecord, Option<RouxMatrix>), FamilyError> {
    let rad = radicalize(cover, alpha)?;
    let witness = rad.detector_witness(x)?;
    let higman = witness.is_none();
    let x_independent = if opts.independence_samples > 0 && cover.group.order() <= INDEPENDENCE_CAP {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut agree = true;
        for _ in 0..opts.independence_samples {
            let y = loop {
                let g = rng.gen_range(0..cover.group.order());
                if cover.point(g) != 0 {
                    break g;
                }
            };
            agree &= rad.detect(y)? == higman;
        }
        Some(agree)
    } else {
        None
    };
    let mut record = CharacterRecord {
        index,
        label: alpha.label.clone(),
        level: None,
        image_order: rad.r_prime,
        higman,
        detector_witness: witness,
        x_independent,
        key: None,
        params: None,
        roux_params_agree: None,
        compressed: None,
        working_r: None,
        branches: Vec::new(),
    };
    if !higman {
        return Ok((record, None));
    }
    let key = find_key_with(&rad, x, root)?;
    record.key = Some(KeyRecord { x: key.x, z: key.z, r: rad.r, xi: key.xi, eta: key.eta });
    let params = roux_params_from_radicalization(&rad, &key)?;
    let b = roux_from_higman_pair(&rad, &key, None)?;
    let read_back = verify_roux(&b)?;
    record.roux_params_agree = Some(read_back == params);
    record.params = Some(params.c.clone());
    let (working, working_params) = match compress_to_subgroup(&b, rad.r_prime) {
        Ok(c) => {
            let p = verify_roux(&c)?;
            record.compressed = Some(p.c.clone());
            (c, p)
        }
        Err(RouxError::SupportNotInSubgroup(_)) => (b, params),
        Err(e) => return Err(e.into()),
    };
    record.working_r = Some(working.r);
    record.branches = analyze_branches(&working, &working_params, opts)?;
    Ok((record, Some(working)))
}

/// Runs `analyze_character` over a character list on a bounded pool; results keep input order.
pub fn sweep<R: GroupRule>(
    cover: &CoverData<R>,
    characters: &[LinearCharacter],
    x: usize,
    root: impl Fn(usize, &LinearCharacter) -> RootChoice + Sync,
    level: impl Fn(&LinearCharacter) -> Option<u32> + Sync,
    opts: &FamilyOptions,
) -> Result<(Vec<CharacterRecord>, Vec<(usize, RouxMatrix)>), FamilyError> {
    let one = |(i, alpha): (usize, &LinearCharacter)| {
        let (mut rec, b) = analyze_character(cover, alpha, i, x, root(i, alpha), opts)?;
        rec.level = level(alpha);
        Ok((rec, b))
    };
    let results: Vec<Result<(CharacterRecord, Option<RouxMatrix>), FamilyError>> = if opts.jobs <= 1 {
        characters.iter().enumerate().map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| FamilyError::Construction(e.to_string()))?;
        pool.install(|| characters.par_iter().enumerate().map(one).collect())
    };
    let mut records = Vec::with_capacity(results.len());
    let mut roux = Vec::new();
    for r in results {
        let (rec, b) = r?;
        if let Some(b) = b {
            roux.push((rec.index, b));
        }
        records.push(rec);
    }
    Ok((records, roux))
}

/// Checks shared by every family: exact law, idempotent identities, realness agreement, detector independence.
pub fn common_checks(n: usize, records: &[CharacterRecord]) -> Vec<Check> {
    let mut checks = Vec::new();
    let agree = records.iter().filter_map(|c| c.roux_params_agree).all(|a| a);
    checks.push(Check::new("formula-matches-roux", agree, "radicalization parameters equal those read from the roux"));
    let mut worst: f64 = 0.0;
    for c in records {
        for k in 0..c.working_r.unwrap_or(0) {
            if let (Some(p), Some(m)) = (c.branch(k, 1), c.branch(k, -1)) {
                worst = worst.max((p.mu * m.mu + 1.0 / (n as f64 - 1.0)).abs());
                worst = worst.max((p.d + m.d - n as f64).abs());
            }
        }
    }
    checks.push(Check::new("idempotent-identities", worst < 1e-9, format!("max residual {worst:.3e}")));
    let mismatches = records.iter().flat_map(|c| &c.branches).filter(|b| b.real_algebraic != b.real_numeric).count();
    checks.push(Check::new("real-cross-check", mismatches == 0, format!("{mismatches} branch mismatches")));
    let trivial_ok = records.iter().filter(|c| c.image_order == 1 && c.higman).all(|c| {
        c.branches.iter().all(|b| {
            let d = b.d_rounded();
            (d == 1 || d == n - 1) && (b.d - d as f64).abs() < 1e-9
        })
    });
    checks.push(Check::new("trivial-dims", trivial_ok, "trivial character gives d in {1, n-1}"));
    if records.iter().any(|c| c.x_independent.is_some()) {
        let ok = records.iter().all(|c| c.x_independent != Some(false));
        checks.push(Check::new("detector-x-independence", ok, "detector agrees across random choices of x"));
    }
    checks
}
