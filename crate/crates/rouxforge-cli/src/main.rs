mod cache;
mod input;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use input::{character_from_spec, load_group, read_json, CharacterSpec, GroupSpec, Loaded};
use output::{branch_rows, family_csv, key_value_csv, to_json, write_out, Format, BRANCH_HEADER};
use rouxforge::families::{
    ree_refutation, sl2_family, su3_family, suzuki_refutation, sweep, symplectic_witness_with, CharacterRecord, FamilyError,
    FamilyOptions, FamilyReport, SCHEMA_VERSION,
};
use rouxforge::group::{enumerate_linear_characters, GroupRule};
use rouxforge::lines::{
    check_signature, gram_from_signature, is_real_line_sequence, two_graph_from_lines, two_graph_regularity, verify_etf_gram_with,
    EtfCertificate, LinesError, MatrixFile, TOL_ETF, TOL_RANK,
};
use rouxforge::radical::{CoverData, RadicalError, RootChoice};
use rouxforge::roux::{verify_roux, RouxError, RouxMatrix};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn certification(message: String) -> Self {
        Failure { code: 1, message }
    }
    pub fn input(message: String) -> Self {
        Failure { code: 2, message }
    }
    pub fn precondition(message: String) -> Self {
        Failure { code: 3, message }
    }
    pub fn internal(message: String) -> Self {
        Failure { code: 1, message }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::Unsupported(_) | FamilyError::OutOfRange(_) => Failure::input(e.to_string()),
            FamilyError::Radical(r @ (RadicalError::NotTransitive | RadicalError::NotDoublyTransitive | RadicalError::TooFewPoints)) => {
                input::cover_failure(r)
            }
            other => Failure::internal(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "rouxforge", version, about = "Doubly transitive equiangular tight frames from roux matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in family and certify its lines.
    Family(FamilyArgs),
    /// Run the Higman pair detector on a group file.
    Detect(DetectArgs),
    /// Check a roux, Gram, signature or two-graph file.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for per-character work.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Relative eigenvalue threshold for numerical rank.
    #[arg(long, default_value_t = TOL_RANK)]
    tol_eig: f64,
    /// Tolerance for the ETF residuals.
    #[arg(long, default_value_t = TOL_ETF)]
    tol_etf: f64,
}

impl Common {
    fn options(&self) -> Result<FamilyOptions, Failure> {
        if !(self.tol_eig > 0.0 && self.tol_etf > 0.0) {
            return Err(Failure::input("tolerances must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(Failure::input("--jobs must be at least 1".into()));
        }
        Ok(FamilyOptions {
            jobs: self.jobs,
            tol_eig: self.tol_eig,
            tol_etf: self.tol_etf,
            cache: cache::FileCache::from_env().map(|c| Arc::new(c) as _),
            ..FamilyOptions::default()
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyId {
    Psl2,
    Psu3,
    Suzuki,
    Ree,
    Sp,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(value_enum)]
    family: FamilyId,
    /// Field order (`psl2`, `psu3`, `suzuki`, `ree`).
    #[arg(long)]
    q: Option<u64>,
    /// Half the dimension for `sp` (the space is F_2^{2m}).
    #[arg(long)]
    m: Option<usize>,
    /// Orthogonal type for `sp`: `+` or `-`.
    #[arg(long, allow_hyphen_values = true)]
    epsilon: Option<String>,
    /// Keep only characters whose image has this order.
    #[arg(long)]
    r_prime: Option<u32>,
    /// Include characters that fail the detector.
    #[arg(long)]
    all_characters: bool,
    /// Admit instances above the default size cap.
    #[arg(long)]
    allow_large: bool,
    /// Write each roux as `roux_<character>.json` into this directory.
    #[arg(long)]
    export_dir: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DetectArgs {
    /// Group file (JSON, `kind` = `permutation` or `matrix`).
    group: PathBuf,
    /// Base permutation group with one image per generator; the action then factors through it.
    #[arg(long)]
    cover: Option<PathBuf>,
    /// Character file with values on stabilizer generators.
    #[arg(long)]
    character: Option<PathBuf>,
    /// Enumerate every linear character of the stabilizer.
    #[arg(long)]
    all_characters: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyKind {
    Roux,
    Etf,
    Signature,
    Twograph,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    kind: VerifyKind,
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

fn parse_epsilon(s: &str) -> Result<i8, Failure> {
    match s {
        "+" | "plus" | "+1" | "1" => Ok(1),
        "-" | "minus" | "-1" => Ok(-1),
        _ => Err(Failure::input(format!("epsilon must be + or -, got {s:?}"))),
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::input(format!("family {family} needs {flag}")))
}

fn emit(common: &Common, json: String, csv: String) -> Result<(), Failure> {
    let text = match common.format {
        Format::Json => json,
        Format::Csv => csv,
    };
    write_out(common.out.as_deref(), &text)
}

fn export_roux(dir: &Path, report: &FamilyReport, keep: &[usize]) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("cannot create {}: {e}", dir.display())))?;
    for (i, b) in report.roux.iter().filter(|(i, _)| keep.contains(i)) {
        let path = dir.join(format!("roux_{i}.json"));
        std::fs::write(&path, to_json(b)?).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_family(a: FamilyArgs) -> Result<(), Failure> {
    let mut opts = a.common.options()?;
    opts.allow_large = a.allow_large;
    let (pass, json, csv) = match a.family {
        FamilyId::Psl2 | FamilyId::Psu3 => {
            let q = require(a.q, "--q", "psl2/psu3")?;
            let mut report = match a.family {
                FamilyId::Psl2 => sl2_family(q, &opts)?,
                _ => su3_family(q, &opts)?,
            };
            let pass = report.all_pass;
            report.characters.retain(|c| (a.all_characters || c.higman) && a.r_prime.map_or(true, |r| c.image_order == r));
            if let Some(r) = a.r_prime {
                if !report.characters.iter().any(|c| c.higman) {
                    return Err(Failure::input(format!("no Higman character has image order r' = {r}")));
                }
            }
            if let Some(dir) = &a.export_dir {
                let keep: Vec<usize> = report.characters.iter().map(|c| c.index).collect();
                export_roux(dir, &report, &keep)?;
            }
            (pass, to_json(&report)?, family_csv(&report))
        }
        FamilyId::Suzuki => {
            let r = suzuki_refutation(require(a.q, "--q", "suzuki")?)?;
            (r.passes(), to_json(&r)?, key_value_csv(&r)?)
        }
        FamilyId::Ree => {
            let r = ree_refutation(require(a.q, "--q", "ree")?)?;
            (r.passes(), to_json(&r)?, key_value_csv(&r)?)
        }
        FamilyId::Sp => {
            let m = require(a.m, "--m", "sp")?;
            let eps = parse_epsilon(a.epsilon.as_deref().ok_or_else(|| Failure::input("family sp needs --epsilon".into()))?)?;
            let r = symplectic_witness_with(m, eps, &opts)?;
            (r.passes(), to_json(&r)?, key_value_csv(&r)?)
        }
    };
    emit(&a.common, json, csv)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::certification("one or more family checks failed; see the report".into()))
    }
}

#[derive(Serialize)]
struct DetectReport {
    schema: u32,
    n: usize,
    group_order: usize,
    stabilizer_order: usize,
    kernel_order: usize,
    x: usize,
    characters: Vec<CharacterRecord>,
}

fn detect_on<R: GroupRule<Element = Vec<u32>>>(
    cover: CoverData<R>,
    x: Option<usize>,
    a: &DetectArgs,
    opts: &FamilyOptions,
) -> Result<DetectReport, Failure> {
    let characters = match (&a.character, a.all_characters) {
        (Some(path), false) => {
            let spec: CharacterSpec = read_json(path)?;
            vec![character_from_spec(&cover.group, &cover.stabilizer, &spec, |e| Some(e.to_vec()))?]
        }
        (None, true) => enumerate_linear_characters(&cover.group, &cover.stabilizer).map_err(|e| Failure::internal(e.to_string()))?,
        (Some(_), true) => return Err(Failure::input("--character and --all-characters are exclusive".into())),
        (None, false) => return Err(Failure::input("give --character FILE or --all-characters".into())),
    };
    let x = x.unwrap_or_else(|| cover.default_x());
    let (records, _) = sweep(&cover, &characters, x, |_, _| RootChoice::Smaller, |_| None, opts)?;
    Ok(DetectReport {
        schema: SCHEMA_VERSION,
        n: cover.n,
        group_order: cover.group.order(),
        stabilizer_order: cover.stabilizer.order(),
        kernel_order: cover.kernel.order(),
        x,
        characters: records,
    })
}

fn cmd_detect(a: DetectArgs) -> Result<(), Failure> {
    let opts = a.common.options()?;
    let spec: GroupSpec = read_json(&a.group)?;
    let cover_spec: Option<GroupSpec> = a.cover.as_deref().map(read_json).transpose()?;
    let report = match load_group(&spec, cover_spec.as_ref(), &opts)? {
        Loaded::Permutation(c, x) => detect_on(c, x, &a, &opts)?,
        Loaded::Matrix(c, x) => detect_on(c, x, &a, &opts)?,
    };
    let csv = format!("{BRANCH_HEADER}\n{}", branch_rows("detect", 0, report.n, &report.characters));
    emit(&a.common, to_json(&report)?, csv)?;
    if report.characters.iter().any(|c| c.roux_params_agree == Some(false)) {
        return Err(Failure::certification("radicalization parameters disagree with the constructed roux".into()));
    }
    Ok(())
}

#[derive(Serialize, Default)]
struct Certificate {
    kind: &'static str,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cell: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    etf: Option<EtfCertificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    real: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    triples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    parity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regular: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    d: Option<f64>,
}

fn roux_cell(e: &RouxError) -> Option<[usize; 2]> {
    match *e {
        RouxError::Diagonal(i) => Some([i, i]),
        RouxError::MissingEntry(i, j)
        | RouxError::OutOfRange(i, j)
        | RouxError::NotInverse(i, j)
        | RouxError::SquareIdentity(i, j)
        | RouxError::CompressionDiagnostic(i, j) => Some([i, j]),
        _ => None,
    }
}

fn lines_cell(e: &LinesError) -> Option<[usize; 2]> {
    match *e {
        LinesError::NonzeroDiagonal(i) | LinesError::NonUnitDiagonal(i, _) => Some([i, i]),
        LinesError::NotUnimodular(i, j, _) | LinesError::NotHermitian(i, j) => Some([i, j]),
        _ => None,
    }
}

fn lines_failure(kind: &'static str, e: LinesError) -> Certificate {
    Certificate { kind, cell: lines_cell(&e), error: Some(e.to_string()), ..Default::default() }
}

fn etf_certificate(kind: &'static str, g: &rouxforge::lines::CMatrix, common: &Common, real: Option<bool>) -> Certificate {
    match verify_etf_gram_with(g, common.tol_eig, common.tol_etf) {
        Ok(c) => Certificate { kind, pass: c.certified_with(common.tol_etf), n: Some(c.n), real, etf: Some(c), ..Default::default() },
        Err(e) => lines_failure(kind, e),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), Failure> {
    a.common.options()?;
    let cert = match a.kind {
        VerifyKind::Roux => {
            let b: RouxMatrix = read_json(&a.file)?;
            match verify_roux(&b) {
                Ok(p) => Certificate { kind: "roux", pass: true, n: Some(p.n), r: Some(p.r), params: Some(p.c), ..Default::default() },
                Err(e) => Certificate { kind: "roux", cell: roux_cell(&e), error: Some(e.to_string()), ..Default::default() },
            }
        }
        VerifyKind::Etf => {
            let m: MatrixFile = read_json(&a.file)?;
            let g = m.to_matrix().map_err(|e| Failure::input(e.to_string()))?;
            etf_certificate("etf", &g, &a.common, None)
        }
        VerifyKind::Signature => {
            let m: MatrixFile = read_json(&a.file)?;
            let s = m.to_matrix().map_err(|e| Failure::input(e.to_string()))?;
            match gram_from_signature(&s) {
                Ok((g, _)) => etf_certificate("signature", &g.matrix, &a.common, Some(is_real_line_sequence(&s))),
                Err(e) => lines_failure("signature", e),
            }
        }
        VerifyKind::Twograph => {
            let m: MatrixFile = read_json(&a.file)?;
            let s = m.to_matrix().map_err(|e| Failure::input(e.to_string()))?;
            match check_signature(&s).and_then(|_| two_graph_from_lines(&s)) {
                Ok(t) => {
                    let parity = t.check_parity().is_ok();
                    let reg = two_graph_regularity(&t).map_err(|e| Failure::internal(e.to_string()))?;
                    Certificate {
                        kind: "twograph",
                        pass: parity && reg.regular,
                        n: Some(t.n),
                        triples: Some(t.triples.len()),
                        parity: Some(parity),
                        regular: Some(reg.regular),
                        d: reg.d,
                        ..Default::default()
                    }
                }
                Err(e) => lines_failure("twograph", e),
            }
        }
    };
    let csv = key_value_csv(&cert)?;
    emit(&a.common, to_json(&cert)?, csv)?;
    if cert.pass {
        Ok(())
    } else {
        Err(Failure::certification(cert.error.unwrap_or_else(|| format!("{} check failed", cert.kind))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Family(a) => cmd_family(a),
        Command::Detect(a) => cmd_detect(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
