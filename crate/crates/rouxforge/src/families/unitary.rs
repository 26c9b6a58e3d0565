use super::pipeline::{common_checks, matrix_closure, sweep, Check, FamilyError, FamilyOptions, FamilyReport, SCHEMA_VERSION};
use crate::field::{gcd_u64, prime_power, Field};
use crate::group::{enumerate_linear_characters, LinearCharacter, MatrixRule, ProjectiveAction};
use crate::radical::{CoverData, RootChoice};
use crate::roux::RouxParameters;
use std::sync::Arc;

/// `(u, v) = u1 v3^q + u2 v2^q + u3 v1^q` on `F_{q^2}^3`.
pub struct HermitianForm {
    pub field: Arc<Field>,
    pub q: u64,
}

impl HermitianForm {
    pub fn bar(&self, a: u32) -> u32 {
        self.field.pow(a, self.q as i64)
    }

    pub fn eval(&self, u: &[u32], v: &[u32]) -> u32 {
        let f = &self.field;
        let t = [f.mul(u[0], self.bar(v[2])), f.mul(u[1], self.bar(v[1])), f.mul(u[2], self.bar(v[0]))];
        f.add(f.add(t[0], t[1]), t[2])
    }

    pub fn preserved_by(&self, rule: &MatrixRule, m: &[u32]) -> bool {
        let basis: Vec<Vec<u32>> = (0..3).map(|i| (0..3).map(|j| (i == j) as u32).collect()).collect();
        let images: Vec<Vec<u32>> = basis.iter().map(|e| rule.apply(m, e)).collect();
        (0..3).all(|i| (0..3).all(|j| self.eval(&images[i], &images[j]) == self.eval(&basis[i], &basis[j])))
    }
}

pub fn su3_eta(f: &Field, q: u64, e: u32) -> Vec<u32> {
    let q = q as i64;
    vec![e, 0, 0, 0, f.pow(e, q - 1), 0, 0, 0, f.pow(e, -q)]
}

pub fn su3_xi(f: &Field, q: u64, a: u32, b: u32) -> Vec<u32> {
    vec![1, a, b, 0, 1, f.neg(f.pow(a, q as i64)), 0, 0, 1]
}

pub fn su3_x(f: &Field) -> Vec<u32> {
    vec![0, 0, 1, 0, f.neg(1), 0, 1, 0, 0]
}

/// Some `b` with `a^{q+1} + b + b^q = 0`, excluding `b = 0` when `a = 0`.
fn solve_b(f: &Field, q: u64, a: u32) -> Option<u32> {
    let na = f.pow(a, q as i64 + 1);
    f.elements().find(|&b| (a != 0 || b != 0) && f.add(f.add(na, b), f.pow(b, q as i64)) == 0)
}

/// `SU(3,q)` on isotropic lines, generated by `eta_lambda`, three elements of `N` and the involution `x`.
pub fn su3_cover(q: u64) -> Result<(CoverData<MatrixRule>, Arc<Field>), FamilyError> {
    su3_cover_with(q, &FamilyOptions::default())
}

pub fn su3_cover_with(q: u64, opts: &FamilyOptions) -> Result<(CoverData<MatrixRule>, Arc<Field>), FamilyError> {
    let f = Arc::new(Field::of_order(q * q)?);
    let rule = MatrixRule::new(f.clone(), 3);
    let l = f.primitive_element();
    let mut gens = vec![su3_eta(&f, q, l), su3_x(&f)];
    for a in [1, l, 0] {
        let b = solve_b(&f, q, a).ok_or_else(|| FamilyError::Construction(format!("no xi with a = {a}")))?;
        gens.push(su3_xi(&f, q, a, b));
    }
    let form = HermitianForm { field: f.clone(), q };
    for g in &gens {
        if rule.determinant(g) != 1 || !form.preserved_by(&rule, g) {
            return Err(FamilyError::Construction(format!("generator {g:?} is not in SU(3,{q})")));
        }
    }
    let action = ProjectiveAction::from_orbit(&rule, &gens, &[1, 0, 0]);
    if let Some(p) = action.points().iter().find(|p| form.eval(p, p) != 0) {
        return Err(FamilyError::Construction(format!("orbit point {p:?} is not isotropic")));
    }
    let group = matrix_closure(rule, gens, opts)?;
    Ok((CoverData::new(group, Arc::new(action))?, f))
}

pub fn su3_order(q: u64) -> u64 {
    q.pow(3) * (q.pow(3) + 1) * (q * q - 1)
}

/// `j` with `alpha(eta_lambda) = exp(2 pi i j / (q^2 - 1))`.
pub fn su3_level(cover: &CoverData<MatrixRule>, f: &Field, q: u64, alpha: &LinearCharacter) -> u32 {
    let eta = cover.group.index_of(&su3_eta(f, q, f.primitive_element())).expect("eta in SU(3,q)");
    let v = alpha.value(&cover.stabilizer, eta).expect("eta lies in the stabilizer") as u64;
    let m = q * q - 1;
    ((v * m / alpha.modulus as u64) % m) as u32
}

/// Closed-form parameters over `C_{r'}`: `c_1 = (q+1)/r' (q^2-1) + q - q^2`, `c_w = (q+1)/r' (q^2-1)`.
pub fn psu3_parameters_closed_form(q: u64, r_prime: u32) -> Result<RouxParameters, FamilyError> {
    if r_prime <= 1 || (q + 1) % r_prime as u64 != 0 {
        return Err(FamilyError::OutOfRange(format!("r' = {r_prime} must be a divisor of q + 1 = {} other than 1", q + 1)));
    }
    let base = ((q + 1) / r_prime as u64 * (q * q - 1)) as i64;
    let mut c = vec![base; r_prime as usize];
    c[0] = base + q as i64 - (q * q) as i64;
    Ok(RouxParameters { n: (q.pow(3) + 1) as usize, r: r_prime, c })
}

fn check_q(q: u64, opts: &FamilyOptions) -> Result<(), FamilyError> {
    prime_power(q).ok_or_else(|| FamilyError::OutOfRange(format!("{q} is not a prime power")))?;
    if q <= 2 {
        return Err(FamilyError::OutOfRange(format!("q = {q}: the unitary family needs q > 2")));
    }
    if q > 5 || (q == 5 && !opts.allow_large) {
        return Err(FamilyError::OutOfRange(format!("q = {q} is beyond the default cap (q = 5 needs the large-instance flag)")));
    }
    Ok(())
}

/// Full pipeline for `PSU(3,q)` through `SU(3,q)`; the key uses the sign `(-1)^{ql}`.
pub fn su3_family(q: u64, opts: &FamilyOptions) -> Result<FamilyReport, FamilyError> {
    check_q(q, opts)?;
    let (cover, f) = su3_cover_with(q, opts)?;
    let n = cover.n;
    let x = cover.group.index_of(&su3_x(&f)).expect("x in SU(3,q)");
    let characters = enumerate_linear_characters(&cover.group, &cover.stabilizer)?;
    let level = |a: &LinearCharacter| su3_level(&cover, &f, q, a);
    let root = |_: usize, a: &LinearCharacter| {
        let j = level(a) as u64;
        if j % (q - 1) != 0 {
            return RootChoice::Smaller;
        }
        let l = j / (q - 1);
        let r_prime = a.image_order();
        RootChoice::Exponent(if (q * l) % 2 == 1 { r_prime } else { 0 })
    };
    let (records, roux) = sweep(&cover, &characters, x, root, |a| Some(level(a)), opts)?;

    let d_star = (q * q - q + 1) as usize;
    let mut checks = vec![
        Check::new("group-order", cover.group.order() as u64 == su3_order(q), format!("|SU(3,{q})| = {}", cover.group.order())),
        Check::new("degree", n as u64 == q.pow(3) + 1, format!("n = {n}")),
        Check::new("stabilizer-order", cover.stabilizer.order() as u64 == q.pow(3) * (q * q - 1), format!("|G0*| = {}", cover.stabilizer.order())),
        Check::new("character-count", records.len() as u64 == q * q - 1, format!("{} characters", records.len())),
        Check::new("kernel-order", cover.kernel.order() as u64 == gcd_u64(3, q + 1), format!("|Z| = {}", cover.kernel.order())),
    ];
    let census_ok = records.iter().all(|c| c.higman == (c.level.unwrap() as u64 % (q - 1) == 0));
    let passing = records.iter().filter(|c| c.higman).count();
    checks.push(Check::new("detector-census", census_ok && passing as u64 == q + 1, format!("{passing} Higman characters")));

    let mut closed_ok = true;
    let mut closed_detail = Vec::new();
    let mut etf_ok = true;
    let mut real_ok = true;
    for c in records.iter().filter(|c| c.higman && c.image_order > 1) {
        let rp = c.image_order;
        let expected = psu3_parameters_closed_form(q, rp)?.c;
        let got = c.compressed.clone();
        closed_ok &= got.as_ref() == Some(&expected);
        closed_detail.push(format!("r'={rp}: {got:?}"));
        for k in 1..rp {
            let minus = c.branch(k, -1);
            let plus = c.branch(k, 1);
            etf_ok &= minus.map(|b| b.certified && b.d_rounded() == d_star).unwrap_or(false);
            etf_ok &= plus.map(|b| b.certified && b.d_rounded() == n - d_star).unwrap_or(false);
            let expect_real = q % 2 == 1 && rp % 2 == 0 && 2 * k == rp;
            real_ok &= [minus, plus].iter().all(|b| b.map(|b| b.real_algebraic == expect_real).unwrap_or(false));
        }
    }
    checks.push(Check::new("psu3-closed-form", closed_ok, closed_detail.join("; ")));
    checks.push(Check::new("psu3-etf", etf_ok, format!("nontrivial branches certify d = {d_star} and n - d")));
    checks.push(Check::new("psu3-realness", real_ok, "real exactly when q is odd and k = r'/2"));
    let d_ok = records.iter().flat_map(|c| &c.branches).all(|b| [1, n - 1, d_star, n - d_star].contains(&b.d_rounded()));
    checks.push(Check::new("d-values", d_ok, "every branch has d in {1, n-1, q^2-q+1, n-(q^2-q+1)}"));
    checks.extend(common_checks(n, &records));

    Ok(FamilyReport {
        schema: SCHEMA_VERSION,
        family: "psu3".into(),
        q,
        n,
        group_order: cover.group.order(),
        stabilizer_order: cover.stabilizer.order(),
        kernel_order: cover.kernel.order(),
        x,
        characters: records,
        checks,
        all_pass: false,
        roux,
    }
    .finish())
}
