use super::pipeline::{common_checks, matrix_closure, sweep, Check, FamilyError, FamilyOptions, FamilyReport, SCHEMA_VERSION};
use crate::field::{prime_power, Field};
use crate::group::{enumerate_linear_characters, LinearCharacter, MatrixRule, ProjectiveAction};
use crate::radical::{CoverData, RootChoice};
use std::sync::Arc;

pub const SL2_MAX_Q: u64 = 31;

/// `SL(2,q)` on the projective line, generated by a transvection, a torus element and `[[0,1],[-1,0]]`.
pub fn sl2_cover(q: u64) -> Result<(CoverData<MatrixRule>, Arc<Field>), FamilyError> {
    sl2_cover_with(q, &FamilyOptions::default())
}

pub fn sl2_cover_with(q: u64, opts: &FamilyOptions) -> Result<(CoverData<MatrixRule>, Arc<Field>), FamilyError> {
    let f = Arc::new(Field::of_order(q)?);
    let rule = MatrixRule::new(f.clone(), 2);
    let l = f.primitive_element();
    let gens = vec![vec![1, 1, 0, 1], vec![l, 0, 0, f.inv(l)], sl2_x(&f)];
    let action = ProjectiveAction::from_orbit(&rule, &gens, &[1, 0]);
    let group = matrix_closure(rule, gens, opts)?;
    Ok((CoverData::new(group, Arc::new(action))?, f))
}

pub fn sl2_x(f: &Field) -> Vec<u32> {
    vec![0, 1, f.neg(1), 0]
}

/// `j` with `alpha(diag(lambda, lambda^-1)) = exp(2 pi i j / (q-1))`.
pub fn sl2_level(cover: &CoverData<MatrixRule>, f: &Field, alpha: &LinearCharacter) -> u32 {
    let l = f.primitive_element();
    let torus = cover.group.index_of(&vec![l, 0, 0, f.inv(l)]).expect("torus element");
    let v = alpha.value(&cover.stabilizer, torus).expect("torus lies in the stabilizer");
    let m = f.order() - 1;
    ((v as u64 * m as u64 / alpha.modulus as u64) % m as u64) as u32
}

fn check_q(q: u64) -> Result<(), FamilyError> {
    let (p, _) = prime_power(q).ok_or_else(|| FamilyError::OutOfRange(format!("{q} is not a prime power")))?;
    if p == 2 {
        return Err(FamilyError::Unsupported(format!(
            "q = {q} is even: the only real character of F_q^* is trivial, so PSL(2,{q}) gives no nontrivial lines"
        )));
    }
    if q == 9 {
        return Err(FamilyError::Unsupported(
            "q = 9: PSL(2,9) has an exceptional Schur cover and is not handled".into(),
        ));
    }
    if q > SL2_MAX_Q {
        return Err(FamilyError::OutOfRange(format!("q = {q} exceeds the cap {SL2_MAX_Q}")));
    }
    Ok(())
}

/// Full pipeline for `PSL(2,q)` through its cover `SL(2,q)`.
pub fn sl2_family(q: u64, opts: &FamilyOptions) -> Result<FamilyReport, FamilyError> {
    check_q(q)?;
    let (cover, f) = sl2_cover_with(q, opts)?;
    let n = cover.n;
    let x = cover.group.index_of(&sl2_x(&f)).expect("x in SL(2,q)");
    let characters = enumerate_linear_characters(&cover.group, &cover.stabilizer)?;
    let (records, roux) = sweep(&cover, &characters, x, |_, _| RootChoice::Smaller, |a| Some(sl2_level(&cover, &f, a)), opts)?;

    let half = (q - 1) as u32 / 2;
    let d_star = (q as usize + 1) / 2;
    let one_mod_four = q % 4 == 1;
    let mut checks = vec![
        Check::new("group-order", cover.group.order() as u64 == q * (q * q - 1), format!("|SL(2,{q})| = {}", cover.group.order())),
        Check::new("degree", n as u64 == q + 1, format!("n = {n}")),
        Check::new("character-count", records.len() as u64 == q - 1, format!("{} characters", records.len())),
    ];
    let mut passing: Vec<u32> = records.iter().filter(|c| c.higman).filter_map(|c| c.level).collect();
    passing.sort_unstable();
    checks.push(Check::new("detector-census", passing == vec![0, half], format!("Higman at levels {passing:?}")));

    let quad = records.iter().find(|c| c.level == Some(half));
    let expected = if one_mod_four { vec![half as i64, 0, half as i64, 0] } else { vec![0, half as i64, 0, half as i64] };
    let (label, z) = if one_mod_four { ("psl2-closed-form-1mod4", 0) } else { ("psl2-closed-form-3mod4", 1) };
    let params_ok = quad.and_then(|c| c.params.as_ref()) == Some(&expected);
    checks.push(Check::new(label, params_ok, format!("expected {expected:?}, got {:?}", quad.and_then(|c| c.params.clone()))));
    checks.push(Check::new("psl2-key", quad.and_then(|c| c.key.as_ref()).map(|k| k.z) == Some(z), format!("expected z exponent {z} in C_4")));

    let odd: Vec<_> = quad.map(|c| c.branches.iter().filter(|b| b.k % 2 == 1).collect()).unwrap_or_default();
    let etf_ok = !odd.is_empty() && odd.iter().all(|b| b.certified && b.d_rounded() == d_star);
    checks.push(Check::new("psl2-etf", etf_ok, format!("odd branches certify d = {d_star}")));
    let real_ok = !odd.is_empty() && odd.iter().all(|b| b.real_algebraic == one_mod_four);
    checks.push(Check::new("psl2-realness", real_ok, format!("realness is {one_mod_four} for q mod 4 = {}", q % 4)));
    let d_ok = records.iter().flat_map(|c| &c.branches).all(|b| [1, n - 1, d_star, n - d_star].contains(&b.d_rounded()));
    checks.push(Check::new("d-values", d_ok, "every branch has d in {1, n-1, (q+1)/2}"));
    checks.extend(common_checks(n, &records));

    Ok(FamilyReport {
        schema: SCHEMA_VERSION,
        family: "psl2".into(),
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
