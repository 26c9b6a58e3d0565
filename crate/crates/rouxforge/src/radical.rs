//! Radicalization of a cover, the Higman-pair detector, keys, and the roux they produce.
//!
//! Elements of `G* x C_r` are never materialized except by [`materialize`]; a pair
//! `(g, u)` is handled as a group index plus an exponent mod `r`. The subgroup
//! `H = {(xi, -a(xi))}` is the graph of the character, so decompositions
//! `y = xi x eta` inside `G*` carry all the information.

use crate::group::{
    direct_product_with_cyclic, orbit, Action, FiniteGroup, GroupError, GroupRule, LinearCharacter, ProductRule, Subgroup,
    TableAction,
};
use crate::roux::{RouxError, RouxMatrix, RouxParameters};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

/// Above this order of `G* x C_r` the normalizer identity is checked through fixed points only.
pub const EXHAUSTIVE_NORMALIZER_CAP: usize = 10_000;
/// Largest product group [`verify_higman_axioms`] will accept.
pub const LITERAL_CAP: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadicalError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Roux(#[from] RouxError),
    #[error("action has fewer than 3 points")]
    TooFewPoints,
    #[error("action is not transitive")]
    NotTransitive,
    #[error("H1 fails: action is not doubly transitive")]
    NotDoublyTransitive,
    #[error("action is not compatible with the group multiplication")]
    IncompatibleAction,
    #[error("kernel of the projection is not central")]
    KernelNotCentral,
    #[error("bad projection: {0}")]
    BadProjection(String),
    #[error("character is not a homomorphism on the stabilizer")]
    NotHomomorphism,
    #[error("element {0} lies in the stabilizer")]
    InStabilizer(usize),
    #[error("radicalization is not a Higman pair")]
    NotHigman,
    #[error("no decomposition of {0} through the chosen x")]
    NoDecomposition(usize),
    #[error("decompositions of {0} disagree on the character value")]
    Ambiguous(usize),
    #[error("normalizer identity fails at element {0}")]
    Normalizer(usize),
    #[error("exponent {0} is not a square root of the key value")]
    NotARoot(u32),
    #[error("key fails {0}")]
    KeyAxiom(&'static str),
    #[error("non-integral parameter count {0} * (n-1) / {1}")]
    NonIntegral(u64, usize),
    #[error("transversal element {0} does not map point 0 to {1}")]
    BadTransversal(usize, usize),
    #[error("key lies in the normalizer of H")]
    KeyInNormalizer,
    #[error("group of order {0} is too large for the literal check")]
    TooLarge(usize),
}

/// A group `G*` acting on `[n]` through its projection to `G`, with the preimage stabilizer of point 0.
pub struct CoverData<R: GroupRule> {
    pub group: FiniteGroup<R>,
    pub action: Arc<dyn Action<R::Element>>,
    pub n: usize,
    pub stabilizer: Subgroup,
    /// Kernel of the projection; central.
    pub kernel: Subgroup,
    /// `transversal[i]` is the smallest element index sending point 0 to `i`.
    pub transversal: Vec<usize>,
    point_of: Vec<u32>,
}

impl<R: GroupRule> CoverData<R> {
    /// The projection is implicit: its kernel is the set of elements acting trivially.
    pub fn new(group: FiniteGroup<R>, action: Arc<dyn Action<R::Element>>) -> Result<Self, RadicalError> {
        Self::build(group, action, None)
    }

    /// Cover with an explicit projection table onto a base permutation group.
    pub fn from_projection<B: GroupRule>(
        group: FiniteGroup<R>,
        base: &FiniteGroup<B>,
        base_action: &dyn Action<B::Element>,
        projection: Vec<usize>,
    ) -> Result<Self, RadicalError> {
        if projection.len() != group.order() {
            return Err(RadicalError::BadProjection(format!("{} images for {} elements", projection.len(), group.order())));
        }
        if let Some(&bad) = projection.iter().find(|&&p| p >= base.order()) {
            return Err(RadicalError::BadProjection(format!("image {bad} out of range")));
        }
        for g in 0..group.order() {
            for &s in group.generators() {
                if projection[group.mul(g, s)] != base.mul(projection[g], projection[s]) {
                    return Err(RadicalError::BadProjection(format!("not a homomorphism at ({g}, {s})")));
                }
            }
        }
        let mut hit = vec![false; base.order()];
        for &p in &projection {
            hit[p] = true;
        }
        if hit.iter().any(|&h| !h) {
            return Err(RadicalError::BadProjection("not onto".into()));
        }
        let degree = base_action.degree();
        let images = (0..group.order())
            .map(|g| {
                let b = base.element(projection[g]);
                (group.element(g).clone(), (0..degree).map(|p| base_action.act(b, p) as u32).collect())
            })
            .collect();
        let kernel: Vec<usize> = (0..group.order()).filter(|&g| projection[g] == base.identity()).collect();
        Self::build(group, Arc::new(TableAction { degree, images }), Some(kernel))
    }

    fn build(group: FiniteGroup<R>, action: Arc<dyn Action<R::Element>>, kernel: Option<Vec<usize>>) -> Result<Self, RadicalError> {
        let n = action.degree();
        if n < 3 {
            return Err(RadicalError::TooFewPoints);
        }
        if !crate::group::action_is_compatible(&group, action.as_ref()) {
            return Err(RadicalError::IncompatibleAction);
        }
        let point_of: Vec<u32> = group.elements().iter().map(|g| action.act(g, 0) as u32).collect();
        let mut transversal = vec![usize::MAX; n];
        for (g, &p) in point_of.iter().enumerate() {
            if transversal[p as usize] == usize::MAX {
                transversal[p as usize] = g;
            }
        }
        if transversal.contains(&usize::MAX) {
            return Err(RadicalError::NotTransitive);
        }
        let members: Vec<usize> = (0..group.order()).filter(|&g| point_of[g] == 0).collect();
        let stabilizer = Subgroup::from_members(&group, members)?;
        if orbit(&group, action.as_ref(), stabilizer.generators(), 1).len() != n - 1 {
            return Err(RadicalError::NotDoublyTransitive);
        }
        let kernel_members = match kernel {
            Some(k) => k,
            None => stabilizer
                .members()
                .iter()
                .copied()
                .filter(|&g| (0..n).all(|p| action.act(group.element(g), p) == p))
                .collect(),
        };
        for &k in &kernel_members {
            if group.generators().iter().any(|&s| group.mul(k, s) != group.mul(s, k)) {
                return Err(RadicalError::KernelNotCentral);
            }
        }
        let kernel = Subgroup::from_members(&group, kernel_members)?;
        Ok(CoverData { group, action, n, stabilizer, kernel, transversal, point_of })
    }

    /// Image of point 0 under element `g`.
    #[inline]
    pub fn point(&self, g: usize) -> usize {
        self.point_of[g] as usize
    }

    pub fn base_order(&self) -> usize {
        self.group.order() / self.kernel.order()
    }

    /// The first element outside the stabilizer in canonical order.
    pub fn default_x(&self) -> usize {
        (0..self.group.order()).find(|&g| self.point_of[g] != 0).expect("transitive on at least 3 points")
    }

    pub fn non_stabilizer_elements(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.group.order()).filter(move |&g| self.point_of[g] != 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizerCheck {
    /// Every element outside the stabilizer was shown not to normalize `H`.
    Exhaustive,
    /// No point other than 0 is fixed by all stabilizer generators, so nothing outside normalizes `H`.
    FixedPoints,
}

/// `(G* x C_r, H)` for a character `alpha` of the stabilizer with `r = 2 |im alpha|`.
pub struct Radicalization<'a, R: GroupRule> {
    pub cover: &'a CoverData<R>,
    pub alpha: LinearCharacter,
    pub r_prime: u32,
    pub r: u32,
    /// `alpha` as exponents mod `r`, aligned with the stabilizer members.
    exps: Vec<u32>,
    pub normalizer: NormalizerCheck,
}

pub fn radicalize<'a, R: GroupRule>(cover: &'a CoverData<R>, alpha: &LinearCharacter) -> Result<Radicalization<'a, R>, RadicalError> {
    let stab = &cover.stabilizer;
    if !alpha.is_homomorphism(&cover.group, stab) {
        return Err(RadicalError::NotHomomorphism);
    }
    let r_prime = alpha.image_order();
    let r = 2 * r_prime;
    let m = alpha.modulus as u64;
    let exps = alpha.values.iter().map(|&v| ((2 * v as u64 * r_prime as u64 / m) % r as u64) as u32).collect();
    let mut rad = Radicalization { cover, alpha: alpha.clone(), r_prime, r, exps, normalizer: NormalizerCheck::FixedPoints };
    rad.normalizer = rad.check_normalizer()?;
    Ok(rad)
}

impl<'a, R: GroupRule> Radicalization<'a, R> {
    /// `alpha(g)` as an exponent mod `r`; `g` must lie in the stabilizer.
    #[inline]
    pub fn a(&self, g: usize) -> u32 {
        self.exps[self.cover.stabilizer.position(g).expect("stabilizer element")]
    }

    pub fn h_order(&self) -> usize {
        self.cover.stabilizer.order()
    }

    pub fn product_order(&self) -> usize {
        self.cover.group.order() * self.r as usize
    }

    fn normalizes_h(&self, g: usize) -> bool {
        let grp = &self.cover.group;
        self.cover.stabilizer.generators().iter().all(|&s| {
            let c = grp.conjugate(g, s);
            self.cover.stabilizer.contains(c) && self.a(c) == self.a(s)
        })
    }

    fn check_normalizer(&self) -> Result<NormalizerCheck, RadicalError> {
        if self.product_order() <= EXHAUSTIVE_NORMALIZER_CAP {
            if let Some(g) = self.cover.non_stabilizer_elements().find(|&g| self.normalizes_h(g)) {
                return Err(RadicalError::Normalizer(g));
            }
            return Ok(NormalizerCheck::Exhaustive);
        }
        let grp = &self.cover.group;
        let act = self.cover.action.as_ref();
        let gens = self.cover.stabilizer.generators();
        for p in 1..self.cover.n {
            if gens.iter().all(|&s| act.act(grp.element(s), p) == p) {
                return Err(RadicalError::Normalizer(self.cover.transversal[p]));
            }
        }
        Ok(NormalizerCheck::FixedPoints)
    }

    /// First `xi` in the stabilizer with `x xi x^-1` in the stabilizer but a different character value.
    pub fn detector_witness(&self, x: usize) -> Result<Option<usize>, RadicalError> {
        let stab = &self.cover.stabilizer;
        if stab.contains(x) {
            return Err(RadicalError::InStabilizer(x));
        }
        let grp = &self.cover.group;
        Ok(stab.members().iter().copied().find(|&xi| {
            let y = grp.conjugate(x, xi);
            stab.contains(y) && self.a(y) != self.a(xi)
        }))
    }

    pub fn detect(&self, x: usize) -> Result<bool, RadicalError> {
        Ok(self.detector_witness(x)?.is_none())
    }

    pub fn decomposer(&self, x: usize) -> Result<Decomposer<'_, 'a, R>, RadicalError> {
        Decomposer::new(self, x)
    }
}

pub fn detect_higman<R: GroupRule>(cover: &CoverData<R>, alpha: &LinearCharacter, x: usize) -> Result<bool, RadicalError> {
    radicalize(cover, alpha)?.detect(x)
}

/// All `(xi, eta)` in the stabilizer with `y = xi x eta`, indexed by the point `xi x . 0 = y . 0`.
pub struct Decomposer<'r, 'a, R: GroupRule> {
    rad: &'r Radicalization<'a, R>,
    pub x: usize,
    /// For each point, pairs `(xi, x^-1 xi^-1)`.
    buckets: Vec<Vec<(usize, usize)>>,
}

impl<'r, 'a, R: GroupRule> Decomposer<'r, 'a, R> {
    fn new(rad: &'r Radicalization<'a, R>, x: usize) -> Result<Self, RadicalError> {
        let cover = rad.cover;
        if cover.stabilizer.contains(x) {
            return Err(RadicalError::InStabilizer(x));
        }
        let grp = &cover.group;
        let xinv = grp.inv(x);
        let mut buckets = vec![Vec::new(); cover.n];
        for &xi in cover.stabilizer.members() {
            let p = cover.point(grp.mul(xi, x));
            buckets[p].push((xi, grp.mul(xinv, grp.inv(xi))));
        }
        Ok(Decomposer { rad, x, buckets })
    }

    pub fn decompositions(&self, y: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let grp = &self.rad.cover.group;
        let p = self.rad.cover.point(y);
        self.buckets[p].iter().map(move |&(xi, t)| (xi, grp.mul(t, y)))
    }

    /// `a(xi) + a(eta)` mod `r`, the same for every decomposition of `y`.
    pub fn value(&self, y: usize) -> Result<u32, RadicalError> {
        let r = self.rad.r;
        let mut out = None;
        for (xi, eta) in self.decompositions(y) {
            let s = (self.rad.a(xi) + self.rad.a(eta)) % r;
            match out {
                None => out = Some(s),
                Some(v) if v != s => return Err(RadicalError::Ambiguous(y)),
                _ => {}
            }
        }
        out.ok_or(RadicalError::NoDecomposition(y))
    }
}

/// `(x, z)` with `z` an exponent mod `r`, and the decomposition `x^-1 = xi x eta` that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Key {
    pub x: usize,
    pub z: u32,
    pub xi: usize,
    pub eta: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootChoice {
    Smaller,
    Larger,
    Exponent(u32),
}

pub fn find_key<R: GroupRule>(rad: &Radicalization<'_, R>, x: usize) -> Result<Key, RadicalError> {
    find_key_with(rad, x, RootChoice::Smaller)
}

pub fn find_key_with<R: GroupRule>(rad: &Radicalization<'_, R>, x: usize, choice: RootChoice) -> Result<Key, RadicalError> {
    if !rad.detect(x)? {
        return Err(RadicalError::NotHigman);
    }
    let dec = rad.decomposer(x)?;
    let xinv = rad.cover.group.inv(x);
    let s = dec.value(xinv)?;
    let (xi, eta) = dec.decompositions(xinv).next().ok_or(RadicalError::NoDecomposition(xinv))?;
    let roots = [s / 2, s / 2 + rad.r_prime];
    let z = match choice {
        RootChoice::Smaller => roots[0],
        RootChoice::Larger => roots[1],
        RootChoice::Exponent(e) if roots.contains(&(e % rad.r)) => e % rad.r,
        RootChoice::Exponent(e) => return Err(RadicalError::NotARoot(e)),
    };
    let key = Key { x, z, xi, eta };
    check_key(rad, &key)?;
    Ok(key)
}

/// H3 to H5 in terms of decompositions in `G*`; the product group is not built.
pub fn check_key<R: GroupRule>(rad: &Radicalization<'_, R>, key: &Key) -> Result<(), RadicalError> {
    let grp = &rad.cover.group;
    let r = rad.r;
    let dec = rad.decomposer(key.x)?;
    if dec.value(grp.inv(key.x))? != (2 * key.z) % r {
        return Err(RadicalError::KeyAxiom("H3"));
    }
    for &zeta in rad.cover.stabilizer.members() {
        if dec.value(grp.conjugate(zeta, key.x))? != 0 {
            return Err(RadicalError::KeyAxiom("H4"));
        }
        if dec.value(grp.mul(zeta, key.x))? != rad.a(zeta) {
            return Err(RadicalError::KeyAxiom("H5"));
        }
    }
    Ok(())
}

/// `c_w = (n-1)/|G0*| * #{zeta : x zeta x^-1 = xi x eta, a(xi eta zeta^-1) - z = w}`.
pub fn roux_params_from_radicalization<R: GroupRule>(rad: &Radicalization<'_, R>, key: &Key) -> Result<RouxParameters, RadicalError> {
    let grp = &rad.cover.group;
    let stab = &rad.cover.stabilizer;
    let r = rad.r;
    let dec = rad.decomposer(key.x)?;
    let mut counts = vec![0u64; r as usize];
    for &zeta in stab.members() {
        let y = grp.conjugate(key.x, zeta);
        if stab.contains(y) {
            continue;
        }
        let s = dec.value(y)?;
        counts[((s + 2 * r - rad.a(zeta) - key.z) % r) as usize] += 1;
    }
    let n = rad.cover.n;
    let h = stab.order();
    let mut c = Vec::with_capacity(r as usize);
    for &k in &counts {
        let num = k * (n as u64 - 1);
        if num % h as u64 != 0 {
            return Err(RadicalError::NonIntegral(k, h));
        }
        c.push((num / h as u64) as i64);
    }
    Ok(RouxParameters { n, r, c })
}

/// `B_ij = w` where `x_i^-1 x_j` lies in `H (1,w) b H`; uniqueness is checked cell by cell.
pub fn roux_from_higman_pair<R: GroupRule>(
    rad: &Radicalization<'_, R>,
    key: &Key,
    transversal: Option<&[usize]>,
) -> Result<RouxMatrix, RadicalError> {
    let cover = rad.cover;
    let grp = &cover.group;
    let reps = transversal.unwrap_or(&cover.transversal);
    for (i, &t) in reps.iter().enumerate() {
        if t >= grp.order() || cover.point(t) != i {
            return Err(RadicalError::BadTransversal(t, i));
        }
    }
    if reps.len() != cover.n {
        return Err(RadicalError::BadTransversal(reps.len(), cover.n));
    }
    let r = rad.r;
    let dec = rad.decomposer(key.x)?;
    let mut entries = vec![vec![None; cover.n]; cover.n];
    for i in 0..cover.n {
        let inv_i = grp.inv(reps[i]);
        for j in 0..cover.n {
            if i != j {
                let s = dec.value(grp.mul(inv_i, reps[j]))?;
                entries[i][j] = Some((s + r - key.z) % r);
            }
        }
    }
    Ok(RouxMatrix::new(r, entries)?)
}

/// The only ranks available to lines from a trivial character.
pub fn trivial_character_dims(n: usize) -> [usize; 2] {
    [1, n - 1]
}

/// The radicalization as an explicit group `G* x C_r` with `H` and, optionally, the key.
pub struct Materialized<R: GroupRule> {
    pub group: FiniteGroup<ProductRule<R>>,
    pub h: Subgroup,
    pub key: Option<usize>,
}

pub fn materialize<R: GroupRule + Clone>(rad: &Radicalization<'_, R>, key: Option<&Key>) -> Result<Materialized<R>, RadicalError> {
    if rad.product_order() > LITERAL_CAP {
        return Err(RadicalError::TooLarge(rad.product_order()));
    }
    let base = &rad.cover.group;
    let group = direct_product_with_cyclic(base, rad.r)?;
    let find = |g: usize, u: u32| group.index_of(&(base.element(g).clone(), u)).expect("product element");
    let members = rad.cover.stabilizer.members().iter().map(|&xi| find(xi, (rad.r - rad.a(xi)) % rad.r)).collect();
    let h = Subgroup::from_members(&group, members)?;
    let key = key.map(|k| find(k.x, k.z));
    Ok(Materialized { group, h, key })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HigmanAxiomReport {
    pub normalizer_order: usize,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
}

impl HigmanAxiomReport {
    pub fn first_failure(&self) -> Option<&'static str> {
        [(self.h1, "H1"), (self.h2, "H2"), (self.h3, "H3"), (self.h4, "H4"), (self.h5, "H5")]
            .into_iter()
            .find(|(ok, _)| !ok)
            .map(|(_, name)| name)
    }

    pub fn passes(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Literal H1 to H5 over an explicit group; computes `K = N_G(H)` and the action on `G/K` directly.
pub struct LiteralChecker<'g, R: GroupRule> {
    group: &'g FiniteGroup<R>,
    h: &'g Subgroup,
    k: Subgroup,
    h1: bool,
    h2: bool,
}

impl<'g, R: GroupRule> LiteralChecker<'g, R> {
    pub fn new(group: &'g FiniteGroup<R>, h: &'g Subgroup) -> Result<Self, RadicalError> {
        if group.order() > LITERAL_CAP {
            return Err(RadicalError::TooLarge(group.order()));
        }
        let normalizes = |g: usize| h.members().iter().all(|&a| h.contains(group.conjugate(g, a)));
        let k = Subgroup::from_members(group, (0..group.order()).filter(|&g| normalizes(g)).collect())?;
        let mut coset = vec![u32::MAX; group.order()];
        let mut reps = Vec::new();
        for g in 0..group.order() {
            if coset[g] == u32::MAX {
                for &a in k.members() {
                    coset[group.mul(g, a)] = reps.len() as u32;
                }
                reps.push(g);
            }
        }
        let h1 = if reps.len() < 2 {
            true
        } else {
            let home = coset[group.identity()] as usize;
            let start = (home + 1) % reps.len();
            let mut seen = vec![false; reps.len()];
            seen[start] = true;
            let mut stack = vec![start];
            let mut count = 1;
            while let Some(c) = stack.pop() {
                for &a in k.generators() {
                    let d = coset[group.mul(a, reps[c])] as usize;
                    if !seen[d] {
                        seen[d] = true;
                        count += 1;
                        stack.push(d);
                    }
                }
            }
            count == reps.len() - 1
        };
        let h2 = k.generators().iter().all(|&a| k.generators().iter().all(|&b| h.contains(group.commutator(a, b))));
        Ok(LiteralChecker { group, h, k, h1, h2 })
    }

    pub fn normalizer(&self) -> &Subgroup {
        &self.k
    }

    pub fn check(&self, b: usize) -> Result<HigmanAxiomReport, RadicalError> {
        let (g, h, k) = (self.group, self.h, &self.k);
        if k.contains(b) {
            return Err(RadicalError::KeyInNormalizer);
        }
        let mut hbh = vec![false; g.order()];
        for &u in h.members() {
            let ub = g.mul(u, b);
            for &v in h.members() {
                hbh[g.mul(ub, v)] = true;
            }
        }
        let h3 = hbh[g.inv(b)];
        let h4 = k.members().iter().all(|&a| hbh[g.conjugate(a, b)]);
        let h5 = k.members().iter().all(|&a| !hbh[g.mul(a, b)] || h.contains(a));
        Ok(HigmanAxiomReport { normalizer_order: k.order(), h1: self.h1, h2: self.h2, h3, h4, h5 })
    }

    /// Every `b` outside `K` that passes all five axioms.
    pub fn all_keys(&self) -> Vec<usize> {
        (0..self.group.order())
            .filter(|&b| !self.k.contains(b))
            .filter(|&b| self.check(b).map(|r| r.passes()).unwrap_or(false))
            .collect()
    }
}

pub fn verify_higman_axioms<R: GroupRule>(group: &FiniteGroup<R>, h: &Subgroup, b: usize) -> Result<HigmanAxiomReport, RadicalError> {
    LiteralChecker::new(group, h)?.check(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::group::{enumerate_linear_characters, MatrixRule, NaturalAction, PermutationRule, ProjectiveAction};
    use crate::roux::verify_roux;

    fn s3_cover() -> CoverData<PermutationRule> {
        let g = FiniteGroup::closure(PermutationRule { degree: 3 }, vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        CoverData::new(g, Arc::new(NaturalAction { degree: 3 })).unwrap()
    }

    fn sl2_cover(q: u64) -> (CoverData<MatrixRule>, Arc<Field>) {
        let f = Arc::new(Field::of_order(q).unwrap());
        let rule = MatrixRule::new(f.clone(), 2);
        let l = f.primitive_element();
        let gens = vec![vec![1, 1, 0, 1], vec![l, 0, 0, f.inv(l)], vec![0, 1, f.neg(1), 0]];
        let act = ProjectiveAction::from_orbit(&rule, &gens, &[1, 0]);
        let g = FiniteGroup::closure(rule, gens).unwrap();
        (CoverData::new(g, Arc::new(act)).unwrap(), f)
    }

    /// Character of the upper triangular stabilizer through the top-left entry, at level `j` of `F_q^*`.
    fn sl2_character(cover: &CoverData<MatrixRule>, f: &Field, j: u32) -> LinearCharacter {
        let m = f.order() - 1;
        LinearCharacter::from_fn(&cover.group, &cover.stabilizer, m, |e| (f.log(e[0]).unwrap() * j) % m)
    }

    fn standard_x(cover: &CoverData<MatrixRule>, f: &Field) -> usize {
        cover.group.index_of(&vec![0, 1, f.neg(1), 0]).unwrap()
    }

    #[test]
    fn radicalization_bookkeeping() {
        let s3 = s3_cover();
        let rad = radicalize(&s3, &LinearCharacter::trivial(&s3.stabilizer)).unwrap();
        assert_eq!((rad.r_prime, rad.r, rad.h_order(), rad.product_order()), (1, 2, 2, 12));
        assert_eq!(rad.normalizer, NormalizerCheck::Exhaustive);

        let (c5, f5) = sl2_cover(5);
        let rad = radicalize(&c5, &sl2_character(&c5, &f5, 2)).unwrap();
        assert_eq!((rad.r, rad.h_order(), rad.product_order()), (4, 20, 480));
        assert_eq!(c5.n, 6);
        assert_eq!(c5.kernel.order(), 2);
        assert_eq!(c5.base_order(), 60);
    }

    #[test]
    fn detector_on_sl2_matches_realness() {
        for q in [5u64, 7, 11] {
            let (cover, f) = sl2_cover(q);
            let x = standard_x(&cover, &f);
            for j in 0..(q as u32 - 1) {
                let alpha = sl2_character(&cover, &f, j);
                let real = (2 * j) % (q as u32 - 1) == 0;
                assert_eq!(detect_higman(&cover, &alpha, x).unwrap(), real, "q={q} j={j}");
            }
        }
    }

    #[test]
    fn detector_rejects_stabilizer_elements() {
        let (cover, f) = sl2_cover(5);
        let alpha = sl2_character(&cover, &f, 1);
        assert_eq!(detect_higman(&cover, &alpha, cover.group.identity()), Err(RadicalError::InStabilizer(cover.group.identity())));
    }

    #[test]
    fn keys_and_parameters_for_sl2() {
        for (q, z, expect) in [(5u64, 0u32, vec![2i64, 0, 2, 0]), (7, 1, vec![0, 3, 0, 3]), (13, 0, vec![6, 0, 6, 0])] {
            let (cover, f) = sl2_cover(q);
            let x = standard_x(&cover, &f);
            let alpha = sl2_character(&cover, &f, (q as u32 - 1) / 2);
            let rad = radicalize(&cover, &alpha).unwrap();
            let key = find_key(&rad, x).unwrap();
            assert_eq!(key.z, z, "q={q}");
            let params = roux_params_from_radicalization(&rad, &key).unwrap();
            assert_eq!(params.c, expect, "q={q}");
            let b = roux_from_higman_pair(&rad, &key, None).unwrap();
            assert_eq!(verify_roux(&b).unwrap(), params);
        }
    }

    #[test]
    fn trivial_character_gives_dumb_parameters() {
        let (cover, _) = sl2_cover(7);
        let rad = radicalize(&cover, &LinearCharacter::trivial(&cover.stabilizer)).unwrap();
        let key = find_key(&rad, cover.default_x()).unwrap();
        let params = roux_params_from_radicalization(&rad, &key).unwrap();
        assert_eq!(params.c, vec![6, 0]);
        assert_eq!(trivial_character_dims(6), [1, 5]);
        assert_eq!(trivial_character_dims(3), [1, 2]);
    }

    #[test]
    fn both_roots_give_shifted_parameters() {
        let (cover, f) = sl2_cover(7);
        let rad = radicalize(&cover, &sl2_character(&cover, &f, 3)).unwrap();
        let x = standard_x(&cover, &f);
        let a = roux_params_from_radicalization(&rad, &find_key_with(&rad, x, RootChoice::Smaller).unwrap()).unwrap();
        let b = roux_params_from_radicalization(&rad, &find_key_with(&rad, x, RootChoice::Larger).unwrap()).unwrap();
        let mut sa = a.c.clone();
        let mut sb = b.c.clone();
        sa.sort();
        sb.sort();
        assert_eq!(sa, sb);
        assert_eq!(find_key_with(&rad, x, RootChoice::Exponent(2)), Err(RadicalError::NotARoot(2)));
    }

    #[test]
    fn non_higman_character_has_no_key() {
        let (cover, f) = sl2_cover(5);
        let rad = radicalize(&cover, &sl2_character(&cover, &f, 1)).unwrap();
        assert_eq!(find_key(&rad, standard_x(&cover, &f)), Err(RadicalError::NotHigman));
    }

    #[test]
    fn literal_axioms_on_s3_and_sl2() {
        let s3 = s3_cover();
        let rad = radicalize(&s3, &LinearCharacter::trivial(&s3.stabilizer)).unwrap();
        let key = find_key(&rad, s3.default_x()).unwrap();
        let mat = materialize(&rad, Some(&key)).unwrap();
        let report = verify_higman_axioms(&mat.group, &mat.h, mat.key.unwrap()).unwrap();
        assert!(report.passes(), "{report:?}");
        assert_eq!(report.normalizer_order, 2 * 2);
        let in_k = mat.group.identity();
        assert_eq!(verify_higman_axioms(&mat.group, &mat.h, in_k), Err(RadicalError::KeyInNormalizer));

        let (cover, f) = sl2_cover(5);
        let rad = radicalize(&cover, &sl2_character(&cover, &f, 1)).unwrap();
        let mat = materialize(&rad, None).unwrap();
        let checker = LiteralChecker::new(&mat.group, &mat.h).unwrap();
        assert_eq!(checker.normalizer().order(), 20 * 8);
        assert!(checker.all_keys().is_empty());
        for b in (0..mat.group.order()).filter(|&b| !checker.normalizer().contains(b)) {
            let report = checker.check(b).unwrap();
            assert!(report.h1 && report.h2 && !report.h5, "{b} {report:?}");
        }
    }

    #[test]
    fn non_doubly_transitive_action_is_rejected() {
        let g = FiniteGroup::closure(PermutationRule { degree: 4 }, vec![vec![1, 2, 3, 0]]).unwrap();
        assert_eq!(CoverData::new(g, Arc::new(NaturalAction { degree: 4 })).err(), Some(RadicalError::NotDoublyTransitive));
        let g = FiniteGroup::closure(PermutationRule { degree: 4 }, vec![vec![1, 0, 2, 3]]).unwrap();
        assert_eq!(CoverData::new(g, Arc::new(NaturalAction { degree: 4 })).err(), Some(RadicalError::NotTransitive));
    }

    #[test]
    fn explicit_projection_matches_implicit_cover() {
        let (cover, _) = sl2_cover(5);
        let base_rule = PermutationRule { degree: 6 };
        let perm = |g: usize| (0..6).map(|p| cover.action.act(cover.group.element(g), p) as u32).collect::<Vec<u32>>();
        let base = FiniteGroup::closure(base_rule, cover.group.generators().iter().map(|&g| perm(g)).collect()).unwrap();
        let projection = (0..cover.group.order()).map(|g| base.index_of(&perm(g)).unwrap()).collect();
        let gens: Vec<Vec<u32>> = cover.group.generators().iter().map(|&g| cover.group.element(g).clone()).collect();
        let group = FiniteGroup::closure(cover.group.rule().clone(), gens).unwrap();
        let explicit = CoverData::from_projection(group, &base, &NaturalAction { degree: 6 }, projection).unwrap();
        assert_eq!(explicit.kernel.order(), 2);
        assert_eq!(explicit.stabilizer.members(), cover.stabilizer.members());
        let chars = enumerate_linear_characters(&explicit.group, &explicit.stabilizer).unwrap();
        let passing = chars.iter().filter(|a| detect_higman(&explicit, a, explicit.default_x()).unwrap()).count();
        assert_eq!(passing, 2);
    }
}
