//! Group, character and cover files for `detect`.

use crate::Failure;
use rouxforge::families::{cached_closure, FamilyOptions};
use rouxforge::field::Field;
use rouxforge::group::{
    FiniteGroup, GroupRule, LinearCharacter, MatrixRule, NaturalAction, PermutationRule, ProjectiveAction, Subgroup,
};
use rouxforge::radical::{CoverData, RadicalError};
use serde::Deserialize;
use std::collections::VecDeque;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Vec<u32>>,
        #[serde(default)]
        x: Option<Vec<u32>>,
    },
    /// Matrices over `F_q` in row-major field codes, acting on the orbit of `seed` (default `e_1`).
    Matrix {
        q: u64,
        dim: usize,
        generators: Vec<Vec<u32>>,
        #[serde(default)]
        seed: Option<Vec<u32>>,
        #[serde(default)]
        x: Option<Vec<u32>>,
    },
}

/// Values of a character on elements that generate the stabilizer of point 0.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterSpec {
    pub modulus: u32,
    pub images: Vec<Image>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Image {
    pub element: Vec<u32>,
    pub value: u32,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("cannot parse {}: {e}", path.display())))
}

pub fn cover_failure(e: RadicalError) -> Failure {
    match e {
        RadicalError::NotDoublyTransitive => Failure::precondition(e.to_string()),
        RadicalError::NotTransitive | RadicalError::TooFewPoints => Failure::precondition(format!("H1 fails: {e}")),
        other => Failure::input(other.to_string()),
    }
}

/// Pairs `(g, p(g))` under componentwise multiplication.
#[derive(Clone, Debug)]
struct PairRule<A> {
    cover: A,
    base: PermutationRule,
}

impl<A: GroupRule<Element = Vec<u32>>> GroupRule for PairRule<A> {
    type Element = (Vec<u32>, Vec<u32>);
    fn identity(&self) -> Self::Element {
        (self.cover.identity(), self.base.identity())
    }
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        (self.cover.multiply(&a.0, &b.0), self.base.multiply(&a.1, &b.1))
    }
    fn invert(&self, a: &Self::Element) -> Self::Element {
        (self.cover.invert(&a.0), self.base.invert(&a.1))
    }
}

/// The action through a base permutation group whose generators are the images of the cover generators, in order.
fn projected_cover<R: GroupRule<Element = Vec<u32>> + Clone>(
    group: FiniteGroup<R>,
    gens: &[Vec<u32>],
    base: &GroupSpec,
) -> Result<CoverData<R>, Failure> {
    let GroupSpec::Permutation { degree, generators: base_gens, .. } = base else {
        return Err(Failure::input("the cover file must describe a permutation group".into()));
    };
    if base_gens.len() != gens.len() {
        return Err(Failure::input(format!("cover file has {} generators, group file has {}", base_gens.len(), gens.len())));
    }
    let base_rule = PermutationRule { degree: *degree };
    for g in base_gens {
        base_rule.check(g).map_err(|e| Failure::input(e.to_string()))?;
    }
    let base = FiniteGroup::closure(base_rule.clone(), base_gens.clone()).map_err(|e| Failure::input(e.to_string()))?;
    let pairs: Vec<(Vec<u32>, Vec<u32>)> = gens.iter().cloned().zip(base_gens.iter().cloned()).collect();
    let graph = FiniteGroup::closure(PairRule { cover: group.rule().clone(), base: base_rule }, pairs)
        .map_err(|e| Failure::input(e.to_string()))?;
    if graph.order() != group.order() {
        return Err(Failure::input("generator images do not define a homomorphism onto the base group".into()));
    }
    let mut projection = vec![usize::MAX; group.order()];
    for (g, p) in graph.elements() {
        projection[group.index_of(g).expect("pair closure stays in the group")] = base.index_of(p).expect("pair closure stays in the base");
    }
    CoverData::from_projection(group, &base, &NaturalAction { degree: *degree }, projection).map_err(cover_failure)
}

pub enum Loaded {
    Permutation(CoverData<PermutationRule>, Option<usize>),
    Matrix(CoverData<MatrixRule>, Option<usize>),
}

fn find_x<R: GroupRule<Element = Vec<u32>>>(cover: &CoverData<R>, x: &Option<Vec<u32>>) -> Result<Option<usize>, Failure> {
    let Some(x) = x else { return Ok(None) };
    let i = cover.group.index_of(x).ok_or_else(|| Failure::input(format!("x = {x:?} is not in the group")))?;
    if cover.point(i) == 0 {
        return Err(Failure::input("x fixes point 0; it must lie outside the stabilizer".into()));
    }
    Ok(Some(i))
}

pub fn load_group(spec: &GroupSpec, cover_spec: Option<&GroupSpec>, opts: &FamilyOptions) -> Result<Loaded, Failure> {
    let group_err = |e: rouxforge::families::FamilyError| Failure::input(e.to_string());
    match spec {
        GroupSpec::Permutation { degree, generators, x } => {
            let rule = PermutationRule { degree: *degree };
            for g in generators {
                rule.check(g).map_err(|e| Failure::input(e.to_string()))?;
            }
            let group = cached_closure(rule, generators.clone(), &format!("permutation degree={degree}"), opts).map_err(group_err)?;
            let cover = match cover_spec {
                Some(base) => projected_cover(group, generators, base)?,
                None => CoverData::new(group, Arc::new(NaturalAction { degree: *degree })).map_err(cover_failure)?,
            };
            let x = find_x(&cover, x)?;
            Ok(Loaded::Permutation(cover, x))
        }
        GroupSpec::Matrix { q, dim, generators, seed, x } => {
            let field = Arc::new(Field::of_order(*q).map_err(|e| Failure::input(e.to_string()))?);
            let rule = MatrixRule::new(field, *dim);
            for g in generators {
                rule.check(g).map_err(|e| Failure::input(e.to_string()))?;
            }
            let seed = seed.clone().unwrap_or_else(|| (0..*dim).map(|i| (i == 0) as u32).collect());
            if seed.len() != *dim || seed.iter().all(|&s| s == 0) || seed.iter().any(|&s| s as u64 >= *q) {
                return Err(Failure::input(format!("seed {seed:?} is not a nonzero vector of length {dim}")));
            }
            let action = ProjectiveAction::from_orbit(&rule, generators, &seed);
            let group = cached_closure(rule.clone(), generators.clone(), &format!("matrix q={q} dim={dim}"), opts).map_err(group_err)?;
            let cover = match cover_spec {
                Some(base) => projected_cover(group, generators, base)?,
                None => CoverData::new(group, Arc::new(action)).map_err(cover_failure)?,
            };
            let x = find_x(&cover, x)?;
            Ok(Loaded::Matrix(cover, x))
        }
    }
}

/// Extends the given images multiplicatively over the stabilizer and checks the result.
pub fn character_from_spec<R: GroupRule>(
    group: &FiniteGroup<R>,
    sub: &Subgroup,
    spec: &CharacterSpec,
    parse: impl Fn(&[u32]) -> Option<R::Element>,
) -> Result<LinearCharacter, Failure> {
    let m = spec.modulus;
    if m == 0 {
        return Err(Failure::input("character modulus must be positive".into()));
    }
    let mut gens = Vec::new();
    for im in &spec.images {
        let g = parse(&im.element)
            .and_then(|e| group.index_of(&e))
            .ok_or_else(|| Failure::input(format!("{:?} is not a group element", im.element)))?;
        if !sub.contains(g) {
            return Err(Failure::input(format!("{:?} does not fix point 0", im.element)));
        }
        gens.push((g, im.value % m));
    }
    let mut values = vec![u32::MAX; sub.order()];
    let id = group.identity();
    values[sub.position(id).unwrap()] = 0;
    let mut queue = VecDeque::from([id]);
    while let Some(a) = queue.pop_front() {
        let va = values[sub.position(a).unwrap()];
        for &(g, v) in &gens {
            let b = group.mul(a, g);
            let pb = sub.position(b).unwrap();
            let vb = (va + v) % m;
            if values[pb] == u32::MAX {
                values[pb] = vb;
                queue.push_back(b);
            } else if values[pb] != vb {
                return Err(Failure::input("character images are inconsistent: not a homomorphism".into()));
            }
        }
    }
    if values.contains(&u32::MAX) {
        return Err(Failure::input("character images do not generate the stabilizer of point 0".into()));
    }
    let alpha = LinearCharacter { modulus: m, values, label: Vec::new() };
    if !alpha.is_homomorphism(group, sub) {
        return Err(Failure::input("character is not a homomorphism on the stabilizer".into()));
    }
    Ok(alpha)
}
