//! Finite groups by closure, their actions, subgroups and linear characters.

use crate::field::{gcd, Field};
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_CAP: usize = 1_000_000;
const DERIVED_CAP: usize = 100_000;
const ABELIANIZATION_CAP: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("at least one generator is required")]
    NoGenerators,
    #[error("malformed generator: {0}")]
    BadGenerator(String),
    #[error("element list is not closed under the generators")]
    NotClosed,
    #[error("character is not a homomorphism")]
    NotHomomorphism,
}

/// Multiplication rule for an element universe.
pub trait GroupRule: Send + Sync {
    type Element: Clone + Eq + Hash + Ord + Debug + Send + Sync + 'static;
    fn identity(&self) -> Self::Element;
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn invert(&self, a: &Self::Element) -> Self::Element;
}

/// Permutations in image-list form; `(ab)(i) = a(b(i))`.
#[derive(Clone, Debug)]
pub struct PermutationRule {
    pub degree: usize,
}

impl PermutationRule {
    pub fn check(&self, g: &[u32]) -> Result<(), GroupError> {
        let mut seen = vec![false; self.degree];
        if g.len() != self.degree {
            return Err(GroupError::BadGenerator(format!("{g:?} has length {}", g.len())));
        }
        for &i in g {
            if i as usize >= self.degree || std::mem::replace(&mut seen[i as usize], true) {
                return Err(GroupError::BadGenerator(format!("{g:?} is not a permutation")));
            }
        }
        Ok(())
    }
}

impl GroupRule for PermutationRule {
    type Element = Vec<u32>;
    fn identity(&self) -> Vec<u32> {
        (0..self.degree as u32).collect()
    }
    fn multiply(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        b.iter().map(|&i| a[i as usize]).collect()
    }
    fn invert(&self, a: &Vec<u32>) -> Vec<u32> {
        let mut out = vec![0; a.len()];
        for (i, &j) in a.iter().enumerate() {
            out[j as usize] = i as u32;
        }
        out
    }
}

/// Square matrices over a finite field, row-major, acting on column vectors.
#[derive(Clone, Debug)]
pub struct MatrixRule {
    pub field: Arc<Field>,
    pub dim: usize,
}

impl MatrixRule {
    pub fn new(field: Arc<Field>, dim: usize) -> Self {
        MatrixRule { field, dim }
    }

    pub fn apply(&self, m: &[u32], v: &[u32]) -> Vec<u32> {
        let f = &self.field;
        (0..self.dim)
            .map(|i| (0..self.dim).fold(0, |acc, j| f.add(acc, f.mul(m[i * self.dim + j], v[j]))))
            .collect()
    }

    pub fn determinant(&self, m: &[u32]) -> u32 {
        let f = &self.field;
        let n = self.dim;
        let mut a = m.to_vec();
        let mut det = 1u32;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| a[r * n + c] != 0) else { return 0 };
            if piv != c {
                for j in 0..n {
                    a.swap(piv * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let pv = a[c * n + c];
            det = f.mul(det, pv);
            let pinv = f.inv(pv);
            for r in c + 1..n {
                let factor = f.mul(a[r * n + c], pinv);
                if factor != 0 {
                    for j in c..n {
                        a[r * n + j] = f.sub(a[r * n + j], f.mul(factor, a[c * n + j]));
                    }
                }
            }
        }
        det
    }

    pub fn check(&self, g: &[u32]) -> Result<(), GroupError> {
        if g.len() != self.dim * self.dim || g.iter().any(|&x| x >= self.field.order()) {
            return Err(GroupError::BadGenerator(format!("{g:?} is not a {0}x{0} matrix over the field", self.dim)));
        }
        if self.determinant(g) == 0 {
            return Err(GroupError::BadGenerator(format!("{g:?} is singular")));
        }
        Ok(())
    }

    pub fn scalar(&self, a: u32) -> Vec<u32> {
        let mut m = vec![0; self.dim * self.dim];
        for i in 0..self.dim {
            m[i * self.dim + i] = a;
        }
        m
    }
}

impl GroupRule for MatrixRule {
    type Element = Vec<u32>;
    fn identity(&self) -> Vec<u32> {
        self.scalar(1)
    }
    fn multiply(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        let f = &self.field;
        let n = self.dim;
        let mut out = vec![0u32; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i * n + k];
                if aik == 0 {
                    continue;
                }
                for j in 0..n {
                    let bkj = b[k * n + j];
                    if bkj != 0 {
                        out[i * n + j] = f.add(out[i * n + j], f.mul(aik, bkj));
                    }
                }
            }
        }
        out
    }
    fn invert(&self, a: &Vec<u32>) -> Vec<u32> {
        let f = &self.field;
        let n = self.dim;
        let mut m = a.clone();
        let mut inv = self.identity();
        for c in 0..n {
            let piv = (c..n).find(|&r| m[r * n + c] != 0).expect("singular matrix in group");
            for j in 0..n {
                m.swap(piv * n + j, c * n + j);
                inv.swap(piv * n + j, c * n + j);
            }
            let pinv = f.inv(m[c * n + c]);
            for j in 0..n {
                m[c * n + j] = f.mul(m[c * n + j], pinv);
                inv[c * n + j] = f.mul(inv[c * n + j], pinv);
            }
            for r in 0..n {
                let factor = m[r * n + c];
                if r != c && factor != 0 {
                    for j in 0..n {
                        m[r * n + j] = f.sub(m[r * n + j], f.mul(factor, m[c * n + j]));
                        inv[r * n + j] = f.sub(inv[r * n + j], f.mul(factor, inv[c * n + j]));
                    }
                }
            }
        }
        inv
    }
}

/// `G x C_r` with componentwise multiplication; the second slot is an exponent mod `r`.
#[derive(Clone, Debug)]
pub struct ProductRule<R> {
    pub base: R,
    pub r: u32,
}

impl<R: GroupRule> GroupRule for ProductRule<R> {
    type Element = (R::Element, u32);
    fn identity(&self) -> Self::Element {
        (self.base.identity(), 0)
    }
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element {
        (self.base.multiply(&a.0, &b.0), (a.1 + b.1) % self.r)
    }
    fn invert(&self, a: &Self::Element) -> Self::Element {
        (self.base.invert(&a.0), (self.r - a.1) % self.r)
    }
}

/// A closed group with elements in sorted key order.
#[derive(Clone, Debug)]
pub struct FiniteGroup<R: GroupRule> {
    rule: R,
    elements: Vec<R::Element>,
    index: HashMap<R::Element, usize>,
    generators: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl<R: GroupRule> FiniteGroup<R> {
    pub fn closure(rule: R, generators: Vec<R::Element>) -> Result<Self, GroupError> {
        Self::closure_with_cap(rule, generators, DEFAULT_CAP)
    }

    pub fn closure_with_cap(rule: R, generators: Vec<R::Element>, cap: usize) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        let id = rule.identity();
        let mut seen: HashSet<R::Element> = HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = rule.multiply(&x, g);
                if !seen.contains(&y) {
                    if seen.len() >= cap {
                        return Err(GroupError::CapExceeded(cap));
                    }
                    seen.insert(y.clone());
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<R::Element> = seen.into_iter().collect();
        elements.sort();
        Self::assemble(rule, elements, &generators)
    }

    /// Rebuilds a group from a stored element list, checking closure under the generators.
    pub fn from_elements(rule: R, elements: Vec<R::Element>, generators: Vec<R::Element>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GroupError::NotClosed);
        }
        let group = Self::assemble(rule, elements, &generators)?;
        for x in &group.elements {
            for &g in &group.generators {
                if !group.index.contains_key(&group.rule.multiply(x, &group.elements[g])) {
                    return Err(GroupError::NotClosed);
                }
            }
        }
        if Subgroup::generated(&group, &group.generators).order() != group.order() {
            return Err(GroupError::NotClosed);
        }
        Ok(group)
    }

    /// Rebuilds from an element list already known to be closed, such as a digest-checked cache entry.
    pub fn from_closed_elements(rule: R, elements: Vec<R::Element>, generators: Vec<R::Element>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::NoGenerators);
        }
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GroupError::NotClosed);
        }
        Self::assemble(rule, elements, &generators)
    }

    fn assemble(rule: R, elements: Vec<R::Element>, generators: &[R::Element]) -> Result<Self, GroupError> {
        let index: HashMap<R::Element, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let identity = *index.get(&rule.identity()).ok_or(GroupError::NotClosed)?;
        let mut gens = Vec::new();
        for g in generators {
            let i = *index.get(g).ok_or(GroupError::NotClosed)?;
            if !gens.contains(&i) {
                gens.push(i);
            }
        }
        let mut inverse = Vec::with_capacity(elements.len());
        for e in &elements {
            inverse.push(*index.get(&rule.invert(e)).ok_or(GroupError::NotClosed)?);
        }
        Ok(FiniteGroup { rule, elements, index, generators: gens, identity, inverse })
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }
    pub fn order(&self) -> usize {
        self.elements.len()
    }
    pub fn elements(&self) -> &[R::Element] {
        &self.elements
    }
    pub fn element(&self, i: usize) -> &R::Element {
        &self.elements[i]
    }
    pub fn index_of(&self, e: &R::Element) -> Option<usize> {
        self.index.get(e).copied()
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
    pub fn identity(&self) -> usize {
        self.identity
    }
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.index[&self.rule.multiply(&self.elements[a], &self.elements[b])]
    }

    pub fn mul3(&self, a: usize, b: usize, c: usize) -> usize {
        let ab = self.rule.multiply(&self.elements[a], &self.elements[b]);
        self.index[&self.rule.multiply(&ab, &self.elements[c])]
    }

    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.mul3(g, x, self.inverse[g])
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(self.inverse[a], self.inverse[b]);
        self.mul3(ab, a, b)
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut out = self.identity;
        for _ in 0..k {
            out = self.mul(out, a);
        }
        out
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut n = 1;
        while x != self.identity {
            x = self.mul(x, a);
            n += 1;
        }
        n
    }
}

/// Group indices of a subgroup, with a dense membership map over the parent.
#[derive(Clone, Debug)]
pub struct Subgroup {
    members: Vec<usize>,
    position: Vec<u32>,
    generators: Vec<usize>,
}

impl Subgroup {
    fn from_sorted(parent_order: usize, members: Vec<usize>, generators: Vec<usize>) -> Self {
        let mut position = vec![u32::MAX; parent_order];
        for (i, &m) in members.iter().enumerate() {
            position[m] = i as u32;
        }
        Subgroup { members, position, generators }
    }

    pub fn generated<R: GroupRule>(group: &FiniteGroup<R>, generators: &[usize]) -> Self {
        let mut seen = vec![false; group.order()];
        seen[group.identity()] = true;
        let mut list = vec![group.identity()];
        let mut head = 0;
        while head < list.len() {
            let x = list[head];
            head += 1;
            for &g in generators {
                let y = group.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    list.push(y);
                }
            }
        }
        list.sort_unstable();
        let mut gens = generators.to_vec();
        gens.retain(|&g| g != group.identity());
        gens.dedup();
        Self::from_sorted(group.order(), list, gens)
    }

    /// Verifies closure and picks a small generating set greedily in index order.
    pub fn from_members<R: GroupRule>(group: &FiniteGroup<R>, mut members: Vec<usize>) -> Result<Self, GroupError> {
        members.sort_unstable();
        members.dedup();
        let mut gens: Vec<usize> = Vec::new();
        let mut current = Subgroup::generated(group, &gens);
        for &m in &members {
            if !current.contains(m) {
                gens.push(m);
                current = Subgroup::generated(group, &gens);
                if current.order() > members.len() {
                    return Err(GroupError::NotClosed);
                }
            }
        }
        if current.members != members {
            return Err(GroupError::NotClosed);
        }
        current.generators = gens;
        Ok(current)
    }

    pub fn whole<R: GroupRule>(group: &FiniteGroup<R>) -> Self {
        Self::from_sorted(group.order(), (0..group.order()).collect(), group.generators().to_vec())
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }
    pub fn generators(&self) -> &[usize] {
        &self.generators
    }
    pub fn order(&self) -> usize {
        self.members.len()
    }
    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.position[g] != u32::MAX
    }
    #[inline]
    pub fn position(&self, g: usize) -> Option<usize> {
        let p = self.position[g];
        (p != u32::MAX).then_some(p as usize)
    }
}

/// A group action on the points `0..degree`.
pub trait Action<E>: Send + Sync {
    fn degree(&self) -> usize;
    fn act(&self, g: &E, point: usize) -> usize;
}

/// Permutation groups on their own points.
#[derive(Clone, Debug)]
pub struct NaturalAction {
    pub degree: usize,
}

impl Action<Vec<u32>> for NaturalAction {
    fn degree(&self) -> usize {
        self.degree
    }
    fn act(&self, g: &Vec<u32>, point: usize) -> usize {
        g[point] as usize
    }
}

/// Matrices acting on the orbit of a seed line; lines are vectors scaled to have leading entry 1.
#[derive(Clone, Debug)]
pub struct ProjectiveAction {
    rule: MatrixRule,
    points: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl ProjectiveAction {
    pub fn from_orbit(rule: &MatrixRule, generators: &[Vec<u32>], seed: &[u32]) -> Self {
        let mut act = ProjectiveAction { rule: rule.clone(), points: Vec::new(), index: HashMap::new() };
        let start = act.normalize(seed.to_vec());
        act.index.insert(start.clone(), 0);
        act.points.push(start);
        let mut head = 0;
        while head < act.points.len() {
            let v = act.points[head].clone();
            head += 1;
            for g in generators {
                let w = act.normalize(rule.apply(g, &v));
                if !act.index.contains_key(&w) {
                    act.index.insert(w.clone(), act.points.len());
                    act.points.push(w);
                }
            }
        }
        act
    }

    pub fn normalize(&self, mut v: Vec<u32>) -> Vec<u32> {
        let f = &self.rule.field;
        let lead = *v.iter().find(|&&x| x != 0).expect("zero vector");
        let s = f.inv(lead);
        for x in v.iter_mut() {
            *x = f.mul(*x, s);
        }
        v
    }

    pub fn points(&self) -> &[Vec<u32>] {
        &self.points
    }

    pub fn point_index(&self, v: &[u32]) -> Option<usize> {
        self.index.get(&self.normalize(v.to_vec())).copied()
    }
}

impl Action<Vec<u32>> for ProjectiveAction {
    fn degree(&self) -> usize {
        self.points.len()
    }
    fn act(&self, g: &Vec<u32>, point: usize) -> usize {
        let w = self.normalize(self.rule.apply(g, &self.points[point]));
        self.index[&w]
    }
}

/// Explicit permutation images keyed by element, e.g. a projection onto a base group.
#[derive(Clone, Debug)]
pub struct TableAction<E: Eq + Hash> {
    pub degree: usize,
    pub images: HashMap<E, Vec<u32>>,
}

impl<E: Eq + Hash + Send + Sync> Action<E> for TableAction<E> {
    fn degree(&self) -> usize {
        self.degree
    }
    fn act(&self, g: &E, point: usize) -> usize {
        self.images[g][point] as usize
    }
}

/// Lifts an action of `G` to `G x C_r` through the first factor.
#[derive(Clone, Debug)]
pub struct ProductAction<A> {
    pub base: A,
}

impl<E, A: Action<E>> Action<(E, u32)> for ProductAction<A> {
    fn degree(&self) -> usize {
        self.base.degree()
    }
    fn act(&self, g: &(E, u32), point: usize) -> usize {
        self.base.act(&g.0, point)
    }
}

/// Checks identity and compatibility `(gh).p = g.(h.p)` on generators times all points.
pub fn action_is_compatible<R: GroupRule, A: Action<R::Element> + ?Sized>(group: &FiniteGroup<R>, action: &A) -> bool {
    let id = group.element(group.identity());
    if (0..action.degree()).any(|p| action.act(id, p) != p) {
        return false;
    }
    for &g in group.generators() {
        for &h in group.generators() {
            let gh = group.element(group.mul(g, h));
            for p in 0..action.degree() {
                if action.act(gh, p) != action.act(group.element(g), action.act(group.element(h), p)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Orbit of `point` under the subgroup generated by `generators`, in discovery order.
pub fn orbit<R: GroupRule, A: Action<R::Element> + ?Sized>(group: &FiniteGroup<R>, action: &A, generators: &[usize], point: usize) -> Vec<usize> {
    let mut seen = vec![false; action.degree()];
    seen[point] = true;
    let mut list = vec![point];
    let mut head = 0;
    while head < list.len() {
        let p = list[head];
        head += 1;
        for &g in generators {
            let q = action.act(group.element(g), p);
            if !seen[q] {
                seen[q] = true;
                list.push(q);
            }
        }
    }
    list
}

pub fn stabilizer<R: GroupRule, A: Action<R::Element> + ?Sized>(group: &FiniteGroup<R>, action: &A, point: usize) -> Subgroup {
    let members: Vec<usize> = (0..group.order()).filter(|&g| action.act(group.element(g), point) == point).collect();
    Subgroup::from_members(group, members).expect("point stabilizers are subgroups")
}

pub fn is_transitive<R: GroupRule, A: Action<R::Element> + ?Sized>(group: &FiniteGroup<R>, action: &A) -> bool {
    action.degree() == 0 || orbit(group, action, group.generators(), 0).len() == action.degree()
}

pub fn is_doubly_transitive<R: GroupRule, A: Action<R::Element> + ?Sized>(group: &FiniteGroup<R>, action: &A) -> bool {
    if !is_transitive(group, action) {
        return false;
    }
    let n = action.degree();
    if n <= 1 {
        return true;
    }
    let stab = stabilizer(group, action, 0);
    orbit(group, action, stab.generators(), 1).len() == n - 1
}

/// Cells `HxH` in order of their smallest element.
pub fn double_coset_decomposition<R: GroupRule>(group: &FiniteGroup<R>, h: &Subgroup) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; group.order()];
    let mut cells = Vec::new();
    for g in 0..group.order() {
        if assigned[g] {
            continue;
        }
        let mut cell = Vec::new();
        for &a in h.members() {
            let ag = group.mul(a, g);
            for &b in h.members() {
                let y = group.mul(ag, b);
                if !assigned[y] {
                    assigned[y] = true;
                    cell.push(y);
                }
            }
        }
        cell.sort_unstable();
        cells.push(cell);
    }
    cells
}

/// `[S, S]` as the normal closure in `S` of commutators of generators of `S`.
pub fn derived_subgroup<R: GroupRule>(group: &FiniteGroup<R>, sub: &Subgroup) -> Result<Subgroup, GroupError> {
    if sub.order() > DERIVED_CAP {
        return Err(GroupError::CapExceeded(DERIVED_CAP));
    }
    let sg = sub.generators();
    let mut gens: Vec<usize> = Vec::new();
    for &a in sg {
        for &b in sg {
            let c = group.commutator(a, b);
            if c != group.identity() && !gens.contains(&c) {
                gens.push(c);
            }
        }
    }
    loop {
        let d = Subgroup::generated(group, &gens);
        let mut fresh = Vec::new();
        for &g in sg {
            for &c in &gens {
                let y = group.conjugate(g, c);
                if !d.contains(y) && !fresh.contains(&y) {
                    fresh.push(y);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(d);
        }
        gens.extend(fresh);
    }
}

/// `S / [S,S]` as a product of cyclic groups, with coordinates for every coset.
#[derive(Clone, Debug)]
pub struct Abelianization {
    pub derived: Subgroup,
    /// Coset id for each member of `S`, aligned with `S.members()`.
    pub coset_of: Vec<u32>,
    /// Orders of the cyclic factors, non-increasing.
    pub orders: Vec<u32>,
    /// Coordinates of each coset in the cyclic basis.
    pub coords: Vec<Vec<u32>>,
}

impl Abelianization {
    pub fn order(&self) -> usize {
        self.coords.len()
    }
    pub fn exponent(&self) -> u32 {
        self.orders.first().copied().unwrap_or(1)
    }
}

pub fn abelianization<R: GroupRule>(group: &FiniteGroup<R>, sub: &Subgroup) -> Result<Abelianization, GroupError> {
    let derived = derived_subgroup(group, sub)?;
    let nq = sub.order() / derived.order();
    if nq > ABELIANIZATION_CAP {
        return Err(GroupError::CapExceeded(ABELIANIZATION_CAP));
    }
    let mut coset_of = vec![u32::MAX; sub.order()];
    let mut reps = Vec::with_capacity(nq);
    let order_from_identity = std::iter::once(group.identity()).chain(sub.members().iter().copied());
    for g in order_from_identity {
        let pg = sub.position(g).expect("member");
        if coset_of[pg] != u32::MAX {
            continue;
        }
        let id = reps.len() as u32;
        reps.push(g);
        for &d in derived.members() {
            coset_of[sub.position(group.mul(g, d)).expect("coset inside S")] = id;
        }
    }
    let qmul = |a: usize, b: usize| coset_of[sub.position(group.mul(reps[a], reps[b])).unwrap()] as usize;
    let qorder = |a: usize| {
        let (mut x, mut n) = (a, 1u32);
        while x != 0 {
            x = qmul(x, a);
            n += 1;
        }
        n
    };

    let mut in_s = vec![false; nq];
    in_s[0] = true;
    let mut s_list = vec![0usize];
    let mut coords: Vec<Vec<u32>> = vec![Vec::new(); nq];
    let mut orders = Vec::new();
    while s_list.len() < nq {
        let mut best = (0u32, 0usize);
        for q in 0..nq {
            if in_s[q] {
                continue;
            }
            let (mut x, mut m) = (q, 1u32);
            while !in_s[x] {
                x = qmul(x, q);
                m += 1;
            }
            if m > best.0 {
                best = (m, q);
            }
        }
        let (m, q) = best;
        let g = s_list
            .iter()
            .map(|&s| qmul(q, s))
            .find(|&t| qorder(t) == m)
            .expect("a lift of maximal order exists in a direct complement");
        let old = s_list.clone();
        for &s in &old {
            coords[s].push(0);
        }
        let mut power = g;
        for j in 1..m {
            for &s in &old {
                let t = qmul(power, s);
                in_s[t] = true;
                let mut c = coords[s].clone();
                *c.last_mut().unwrap() = j;
                coords[t] = c;
                s_list.push(t);
            }
            power = qmul(power, g);
        }
        orders.push(m);
    }
    Ok(Abelianization { derived, coset_of, orders, coords })
}

/// Homomorphism from a subgroup into `Z_modulus`, values aligned with the subgroup members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearCharacter {
    pub modulus: u32,
    pub values: Vec<u32>,
    /// Exponents on the abelianization basis, when enumerated.
    pub label: Vec<u32>,
}

impl LinearCharacter {
    pub fn from_fn<R: GroupRule>(group: &FiniteGroup<R>, sub: &Subgroup, modulus: u32, f: impl Fn(&R::Element) -> u32) -> Self {
        let values = sub.members().iter().map(|&g| f(group.element(g)) % modulus).collect();
        LinearCharacter { modulus, values, label: Vec::new() }
    }

    pub fn trivial(sub: &Subgroup) -> Self {
        LinearCharacter { modulus: 1, values: vec![0; sub.order()], label: Vec::new() }
    }

    pub fn value(&self, sub: &Subgroup, g: usize) -> Option<u32> {
        sub.position(g).map(|p| self.values[p])
    }

    pub fn image_order(&self) -> u32 {
        let g = self.values.iter().fold(self.modulus, |acc, &v| gcd(acc, v));
        self.modulus / g.max(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&v| v == 0)
    }

    /// Checks `chi(xy) = chi(x) + chi(y)`: all pairs for small domains, else all `(x, generator)` pairs.
    pub fn is_homomorphism<R: GroupRule>(&self, group: &FiniteGroup<R>, sub: &Subgroup) -> bool {
        if self.values.len() != sub.order() {
            return false;
        }
        let m = self.modulus;
        let exhaustive = sub.order() <= 2000;
        let partners: Vec<usize> = if exhaustive { sub.members().to_vec() } else { sub.generators().to_vec() };
        for (i, &a) in sub.members().iter().enumerate() {
            for &b in &partners {
                let pb = sub.position(b).unwrap();
                match sub.position(group.mul(a, b)) {
                    Some(pab) if self.values[pab] == (self.values[i] + self.values[pb]) % m => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Same function into the unit circle, ignoring the chosen modulus.
    pub fn same_function(&self, other: &LinearCharacter) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(&a, &b)| a as u64 * other.modulus as u64 == b as u64 * self.modulus as u64)
    }
}

pub fn enumerate_linear_characters<R: GroupRule>(group: &FiniteGroup<R>, sub: &Subgroup) -> Result<Vec<LinearCharacter>, GroupError> {
    let ab = abelianization(group, sub)?;
    let e = ab.exponent();
    let mut out = Vec::with_capacity(ab.order());
    let mut t = vec![0u32; ab.orders.len()];
    loop {
        let on_coset: Vec<u32> = ab
            .coords
            .iter()
            .map(|c| {
                let s: u64 = c.iter().zip(&t).zip(&ab.orders).map(|((&ci, &ti), &mi)| ci as u64 * ti as u64 * (e / mi) as u64).sum();
                (s % e as u64) as u32
            })
            .collect();
        let values = ab.coset_of.iter().map(|&c| on_coset[c as usize]).collect();
        out.push(LinearCharacter { modulus: e, values, label: t.clone() });
        let mut i = t.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            t[i] += 1;
            if t[i] < ab.orders[i] {
                break;
            }
            t[i] = 0;
        }
    }
}

pub fn direct_product_with_cyclic<R: GroupRule + Clone>(group: &FiniteGroup<R>, r: u32) -> Result<FiniteGroup<ProductRule<R>>, GroupError> {
    let total = group.order() * r as usize;
    if total > DEFAULT_CAP {
        return Err(GroupError::CapExceeded(DEFAULT_CAP));
    }
    let rule = ProductRule { base: group.rule().clone(), r };
    let mut elements = Vec::with_capacity(total);
    for g in group.elements() {
        for z in 0..r {
            elements.push((g.clone(), z));
        }
    }
    let id = group.element(group.identity()).clone();
    let mut gens: Vec<(R::Element, u32)> = group.generators().iter().map(|&g| (group.element(g).clone(), 0)).collect();
    gens.push((id, 1 % r));
    FiniteGroup::assemble(rule, elements, &gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s3() -> FiniteGroup<PermutationRule> {
        FiniteGroup::closure(PermutationRule { degree: 3 }, vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap()
    }

    fn sl2(q: u64) -> (FiniteGroup<MatrixRule>, ProjectiveAction) {
        let f = Arc::new(Field::of_order(q).unwrap());
        let rule = MatrixRule::new(f.clone(), 2);
        let l = f.primitive_element();
        let gens = vec![vec![1, 1, 0, 1], vec![l, 0, 0, f.inv(l)], vec![0, 1, f.neg(1), 0]];
        let act = ProjectiveAction::from_orbit(&rule, &gens, &[1, 0]);
        (FiniteGroup::closure(rule, gens).unwrap(), act)
    }

    fn brute_doubly_transitive<R: GroupRule, A: Action<R::Element> + ?Sized>(g: &FiniteGroup<R>, a: &A) -> bool {
        let n = a.degree();
        (0..n).all(|i| {
            (0..n).all(|j| {
                i == j || g.elements().iter().any(|e| a.act(e, 0) == i && a.act(e, 1) == j)
            })
        })
    }

    #[test]
    fn s3_basics() {
        let g = s3();
        assert_eq!(g.order(), 6);
        let act = NaturalAction { degree: 3 };
        assert_eq!(stabilizer(&g, &act, 0).order(), 2);
        assert!(is_doubly_transitive(&g, &act));
        let cells = double_coset_decomposition(&g, &Subgroup::generated(&g, &[g.index_of(&vec![1, 0, 2]).unwrap()]));
        let mut sizes: Vec<usize> = cells.iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![2, 4]);
        let whole = Subgroup::whole(&g);
        assert_eq!(double_coset_decomposition(&g, &whole).len(), 1);
        let d = derived_subgroup(&g, &whole).unwrap();
        assert_eq!(d.order(), 3);
        assert_eq!(enumerate_linear_characters(&g, &whole).unwrap().len(), 2);
        assert_eq!(direct_product_with_cyclic(&g, 2).unwrap().order(), 12);
    }

    #[test]
    fn regular_c4_is_not_doubly_transitive() {
        let g = FiniteGroup::closure(PermutationRule { degree: 4 }, vec![vec![1, 2, 3, 0]]).unwrap();
        let act = NaturalAction { degree: 4 };
        assert!(is_transitive(&g, &act));
        assert!(!is_doubly_transitive(&g, &act));
        let whole = Subgroup::whole(&g);
        assert_eq!(derived_subgroup(&g, &whole).unwrap().order(), 1);
        let chars = enumerate_linear_characters(&g, &whole).unwrap();
        assert_eq!(chars.len(), 4);
    }

    #[test]
    fn trivial_group_has_one_character() {
        let g = FiniteGroup::closure(PermutationRule { degree: 3 }, vec![vec![0, 1, 2]]).unwrap();
        let chars = enumerate_linear_characters(&g, &Subgroup::whole(&g)).unwrap();
        assert_eq!(chars.len(), 1);
        assert!(chars[0].is_trivial());
    }

    #[test]
    fn sl2_orders_and_stabilizers() {
        for q in [3u64, 4, 5, 7, 8, 9] {
            let (g, act) = sl2(q);
            assert_eq!(g.order() as u64, q * (q * q - 1));
            assert_eq!(act.degree() as u64, q + 1);
            assert!(action_is_compatible(&g, &act));
            let stab = stabilizer(&g, &act, 0);
            assert_eq!(stab.order() as u64, q * (q - 1));
            assert!(is_doubly_transitive(&g, &act));
            let cells = double_coset_decomposition(&g, &stab);
            assert_eq!(cells.len(), 2);
        }
        let (g, s) = sl2(7);
        assert!(brute_doubly_transitive(&g, &s));
    }

    #[test]
    fn sl2_5_stabilizer_abelianization() {
        let (g, act) = sl2(5);
        let stab = stabilizer(&g, &act, 0);
        let d = derived_subgroup(&g, &stab).unwrap();
        assert_eq!(d.order(), 5);
        let ab = abelianization(&g, &stab).unwrap();
        assert_eq!(ab.orders, vec![4]);
        let chars = enumerate_linear_characters(&g, &stab).unwrap();
        assert_eq!(chars.len(), 4);
        for (i, c) in chars.iter().enumerate() {
            assert!(c.is_homomorphism(&g, &stab));
            for c2 in &chars[i + 1..] {
                assert!(!c.same_function(c2));
            }
        }
        assert_eq!(direct_product_with_cyclic(&g, 4).unwrap().order(), 480);
    }

    #[test]
    fn abelianization_of_noncyclic_group() {
        // C2 x C4 x C3 on disjoint points.
        let g = FiniteGroup::closure(
            PermutationRule { degree: 9 },
            vec![vec![1, 0, 2, 3, 4, 5, 6, 7, 8], vec![0, 1, 3, 4, 5, 2, 6, 7, 8], vec![0, 1, 2, 3, 4, 5, 7, 8, 6]],
        )
        .unwrap();
        let whole = Subgroup::whole(&g);
        let ab = abelianization(&g, &whole).unwrap();
        assert_eq!(ab.order(), 24);
        assert_eq!(ab.orders.iter().product::<u32>(), 24);
        assert_eq!(ab.exponent(), 12);
        let chars = enumerate_linear_characters(&g, &whole).unwrap();
        assert_eq!(chars.len(), 24);
        assert!(chars.iter().all(|c| c.is_homomorphism(&g, &whole)));
        for (i, c) in chars.iter().enumerate() {
            assert!(chars[i + 1..].iter().all(|c2| !c.same_function(c2)));
        }
    }

    #[test]
    fn group_axioms_on_random_triples() {
        let (g, _) = sl2(7);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let (a, b, c) = (rng.gen_range(0..g.order()), rng.gen_range(0..g.order()), rng.gen_range(0..g.order()));
            assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        }
        for a in 0..g.order() {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
        }
    }

    #[test]
    fn double_coset_sizes_match_intersections() {
        let (g, act) = sl2(5);
        let h = stabilizer(&g, &act, 0);
        for cell in double_coset_decomposition(&g, &h) {
            let x = cell[0];
            let xhx: HashSet<usize> = h.members().iter().map(|&a| g.conjugate(x, a)).collect();
            let meet = h.members().iter().filter(|a| xhx.contains(a)).count();
            assert_eq!(cell.len(), h.order() * h.order() / meet);
        }
    }

    #[test]
    fn doubly_transitive_matches_brute_force() {
        let cases: Vec<Vec<Vec<u32>>> = vec![
            vec![vec![1, 2, 3, 4, 0]],
            vec![vec![1, 2, 3, 4, 0], vec![0, 2, 4, 1, 3]],
            vec![vec![1, 0, 2, 3], vec![1, 2, 3, 0]],
            vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]],
            vec![vec![1, 2, 0, 4, 5, 3]],
        ];
        for gens in cases {
            let degree = gens[0].len();
            let g = FiniteGroup::closure(PermutationRule { degree }, gens).unwrap();
            let act = NaturalAction { degree };
            let fast = is_doubly_transitive(&g, &act);
            assert_eq!(fast, is_transitive(&g, &act) && brute_doubly_transitive(&g, &act));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = FiniteGroup::closure_with_cap(PermutationRule { degree: 5 }, vec![vec![1, 2, 3, 4, 0], vec![1, 0, 2, 3, 4]], 50);
        assert_eq!(err.unwrap_err(), GroupError::CapExceeded(50));
    }

    #[test]
    fn from_elements_round_trip() {
        let g = s3();
        let again = FiniteGroup::from_elements(g.rule().clone(), g.elements().to_vec(), vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        assert_eq!(again.order(), 6);
        let partial = g.elements()[..3].to_vec();
        assert!(FiniteGroup::from_elements(g.rule().clone(), partial, vec![vec![1, 0, 2]]).is_err());
    }
}
