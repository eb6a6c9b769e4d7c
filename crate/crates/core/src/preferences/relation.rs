use std::ops::Deref;

use crate::document::PreferenceDocument;
use crate::error::{Error, Result};
use crate::model::{Alternative, DimSubset, ItemId, Menu, Schema};
use crate::witness::Witness;

/// Largest alternative space a relation may be built over.
pub const MAX_SPACE: usize = 8192;

/// `∏_{q∈S} X_q` enumerated in lexicographic order (first dimension most
/// significant), so an alternative's index agrees with its `Ord`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpace {
    scope: DimSubset,
    radices: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl ProductSpace {
    pub fn new(schema: &Schema, scope: DimSubset) -> Result<Self> {
        schema.dims().check_subset(scope)?;
        let radices = scope.iter().map(|q| schema.universe(q).len()).collect();
        ProductSpace::from_radices(scope, radices)
    }

    pub(crate) fn from_radices(scope: DimSubset, radices: Vec<usize>) -> Result<Self> {
        let mut size: usize = 1;
        for &r in &radices {
            size = size.saturating_mul(r);
        }
        if size > MAX_SPACE {
            return Err(Error::SpaceTooLarge { size, max: MAX_SPACE });
        }
        let mut strides = vec![1; radices.len()];
        for k in (0..radices.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * radices[k + 1];
        }
        Ok(ProductSpace {
            scope,
            radices,
            strides,
            size,
        })
    }

    pub fn scope(&self) -> DimSubset {
        self.scope
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn radix(&self, q: usize) -> Option<usize> {
        self.scope.position(q).map(|p| self.radices[p])
    }

    /// The sub-space over `s ⊆ scope`.
    pub fn restrict(&self, s: DimSubset) -> Result<ProductSpace> {
        if !s.is_subset_of(self.scope) {
            return Err(Error::ScopeError(format!("{s:?} is not inside {:?}", self.scope)));
        }
        let radices = s.iter().map(|q| self.radices[self.scope.position(q).unwrap()]).collect();
        ProductSpace::from_radices(s, radices)
    }

    pub fn index_of(&self, x: &Alternative) -> Option<usize> {
        if x.scope() != self.scope {
            return None;
        }
        let mut idx = 0;
        for ((&item, &radix), &stride) in x.items().iter().zip(&self.radices).zip(&self.strides) {
            if item as usize >= radix {
                return None;
            }
            idx += item as usize * stride;
        }
        Some(idx)
    }

    pub fn alternative(&self, mut idx: usize) -> Alternative {
        debug_assert!(idx < self.size);
        let mut items = vec![0 as ItemId; self.radices.len()];
        for (item, &stride) in items.iter_mut().zip(&self.strides) {
            *item = (idx / stride) as ItemId;
            idx %= stride;
        }
        Alternative::new(self.scope, items).expect("arity matches scope")
    }

    pub fn iter(&self) -> impl Iterator<Item = Alternative> + '_ {
        (0..self.size).map(|i| self.alternative(i))
    }

    /// Index contribution of the coordinates of `x` (scope inside this
    /// space's scope) to a full index. Summing the offsets of alternatives
    /// with complementary scopes gives the index of their join.
    pub(crate) fn offset(&self, x: &Alternative) -> usize {
        x.scope()
            .iter()
            .zip(x.items())
            .map(|(q, &i)| i as usize * self.strides[self.scope.position(q).unwrap()])
            .sum()
    }

    /// Indices of `∏_q A_q` for a menu over this scope.
    pub fn menu_indices(&self, menu: &Menu) -> Result<Vec<usize>> {
        if menu.scope() != self.scope {
            return Err(Error::ScopeError(format!(
                "menu scope {:?} differs from the relation scope {:?}",
                menu.scope(),
                self.scope
            )));
        }
        Ok(menu.product().iter().map(|x| self.index_of(x).unwrap()).collect())
    }
}

/// A reflexive binary relation `≿` over a product space, stored as a bit
/// matrix. Row `i` holds every `j` with `x_i ≿ x_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceRelation {
    space: ProductSpace,
    words: usize,
    bits: Vec<u64>,
}

impl PreferenceRelation {
    /// The diagonal only.
    pub fn reflexive(space: ProductSpace) -> Self {
        let n = space.size();
        let words = n.div_ceil(64).max(1);
        let mut r = PreferenceRelation {
            space,
            words,
            bits: vec![0; n * words],
        };
        for i in 0..n {
            r.insert_idx(i, i);
        }
        r
    }

    /// Everything indifferent to everything.
    pub fn total_indifference(space: ProductSpace) -> Self {
        PreferenceRelation::from_fn(space, |_, _| true)
    }

    pub fn from_fn(space: ProductSpace, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut r = PreferenceRelation::reflexive(space);
        let n = r.space.size();
        for i in 0..n {
            for j in 0..n {
                if f(i, j) {
                    r.insert_idx(i, j);
                }
            }
        }
        r
    }

    pub fn from_pairs(space: ProductSpace, pairs: impl IntoIterator<Item = (Alternative, Alternative)>) -> Result<Self> {
        let mut r = PreferenceRelation::reflexive(space);
        for (x, y) in pairs {
            r.insert(&x, &y)?;
        }
        Ok(r)
    }

    pub fn space(&self) -> &ProductSpace {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.space.size()
    }

    pub(crate) fn insert_idx(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1u64 << (j % 64);
    }

    pub fn insert(&mut self, x: &Alternative, y: &Alternative) -> Result<()> {
        let i = self.idx(x)?;
        let j = self.idx(y)?;
        self.insert_idx(i, j);
        Ok(())
    }

    fn idx(&self, x: &Alternative) -> Result<usize> {
        self.space
            .index_of(x)
            .ok_or_else(|| Error::ScopeError(format!("{x:?} is not in the relation's space")))
    }

    pub fn weak_idx(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] & (1u64 << (j % 64)) != 0
    }

    pub fn strict_idx(&self, i: usize, j: usize) -> bool {
        self.weak_idx(i, j) && !self.weak_idx(j, i)
    }

    pub fn indifferent_idx(&self, i: usize, j: usize) -> bool {
        self.weak_idx(i, j) && self.weak_idx(j, i)
    }

    /// `x ≿ y`; false when either lies outside the space.
    pub fn weakly_prefers(&self, x: &Alternative, y: &Alternative) -> bool {
        match (self.space.index_of(x), self.space.index_of(y)) {
            (Some(i), Some(j)) => self.weak_idx(i, j),
            _ => false,
        }
    }

    /// `x ≻ y`.
    pub fn strictly_prefers(&self, x: &Alternative, y: &Alternative) -> bool {
        match (self.space.index_of(x), self.space.index_of(y)) {
            (Some(i), Some(j)) => self.strict_idx(i, j),
            _ => false,
        }
    }

    /// `x ∼ y`.
    pub fn indifferent(&self, x: &Alternative, y: &Alternative) -> bool {
        match (self.space.index_of(x), self.space.index_of(y)) {
            (Some(i), Some(j)) => self.indifferent_idx(i, j),
            _ => false,
        }
    }

    /// Off-diagonal pairs `(x, y)` with `x ≿ y`, in index order.
    pub fn pairs(&self) -> Vec<(Alternative, Alternative)> {
        let n = self.size();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j && self.weak_idx(i, j) {
                    out.push((self.space.alternative(i), self.space.alternative(j)));
                }
            }
        }
        out
    }

    /// Strict successors of every element.
    pub(crate) fn strict_adjacency(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).filter(|&j| self.strict_idx(i, j)).collect())
            .collect()
    }

    /// Indices in `candidates` not strictly beaten by another candidate.
    pub(crate) fn maximal_among(&self, candidates: &[usize]) -> Vec<usize> {
        candidates
            .iter()
            .copied()
            .filter(|&x| !candidates.iter().any(|&y| self.strict_idx(y, x)))
            .collect()
    }

    pub fn to_document(&self, schema: &Schema) -> PreferenceDocument {
        PreferenceDocument {
            pairs: self
                .pairs()
                .into_iter()
                .map(|(x, y)| [schema.render_alternative(&x), schema.render_alternative(&y)])
                .collect(),
        }
    }

    /// Reads `{"pairs": ...}` over the full scope of `schema`.
    pub fn from_document(schema: &Schema, doc: &PreferenceDocument) -> Result<Self> {
        let space = ProductSpace::new(schema, schema.full())?;
        let full = schema.full();
        let pairs = doc
            .pairs
            .iter()
            .map(|[x, y]| Ok((schema.alternative(full, x)?, schema.alternative(full, y)?)))
            .collect::<Result<Vec<_>>>()?;
        PreferenceRelation::from_pairs(space, pairs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityReport {
    pub acyclic: bool,
    /// `x_1 ≻ x_2 ≻ … ≻ x_k ≻ x_1` when a cycle exists.
    pub cycle: Option<Witness>,
}

/// Searches the strict part for a cycle with an iterative depth-first search.
pub fn is_acyclic(r: &PreferenceRelation) -> AcyclicityReport {
    let adj = r.strict_adjacency();
    let n = adj.len();
    // 0 = unvisited, 1 = on the current path, 2 = finished
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        state[root] = 1;
        while let Some(&mut (node, ref mut next)) = stack.last_mut() {
            if *next < adj[node].len() {
                let succ = adj[node][*next];
                *next += 1;
                match state[succ] {
                    0 => {
                        state[succ] = 1;
                        stack.push((succ, 0));
                    }
                    1 => {
                        let start = stack.iter().position(|&(v, _)| v == succ).unwrap();
                        let alternatives = stack[start..]
                            .iter()
                            .map(|&(v, _)| r.space().alternative(v))
                            .collect();
                        return AcyclicityReport {
                            acyclic: false,
                            cycle: Some(Witness::Cycle { alternatives }),
                        };
                    }
                    _ => {}
                }
            } else {
                state[node] = 2;
                stack.pop();
            }
        }
    }
    AcyclicityReport {
        acyclic: true,
        cycle: None,
    }
}

/// A relation whose strict part is acyclic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointPreference(PreferenceRelation);

impl JointPreference {
    pub fn new(r: PreferenceRelation) -> Result<Self> {
        if is_acyclic(&r).acyclic {
            Ok(JointPreference(r))
        } else {
            Err(Error::CyclicRelation)
        }
    }

    pub fn into_inner(self) -> PreferenceRelation {
        self.0
    }
}

impl Deref for JointPreference {
    type Target = PreferenceRelation;

    fn deref(&self) -> &PreferenceRelation {
        &self.0
    }
}

/// `max(A, ≿)`: the feasible alternatives no feasible alternative strictly
/// beats, in lexicographic order.
pub fn maximal_elements(menu: &Menu, r: &JointPreference) -> Result<Vec<Alternative>> {
    let candidates = r.space().menu_indices(menu)?;
    Ok(r
        .maximal_among(&candidates)
        .into_iter()
        .map(|i| r.space().alternative(i))
        .collect())
}
