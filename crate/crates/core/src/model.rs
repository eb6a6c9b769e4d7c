//! Finite representations of dimensions, items, alternatives, menus and
//! joint choice datasets, together with the projection maps between scopes.
//!
//! Dimensions and items are interned to dense indices. A subset of the
//! dimensions is a [`DimSubset`] bitmask and a per-dimension offer is an
//! [`ItemSet`] bitmask, so at most 64 dimensions and 64 items per dimension
//! are representable. Alternatives and menus carry their scope explicitly;
//! coordinates are always stored in ascending dimension order.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

pub type ItemId = u32;

pub const MAX_DIMENSIONS: usize = 64;
pub const MAX_ITEMS: usize = 64;

/// A set of dimension indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DimSubset(u64);

impl DimSubset {
    pub const EMPTY: DimSubset = DimSubset(0);

    pub fn from_bits(bits: u64) -> Self {
        DimSubset(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        if n >= 64 {
            DimSubset(u64::MAX)
        } else {
            DimSubset((1u64 << n) - 1)
        }
    }

    pub fn singleton(q: usize) -> Self {
        DimSubset(1u64 << q)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        DimSubset(indices.into_iter().fold(0, |acc, q| acc | (1u64 << q)))
    }

    pub fn contains(self, q: usize) -> bool {
        q < 64 && self.0 & (1u64 << q) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, other: Self) -> Self {
        DimSubset(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        DimSubset(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        DimSubset(self.0 & !other.0)
    }

    /// `Q \ S` for `Q = {0, .., n-1}`.
    pub fn complement(self, n: usize) -> Self {
        DimSubset::full(n).difference(self)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Position of dimension `q` among the members of this subset.
    pub fn position(self, q: usize) -> Option<usize> {
        if !self.contains(q) {
            return None;
        }
        Some((self.0 & ((1u64 << q) - 1)).count_ones() as usize)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> + Clone {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let q = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(q)
            }
        })
    }

    /// Every nonempty subset of `{0, .., n-1}` in increasing bitmask order.
    pub fn all_nonempty(n: usize) -> impl Iterator<Item = DimSubset> {
        assert!(n < 64, "subset enumeration over {n} dimensions");
        (1u64..(1u64 << n)).map(DimSubset)
    }
}

impl fmt::Debug for DimSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A set of item ids within one dimension's universe.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemSet(u64);

impl ItemSet {
    pub const EMPTY: ItemSet = ItemSet(0);

    pub fn from_bits(bits: u64) -> Self {
        ItemSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(item: ItemId) -> Self {
        ItemSet(1u64 << item)
    }

    pub fn from_items<I: IntoIterator<Item = ItemId>>(items: I) -> Self {
        ItemSet(items.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn contains(self, item: ItemId) -> bool {
        item < 64 && self.0 & (1u64 << item) != 0
    }

    pub fn insert(&mut self, item: ItemId) {
        self.0 |= 1u64 << item;
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = ItemId> + Clone {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The ordered, labelled index set `Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl DimensionSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::NoDimensions);
        }
        if labels.len() > MAX_DIMENSIONS {
            return Err(Error::TooManyDimensions {
                count: labels.len(),
                max: MAX_DIMENSIONS,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (q, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), q).is_some() {
                return Err(Error::DuplicateDimension(label.clone()));
            }
        }
        Ok(DimensionSet { labels, index })
    }

    /// Dimensions labelled `"1"`, .., `"n"`.
    pub fn numbered(n: usize) -> Result<Self> {
        DimensionSet::new((1..=n).map(|q| q.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, q: usize) -> &str {
        &self.labels[q]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownDimension(label.to_string()))
    }

    pub fn full(&self) -> DimSubset {
        DimSubset::full(self.len())
    }

    pub fn subset<S: AsRef<str>>(&self, labels: &[S]) -> Result<DimSubset> {
        labels
            .iter()
            .map(|l| self.index_of(l.as_ref()))
            .try_fold(DimSubset::EMPTY, |acc, q| Ok(acc.union(DimSubset::singleton(q?))))
    }

    pub fn subset_labels(&self, s: DimSubset) -> Vec<String> {
        s.iter().map(|q| self.labels[q].clone()).collect()
    }

    /// Rejects subsets naming indices outside `Q`.
    pub fn check_subset(&self, s: DimSubset) -> Result<()> {
        if s.is_subset_of(self.full()) {
            Ok(())
        } else {
            Err(Error::ScopeError(format!(
                "subset {s:?} is not contained in a {}-dimensional index set",
                self.len()
            )))
        }
    }
}

/// The item table `X_q` of one dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    labels: Vec<String>,
    index: HashMap<String, ItemId>,
}

impl Universe {
    pub fn new<S: Into<String>>(dimension: &str, labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::EmptyUniverse(dimension.to_string()));
        }
        if labels.len() > MAX_ITEMS {
            return Err(Error::TooManyItems {
                dimension: dimension.to_string(),
                count: labels.len(),
                max: MAX_ITEMS,
            });
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if index.insert(label.clone(), i as ItemId).is_some() {
                return Err(Error::DuplicateItem {
                    dimension: dimension.to_string(),
                    item: label.clone(),
                });
            }
        }
        Ok(Universe { labels, index })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, item: ItemId) -> &str {
        &self.labels[item as usize]
    }

    pub fn id_of(&self, label: &str) -> Option<ItemId> {
        self.index.get(label).copied()
    }

    pub fn all(&self) -> ItemSet {
        ItemSet::from_bits(if self.len() == 64 { u64::MAX } else { (1u64 << self.len()) - 1 })
    }
}

/// Dimensions plus their item universes: everything a dataset, menu family
/// or preference is defined over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    dims: DimensionSet,
    universes: Vec<Universe>,
}

impl Schema {
    pub fn new(dims: DimensionSet, universes: Vec<Universe>) -> Result<Self> {
        if universes.len() != dims.len() {
            return Err(Error::ArityMismatch {
                expected: dims.len(),
                found: universes.len(),
            });
        }
        Ok(Schema { dims, universes })
    }

    /// Convenience constructor from `(dimension, items)` label pairs.
    pub fn from_labels<D, I, S>(spec: impl IntoIterator<Item = (D, I)>) -> Result<Self>
    where
        D: Into<String>,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels = Vec::new();
        let mut universes = Vec::new();
        for (d, items) in spec {
            let d = d.into();
            universes.push(Universe::new(&d, items)?);
            labels.push(d);
        }
        Schema::new(DimensionSet::new(labels)?, universes)
    }

    pub fn dims(&self) -> &DimensionSet {
        &self.dims
    }

    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn universe(&self, q: usize) -> &Universe {
        &self.universes[q]
    }

    pub fn universes(&self) -> &[Universe] {
        &self.universes
    }

    pub fn full(&self) -> DimSubset {
        self.dims.full()
    }

    /// The schema restricted to the dimensions of `s`, re-indexed densely.
    pub fn restrict(&self, s: DimSubset) -> Result<Schema> {
        self.dims.check_subset(s)?;
        if s.is_empty() {
            return Err(Error::EmptySubset);
        }
        let dims = DimensionSet::new(s.iter().map(|q| self.dims.label(q).to_string()))?;
        let universes = s.iter().map(|q| self.universes[q].clone()).collect();
        Schema::new(dims, universes)
    }

    /// Resolves an item label tuple (ordered by `scope`) into an alternative.
    pub fn alternative<S: AsRef<str>>(&self, scope: DimSubset, labels: &[S]) -> Result<Alternative> {
        self.dims.check_subset(scope)?;
        if labels.len() != scope.len() {
            return Err(Error::ArityMismatch {
                expected: scope.len(),
                found: labels.len(),
            });
        }
        let items = scope
            .iter()
            .zip(labels)
            .map(|(q, l)| {
                self.universes[q].id_of(l.as_ref()).ok_or_else(|| Error::UnknownItem {
                    dimension: self.dims.label(q).to_string(),
                    item: l.as_ref().to_string(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Alternative { scope, items })
    }

    /// Resolves per-dimension label lists (ordered by `scope`) into a menu.
    pub fn menu<S: AsRef<str>>(&self, scope: DimSubset, sets: &[Vec<S>]) -> Result<Menu> {
        self.dims.check_subset(scope)?;
        if sets.len() != scope.len() {
            return Err(Error::ArityMismatch {
                expected: scope.len(),
                found: sets.len(),
            });
        }
        let mut out = Vec::with_capacity(sets.len());
        for (q, labels) in scope.iter().zip(sets) {
            let mut set = ItemSet::EMPTY;
            for l in labels {
                let id = self.universes[q].id_of(l.as_ref()).ok_or_else(|| Error::UnknownItem {
                    dimension: self.dims.label(q).to_string(),
                    item: l.as_ref().to_string(),
                })?;
                set.insert(id);
            }
            out.push(set);
        }
        Menu::new(scope, out)
    }

    pub fn render_alternative(&self, x: &Alternative) -> Vec<String> {
        x.scope
            .iter()
            .zip(&x.items)
            .map(|(q, &i)| self.universes[q].label(i).to_string())
            .collect()
    }

    pub fn render_menu(&self, m: &Menu) -> Vec<(String, Vec<String>)> {
        m.scope
            .iter()
            .zip(&m.sets)
            .map(|(q, set)| {
                (
                    self.dims.label(q).to_string(),
                    set.iter().map(|i| self.universes[q].label(i).to_string()).collect(),
                )
            })
            .collect()
    }

    /// Compact display form, e.g. `(ab,pq,x)` when every label is one
    /// character and `({a,b},{p})` otherwise.
    pub fn menu_string(&self, m: &Menu) -> String {
        let parts: Vec<Vec<String>> = self.render_menu(m).into_iter().map(|(_, v)| v).collect();
        let short = parts.iter().flatten().all(|l| l.chars().count() == 1);
        let body = parts
            .iter()
            .map(|p| if short { p.concat() } else { format!("{{{}}}", p.join(",")) })
            .join(",");
        format!("({body})")
    }

    pub fn alternative_string(&self, x: &Alternative) -> String {
        format!("({})", self.render_alternative(x).join(","))
    }

    /// Every menu with nonempty per-dimension sets over the full scope, in
    /// lexicographic order of the per-dimension bitmasks.
    pub fn complete_menus(&self) -> Vec<Menu> {
        let per_dim: Vec<Vec<ItemSet>> = self
            .universes
            .iter()
            .map(|u| (1..=u.all().bits()).map(ItemSet::from_bits).collect())
            .collect();
        per_dim
            .into_iter()
            .multi_cartesian_product()
            .map(|sets| Menu {
                scope: self.full(),
                sets,
            })
            .collect()
    }

    pub fn complete_menu_count(&self) -> u128 {
        self.universes
            .iter()
            .map(|u| (1u128 << u.len()) - 1)
            .product()
    }
}

/// `x_S = (x_q)_{q in S}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Alternative {
    scope: DimSubset,
    items: Vec<ItemId>,
}

impl Alternative {
    pub fn new(scope: DimSubset, items: Vec<ItemId>) -> Result<Self> {
        if items.len() != scope.len() {
            return Err(Error::ArityMismatch {
                expected: scope.len(),
                found: items.len(),
            });
        }
        Ok(Alternative { scope, items })
    }

    pub fn scope(&self) -> DimSubset {
        self.scope
    }

    pub fn items(&self) -> &[ItemId] {
        &self.items
    }

    pub fn item(&self, q: usize) -> Option<ItemId> {
        self.scope.position(q).map(|p| self.items[p])
    }

    /// Projection onto `s ⊆ scope`.
    pub fn project(&self, s: DimSubset) -> Result<Alternative> {
        if !s.is_subset_of(self.scope) {
            return Err(Error::ScopeError(format!(
                "cannot project an alternative with scope {:?} onto {s:?}",
                self.scope
            )));
        }
        let items = s
            .iter()
            .map(|q| self.items[self.scope.position(q).unwrap()])
            .collect();
        Ok(Alternative { scope: s, items })
    }

    /// Joins two alternatives with disjoint scopes.
    pub fn join(&self, other: &Alternative) -> Result<Alternative> {
        if !self.scope.intersection(other.scope).is_empty() {
            return Err(Error::ScopeError("joined alternatives overlap".into()));
        }
        let scope = self.scope.union(other.scope);
        let items = scope
            .iter()
            .map(|q| self.item(q).or_else(|| other.item(q)).unwrap())
            .collect();
        Ok(Alternative { scope, items })
    }

    /// Reinterprets the coordinates under a new scope of equal size.
    pub(crate) fn rescoped(&self, scope: DimSubset) -> Alternative {
        debug_assert_eq!(scope.len(), self.items.len());
        Alternative {
            scope,
            items: self.items.clone(),
        }
    }
}

/// `A_S = (A_q)_{q in S}` with every `A_q` nonempty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Menu {
    scope: DimSubset,
    sets: Vec<ItemSet>,
}

impl Menu {
    pub fn new(scope: DimSubset, sets: Vec<ItemSet>) -> Result<Self> {
        if sets.len() != scope.len() {
            return Err(Error::ArityMismatch {
                expected: scope.len(),
                found: sets.len(),
            });
        }
        if let Some((q, _)) = scope.iter().zip(&sets).find(|(_, s)| s.is_empty()) {
            return Err(Error::ScopeError(format!("menu set for dimension {q} is empty")));
        }
        Ok(Menu { scope, sets })
    }

    pub fn scope(&self) -> DimSubset {
        self.scope
    }

    pub fn sets(&self) -> &[ItemSet] {
        &self.sets
    }

    pub fn set(&self, q: usize) -> Option<ItemSet> {
        self.scope.position(q).map(|p| self.sets[p])
    }

    /// Partial menu on `s ⊆ scope`. The empty projection is the unit menu.
    pub fn project(&self, s: DimSubset) -> Result<Menu> {
        if !s.is_subset_of(self.scope) {
            return Err(Error::ScopeError(format!(
                "cannot project a menu with scope {:?} onto {s:?}",
                self.scope
            )));
        }
        let sets = s
            .iter()
            .map(|q| self.sets[self.scope.position(q).unwrap()])
            .collect();
        Ok(Menu { scope: s, sets })
    }

    pub fn contains(&self, x: &Alternative) -> bool {
        x.scope == self.scope && self.sets.iter().zip(&x.items).all(|(s, &i)| s.contains(i))
    }

    pub fn product_size(&self) -> usize {
        self.sets.iter().map(|s| s.len()).product()
    }

    /// `∏_q A_q` in lexicographic order.
    pub fn product(&self) -> Vec<Alternative> {
        let scope = self.scope;
        if self.sets.is_empty() {
            return vec![Alternative {
                scope,
                items: Vec::new(),
            }];
        }
        self.sets
            .iter()
            .map(|s| s.iter().collect::<Vec<_>>())
            .multi_cartesian_product()
            .map(|items| Alternative { scope, items })
            .collect()
    }

    pub(crate) fn rescoped(&self, scope: DimSubset) -> Menu {
        debug_assert_eq!(scope.len(), self.sets.len());
        Menu {
            scope,
            sets: self.sets.clone(),
        }
    }
}

/// `π_S` applied to a set of alternatives; duplicates collapse and the
/// result is sorted.
pub fn project_choice_image(image: &[Alternative], s: DimSubset) -> Result<Vec<Alternative>> {
    let mut out = image.iter().map(|x| x.project(s)).collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// One element of `π_S(𝔐)` together with the indices of the menus that
/// project onto it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionClass {
    pub menu: Menu,
    pub members: Vec<usize>,
}

/// Groups menus by their projection onto `s`, in order of first occurrence.
pub fn projected_menu_family(menus: &[Menu], s: DimSubset) -> Result<Vec<ProjectionClass>> {
    let mut slot: HashMap<Menu, usize> = HashMap::new();
    let mut classes: Vec<ProjectionClass> = Vec::new();
    for (i, m) in menus.iter().enumerate() {
        let key = m.project(s)?;
        match slot.get(&key) {
            Some(&c) => classes[c].members.push(i),
            None => {
                slot.insert(key.clone(), classes.len());
                classes.push(ProjectionClass {
                    menu: key,
                    members: vec![i],
                });
            }
        }
    }
    Ok(classes)
}

/// A validated joint choice: menus over the full scope, each with a nonempty
/// sorted choice image contained in the menu.
///
/// Menus keep their input order; that order is the canonical menu order used
/// to pick deterministic witnesses.
#[derive(Clone, Debug)]
pub struct JointChoiceDataset {
    schema: Schema,
    menus: Vec<Menu>,
    choices: Vec<Vec<Alternative>>,
    index: HashMap<Menu, usize>,
    provenance: Option<serde_json::Value>,
}

impl PartialEq for JointChoiceDataset {
    fn eq(&self, other: &Self) -> bool {
        self.schema == other.schema
            && self.menus == other.menus
            && self.choices == other.choices
            && self.provenance == other.provenance
    }
}

impl JointChoiceDataset {
    pub fn new(schema: Schema, entries: Vec<(Menu, Vec<Alternative>)>) -> Result<Self> {
        let full = schema.full();
        let mut menus = Vec::with_capacity(entries.len());
        let mut choices = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (menu, mut image)) in entries.into_iter().enumerate() {
            if menu.scope != full {
                return Err(Error::ScopeError(format!("menu #{i} does not cover every dimension")));
            }
            for (q, set) in full.iter().zip(&menu.sets) {
                if !set.is_subset_of(schema.universe(q).all()) {
                    return Err(Error::UnknownItem {
                        dimension: schema.dims().label(q).to_string(),
                        item: format!("#{}", set.bits()),
                    });
                }
            }
            if image.is_empty() {
                return Err(Error::EmptyChoice { menu: i });
            }
            if let Some(x) = image.iter().find(|x| !menu.contains(x)) {
                return Err(Error::ChoiceOutsideMenu {
                    menu: i,
                    alternative: if x.scope == full {
                        schema.alternative_string(x)
                    } else {
                        format!("{x:?}")
                    },
                });
            }
            image.sort();
            image.dedup();
            if let Some(&first) = index.get(&menu) {
                return Err(Error::DuplicateMenu { first, second: i });
            }
            index.insert(menu.clone(), i);
            menus.push(menu);
            choices.push(image);
        }
        if menus.is_empty() {
            return Err(Error::Json("a dataset needs at least one menu".into()));
        }
        Ok(JointChoiceDataset {
            schema,
            menus,
            choices,
            index,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: serde_json::Value) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&serde_json::Value> {
        self.provenance.as_ref()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn dims(&self) -> &DimensionSet {
        self.schema.dims()
    }

    pub fn n_dims(&self) -> usize {
        self.schema.n_dims()
    }

    pub fn menus(&self) -> &[Menu] {
        &self.menus
    }

    pub fn len(&self) -> usize {
        self.menus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.menus.is_empty()
    }

    pub fn choice(&self, menu: usize) -> &[Alternative] {
        &self.choices[menu]
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Menu, &[Alternative])> {
        self.menus.iter().zip(self.choices.iter().map(Vec::as_slice))
    }

    pub fn menu_index(&self, menu: &Menu) -> Option<usize> {
        self.index.get(menu).copied()
    }

    pub fn choice_of(&self, menu: &Menu) -> Option<&[Alternative]> {
        self.menu_index(menu).map(|i| self.choice(i))
    }

    pub fn is_single_valued(&self) -> bool {
        self.choices.iter().all(|c| c.len() == 1)
    }

    /// True when every menu with nonempty per-dimension sets is present.
    pub fn is_complete(&self) -> bool {
        self.menus.len() as u128 == self.schema.complete_menu_count()
    }

    pub fn projected_menu_family(&self, s: DimSubset) -> Result<Vec<ProjectionClass>> {
        self.schema.dims().check_subset(s)?;
        projected_menu_family(&self.menus, s)
    }
}
