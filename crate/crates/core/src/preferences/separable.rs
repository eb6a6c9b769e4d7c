use std::collections::HashSet;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{DimSubset, ItemSet, Menu, Schema};
use crate::par;
use crate::witness::Witness;

use super::relation::{PreferenceRelation, ProductSpace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceSeparabilityReport {
    pub subset: DimSubset,
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Full-space offsets of every alternative of `sub`, in `sub`'s own order.
fn offsets(space: &ProductSpace, sub: &ProductSpace) -> Vec<usize> {
    sub.iter().map(|x| space.offset(&x)).collect()
}

fn check_scope(r: &PreferenceRelation, s: DimSubset) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    if !s.is_subset_of(r.space().scope()) {
        return Err(Error::ScopeError(format!(
            "{s:?} is not inside the relation scope {:?}",
            r.space().scope()
        )));
    }
    Ok(())
}

/// Whether the comparison of `x_S` with `y_S` is the same at every
/// completion `u_{-S}`. The witness is the first `(x_S, y_S)` pair, in
/// lexicographic order, whose comparison changes, with the first completion
/// where it holds and the first where it fails.
pub fn is_s_separable_preference(r: &PreferenceRelation, s: DimSubset) -> Result<PreferenceSeparabilityReport> {
    check_scope(r, s)?;
    let space = r.space();
    let rest = space.scope().difference(s);
    if rest.is_empty() {
        return Ok(PreferenceSeparabilityReport {
            subset: s,
            holds: true,
            witness: None,
        });
    }
    let s_space = space.restrict(s)?;
    let rest_space = space.restrict(rest)?;
    let s_off = offsets(space, &s_space);
    let rest_off = offsets(space, &rest_space);
    let per_x = par::map_range(s_off.len(), |x| {
        for (y, &oy) in s_off.iter().enumerate() {
            let mut holds_at = None;
            let mut fails_at = None;
            for (u, &ou) in rest_off.iter().enumerate() {
                if r.weak_idx(s_off[x] + ou, oy + ou) {
                    holds_at.get_or_insert(u);
                } else {
                    fails_at.get_or_insert(u);
                }
                if let (Some(h), Some(f)) = (holds_at, fails_at) {
                    return Some((y, h, f));
                }
            }
        }
        None
    });
    let witness = per_x
        .into_iter()
        .enumerate()
        .find_map(|(x, found)| found.map(|(y, h, f)| (x, y, h, f)))
        .map(|(x, y, h, f)| Witness::PreferenceSeparability {
            subset: s,
            better: s_space.alternative(x),
            worse: s_space.alternative(y),
            holds_at: rest_space.alternative(h),
            fails_at: rest_space.alternative(f),
        });
    Ok(PreferenceSeparabilityReport {
        subset: s,
        holds: witness.is_none(),
        witness,
    })
}

/// `x_S ≿_S y_S` iff `(x_S, u) ≿ (y_S, u)` for any completion `u`.
pub fn induced_preference(r: &PreferenceRelation, s: DimSubset) -> Result<PreferenceRelation> {
    if !is_s_separable_preference(r, s)?.holds {
        return Err(Error::NotSeparablePreference);
    }
    let space = r.space();
    if s == space.scope() {
        return Ok(r.clone());
    }
    let s_space = space.restrict(s)?;
    let s_off = offsets(space, &s_space);
    // Any completion works; the first one has offset zero.
    Ok(PreferenceRelation::from_fn(s_space, |i, j| r.weak_idx(s_off[i], s_off[j])))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichnessReport {
    pub subset: DimSubset,
    pub holds: bool,
    /// The first missing menu, with the menu and pair that require it.
    pub witness: Option<Witness>,
    /// Every required menu absent from the family, in discovery order.
    pub missing: Vec<Menu>,
}

/// Nonempty subsets of `set` with at most two items.
fn small_subsets(set: ItemSet) -> Vec<ItemSet> {
    let items: Vec<_> = set.iter().collect();
    let mut out: Vec<ItemSet> = items.iter().map(|&i| ItemSet::singleton(i)).collect();
    for (a, b) in items.iter().tuple_combinations() {
        out.push(ItemSet::from_items([*a, *b]));
    }
    out
}

/// Whenever a menu offers two alternatives `(x_S, u)` and `(y_S, u)` with
/// `x_S ≠ y_S`, the family must contain `(∏_{q∈S} {x_q, y_q}, v)` for every
/// `v ∈ ∏_{q∉S} X_q`.
pub fn is_s_rich(schema: &Schema, menus: &[Menu], s: DimSubset) -> Result<RichnessReport> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    schema.dims().check_subset(s)?;
    let full = schema.full();
    let rest = full.difference(s);
    let rest_space = ProductSpace::new(schema, rest)?;
    let present: HashSet<&Menu> = menus.iter().collect();
    let mut seen_boxes: HashSet<Vec<ItemSet>> = HashSet::new();
    let mut missing = Vec::new();
    let mut witness = None;
    for (i, m) in menus.iter().enumerate() {
        if m.scope() != full {
            return Err(Error::ScopeError(format!("menu #{i} does not cover every dimension")));
        }
        let choices: Vec<Vec<ItemSet>> = s.iter().map(|q| small_subsets(m.set(q).unwrap())).collect();
        for boxed in choices.into_iter().multi_cartesian_product() {
            if boxed.iter().all(|b| b.len() == 1) || !seen_boxes.insert(boxed.clone()) {
                continue;
            }
            for v in rest_space.iter() {
                let sets: Vec<ItemSet> = full
                    .iter()
                    .map(|q| match s.position(q) {
                        Some(p) => boxed[p],
                        None => ItemSet::singleton(v.item(q).unwrap()),
                    })
                    .collect();
                let required = Menu::new(full, sets)?;
                if present.contains(&required) {
                    continue;
                }
                if witness.is_none() {
                    let pick = |last: bool| {
                        let items = full
                            .iter()
                            .map(|q| {
                                let set = match s.position(q) {
                                    Some(p) => boxed[p],
                                    None => m.set(q).unwrap(),
                                };
                                let mut it = set.iter();
                                if last && s.contains(q) {
                                    it.last().unwrap()
                                } else {
                                    it.next().unwrap()
                                }
                            })
                            .collect();
                        crate::model::Alternative::new(full, items).expect("full arity")
                    };
                    witness = Some(Witness::Richness {
                        subset: s,
                        trigger_menu: i,
                        better: pick(false),
                        worse: pick(true),
                        missing: required.clone(),
                    });
                }
                missing.push(required);
            }
        }
    }
    Ok(RichnessReport {
        subset: s,
        holds: witness.is_none(),
        witness,
        missing,
    })
}
