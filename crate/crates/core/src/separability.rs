//! S-separability of joint choices, induced choices, full separability by
//! two independent routes, and the menu-domain conditions (menus
//! betweenness, chained betweenness over a selective family) under which
//! separability is stable under intersection.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{
    project_choice_image, Alternative, DimSubset, ItemId, ItemSet, JointChoiceDataset, Menu, Schema,
};
use crate::par;
use crate::selective::SelectiveFamily;
use crate::witness::Witness;

/// Largest `|Q|` for which [`is_separable_bruteforce`] enumerates subsets.
pub const BRUTEFORCE_MAX_DIMENSIONS: usize = 20;

/// Default cap on the number of labellings tried per dimension: `8!`.
pub const DEFAULT_LABELLING_CAP: usize = 40_320;

/// The joint choice induced on `S`: one image per element of `π_S(𝔐)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedChoice {
    scope: DimSubset,
    entries: Vec<(Menu, Vec<Alternative>)>,
}

impl InducedChoice {
    pub fn scope(&self) -> DimSubset {
        self.scope
    }

    pub fn entries(&self) -> &[(Menu, Vec<Alternative>)] {
        &self.entries
    }

    pub fn get(&self, menu: &Menu) -> Option<&[Alternative]> {
        self.entries
            .iter()
            .find(|(m, _)| m == menu)
            .map(|(_, c)| c.as_slice())
    }

    /// The induced choice as a standalone dataset over the dimensions of `S`.
    pub fn to_dataset(&self, parent: &Schema) -> Result<JointChoiceDataset> {
        let schema = parent.restrict(self.scope)?;
        let full = schema.full();
        let entries = self
            .entries
            .iter()
            .map(|(m, c)| (m.rescoped(full), c.iter().map(|x| x.rescoped(full)).collect()))
            .collect();
        JointChoiceDataset::new(schema, entries)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparabilityReport {
    pub subset: DimSubset,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub induced: Option<InducedChoice>,
}

fn check_subset(d: &JointChoiceDataset, s: DimSubset) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySubset);
    }
    d.dims().check_subset(s)
}

/// Groups menus by `π_S` and requires every class to share one projected
/// choice image. On success the common images form the induced choice; on
/// failure the witness is the lexicographically first violating menu pair.
pub fn is_s_separable(d: &JointChoiceDataset, s: DimSubset) -> Result<SeparabilityReport> {
    check_subset(d, s)?;
    let classes = d.projected_menu_family(s)?;
    let mut entries = Vec::with_capacity(classes.len());
    let mut violation: Option<(usize, usize, Vec<Alternative>, Vec<Alternative>)> = None;
    for class in classes {
        let first = class.members[0];
        let image = project_choice_image(d.choice(first), s)?;
        for &other in &class.members[1..] {
            let other_image = project_choice_image(d.choice(other), s)?;
            if other_image != image {
                if violation.as_ref().is_none_or(|(a, b, _, _)| (first, other) < (*a, *b)) {
                    violation = Some((first, other, image.clone(), other_image));
                }
                break;
            }
        }
        entries.push((class.menu, image));
    }
    Ok(match violation {
        Some((menu_a, menu_b, image_a, image_b)) => SeparabilityReport {
            subset: s,
            holds: false,
            witness: Some(Witness::Separability {
                subset: s,
                menu_a,
                menu_b,
                image_a,
                image_b,
            }),
            induced: None,
        },
        None => SeparabilityReport {
            subset: s,
            holds: true,
            witness: None,
            induced: Some(InducedChoice { scope: s, entries }),
        },
    })
}

/// Per-dimension verdicts for full separability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparabilityOverview {
    pub holds: bool,
    pub per_dimension: Vec<SeparabilityReport>,
}

impl SeparabilityOverview {
    /// Witness of the first failing dimension.
    pub fn witness(&self) -> Option<&Witness> {
        self.per_dimension.iter().find_map(|r| r.witness.as_ref())
    }

    pub fn failing_dimension(&self) -> Option<usize> {
        self.per_dimension.iter().position(|r| !r.holds)
    }
}

/// Separable iff `{q}`-separable for every dimension `q`.
///
/// Exact for single-valued data. A correspondence on three or more
/// dimensions can pass every singleton and still fail on a union of them,
/// e.g. `c(ab,xy,p) = {(a,x,p),(b,y,p)}`, `c(ab,xy,q) = {(a,y,q),(b,x,q)}`
/// fails `{1,2}`; [`is_separable_bruteforce`] is exact in every case.
pub fn is_separable(d: &JointChoiceDataset) -> SeparabilityOverview {
    let per_dimension = par::map_range(d.n_dims(), |q| {
        is_s_separable(d, DimSubset::singleton(q)).expect("singletons are valid subsets")
    });
    SeparabilityOverview {
        holds: per_dimension.iter().all(|r| r.holds),
        per_dimension,
    }
}

/// Separable iff `S`-separable for every nonempty `S ⊆ Q`, checked subset by
/// subset.
pub fn is_separable_bruteforce(d: &JointChoiceDataset) -> Result<bool> {
    let n = d.n_dims();
    if n > BRUTEFORCE_MAX_DIMENSIONS {
        return Err(Error::TooManyForEnumeration {
            count: n,
            max: BRUTEFORCE_MAX_DIMENSIONS,
        });
    }
    let subsets: Vec<DimSubset> = DimSubset::all_nonempty(n).collect();
    let verdicts = par::map(&subsets, |&s| {
        is_s_separable(d, s).expect("enumerated subsets are valid").holds
    });
    Ok(verdicts.into_iter().all(|h| h))
}

/// A one-dimensional choice function `c_q` on `π_q(𝔐)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentChoice {
    pub dimension: usize,
    pub table: Vec<(ItemSet, ItemId)>,
}

impl ComponentChoice {
    pub fn choose(&self, set: ItemSet) -> Option<ItemId> {
        self.table.iter().find(|(s, _)| *s == set).map(|(_, i)| *i)
    }
}

/// Splits a single-valued separable joint choice into one choice function per
/// dimension and checks that they reproduce every observation.
pub fn decompose_components(d: &JointChoiceDataset) -> Result<Vec<ComponentChoice>> {
    if !d.is_single_valued() {
        return Err(Error::NotSingleValued);
    }
    let overview = is_separable(d);
    if let Some(q) = overview.failing_dimension() {
        return Err(Error::NotSeparable {
            dimension: d.dims().label(q).to_string(),
        });
    }
    let components: Vec<ComponentChoice> = overview
        .per_dimension
        .into_iter()
        .enumerate()
        .map(|(q, report)| {
            let induced = report.induced.expect("holding reports carry the induced choice");
            ComponentChoice {
                dimension: q,
                table: induced
                    .entries
                    .into_iter()
                    .map(|(m, c)| (m.sets()[0], c[0].items()[0]))
                    .collect(),
            }
        })
        .collect();
    for (i, (menu, chosen)) in d.entries().enumerate() {
        let items: Option<Vec<ItemId>> = components
            .iter()
            .zip(menu.sets())
            .map(|(c, &set)| c.choose(set))
            .collect();
        let rebuilt = items.map(|items| Alternative::new(menu.scope(), items)).transpose()?;
        if rebuilt.as_ref() != chosen.first() {
            return Err(Error::ReconstructionMismatch { menu: i });
        }
    }
    Ok(components)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetweennessReport {
    pub s: DimSubset,
    pub t: DimSubset,
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Set when `S ∩ T = ∅`, in which case every pair of menus is compared.
    pub disjoint_convention: bool,
}

/// Menus betweenness for `(S, T)`: whenever two menus agree on `S ∩ T`, some
/// menu agrees with one of them on `S` and with the other on `T`. Pairs are
/// unordered; either orientation suffices.
pub fn check_menus_betweenness(menus: &[Menu], s: DimSubset, t: DimSubset) -> Result<BetweennessReport> {
    if s.is_empty() && t.is_empty() {
        return Err(Error::EmptySubset);
    }
    let meet = s.intersection(t);
    let mut available: HashSet<(Menu, Menu)> = HashSet::with_capacity(menus.len());
    for m in menus {
        available.insert((m.project(s)?, m.project(t)?));
    }
    let s_parts = menus.iter().map(|m| m.project(s)).collect::<Result<Vec<_>>>()?;
    let t_parts = menus.iter().map(|m| m.project(t)).collect::<Result<Vec<_>>>()?;
    let mut violation: Option<(usize, usize)> = None;
    for class in crate::model::projected_menu_family(menus, meet)? {
        'pairs: for (k, &a) in class.members.iter().enumerate() {
            for &b in &class.members[k + 1..] {
                let bridged = available.contains(&(s_parts[a].clone(), t_parts[b].clone()))
                    || available.contains(&(s_parts[b].clone(), t_parts[a].clone()));
                if !bridged {
                    if violation.is_none_or(|v| (a, b) < v) {
                        violation = Some((a, b));
                    }
                    break 'pairs;
                }
            }
        }
    }
    Ok(BetweennessReport {
        s,
        t,
        holds: violation.is_none(),
        witness: violation.map(|(menu_a, menu_b)| Witness::Betweenness { s, t, menu_a, menu_b }),
        disjoint_convention: meet.is_empty(),
    })
}

/// Labelling of `𝒮_q` (as member indices) whose chained pairs all satisfy
/// menus betweenness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labelling {
    pub dimension: usize,
    pub order: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SBetweenness {
    Holds(Vec<Labelling>),
    /// No labelling works for `dimension`; the witness is the first failing
    /// pair under the family's own member order.
    Fails { dimension: usize, witness: Witness },
    /// `|𝒮_q|!` exceeds the labelling cap.
    Inconclusive { dimension: usize, labellings: u128 },
}

impl SBetweenness {
    pub fn holds(&self) -> bool {
        matches!(self, SBetweenness::Holds(_))
    }
}

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

/// Tries labellings of `𝒮_q` (all members containing `q`) for every `q`.
pub fn check_s_betweenness(menus: &[Menu], family: &SelectiveFamily, cap: usize) -> Result<SBetweenness> {
    if let Some(m) = menus.first() {
        if m.scope() != DimSubset::full(family.n_dims()) {
            return Err(Error::FamilyNotSelective(format!(
                "family is over {} dimensions, menus over {}",
                family.n_dims(),
                m.scope().len()
            )));
        }
    }
    let mut cache: HashMap<(DimSubset, DimSubset), BetweennessReport> = HashMap::new();
    let mut check = |s: DimSubset, t: DimSubset| -> Result<BetweennessReport> {
        if let Some(r) = cache.get(&(s, t)) {
            return Ok(r.clone());
        }
        let r = check_menus_betweenness(menus, s, t)?;
        cache.insert((s, t), r.clone());
        Ok(r)
    };
    let mut labellings = Vec::with_capacity(family.n_dims());
    for q in 0..family.n_dims() {
        let idx = family.index_sets(q)?.to_vec();
        let count = factorial(idx.len());
        if count > cap as u128 {
            return Ok(SBetweenness::Inconclusive {
                dimension: q,
                labellings: count,
            });
        }
        let mut found = None;
        let mut first_failure = None;
        for order in idx.iter().copied().permutations(idx.len()) {
            let mut acc = family.members()[order[0]];
            let mut failure = None;
            for &i in &order[1..] {
                let next = family.members()[i];
                let r = check(acc, next)?;
                if !r.holds {
                    failure = r.witness;
                    break;
                }
                acc = acc.intersection(next);
            }
            match failure {
                None => {
                    found = Some(order);
                    break;
                }
                Some(w) => {
                    first_failure.get_or_insert(w);
                }
            }
        }
        match found {
            Some(order) => labellings.push(Labelling { dimension: q, order }),
            None => {
                return Ok(SBetweenness::Fails {
                    dimension: q,
                    witness: first_failure.expect("a failed search saw a failing pair"),
                })
            }
        }
    }
    Ok(SBetweenness::Holds(labellings))
}

/// Why the selective-family test could not certify separability. None of
/// these proves non-separability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Inconclusive {
    BetweennessFails { dimension: usize, witness: Witness },
    LabellingCapExceeded { dimension: usize, labellings: u128 },
    MemberNotSeparable { member: DimSubset, witness: Witness },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyVerdict {
    Separable {
        labellings: Vec<Labelling>,
        members: Vec<SeparabilityReport>,
    },
    Inconclusive(Inconclusive),
}

impl FamilyVerdict {
    pub fn is_separable(&self) -> bool {
        matches!(self, FamilyVerdict::Separable { .. })
    }
}

/// Sufficient test: chained betweenness over the family plus
/// `S_i`-separability of every member implies full separability.
pub fn separability_via_selective_family(
    d: &JointChoiceDataset,
    family: &SelectiveFamily,
) -> Result<FamilyVerdict> {
    separability_via_selective_family_capped(d, family, DEFAULT_LABELLING_CAP)
}

pub fn separability_via_selective_family_capped(
    d: &JointChoiceDataset,
    family: &SelectiveFamily,
    cap: usize,
) -> Result<FamilyVerdict> {
    if family.n_dims() != d.n_dims() {
        return Err(Error::FamilyNotSelective(format!(
            "family is over {} dimensions, dataset over {}",
            family.n_dims(),
            d.n_dims()
        )));
    }
    let labellings = match check_s_betweenness(d.menus(), family, cap)? {
        SBetweenness::Holds(l) => l,
        SBetweenness::Fails { dimension, witness } => {
            return Ok(FamilyVerdict::Inconclusive(Inconclusive::BetweennessFails { dimension, witness }))
        }
        SBetweenness::Inconclusive { dimension, labellings } => {
            return Ok(FamilyVerdict::Inconclusive(Inconclusive::LabellingCapExceeded {
                dimension,
                labellings,
            }))
        }
    };
    let members = par::map(family.members(), |&s| is_s_separable(d, s));
    let members = members.into_iter().collect::<Result<Vec<_>>>()?;
    if let Some(r) = members.iter().find(|r| !r.holds) {
        return Ok(FamilyVerdict::Inconclusive(Inconclusive::MemberNotSeparable {
            member: r.subset,
            witness: r.witness.clone().expect("failing reports carry a witness"),
        }));
    }
    Ok(FamilyVerdict::Separable { labellings, members })
}
