use crate::error::{Error, Result};
use crate::model::{Alternative, DimSubset, JointChoiceDataset, Menu, Schema};
use crate::par;
use crate::selective::SelectiveFamily;
use crate::separability::is_s_separable;
use crate::witness::Witness;

use super::relation::{is_acyclic, JointPreference, PreferenceRelation, ProductSpace};

/// `≿^c` together with an informational acyclicity flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RevealedPreference {
    pub relation: PreferenceRelation,
    pub acyclic: bool,
    pub cycle: Option<Witness>,
}

/// `x ≿^c y` iff some menu `B` has `x ∈ c(B)` and `y ∈ ∏_q B_q`.
pub fn revealed_preference(d: &JointChoiceDataset) -> Result<RevealedPreference> {
    let space = ProductSpace::new(d.schema(), d.schema().full())?;
    let rows = par::map_range(d.len(), |i| {
        let chosen: Vec<usize> = d.choice(i).iter().map(|x| space.index_of(x).unwrap()).collect();
        let feasible = space.menu_indices(&d.menus()[i]).unwrap();
        (chosen, feasible)
    });
    let mut relation = PreferenceRelation::reflexive(space);
    for (chosen, feasible) in rows {
        for &x in &chosen {
            for &y in &feasible {
                relation.insert_idx(x, y);
            }
        }
    }
    let report = is_acyclic(&relation);
    Ok(RevealedPreference {
        relation,
        acyclic: report.acyclic,
        cycle: report.cycle,
    })
}

/// `c^≿(A) = max(A, ≿)` for every menu.
pub fn revealed_choice(r: &JointPreference, schema: &Schema, menus: &[Menu]) -> Result<JointChoiceDataset> {
    if r.space() != &ProductSpace::new(schema, schema.full())? {
        return Err(Error::ScopeError("the relation is not over this schema's alternatives".into()));
    }
    let images = par::map(menus, |m| -> Result<Vec<Alternative>> {
        let candidates = r.space().menu_indices(m)?;
        Ok(r.maximal_among(&candidates)
            .into_iter()
            .map(|i| r.space().alternative(i))
            .collect())
    });
    let entries = menus
        .iter()
        .cloned()
        .zip(images)
        .map(|(m, img)| Ok((m, img?)))
        .collect::<Result<Vec<_>>>()?;
    JointChoiceDataset::new(schema.clone(), entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalizabilityReport {
    pub holds: bool,
    /// First menu where the choice and the maximal set differ.
    pub witness: Option<Witness>,
    pub revealed: RevealedPreference,
}

/// Compares `c(A)` with `max(A, ≿^c)` menu by menu.
pub fn is_rationalizable(d: &JointChoiceDataset) -> Result<RationalizabilityReport> {
    let revealed = revealed_preference(d)?;
    let r = &revealed.relation;
    let maxima = par::map_range(d.len(), |i| {
        let candidates = r.space().menu_indices(&d.menus()[i]).unwrap();
        r.maximal_among(&candidates)
            .into_iter()
            .map(|j| r.space().alternative(j))
            .collect::<Vec<_>>()
    });
    let witness = maxima
        .into_iter()
        .enumerate()
        .find(|(i, maximal)| maximal.as_slice() != d.choice(*i))
        .map(|(menu, maximal)| Witness::Rationalizability {
            menu,
            chosen: d.choice(menu).to_vec(),
            maximal,
        });
    Ok(RationalizabilityReport {
        holds: witness.is_none(),
        witness,
        revealed,
    })
}

/// Verdict for one member `S` of the family: rationalizability of the
/// induced choice `c_S`. Witness menu indices refer to the induced menus.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberRationalizability {
    pub subset: DimSubset,
    pub induced: JointChoiceDataset,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyRationalizability {
    /// Verdict of the shortcut: every induced choice is rationalizable.
    pub rationalizable: bool,
    pub members: Vec<MemberRationalizability>,
    /// Direct test on the full dataset, when its alternative space fits.
    pub direct: Option<bool>,
    /// The shortcut and the direct test disagree.
    pub mismatch: bool,
}

/// Decides rationalizability of a single-valued separable dataset through
/// the induced choices on the members of a selective family, then
/// cross-checks against the direct test.
pub fn rationalizability_via_selective_family(
    d: &JointChoiceDataset,
    family: &SelectiveFamily,
) -> Result<FamilyRationalizability> {
    if !d.is_single_valued() {
        return Err(Error::NotSingleValued);
    }
    let overview = crate::separability::is_separable(d);
    if let Some(q) = overview.failing_dimension() {
        return Err(Error::NotSeparable {
            dimension: d.dims().label(q).to_string(),
        });
    }
    family_verdict(d, family)
}

/// The same procedure without the single-valuedness guard. On
/// correspondences the shortcut can disagree with the direct test; the
/// disagreement shows up in `mismatch`.
pub fn rationalizability_via_selective_family_unguarded(
    d: &JointChoiceDataset,
    family: &SelectiveFamily,
) -> Result<FamilyRationalizability> {
    family_verdict(d, family)
}

fn family_verdict(d: &JointChoiceDataset, family: &SelectiveFamily) -> Result<FamilyRationalizability> {
    if family.n_dims() != d.n_dims() {
        return Err(Error::FamilyNotSelective(format!(
            "family is over {} dimensions, dataset over {}",
            family.n_dims(),
            d.n_dims()
        )));
    }
    let results = par::map(family.members(), |&s| -> Result<MemberRationalizability> {
        let report = is_s_separable(d, s)?;
        let induced = match report.induced {
            Some(induced) => induced.to_dataset(d.schema())?,
            None => {
                let q = s.iter().next().unwrap_or(0);
                return Err(Error::NotSeparable {
                    dimension: d.dims().label(q).to_string(),
                });
            }
        };
        let r = is_rationalizable(&induced)?;
        Ok(MemberRationalizability {
            subset: s,
            induced,
            holds: r.holds,
            witness: r.witness,
        })
    });
    let members = results.into_iter().collect::<Result<Vec<_>>>()?;
    let rationalizable = members.iter().all(|m| m.holds);
    let direct = match is_rationalizable(d) {
        Ok(r) => Some(r.holds),
        Err(Error::SpaceTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(FamilyRationalizability {
        rationalizable,
        members,
        direct,
        mismatch: direct.is_some_and(|h| h != rationalizable),
    })
}
