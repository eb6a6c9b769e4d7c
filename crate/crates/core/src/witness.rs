//! Concrete counterexamples attached to failed verdicts. Every witness can be
//! replayed against the data it came from.

use serde_json::{json, Map, Value};

use crate::model::{project_choice_image, Alternative, DimSubset, JointChoiceDataset, Menu, Schema};
use crate::preferences::{revealed_preference, PreferenceRelation};
use crate::selective::maximal_intersection;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    SeparabilityViolation,
    BetweennessViolation,
    RichnessViolation,
    RationalizabilityViolation,
    Cycle,
    PreferenceSeparabilityViolation,
    SelectivityViolation,
}

impl WitnessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WitnessKind::SeparabilityViolation => "separability-violation",
            WitnessKind::BetweennessViolation => "betweenness-violation",
            WitnessKind::RichnessViolation => "richness-violation",
            WitnessKind::RationalizabilityViolation => "rationalizability-violation",
            WitnessKind::Cycle => "cycle",
            WitnessKind::PreferenceSeparabilityViolation => "preference-separability-violation",
            WitnessKind::SelectivityViolation => "selectivity-violation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// Menus `menu_a`, `menu_b` agree on `S` but their choice images do not
    /// project to the same set.
    Separability {
        subset: DimSubset,
        menu_a: usize,
        menu_b: usize,
        image_a: Vec<Alternative>,
        image_b: Vec<Alternative>,
    },
    /// Menus agreeing on `S ∩ T` with no menu combining the `S` part of the
    /// first and the `T` part of the second.
    Betweenness {
        s: DimSubset,
        t: DimSubset,
        menu_a: usize,
        menu_b: usize,
    },
    /// `trigger_menu` contains `better` and `worse`, which agree off `S`, yet
    /// the box menu `missing` is not in the family.
    Richness {
        subset: DimSubset,
        trigger_menu: usize,
        better: Alternative,
        worse: Alternative,
        missing: Menu,
    },
    /// `c(A) ≠ max(A, ≿^c)` at `menu`.
    Rationalizability {
        menu: usize,
        chosen: Vec<Alternative>,
        maximal: Vec<Alternative>,
    },
    /// `x_1 ≻ x_2 ≻ … ≻ x_k ≻ x_1`.
    Cycle { alternatives: Vec<Alternative> },
    /// `(x_S, u) ≿ (y_S, u)` holds at `u = holds_at` and fails at `fails_at`.
    PreferenceSeparability {
        subset: DimSubset,
        better: Alternative,
        worse: Alternative,
        holds_at: Alternative,
        fails_at: Alternative,
    },
    /// The members containing `dimension` intersect to more than it, or no
    /// member contains it.
    Selectivity {
        dimension: usize,
        intersection: Option<DimSubset>,
    },
}

impl Witness {
    pub fn kind(&self) -> WitnessKind {
        match self {
            Witness::Separability { .. } => WitnessKind::SeparabilityViolation,
            Witness::Betweenness { .. } => WitnessKind::BetweennessViolation,
            Witness::Richness { .. } => WitnessKind::RichnessViolation,
            Witness::Rationalizability { .. } => WitnessKind::RationalizabilityViolation,
            Witness::Cycle { .. } => WitnessKind::Cycle,
            Witness::PreferenceSeparability { .. } => WitnessKind::PreferenceSeparabilityViolation,
            Witness::Selectivity { .. } => WitnessKind::SelectivityViolation,
        }
    }

    /// Replays a dataset-level witness. Witnesses about relations or
    /// families are replayed with their dedicated methods and return false
    /// here, except cycles, which are checked against the revealed preference.
    pub fn reproduces_on(&self, d: &JointChoiceDataset) -> bool {
        match self {
            Witness::Separability {
                subset,
                menu_a,
                menu_b,
                image_a,
                image_b,
            } => {
                let (Some(a), Some(b)) = (d.menus().get(*menu_a), d.menus().get(*menu_b)) else {
                    return false;
                };
                let same_part = matches!((a.project(*subset), b.project(*subset)), (Ok(x), Ok(y)) if x == y);
                same_part
                    && image_a != image_b
                    && project_choice_image(d.choice(*menu_a), *subset).as_ref() == Ok(image_a)
                    && project_choice_image(d.choice(*menu_b), *subset).as_ref() == Ok(image_b)
            }
            Witness::Betweenness { .. } | Witness::Richness { .. } => self.reproduces_on_menus(d.menus()),
            Witness::Rationalizability { menu, chosen, maximal } => {
                if *menu >= d.len() || chosen.as_slice() != d.choice(*menu) || chosen == maximal {
                    return false;
                }
                let Ok(revealed) = revealed_preference(d) else {
                    return false;
                };
                let candidates = match revealed.relation.space().menu_indices(&d.menus()[*menu]) {
                    Ok(c) => c,
                    Err(_) => return false,
                };
                let computed: Vec<Alternative> = revealed
                    .relation
                    .maximal_among(&candidates)
                    .into_iter()
                    .map(|i| revealed.relation.space().alternative(i))
                    .collect();
                &computed == maximal
            }
            Witness::Cycle { .. } => {
                revealed_preference(d).is_ok_and(|revealed| self.reproduces_on_relation(&revealed.relation))
            }
            _ => false,
        }
    }

    /// Replays a witness that only concerns the menu family.
    pub fn reproduces_on_menus(&self, menus: &[Menu]) -> bool {
        match self {
            Witness::Betweenness { s, t, menu_a, menu_b } => {
                let (Some(a), Some(b)) = (menus.get(*menu_a), menus.get(*menu_b)) else {
                    return false;
                };
                let meet = s.intersection(*t);
                let bridged = |x: &Menu, y: &Menu| match (x.project(*s), y.project(*t)) {
                    (Ok(sx), Ok(ty)) => menus
                        .iter()
                        .any(|e| e.project(*s).ok().as_ref() == Some(&sx) && e.project(*t).ok().as_ref() == Some(&ty)),
                    _ => true,
                };
                menu_a != menu_b && a.project(meet).ok() == b.project(meet).ok() && !bridged(a, b) && !bridged(b, a)
            }
            Witness::Richness {
                subset,
                trigger_menu,
                better,
                worse,
                missing,
            } => {
                let Some(trigger) = menus.get(*trigger_menu) else {
                    return false;
                };
                let rest = subset.complement(trigger.scope().len());
                if !trigger.contains(better) || !trigger.contains(worse) || missing.scope() != trigger.scope() {
                    return false;
                }
                let differ_on_s = better.project(*subset).ok() != worse.project(*subset).ok();
                let agree_off_s = better.project(rest).ok() == worse.project(rest).ok();
                let box_matches = subset.iter().all(|q| {
                    let mut pair = crate::model::ItemSet::EMPTY;
                    pair.insert(better.item(q).unwrap());
                    pair.insert(worse.item(q).unwrap());
                    missing.set(q) == Some(pair)
                });
                let rest_singleton = rest.iter().all(|q| missing.set(q).is_some_and(|s| s.len() == 1));
                differ_on_s && agree_off_s && box_matches && rest_singleton && !menus.contains(missing)
            }
            _ => false,
        }
    }

    /// Replays a witness about a preference relation.
    pub fn reproduces_on_relation(&self, r: &PreferenceRelation) -> bool {
        match self {
            Witness::Cycle { alternatives } => {
                let k = alternatives.len();
                k >= 2 && (0..k).all(|i| r.strictly_prefers(&alternatives[i], &alternatives[(i + 1) % k]))
            }
            Witness::PreferenceSeparability {
                better,
                worse,
                holds_at,
                fails_at,
                ..
            } => {
                let joined = |x: &Alternative, u: &Alternative| x.join(u).ok();
                match (
                    joined(better, holds_at),
                    joined(worse, holds_at),
                    joined(better, fails_at),
                    joined(worse, fails_at),
                ) {
                    (Some(xu), Some(yu), Some(xv), Some(yv)) => r.weakly_prefers(&xu, &yu) && !r.weakly_prefers(&xv, &yv),
                    _ => false,
                }
            }
            _ => false,
        }
    }

    /// Replays a selectivity witness against a family over `n_dims`
    /// dimensions.
    pub fn reproduces_on_family(&self, members: &[DimSubset], n_dims: usize) -> bool {
        match self {
            Witness::Selectivity { dimension, intersection } => {
                *dimension < n_dims
                    && maximal_intersection(members, *dimension) == *intersection
                    && *intersection != Some(DimSubset::singleton(*dimension))
            }
            _ => false,
        }
    }

    /// Label-level JSON. `menus` resolves menu indices.
    pub fn to_json(&self, schema: &Schema, menus: &[Menu]) -> Value {
        let subset = |s: &DimSubset| json!(schema.dims().subset_labels(*s));
        let alt = |x: &Alternative| json!(schema.render_alternative(x));
        let alts = |xs: &[Alternative]| Value::Array(xs.iter().map(&alt).collect());
        let menu_ref = |i: usize| match menus.get(i) {
            Some(m) => menu_json(schema, m, Some(i)),
            None => json!({ "index": i }),
        };
        let mut out = Map::new();
        out.insert("kind".into(), json!(self.kind().as_str()));
        match self {
            Witness::Separability {
                subset: s,
                menu_a,
                menu_b,
                image_a,
                image_b,
            } => {
                out.insert("subset".into(), subset(s));
                out.insert("menuA".into(), menu_ref(*menu_a));
                out.insert("menuB".into(), menu_ref(*menu_b));
                out.insert("projectedImageA".into(), alts(image_a));
                out.insert("projectedImageB".into(), alts(image_b));
            }
            Witness::Betweenness { s, t, menu_a, menu_b } => {
                out.insert("s".into(), subset(s));
                out.insert("t".into(), subset(t));
                out.insert("menuA".into(), menu_ref(*menu_a));
                out.insert("menuB".into(), menu_ref(*menu_b));
            }
            Witness::Richness {
                subset: s,
                trigger_menu,
                better,
                worse,
                missing,
            } => {
                out.insert("subset".into(), subset(s));
                out.insert("triggerMenu".into(), menu_ref(*trigger_menu));
                out.insert("x".into(), alt(better));
                out.insert("y".into(), alt(worse));
                out.insert("missingMenu".into(), menu_json(schema, missing, None));
            }
            Witness::Rationalizability { menu, chosen, maximal } => {
                out.insert("menu".into(), menu_ref(*menu));
                out.insert("choice".into(), alts(chosen));
                out.insert("maximal".into(), alts(maximal));
            }
            Witness::Cycle { alternatives } => {
                out.insert("cycle".into(), alts(alternatives));
            }
            Witness::PreferenceSeparability {
                subset: s,
                better,
                worse,
                holds_at,
                fails_at,
            } => {
                out.insert("subset".into(), subset(s));
                out.insert("x".into(), alt(better));
                out.insert("y".into(), alt(worse));
                out.insert("holdsAt".into(), alt(holds_at));
                out.insert("failsAt".into(), alt(fails_at));
            }
            Witness::Selectivity { dimension, intersection } => {
                out.insert("dimension".into(), json!(schema.dims().label(*dimension)));
                out.insert(
                    "intersection".into(),
                    intersection.as_ref().map_or(Value::Null, subset),
                );
            }
        }
        Value::Object(out)
    }
}

/// `{"index": 3, "display": "(ab,xy)", "sets": {"1": ["a","b"], ...}}`
pub fn menu_json(schema: &Schema, m: &Menu, index: Option<usize>) -> Value {
    let mut out = Map::new();
    if let Some(i) = index {
        out.insert("index".into(), json!(i));
    }
    out.insert("display".into(), json!(schema.menu_string(m)));
    let sets: Map<String, Value> = schema
        .render_menu(m)
        .into_iter()
        .map(|(d, items)| (d, json!(items)))
        .collect();
    out.insert("sets".into(), Value::Object(sets));
    Value::Object(out)
}
