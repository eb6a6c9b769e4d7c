//! Synthetic joint choice datasets from behavioral models: rational choice,
//! limited attention, status quo bias, envy-free allocation, additive
//! utility and seeded random choice.

use std::collections::HashMap;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::model::{Alternative, ItemId, ItemSet, JointChoiceDataset, Menu, Schema};
use crate::par;
use crate::preferences::{AdditiveUtility, UtilityDocument};

/// Model specification, tagged by `kind`.
///
/// ```json
/// {"kind": "rational", "order": ["a", "b"]}
/// {"kind": "limited_attention", "order": ["x","y","z"],
///  "filter": [{"set": ["x","y","z"], "attention": ["y","z"]}]}
/// {"kind": "status_quo", "strict": [["x","z"], ["y","z"]]}
/// {"kind": "envy_free", "agents": {"1": ["a","b"], "2": ["a","b"]}}
/// {"kind": "additive", "utility": {...}}
/// {"kind": "random", "seed": 7}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Per dimension, the best available item.
    Rational {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orders: Option<IndexMap<String, Vec<String>>>,
    },
    /// Per dimension, the best item among those noticed.
    LimitedAttention {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        order: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orders: Option<IndexMap<String, Vec<String>>>,
        #[serde(default)]
        filter: Vec<FilterEntry>,
    },
    /// Keeps the previous pick whenever it is available and undominated.
    StatusQuo { strict: Vec<[String; 2]> },
    /// Each dimension is an agent with a strict order over a common item set.
    EnvyFree {
        agents: IndexMap<String, Vec<String>>,
        #[serde(default)]
        rule: AllocationRule,
    },
    /// Argmax of an additive utility.
    Additive {
        utility: UtilityDocument,
        #[serde(default)]
        single_valued: bool,
    },
    /// Uniform nonempty subset (or single alternative) per menu.
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default)]
        single_valued: bool,
    },
}

/// `Γ(set) = attention`, for one dimension or (when `dimension` is absent)
/// for every dimension. Sets without an entry are fully noticed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<String>,
    pub set: Vec<String>,
    pub attention: Vec<String>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationRule {
    /// Envy-free allocations not Pareto-dominated by another envy-free one;
    /// efficient allocations when none is envy-free.
    #[default]
    EnvyFree,
    /// Every agent gets their best available item.
    Efficient,
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Rational { .. } => "rational",
            ModelSpec::LimitedAttention { .. } => "limited_attention",
            ModelSpec::StatusQuo { .. } => "status_quo",
            ModelSpec::EnvyFree { .. } => "envy_free",
            ModelSpec::Additive { .. } => "additive",
            ModelSpec::Random { .. } => "random",
        }
    }
}

/// `rank[q][item]`: position of the item in dimension `q`'s order, best = 0.
type Ranks = Vec<Vec<usize>>;

fn order_ranks(
    schema: &Schema,
    order: &Option<Vec<String>>,
    orders: &Option<IndexMap<String, Vec<String>>>,
) -> Result<Ranks> {
    let per_dim: Vec<&Vec<String>> = match (order, orders) {
        (Some(common), None) => vec![common; schema.n_dims()],
        (None, Some(map)) => {
            if let Some(extra) = map.keys().find(|k| schema.dims().index_of(k).is_err()) {
                return Err(Error::UnknownDimension(extra.clone()));
            }
            schema
                .dims()
                .labels()
                .iter()
                .map(|d| {
                    map.get(d)
                        .ok_or_else(|| Error::InvalidOrder(format!("no order given for dimension `{d}`")))
                })
                .collect::<Result<_>>()?
        }
        _ => return Err(Error::InvalidOrder("give exactly one of `order` or `orders`".into())),
    };
    per_dim
        .iter()
        .enumerate()
        .map(|(q, o)| ranks_for(schema, q, o))
        .collect()
}

/// Ranks of dimension `q`'s items under a strict order that must list every
/// item exactly once (labels outside the universe are ignored).
fn ranks_for(schema: &Schema, q: usize, order: &[String]) -> Result<Vec<usize>> {
    let u = schema.universe(q);
    let mut rank = vec![usize::MAX; u.len()];
    let mut seen = std::collections::HashSet::new();
    for (pos, label) in order.iter().enumerate() {
        if !seen.insert(label) {
            return Err(Error::InvalidOrder(format!("`{label}` appears twice")));
        }
        if let Some(id) = u.id_of(label) {
            rank[id as usize] = pos;
        }
    }
    if let Some(missing) = rank.iter().position(|&r| r == usize::MAX) {
        return Err(Error::InvalidOrder(format!(
            "item `{}` of dimension `{}` is not ranked",
            u.label(missing as ItemId),
            schema.dims().label(q)
        )));
    }
    Ok(rank)
}

fn best(set: ItemSet, rank: &[usize]) -> ItemId {
    set.iter().min_by_key(|&i| rank[i as usize]).expect("menu sets are nonempty")
}

/// `Γ` per dimension, keyed by the full set.
type Filters = Vec<HashMap<ItemSet, ItemSet>>;

fn build_filters(schema: &Schema, entries: &[FilterEntry]) -> Result<Filters> {
    let mut filters: Filters = vec![HashMap::new(); schema.n_dims()];
    let resolve = |q: usize, labels: &[String]| -> Result<ItemSet> {
        let u = schema.universe(q);
        let mut set = ItemSet::EMPTY;
        for l in labels {
            set.insert(u.id_of(l).ok_or_else(|| Error::InvalidFilter(format!("unknown item `{l}`")))?);
        }
        Ok(set)
    };
    // Dimension-specific entries override shared ones regardless of order.
    for specific in [false, true] {
        for e in entries.iter().filter(|e| e.dimension.is_some() == specific) {
            let dims: Vec<usize> = match &e.dimension {
                Some(d) => vec![schema.dims().index_of(d)?],
                None => (0..schema.n_dims()).collect(),
            };
            for q in dims {
                let set = resolve(q, &e.set)?;
                let attention = resolve(q, &e.attention)?;
                if attention.is_empty() || !attention.is_subset_of(set) {
                    return Err(Error::InvalidFilter(format!(
                        "attention {:?} must be a nonempty subset of {:?}",
                        e.attention, e.set
                    )));
                }
                filters[q].insert(set, attention);
            }
        }
    }
    Ok(filters)
}

fn product_choice(menus: &[Menu], pick: impl Fn(usize, ItemSet) -> ItemId + Sync + Send) -> Vec<Vec<Alternative>> {
    par::map(menus, |m| {
        let items = m.scope().iter().zip(m.sets()).map(|(q, &s)| pick(q, s)).collect();
        vec![Alternative::new(m.scope(), items).expect("one item per dimension")]
    })
}

/// Strict relation over labels: `x ≻ y` for each listed pair.
fn status_quo_choice(schema: &Schema, menus: &[Menu], strict: &[[String; 2]]) -> Result<Vec<Vec<Alternative>>> {
    for [x, y] in strict {
        let known = |l: &String| schema.universes().iter().any(|u| u.id_of(l).is_some());
        if !known(x) || !known(y) {
            return Err(Error::InvalidOrder(format!("`{x}` ≻ `{y}` mentions an unknown item")));
        }
        if x == y {
            return Err(Error::InvalidOrder(format!("`{x}` ≻ `{x}` is not strict")));
        }
    }
    let beats = |x: &str, y: &str| strict.iter().any(|[a, b]| a == x && b == y);
    Ok(par::map(menus, |m| {
        let mut items: Vec<ItemId> = Vec::with_capacity(m.sets().len());
        let mut previous: Option<String> = None;
        for (q, &set) in m.scope().iter().zip(m.sets()) {
            let u = schema.universe(q);
            let undominated: Vec<ItemId> = set
                .iter()
                .filter(|&i| !set.iter().any(|j| beats(u.label(j), u.label(i))))
                .collect();
            let keep = previous
                .as_deref()
                .and_then(|p| u.id_of(p))
                .filter(|id| undominated.contains(id));
            let pick = keep.unwrap_or(undominated[0]);
            previous = Some(u.label(pick).to_string());
            items.push(pick);
        }
        vec![Alternative::new(m.scope(), items).expect("one item per dimension")]
    }))
}

fn envy_free_choice(
    schema: &Schema,
    menus: &[Menu],
    agents: &IndexMap<String, Vec<String>>,
    rule: AllocationRule,
) -> Result<Vec<Vec<Alternative>>> {
    let n = schema.n_dims();
    if let Some(extra) = agents.keys().find(|k| schema.dims().index_of(k).is_err()) {
        return Err(Error::UnknownDimension(extra.clone()));
    }
    // rank[i][label]: agent i's rank of an item label, over every label any
    // agent can receive.
    let mut ranks: Vec<HashMap<String, usize>> = Vec::with_capacity(n);
    for d in schema.dims().labels() {
        let order = agents
            .get(d)
            .ok_or_else(|| Error::InvalidOrder(format!("no order given for agent `{d}`")))?;
        let mut rank = HashMap::new();
        for (pos, l) in order.iter().enumerate() {
            if rank.insert(l.clone(), pos).is_some() {
                return Err(Error::InvalidOrder(format!("`{l}` appears twice")));
            }
        }
        ranks.push(rank);
    }
    for (i, rank) in ranks.iter().enumerate() {
        for u in schema.universes() {
            if let Some(l) = u.labels().iter().find(|l| !rank.contains_key(*l)) {
                return Err(Error::InvalidOrder(format!(
                    "agent `{}` does not rank `{l}`",
                    schema.dims().label(i)
                )));
            }
        }
    }
    let label = |q: usize, id: ItemId| schema.universe(q).label(id);
    // weakly prefers: agent i, own item vs other item (labels)
    let weak = |i: usize, x: &str, y: &str| ranks[i][x] <= ranks[i][y];
    Ok(par::map(menus, |m| {
        let product = m.product();
        let efficient = || {
            let items = (0..n)
                .map(|q| {
                    m.sets()[q]
                        .iter()
                        .min_by_key(|&id| ranks[q][label(q, id)])
                        .unwrap()
                })
                .collect();
            vec![Alternative::new(m.scope(), items).expect("full arity")]
        };
        if rule == AllocationRule::Efficient {
            return efficient();
        }
        let envy_free: Vec<&Alternative> = product
            .iter()
            .filter(|x| {
                (0..n).all(|i| (0..n).all(|j| weak(i, label(i, x.items()[i]), label(j, x.items()[j]))))
            })
            .collect();
        if envy_free.is_empty() {
            return efficient();
        }
        let dominates = |y: &Alternative, x: &Alternative| {
            let all = (0..n).all(|i| weak(i, label(i, y.items()[i]), label(i, x.items()[i])));
            let some = (0..n).any(|i| !weak(i, label(i, x.items()[i]), label(i, y.items()[i])));
            all && some
        };
        envy_free
            .iter()
            .filter(|x| !envy_free.iter().any(|y| dominates(y, x)))
            .map(|x| (*x).clone())
            .collect()
    }))
}

fn random_choice(menus: &[Menu], seed: u64, single_valued: bool) -> Vec<Vec<Alternative>> {
    par::map_range(menus.len(), |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let product = menus[k].product();
        if single_valued {
            return vec![product[rng.gen_range(0..product.len())].clone()];
        }
        loop {
            let picked: Vec<Alternative> = product.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
            if !picked.is_empty() {
                return picked;
            }
        }
    })
}

/// Runs the model on every menu and returns a dataset whose provenance
/// records the model, its parameters, the seed and any tie-breaking notes.
pub fn generate(spec: &ModelSpec, schema: &Schema, menus: &[Menu], seed_override: Option<u64>) -> Result<JointChoiceDataset> {
    if menus.is_empty() {
        return Err(Error::InvalidModel("the menu family is empty".into()));
    }
    let mut notes: Vec<&str> = Vec::new();
    let mut seed_used: Option<u64> = None;
    let images = match spec {
        ModelSpec::Rational { order, orders } => {
            let ranks = order_ranks(schema, order, orders)?;
            product_choice(menus, |q, s| best(s, &ranks[q]))
        }
        ModelSpec::LimitedAttention { order, orders, filter } => {
            let ranks = order_ranks(schema, order, orders)?;
            let filters = build_filters(schema, filter)?;
            product_choice(menus, |q, s| best(filters[q].get(&s).copied().unwrap_or(s), &ranks[q]))
        }
        ModelSpec::StatusQuo { strict } => {
            notes.push("the first dimension picks an undominated item; ties go to the lowest item in universe order");
            notes.push("later dimensions keep the previous pick (matched by label) when it is available and undominated");
            status_quo_choice(schema, menus, strict)?
        }
        ModelSpec::EnvyFree { agents, rule } => {
            if *rule == AllocationRule::EnvyFree {
                notes.push("envy-free allocations are refined to those not Pareto-dominated by another envy-free allocation");
                notes.push("when no envy-free allocation exists the efficient allocation is chosen");
            }
            envy_free_choice(schema, menus, agents, *rule)?
        }
        ModelSpec::Additive { utility, single_valued } => {
            let u = AdditiveUtility::from_document(schema, utility)?;
            let images = par::map(menus, |m| u.argmax(m));
            let mut images = images.into_iter().collect::<Result<Vec<_>>>()?;
            if *single_valued {
                notes.push("ties are broken by taking the lexicographically first maximizer");
                for img in &mut images {
                    img.truncate(1);
                }
            }
            images
        }
        ModelSpec::Random { seed, single_valued } => {
            let seed = seed_override
                .or(*seed)
                .ok_or_else(|| Error::InvalidModel("the random model needs a seed".into()))?;
            seed_used = Some(seed);
            random_choice(menus, seed, *single_valued)
        }
    };
    let entries = menus.iter().cloned().zip(images).collect();
    let parameters = match serde_json::to_value(spec).expect("model specs serialize") {
        Value::Object(mut map) => {
            map.remove("kind");
            Value::Object(map)
        }
        other => other,
    };
    let provenance = json!({
        "model": spec.kind(),
        "parameters": parameters,
        "seed": seed_used,
        "notes": notes,
    });
    Ok(JointChoiceDataset::new(schema.clone(), entries)?.with_provenance(provenance))
}
