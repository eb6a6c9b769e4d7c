use std::collections::HashMap;
use std::str::FromStr;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::model::{Alternative, DimSubset, ItemId, JointChoiceDataset, Menu, Schema};
use crate::par;

use super::relation::{PreferenceRelation, ProductSpace};

/// ```json
/// {"blocks": [["1"], ["2"]],
///  "values": {"0": {"a": "1", "b": "0"}, "1": {"x": "3/2", "y": "0"}}}
/// ```
/// Keys of a multi-dimension block join its labels with commas, in block
/// dimension order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UtilityDocument {
    pub blocks: Vec<Vec<String>>,
    pub values: IndexMap<String, IndexMap<String, Value>>,
}

/// `U(x) = Σ_B V_B(x_B)` over a partition of the dimensions into blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveUtility {
    n_dims: usize,
    blocks: Vec<DimSubset>,
    tables: Vec<HashMap<Vec<ItemId>, BigRational>>,
}

pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Some((whole, frac)) = text.split_once('.') {
        let digits = format!("{whole}{frac}");
        let num = BigInt::from_str(&digits).map_err(|_| Error::InvalidUtility(format!("`{text}` is not a number")))?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    BigRational::from_str(text).map_err(|_| Error::InvalidUtility(format!("`{text}` is not a rational number")))
}

fn value_to_rational(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        other => Err(Error::InvalidUtility(format!(
            "utility values are integers or rational strings, got {other}"
        ))),
    }
}

impl AdditiveUtility {
    /// Builds a utility from per-block value functions, checking that the
    /// blocks partition the dimensions.
    pub fn from_fn(
        schema: &Schema,
        blocks: Vec<DimSubset>,
        f: impl Fn(usize, &Alternative) -> Option<BigRational>,
    ) -> Result<Self> {
        let n_dims = schema.n_dims();
        let mut covered = DimSubset::EMPTY;
        for b in &blocks {
            schema.dims().check_subset(*b)?;
            if b.is_empty() || !b.intersection(covered).is_empty() {
                return Err(Error::InvalidUtility("blocks must be nonempty and disjoint".into()));
            }
            covered = covered.union(*b);
        }
        if covered != schema.full() {
            return Err(Error::InvalidUtility("blocks must cover every dimension".into()));
        }
        let mut tables = Vec::with_capacity(blocks.len());
        for (k, &b) in blocks.iter().enumerate() {
            let space = ProductSpace::new(schema, b)?;
            let mut table = HashMap::with_capacity(space.size());
            for x in space.iter() {
                let v = f(k, &x).ok_or_else(|| Error::MissingBranchValue {
                    block: k,
                    key: schema.render_alternative(&x).join(","),
                })?;
                table.insert(x.items().to_vec(), v);
            }
            tables.push(table);
        }
        Ok(AdditiveUtility { n_dims, blocks, tables })
    }

    /// One block per dimension with integer values listed in universe order.
    pub fn per_dimension(schema: &Schema, values: &[Vec<i64>]) -> Result<Self> {
        let blocks = (0..schema.n_dims()).map(DimSubset::singleton).collect();
        AdditiveUtility::from_fn(schema, blocks, |k, x| {
            values
                .get(k)
                .and_then(|row| row.get(x.items()[0] as usize))
                .map(|&v| BigRational::from_integer(v.into()))
        })
    }

    pub fn from_document(schema: &Schema, doc: &UtilityDocument) -> Result<Self> {
        let blocks = doc
            .blocks
            .iter()
            .map(|b| schema.dims().subset(b))
            .collect::<Result<Vec<_>>>()?;
        for key in doc.values.keys() {
            if key.parse::<usize>().map_or(true, |k| k >= blocks.len()) {
                return Err(Error::InvalidUtility(format!("`{key}` does not name a block")));
            }
        }
        let mut parsed: Vec<HashMap<String, BigRational>> = vec![HashMap::new(); blocks.len()];
        for (key, table) in &doc.values {
            let k: usize = key.parse().unwrap();
            for (label, v) in table {
                parsed[k].insert(label.clone(), value_to_rational(v)?);
            }
        }
        let u = AdditiveUtility::from_fn(schema, blocks, |k, x| {
            parsed[k].get(&schema.render_alternative(x).join(",")).cloned()
        })?;
        for (k, table) in parsed.iter().enumerate() {
            if table.len() != u.tables[k].len() {
                let space = ProductSpace::new(schema, u.blocks[k])?;
                let known: Vec<String> = space.iter().map(|x| schema.render_alternative(&x).join(",")).collect();
                let extra = table.keys().find(|l| !known.contains(l)).cloned().unwrap_or_default();
                return Err(Error::InvalidUtility(format!("block #{k} has a value for unknown `{extra}`")));
            }
        }
        Ok(u)
    }

    pub fn to_document(&self, schema: &Schema) -> UtilityDocument {
        let mut values = IndexMap::new();
        for (k, &b) in self.blocks.iter().enumerate() {
            let space = ProductSpace::new(schema, b).expect("validated at construction");
            let table = space
                .iter()
                .map(|x| {
                    (
                        schema.render_alternative(&x).join(","),
                        Value::String(self.tables[k][x.items()].to_string()),
                    )
                })
                .collect();
            values.insert(k.to_string(), table);
        }
        UtilityDocument {
            blocks: self.blocks.iter().map(|b| schema.dims().subset_labels(*b)).collect(),
            values,
        }
    }

    pub fn blocks(&self) -> &[DimSubset] {
        &self.blocks
    }

    /// `V_B(x_B)` for block `k`; `x` may have any scope containing the block.
    pub fn branch_value(&self, k: usize, x: &Alternative) -> Result<&BigRational> {
        let part = x.project(self.blocks[k])?;
        self.tables[k].get(part.items()).ok_or_else(|| Error::MissingBranchValue {
            block: k,
            key: format!("{:?}", part.items()),
        })
    }

    pub fn value(&self, x: &Alternative) -> Result<BigRational> {
        if x.scope() != DimSubset::full(self.n_dims) {
            return Err(Error::ScopeError("utility is evaluated on full alternatives".into()));
        }
        let mut total = BigRational::from_integer(0.into());
        for k in 0..self.blocks.len() {
            total += self.branch_value(k, x)?;
        }
        Ok(total)
    }

    /// `x ≿ y` iff `U(x) ≥ U(y)`.
    pub fn to_preference(&self, schema: &Schema) -> Result<PreferenceRelation> {
        let space = ProductSpace::new(schema, schema.full())?;
        let values = space.iter().map(|x| self.value(&x)).collect::<Result<Vec<_>>>()?;
        Ok(PreferenceRelation::from_fn(space, |i, j| values[i] >= values[j]))
    }

    /// Every `U`-maximizer in the menu, in lexicographic order.
    pub fn argmax(&self, menu: &Menu) -> Result<Vec<Alternative>> {
        let mut best: Option<BigRational> = None;
        let mut out = Vec::new();
        for x in menu.product() {
            let v = self.value(&x)?;
            match &best {
                Some(b) if v < *b => {}
                Some(b) if v == *b => out.push(x),
                _ => {
                    best = Some(v);
                    out = vec![x];
                }
            }
        }
        Ok(out)
    }
}

/// `c(A) = argmax_{x∈A} U(x)` with ties kept.
pub fn additive_choice(u: &AdditiveUtility, schema: &Schema, menus: &[Menu]) -> Result<JointChoiceDataset> {
    if u.n_dims != schema.n_dims() {
        return Err(Error::InvalidUtility(format!(
            "utility is over {} dimensions, menus over {}",
            u.n_dims,
            schema.n_dims()
        )));
    }
    let images = par::map(menus, |m| u.argmax(m));
    let entries = menus
        .iter()
        .cloned()
        .zip(images)
        .map(|(m, img)| Ok((m, img?)))
        .collect::<Result<Vec<_>>>()?;
    JointChoiceDataset::new(schema.clone(), entries)
}
