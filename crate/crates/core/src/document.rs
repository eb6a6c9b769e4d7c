//! JSON document formats: datasets, menu families, dimension-subset
//! families and preference relations. Utility and model documents live next
//! to the code that interprets them.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alternative, DimSubset, DimensionSet, ItemSet, JointChoiceDataset, Menu, Schema, Universe};

/// ```json
/// {"dimensions": ["1","2"],
///  "universes": {"1": ["a","b"], "2": ["x","y"]},
///  "menus": [{"sets": {"1": ["a","b"], "2": ["x"]}, "choice": [["a","x"]]}]}
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetDocument {
    pub dimensions: Vec<String>,
    pub universes: IndexMap<String, Vec<String>>,
    pub menus: Vec<MenuEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuEntry {
    pub sets: IndexMap<String, Vec<String>>,
    pub choice: Vec<Vec<String>>,
}

/// A menu family without choices, used as input to the generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuFamilyDocument {
    pub dimensions: Vec<String>,
    pub universes: IndexMap<String, Vec<String>>,
    pub menus: Vec<MenuSets>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MenuSets {
    pub sets: IndexMap<String, Vec<String>>,
}

/// `{"members": [["1","2","3"], ["1","4","5"]]}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub members: Vec<Vec<String>>,
}

/// `{"pairs": [[["a","x"],["b","y"]]]}`; the diagonal is implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreferenceDocument {
    pub pairs: Vec<[Vec<String>; 2]>,
}

pub fn parse_dataset(text: &str) -> Result<JointChoiceDataset> {
    let doc: DatasetDocument = serde_json::from_str(text)?;
    validate_dataset(&doc)
}

fn build_schema(dimensions: &[String], universes: &IndexMap<String, Vec<String>>) -> Result<Schema> {
    let dims = DimensionSet::new(dimensions.iter().cloned())?;
    if let Some(extra) = universes.keys().find(|k| dims.index_of(k).is_err()) {
        return Err(Error::UnknownDimension(extra.clone()));
    }
    let universes = dims
        .labels()
        .iter()
        .map(|d| {
            let items = universes.get(d).ok_or_else(|| Error::MissingUniverse(d.clone()))?;
            Universe::new(d, items.iter().cloned())
        })
        .collect::<Result<Vec<_>>>()?;
    Schema::new(dims, universes)
}

fn build_menu(schema: &Schema, index: usize, sets: &IndexMap<String, Vec<String>>) -> Result<Menu> {
    let dims = schema.dims();
    if let Some(extra) = sets.keys().find(|k| dims.index_of(k).is_err()) {
        return Err(Error::UnknownDimension(extra.clone()));
    }
    let mut out = Vec::with_capacity(dims.len());
    for (q, d) in dims.labels().iter().enumerate() {
        let labels = sets.get(d).ok_or_else(|| Error::MissingDimension {
            menu: index,
            dimension: d.clone(),
        })?;
        if labels.is_empty() {
            return Err(Error::EmptyMenuSet {
                menu: index,
                dimension: d.clone(),
            });
        }
        let mut set = ItemSet::EMPTY;
        for l in labels {
            let id = schema.universe(q).id_of(l).ok_or_else(|| Error::UnknownItem {
                dimension: d.clone(),
                item: l.clone(),
            })?;
            set.insert(id);
        }
        out.push(set);
    }
    Menu::new(schema.full(), out)
}

/// Checks every structural invariant of a parsed dataset document and
/// interns labels.
pub fn validate_dataset(doc: &DatasetDocument) -> Result<JointChoiceDataset> {
    let schema = build_schema(&doc.dimensions, &doc.universes)?;
    let full = schema.full();
    let mut entries = Vec::with_capacity(doc.menus.len());
    for (i, entry) in doc.menus.iter().enumerate() {
        let menu = build_menu(&schema, i, &entry.sets)?;
        if entry.choice.is_empty() {
            return Err(Error::EmptyChoice { menu: i });
        }
        let image = entry
            .choice
            .iter()
            .map(|t| schema.alternative(full, t))
            .collect::<Result<Vec<Alternative>>>()?;
        entries.push((menu, image));
    }
    let d = JointChoiceDataset::new(schema, entries)?;
    Ok(match &doc.provenance {
        Some(p) => d.with_provenance(p.clone()),
        None => d,
    })
}

fn render_sets(schema: &Schema, m: &Menu) -> IndexMap<String, Vec<String>> {
    schema.render_menu(m).into_iter().collect()
}

pub fn dataset_to_document(d: &JointChoiceDataset) -> DatasetDocument {
    let schema = d.schema();
    DatasetDocument {
        dimensions: schema.dims().labels().to_vec(),
        universes: schema
            .dims()
            .labels()
            .iter()
            .zip(schema.universes())
            .map(|(d, u)| (d.clone(), u.labels().to_vec()))
            .collect(),
        menus: d
            .entries()
            .map(|(m, c)| MenuEntry {
                sets: render_sets(schema, m),
                choice: c.iter().map(|x| schema.render_alternative(x)).collect(),
            })
            .collect(),
        provenance: d.provenance().cloned(),
    }
}

pub fn dataset_to_json(d: &JointChoiceDataset) -> String {
    serde_json::to_string_pretty(&dataset_to_document(d)).expect("dataset documents always serialize")
}

/// Parses a menu family document into its schema and menus.
pub fn parse_menu_family(text: &str) -> Result<(Schema, Vec<Menu>)> {
    let doc: MenuFamilyDocument = serde_json::from_str(text)?;
    let schema = build_schema(&doc.dimensions, &doc.universes)?;
    let mut menus = Vec::with_capacity(doc.menus.len());
    let mut seen = std::collections::HashMap::new();
    for (i, m) in doc.menus.iter().enumerate() {
        let menu = build_menu(&schema, i, &m.sets)?;
        if let Some(&first) = seen.get(&menu) {
            return Err(Error::DuplicateMenu { first, second: i });
        }
        seen.insert(menu.clone(), i);
        menus.push(menu);
    }
    Ok((schema, menus))
}

pub fn menu_family_to_document(schema: &Schema, menus: &[Menu]) -> MenuFamilyDocument {
    MenuFamilyDocument {
        dimensions: schema.dims().labels().to_vec(),
        universes: schema
            .dims()
            .labels()
            .iter()
            .zip(schema.universes())
            .map(|(d, u)| (d.clone(), u.labels().to_vec()))
            .collect(),
        menus: menus
            .iter()
            .map(|m| MenuSets {
                sets: render_sets(schema, m),
            })
            .collect(),
    }
}

impl FamilyDocument {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn resolve(&self, dims: &DimensionSet) -> Result<Vec<DimSubset>> {
        self.members.iter().map(|m| dims.subset(m)).collect()
    }

    pub fn from_subsets(dims: &DimensionSet, members: &[DimSubset]) -> Self {
        FamilyDocument {
            members: members.iter().map(|s| dims.subset_labels(*s)).collect(),
        }
    }
}
