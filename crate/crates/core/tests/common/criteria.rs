//! The acceptance criteria as data: each criterion is a list of named
//! checks, so the same code backs the per-topic tests and the acceptance
//! report.

use std::collections::BTreeSet;

use jointchoice::cli::run_with;
use jointchoice::document::{parse_menu_family, FamilyDocument};
use jointchoice::generators::{generate, ModelSpec};
use jointchoice::preferences::{
    additive_choice, is_rationalizable, is_s_rich, is_s_separable_preference, rationalizability_via_selective_family,
    rationalizability_via_selective_family_unguarded, revealed_choice, revealed_preference, AdditiveUtility,
    JointPreference,
};
use jointchoice::selective::{is_selective, minimal_selective_family, sel_size, SelectiveFamily, Selectivity};
use jointchoice::separability::{
    check_menus_betweenness, check_s_betweenness, is_s_separable, is_separable, is_separable_bruteforce,
    DEFAULT_LABELLING_CAP,
};
use jointchoice::{Alternative, DimSubset, Error, JointChoiceDataset, Schema, Witness};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

pub struct Check {
    pub name: String,
    pub outcome: Result<(), String>,
}

pub struct Criterion {
    pub id: usize,
    pub title: &'static str,
    pub checks: Vec<Check>,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.outcome.is_ok())
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.outcome.is_err()).collect()
    }

    /// Panics with every failed check listed.
    pub fn assert(&self) {
        let failed: Vec<String> = self
            .failures()
            .iter()
            .map(|c| format!("{}: {}", c.name, c.outcome.as_ref().unwrap_err()))
            .collect();
        assert!(failed.is_empty(), "criterion {} failed:\n{}", self.id, failed.join("\n"));
    }
}

fn check(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Check {
    Check {
        name: name.into(),
        outcome: if ok { Ok(()) } else { Err(detail()) },
    }
}

fn check_result(name: impl Into<String>, outcome: Result<(), String>) -> Check {
    Check {
        name: name.into(),
        outcome,
    }
}

fn sub(d: &JointChoiceDataset, labels: &[&str]) -> DimSubset {
    d.dims().subset(labels).unwrap()
}

fn holds(d: &JointChoiceDataset, labels: &[&str]) -> bool {
    is_s_separable(d, sub(d, labels)).unwrap().holds
}

/// Alternatives rendered as `(a,x)` strings.
pub fn rendered(schema: &Schema, xs: &[Alternative]) -> BTreeSet<String> {
    xs.iter().map(|x| schema.alternative_string(x)).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn generated(model: &str, menus: &str) -> JointChoiceDataset {
    let spec = ModelSpec::parse(&std::fs::read_to_string(data_path(model)).unwrap()).unwrap();
    let (schema, menus) = parse_menu_family(&std::fs::read_to_string(data_path(menus)).unwrap()).unwrap();
    generate(&spec, &schema, &menus, None).unwrap()
}

fn choice_at(d: &JointChoiceDataset, sets: &[&str]) -> BTreeSet<String> {
    let m = menu(d.schema(), sets);
    rendered(d.schema(), d.choice_of(&m).unwrap_or(&[]))
}

// ---------------------------------------------------------------------------
// 1. Golden examples

pub fn golden_examples() -> Criterion {
    let mut checks = Vec::new();

    // Consumption choices.
    let d = fixture("consumption.json");
    let r3 = is_s_separable(&d, sub(&d, &["3"])).unwrap();
    let induced: BTreeSet<(Vec<String>, BTreeSet<String>)> = r3
        .induced
        .as_ref()
        .map(|ind| {
            ind.entries()
                .iter()
                .map(|(m, c)| {
                    let items = d.schema().render_menu(m).remove(0).1;
                    let chosen = c.iter().map(|x| d.schema().render_alternative(x).concat()).collect();
                    (items, chosen)
                })
                .collect()
        })
        .unwrap_or_default();
    let expected: BTreeSet<(Vec<String>, BTreeSet<String>)> = [
        (vec!["milk".to_string(), "butter".to_string()], set(&["milk"])),
        (vec!["butter".to_string()], set(&["butter"])),
    ]
    .into_iter()
    .collect();
    checks.push(check("consumption: {3}-separable", r3.holds, || "fails".into()));
    checks.push(check("consumption: induced c_3", induced == expected, || format!("{induced:?}")));
    let r2 = is_s_separable(&d, sub(&d, &["2"])).unwrap();
    let witness_ok = match &r2.witness {
        Some(w @ Witness::Separability {
            menu_a: 0,
            menu_b: 1,
            image_a,
            image_b,
            ..
        }) => {
            rendered(d.schema(), image_a) == set(&["(tea)"])
                && rendered(d.schema(), image_b) == set(&["(coffee)"])
                && w.reproduces_on(&d)
        }
        _ => false,
    };
    checks.push(check("consumption: {2} fails at (A_Q, B_Q) with {tea} vs {coffee}", !r2.holds && witness_ok, || {
        format!("{:?}", r2.witness)
    }));

    // Separability is not inherited by supersets.
    let d = fixture("superset.json");
    checks.push(check("superset example: {1} fails", !holds(&d, &["1"]), || "holds".into()));
    checks.push(check("superset example: {2} holds", holds(&d, &["2"]), || "fails".into()));
    let r12 = is_s_separable(&d, sub(&d, &["1", "2"])).unwrap();
    checks.push(check("superset example: {1,2} holds", r12.holds, || {
        format!("decider finds a violation: {:?}", r12.witness.map(|w| w.to_json(d.schema(), d.menus())))
    }));
    checks.push(check("superset example: Q holds", holds(&d, &["1", "2", "3"]), || "fails".into()));

    // Intersection counterexample.
    let d = fixture("intersection.json");
    let bt = check_menus_betweenness(d.menus(), sub(&d, &["1", "2"]), sub(&d, &["2", "3"])).unwrap();
    checks.push(check(
        "intersection: betweenness for {1,2},{2,3} fails",
        !bt.holds && bt.witness.as_ref().is_some_and(|w| w.reproduces_on_menus(d.menus())),
        || format!("{bt:?}"),
    ));
    checks.push(check("intersection: {1,2}-separable", holds(&d, &["1", "2"]), || "fails".into()));
    checks.push(check("intersection: {2,3}-separable", holds(&d, &["2", "3"]), || "fails".into()));
    checks.push(check("intersection: {2} fails", !holds(&d, &["2"]), || "holds".into()));

    // Rationalizability and separability are independent.
    let c = fixture("independence_rational.json");
    let cp = fixture("independence_separable.json");
    let rc = is_rationalizable(&c).unwrap();
    checks.push(check("independence example: c rationalizable", rc.holds, || format!("{:?}", rc.witness)));
    let oc = is_separable(&c);
    checks.push(check(
        "independence example: c not separable",
        !oc.holds && oc.witness().is_some_and(|w| w.reproduces_on(&c)),
        || "separable".into(),
    ));
    checks.push(check("independence example: c′ separable", is_separable(&cp).holds, || "not separable".into()));
    let rcp = is_rationalizable(&cp).unwrap();
    let (menu_ok, maximal) = match &rcp.witness {
        Some(Witness::Rationalizability { menu, maximal, .. }) => (
            cp.schema().menu_string(&cp.menus()[*menu]) == "(ab,xy)",
            rendered(cp.schema(), maximal),
        ),
        _ => (false, BTreeSet::new()),
    };
    checks.push(check(
        "independence example: c′ not rationalizable, witness at (ab,xy)",
        !rcp.holds && menu_ok,
        || format!("{:?}", rcp.witness),
    ));
    let oracle = {
        let p = plain(&cp);
        let r = oracle_revealed(&p);
        let m = menu(cp.schema(), &["ab", "xy"]);
        let feasible: Vec<Vec<String>> = m.product().iter().map(|x| cp.schema().render_alternative(x)).collect();
        oracle_max(&r, &feasible)
            .into_iter()
            .map(|x| format!("({})", x.join(",")))
            .collect::<BTreeSet<_>>()
    };
    checks.push(check("independence example: c′ max-set at (ab,xy) matches the brute-force oracle", maximal == oracle, || {
        format!("{maximal:?} vs oracle {oracle:?}")
    }));
    let printed = set(&["(a,x)", "(a,y)", "(b,y)"]);
    checks.push(check(
        "independence example: c′ max-set at (ab,xy) is {(a,x),(a,y),(b,y)}",
        maximal == printed,
        || format!("computed {maximal:?}; the revealed relation has no strict pairs, so all four alternatives are maximal"),
    ));

    // Separability of choice vs separability of revealed preference.
    let d1 = fixture("transfer_rich.json");
    let s1 = sub(&d1, &["1"]);
    checks.push(check("transfer example, rich domain: {1}-separable", holds(&d1, &["1"]), || "fails".into()));
    checks.push(check("transfer example, rich domain: complete", d1.is_complete(), || "incomplete".into()));
    checks.push(check(
        "transfer example, rich domain: {1}-rich",
        is_s_rich(d1.schema(), d1.menus(), s1).unwrap().holds,
        || "not rich".into(),
    ));
    checks.push(check(
        "transfer example, rich domain: not rationalizable",
        !is_rationalizable(&d1).unwrap().holds,
        || "rationalizable".into(),
    ));
    let d2 = fixture("transfer_poor.json");
    let s2 = sub(&d2, &["2"]);
    checks.push(check(
        "transfer example, poor domain: rationalizable",
        is_rationalizable(&d2).unwrap().holds,
        || "not rationalizable".into(),
    ));
    checks.push(check("transfer example, poor domain: {2}-separable", holds(&d2, &["2"]), || "fails".into()));
    let rich = is_s_rich(d2.schema(), d2.menus(), s2).unwrap();
    checks.push(check(
        "transfer example, poor domain: not {2}-rich",
        !rich.holds && rich.witness.as_ref().is_some_and(|w| w.reproduces_on_menus(d2.menus())),
        || "rich".into(),
    ));
    let rev = revealed_preference(&d2).unwrap().relation;
    let ps = is_s_separable_preference(&rev, s2).unwrap();
    let sch = d2.schema();
    let strict_pairs = rev.strictly_prefers(&alt(sch, &["a", "x"]), &alt(sch, &["a", "y"]))
        && rev.strictly_prefers(&alt(sch, &["b", "y"]), &alt(sch, &["b", "x"]));
    checks.push(check(
        "transfer example, poor domain: revealed preference not {2}-separable, (a,x)≻(a,y) and (b,y)≻(b,x)",
        !ps.holds && strict_pairs && ps.witness.as_ref().is_some_and(|w| w.reproduces_on_relation(&rev)),
        || format!("{:?}", ps.witness),
    ));

    // Status quo bias.
    let d = generated("status_quo_model.json", "status_quo_menus.json");
    checks.push(check("status quo: c(xz,xy) = {(x,x)}", choice_at(&d, &["xz", "xy"]) == set(&["(x,x)"]), || {
        format!("{:?}", choice_at(&d, &["xz", "xy"]))
    }));
    checks.push(check("status quo: c(yz,xy) = {(y,y)}", choice_at(&d, &["yz", "xy"]) == set(&["(y,y)"]), || {
        format!("{:?}", choice_at(&d, &["yz", "xy"]))
    }));
    let r = is_s_separable(&d, sub(&d, &["2"])).unwrap();
    checks.push(check(
        "status quo: {2} fails",
        !r.holds && r.witness.as_ref().is_some_and(|w| w.reproduces_on(&d)),
        || "holds".into(),
    ));

    // Efficient and fair allocations.
    let e = generated("efficient_model.json", "allocation_menus.json");
    checks.push(check("allocation: c^E separable", is_separable(&e).holds, || "not separable".into()));
    let f = generated("envy_free_model.json", "allocation_menus.json");
    checks.push(check("allocation: c^F(ab,ab) = {(a,a)}", choice_at(&f, &["ab", "ab"]) == set(&["(a,a)"]), || {
        format!("{:?}", choice_at(&f, &["ab", "ab"]))
    }));
    checks.push(check("allocation: c^F(ab,b) = {(b,b)}", choice_at(&f, &["ab", "b"]) == set(&["(b,b)"]), || {
        format!("{:?}", choice_at(&f, &["ab", "b"]))
    }));
    let r = is_s_separable(&f, sub(&f, &["1"])).unwrap();
    checks.push(check(
        "allocation: c^F not {1}-separable",
        !r.holds && r.witness.as_ref().is_some_and(|w| w.reproduces_on(&f)),
        || "holds".into(),
    ));

    // Worked S-betweenness example.
    let d = fixture("worked_betweenness.json");
    let members = FamilyDocument::parse(&std::fs::read_to_string(data_path("family_triangle.json")).unwrap())
        .unwrap()
        .resolve(d.dims())
        .unwrap();
    let family = is_selective(&members, d.n_dims()).unwrap().into_family().unwrap();
    let sb = check_s_betweenness(d.menus(), &family, DEFAULT_LABELLING_CAP).unwrap();
    checks.push(check("worked S-betweenness example holds", sb.holds(), || format!("{sb:?}")));

    Criterion {
        id: 1,
        title: "golden examples",
        checks,
    }
}

// ---------------------------------------------------------------------------
// 2. Selective families

pub const SEL_TABLE: [usize; 10] = [1, 2, 3, 4, 4, 4, 5, 5, 5, 5];

pub fn selective_families() -> Criterion {
    let mut checks = Vec::new();
    let computed: Vec<usize> = (1..=10).map(sel_size).collect();
    checks.push(check("sel table for |Q| = 1..10", computed == SEL_TABLE, || format!("{computed:?}")));
    for n in 1..=12 {
        let outcome = minimal_selective_family(n).map_err(|e| e.to_string()).and_then(|f| {
            let bits: Vec<u64> = f.members().iter().map(|s| s.bits()).collect();
            if f.len() != sel_size(n) {
                Err(format!("size {} ≠ {}", f.len(), sel_size(n)))
            } else if !matches!(is_selective(f.members(), n), Ok(Selectivity::Selective(_))) {
                Err("is_selective rejects it".into())
            } else if !oracle_selective(&bits, n) {
                Err("the raw-mask oracle rejects it".into())
            } else {
                Ok(())
            }
        });
        checks.push(check_result(format!("minimal family for |Q| = {n}"), outcome));
    }
    for n in 1..=6 {
        let k = sel_size(n);
        checks.push(check(
            format!("no selective family of size {} for |Q| = {n}", k - 1),
            !some_selective_family_of_size(n, k - 1),
            || "found one".into(),
        ));
    }
    Criterion {
        id: 2,
        title: "selective family sizes and minimality",
        checks,
    }
}

// ---------------------------------------------------------------------------
// 3. Decider equivalence

fn deciders_agree(d: &JointChoiceDataset) -> Result<(), String> {
    let singletons = is_separable(d).holds;
    let brute = is_separable_bruteforce(d).map_err(|e| e.to_string())?;
    let oracle = oracle_separable(&plain(d));
    if singletons == brute && brute == oracle {
        Ok(())
    } else {
        Err(format!("singletons {singletons}, brute force {brute}, oracle {oracle}"))
    }
}

fn all_agree<'a>(datasets: impl IntoIterator<Item = (String, &'a JointChoiceDataset)>) -> Result<(), String> {
    let mut count = 0;
    for (name, d) in datasets {
        deciders_agree(d).map_err(|e| format!("{name}: {e}"))?;
        count += 1;
    }
    if count == 0 {
        return Err("no datasets".into());
    }
    Ok(())
}

pub fn decider_equivalence() -> Criterion {
    let goldens: Vec<(String, JointChoiceDataset)> =
        GOLDEN_DATASETS.iter().map(|n| (n.to_string(), fixture(n))).collect();
    let random: Vec<(String, JointChoiceDataset)> =
        (0..1000u64).map(|s| (format!("seed {s}"), random_dataset(s, 3, false))).collect();
    let complete = enumerate_complete(&letter_schema(&[2, 2]), true);
    let checks = vec![
        check_result("golden datasets", all_agree(goldens.iter().map(|(n, d)| (n.clone(), d)))),
        check_result("1000 seeded random datasets, |Q| ≤ 3", all_agree(random.iter().map(|(n, d)| (n.clone(), d)))),
        check_result(
            "all 64 complete single-valued choices on 2×2",
            if complete.len() == 64 {
                all_agree(complete.iter().enumerate().map(|(i, d)| (format!("#{i}"), d)))
            } else {
                Err(format!("enumerated {}", complete.len()))
            },
        ),
    ];
    Criterion {
        id: 3,
        title: "decider equivalence",
        checks,
    }
}

// ---------------------------------------------------------------------------
// 4. Structural properties

fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// A random additive utility: random partition of the dimensions into
/// blocks and values in `0..range` (small ranges produce ties).
pub fn random_additive(schema: &Schema, seed: u64, range: u64, singleton_blocks: bool) -> AdditiveUtility {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = schema.n_dims();
    let blocks: Vec<DimSubset> = if singleton_blocks {
        (0..n).map(DimSubset::singleton).collect()
    } else {
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        (0..n)
            .map(|b| DimSubset::from_indices((0..n).filter(|&q| labels[q] == b)))
            .filter(|s| !s.is_empty())
            .collect()
    };
    let salt: u64 = rng.gen();
    AdditiveUtility::from_fn(schema, blocks, |k, x| {
        let key = x
            .items()
            .iter()
            .fold(mix(salt ^ k as u64), |h, &i| mix(h ^ (i as u64 + 1)));
        Some(BigRational::from_integer(((key % range) as i64).into()))
    })
    .unwrap()
}

/// Unions of blocks (every nonempty combination).
pub fn block_unions(u: &AdditiveUtility) -> Vec<DimSubset> {
    let blocks = u.blocks();
    (1u32..(1 << blocks.len()))
        .map(|mask| {
            blocks
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .fold(DimSubset::EMPTY, |acc, (_, b)| acc.union(*b))
        })
        .collect()
}

/// A complete dataset on at most three dimensions of at most two items,
/// drawn from one of several families so that many subsets are separable.
pub fn random_complete_dataset(seed: u64) -> JointChoiceDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=2)).collect();
    let schema = letter_schema(&sizes);
    let menus = schema.complete_menus();
    match seed % 4 {
        0 => random_dataset_on(&schema, seed, false),
        1 => random_dataset_on(&schema, seed, true),
        2 => {
            let u = random_additive(&schema, seed, 3, false);
            additive_choice(&u, &schema, &menus).unwrap()
        }
        _ => {
            // Product of independent one-dimensional choice correspondences.
            let picks: Vec<std::collections::HashMap<u64, Vec<usize>>> = (0..n)
                .map(|q| {
                    (1u64..(1 << sizes[q]))
                        .map(|mask| {
                            let items: Vec<usize> = (0..sizes[q]).filter(|i| mask & (1 << i) != 0).collect();
                            let pick: Vec<usize> = loop {
                                let p: Vec<usize> = items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                                if !p.is_empty() {
                                    break p;
                                }
                            };
                            (mask, pick)
                        })
                        .collect()
                })
                .collect();
            let entries = menus
                .into_iter()
                .map(|m| {
                    let image = m
                        .product()
                        .into_iter()
                        .filter(|x| {
                            (0..n).all(|q| picks[q][&m.sets()[q].bits()].contains(&(x.items()[q] as usize)))
                        })
                        .collect();
                    (m, image)
                })
                .collect();
            JointChoiceDataset::new(schema, entries).unwrap()
        }
    }
}

fn random_dataset_on(schema: &Schema, seed: u64, single: bool) -> JointChoiceDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = schema
        .complete_menus()
        .into_iter()
        .map(|m| {
            let product = m.product();
            let image = if single {
                vec![product[rng.gen_range(0..product.len())].clone()]
            } else {
                loop {
                    let pick: Vec<_> = product.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
                    if !pick.is_empty() {
                        break pick;
                    }
                }
            };
            (m, image)
        })
        .collect();
    JointChoiceDataset::new(schema.clone(), entries).unwrap()
}

/// Union and intersection stability on a complete dataset, plus the
/// betweenness premise that completeness provides.
pub fn lattice_holds(d: &JointChoiceDataset) -> Result<(), String> {
    let subsets: Vec<DimSubset> = DimSubset::all_nonempty(d.n_dims()).collect();
    let separable: Vec<DimSubset> = subsets
        .iter()
        .copied()
        .filter(|&s| is_s_separable(d, s).unwrap().holds)
        .collect();
    let is_sep = |s: DimSubset| separable.contains(&s);
    for &s in &separable {
        for &t in &separable {
            if !is_sep(s.union(t)) {
                return Err(format!("{s:?} and {t:?} separable, union not"));
            }
            let meet = s.intersection(t);
            if meet.is_empty() {
                continue;
            }
            if !check_menus_betweenness(d.menus(), s, t).unwrap().holds {
                return Err(format!("complete domain lacks betweenness for {s:?}, {t:?}"));
            }
            if !is_sep(meet) {
                return Err(format!("{s:?} and {t:?} separable, intersection not"));
            }
        }
    }
    Ok(())
}

/// An additive preference is separable on every union of its blocks, and
/// its revealed choice is separable wherever the preference is.
pub fn preference_transfer_holds(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xadd);
    let n = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let schema = letter_schema(&sizes);
    let u = random_additive(&schema, seed, 4, false);
    let r = u.to_preference(&schema).unwrap();
    let mut menus = schema.complete_menus();
    if seed % 2 == 1 {
        menus.retain(|_| rng.gen_bool(0.4));
        if menus.is_empty() {
            menus = schema.complete_menus();
        }
    }
    let jp = JointPreference::new(r.clone()).map_err(|e| e.to_string())?;
    let c = revealed_choice(&jp, &schema, &menus).map_err(|e| e.to_string())?;
    for s in block_unions(&u) {
        if !is_s_separable_preference(&r, s).unwrap().holds {
            return Err(format!("additive preference not separable on block union {s:?}"));
        }
    }
    for s in DimSubset::all_nonempty(n) {
        if is_s_separable_preference(&r, s).unwrap().holds && !is_s_separable(&c, s).unwrap().holds {
            return Err(format!("preference {s:?}-separable but its revealed choice is not"));
        }
    }
    Ok(())
}

/// Additive argmax choices are separable blockwise, and fully separable
/// with singleton blocks.
pub fn additive_separable(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa11);
    let n = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let schema = letter_schema(&sizes);
    let mut menus = schema.complete_menus();
    if seed % 2 == 1 {
        menus.retain(|_| rng.gen_bool(0.3));
        if menus.is_empty() {
            menus = schema.complete_menus();
        }
    }
    let singles = random_additive(&schema, seed, 3, true);
    let c = additive_choice(&singles, &schema, &menus).unwrap();
    if !is_separable(&c).holds {
        return Err("singleton-block argmax not separable".into());
    }
    let blocks = random_additive(&schema, seed.wrapping_add(1), 3, false);
    let c = additive_choice(&blocks, &schema, &menus).unwrap();
    for s in block_unions(&blocks) {
        if !is_s_separable(&c, s).unwrap().holds {
            return Err(format!("argmax not separable on block union {s:?}"));
        }
    }
    Ok(())
}

/// On a complete 2×2 domain: separable, rationalizable and rich choices
/// reveal separable preferences. Returns how often the premise held.
pub fn revealed_transfer_exhaustive() -> Result<usize, String> {
    let schema = letter_schema(&[2, 2]);
    let all = enumerate_complete(&schema, false);
    if all.len() != 1215 {
        return Err(format!("enumerated {} correspondences", all.len()));
    }
    let mut premise = 0;
    for (i, d) in all.iter().enumerate() {
        let rational = is_rationalizable(d).unwrap();
        for q in 0..2 {
            let s = DimSubset::singleton(q);
            if !rational.holds || !is_s_separable(d, s).unwrap().holds {
                continue;
            }
            if !is_s_rich(&schema, d.menus(), s).unwrap().holds {
                return Err(format!("#{i}: complete domain not rich"));
            }
            premise += 1;
            if !is_s_separable_preference(&rational.revealed.relation, s).unwrap().holds {
                return Err(format!("#{i}: revealed preference not {s:?}-separable"));
            }
        }
    }
    Ok(premise)
}

fn over_seeds(count: u64, f: impl Fn(u64) -> Result<(), String>) -> Result<(), String> {
    (0..count).try_for_each(|s| f(s).map_err(|e| format!("seed {s}: {e}")))
}

pub fn structural_properties() -> Criterion {
    let checks = vec![
        check_result(
            "union/intersection stability and lattice on 400 random complete datasets",
            over_seeds(400, |s| lattice_holds(&random_complete_dataset(s))),
        ),
        check_result(
            "separable preference ⇒ separable revealed choice, 300 additive preferences",
            over_seeds(300, preference_transfer_holds),
        ),
        check_result(
            "separable + rationalizable + rich ⇒ separable revealed preference, all 1215 complete 2×2 correspondences",
            revealed_transfer_exhaustive().and_then(|n| if n > 0 { Ok(()) } else { Err("premise never held".into()) }),
        ),
        check_result("additive argmax choices are separable, 300 utilities", over_seeds(300, additive_separable)),
    ];
    Criterion {
        id: 4,
        title: "structural properties",
        checks,
    }
}

// ---------------------------------------------------------------------------
// 5. Rationalizability through selective families

pub fn shortcut_scope() -> Criterion {
    let schema = letter_schema(&[2, 2]);
    let singletons = SelectiveFamily::singletons(2);
    let mut checks = Vec::new();
    let separable: Vec<JointChoiceDataset> = enumerate_complete(&schema, true)
        .into_iter()
        .filter(|d| is_separable(d).holds)
        .collect();
    let agreement = (|| {
        if separable.is_empty() {
            return Err("no separable instances".to_string());
        }
        for (i, d) in separable.iter().enumerate() {
            let direct = is_rationalizable(d).unwrap().holds;
            let oracle = oracle_rationalizable(&plain(d));
            let via = rationalizability_via_selective_family(d, &singletons).map_err(|e| format!("#{i}: {e}"))?;
            if via.rationalizable != direct || via.direct != Some(direct) || via.mismatch || direct != oracle {
                return Err(format!(
                    "#{i}: shortcut {}, direct {direct}, oracle {oracle}",
                    via.rationalizable
                ));
            }
        }
        Ok(())
    })();
    checks.push(check_result(
        format!("shortcut agrees with the direct test on all {} separable single-valued 2×2 choices", separable.len()),
        agreement,
    ));
    let cp = fixture("independence_separable.json");
    let guarded = rationalizability_via_selective_family(&cp, &singletons);
    checks.push(check(
        "c′: guarded shortcut refuses multi-valued input",
        matches!(guarded, Err(Error::NotSingleValued)),
        || format!("{guarded:?}"),
    ));
    let naive = rationalizability_via_selective_family_unguarded(&cp, &singletons).unwrap();
    checks.push(check(
        "c′: unguarded shortcut disagrees with the direct test and flags it",
        naive.rationalizable && naive.direct == Some(false) && naive.mismatch,
        || format!("shortcut {}, direct {:?}, mismatch {}", naive.rationalizable, naive.direct, naive.mismatch),
    ));
    Criterion {
        id: 5,
        title: "rationalizability shortcut scope",
        checks,
    }
}

// ---------------------------------------------------------------------------
// 6. CLI conformance

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("jointchoice").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// The report with its timing block removed.
pub fn without_timing(report: &str) -> String {
    let mut value: serde_json::Value = serde_json::from_str(report).expect("report is JSON");
    value.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&value).unwrap()
}

fn cli_example(args: &[&str], code: i32, inspect: impl Fn(&serde_json::Value) -> bool) -> Result<(), String> {
    let (got, out, err) = run_cli(args);
    if got != code {
        return Err(format!("exit {got}, stderr {err}"));
    }
    let value: serde_json::Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    if !inspect(&value) {
        return Err(format!("unexpected report: {out}"));
    }
    let (again, out2, _) = run_cli(args);
    if again != got || without_timing(&out) != without_timing(&out2) {
        return Err("reports differ between runs".into());
    }
    let timing_free_raw = |s: &str| {
        s.lines()
            .filter(|l| !l.contains("elapsedMicros"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    if timing_free_raw(&out) != timing_free_raw(&out2) {
        return Err("raw report bytes differ outside timing".into());
    }
    Ok(())
}

pub fn cli_conformance() -> Criterion {
    let cprime = data_path("independence_separable.json");
    let cprime = cprime.to_str().unwrap();
    let checks = vec![
        check_result(
            "separability c′ --all-singletons → exit 0, holds",
            cli_example(&["separability", cprime, "--all-singletons"], 0, |v| {
                v["verdict"] == "holds" && v["result"]["holds"] == true
            }),
        ),
        check_result(
            "rationalizable c′ → exit 1, witness menu (ab,xy)",
            cli_example(&["rationalizable", cprime], 1, |v| {
                v["verdict"] == "fails"
                    && v["result"]["witness"]["kind"] == "rationalizability-violation"
                    && v["result"]["witness"]["menu"]["display"] == "(ab,xy)"
            }),
        ),
        check_result(
            "selective --dims 10 → exit 0, five members",
            cli_example(&["selective", "--dims", "10"], 0, |v| {
                v["result"]["members"].as_array().is_some_and(|m| m.len() == 5)
            }),
        ),
    ];
    Criterion {
        id: 6,
        title: "CLI conformance",
        checks,
    }
}

pub fn all() -> Vec<Criterion> {
    vec![
        golden_examples(),
        selective_families(),
        decider_equivalence(),
        structural_properties(),
        shortcut_scope(),
        cli_conformance(),
    ]
}
