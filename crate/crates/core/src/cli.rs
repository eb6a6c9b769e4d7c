//! Command-line front end. Every verb prints one JSON report on standard
//! output (`generate` prints the generated dataset instead) and exits with
//! 0 when the property holds, 1 when it fails, 2 when the result is
//! inconclusive and 3 on input errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::document::{dataset_to_json, parse_dataset, parse_menu_family, FamilyDocument};
use crate::error::Error;
use crate::generators::{generate, ModelSpec};
use crate::model::{Alternative, DimSubset, DimensionSet, JointChoiceDataset, Menu, Schema};
use crate::preferences::{
    is_rationalizable, is_s_rich, rationalizability_via_selective_family, revealed_preference,
};
use crate::selective::{is_selective, minimal_selective_family, sel_size, SelectiveFamily, Selectivity};
use crate::separability::{
    check_menus_betweenness, check_s_betweenness, is_s_separable, is_separable, is_separable_bruteforce,
    separability_via_selective_family_capped, FamilyVerdict, Inconclusive, InducedChoice, SBetweenness,
    SeparabilityReport, DEFAULT_LABELLING_CAP,
};
use crate::witness::{menu_json, Witness};

#[derive(Parser, Debug)]
#[command(name = "jointchoice", version, about = "Separability and rationalizability checks for joint choice data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a dataset document for structural errors.
    Validate { dataset: PathBuf },
    /// Decide separability (all singletons by default).
    #[command(group(ArgGroup::new("mode").args(["set", "all_singletons", "brute", "family"])))]
    Separability {
        dataset: PathBuf,
        /// Comma-separated dimension labels.
        #[arg(long)]
        set: Option<String>,
        #[arg(long)]
        all_singletons: bool,
        /// Check every nonempty subset of dimensions.
        #[arg(long)]
        brute: bool,
        /// Selective family document; the test can only confirm separability.
        #[arg(long)]
        family: Option<PathBuf>,
        /// Labellings tried per dimension with --family.
        #[arg(long, default_value_t = DEFAULT_LABELLING_CAP)]
        cap: usize,
    },
    /// Print the joint choice induced on a subset of dimensions.
    Induced {
        dataset: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Menus betweenness for a pair of subsets, or chained over a family.
    #[command(group(ArgGroup::new("mode").required(true).args(["s", "family"])))]
    Betweenness {
        dataset: PathBuf,
        #[arg(long = "s", requires = "t")]
        s: Option<String>,
        #[arg(long = "t", requires = "s")]
        t: Option<String>,
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_LABELLING_CAP)]
        cap: usize,
    },
    /// Richness of the dataset's menu family for a subset of dimensions.
    Richness {
        dataset: PathBuf,
        #[arg(long)]
        set: String,
    },
    /// Build a minimum-size selective family, or verify one.
    Selective {
        #[arg(long)]
        dims: usize,
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Revealed preference and its acyclicity.
    Reveal { dataset: PathBuf },
    /// Rationalizability, directly or through a selective family.
    Rationalizable {
        dataset: PathBuf,
        #[arg(long)]
        family: Option<PathBuf>,
    },
    /// Generate a dataset from a behavioral model.
    Generate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        menus: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

impl Command {
    fn verb(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Separability { .. } => "separability",
            Command::Induced { .. } => "induced",
            Command::Betweenness { .. } => "betweenness",
            Command::Richness { .. } => "richness",
            Command::Selective { .. } => "selective",
            Command::Reveal { .. } => "reveal",
            Command::Rationalizable { .. } => "rationalizable",
            Command::Generate { .. } => "generate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

impl Verdict {
    fn from_bool(holds: bool) -> Self {
        if holds {
            Verdict::Holds
        } else {
            Verdict::Fails
        }
    }

    fn exit_code(self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails => 1,
            Verdict::Inconclusive => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

struct Outcome {
    basis: &'static str,
    verdict: Verdict,
    result: Value,
}

enum Output {
    Report(Outcome),
    Document(String),
}

/// Reads input files and remembers their digests for the report.
#[derive(Default)]
struct Inputs {
    digests: Vec<(String, String)>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        self.digests
            .push((path.display().to_string(), hex::encode(Sha256::digest(&bytes))));
        String::from_utf8(bytes).map_err(|_| format!("{} is not UTF-8", path.display()))
    }

    fn dataset(&mut self, path: &Path) -> Result<JointChoiceDataset, String> {
        let text = self.read(path)?;
        parse_dataset(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    fn family(&mut self, path: &Path, dims: &DimensionSet) -> Result<Vec<DimSubset>, String> {
        let text = self.read(path)?;
        FamilyDocument::parse(&text)
            .and_then(|doc| doc.resolve(dims))
            .map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn input_error(e: Error) -> String {
    e.to_string()
}

fn parse_subset(dims: &DimensionSet, text: &str) -> Result<DimSubset, String> {
    let labels: Vec<&str> = text.split(',').map(str::trim).filter(|l| !l.is_empty()).collect();
    if labels.is_empty() {
        return Err(Error::EmptySubset.to_string());
    }
    dims.subset(&labels).map_err(input_error)
}

fn labels(schema: &Schema, s: DimSubset) -> Value {
    json!(schema.dims().subset_labels(s))
}

fn alternatives_json(schema: &Schema, xs: &[Alternative]) -> Value {
    Value::Array(xs.iter().map(|x| json!(schema.render_alternative(x))).collect())
}

fn induced_json(schema: &Schema, induced: &InducedChoice) -> Value {
    Value::Array(
        induced
            .entries()
            .iter()
            .map(|(m, c)| json!({"menu": menu_json(schema, m, None), "choice": alternatives_json(schema, c)}))
            .collect(),
    )
}

fn separability_json(schema: &Schema, menus: &[Menu], r: &SeparabilityReport) -> Value {
    let mut out = Map::new();
    out.insert("subset".into(), labels(schema, r.subset));
    out.insert("holds".into(), json!(r.holds));
    if let Some(induced) = &r.induced {
        out.insert("induced".into(), induced_json(schema, induced));
    }
    if let Some(w) = &r.witness {
        out.insert("witness".into(), w.to_json(schema, menus));
    }
    Value::Object(out)
}

fn selective_family(members: &[DimSubset], n: usize) -> Result<Result<SelectiveFamily, Witness>, String> {
    match is_selective(members, n).map_err(input_error)? {
        Selectivity::Selective(f) => Ok(Ok(f)),
        Selectivity::NotSelective(w) => Ok(Err(w)),
    }
}

fn family_json(schema: &Schema, members: &[DimSubset]) -> Value {
    Value::Array(members.iter().map(|s| labels(schema, *s)).collect())
}

fn not_selective(schema: &Schema, w: &Witness, basis: &'static str) -> Outcome {
    Outcome {
        basis,
        verdict: Verdict::Inconclusive,
        result: json!({"reason": "family is not selective", "witness": w.to_json(schema, &[])}),
    }
}

fn separability(
    inputs: &mut Inputs,
    dataset: &Path,
    set: Option<&str>,
    brute: bool,
    family: Option<&Path>,
    cap: usize,
) -> Result<Outcome, String> {
    let d = inputs.dataset(dataset)?;
    let schema = d.schema();
    if let Some(text) = set {
        let s = parse_subset(d.dims(), text)?;
        let r = is_s_separable(&d, s).map_err(input_error)?;
        return Ok(Outcome {
            basis: "projection-class grouping",
            verdict: Verdict::from_bool(r.holds),
            result: separability_json(schema, d.menus(), &r),
        });
    }
    if brute {
        let holds = is_separable_bruteforce(&d).map_err(input_error)?;
        let mut result = Map::new();
        result.insert("subsetsChecked".into(), json!((1u64 << d.n_dims()) - 1));
        result.insert("holds".into(), json!(holds));
        if !holds {
            let failing = DimSubset::all_nonempty(d.n_dims())
                .map(|s| is_s_separable(&d, s).expect("valid subset"))
                .find(|r| !r.holds)
                .expect("a failing subset exists");
            result.insert("firstFailing".into(), separability_json(schema, d.menus(), &failing));
        }
        return Ok(Outcome {
            basis: "exhaustive subset enumeration",
            verdict: Verdict::from_bool(holds),
            result: Value::Object(result),
        });
    }
    if let Some(path) = family {
        let members = inputs.family(path, d.dims())?;
        let basis = "selective-family sufficient condition";
        let family = match selective_family(&members, d.n_dims())? {
            Ok(f) => f,
            Err(w) => return Ok(not_selective(schema, &w, basis)),
        };
        let verdict = separability_via_selective_family_capped(&d, &family, cap).map_err(input_error)?;
        return Ok(match verdict {
            FamilyVerdict::Separable { labellings, members } => Outcome {
                basis,
                verdict: Verdict::Holds,
                result: json!({
                    "family": family_json(schema, family.members()),
                    "labellings": labellings_json(schema, &family, &labellings),
                    "members": members.iter().map(|r| separability_json(schema, d.menus(), r)).collect::<Vec<_>>(),
                }),
            },
            FamilyVerdict::Inconclusive(why) => Outcome {
                basis,
                verdict: Verdict::Inconclusive,
                result: inconclusive_json(schema, d.menus(), &why),
            },
        });
    }
    let overview = is_separable(&d);
    Ok(Outcome {
        basis: "singleton decomposition: separable iff {q}-separable for every dimension",
        verdict: Verdict::from_bool(overview.holds),
        result: json!({
            "holds": overview.holds,
            "perDimension": overview
                .per_dimension
                .iter()
                .map(|r| separability_json(schema, d.menus(), r))
                .collect::<Vec<_>>(),
        }),
    })
}

fn labellings_json(schema: &Schema, family: &SelectiveFamily, labellings: &[crate::separability::Labelling]) -> Value {
    let mut out = Map::new();
    for l in labellings {
        out.insert(
            schema.dims().label(l.dimension).to_string(),
            Value::Array(l.order.iter().map(|&i| labels(schema, family.members()[i])).collect()),
        );
    }
    Value::Object(out)
}

fn inconclusive_json(schema: &Schema, menus: &[Menu], why: &Inconclusive) -> Value {
    match why {
        Inconclusive::BetweennessFails { dimension, witness } => json!({
            "reason": "no labelling satisfies menus betweenness",
            "dimension": schema.dims().label(*dimension),
            "witness": witness.to_json(schema, menus),
        }),
        Inconclusive::LabellingCapExceeded { dimension, labellings } => json!({
            "reason": "labelling search exceeds the cap",
            "dimension": schema.dims().label(*dimension),
            "labellings": labellings.to_string(),
        }),
        Inconclusive::MemberNotSeparable { member, witness } => json!({
            "reason": "a family member is not separable",
            "member": labels(schema, *member),
            "witness": witness.to_json(schema, menus),
        }),
    }
}

fn betweenness(
    inputs: &mut Inputs,
    dataset: &Path,
    s: Option<&str>,
    t: Option<&str>,
    family: Option<&Path>,
    cap: usize,
) -> Result<Outcome, String> {
    let d = inputs.dataset(dataset)?;
    let schema = d.schema();
    if let (Some(s), Some(t)) = (s, t) {
        let s = parse_subset(d.dims(), s)?;
        let t = parse_subset(d.dims(), t)?;
        let r = check_menus_betweenness(d.menus(), s, t).map_err(input_error)?;
        let mut result = Map::new();
        result.insert("s".into(), labels(schema, s));
        result.insert("t".into(), labels(schema, t));
        result.insert("holds".into(), json!(r.holds));
        result.insert("disjointConvention".into(), json!(r.disjoint_convention));
        if let Some(w) = &r.witness {
            result.insert("witness".into(), w.to_json(schema, d.menus()));
        }
        return Ok(Outcome {
            basis: "menus betweenness over unordered menu pairs",
            verdict: Verdict::from_bool(r.holds),
            result: Value::Object(result),
        });
    }
    let path = family.ok_or("betweenness needs --s and --t, or --family")?;
    let members = inputs.family(path, d.dims())?;
    let basis = "chained menus betweenness over a selective family";
    let family = match selective_family(&members, d.n_dims())? {
        Ok(f) => f,
        Err(w) => return Ok(not_selective(schema, &w, basis)),
    };
    Ok(match check_s_betweenness(d.menus(), &family, cap).map_err(input_error)? {
        SBetweenness::Holds(l) => Outcome {
            basis,
            verdict: Verdict::Holds,
            result: json!({"holds": true, "labellings": labellings_json(schema, &family, &l)}),
        },
        SBetweenness::Fails { dimension, witness } => Outcome {
            basis,
            verdict: Verdict::Fails,
            result: json!({
                "holds": false,
                "dimension": schema.dims().label(dimension),
                "witness": witness.to_json(schema, d.menus()),
            }),
        },
        SBetweenness::Inconclusive { dimension, labellings } => Outcome {
            basis,
            verdict: Verdict::Inconclusive,
            result: json!({
                "reason": "labelling search exceeds the cap",
                "dimension": schema.dims().label(dimension),
                "labellings": labellings.to_string(),
            }),
        },
    })
}

fn rationalizable(inputs: &mut Inputs, dataset: &Path, family: Option<&Path>) -> Result<Outcome, String> {
    let d = inputs.dataset(dataset)?;
    let schema = d.schema();
    let Some(path) = family else {
        let r = is_rationalizable(&d).map_err(input_error)?;
        let mut result = Map::new();
        result.insert("holds".into(), json!(r.holds));
        result.insert("revealedAcyclic".into(), json!(r.revealed.acyclic));
        if let Some(w) = &r.witness {
            result.insert("witness".into(), w.to_json(schema, d.menus()));
        }
        return Ok(Outcome {
            basis: "choice equals the maximal set of the revealed preference at every menu",
            verdict: Verdict::from_bool(r.holds),
            result: Value::Object(result),
        });
    };
    let members = inputs.family(path, d.dims())?;
    let basis = "induced choices on a selective family (single-valued separable data)";
    let family = match selective_family(&members, d.n_dims())? {
        Ok(f) => f,
        Err(w) => return Ok(not_selective(schema, &w, basis)),
    };
    let r = match rationalizability_via_selective_family(&d, &family) {
        Ok(r) => r,
        Err(e @ (Error::NotSingleValued | Error::NotSeparable { .. })) => {
            return Ok(Outcome {
                basis,
                verdict: Verdict::Inconclusive,
                result: json!({"reason": e.to_string()}),
            })
        }
        Err(e) => return Err(input_error(e)),
    };
    let members: Vec<Value> = r
        .members
        .iter()
        .map(|m| {
            let mut out = Map::new();
            out.insert("subset".into(), labels(schema, m.subset));
            out.insert("holds".into(), json!(m.holds));
            if let Some(w) = &m.witness {
                out.insert("witness".into(), w.to_json(m.induced.schema(), m.induced.menus()));
            }
            Value::Object(out)
        })
        .collect();
    let verdict = if r.mismatch {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(r.rationalizable)
    };
    Ok(Outcome {
        basis,
        verdict,
        result: json!({
            "holds": r.rationalizable,
            "members": members,
            "direct": r.direct,
            "mismatch": r.mismatch,
        }),
    })
}

fn dispatch(command: &Command, inputs: &mut Inputs) -> Result<Output, String> {
    let outcome = match command {
        Command::Validate { dataset } => {
            let d = inputs.dataset(dataset)?;
            Outcome {
                basis: "structural validation",
                verdict: Verdict::Holds,
                result: json!({
                    "dimensions": d.dims().labels(),
                    "menus": d.len(),
                    "singleValued": d.is_single_valued(),
                    "complete": d.is_complete(),
                }),
            }
        }
        Command::Separability {
            dataset,
            set,
            all_singletons: _,
            brute,
            family,
            cap,
        } => separability(inputs, dataset, set.as_deref(), *brute, family.as_deref(), *cap)?,
        Command::Induced { dataset, set } => {
            let d = inputs.dataset(dataset)?;
            let s = parse_subset(d.dims(), set)?;
            let r = is_s_separable(&d, s).map_err(input_error)?;
            Outcome {
                basis: "projection-class grouping",
                verdict: Verdict::from_bool(r.holds),
                result: separability_json(d.schema(), d.menus(), &r),
            }
        }
        Command::Betweenness {
            dataset,
            s,
            t,
            family,
            cap,
        } => betweenness(inputs, dataset, s.as_deref(), t.as_deref(), family.as_deref(), *cap)?,
        Command::Richness { dataset, set } => {
            let d = inputs.dataset(dataset)?;
            let s = parse_subset(d.dims(), set)?;
            let r = is_s_rich(d.schema(), d.menus(), s).map_err(input_error)?;
            let mut result = Map::new();
            result.insert("subset".into(), labels(d.schema(), s));
            result.insert("holds".into(), json!(r.holds));
            result.insert(
                "missing".into(),
                Value::Array(r.missing.iter().map(|m| menu_json(d.schema(), m, None)).collect()),
            );
            if let Some(w) = &r.witness {
                result.insert("witness".into(), w.to_json(d.schema(), d.menus()));
            }
            Outcome {
                basis: "richness: every box menu spanned by two co-occurring alternatives is present",
                verdict: Verdict::from_bool(r.holds),
                result: Value::Object(result),
            }
        }
        Command::Selective { dims, verify } => {
            let dimset = DimensionSet::numbered(*dims).map_err(input_error)?;
            let schema_labels = |s: &DimSubset| json!(dimset.subset_labels(*s));
            match verify {
                None => {
                    let f = minimal_selective_family(*dims).map_err(input_error)?;
                    Outcome {
                        basis: "minimum size is the least n with C(n, floor(n/2)) >= |Q|",
                        verdict: Verdict::Holds,
                        result: json!({
                            "dimensions": dims,
                            "size": sel_size(*dims),
                            "members": f.members().iter().map(schema_labels).collect::<Vec<_>>(),
                        }),
                    }
                }
                Some(path) => {
                    let members = inputs.family(path, &dimset)?;
                    let basis = "each dimension is the intersection of the members containing it";
                    match is_selective(&members, *dims).map_err(input_error)? {
                        Selectivity::Selective(f) => {
                            let mut index_sets = Map::new();
                            for q in 0..*dims {
                                index_sets.insert(
                                    dimset.label(q).to_string(),
                                    json!(f.index_sets(q).expect("dimension in range")),
                                );
                            }
                            Outcome {
                                basis,
                                verdict: Verdict::Holds,
                                result: json!({"holds": true, "indexSets": index_sets}),
                            }
                        }
                        Selectivity::NotSelective(w) => {
                            let mut out = Map::new();
                            out.insert("holds".into(), json!(false));
                            if let Witness::Selectivity { dimension, intersection } = &w {
                                out.insert(
                                    "witness".into(),
                                    json!({
                                        "kind": w.kind().as_str(),
                                        "dimension": dimset.label(*dimension),
                                        "intersection": intersection.as_ref().map(schema_labels),
                                    }),
                                );
                            }
                            Outcome {
                                basis,
                                verdict: Verdict::Fails,
                                result: Value::Object(out),
                            }
                        }
                    }
                }
            }
        }
        Command::Reveal { dataset } => {
            let d = inputs.dataset(dataset)?;
            let revealed = revealed_preference(&d).map_err(input_error)?;
            let mut result = Map::new();
            result.insert("acyclic".into(), json!(revealed.acyclic));
            result.insert(
                "pairs".into(),
                serde_json::to_value(revealed.relation.to_document(d.schema()).pairs).expect("pairs serialize"),
            );
            if let Some(w) = &revealed.cycle {
                result.insert("witness".into(), w.to_json(d.schema(), d.menus()));
            }
            Outcome {
                basis: "revealed preference: x over y when x is chosen from a menu offering y",
                verdict: Verdict::from_bool(revealed.acyclic),
                result: Value::Object(result),
            }
        }
        Command::Rationalizable { dataset, family } => rationalizable(inputs, dataset, family.as_deref())?,
        Command::Generate { model, menus, seed } => {
            let spec = ModelSpec::parse(&inputs.read(model)?).map_err(|e| format!("{}: {e}", model.display()))?;
            let (schema, menus_list) =
                parse_menu_family(&inputs.read(menus)?).map_err(|e| format!("{}: {e}", menus.display()))?;
            let d = generate(&spec, &schema, &menus_list, *seed).map_err(input_error)?;
            return Ok(Output::Document(dataset_to_json(&d)));
        }
    };
    Ok(Output::Report(outcome))
}

fn render(verb: &str, inputs: &Inputs, outcome: &Outcome, elapsed_micros: u128) -> String {
    let mut report = Map::new();
    report.insert("verb".into(), json!(verb));
    report.insert(
        "inputs".into(),
        Value::Array(
            inputs
                .digests
                .iter()
                .map(|(path, sha)| json!({"path": path, "sha256": sha}))
                .collect(),
        ),
    );
    report.insert("basis".into(), json!(outcome.basis));
    report.insert("verdict".into(), json!(outcome.verdict.as_str()));
    report.insert("exitCode".into(), json!(outcome.verdict.exit_code()));
    report.insert("result".into(), outcome.result.clone());
    report.insert("timing".into(), json!({"elapsedMicros": elapsed_micros as u64}));
    serde_json::to_string_pretty(&Value::Object(report)).expect("reports serialize")
}

/// Runs one invocation, writing the report to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(err, "{}", line.trim());
            return 3;
        }
    };
    let start = Instant::now();
    let mut inputs = Inputs::default();
    match dispatch(&cli.command, &mut inputs) {
        Ok(Output::Report(outcome)) => {
            let text = render(cli.command.verb(), &inputs, &outcome, start.elapsed().as_micros());
            let _ = writeln!(out, "{text}");
            outcome.verdict.exit_code()
        }
        Ok(Output::Document(text)) => {
            let _ = writeln!(out, "{text}");
            0
        }
        Err(message) => {
            let _ = writeln!(err, "error: {}", message.replace('\n', " "));
            3
        }
    }
}

/// Runs with the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
