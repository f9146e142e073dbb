use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use sclgap_core::chain::{chain_gap_certificate, element_gap, normalize_chain};
use sclgap_core::hyperbolic::{
    delta_bound, enumerate_trace_minimum, epsilon_window, optimized_constant, trace_bound, verify_trace_gap, von_dyck_gap_constant,
    TraceGapReport, DEFAULT_TOL,
};
use sclgap_core::oracle::{brute_defect, conjugator_search, enumerate_words, DefectOptions, EnumerationPlan, WordFilter};
use sclgap_core::orbifold::{euler_char_orbifold, fundamental_group, relative_gap_certificate};
use sclgap_core::splitting::{closed_presentation_group, closed_splitting, Classification, NormalForm, Side, SplittingKind};
use sclgap_core::text::{format_chain, format_orbifold, parse_chain, parse_group, parse_orbifold, parse_word, ParseError};
use sclgap_core::rational::{fmt_q, int};
use sclgap_core::{Chain, CountingQm, Error, GroupSpec, QmCombination, Q};
use num_traits::Zero;

use crate::json::{self, rational, real, word, Document};

#[derive(Parser, Debug)]
#[command(name = "sclgap", version, about = "Certified lower bounds for stable commutator length")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Add wall-clock timing to the output.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduce a word and report its conjugacy data.
    Reduce {
        #[arg(long)]
        group: String,
        word: String,
    },
    /// Counting quasimorphisms.
    #[command(subcommand)]
    Qm(QmCommand),
    /// Gap certificates in free products of cyclic groups.
    #[command(subcommand)]
    Gap(GapCommand),
    /// Orbifold groups.
    #[command(subcommand)]
    Orb(OrbCommand),
    /// Von Dyck group numerics.
    #[command(subcommand)]
    Vondyck(VondyckCommand),
    /// Brute-force checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
}

#[derive(Subcommand, Debug)]
pub enum QmCommand {
    /// Evaluate a combination of homogenized counting quasimorphisms.
    Eval {
        #[arg(long)]
        group: String,
        /// Combination written as a chain of bases, e.g. "[a b] - 1/2[a b^2]".
        #[arg(long)]
        qm: String,
        /// A word, or a chain in brackets.
        target: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum GapCommand {
    Chain {
        #[arg(long)]
        group: String,
        chain: String,
    },
    Element {
        #[arg(long)]
        group: String,
        word: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum OrbCommand {
    /// Presentation of the orbifold group.
    Group {
        #[arg(long)]
        spec: String,
    },
    /// Gap relative to the boundary.
    RelGap {
        #[arg(long)]
        spec: String,
        word: String,
    },
    /// Gap in a closed orbifold group.
    ClosedGap {
        #[arg(long)]
        spec: String,
        word: String,
    },
    /// Splitting over Z of a closed orbifold group.
    Splitting {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum VondyckCommand {
    /// Sample words and check the trace gap.
    Verify {
        #[arg(long, default_value = "2,3,7")]
        pqr: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        maxlen: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Also enumerate every word up to this many syllables.
        #[arg(long)]
        enumerate: Option<usize>,
    },
    /// The translation length bound, the epsilon window and the gap constant.
    Constant {
        /// Evaluate the constant at this epsilon instead of the optimum.
        #[arg(long)]
        eps: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    All,
    CyclicallyReduced,
    Eligible,
}

#[derive(Subcommand, Debug)]
pub enum OracleCommand {
    /// Exhaustive defect of a counting quasimorphism.
    Defect {
        #[arg(long)]
        group: String,
        #[arg(long)]
        base: String,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        #[arg(long, env = "SCLGAP_JOBS")]
        jobs: Option<usize>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Search for a conjugator in a ball.
    Conj {
        #[arg(long)]
        group: String,
        w1: String,
        w2: String,
        #[arg(long, default_value_t = 6)]
        ball: usize,
    },
    /// List words in length then letter order.
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        maxlen: usize,
        #[arg(long, value_enum, default_value_t = FilterArg::All)]
        filter: FilterArg,
    },
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Domain(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Domain(m) => m,
        }
    }
}

fn pe(what: &str) -> impl Fn(ParseError) -> CliError + '_ {
    move |e| CliError::Parse(format!("{what}: {e}"))
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn inputs(pairs: &[(&str, Value)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn group_arg(s: &str) -> Result<GroupSpec, CliError> {
    parse_group(s).map_err(pe("group"))
}

pub fn execute(cli: &Cli) -> Result<Document, CliError> {
    let start = Instant::now();
    let mut doc = dispatch(&cli.command)?;
    if cli.timing {
        doc.timing = Some(json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1000.0 }));
    }
    Ok(doc)
}

fn dispatch(cmd: &Command) -> Result<Document, CliError> {
    match cmd {
        Command::Reduce { group, word: w } => {
            let g = group_arg(group)?;
            let w = parse_word(w, &g).map_err(pe("word"))?;
            let core = g.cyclic_reduce(&w);
            let mut result = Map::new();
            result.insert("reduced".into(), word(&g, &w));
            result.insert("length".into(), json!(w.len()));
            result.insert("cyclic_core".into(), word(&g, core.core.base()));
            result.insert("cyclic_conjugator".into(), word(&g, &core.conjugator));
            result.insert("conjugacy_key".into(), word(&g, &g.conjugacy_key(&w)));
            result.insert("finite_order".into(), json!(g.has_finite_order(&w)));
            result.insert("conjugate_to_inverse".into(), json!(g.is_conjugate_to_inverse(&w)));
            if !g.has_finite_order(&w) {
                let (root, k) = g.primitive_root(&w)?;
                result.insert("primitive_root".into(), word(&g, &root));
                result.insert("power".into(), json!(k));
            }
            Ok(Document {
                command: "reduce".into(),
                inputs: inputs(&[("group", json!(g.to_string())), ("word", json!(w_text(&g, &w)))]),
                result: Value::Object(result),
                timing: None,
            })
        }
        Command::Qm(QmCommand::Eval { group, qm, target }) => {
            let g = group_arg(group)?;
            let spec = parse_chain(qm, &g).map_err(pe("qm"))?;
            let mut terms = Vec::new();
            for (c, b) in spec.terms() {
                terms.push((c.clone(), CountingQm::new(&g, b.clone())?));
            }
            let combo = QmCombination::new(terms)?;
            let chain = if target.contains('[') {
                parse_chain(target, &g).map_err(pe("target"))?
            } else {
                Chain::single(parse_word(target, &g).map_err(pe("target"))?)
            };
            let mut result = Map::new();
            result.insert("value".into(), rational(&combo.evaluate_on_chain(&chain)));
            result.insert("defect_bound".into(), rational(&combo.defect_bound()));
            result.insert("witness".into(), json::witness(&combo));
            if !target.contains('[') {
                let w = parse_word(target, &g).map_err(pe("target"))?;
                let phi = combo.terms().iter().fold(Q::zero(), |acc, (c, q)| acc + c * int(q.phi(&w)));
                result.insert("phi".into(), rational(&phi));
            }
            Ok(Document {
                command: "qm eval".into(),
                inputs: inputs(&[
                    ("group", json!(g.to_string())),
                    ("qm", json!(format_chain(&g, &spec))),
                    ("target", json!(format_chain(&g, &chain))),
                ]),
                result: Value::Object(result),
                timing: None,
            })
        }
        Command::Gap(GapCommand::Chain { group, chain }) => {
            let g = group_arg(group)?;
            let c = parse_chain(chain, &g).map_err(pe("chain"))?;
            let cert = chain_gap_certificate(&g, &c)?;
            cert.verify()?;
            let mut result = json::certificate(&cert);
            result
                .as_object_mut()
                .expect("object")
                .insert("normalized".into(), json!(format_chain(&g, &normalize_chain(&g, &c))));
            Ok(Document {
                command: "gap chain".into(),
                inputs: inputs(&[("group", json!(g.to_string())), ("chain", json!(format_chain(&g, &c)))]),
                result,
                timing: None,
            })
        }
        Command::Gap(GapCommand::Element { group, word: w }) => {
            let g = group_arg(group)?;
            let w = parse_word(w, &g).map_err(pe("word"))?;
            let cert = element_gap(&g, &w)?;
            cert.verify()?;
            Ok(Document {
                command: "gap element".into(),
                inputs: inputs(&[("group", json!(g.to_string())), ("word", json!(w_text(&g, &w)))]),
                result: json::certificate(&cert),
                timing: None,
            })
        }
        Command::Orb(cmd) => orb(cmd),
        Command::Vondyck(cmd) => vondyck(cmd),
        Command::Oracle(cmd) => oracle(cmd),
    }
}

fn w_text(g: &GroupSpec, w: &sclgap_core::Word) -> String {
    json::word_text(g, w)
}

fn orb(cmd: &OrbCommand) -> Result<Document, CliError> {
    let spec_text = match cmd {
        OrbCommand::Group { spec }
        | OrbCommand::RelGap { spec, .. }
        | OrbCommand::ClosedGap { spec, .. }
        | OrbCommand::Splitting { spec } => spec,
    };
    let spec = parse_orbifold(spec_text).map_err(pe("spec"))?;
    let spec_echo = json!(format_orbifold(&spec));
    match cmd {
        OrbCommand::Group { .. } => {
            let euler = euler_char_orbifold(&spec);
            let mut result = Map::new();
            result.insert("euler_characteristic".into(), rational(&euler));
            if spec.is_closed() {
                result.insert("generators".into(), json!(closed_presentation_group(&spec)?.to_string()));
            } else {
                let data = fundamental_group(&spec)?;
                result.insert("group".into(), json!(data.group.to_string()));
                result.insert(
                    "boundary".into(),
                    json!(data.boundary_words().iter().map(|w| w_text(&data.group, w)).collect::<Vec<_>>()),
                );
            }
            Ok(Document { command: "orb group".into(), inputs: inputs(&[("spec", spec_echo)]), result: Value::Object(result), timing: None })
        }
        OrbCommand::RelGap { word: w, .. } => {
            let data = fundamental_group(&spec)?;
            let g = parse_word(w, &data.group).map_err(pe("word"))?;
            let cert = relative_gap_certificate(&spec, &g)?;
            cert.certificate.verify()?;
            Ok(Document {
                command: "orb rel-gap".into(),
                inputs: inputs(&[("spec", spec_echo), ("word", json!(w_text(&data.group, &g)))]),
                result: json::rel_certificate(&cert),
                timing: None,
            })
        }
        OrbCommand::ClosedGap { word: w, .. } => {
            let split = closed_splitting(&spec)?;
            let g = parse_word(w, &split.ambient).map_err(pe("word"))?;
            let cert = split.closed_gap(&g)?;
            cert.verify()?;
            let amb = &split.ambient;
            let class = match split.classify_element(&g)? {
                Classification::Elliptic { vertex, element, conjugator } => json!({
                    "kind": "elliptic",
                    "vertex": side_name(vertex),
                    "element": word(split.vertex_group(vertex), &element),
                    "conjugator": word(amb, &conjugator),
                }),
                Classification::Hyperbolic { length, cyclic_form, conjugator } => json!({
                    "kind": "hyperbolic",
                    "length": length,
                    "cyclic_form": word(amb, &cyclic_form),
                    "conjugator": word(amb, &conjugator),
                }),
            };
            let mut result = json::certificate(&cert);
            let obj = result.as_object_mut().expect("object");
            obj.insert("classification".into(), class);
            obj.insert("normal_form".into(), normal_form(&split, &split.normal_form(&g)));
            Ok(Document {
                command: "orb closed-gap".into(),
                inputs: inputs(&[("spec", spec_echo), ("word", json!(w_text(amb, &g)))]),
                result,
                timing: None,
            })
        }
        OrbCommand::Splitting { .. } => {
            let split = closed_splitting(&spec)?;
            let report = split.acylindricity_report()?;
            let (w1, w2) = (split.edge_image(Side::Left), split.edge_image(Side::Right));
            let kind = match &split.kind {
                SplittingKind::Hnn { vertex, stable_letter, .. } => json!({
                    "kind": "hnn",
                    "vertex": vertex.to_string(),
                    "stable_letter": stable_letter,
                    "edge_images": [word(vertex, w1), word(vertex, w2)],
                }),
                SplittingKind::Amalgam { left, right, .. } => json!({
                    "kind": "amalgam",
                    "left": left.to_string(),
                    "right": right.to_string(),
                    "edge_images": [word(left, w1), word(right, w2)],
                }),
            };
            let result = json!({
                "case": format!("{:?}", split.case),
                "generators": split.ambient.to_string(),
                "splitting": kind,
                "acylindricity": report.k,
                "cfl_n": report.n,
                "gap": rational(&report.gap),
                "checks": report.checks,
            });
            Ok(Document { command: "orb splitting".into(), inputs: inputs(&[("spec", spec_echo)]), result, timing: None })
        }
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Left => "left",
        Side::Right => "right",
    }
}

fn normal_form(split: &sclgap_core::splitting::SplittingSpec, nf: &NormalForm) -> Value {
    match nf {
        NormalForm::Amalgam { edge_power, syllables } => json!({
            "edge_power": edge_power,
            "syllables": syllables
                .iter()
                .map(|(s, r)| json!({ "side": side_name(*s), "word": word(split.vertex_group(*s), r) }))
                .collect::<Vec<_>>(),
        }),
        NormalForm::Hnn { head, tail } => {
            let h = split.vertex_group(Side::Left);
            json!({
                "head": word(h, head),
                "tail": tail.iter().map(|(e, r)| json!({ "stable_exponent": e, "word": word(h, r) })).collect::<Vec<_>>(),
            })
        }
    }
}

fn parse_pqr(s: &str) -> Result<(u32, u32, u32), CliError> {
    let v: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parse(format!("pqr: {e}")))?;
    match v.as_slice() {
        [p, q, r] => Ok((*p, *q, *r)),
        _ => Err(CliError::Parse("pqr: expected three integers".into())),
    }
}

fn trace_report(r: &TraceGapReport) -> Value {
    json!({
        "orders": [r.orders.0, r.orders.1, r.orders.2],
        "samples": r.samples,
        "hyperbolic": r.hyperbolic,
        "min_observed_trace": r.min_observed_trace.map(|t| real(t, r.tol)),
        "min_translation_length": r.min_translation_length.map(|t| real(t, r.tol)),
        "violations": r.violations,
    })
}

fn vondyck(cmd: &VondyckCommand) -> Result<Document, CliError> {
    match cmd {
        VondyckCommand::Verify { pqr, samples, maxlen, seed, enumerate } => {
            let (p, q, r) = parse_pqr(pqr)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let rep = verify_trace_gap(p, q, r, *samples, *maxlen, &mut rng)?;
            let mut result = Map::new();
            result.insert("sampled".into(), trace_report(&rep));
            result.insert("trace_bound".into(), real(trace_bound(), 1e-15));
            result.insert("delta".into(), real(delta_bound(), 1e-15));
            if let Some(len) = enumerate {
                let (e, best) = enumerate_trace_minimum(p, q, r, *len)?;
                let names = ["A", "B", "C"];
                let w: Vec<String> = best.iter().map(|(g, k)| format!("{}^{k}", names[*g])).collect();
                let mut er = trace_report(&e);
                er.as_object_mut().expect("object").insert("minimizer".into(), json!(w.join(" ")));
                result.insert("enumerated".into(), er);
            }
            let mut inp = vec![
                ("pqr", json!([p, q, r])),
                ("samples", json!(samples)),
                ("maxlen", json!(maxlen)),
                ("seed", json!(seed)),
            ];
            if let Some(len) = enumerate {
                inp.push(("enumerate", json!(len)));
            }
            Ok(Document { command: "vondyck verify".into(), inputs: inputs(&inp), result: Value::Object(result), timing: None })
        }
        VondyckCommand::Constant { eps } => {
            let w = epsilon_window();
            let requested = *eps;
            let (eps, c) = match requested {
                Some(e) => (e, von_dyck_gap_constant(e)?),
                None => optimized_constant(),
            };
            let result = json!({
                "delta": real(delta_bound(), 1e-15),
                "eps_max": real(w.eps_max, 1e-15),
                "binding": w.binding.label(),
                "displacement_limit": real(w.displacement_limit, 1e-15),
                "sinh_limit": real(w.sinh_limit, 1e-15),
                "eps": real(eps, 1e-15),
                "sinh_constraint_holds": w.feasible(eps),
                "C": real(c, DEFAULT_TOL),
                "inverse_C": real(1.0 / c, DEFAULT_TOL),
            });
            let inp = requested.map_or_else(Map::new, |e| inputs(&[("eps", json!(e))]));
            Ok(Document { command: "vondyck constant".into(), inputs: inp, result, timing: None })
        }
    }
}

fn oracle(cmd: &OracleCommand) -> Result<Document, CliError> {
    match cmd {
        OracleCommand::Defect { group, base, maxlen, jobs, checkpoint } => {
            let g = group_arg(group)?;
            let b = parse_word(base, &g).map_err(pe("base"))?;
            let opts = DefectOptions { jobs: *jobs, checkpoint: checkpoint.clone() };
            let rep = brute_defect(&g, &b, *maxlen, &opts)?;
            let result = json!({
                "value": rational(&rep.value),
                "witness": [word(&g, &rep.witness.0), word(&g, &rep.witness.1)],
                "pairs": rep.pairs,
                "defect_limit": rational(&int(3)),
            });
            // job count and checkpoint path do not change the result, so they are not echoed
            Ok(Document {
                command: "oracle defect".into(),
                inputs: inputs(&[("group", json!(g.to_string())), ("base", word(&g, &b)), ("maxlen", json!(maxlen))]),
                result,
                timing: None,
            })
        }
        OracleCommand::Conj { group, w1, w2, ball } => {
            let g = group_arg(group)?;
            let a = parse_word(w1, &g).map_err(pe("w1"))?;
            let b = parse_word(w2, &g).map_err(pe("w2"))?;
            let u = conjugator_search(&g, &a, &b, *ball);
            let result = json!({
                "conjugator": u.as_ref().map(|u| word(&g, u)),
                "is_conjugate": g.is_conjugate(&a, &b),
            });
            Ok(Document {
                command: "oracle conj".into(),
                inputs: inputs(&[
                    ("group", json!(g.to_string())),
                    ("w1", word(&g, &a)),
                    ("w2", word(&g, &b)),
                    ("ball", json!(ball)),
                ]),
                result,
                timing: None,
            })
        }
        OracleCommand::Enumerate { group, maxlen, filter } => {
            let g = group_arg(group)?;
            let f = match filter {
                FilterArg::All => WordFilter::All,
                FilterArg::CyclicallyReduced => WordFilter::CyclicallyReduced,
                FilterArg::Eligible => WordFilter::EligibleBase,
            };
            let words = enumerate_words(&EnumerationPlan { group: g.clone(), max_length: *maxlen, filter: f });
            let result = json!({
                "count": words.len(),
                "words": words.iter().map(|w| word(&g, w)).collect::<Vec<_>>(),
            });
            Ok(Document {
                command: "oracle enumerate".into(),
                inputs: inputs(&[
                    ("group", json!(g.to_string())),
                    ("maxlen", json!(maxlen)),
                    ("filter", json!(format!("{filter:?}").to_lowercase())),
                ]),
                result,
                timing: None,
            })
        }
    }
}

/// Plain `path = value` lines.
pub fn render_text(doc: &Document) -> String {
    fn scalar(v: &Value) -> Option<String> {
        if let Some(q) = json::parse_rational(v) {
            return Some(fmt_q(&q));
        }
        if let (Some(x), Some(t)) = (v.get("value").and_then(Value::as_f64), v.get("tol").and_then(Value::as_f64)) {
            return Some(format!("{x} (tol {t})"));
        }
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Object(_) | Value::Array(_) => None,
            other => Some(other.to_string()),
        }
    }
    fn walk(prefix: &str, v: &Value, out: &mut Vec<String>) {
        if let Some(s) = scalar(v) {
            out.push(format!("{prefix} = {s}"));
            return;
        }
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    walk(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, x, out);
                }
            }
            Value::Array(a) => {
                for (i, x) in a.iter().enumerate() {
                    walk(&format!("{prefix}[{i}]"), x, out);
                }
            }
            _ => unreachable!(),
        }
    }
    let mut out = vec![format!("command = {}", doc.command)];
    walk("", &doc.result, &mut out);
    if let Some(t) = &doc.timing {
        walk("timing", t, &mut out);
    }
    out.join("\n")
}

pub fn render(cli: &Cli, doc: &Document) -> String {
    match cli.format {
        Format::Json => doc.render(),
        Format::Text => render_text(doc),
    }
}
