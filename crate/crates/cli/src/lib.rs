//! Command-line front end. [`run`] is the whole program; `main` only wires
//! it to the process.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};
use ssred_core::format::{self, Document};
use ssred_core::oracle::{enumerate_contractions, enumerate_cover_contractions, OracleOptions};
use ssred_core::{
    base_change, base_change_cover, base_change_model, contract_with, desingularize, join_models, make_marked_model,
    make_model, marked_rh_defect, quotient_by_action, rh_defect, splitting_index, stable_hull, stable_hull_of_cover,
    stable_marked_hull, stable_marked_model, stable_model_of_cover, validate_cover,
    DualGraph, Error, ErrorClass, HullResult, LegPolicy, Model, VertexId,
};

/// Outcome of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 success, 1 validation failure, 2 precondition error, 3 internal
    /// invariant breach.
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "ssred", version, about = "Dual graphs, models and covers of semi-stable curves")]
struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = OutFormat::Json)]
    format: OutFormat,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Json,
    Dot,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Check a graph, model or cover file.
    Validate { file: PathBuf },
    /// Arithmetic genus.
    Genus { graph: PathBuf },
    /// Degree of the dualizing sheaf on each vertex.
    Omega {
        graph: PathBuf,
        /// Count legs.
        #[arg(long)]
        marked: bool,
    },
    /// Minimal desingularization, as a model.
    Desing { graph: PathBuf },
    /// Contract vertices of non-positive degree.
    Contract {
        graph: PathBuf,
        /// Comma separated vertex ids.
        #[arg(long)]
        victims: String,
        /// Move legs on contracted tails to their attaching point.
        #[arg(long)]
        transfer_legs: bool,
    },
    /// Base change of a graph, model or cover.
    Basechange {
        file: PathBuf,
        #[arg(short = 'e')]
        e: u64,
    },
    /// Smallest base change making all markings integral.
    SplitIndex { graph: PathBuf },
    /// Stable hull of a model.
    Hull { model: PathBuf },
    /// Stable marked hull of a marked model.
    MarkedHull { model: PathBuf },
    /// Stable marked model of a marked graph.
    MarkedModel { graph: PathBuf },
    /// Common refinement of two models of the same curve.
    Join { first: PathBuf, second: PathBuf },
    /// Check a cover file.
    CoverValidate { cover: PathBuf },
    /// Stable model of a cover.
    CoverStable { cover: PathBuf },
    /// Stable hull of a cover of models.
    CoverHull {
        cover: PathBuf,
        #[arg(long)]
        ex_source: String,
        #[arg(long)]
        ex_target: String,
    },
    /// Base change of a cover.
    CoverBasechange {
        cover: PathBuf,
        #[arg(short = 'e')]
        e: u64,
    },
    /// Quotient of a graph by a group action.
    Quotient {
        graph: PathBuf,
        #[arg(long)]
        action: PathBuf,
    },
    /// Ramification defect at each source vertex.
    Rh { cover: PathBuf },
    /// Poset of contractions of a model or cover, explored exhaustively.
    Oracle {
        file: PathBuf,
        /// Largest number of (target) vertices accepted.
        #[arg(long)]
        bound: Option<usize>,
        /// Worker threads; 0 picks the default.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Exceptional source vertices, for covers of models.
        #[arg(long, requires = "ex_target")]
        ex_source: Option<String>,
        #[arg(long, requires = "ex_source")]
        ex_target: Option<String>,
    },
    /// Render a file as DOT.
    ExportDot {
        file: PathBuf,
        #[arg(short = 'o')]
        out: PathBuf,
    },
}

/// What a command produced: JSON, with a DOT rendering when one exists.
struct Output {
    json: Value,
    dot: Option<String>,
}

impl Output {
    fn plain(json: Value) -> Output {
        Output { json, dot: None }
    }
}

/// Failure of a single command, before it is mapped to an exit code.
enum Failure {
    Core(Error),
    Io(String),
    Usage(String),
    /// Validation report already rendered by `validate`.
    Report(Output, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Res<T> = Result<T, Failure>;

/// Runs the program on `argv`, whose first element is the program name.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandResult { exit_code: 0, stdout: text, stderr: String::new() }
                }
                _ => CommandResult { exit_code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let format = cli.format;
    match dispatch(cli.cmd) {
        Ok(None) => CommandResult { exit_code: 0, stdout: String::new(), stderr: String::new() },
        Ok(Some(out)) => match (format, out.dot) {
            (OutFormat::Json, _) => ok(format::to_text(&out.json)),
            (OutFormat::Dot, Some(dot)) => ok(dot),
            (OutFormat::Dot, None) => CommandResult {
                exit_code: 2,
                stdout: String::new(),
                stderr: "error [format-unsupported]: this command has no DOT rendering\n".into(),
            },
        },
        Err(Failure::Report(out, stderr)) => {
            CommandResult { exit_code: 1, stdout: format::to_text(&out.json), stderr }
        }
        Err(Failure::Usage(msg)) => CommandResult { exit_code: 2, stdout: String::new(), stderr: msg },
        Err(Failure::Io(msg)) => CommandResult { exit_code: 2, stdout: String::new(), stderr: msg },
        Err(Failure::Core(e)) => {
            let exit_code = match e.class() {
                ErrorClass::Validation => 1,
                ErrorClass::Precondition => 2,
                ErrorClass::Internal => 3,
            };
            CommandResult { exit_code, stdout: String::new(), stderr: describe(&e) }
        }
    }
}

fn ok(stdout: String) -> CommandResult {
    CommandResult { exit_code: 0, stdout, stderr: String::new() }
}

fn describe(e: &Error) -> String {
    match e {
        Error::Invalid(d) => d.iter().map(|x| format!("{x}\n")).collect(),
        Error::Precondition { rule, message, .. } => format!("error [{rule}]: {message}\n"),
        _ => format!("error [{}]: {e}\n", e.rule()),
    }
}

fn dispatch(cmd: Cmd) -> Res<Option<Output>> {
    let out = match cmd {
        Cmd::Validate { file } => validate(&file)?,
        Cmd::CoverValidate { cover } => {
            let text = read(&cover)?;
            match format::parse_document(&text) {
                Ok(Document::Cover(_)) | Err(_) => validate(&cover)?,
                Ok(_) => return Err(Failure::Core(wrong_kind("a cover"))),
            }
        }
        Cmd::Genus { graph } => {
            let g = load_graph(&graph)?;
            Output::plain(obj(vec![("arithmetic_genus", g.arithmetic_genus()?.into())]))
        }
        Cmd::Omega { graph, marked } => {
            let g = load_graph(&graph)?;
            let mut degrees = Map::new();
            let mut total = 0;
            for v in g.vertex_ids() {
                let d = g.omega_degree(v, marked)?;
                total += d;
                degrees.insert(v.0.to_string(), d.into());
            }
            Output::plain(obj(vec![
                ("marked", marked.into()),
                ("omega", Value::Object(degrees)),
                ("total", total.into()),
            ]))
        }
        Cmd::Desing { graph } => {
            let g = load_graph(&graph)?;
            let (top, ex, trace) = desingularize(&g)?;
            let json = annotate(format::model_to_value(&top, &ex), vec![("trace", format::trace_to_value(&trace))]);
            Output { json, dot: Some(format::model_to_dot(&top, &ex)) }
        }
        Cmd::Contract { graph, victims, transfer_legs } => {
            let g = load_graph(&graph)?;
            let victims = ids(&victims, "--victims")?;
            let policy = if transfer_legs { LegPolicy::Transfer } else { LegPolicy::Reject };
            let (h, trace) = contract_with(&g, &victims, policy)?;
            let json = annotate(format::graph_to_value(&h), vec![("trace", format::trace_to_value(&trace))]);
            Output { json, dot: Some(format::graph_to_dot(&h)) }
        }
        Cmd::Basechange { file, e } => match load(&file)? {
            Document::Graph(g) => {
                check_graph(&g)?;
                graph_out(&base_change(&g, e)?)
            }
            Document::Model(top, ex) => {
                let m = base_change_model(&build_model(top, ex, None)?, e)?;
                model_out(&m)
            }
            Document::Cover(c) => cover_out(&base_change_cover(&c, e)?, None),
        },
        Cmd::CoverBasechange { cover, e } => cover_out(&base_change_cover(&load_cover(&cover)?, e)?, None),
        Cmd::SplitIndex { graph } => {
            let g = load_graph(&graph)?;
            Output::plain(obj(vec![("splitting_index", splitting_index(&g)?.into())]))
        }
        Cmd::Hull { model } => hull_out(&stable_hull(&load_model(&model, Some(false))?)?),
        Cmd::MarkedHull { model } => hull_out(&stable_marked_hull(&load_model(&model, Some(true))?)?),
        Cmd::MarkedModel { graph } => graph_out(&stable_marked_model(&load_graph(&graph)?)?),
        Cmd::Join { first, second } => {
            let a = load_model(&first, None)?;
            let b = load_model(&second, None)?;
            model_out(&join_models(&a, &b)?)
        }
        Cmd::CoverStable { cover } => {
            let (c, steps) = stable_model_of_cover(&load_cover(&cover)?)?;
            cover_out(&c, Some(&steps))
        }
        Cmd::CoverHull { cover, ex_source, ex_target } => {
            let c = load_cover(&cover)?;
            let s = ids(&ex_source, "--ex-source")?;
            let t = ids(&ex_target, "--ex-target")?;
            let (h, steps) = stable_hull_of_cover(&c, &s, &t)?;
            cover_out(&h, Some(&steps))
        }
        Cmd::Quotient { graph, action } => {
            let g = load_graph(&graph)?;
            let a = format::parse_action(&read(&action)?)?;
            let orders = match a.edge_stabilizer_orders {
                Some(o) => o,
                None => ssred_core::covers::edge_stabilizer_orders(&g, &a.action),
            };
            cover_out(&quotient_by_action(&g, &a.action, &orders, &a.quotient_genera)?, None)
        }
        Cmd::Rh { cover } => {
            let c = load_cover(&cover)?;
            let mut plain = Map::new();
            let mut marked = Map::new();
            for v in c.source.vertex_ids() {
                plain.insert(v.0.to_string(), rh_defect(&c, v)?.into());
                if c.is_marked() {
                    marked.insert(v.0.to_string(), marked_rh_defect(&c, v)?.into());
                }
            }
            let mut pairs = vec![("rh_defect", Value::Object(plain))];
            if c.is_marked() {
                pairs.push(("marked_rh_defect", Value::Object(marked)));
            }
            Output::plain(obj(pairs))
        }
        Cmd::Oracle { file, bound, jobs, ex_source, ex_target } => {
            let poset = match load(&file)? {
                Document::Model(top, ex) => {
                    let m = build_model(top, ex, None)?;
                    let opts = OracleOptions { bound: bound.unwrap_or(OracleOptions::models().bound), jobs };
                    enumerate_contractions(&m, opts)?
                }
                Document::Cover(c) => {
                    let opts = OracleOptions { bound: bound.unwrap_or(OracleOptions::covers().bound), jobs };
                    let ex = match (ex_source, ex_target) {
                        (Some(s), Some(t)) => Some((ids(&s, "--ex-source")?, ids(&t, "--ex-target")?)),
                        _ => None,
                    };
                    enumerate_cover_contractions(&c, ex.as_ref().map(|(s, t)| (s, t)), opts)?
                }
                Document::Graph(_) => return Err(Failure::Core(wrong_kind("a model or a cover"))),
            };
            Output { json: format::poset_to_value(&poset), dot: Some(format::poset_to_dot(&poset)) }
        }
        Cmd::ExportDot { file, out } => {
            let dot = format::document_to_dot(&load(&file)?);
            std::fs::write(&out, dot)
                .map_err(|e| Failure::Io(format!("error [io]: cannot write {}: {e}\n", out.display())))?;
            return Ok(None);
        }
    };
    Ok(Some(out))
}

fn validate(path: &Path) -> Res<Output> {
    let text = read(path)?;
    let (kind, diagnostics) = match format::parse_document(&text) {
        Err(Error::Invalid(d)) => ("unknown", d),
        Err(e) => return Err(e.into()),
        Ok(Document::Graph(g)) => ("graph", g.validate()),
        Ok(Document::Model(top, ex)) => match build_model(top, ex, None) {
            Ok(_) => ("model", Default::default()),
            Err(Error::Invalid(d)) => ("model", d),
            Err(e) => return Err(e.into()),
        },
        Ok(Document::Cover(c)) => ("cover", validate_cover(&c)),
    };
    let report: Vec<Value> = diagnostics
        .iter()
        .map(|d| {
            obj(vec![
                ("elements", d.elements.clone().into()),
                ("message", d.message.clone().into()),
                ("rule", d.rule.into()),
            ])
        })
        .collect();
    let valid = diagnostics.is_empty();
    let out = Output::plain(obj(vec![("diagnostics", report.into()), ("kind", kind.into()), ("valid", valid.into())]));
    if valid {
        Ok(out)
    } else {
        Err(Failure::Report(out, describe(&Error::Invalid(diagnostics))))
    }
}

fn read(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("error [io]: cannot read {}: {e}\n", path.display())))
}

fn load(path: &Path) -> Res<Document> {
    Ok(format::parse_document(&read(path)?)?)
}

fn check_graph(g: &DualGraph) -> Res<()> {
    Ok(g.validate().into_result()?)
}

/// Reads a graph; a model file stands for its top.
fn load_graph(path: &Path) -> Res<DualGraph> {
    let g = match load(path)? {
        Document::Graph(g) | Document::Model(g, _) => g,
        Document::Cover(_) => return Err(Failure::Core(wrong_kind("a graph"))),
    };
    check_graph(&g)?;
    Ok(g)
}

fn load_model(path: &Path, marked: Option<bool>) -> Res<Model> {
    match load(path)? {
        Document::Model(top, ex) => Ok(build_model(top, ex, marked)?),
        _ => Err(Failure::Core(wrong_kind("a model"))),
    }
}

fn load_cover(path: &Path) -> Res<ssred_core::CoverDatum> {
    match load(path)? {
        Document::Cover(c) => {
            validate_cover(&c).into_result()?;
            Ok(c)
        }
        _ => Err(Failure::Core(wrong_kind("a cover"))),
    }
}

/// Builds a model with the strict or the marked rules; `None` picks the
/// marked rules exactly when the top carries legs, markings or thick edges.
fn build_model(top: DualGraph, ex: BTreeSet<VertexId>, marked: Option<bool>) -> Result<Model, Error> {
    let marked = marked.unwrap_or_else(|| {
        !top.legs().is_empty() || !top.edge_markings().is_empty() || top.edges().values().any(|e| e.thickness != 1)
    });
    if marked {
        make_marked_model(top, ex)
    } else {
        make_model(top, ex)
    }
}

fn wrong_kind(what: &str) -> Error {
    let mut d = ssred_core::Diagnostics::new();
    d.push("schema", [], format!("expected {what}"));
    Error::Invalid(d)
}

fn ids(s: &str, flag: &str) -> Res<BTreeSet<VertexId>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.trim_start_matches('v')
                .parse::<u32>()
                .map(VertexId)
                .map_err(|_| Failure::Usage(format!("error [usage]: {flag}: {x:?} is not a vertex id\n")))
        })
        .collect()
}

fn obj(mut pairs: Vec<(&str, Value)>) -> Value {
    pairs.sort_by(|a, b| a.0.cmp(b.0));
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// Adds keys to a document, keeping keys sorted. The parsers ignore them.
fn annotate(doc: Value, extra: Vec<(&str, Value)>) -> Value {
    let Value::Object(m) = doc else { return doc };
    let mut all: BTreeMap<String, Value> = m.into_iter().collect();
    for (k, v) in extra {
        all.insert(k.to_string(), v);
    }
    Value::Object(all.into_iter().collect())
}

fn graph_out(g: &DualGraph) -> Output {
    Output { json: format::graph_to_value(g), dot: Some(format::graph_to_dot(g)) }
}

fn model_out(m: &Model) -> Output {
    Output { json: format::model_to_value(m.top(), m.exceptional()), dot: Some(format::model_to_dot(m.top(), m.exceptional())) }
}

fn hull_out(h: &HullResult) -> Output {
    let kept: Vec<Value> = h.kept_exceptional.iter().map(|v| Value::from(v.0)).collect();
    let json = annotate(
        format::graph_to_value(&h.hull),
        vec![("kept_exceptional", kept.into()), ("trace", format::trace_to_value(&h.trace))],
    );
    Output { json, dot: Some(format::graph_to_dot(&h.hull)) }
}

fn cover_out(c: &ssred_core::CoverDatum, steps: Option<&[ssred_core::CoverStep]>) -> Output {
    let mut json = format::cover_to_value(c);
    if let Some(steps) = steps {
        json = annotate(json, vec![("steps", format::steps_to_value(steps))]);
    }
    Output { json, dot: Some(format::cover_to_dot(c)) }
}
