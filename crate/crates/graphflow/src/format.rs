//! Line-oriented text formats.
//!
//! Graph documents hold `vertex`, `edge` and `leaf` lines, optionally extended
//! by `cyclic`/`mark` (fat graphs) and `length`/`label` (metric structures).
//! Configuration files are `key=value` lines. Morphism files name a source and
//! a target document and list the vertex and edge maps. `#` starts a comment
//! everywhere.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use graphflow_core::fat::{boundary_cycles, BoundaryCyclePartition, CycleMark, FatGraph};
use graphflow_core::graph::{GraphMorphism, LeafKind, OrientedGraph};
use graphflow_core::metric::{assign_labels, MetricStructure};
use graphflow_core::morse::BackendConfig;
use graphflow_core::solver::SolverConfig;

use crate::Error;

/// A syntax error at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// A token with its 1-based column.
#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Tok {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Tok {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Everything a graph document can declare, in file order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub basepoints: Vec<String>,
    pub edges: Vec<(String, String, String)>,
    pub leaves: Vec<(String, LeafKind)>,
    pub cyclic: Vec<(String, Vec<String>)>,
    pub marks: Vec<(usize, CycleMark)>,
    pub lengths: Vec<(String, f64)>,
    pub labels: Vec<(String, String)>,
}

fn arity(toks: &[Tok], line: usize, want: &[usize], usage: &str) -> Result<(), ParseError> {
    if want.contains(&toks.len()) {
        return Ok(());
    }
    let column = toks
        .get(*want.iter().max().unwrap_or(&0))
        .map_or_else(|| toks.last().map_or(1, |t| t.column + t.text.len()), |t| t.column);
    Err(err(line, column, format!("expected `{usage}`")))
}

fn kind(t: Tok, line: usize) -> Result<LeafKind, ParseError> {
    match t.text {
        "in" => Ok(LeafKind::Incoming),
        "out" => Ok(LeafKind::Outgoing),
        other => Err(err(line, t.column, format!("expected `in` or `out`, found `{other}`"))),
    }
}

fn float(t: Tok, line: usize) -> Result<f64, ParseError> {
    t.text
        .parse::<f64>()
        .map_err(|_| err(line, t.column, format!("invalid number `{}`", t.text)))
}

/// Parses the text of a graph document without validating the graph.
pub fn parse_document(text: &str) -> Result<GraphDocument, ParseError> {
    let mut doc = GraphDocument::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "vertex" => {
                arity(&toks, line, &[2, 3], "vertex <id> [basepoint]")?;
                doc.vertices.push(toks[1].text.to_string());
                if let Some(t) = toks.get(2) {
                    if t.text != "basepoint" {
                        return Err(err(line, t.column, format!("expected `basepoint`, found `{}`", t.text)));
                    }
                    doc.basepoints.push(toks[1].text.to_string());
                }
            }
            "edge" => {
                arity(&toks, line, &[4], "edge <id> <src-id> <dst-id>")?;
                doc.edges
                    .push((toks[1].text.into(), toks[2].text.into(), toks[3].text.into()));
            }
            "leaf" => {
                arity(&toks, line, &[3], "leaf <vertex-id> in|out")?;
                doc.leaves.push((toks[1].text.into(), kind(toks[2], line)?));
            }
            "cyclic" => {
                if toks.len() < 3 {
                    return Err(err(line, head.column, "expected `cyclic <vertex-id> <half-edge>...`"));
                }
                for t in &toks[2..] {
                    if !(t.text.len() > 1 && (t.text.ends_with('+') || t.text.ends_with('-'))) {
                        return Err(err(line, t.column, format!("half-edge `{}` must end in `+` or `-`", t.text)));
                    }
                }
                doc.cyclic.push((
                    toks[1].text.into(),
                    toks[2..].iter().map(|t| t.text.to_string()).collect(),
                ));
            }
            "mark" => {
                arity(&toks, line, &[3], "mark <cycle-index> in|out")?;
                let idx = toks[1]
                    .text
                    .parse::<usize>()
                    .map_err(|_| err(line, toks[1].column, format!("invalid cycle index `{}`", toks[1].text)))?;
                let m = match kind(toks[2], line)? {
                    LeafKind::Incoming => CycleMark::Incoming,
                    LeafKind::Outgoing => CycleMark::Outgoing,
                };
                doc.marks.push((idx, m));
            }
            "length" => {
                arity(&toks, line, &[3], "length <edge-id> <float>")?;
                doc.lengths.push((toks[1].text.into(), float(toks[2], line)?));
            }
            "label" => {
                arity(&toks, line, &[3], "label <edge-id> <catalog-key>")?;
                doc.labels.push((toks[1].text.into(), toks[2].text.into()));
            }
            other => return Err(err(line, head.column, format!("unknown directive `{other}`"))),
        }
    }
    Ok(doc)
}

impl GraphDocument {
    pub fn graph(&self) -> Result<OrientedGraph, Error> {
        let mut b = OrientedGraph::builder();
        for v in &self.vertices {
            b.add_vertex(v.clone());
        }
        for v in &self.basepoints {
            b.add_basepoint(v.clone());
        }
        for (id, s, d) in &self.edges {
            b.add_edge(id.clone(), s.clone(), d.clone());
        }
        for (v, k) in &self.leaves {
            b.add_leaf(v.clone(), *k);
        }
        Ok(b.build()?)
    }

    /// The fat graph from the `cyclic` lines; leaf vertices may be omitted.
    pub fn fat_graph(&self, graph: Arc<OrientedGraph>) -> Result<FatGraph, Error> {
        Ok(FatGraph::from_tokens(
            graph,
            self.cyclic
                .iter()
                .map(|(v, t)| (v.as_str(), t.iter().map(String::as_str).collect())),
        )?)
    }

    /// Canonical boundary cycles with the document's marks applied.
    pub fn marked_cycles(&self, fg: &FatGraph) -> Result<BoundaryCyclePartition, Error> {
        Ok(boundary_cycles(fg).with_marks(&self.marks)?)
    }

    /// Lengths from the `length` lines (leaf edges default to 1), labels from
    /// the `label` lines, checked against `cfg` when given.
    pub fn structure(&self, graph: Arc<OrientedGraph>, cfg: Option<&BackendConfig>) -> Result<MetricStructure, Error> {
        let ms = MetricStructure::from_lengths(graph, self.lengths.iter().map(|(e, l)| (e.as_str(), *l)))?;
        let labels = self.labels.iter().map(|(e, k)| (e.as_str(), k.as_str()));
        Ok(match cfg {
            Some(cfg) => assign_labels(&ms, labels, |k| cfg.is_known_label(k))?,
            None => assign_labels(&ms, labels, |_| true)?,
        })
    }
}

/// Parses and validates a graph document.
pub fn parse_graph(text: &str) -> Result<OrientedGraph, Error> {
    parse_document(text)?.graph()
}

/// `key=value` lines with their line numbers.
pub fn parse_key_values(text: &str) -> Result<Vec<(usize, String, String)>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let code = raw.split('#').next().unwrap_or("");
        if code.trim().is_empty() {
            continue;
        }
        let Some((k, v)) = code.split_once('=') else {
            let column = code.len() - code.trim_start().len() + 1;
            return Err(err(i + 1, column, "expected `key=value`"));
        };
        if k.trim().is_empty() {
            return Err(err(i + 1, 1, "empty key"));
        }
        out.push((i + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Backend configuration from `key=value` text.
pub fn parse_backend_config(text: &str) -> Result<BackendConfig, Error> {
    let kv = parse_key_values(text)?;
    Ok(BackendConfig::from_entries(kv.iter().map(|(_, k, v)| (k.as_str(), v.as_str())))?)
}

/// Solver configuration from `key=value` text.
pub fn parse_solver_config(text: &str) -> Result<SolverConfig, Error> {
    let kv = parse_key_values(text)?;
    Ok(SolverConfig::from_entries(kv.iter().map(|(_, k, v)| (k.as_str(), v.as_str())))?)
}

/// A morphism document: `source <path>`, `target <path>`, then
/// `vertex <src-id> <dst-id>` and `edge <src-id> <dst-id>|collapse` lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MorphismDocument {
    pub source: PathBuf,
    pub target: PathBuf,
    pub vertices: Vec<(String, String)>,
    pub edges: Vec<(String, Option<String>)>,
}

pub fn parse_morphism_document(text: &str) -> Result<MorphismDocument, ParseError> {
    let mut source = None;
    let mut target = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let toks = tokens(raw);
        let Some(head) = toks.first() else { continue };
        match head.text {
            "source" | "target" => {
                arity(&toks, line, &[2], "source|target <path>")?;
                let slot = if head.text == "source" { &mut source } else { &mut target };
                if slot.is_some() {
                    return Err(err(line, head.column, format!("`{}` given twice", head.text)));
                }
                *slot = Some(PathBuf::from(toks[1].text));
            }
            "vertex" => {
                arity(&toks, line, &[3], "vertex <src-id> <dst-id>")?;
                vertices.push((toks[1].text.into(), toks[2].text.into()));
            }
            "edge" => {
                arity(&toks, line, &[3], "edge <src-id> <dst-id>|collapse")?;
                let img = match toks[2].text {
                    "collapse" => None,
                    t => Some(t.to_string()),
                };
                edges.push((toks[1].text.into(), img));
            }
            other => return Err(err(line, head.column, format!("unknown directive `{other}`"))),
        }
    }
    let missing = |what: &str| err(last_line.max(1), 1, format!("missing `{what}` line"));
    Ok(MorphismDocument {
        source: source.ok_or_else(|| missing("source"))?,
        target: target.ok_or_else(|| missing("target"))?,
        vertices,
        edges,
    })
}

impl MorphismDocument {
    pub fn morphism(&self, source: Arc<OrientedGraph>, target: Arc<OrientedGraph>) -> Result<GraphMorphism, Error> {
        Ok(GraphMorphism::from_ids(
            source,
            target,
            self.vertices.iter().map(|(a, b)| (a.as_str(), b.as_str())),
            self.edges.iter().map(|(a, b)| (a.as_str(), b.as_deref())),
        )?)
    }
}

/// Renders a graph as a graph document; vertices and edges in id order.
pub fn write_graph(g: &OrientedGraph) -> String {
    let mut s = String::new();
    for (i, v) in g.vertices().iter().enumerate() {
        if i == g.basepoint() {
            s.push_str(&format!("vertex {} basepoint\n", v.id));
        } else {
            s.push_str(&format!("vertex {}\n", v.id));
        }
    }
    for e in g.edges() {
        s.push_str(&format!("edge {} {} {}\n", e.id, g.vertex(e.src).id, g.vertex(e.dst).id));
    }
    for v in g.vertices() {
        if let Some(k) = v.leaf {
            s.push_str(&format!("leaf {} {k}\n", v.id));
        }
    }
    s
}

/// Renders a metric structure: the graph plus `length` and `label` lines.
pub fn write_structure(ms: &MetricStructure) -> String {
    let g = ms.graph();
    let mut s = write_graph(g);
    for (e, edge) in g.edges().iter().enumerate() {
        s.push_str(&format!("length {} {}\n", edge.id, ms.length(e)));
    }
    for (e, edge) in g.edges().iter().enumerate() {
        if let Some(l) = ms.label(e) {
            s.push_str(&format!("label {} {l}\n", edge.id));
        }
    }
    s
}

/// Reads a file, attaching the path to IO and parse errors.
pub fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn at<T>(path: &Path, r: Result<T, Error>) -> Result<T, Error> {
    r.map_err(|e| match e {
        Error::Parse(p) => Error::ParseFile {
            path: path.display().to_string(),
            error: p,
        },
        other => other,
    })
}

pub fn load_document(path: &Path) -> Result<GraphDocument, Error> {
    let text = read(path)?;
    at(path, parse_document(&text).map_err(Error::from))
}

pub fn load_backend_config(path: &Path) -> Result<BackendConfig, Error> {
    let text = read(path)?;
    at(path, parse_backend_config(&text))
}

pub fn load_solver_config(path: &Path) -> Result<SolverConfig, Error> {
    let text = read(path)?;
    at(path, parse_solver_config(&text))
}

/// A loaded morphism with the documents of its source and target, whose
/// paths are resolved relative to the morphism file.
pub struct LoadedMorphism {
    pub morphism: GraphMorphism,
    pub source: GraphDocument,
    pub target: GraphDocument,
}

pub fn load_morphism(path: &Path) -> Result<LoadedMorphism, Error> {
    let text = read(path)?;
    let doc = at(path, parse_morphism_document(&text).map_err(Error::from))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let source = load_document(&base.join(&doc.source))?;
    let target = load_document(&base.join(&doc.target))?;
    let morphism = doc.morphism(Arc::new(source.graph()?), Arc::new(target.graph()?))?;
    Ok(LoadedMorphism {
        morphism,
        source,
        target,
    })
}

/// Parses `a=b` pairs as given on the command line.
pub fn parse_pairs<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Vec<(String, String)>, Error> {
    items
        .into_iter()
        .map(|s| {
            s.split_once('=')
                .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .ok_or_else(|| Error::Usage(format!("expected `a=b`, found `{s}`")))
        })
        .collect()
}

/// `constraint.<leaf>` entries merged into a solver configuration.
pub fn with_constraints(mut cfg: SolverConfig, pairs: &[(String, String)]) -> SolverConfig {
    let extra: BTreeMap<String, String> = pairs.iter().cloned().collect();
    cfg.constraints.extend(extra);
    cfg
}
