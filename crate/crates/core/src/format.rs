//! JSON file formats and DOT renderings.
//!
//! Serialization is canonical: object keys in lexicographic order, id lists
//! and id-keyed maps in numeric order, rationals as `"p/q"` in lowest terms,
//! two-space indentation and a trailing newline. Parsing reports every
//! problem it can find as a diagnostic.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::covers::{Automorphism, CoverDatum, CoverStep, GroupAction};
use crate::diagnostics::Diagnostics;
use crate::error::{Error, Result};
use crate::graph::{DualGraph, EdgeMarking, Position};
use crate::ids::{EdgeId, LegId, MarkingId, VertexId};
use crate::models::HullResult;
use crate::moves::{ContractionTrace, Image};
use crate::oracle::{check_confluence, DominationPoset};

/// A parsed input file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Graph(DualGraph),
    Model(DualGraph, BTreeSet<VertexId>),
    Cover(CoverDatum),
}

/// Group action file for quotients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActionFile {
    pub action: GroupAction,
    pub edge_stabilizer_orders: Option<BTreeMap<EdgeId, u64>>,
    pub quotient_genera: BTreeMap<VertexId, u32>,
}

fn obj(mut pairs: Vec<(&str, Value)>) -> Value {
    pairs.sort_by(|a, b| a.0.cmp(b.0));
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.to_string(), v);
    }
    Value::Object(m)
}

fn id_map<K: Copy + Into<u32> + Ord, V>(map: &BTreeMap<K, V>, f: impl Fn(&V) -> Value) -> Value {
    let mut m = Map::new();
    for (k, v) in map {
        m.insert((*k).into().to_string(), f(v));
    }
    Value::Object(m)
}

macro_rules! into_u32 {
    ($($t:ty),*) => {$(
        impl From<$t> for u32 {
            fn from(x: $t) -> u32 {
                x.0
            }
        }
    )*};
}
into_u32!(VertexId, EdgeId, LegId, MarkingId);

pub fn rational_to_string(p: Position) -> String {
    format!("{}/{}", p.numer(), p.denom())
}

pub fn parse_rational(s: &str) -> Option<Position> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>().ok()?, q.trim().parse::<i64>().ok()?),
        None => (s.trim().parse::<i64>().ok()?, 1),
    };
    if q <= 0 {
        return None;
    }
    Some(Position::new(p, q))
}

/// Pretty JSON with a trailing newline.
pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

pub fn graph_to_value(g: &DualGraph) -> Value {
    let vertices: Vec<Value> = g
        .vertices()
        .iter()
        .map(|(&v, d)| {
            let legs: Vec<Value> = g.legs_at(v).into_iter().map(|l| Value::from(l.0)).collect();
            obj(vec![("genus", d.genus.into()), ("id", v.0.into()), ("legs", legs.into())])
        })
        .collect();
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|(&e, edge)| {
            if edge.is_loop() {
                obj(vec![("id", e.0.into()), ("loop", edge.ends[0].0.into()), ("thickness", edge.thickness.into())])
            } else {
                let ends: Vec<Value> = edge.ends.iter().map(|v| Value::from(v.0)).collect();
                obj(vec![("ends", ends.into()), ("id", e.0.into()), ("thickness", edge.thickness.into())])
            }
        })
        .collect();
    let markings: Vec<Value> = g
        .edge_markings()
        .iter()
        .map(|(&m, mk)| {
            obj(vec![
                ("edge", mk.edge.0.into()),
                ("from", mk.from.0.into()),
                ("id", m.0.into()),
                ("position", rational_to_string(mk.position).into()),
            ])
        })
        .collect();
    obj(vec![("edge_markings", markings.into()), ("edges", edges.into()), ("vertices", vertices.into())])
}

fn id_list<'a>(ids: impl IntoIterator<Item = &'a VertexId>) -> Value {
    ids.into_iter().map(|v| Value::from(v.0)).collect::<Vec<_>>().into()
}

pub fn model_to_value(top: &DualGraph, exceptional: &BTreeSet<VertexId>) -> Value {
    let mut v = graph_to_value(top);
    if let Value::Object(m) = &mut v {
        m.insert("exceptional".into(), id_list(exceptional));
        m.sort_keys();
    }
    v
}

pub fn cover_to_value(c: &CoverDatum) -> Value {
    let mut pairs = vec![
        ("edge_dilation", id_map(&c.edge_dilation, |&k| k.into())),
        ("edge_map", id_map(&c.edge_map, |y| y.0.into())),
        ("global_degree", c.global_degree.into()),
        ("leg_map", id_map(&c.leg_map, |n| n.0.into())),
        ("source", graph_to_value(&c.source)),
        ("target", graph_to_value(&c.target)),
        ("vertex_degree", id_map(&c.vertex_degree, |&k| k.into())),
        ("vertex_map", id_map(&c.vertex_map, |w| w.0.into())),
    ];
    if !c.leg_degree.is_empty() {
        pairs.push(("leg_degree", id_map(&c.leg_degree, |&k| k.into())));
    }
    obj(pairs)
}

fn image_to_value(i: &Image) -> Value {
    match i {
        Image::Vertex(v) => obj(vec![("vertex", v.0.into())]),
        Image::Edge(e) => obj(vec![("edge", e.0.into())]),
    }
}

pub fn trace_to_value(t: &ContractionTrace) -> Value {
    obj(vec![
        ("edge_image", id_map(&t.edge_image, image_to_value)),
        ("merged", id_map(&t.merged, |parts| parts.iter().map(|&x| Value::from(x)).collect::<Vec<_>>().into())),
        ("vertex_image", id_map(&t.vertex_image, image_to_value)),
    ])
}

pub fn hull_result_to_value(h: &HullResult) -> Value {
    obj(vec![
        ("hull", graph_to_value(&h.hull)),
        ("kept_exceptional", id_list(&h.kept_exceptional)),
        ("trace", trace_to_value(&h.trace)),
    ])
}

pub fn steps_to_value(steps: &[CoverStep]) -> Value {
    steps
        .iter()
        .map(|s| {
            obj(vec![
                ("kind", s.kind.to_string().into()),
                ("source_vertices", id_list(&s.source_vertices)),
                ("target_vertex", s.target_vertex.0.into()),
            ])
        })
        .collect::<Vec<_>>()
        .into()
}

pub fn poset_to_value(p: &DominationPoset) -> Value {
    let mut below: Vec<Vec<usize>> = vec![Vec::new(); p.elements.len()];
    for &(i, j) in &p.covers_relation {
        below[j].push(i);
    }
    let adjacency: Vec<Value> = p
        .elements
        .iter()
        .zip(&below)
        .map(|(e, succ)| {
            let to: Vec<Value> = succ.iter().map(|&i| Value::from(p.elements[i].clone())).collect();
            obj(vec![("contracts_to", to.into()), ("element", e.clone().into())])
        })
        .collect();
    let relation: Vec<Value> = p.covers_relation.iter().map(|&(i, j)| Value::from(vec![i, j])).collect();
    obj(vec![
        ("adjacency", adjacency.into()),
        ("confluent", check_confluence(p).into()),
        ("covers_relation", relation.into()),
        ("elements", p.elements.clone().into()),
        ("minimal_elements", p.minimal_elements.clone().into()),
    ])
}

pub fn action_to_value(a: &ActionFile) -> Value {
    let elements: Vec<Value> = a
        .action
        .elements
        .iter()
        .map(|g| {
            obj(vec![
                ("edges", id_map(&g.edges, |e| e.0.into())),
                ("flipped_loops", g.flipped_loops.iter().map(|e| Value::from(e.0)).collect::<Vec<_>>().into()),
                ("legs", id_map(&g.legs, |l| l.0.into())),
                ("vertices", id_map(&g.vertices, |v| v.0.into())),
            ])
        })
        .collect();
    let mut pairs = vec![("elements", elements.into())];
    if let Some(orders) = &a.edge_stabilizer_orders {
        pairs.push(("edge_stabilizer_orders", id_map(orders, |&k| k.into())));
    }
    if !a.quotient_genera.is_empty() {
        pairs.push(("quotient_genera", id_map(&a.quotient_genera, |&g| g.into())));
    }
    obj(pairs)
}

pub fn document_to_value(d: &Document) -> Value {
    match d {
        Document::Graph(g) => graph_to_value(g),
        Document::Model(g, ex) => model_to_value(g, ex),
        Document::Cover(c) => cover_to_value(c),
    }
}

// ---------------------------------------------------------------- parsing

struct Reader<'a> {
    d: &'a mut Diagnostics,
}

impl Reader<'_> {
    fn schema(&mut self, at: &str, msg: impl Into<String>) {
        self.d.push("schema", [at.to_string()], msg);
    }

    fn object<'v>(&mut self, v: &'v Value, at: &str) -> Option<&'v Map<String, Value>> {
        let o = v.as_object();
        if o.is_none() {
            self.schema(at, format!("{at} must be an object"));
        }
        o
    }

    fn array<'v>(&mut self, v: Option<&'v Value>, at: &str, required: bool) -> &'v [Value] {
        match v {
            Some(Value::Array(a)) => a,
            None if !required => &[],
            _ => {
                self.schema(at, format!("{at} must be a list"));
                &[]
            }
        }
    }

    fn uint(&mut self, v: Option<&Value>, at: &str) -> Option<u64> {
        let x = v.and_then(Value::as_u64);
        if x.is_none() {
            self.schema(at, format!("{at} must be a non-negative integer"));
        }
        x
    }

    fn id(&mut self, v: Option<&Value>, at: &str) -> Option<u32> {
        match self.uint(v, at) {
            Some(x) if x <= u32::MAX as u64 => Some(x as u32),
            Some(_) => {
                self.schema(at, format!("{at} does not fit in 32 bits"));
                None
            }
            None => None,
        }
    }

    fn key_id(&mut self, k: &str, at: &str) -> Option<u32> {
        let x = k.parse::<u32>().ok();
        if x.is_none() {
            self.schema(at, format!("key {k:?} of {at} is not an id"));
        }
        x
    }

    fn graph(&mut self, v: &Value, at: &str) -> DualGraph {
        let mut g = DualGraph::new();
        let Some(o) = self.object(v, at) else { return g };
        if !o.contains_key("vertices") {
            self.schema(at, format!("{at} has no \"vertices\""));
        }
        let mut legs_seen = BTreeSet::new();
        for (i, vx) in self.array(o.get("vertices"), &format!("{at}.vertices"), false).iter().enumerate() {
            let here = format!("{at}.vertices[{i}]");
            let Some(vo) = self.object(vx, &here) else { continue };
            let Some(id) = self.id(vo.get("id"), &format!("{here}.id")) else { continue };
            let genus = match vo.get("genus") {
                Some(Value::Number(n)) if n.as_i64().is_some_and(|x| x < 0) => {
                    self.d.push("genus-nonnegative", [format!("v{id}")], format!("vertex v{id} has negative genus {n}"));
                    continue;
                }
                other => match self.id(other, &format!("{here}.genus")) {
                    Some(x) => x,
                    None => continue,
                },
            };
            if g.contains_vertex(VertexId(id)) {
                self.d.push("duplicate-id", [format!("v{id}")], format!("vertex id {id} appears twice"));
                continue;
            }
            g.insert_vertex(VertexId(id), genus);
            for (j, l) in self.array(vo.get("legs"), &format!("{here}.legs"), false).iter().enumerate() {
                let Some(l) = self.id(Some(l), &format!("{here}.legs[{j}]")) else { continue };
                if !legs_seen.insert(l) {
                    self.d.push("duplicate-id", [format!("l{l}")], format!("leg id {l} appears twice"));
                    continue;
                }
                g.insert_leg(LegId(l), VertexId(id));
            }
        }
        for (i, ex) in self.array(o.get("edges"), &format!("{at}.edges"), false).iter().enumerate() {
            let here = format!("{at}.edges[{i}]");
            let Some(eo) = self.object(ex, &here) else { continue };
            let Some(id) = self.id(eo.get("id"), &format!("{here}.id")) else { continue };
            let ends = match (eo.get("ends"), eo.get("loop")) {
                (Some(Value::Array(a)), None) if a.len() == 2 => {
                    match (self.id(a.first(), &format!("{here}.ends")), self.id(a.get(1), &format!("{here}.ends"))) {
                        (Some(x), Some(y)) => [x, y],
                        _ => continue,
                    }
                }
                (None, Some(l)) => match self.id(Some(l), &format!("{here}.loop")) {
                    Some(x) => [x, x],
                    None => continue,
                },
                _ => {
                    self.schema(&here, format!("{here} needs exactly one of \"ends\": [a, b] or \"loop\": v"));
                    continue;
                }
            };
            let thickness = match eo.get("thickness") {
                Some(Value::Number(n)) if n.as_i64().is_some_and(|x| x < 0) => {
                    self.d.push("thickness-positive", [format!("e{id}")], format!("edge e{id} has thickness {n}"));
                    continue;
                }
                other => match self.uint(other, &format!("{here}.thickness")) {
                    Some(t) => t,
                    None => continue,
                },
            };
            if g.edge(EdgeId(id)).is_some() {
                self.d.push("duplicate-id", [format!("e{id}")], format!("edge id {id} appears twice"));
                continue;
            }
            g.insert_edge(EdgeId(id), VertexId(ends[0]), VertexId(ends[1]), thickness);
        }
        for (i, mx) in self.array(o.get("edge_markings"), &format!("{at}.edge_markings"), false).iter().enumerate() {
            let here = format!("{at}.edge_markings[{i}]");
            let Some(mo) = self.object(mx, &here) else { continue };
            let id = self.id(mo.get("id"), &format!("{here}.id"));
            let edge = self.id(mo.get("edge"), &format!("{here}.edge"));
            let from = self.id(mo.get("from"), &format!("{here}.from"));
            let position = match mo.get("position") {
                Some(Value::String(s)) => parse_rational(s),
                Some(Value::Number(n)) => n.as_i64().map(Position::from_integer),
                _ => None,
            };
            let (Some(id), Some(edge), Some(from)) = (id, edge, from) else { continue };
            let Some(position) = position else {
                self.d.push(
                    "rational-syntax",
                    [format!("m{id}")],
                    format!("marking m{id} position must be \"p/q\" with q > 0"),
                );
                continue;
            };
            if g.edge_markings().contains_key(&MarkingId(id)) {
                self.d.push("duplicate-id", [format!("m{id}")], format!("marking id {id} appears twice"));
                continue;
            }
            g.insert_edge_marking(MarkingId(id), EdgeMarking { edge: EdgeId(edge), from: VertexId(from), position });
        }
        g
    }

    fn vertex_set(&mut self, v: Option<&Value>, at: &str) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for (i, x) in self.array(v, at, false).iter().enumerate() {
            if let Some(id) = self.id(Some(x), &format!("{at}[{i}]")) {
                if !out.insert(VertexId(id)) {
                    self.d.push("duplicate-id", [format!("v{id}")], format!("{at} lists v{id} twice"));
                }
            }
        }
        out
    }

    fn map<K: Ord, V>(
        &mut self,
        v: Option<&Value>,
        at: &str,
        key: impl Fn(u32) -> K,
        val: impl Fn(u64) -> Option<V>,
    ) -> BTreeMap<K, V> {
        let mut out = BTreeMap::new();
        let Some(v) = v else { return out };
        let Some(o) = self.object(v, at) else { return out };
        for (k, x) in o {
            let Some(k) = self.key_id(k, at) else { continue };
            let here = format!("{at}.{k}");
            match self.uint(Some(x), &here).and_then(&val) {
                Some(x) => {
                    out.insert(key(k), x);
                }
                None => self.schema(&here, format!("{here} is out of range")),
            }
        }
        out
    }

    fn cover(&mut self, o: &Map<String, Value>) -> CoverDatum {
        let id32 = |x: u64| u32::try_from(x).ok();
        let gd = self.uint(o.get("global_degree"), "global_degree").unwrap_or(0);
        CoverDatum {
            source: self.graph(o.get("source").unwrap_or(&Value::Null), "source"),
            target: self.graph(o.get("target").unwrap_or(&Value::Null), "target"),
            vertex_map: self.map(o.get("vertex_map"), "vertex_map", VertexId, |x| id32(x).map(VertexId)),
            edge_map: self.map(o.get("edge_map"), "edge_map", EdgeId, |x| id32(x).map(EdgeId)),
            vertex_degree: self.map(o.get("vertex_degree"), "vertex_degree", VertexId, Some),
            edge_dilation: self.map(o.get("edge_dilation"), "edge_dilation", EdgeId, Some),
            global_degree: gd,
            leg_map: self.map(o.get("leg_map"), "leg_map", LegId, |x| id32(x).map(LegId)),
            leg_degree: self.map(o.get("leg_degree"), "leg_degree", LegId, Some),
        }
    }
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        let mut d = Diagnostics::new();
        d.push("parse", [format!("line {}", e.line())], e.to_string());
        Error::Invalid(d)
    })
}

fn finish<T>(d: Diagnostics, x: T) -> Result<T> {
    d.into_result().map(|_| x)
}

/// Parses any of the graph, model and cover formats, telling them apart by
/// their keys.
pub fn parse_document(text: &str) -> Result<Document> {
    let v = parse_value(text)?;
    let mut d = Diagnostics::new();
    let mut r = Reader { d: &mut d };
    let doc = match v.as_object() {
        Some(o) if o.contains_key("source") || o.contains_key("target") => Document::Cover(r.cover(o)),
        Some(o) if o.contains_key("exceptional") => {
            let g = r.graph(&v, "model");
            let ex = r.vertex_set(o.get("exceptional"), "exceptional");
            Document::Model(g, ex)
        }
        _ => Document::Graph(r.graph(&v, "graph")),
    };
    finish(d, doc)
}

pub fn parse_graph(text: &str) -> Result<DualGraph> {
    match parse_document(text)? {
        Document::Graph(g) => Ok(g),
        _ => Err(wrong_kind("a graph")),
    }
}

pub fn parse_model(text: &str) -> Result<(DualGraph, BTreeSet<VertexId>)> {
    match parse_document(text)? {
        Document::Model(g, ex) => Ok((g, ex)),
        _ => Err(wrong_kind("a model")),
    }
}

pub fn parse_cover(text: &str) -> Result<CoverDatum> {
    match parse_document(text)? {
        Document::Cover(c) => Ok(c),
        _ => Err(wrong_kind("a cover")),
    }
}

fn wrong_kind(what: &str) -> Error {
    let mut d = Diagnostics::new();
    d.push("schema", [], format!("expected {what}"));
    Error::Invalid(d)
}

pub fn parse_action(text: &str) -> Result<ActionFile> {
    let v = parse_value(text)?;
    let mut d = Diagnostics::new();
    let mut r = Reader { d: &mut d };
    let mut out = ActionFile::default();
    if let Some(o) = r.object(&v, "action") {
        let id32 = |x: u64| u32::try_from(x).ok();
        for (i, ex) in r.array(o.get("elements"), "elements", true).iter().enumerate() {
            let at = format!("elements[{i}]");
            let Some(eo) = r.object(ex, &at) else { continue };
            let mut flipped_loops = BTreeSet::new();
            for (j, f) in r.array(eo.get("flipped_loops"), &format!("{at}.flipped_loops"), false).iter().enumerate() {
                if let Some(e) = r.id(Some(f), &format!("{at}.flipped_loops[{j}]")) {
                    flipped_loops.insert(EdgeId(e));
                }
            }
            out.action.elements.push(Automorphism {
                vertices: r.map(eo.get("vertices"), &format!("{at}.vertices"), VertexId, |x| id32(x).map(VertexId)),
                edges: r.map(eo.get("edges"), &format!("{at}.edges"), EdgeId, |x| id32(x).map(EdgeId)),
                legs: r.map(eo.get("legs"), &format!("{at}.legs"), LegId, |x| id32(x).map(LegId)),
                flipped_loops,
            });
        }
        if o.contains_key("edge_stabilizer_orders") {
            out.edge_stabilizer_orders =
                Some(r.map(o.get("edge_stabilizer_orders"), "edge_stabilizer_orders", EdgeId, Some));
        }
        out.quotient_genera = r.map(o.get("quotient_genera"), "quotient_genera", VertexId, id32);
    }
    finish(d, out)
}

// -------------------------------------------------------------------- DOT

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn graph_body(out: &mut String, g: &DualGraph, prefix: &str, exceptional: Option<&BTreeSet<VertexId>>, edge_op: &str) {
    for (&v, d) in g.vertices() {
        let style = if exceptional.is_some_and(|ex| ex.contains(&v)) { ", style=dashed" } else { "" };
        let _ = writeln!(out, "  {prefix}v{} [label={}{style}];", v.0, quote(&format!("{}:g={}", v.0, d.genus)));
    }
    for (&e, edge) in g.edges() {
        let mut label = format!("t={}", edge.thickness);
        for (m, mk) in g.edge_markings() {
            if mk.edge == e {
                let _ = write!(label, " {m}@{} from {}", rational_to_string(mk.position), mk.from);
            }
        }
        let _ = writeln!(
            out,
            "  {prefix}v{} {edge_op} {prefix}v{} [label={}{}];",
            edge.ends[0].0,
            edge.ends[1].0,
            quote(&label),
            if edge_op == "->" { ", dir=none" } else { "" }
        );
    }
    for (&l, &v) in g.legs() {
        let _ = writeln!(out, "  {prefix}l{} [shape=diamond, label={}];", l.0, quote(&l.to_string()));
        let _ = writeln!(
            out,
            "  {prefix}l{} {edge_op} {prefix}v{}{};",
            l.0,
            v.0,
            if edge_op == "->" { " [dir=none]" } else { "" }
        );
    }
}

pub fn graph_to_dot(g: &DualGraph) -> String {
    let mut out = String::from("graph G {\n");
    graph_body(&mut out, g, "", None, "--");
    out.push_str("}\n");
    out
}

/// Exceptional components are drawn dashed.
pub fn model_to_dot(top: &DualGraph, exceptional: &BTreeSet<VertexId>) -> String {
    let mut out = String::from("graph M {\n");
    graph_body(&mut out, top, "", Some(exceptional), "--");
    out.push_str("}\n");
    out
}

/// Source above target, with dashed map arrows.
pub fn cover_to_dot(c: &CoverDatum) -> String {
    let mut out = String::from("digraph C {\n  rankdir=TB;\n");
    out.push_str("  subgraph cluster_source {\n  label=\"source\";\n");
    graph_body(&mut out, &c.source, "s", None, "->");
    out.push_str("  }\n  subgraph cluster_target {\n  label=\"target\";\n");
    graph_body(&mut out, &c.target, "t", None, "->");
    out.push_str("  }\n");
    for (v, w) in &c.vertex_map {
        let d = c.vertex_degree.get(v).copied().unwrap_or(0);
        let _ = writeln!(out, "  sv{} -> tv{} [style=dashed, label=\"d={d}\"];", v.0, w.0);
    }
    out.push_str("}\n");
    out
}

/// Hasse diagram, arrows pointing from a model to its contractions.
pub fn poset_to_dot(p: &DominationPoset) -> String {
    let mut out = String::from("digraph P {\n");
    let minimal: BTreeSet<usize> = p.minimal_elements.iter().copied().collect();
    for (i, e) in p.elements.iter().enumerate() {
        let shape = if minimal.contains(&i) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  n{i} [label=\"{i}\", shape={shape}, tooltip={}];", quote(e));
    }
    for &(i, j) in &p.covers_relation {
        let _ = writeln!(out, "  n{j} -> n{i};");
    }
    out.push_str("}\n");
    out
}

pub fn document_to_dot(d: &Document) -> String {
    match d {
        Document::Graph(g) => graph_to_dot(g),
        Document::Model(g, ex) => model_to_dot(g, ex),
        Document::Cover(c) => cover_to_dot(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DualGraph {
        DualGraph::new()
            .with_vertex(0, 1)
            .with_vertex(1, 0)
            .with_vertex(10, 2)
            .with_edge(0, 0, 1, 2)
            .with_edge(1, 1, 1, 3)
            .with_edge(2, 10, 0, 1)
            .with_leg(4, 1)
            .with_edge_marking(0, 0, 1, Position::new(1, 2))
    }

    #[test]
    fn graph_round_trip_is_byte_stable() {
        let g = sample();
        let text = to_text(&graph_to_value(&g));
        assert_eq!(parse_graph(&text).unwrap(), g);
        let again = to_text(&graph_to_value(&parse_graph(&text).unwrap()));
        assert_eq!(text, again);
        assert!(text.contains("\"loop\": 1"));
        assert!(text.contains("\"position\": \"1/2\""));
    }

    #[test]
    fn cover_round_trip() {
        let mut c = CoverDatum::identity(&sample());
        c.leg_degree.insert(LegId(4), 1);
        let text = to_text(&cover_to_value(&c));
        assert_eq!(parse_cover(&text).unwrap(), c);
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("6/4"), Some(Position::new(3, 2)));
        assert_eq!(parse_rational("3"), Some(Position::from_integer(3)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1/-2"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(rational_to_string(Position::from_integer(3)), "3/1");
    }

    #[test]
    fn parse_rules() {
        let rule = |t: &str| parse_document(t).unwrap_err().rule();
        assert_eq!(rule("{"), "parse");
        assert_eq!(rule(r#"{"vertices":[{"id":0,"genus":-1}]}"#), "genus-nonnegative");
        assert_eq!(rule(r#"{"vertices":[{"id":0,"genus":1},{"id":0,"genus":2}]}"#), "duplicate-id");
        assert_eq!(
            rule(r#"{"vertices":[{"id":0,"genus":1}],"edges":[{"id":0,"loop":0,"thickness":2}],"edge_markings":[{"id":0,"edge":0,"from":0,"position":"1/x"}]}"#),
            "rational-syntax"
        );
    }

    #[test]
    fn dot_shapes() {
        let dot = graph_to_dot(&sample());
        assert!(dot.contains("v0 [label=\"0:g=1\"];"));
        assert!(dot.contains("[label=\"t=3\"]"));
        assert!(dot.contains("shape=diamond"));
        let cdot = cover_to_dot(&CoverDatum::identity(&sample()));
        assert!(cdot.contains("style=dashed"));
    }
}
