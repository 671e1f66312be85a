//! Instance file format.
//!
//! ```text
//! # comment
//! model gt
//! n 3
//! nodes a b v
//! edge a v
//! edge b v
//! table v
//!   {} 0/1
//!   {a} 1/5
//!   {b} 1/5
//!   {a,b} 3/5
//! ```
//!
//! Threshold tables (`model gt`) must list all `2^indeg` subsets of the
//! in-neighbours; a node with no in-neighbours may omit its table. Triggering
//! tables (`model triggering`) list the subsets with nonzero probability.
//! Serialization is canonical: header, edges in `(to, from)` order, then one
//! table per node with subsets in mask order.

use std::collections::HashMap;
use std::fmt::Write;

use num_traits::{One, Zero};

use crate::diffusion::{validate_gt, DirectedGraph, GtInstance, TriggeringInstance};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::{GroundSet, SetFunction};

/// Either kind of instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Gt(GtInstance),
    Triggering(TriggeringInstance),
}

impl Instance {
    pub fn graph(&self) -> &DirectedGraph {
        match self {
            Instance::Gt(g) => g.graph(),
            Instance::Triggering(t) => t.graph(),
        }
    }
}

/// `{a,b}` in the order of the ground set.
pub fn format_subset(ground: &GroundSet, mask: u32) -> String {
    format!("{{{}}}", ground.labels_of(mask).join(","))
}

/// `{a,b}` for a node set of a graph.
pub fn format_nodes(graph: &DirectedGraph, mask: u64) -> String {
    format!("{{{}}}", graph.labels_of(mask).join(","))
}

fn header(out: &mut String, model: &str, graph: &DirectedGraph) {
    let _ = writeln!(out, "model {model}");
    let _ = writeln!(out, "n {}", graph.n());
    let _ = writeln!(out, "nodes {}", graph.labels().join(" "));
    for (u, v) in graph.edges() {
        let _ = writeln!(out, "edge {} {}", graph.label(u), graph.label(v));
    }
}

fn tables(out: &mut String, graph: &DirectedGraph, tables: &[SetFunction], skip_zero: bool) {
    for (v, f) in tables.iter().enumerate() {
        let _ = writeln!(out, "table {}", graph.label(v));
        for (m, x) in f.values().iter().enumerate() {
            if skip_zero && x.is_zero() {
                continue;
            }
            let _ = writeln!(
                out,
                "  {} {}",
                format_subset(f.ground(), m as u32),
                rational::format(x)
            );
        }
    }
}

pub fn serialize_gt(inst: &GtInstance) -> String {
    let mut out = String::new();
    header(&mut out, "gt", inst.graph());
    tables(&mut out, inst.graph(), inst.thresholds(), false);
    out
}

pub fn serialize_triggering(inst: &TriggeringInstance) -> String {
    let mut out = String::new();
    header(&mut out, "triggering", inst.graph());
    tables(&mut out, inst.graph(), inst.dists(), true);
    out
}

pub fn serialize(inst: &Instance) -> String {
    match inst {
        Instance::Gt(g) => serialize_gt(g),
        Instance::Triggering(t) => serialize_triggering(t),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Model {
    Gt,
    Triggering,
}

/// A whitespace-separated token with its 1-based column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &line[s..i],
                    column: line[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

fn valid_label(s: &str) -> bool {
    !s.is_empty() && !s.contains(['{', '}', ',', '#'])
}

struct TableDraft {
    node: usize,
    line: usize,
    entries: HashMap<u32, Rational>,
}

struct Parser {
    model: Option<Model>,
    n: Option<usize>,
    graph: Option<DirectedGraph>,
    tables: Vec<TableDraft>,
}

impl Parser {
    fn graph(&self, line: usize, column: usize) -> Result<&DirectedGraph> {
        self.graph
            .as_ref()
            .ok_or_else(|| err(line, column, "`nodes` must come before edges and tables"))
    }

    fn node(&self, tok: &Token, line: usize) -> Result<usize> {
        self.graph(line, tok.column)?
            .index_of(tok.text)
            .ok_or_else(|| err(line, tok.column, format!("unknown node `{}`", tok.text)))
    }

    fn statement(&mut self, toks: &[Token], line: usize) -> Result<()> {
        let key = &toks[0];
        let args = &toks[1..];
        let arity = |want: usize| -> Result<()> {
            if args.len() == want {
                Ok(())
            } else {
                let column = args.get(want).map_or(key.column, |t| t.column);
                Err(err(
                    line,
                    column,
                    format!("`{}` takes {want} argument(s), got {}", key.text, args.len()),
                ))
            }
        };
        match key.text {
            "model" => {
                arity(1)?;
                if self.model.is_some() {
                    return Err(err(line, key.column, "duplicate `model`"));
                }
                self.model = Some(match args[0].text {
                    "gt" => Model::Gt,
                    "triggering" => Model::Triggering,
                    other => {
                        return Err(err(
                            line,
                            args[0].column,
                            format!("model `{other}` is not gt or triggering"),
                        ))
                    }
                });
            }
            "n" => {
                arity(1)?;
                if self.model.is_none() {
                    return Err(err(line, key.column, "`model` must come first"));
                }
                if self.n.is_some() {
                    return Err(err(line, key.column, "duplicate `n`"));
                }
                let n: usize = args[0].text.parse().map_err(|_| {
                    err(
                        line,
                        args[0].column,
                        format!("`{}` is not a node count", args[0].text),
                    )
                })?;
                if n > crate::diffusion::MAX_NODES {
                    return Err(err(line, args[0].column, format!("node count {n} exceeds 64")));
                }
                self.n = Some(n);
            }
            "nodes" => {
                let n = self
                    .n
                    .ok_or_else(|| err(line, key.column, "`n` must come before `nodes`"))?;
                if self.graph.is_some() {
                    return Err(err(line, key.column, "duplicate `nodes`"));
                }
                if args.len() != n {
                    return Err(err(
                        line,
                        key.column,
                        format!("expected {n} labels, got {}", args.len()),
                    ));
                }
                for (i, t) in args.iter().enumerate() {
                    if !valid_label(t.text) {
                        return Err(err(line, t.column, format!("invalid label `{}`", t.text)));
                    }
                    if args[..i].iter().any(|p| p.text == t.text) {
                        return Err(err(line, t.column, format!("duplicate label `{}`", t.text)));
                    }
                }
                self.graph = Some(DirectedGraph::new(args.iter().map(|t| t.text))?);
            }
            "edge" => {
                arity(2)?;
                let u = self.node(&args[0], line)?;
                let v = self.node(&args[1], line)?;
                let g = self.graph.as_mut().expect("checked by node()");
                if g.has_edge(u, v) {
                    return Err(err(line, key.column, "duplicate edge"));
                }
                g.add_edge(u, v)
                    .map_err(|e| err(line, key.column, e.to_string()))?;
            }
            "table" => {
                arity(1)?;
                let v = self.node(&args[0], line)?;
                if self.tables.iter().any(|t| t.node == v) {
                    return Err(err(
                        line,
                        args[0].column,
                        format!("duplicate table for `{}`", args[0].text),
                    ));
                }
                self.tables.push(TableDraft {
                    node: v,
                    line,
                    entries: HashMap::new(),
                });
            }
            other => return Err(err(line, key.column, format!("unknown statement `{other}`"))),
        }
        Ok(())
    }

    /// `{a,b} p/q` inside the current table.
    fn entry(&mut self, raw: &str, line: usize) -> Result<()> {
        let start = raw.find('{').expect("caller checked");
        let close = raw
            .find('}')
            .ok_or_else(|| err(line, start + 1, "unterminated subset"))?;
        let draft_node = self
            .tables
            .last()
            .map(|t| t.node)
            .ok_or_else(|| err(line, start + 1, "subset entry outside a table"))?;
        let graph = self.graph.as_ref().expect("tables need nodes");
        let ins = graph.in_neighbours(draft_node);
        let mut mask = 0u32;
        let inner = &raw[start + 1..close];
        let mut offset = start + 2;
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                let label = part.trim();
                let column = offset + part.find(label).unwrap_or(0);
                let u = graph
                    .index_of(label)
                    .ok_or_else(|| err(line, column, format!("unknown node `{label}`")))?;
                let j = ins.iter().position(|&w| w == u).ok_or_else(|| {
                    err(
                        line,
                        column,
                        format!(
                            "`{label}` is not an in-neighbour of `{}`",
                            graph.label(draft_node)
                        ),
                    )
                })?;
                if mask >> j & 1 == 1 {
                    return Err(err(line, column, format!("`{label}` repeated")));
                }
                mask |= 1 << j;
                offset += part.len() + 1;
            }
        }
        let rest = tokens(&raw[close + 1..]);
        let value_column = |t: &Token| close + 1 + t.column;
        let [value] = rest.as_slice() else {
            let column = rest.get(1).map_or(close + 2, value_column);
            return Err(err(
                line,
                column,
                "expected exactly one rational after the subset",
            ));
        };
        let x = rational::parse(value.text).ok_or_else(|| {
            err(
                line,
                value_column(value),
                format!("invalid rational `{}`", value.text),
            )
        })?;
        let draft = self.tables.last_mut().expect("checked above");
        if draft.entries.insert(mask, x).is_some() {
            return Err(err(line, start + 1, "duplicate subset"));
        }
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<Instance> {
        let model = self.model.ok_or_else(|| err(last_line, 1, "missing `model`"))?;
        let graph = self.graph.ok_or_else(|| err(last_line, 1, "missing `nodes`"))?;
        let n = graph.n();
        let mut drafts: Vec<Option<TableDraft>> = (0..n).map(|_| None).collect();
        for t in self.tables {
            let v = t.node;
            drafts[v] = Some(t);
        }
        let mut funcs = Vec::with_capacity(n);
        let mut lines = Vec::with_capacity(n);
        for (v, draft) in drafts.into_iter().enumerate() {
            let ground = graph.in_ground(v).map_err(|e| err(last_line, 1, e.to_string()))?;
            let size = 1usize << ground.len();
            let (line, mut entries) = match draft {
                Some(d) => (d.line, d.entries),
                None if ground.is_empty() => {
                    let default = match model {
                        Model::Gt => Rational::zero(),
                        Model::Triggering => Rational::one(),
                    };
                    funcs.push(SetFunction::new(ground, vec![default])?);
                    lines.push(last_line);
                    continue;
                }
                None => {
                    return Err(err(
                        last_line,
                        1,
                        format!("missing table for `{}`", graph.label(v)),
                    ))
                }
            };
            let values: Vec<Rational> = match model {
                Model::Gt => (0..size as u32)
                    .map(|m| {
                        entries.remove(&m).ok_or_else(|| {
                            err(
                                line,
                                1,
                                format!(
                                    "table of `{}` misses subset {}",
                                    graph.label(v),
                                    format_subset(&ground, m)
                                ),
                            )
                        })
                    })
                    .collect::<Result<_>>()?,
                Model::Triggering => {
                    let mut vals = vec![Rational::zero(); size];
                    for (m, x) in entries {
                        vals[m as usize] = x;
                    }
                    vals
                }
            };
            funcs.push(SetFunction::new(ground, values).map_err(|e| err(line, 1, e.to_string()))?);
            lines.push(line);
        }
        match model {
            Model::Gt => {
                let inst = GtInstance::new(graph, funcs)?;
                if let Some(v) = validate_gt(&inst).first() {
                    return Err(err(
                        lines[v.node],
                        1,
                        format!(
                            "threshold of `{}` is invalid: {}",
                            inst.graph().label(v.node),
                            v.violation
                        ),
                    ));
                }
                Ok(Instance::Gt(inst))
            }
            Model::Triggering => Ok(Instance::Triggering(TriggeringInstance::new(graph, funcs)?)),
        }
    }
}

/// Parses and validates an instance file.
///
/// Syntax and threshold errors carry line and column; a triggering table not
/// summing to one is reported as [`Error::Distribution`] with its deficit.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut p = Parser {
        model: None,
        n: None,
        graph: None,
        tables: Vec::new(),
    };
    let mut last = 1;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last = line;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('{') {
            p.entry(content, line)?;
            continue;
        }
        let toks = tokens(content);
        p.statement(&toks, line)?;
    }
    p.finish(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const NONSUB: &str = "model gt\nn 3\nnodes a b v\nedge a v\nedge b v\ntable v\n  {} 0/1\n  {a} 1/5\n  {b} 1/5\n  {a,b} 3/5\n";

    #[test]
    fn minimal_gt_file() {
        let Instance::Gt(g) = parse_instance("model gt\nn 1\nnodes v\n").unwrap() else {
            panic!("expected gt");
        };
        assert_eq!(g.n(), 1);
        assert_eq!(g.threshold(0).values(), &[Rational::zero()]);
    }

    #[test]
    fn nonsub_round_trip() {
        let inst = parse_instance(NONSUB).unwrap();
        let text = serialize(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(serialize(&parse_instance(&text).unwrap()), text);
        let Instance::Gt(g) = inst else { panic!() };
        assert_eq!(*g.threshold(2).value(0b11), ratio(3, 5));
    }

    #[test]
    fn subset_order_and_comments_are_free() {
        let text = "# header\nmodel gt\nn 3\nnodes a b v\nedge b v # late\nedge a v\ntable v\n  {b,a} 3/5\n  {a} 1/5\n  {b} 1/5\n  {} 0\n";
        assert_eq!(parse_instance(text).unwrap(), parse_instance(NONSUB).unwrap());
    }

    #[test]
    fn triggering_deficit() {
        let text = "model triggering\nn 2\nnodes u v\nedge u v\ntable v\n  {u} 9/10\n";
        match parse_instance(text) {
            Err(Error::Distribution { node, deficit, .. }) => {
                assert_eq!(node, "v");
                assert_eq!(deficit, ratio(1, 10));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triggering_round_trip() {
        let text =
            "model triggering\nn 2\nnodes u v\nedge u v\ntable u\n  {} 1/1\ntable v\n  {} 1/2\n  {u} 1/2\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(serialize(&inst), text);
    }

    fn parse_error(text: &str) -> (usize, usize, String) {
        match parse_instance(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        let (l, c, m) = parse_error("model gt\nn 2\nnodes u v\nedge u w\n");
        assert_eq!((l, c), (4, 8));
        assert!(m.contains("unknown node `w`"));

        let (l, c, _) = parse_error("model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n  {u} 1/x\n");
        assert_eq!((l, c), (7, 7));

        let (l, _, m) = parse_error("model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n");
        assert_eq!(l, 5);
        assert!(m.contains("misses subset {u}"), "{m}");

        let (l, c, _) = parse_error("model gt\nn 3\nnodes a b v\nedge a v\ntable v\n  {b} 1\n");
        assert_eq!((l, c), (6, 4));

        let (l, _, m) = parse_error("model gt\nn 2\nnodes u v\nedge u v\ntable v\n  {} 0\n  {u} 3/2\n");
        assert_eq!(l, 5);
        assert!(m.contains("invalid"), "{m}");

        let (l, c, _) = parse_error("model lt\n");
        assert_eq!((l, c), (1, 7));
    }
}
