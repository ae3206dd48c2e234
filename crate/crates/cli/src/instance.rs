//! The instance file format.
//!
//! A line-oriented text format describing a base graph, an optional
//! correlated block, and an optional induced-matching block:
//!
//! ```text
//! svc-instance v1
//! id example
//! n 3
//! e 0 1 1/2
//! e 0 2 0.5
//! e 1 2 1
//! correlated
//! e2 0 2
//! scenario 1/2 : 0
//! scenario 1/2 : 2
//! rs
//! side 3
//! matching 0 3
//! ```
//!
//! Edges must be listed in canonical order (`u < v`, sorted), because the
//! correlated and matching blocks address them by index. Probabilities are
//! decimal literals or exact rationals `a/b`; rationals are preserved and
//! drive the exact enumeration paths. `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use stochastic_vc::graph::{BaseGraph, Prob};
use stochastic_vc::lowerbound::{LowerBoundInstance, MildlyCorrelatedModel, RsGraph, Scenario};
use stochastic_vc::model::Model;

use crate::error::{CliError, Result};

pub const FORMAT_TAG: &str = "svc-instance v1";

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedInstance {
    pub id: String,
    pub base: BaseGraph,
    pub correlated: Option<CorrelatedBlock>,
    pub rs: Option<RsBlock>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedBlock {
    pub e2: Vec<usize>,
    /// `(probability, realized E2 edge indices)` per scenario.
    pub scenarios: Vec<(Prob, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RsBlock {
    pub side: usize,
    /// Base-edge indices of each induced matching.
    pub matchings: Vec<Vec<usize>>,
}

impl ParsedInstance {
    pub fn plain(id: impl Into<String>, base: BaseGraph) -> Self {
        ParsedInstance {
            id: id.into(),
            base,
            correlated: None,
            rs: None,
        }
    }

    pub fn from_lowerbound(id: impl Into<String>, inst: &LowerBoundInstance) -> Self {
        let model = inst.model();
        ParsedInstance {
            id: id.into(),
            base: model.base().clone(),
            correlated: Some(CorrelatedBlock {
                e2: model.e2_indices().to_vec(),
                scenarios: model
                    .scenarios()
                    .iter()
                    .map(|s| (s.prob(), s.realized().to_vec()))
                    .collect(),
            }),
            rs: Some(RsBlock {
                side: inst.side(),
                matchings: inst.matchings().to_vec(),
            }),
        }
    }

    /// The stochastic model this instance denotes.
    pub fn to_model(&self) -> Result<Model> {
        match &self.correlated {
            None => Ok(Model::Independent(self.base.clone())),
            Some(block) => {
                let scenarios: Vec<Scenario> = block
                    .scenarios
                    .iter()
                    .map(|(p, realized)| Scenario::new(realized.clone(), *p))
                    .collect();
                let model =
                    MildlyCorrelatedModel::new(self.base.clone(), block.e2.clone(), scenarios)?;
                Ok(Model::Correlated(model))
            }
        }
    }

    /// The induced-matching structure, when present: base edges between the
    /// two sides become the bipartite edge list.
    pub fn to_rs_graph(&self) -> Result<RsGraph> {
        let block = self
            .rs
            .as_ref()
            .ok_or_else(|| CliError::Validation("instance has no rs block".into()))?;
        let side = block.side;
        let mut local_of_base = vec![usize::MAX; self.base.edge_count()];
        let mut edges = Vec::new();
        for (i, &(u, v)) in self.base.edges().iter().enumerate() {
            if (u as usize) < side && (side..2 * side).contains(&(v as usize)) {
                local_of_base[i] = edges.len();
                edges.push((u, v - side as u32));
            }
        }
        let matchings: Vec<Vec<usize>> = block
            .matchings
            .iter()
            .map(|m| {
                m.iter()
                    .map(|&bi| {
                        if bi >= local_of_base.len() || local_of_base[bi] == usize::MAX {
                            Err(CliError::Validation(format!(
                                "matching references edge {bi}, which is not a side-to-side edge"
                            )))
                        } else {
                            Ok(local_of_base[bi])
                        }
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RsGraph::new(side, edges, matchings))
    }
}

fn parse_prob(token: &str) -> Option<Prob> {
    if let Some((a, b)) = token.split_once('/') {
        let numer: u64 = a.parse().ok()?;
        let denom: u64 = b.parse().ok()?;
        if denom == 0 {
            return None;
        }
        Some(Prob::ratio(numer, denom))
    } else if let Ok(int) = token.parse::<u64>() {
        Some(Prob::ratio(int, 1))
    } else {
        let v: f64 = token.parse().ok()?;
        Some(Prob::new(v))
    }
}

fn format_prob(p: Prob) -> String {
    match p.exact() {
        Some((a, 1)) => format!("{a}"),
        Some((a, b)) => format!("{a}/{b}"),
        None => format!("{}", p.value()),
    }
}

struct Cursor<'a> {
    path: &'a str,
    line_no: usize,
    line: &'a str,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, col: usize, msg: impl Into<String>) -> Result<T> {
        Err(CliError::Parse {
            path: self.path.to_string(),
            line: self.line_no,
            col,
            msg: msg.into(),
        })
    }

    fn tokens(&self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (i, ch) in self.line.char_indices() {
            if ch == '#' {
                break;
            }
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    out.push((s + 1, &self.line[s..i]));
                }
            } else if start.is_none() {
                start = Some(i);
            }
        }
        if let Some(s) = start {
            let end = self.line.find('#').unwrap_or(self.line.len());
            out.push((s + 1, self.line[s..end].trim_end()));
        }
        out
    }
}

pub fn parse_instance_str(text: &str, path: &str) -> Result<ParsedInstance> {
    #[derive(PartialEq)]
    enum Section {
        Graph,
        Correlated,
        Rs,
    }

    let mut id: Option<String> = None;
    let mut n: Option<usize> = None;
    let mut weighted: Vec<(u32, u32, Prob)> = Vec::new();
    let mut e2: Option<Vec<usize>> = None;
    let mut scenarios: Vec<(Prob, Vec<usize>)> = Vec::new();
    let mut side: Option<usize> = None;
    let mut matchings: Vec<Vec<usize>> = Vec::new();
    let mut section = Section::Graph;
    let mut saw_tag = false;

    for (idx, raw) in text.lines().enumerate() {
        let cursor = Cursor {
            path,
            line_no: idx + 1,
            line: raw,
        };
        let tokens = cursor.tokens();
        if tokens.is_empty() {
            continue;
        }
        if !saw_tag {
            let joined = tokens.iter().map(|&(_, t)| t).collect::<Vec<_>>().join(" ");
            if joined != FORMAT_TAG {
                return cursor.err(tokens[0].0, format!("expected header '{FORMAT_TAG}'"));
            }
            saw_tag = true;
            continue;
        }

        let (kcol, keyword) = tokens[0];
        match keyword {
            "id" => {
                if tokens.len() != 2 {
                    return cursor.err(kcol, "id takes one token");
                }
                id = Some(tokens[1].1.to_string());
            }
            "n" => {
                if tokens.len() != 2 {
                    return cursor.err(kcol, "n takes one count");
                }
                let (col, tok) = tokens[1];
                n = Some(match tok.parse() {
                    Ok(v) => v,
                    Err(_) => return cursor.err(col, "vertex count must be an integer"),
                });
            }
            "e" => {
                if section != Section::Graph {
                    return cursor.err(kcol, "edge lines belong before the block sections");
                }
                if tokens.len() != 4 {
                    return cursor.err(kcol, "edge lines read: e <u> <v> <prob>");
                }
                let parse_vertex = |(col, tok): (usize, &str)| -> Result<u32> {
                    tok.parse().map_err(|_| CliError::Parse {
                        path: path.to_string(),
                        line: idx + 1,
                        col,
                        msg: "endpoint must be an integer".into(),
                    })
                };
                let u = parse_vertex(tokens[1])?;
                let v = parse_vertex(tokens[2])?;
                let (pcol, ptok) = tokens[3];
                let p = match parse_prob(ptok) {
                    Some(p) => p,
                    None => return cursor.err(pcol, "probability must be decimal or a/b"),
                };
                if u >= v {
                    return cursor.err(tokens[1].0, "edges must be listed with u < v");
                }
                if let Some(&(lu, lv, _)) = weighted.last() {
                    if (u, v) <= (lu, lv) {
                        return cursor.err(
                            tokens[1].0,
                            "edges must be listed in canonical sorted order",
                        );
                    }
                }
                weighted.push((u, v, p));
            }
            "correlated" => section = Section::Correlated,
            "rs" => section = Section::Rs,
            "e2" => {
                if section != Section::Correlated {
                    return cursor.err(kcol, "e2 belongs to the correlated block");
                }
                let mut indices = Vec::new();
                for &(col, tok) in &tokens[1..] {
                    match tok.parse() {
                        Ok(v) => indices.push(v),
                        Err(_) => return cursor.err(col, "edge index must be an integer"),
                    }
                }
                e2 = Some(indices);
            }
            "scenario" => {
                if section != Section::Correlated {
                    return cursor.err(kcol, "scenario belongs to the correlated block");
                }
                if tokens.len() < 3 || tokens[2].1 != ":" {
                    return cursor.err(kcol, "scenario lines read: scenario <prob> : <edges...>");
                }
                let (pcol, ptok) = tokens[1];
                let p = match parse_prob(ptok) {
                    Some(p) => p,
                    None => return cursor.err(pcol, "probability must be decimal or a/b"),
                };
                let mut realized = Vec::new();
                for &(col, tok) in &tokens[3..] {
                    match tok.parse() {
                        Ok(v) => realized.push(v),
                        Err(_) => return cursor.err(col, "edge index must be an integer"),
                    }
                }
                scenarios.push((p, realized));
            }
            "side" => {
                if section != Section::Rs {
                    return cursor.err(kcol, "side belongs to the rs block");
                }
                let (col, tok) = tokens[1];
                side = Some(match tok.parse() {
                    Ok(v) => v,
                    Err(_) => return cursor.err(col, "side must be an integer"),
                });
            }
            "matching" => {
                if section != Section::Rs {
                    return cursor.err(kcol, "matching belongs to the rs block");
                }
                let mut indices = Vec::new();
                for &(col, tok) in &tokens[1..] {
                    match tok.parse() {
                        Ok(v) => indices.push(v),
                        Err(_) => return cursor.err(col, "edge index must be an integer"),
                    }
                }
                matchings.push(indices);
            }
            other => {
                return cursor.err(kcol, format!("unknown keyword '{other}'"));
            }
        }
    }

    if !saw_tag {
        return Err(CliError::Parse {
            path: path.to_string(),
            line: 1,
            col: 1,
            msg: format!("missing header '{FORMAT_TAG}'"),
        });
    }
    let n =
        n.ok_or_else(|| CliError::Validation("missing vertex count line 'n <count>'".into()))?;
    let base = BaseGraph::build(n, &weighted).map_err(CliError::Core)?;

    let correlated = match (e2, scenarios.is_empty()) {
        (None, true) => None,
        (Some(e2), false) => Some(CorrelatedBlock { e2, scenarios }),
        (Some(_), true) => {
            return Err(CliError::Validation(
                "correlated block has e2 but no scenarios".into(),
            ))
        }
        (None, false) => {
            return Err(CliError::Validation(
                "correlated block has scenarios but no e2 line".into(),
            ))
        }
    };
    let rs = match (side, matchings.is_empty()) {
        (None, true) => None,
        (Some(side), _) => Some(RsBlock { side, matchings }),
        (None, false) => {
            return Err(CliError::Validation(
                "rs block has matchings but no side line".into(),
            ))
        }
    };

    let parsed = ParsedInstance {
        id: id.unwrap_or_else(|| {
            Path::new(path)
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "instance".into())
        }),
        base,
        correlated,
        rs,
    };
    // Surface structural problems (scenario sums, e2 range) at parse time.
    parsed.to_model()?;
    if parsed.rs.is_some() {
        parsed.to_rs_graph()?;
    }
    Ok(parsed)
}

pub fn parse_instance(path: impl AsRef<Path>) -> Result<ParsedInstance> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_instance_str(&text, &path.to_string_lossy())
}

pub fn instance_to_string(inst: &ParsedInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_TAG}");
    let _ = writeln!(out, "id {}", inst.id);
    let _ = writeln!(out, "n {}", inst.base.vertex_count());
    for (i, &(u, v)) in inst.base.edges().iter().enumerate() {
        let _ = writeln!(out, "e {u} {v} {}", format_prob(inst.base.prob(i)));
    }
    if let Some(block) = &inst.correlated {
        let _ = writeln!(out, "correlated");
        let indices: Vec<String> = block.e2.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "e2 {}", indices.join(" "));
        for (p, realized) in &block.scenarios {
            let listed: Vec<String> = realized.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "scenario {} : {}", format_prob(*p), listed.join(" "));
        }
    }
    if let Some(block) = &inst.rs {
        let _ = writeln!(out, "rs");
        let _ = writeln!(out, "side {}", block.side);
        for matching in &block.matchings {
            let listed: Vec<String> = matching.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(out, "matching {}", listed.join(" "));
        }
    }
    out
}

pub fn write_instance(inst: &ParsedInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, instance_to_string(inst))?;
    Ok(())
}
