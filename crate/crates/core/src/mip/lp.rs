use std::collections::BTreeMap;
use std::fmt::Write;

use super::{MipModel, Sense, VarKind};
use crate::error::{Error, Result};

fn term(out: &mut String, coef: f64, name: &str) {
    let sign = if coef < 0.0 { '-' } else { '+' };
    let mag = coef.abs();
    if mag == 1.0 {
        write!(out, " {sign} {name}").unwrap();
    } else {
        write!(out, " {sign} {mag} {name}").unwrap();
    }
}

fn num(v: f64) -> String {
    // `Display` for f64 prints the shortest string that round-trips.
    format!("{v}")
}

/// CPLEX LP text. Sections without content are omitted, so an empty model
/// is `Minimize / obj: 0 / Subject To / End`.
pub fn write_lp(m: &MipModel) -> String {
    let mut out = String::from("Minimize\n obj:");
    if m.objective.is_empty() {
        out.push_str(" 0");
    } else {
        for &(v, c) in &m.objective {
            term(&mut out, c, &m.vars[v].name);
        }
    }
    out.push_str("\nSubject To\n");
    for c in &m.constraints {
        write!(out, " {}:", c.name).unwrap();
        for &(v, coef) in &c.terms {
            term(&mut out, coef, &m.vars[v].name);
        }
        writeln!(out, " {} {}", c.sense.symbol(), num(c.rhs)).unwrap();
    }
    let bounded: Vec<_> = m
        .vars
        .iter()
        .filter(|v| v.kind == VarKind::Continuous && (v.lower != 0.0 || v.upper.is_some()))
        .collect();
    if !bounded.is_empty() {
        out.push_str("Bounds\n");
        for v in bounded {
            match v.upper {
                Some(u) => writeln!(out, " {} <= {} <= {}", num(v.lower), v.name, num(u)).unwrap(),
                None => writeln!(out, " {} >= {}", v.name, num(v.lower)).unwrap(),
            }
        }
    }
    let binaries: Vec<&str> = m.vars.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for chunk in binaries.chunks(8) {
            writeln!(out, " {}", chunk.join(" ")).unwrap();
        }
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub terms: Vec<(String, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The subset of LP format produced by [`write_lp`], name-based.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpModel {
    pub objective: Vec<(String, f64)>,
    pub rows: Vec<LpRow>,
    /// Explicit bounds; variables not listed are `>= 0`.
    pub bounds: BTreeMap<String, (f64, Option<f64>)>,
    pub binaries: Vec<String>,
}

impl LpModel {
    /// The name-based view of a built model, as [`parse_lp`] would return it.
    pub fn from_model(m: &MipModel) -> Self {
        let name = |v: usize| m.vars[v].name.clone();
        LpModel {
            objective: m.objective.iter().map(|&(v, c)| (name(v), c)).collect(),
            rows: m
                .constraints
                .iter()
                .map(|c| LpRow {
                    name: c.name.clone(),
                    terms: c.terms.iter().map(|&(v, k)| (name(v), k)).collect(),
                    sense: c.sense,
                    rhs: c.rhs,
                })
                .collect(),
            bounds: m
                .vars
                .iter()
                .filter(|v| v.kind == VarKind::Continuous && (v.lower != 0.0 || v.upper.is_some()))
                .map(|v| (v.name.clone(), (v.lower, v.upper)))
                .collect(),
            binaries: m.vars.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.clone()).collect(),
        }
    }
}

fn parse_num(tok: &str) -> Result<f64> {
    tok.parse().map_err(|_| Error::Parse(format!("bad number `{tok}` in LP text")))
}

fn parse_terms(tokens: &[&str]) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let mut sign = 1.0;
    let mut coef: Option<f64> = None;
    for &t in tokens {
        match t {
            "+" => sign = 1.0,
            "-" => sign = -1.0,
            _ => {
                if let Ok(v) = t.parse::<f64>() {
                    if coef.replace(v).is_some() {
                        return Err(Error::Parse(format!("two coefficients in a row near `{t}`")));
                    }
                } else {
                    out.push((t.to_string(), sign * coef.take().unwrap_or(1.0)));
                    sign = 1.0;
                }
            }
        }
    }
    if coef.is_some() {
        return Err(Error::Parse("dangling coefficient in LP text".into()));
    }
    Ok(out)
}

pub fn parse_lp(text: &str) -> Result<LpModel> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Objective,
        Rows,
        Bounds,
        Binaries,
        End,
    }
    let mut section = Section::None;
    let mut model = LpModel::default();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line.to_ascii_lowercase().as_str() {
            "minimize" => {
                section = Section::Objective;
                continue;
            }
            "subject to" => {
                section = Section::Rows;
                continue;
            }
            "bounds" => {
                section = Section::Bounds;
                continue;
            }
            "binaries" | "binary" => {
                section = Section::Binaries;
                continue;
            }
            "end" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let body = line.split_once(':').map_or(line, |(_, b)| b);
                let toks: Vec<&str> = body.split_whitespace().collect();
                if toks != ["0"] {
                    model.objective = parse_terms(&toks)?;
                }
            }
            Section::Rows => {
                let (name, body) = line
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("unnamed constraint `{line}`")))?;
                let toks: Vec<&str> = body.split_whitespace().collect();
                let pos = toks
                    .iter()
                    .position(|t| matches!(*t, "<=" | ">=" | "="))
                    .ok_or_else(|| Error::Parse(format!("constraint `{name}` has no sense")))?;
                let sense = match toks[pos] {
                    "<=" => Sense::Le,
                    ">=" => Sense::Ge,
                    _ => Sense::Eq,
                };
                if toks.len() != pos + 2 {
                    return Err(Error::Parse(format!("constraint `{name}` needs one right-hand side")));
                }
                model.rows.push(LpRow {
                    name: name.trim().to_string(),
                    terms: parse_terms(&toks[..pos])?,
                    sense,
                    rhs: parse_num(toks[pos + 1])?,
                });
            }
            Section::Bounds => {
                let toks: Vec<&str> = line.split_whitespace().collect();
                match toks.as_slice() {
                    [lo, "<=", name, "<=", up] => {
                        model.bounds.insert(name.to_string(), (parse_num(lo)?, Some(parse_num(up)?)));
                    }
                    [name, ">=", lo] => {
                        model.bounds.insert(name.to_string(), (parse_num(lo)?, None));
                    }
                    _ => return Err(Error::Parse(format!("unsupported bound `{line}`"))),
                }
            }
            Section::Binaries => model.binaries.extend(line.split_whitespace().map(str::to_owned)),
            Section::None | Section::End => {
                return Err(Error::Parse(format!("text outside any LP section: `{line}`")));
            }
        }
    }
    if section != Section::End {
        return Err(Error::Parse("LP text does not end with `End`".into()));
    }
    Ok(model)
}
