//! Line-oriented text format for finite groupoids.
//!
//! ```text
//! # the cyclic group of order two
//! objects: *
//! arrows:
//!   1: * -> *
//!   s: * -> *
//! identity:
//!   * = 1
//! inverse:
//!   1 = 1
//!   s = s
//! compose:
//!   1 . 1 = 1
//!   1 . s = s
//!   s . 1 = s
//!   s . s = 1
//! topology_objects: discrete
//! topology_arrows: discrete
//! ```
//!
//! A section header is `name:` optionally followed by its content on the
//! same line. `objects:` takes whitespace-separated atoms. Each topology is
//! `discrete`, `indiscrete`, or a list of `basis ATOM...` lines generating
//! the open sets. `g . f = h` records `g ∘ f = h`. Blank lines and text
//! after `#` are ignored.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fintop::FinSpace;
use crate::generate::Labelled;
use crate::groupoid::FinGroupoid;
use crate::pointset::PointSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Section {
    Objects,
    Arrows,
    Identity,
    Inverse,
    Compose,
    TopologyObjects,
    TopologyArrows,
}

impl Section {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "objects" => Section::Objects,
            "arrows" => Section::Arrows,
            "identity" => Section::Identity,
            "inverse" => Section::Inverse,
            "compose" => Section::Compose,
            "topology_objects" => Section::TopologyObjects,
            "topology_arrows" => Section::TopologyArrows,
            _ => return None,
        })
    }
}

#[derive(Default)]
enum TopologySpec {
    #[default]
    Missing,
    Discrete,
    Indiscrete,
    Basis(Vec<(usize, Vec<String>)>),
}

#[derive(Default)]
struct Raw {
    objects: Vec<(usize, String)>,
    arrows: Vec<(usize, String, String, String)>,
    identities: Vec<(usize, String, String)>,
    inverses: Vec<(usize, String, String)>,
    compositions: Vec<(usize, String, String, String)>,
    object_topology: TopologySpec,
    arrow_topology: TopologySpec,
    /// One past the last line, for errors about missing sections.
    end: usize,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses and validates a groupoid. Axioms and continuity of the structure
/// maps must hold; openness is not required.
pub fn parse_groupoid(text: &str) -> Result<FinGroupoid> {
    let raw = parse_raw(text)?;
    let g = build(&raw)?;
    let report = g.validate();
    if !report.axioms_ok || !report.continuity_ok {
        return Err(Error::InvalidGroupoid(report.failures.join("; ")));
    }
    Ok(g)
}

fn parse_raw(text: &str) -> Result<Raw> {
    let mut raw = Raw::default();
    let mut section: Option<Section> = None;
    let mut seen = BTreeSet::new();
    for (k, full) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = full.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut body = line;
        if let Some((head, rest)) = line.split_once(':') {
            if let Some(s) = Section::parse(head.trim()) {
                if !seen.insert(head.trim().to_owned()) {
                    return Err(parse_error(line_no, format!("section `{}` repeated", head.trim())));
                }
                section = Some(s);
                body = rest.trim();
                if body.is_empty() {
                    continue;
                }
            }
        }
        let Some(s) = section else {
            return Err(parse_error(line_no, "content before the first section header"));
        };
        parse_line(&mut raw, s, body, line_no)?;
    }
    raw.end = text.lines().count() + 1;
    Ok(raw)
}

fn parse_line(raw: &mut Raw, section: Section, body: &str, line: usize) -> Result<()> {
    let words: Vec<&str> = body.split_whitespace().collect();
    match section {
        Section::Objects => raw.objects.extend(words.iter().map(|w| (line, (*w).to_owned()))),
        Section::Arrows => {
            let (name, ends) = body
                .split_once(':')
                .ok_or_else(|| parse_error(line, "expected `ARROW: DOM -> COD`"))?;
            let (d, c) = ends
                .split_once("->")
                .ok_or_else(|| parse_error(line, "expected `ARROW: DOM -> COD`"))?;
            let [name, d, c] = [name, d, c].map(str::trim);
            if [name, d, c].iter().any(|w| w.is_empty() || w.contains(char::is_whitespace)) {
                return Err(parse_error(line, "expected `ARROW: DOM -> COD`"));
            }
            raw.arrows.push((line, name.to_owned(), d.to_owned(), c.to_owned()));
        }
        Section::Identity | Section::Inverse => match words.as_slice() {
            [a, "=", b] => {
                let entry = (line, (*a).to_owned(), (*b).to_owned());
                if section == Section::Identity {
                    raw.identities.push(entry);
                } else {
                    raw.inverses.push(entry);
                }
            }
            _ => return Err(parse_error(line, "expected `LEFT = RIGHT`")),
        },
        Section::Compose => match words.as_slice() {
            [g2, ".", g1, "=", h] => {
                raw.compositions.push((line, (*g2).to_owned(), (*g1).to_owned(), (*h).to_owned()))
            }
            _ => return Err(parse_error(line, "expected `G . F = H`")),
        },
        Section::TopologyObjects | Section::TopologyArrows => {
            let slot = if section == Section::TopologyObjects {
                &mut raw.object_topology
            } else {
                &mut raw.arrow_topology
            };
            match (words.as_slice(), &mut *slot) {
                (["discrete"], TopologySpec::Missing) => *slot = TopologySpec::Discrete,
                (["indiscrete"], TopologySpec::Missing) => *slot = TopologySpec::Indiscrete,
                (["basis", rest @ ..], TopologySpec::Missing) => {
                    *slot = TopologySpec::Basis(vec![(line, rest.iter().map(|w| (*w).to_owned()).collect())])
                }
                (["basis", rest @ ..], TopologySpec::Basis(lines)) => {
                    lines.push((line, rest.iter().map(|w| (*w).to_owned()).collect()))
                }
                _ => return Err(parse_error(line, "expected `discrete`, `indiscrete` or `basis ATOM...`")),
            }
        }
    }
    Ok(())
}

fn unique(names: impl Iterator<Item = (usize, String)>, what: &str) -> Result<Vec<String>> {
    let mut seen = BTreeSet::new();
    for (line, name) in names {
        if !seen.insert(name.clone()) {
            return Err(parse_error(line, format!("{what} `{name}` declared twice")));
        }
    }
    Ok(seen.into_iter().collect())
}

fn space(points: &[String], spec: &TopologySpec, what: &str, end: usize) -> Result<FinSpace> {
    match spec {
        TopologySpec::Missing => Err(parse_error(end, format!("missing section `topology_{what}`"))),
        TopologySpec::Discrete => Ok(FinSpace::discrete(points)),
        TopologySpec::Indiscrete => Ok(FinSpace::indiscrete(points)),
        TopologySpec::Basis(lines) => {
            for (line, atoms) in lines {
                if let Some(bad) = atoms.iter().find(|a| !points.contains(a)) {
                    return Err(parse_error(*line, format!("unknown point `{bad}` in basis")));
                }
            }
            let subbasis: Vec<Vec<String>> = lines.iter().map(|(_, atoms)| atoms.clone()).collect();
            FinSpace::make_space(points, &subbasis)
        }
    }
}

fn build(raw: &Raw) -> Result<FinGroupoid> {
    let objects = unique(raw.objects.iter().cloned(), "object")?;
    let arrows = unique(raw.arrows.iter().map(|(l, a, _, _)| (*l, a.clone())), "arrow")?;
    let known = |set: &[String], line: usize, name: &str| {
        if set.iter().any(|s| s == name) {
            Ok(name.to_owned())
        } else {
            Err(parse_error(line, format!("unknown atom `{name}`")))
        }
    };
    let mut ends = Vec::new();
    for (line, a, d, c) in &raw.arrows {
        ends.push((a.clone(), known(&objects, *line, d)?, known(&objects, *line, c)?));
    }
    let mut identities = Vec::new();
    for (line, x, e) in &raw.identities {
        identities.push((known(&objects, *line, x)?, known(&arrows, *line, e)?));
    }
    let mut inverses = Vec::new();
    for (line, a, b) in &raw.inverses {
        inverses.push((known(&arrows, *line, a)?, known(&arrows, *line, b)?));
    }
    let mut compositions = Vec::new();
    for (line, g2, g1, h) in &raw.compositions {
        compositions.push((known(&arrows, *line, g2)?, known(&arrows, *line, g1)?, known(&arrows, *line, h)?));
    }
    let object_space = space(&objects, &raw.object_topology, "objects", raw.end)?;
    let arrow_space = space(&arrows, &raw.arrow_topology, "arrows", raw.end)?;
    Labelled { objects: &object_space, arrows: &arrow_space, ends, identities, inverses, compositions }
        .build()
        .map_err(|e| match e {
            Error::InvalidInput(m) => Error::InvalidGroupoid(m),
            other => other,
        })
}

fn write_topology(out: &mut String, name: &str, space: &FinSpace) {
    if space.is_discrete() {
        out.push_str(&format!("{name}: discrete\n"));
    } else if space.is_indiscrete() {
        out.push_str(&format!("{name}: indiscrete\n"));
    } else {
        out.push_str(&format!("{name}:\n"));
        let mut basis: Vec<Vec<String>> = space.neighbourhoods().iter().map(|&u| space.names(u)).collect();
        basis.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        basis.dedup();
        for atoms in basis {
            out.push_str(&format!("  basis {}\n", atoms.join(" ")));
        }
    }
}

/// Canonical text: atoms sorted, composition entries sorted by
/// `(g, f)` labels, topologies as keywords or minimal-neighbourhood bases.
pub fn serialize(g: &FinGroupoid) -> String {
    let (objects, arrows) = (g.objects(), g.arrows());
    let sorted = |space: &FinSpace| {
        let mut idx: Vec<usize> = (0..space.len()).collect();
        idx.sort_by(|&a, &b| space.label(a).cmp(space.label(b)));
        idx
    };
    let (obj_order, arr_order) = (sorted(objects), sorted(arrows));
    let mut out = String::new();
    let names: Vec<&str> = obj_order.iter().map(|&x| objects.label(x)).collect();
    out.push_str(&format!("objects: {}\n", names.join(" ")).replace(" \n", "\n"));
    out.push_str("arrows:\n");
    for &a in &arr_order {
        out.push_str(&format!(
            "  {}: {} -> {}\n",
            arrows.label(a),
            objects.label(g.dom(a)),
            objects.label(g.cod(a))
        ));
    }
    out.push_str("identity:\n");
    for &x in &obj_order {
        out.push_str(&format!("  {} = {}\n", objects.label(x), arrows.label(g.unit(x))));
    }
    out.push_str("inverse:\n");
    for &a in &arr_order {
        out.push_str(&format!("  {} = {}\n", arrows.label(a), arrows.label(g.inverse(a))));
    }
    out.push_str("compose:\n");
    for &g2 in &arr_order {
        for &g1 in &arr_order {
            if let Some(h) = g.compose(g2, g1) {
                out.push_str(&format!("  {} . {} = {}\n", arrows.label(g2), arrows.label(g1), arrows.label(h)));
            }
        }
    }
    write_topology(&mut out, "topology_objects", objects);
    write_topology(&mut out, "topology_arrows", arrows);
    out
}

/// Parses a comma-separated list of labels of `space`; `-` or an empty
/// string is the empty set.
pub fn parse_label_set(space: &FinSpace, text: &str) -> Result<PointSet> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(PointSet::EMPTY);
    }
    let names: Vec<&str> = text.split(',').map(str::trim).collect();
    space.set_of(&names)
}
