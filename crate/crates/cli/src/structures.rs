//! Structure files: either a BIF network (structure taken from its parent
//! lists) or a plain arcs list of the form
//!
//! ```text
//! # optional comments
//! nodes: A, B, C
//! A -> B
//! C -> B
//! ```
//!
//! Structures are aligned to a caller-supplied variable order by name, so
//! files may list nodes in any order.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bnsl::io::parse_bif;
use bnsl::{Dag, Variable};

/// Node names plus arcs as name pairs; the order of `nodes` is the file's
/// own node order.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureFile {
    pub nodes: Vec<String>,
    pub arcs: Vec<(String, String)>,
}

pub fn parse_arcs_text(text: &str) -> Result<StructureFile> {
    let mut nodes: Option<Vec<String>> = None;
    let mut arcs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("nodes:") {
            if nodes.is_some() {
                bail!("line {}: duplicate nodes line", i + 1);
            }
            let names: Vec<String> = rest
                .split(',')
                .map(|n| n.trim().to_string())
                .filter(|n| !n.is_empty())
                .collect();
            if names.is_empty() {
                bail!("line {}: empty nodes line", i + 1);
            }
            nodes = Some(names);
        } else {
            let (from, to) = line
                .split_once("->")
                .ok_or_else(|| anyhow!("line {}: expected `from -> to`", i + 1))?;
            arcs.push((from.trim().to_string(), to.trim().to_string()));
        }
    }
    let nodes = nodes.ok_or_else(|| anyhow!("missing `nodes:` line"))?;
    for (from, to) in &arcs {
        for name in [from, to] {
            if !nodes.contains(name) {
                bail!("arc endpoint {name:?} not in the nodes line");
            }
        }
    }
    Ok(StructureFile { nodes, arcs })
}

pub fn render_arcs(dag: &Dag, variables: &[Variable]) -> String {
    let names: Vec<&str> = variables.iter().map(|v| v.name.as_str()).collect();
    let mut out = format!("nodes: {}\n", names.join(", "));
    for (from, to) in dag.arcs() {
        out.push_str(&format!("{} -> {}\n", names[from], names[to]));
    }
    out
}

/// Builds a [`Dag`] over `variables` (by name) from a parsed structure file.
pub fn to_dag(file: &StructureFile, variables: &[Variable]) -> Result<Dag> {
    if file.nodes.len() != variables.len() {
        bail!(
            "structure names {} nodes but the data has {} variables",
            file.nodes.len(),
            variables.len()
        );
    }
    let index_of = |name: &str| -> Result<usize> {
        variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| anyhow!("structure node {name:?} not among the data variables"))
    };
    for name in &file.nodes {
        index_of(name)?;
    }
    let mut arcs = Vec::with_capacity(file.arcs.len());
    for (from, to) in &file.arcs {
        arcs.push((index_of(from)?, index_of(to)?));
    }
    Dag::from_arcs(variables.len(), &arcs).map_err(|e| anyhow!("invalid structure: {e}"))
}

/// Loads a structure from a `.bif` network or an arcs list, aligned to
/// `variables` by name.
pub fn load_structure(path: &Path, variables: &[Variable]) -> Result<Dag> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file = if path.extension().is_some_and(|e| e == "bif") {
        let bn = parse_bif(&text).with_context(|| format!("parsing {}", path.display()))?;
        StructureFile {
            nodes: bn.variables().iter().map(|v| v.name.clone()).collect(),
            arcs: bn
                .dag()
                .arcs()
                .map(|(f, t)| {
                    (
                        bn.variables()[f].name.clone(),
                        bn.variables()[t].name.clone(),
                    )
                })
                .collect(),
        }
    } else {
        parse_arcs_text(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    to_dag(&file, variables)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<Variable> {
        names.iter().map(|n| Variable::indexed(*n, 2)).collect()
    }

    #[test]
    fn arcs_round_trip() {
        let variables = vars(&["A", "B", "C"]);
        let dag = Dag::from_arcs(3, &[(0, 1), (2, 1)]).unwrap();
        let text = render_arcs(&dag, &variables);
        let parsed = parse_arcs_text(&text).unwrap();
        assert_eq!(to_dag(&parsed, &variables).unwrap(), dag);
    }

    #[test]
    fn alignment_is_by_name_not_position() {
        let text = "nodes: B, A\nB -> A\n";
        let parsed = parse_arcs_text(&text).unwrap();
        let dag = to_dag(&parsed, &vars(&["A", "B"])).unwrap();
        assert!(dag.has_arc(1, 0));
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(parse_arcs_text("A -> B\n").is_err()); // no nodes line
        assert!(parse_arcs_text("nodes: A, B\nA => B\n").is_err());
        assert!(parse_arcs_text("nodes: A\nA -> B\n").is_err());
        let parsed = parse_arcs_text("nodes: A, B\nA -> B\nB -> A\n").unwrap();
        assert!(to_dag(&parsed, &vars(&["A", "B"])).is_err()); // cyclic
        let parsed = parse_arcs_text("nodes: A, B\n").unwrap();
        assert!(to_dag(&parsed, &vars(&["A", "C"])).is_err()); // name mismatch
    }
}
