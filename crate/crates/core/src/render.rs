//! Text, DOT and JSON renderings of verdicts, state spaces, frameworks and
//! explanations. All output is deterministic for a given case.

use serde::{Deserialize, Serialize};

use crate::dsa::{DerivationState, DsArgument, DsaFramework, StateSpace};
use crate::error::{Error, Result};
use crate::explain::{Diagnosis, DisputeNode, Explanation};
use crate::hierarchy::{NormCase, SubBase, Verdict};
use crate::logic::{Formula, FormulaSet};

fn subbase_name(sb: &SubBase, ascii: bool) -> String {
    format!("{}{}", if ascii { "d" } else { "δ" }, sb.rank())
}

fn subbase_levels(sb: &SubBase, case: &NormCase) -> Vec<Vec<String>> {
    sb.levels(case.hierarchy())
        .iter()
        .map(|lvl| lvl.iter().map(|f| f.to_string()).collect())
        .collect()
}

fn formula_strings(fs: &FormulaSet) -> Vec<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn verdict_text(v: &Verdict, case: &NormCase, ascii: bool) -> String {
    let mut out = format!("{}\n", v.kind);
    for (sb, state) in &v.witnesses {
        out.push_str(&format!(
            "  {} {} {}\n",
            subbase_name(sb, ascii),
            sb.describe(case.hierarchy(), ascii),
            state.symbol(ascii)
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub subbase: String,
    pub levels: Vec<Vec<String>>,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictDoc {
    pub verdict: String,
    pub witnesses: Vec<WitnessDoc>,
}

pub fn verdict_json(v: &Verdict, case: &NormCase) -> Result<String> {
    let doc = VerdictDoc {
        verdict: v.kind.to_string(),
        witnesses: v
            .witnesses
            .iter()
            .map(|(sb, state)| WitnessDoc {
                subbase: subbase_name(sb, true),
                levels: subbase_levels(sb, case),
                state: state.symbol(true).to_string(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Matrix with one row per knowledge set and one column per sub-base; cells
/// holding a DS-argument are starred.
pub fn statespace_text(
    space: &StateSpace,
    fw: &DsaFramework,
    case: &NormCase,
    ascii: bool,
) -> String {
    let corner = if ascii { "pi \\ delta" } else { "π \\ δ" };
    let row_labels: Vec<String> = space
        .knowledge
        .iter()
        .map(|&m| {
            let items = formula_strings(&case.knowledge(m));
            format!("{{{}}}", items.join(","))
        })
        .collect();
    let mut header = vec![corner.to_string()];
    header.extend(space.subbases.iter().map(|sb| subbase_name(sb, ascii)));
    let mut rows = vec![header];
    for (r, &pi) in space.knowledge.iter().enumerate() {
        let mut row = vec![row_labels[r].clone()];
        for (c, state) in space.cells[r].iter().enumerate() {
            let starred = fw
                .arguments
                .iter()
                .any(|a| a.pi_mask == pi && a.delta == space.subbases[c]);
            row.push(format!("{}{}", state.symbol(ascii), if starred { "*" } else { "" }));
        }
        rows.push(row);
    }
    let columns = rows[0].len();
    let widths: Vec<usize> = (0..columns)
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell}{}", " ".repeat(w - cell.chars().count())))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRowDoc {
    pub knowledge: Vec<String>,
    pub states: Vec<String>,
    /// Column positions holding a DS-argument.
    pub arguments: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateSpaceDoc {
    pub subbases: Vec<WitnessLevelsDoc>,
    pub rows: Vec<StateRowDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessLevelsDoc {
    pub name: String,
    pub levels: Vec<Vec<String>>,
}

pub fn statespace_json(space: &StateSpace, fw: &DsaFramework, case: &NormCase) -> Result<String> {
    let doc = StateSpaceDoc {
        subbases: space
            .subbases
            .iter()
            .map(|sb| WitnessLevelsDoc {
                name: subbase_name(sb, true),
                levels: subbase_levels(sb, case),
            })
            .collect(),
        rows: space
            .knowledge
            .iter()
            .zip(&space.cells)
            .map(|(&pi, cells)| StateRowDoc {
                knowledge: formula_strings(&case.knowledge(pi)),
                states: cells.iter().map(|s| s.symbol(true).to_string()).collect(),
                arguments: (0..space.subbases.len())
                    .filter(|&c| {
                        fw.arguments
                            .iter()
                            .any(|a| a.pi_mask == pi && a.delta == space.subbases[c])
                    })
                    .collect(),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentDoc {
    pub id: String,
    pub subbase: Vec<Vec<String>>,
    pub knowledge: Vec<String>,
    pub state: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkDoc {
    pub arguments: Vec<ArgumentDoc>,
    pub attacks: Vec<[String; 2]>,
}

pub fn framework_doc(fw: &DsaFramework, case: &NormCase) -> FrameworkDoc {
    FrameworkDoc {
        arguments: fw
            .arguments
            .iter()
            .map(|a| ArgumentDoc {
                id: a.id.clone(),
                subbase: subbase_levels(&a.delta, case),
                knowledge: formula_strings(&a.pi),
                state: a.sigma.symbol(true).to_string(),
            })
            .collect(),
        attacks: fw
            .attack_ids()
            .into_iter()
            .map(|(x, y)| [x.to_string(), y.to_string()])
            .collect(),
    }
}

pub fn framework_json(fw: &DsaFramework, case: &NormCase) -> Result<String> {
    Ok(serde_json::to_string_pretty(&framework_doc(fw, case))? + "\n")
}

fn invalid(msg: String) -> Error {
    Error::InvalidCase(msg)
}

/// Rebuilds a framework from its JSON form, resolving formulas against `case`.
pub fn framework_from_json(json: &str, case: &NormCase) -> Result<DsaFramework> {
    let doc: FrameworkDoc = serde_json::from_str(json)?;
    let h = case.hierarchy();
    if let Some(bad) = doc.arguments.iter().find(|a| a.subbase.len() != h.level_count()) {
        return Err(invalid(format!("argument {} has the wrong number of levels", bad.id)));
    }
    let mut arguments = Vec::with_capacity(doc.arguments.len());
    for a in &doc.arguments {
        let mut masks = Vec::with_capacity(h.level_count());
        for (items, level) in a.subbase.iter().zip(h.levels()) {
            let mut mask = 0u32;
            for item in items {
                let f = Formula::parse(item)?;
                let j = level
                    .position(&f)
                    .ok_or_else(|| invalid(format!("`{item}` is not in its level")))?;
                mask |= 1 << (level.len() - 1 - j);
            }
            masks.push(mask);
        }
        let mut pi_mask = 0u32;
        for item in &a.knowledge {
            let f = Formula::parse(item)?;
            let i = case
                .situation()
                .position(&f)
                .ok_or_else(|| invalid(format!("`{item}` is not in the situation")))?;
            pi_mask |= 1 << i;
        }
        let sigma = match DerivationState::from_symbol(&a.state) {
            Some(s) if s != DerivationState::Bot => s,
            _ => return Err(invalid(format!("bad state `{}` for {}", a.state, a.id))),
        };
        arguments.push(DsArgument {
            id: a.id.clone(),
            delta: h.subbase_from_masks(masks),
            pi_mask,
            pi: case.knowledge(pi_mask),
            sigma,
        });
    }
    let position = |id: &str| {
        arguments
            .iter()
            .position(|a: &DsArgument| a.id == id)
            .ok_or_else(|| invalid(format!("attack references unknown id `{id}`")))
    };
    let attacks = doc
        .attacks
        .iter()
        .map(|[x, y]| Ok((position(x)?, position(y)?)))
        .collect::<Result<_>>()?;
    Ok(DsaFramework { arguments, attacks })
}

pub fn framework_dot(fw: &DsaFramework, ascii: bool) -> String {
    let mut out = String::from("digraph dsa {\n  rankdir=BT;\n");
    for a in &fw.arguments {
        out.push_str(&format!(
            "  {} [label=\"{}\"];\n",
            a.id,
            dot_escape(&a.label(ascii))
        ));
    }
    for (x, y) in fw.attack_ids() {
        out.push_str(&format!("  {x} -> {y};\n"));
    }
    out.push_str("}\n");
    out
}

pub fn framework_text(fw: &DsaFramework, case: &NormCase, ascii: bool) -> String {
    let mut out = String::new();
    for a in &fw.arguments {
        out.push_str(&format!(
            "{} {} sub-base {}\n",
            a.id,
            a.label(ascii),
            a.delta.describe(case.hierarchy(), ascii)
        ));
    }
    for (x, y) in fw.attack_ids() {
        out.push_str(&format!("{x} attacks {y}\n"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub party: String,
    pub argument: String,
    pub children: Vec<NodeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDoc {
    pub root: String,
    pub kind: String,
    pub tree: NodeDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationDoc {
    pub stance: String,
    pub locally_optimized: bool,
    pub trees: Vec<TreeDoc>,
    pub missing: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosisDoc {
    pub verdict: String,
    pub obligatory: ExplanationDoc,
    pub forbidden: ExplanationDoc,
}

fn node_doc(node: &DisputeNode, fw: &DsaFramework) -> NodeDoc {
    NodeDoc {
        party: node.party.letter().to_string(),
        argument: fw.arguments[node.argument].id.clone(),
        children: node.children.iter().map(|c| node_doc(c, fw)).collect(),
    }
}

pub fn explanation_doc(expl: &Explanation, fw: &DsaFramework) -> ExplanationDoc {
    ExplanationDoc {
        stance: expl.stance.to_string(),
        locally_optimized: expl.locally_optimized,
        trees: expl
            .trees
            .iter()
            .map(|t| TreeDoc {
                root: fw.arguments[t.root].id.clone(),
                kind: t.tree.kind.to_string(),
                tree: node_doc(&t.tree.root, fw),
            })
            .collect(),
        missing: expl
            .missing
            .iter()
            .map(|&r| fw.arguments[r].id.clone())
            .collect(),
    }
}

pub fn explanation_json(expl: &Explanation, fw: &DsaFramework) -> Result<String> {
    Ok(serde_json::to_string_pretty(&explanation_doc(expl, fw))? + "\n")
}

pub fn diagnosis_json(d: &Diagnosis, fw: &DsaFramework) -> Result<String> {
    let doc = DiagnosisDoc {
        verdict: d.verdict.to_string(),
        obligatory: explanation_doc(&d.obligatory, fw),
        forbidden: explanation_doc(&d.forbidden, fw),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn explanation_dot_body(expl: &Explanation, fw: &DsaFramework, prefix: &str, ascii: bool, out: &mut String) {
    for (t, item) in expl.trees.iter().enumerate() {
        out.push_str(&format!(
            "  subgraph cluster_{prefix}{t} {{\n    label=\"{} {} tree for {}\";\n",
            expl.stance, item.tree.kind, fw.arguments[item.root].id
        ));
        let mut edges = Vec::new();
        let mut counter = 0usize;
        let mut stack = vec![(&item.tree.root, None::<String>)];
        while let Some((node, parent)) = stack.pop() {
            let name = format!("{prefix}t{t}n{counter}");
            counter += 1;
            let arg = &fw.arguments[node.argument];
            out.push_str(&format!(
                "    {name} [label=\"{}: {} {}\"];\n",
                node.party.letter(),
                arg.id,
                dot_escape(&arg.label(ascii))
            ));
            if let Some(parent) = parent {
                edges.push(format!("    {name} -> {parent};\n"));
            }
            for child in node.children.iter().rev() {
                stack.push((child, Some(name.clone())));
            }
        }
        for e in edges {
            out.push_str(&e);
        }
        out.push_str("  }\n");
    }
}

/// One cluster per tree; edges run from each reply to the node it attacks.
pub fn explanation_dot(expl: &Explanation, fw: &DsaFramework, ascii: bool) -> String {
    let mut out = String::from("digraph explanation {\n  rankdir=BT;\n");
    explanation_dot_body(expl, fw, "", ascii, &mut out);
    out.push_str("}\n");
    out
}

pub fn diagnosis_dot(d: &Diagnosis, fw: &DsaFramework, ascii: bool) -> String {
    let mut out = String::from("digraph diagnosis {\n  rankdir=BT;\n");
    explanation_dot_body(&d.obligatory, fw, "ob", ascii, &mut out);
    explanation_dot_body(&d.forbidden, fw, "fb", ascii, &mut out);
    out.push_str("}\n");
    out
}
