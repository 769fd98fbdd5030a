//! Dispute trees and explanation bundles.
//!
//! A proponent node lists every attacker of its argument as opponent
//! children; an opponent node gets at most one proponent reply. Admissible
//! trees answer every opponent from inside the grounded extension. Maximal
//! trees answer every opponent that can be answered at all, so their
//! opponent leaves are unattacked.

use std::fmt;

use crate::dsa::{build_framework, DerivationState, DsaFramework};
use crate::error::{Error, Result};
use crate::hierarchy::{is_locally_optimized, verdict, NormCase, VerdictKind};
use crate::semantics::{grounded_extension, AaFramework, ArgSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Proponent,
    Opponent,
}

impl Party {
    pub fn letter(self) -> &'static str {
        match self {
            Party::Proponent => "P",
            Party::Opponent => "O",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisputeNode {
    pub party: Party,
    /// Position of the argument in its framework.
    pub argument: usize,
    pub children: Vec<DisputeNode>,
}

impl DisputeNode {
    /// Nodes in depth-first pre-order, with their depth.
    pub fn walk(&self) -> Vec<(usize, &DisputeNode)> {
        let mut out = Vec::new();
        let mut stack = vec![(0, self)];
        while let Some((depth, node)) = stack.pop() {
            out.push((depth, node));
            for child in node.children.iter().rev() {
                stack.push((depth + 1, child));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    Admissible,
    Maximal,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TreeKind::Admissible => "admissible",
            TreeKind::Maximal => "maximal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisputeTree {
    pub root: DisputeNode,
    pub kind: TreeKind,
}

impl DisputeTree {
    pub fn depth(&self) -> usize {
        self.root.walk().iter().map(|(d, _)| *d).max().unwrap_or(0)
    }

    pub fn arguments_of(&self, party: Party) -> ArgSet {
        self.root
            .walk()
            .into_iter()
            .filter(|(_, n)| n.party == party)
            .map(|(_, n)| n.argument)
            .collect()
    }

    /// `(party, argument)` in depth-first order.
    pub fn chain(&self) -> Vec<(Party, usize)> {
        self.root
            .walk()
            .into_iter()
            .map(|(_, n)| (n.party, n.argument))
            .collect()
    }
}

/// Expands a proponent node. `reply` picks the proponent answer to an
/// opponent argument, if any.
fn expand(
    fw: &AaFramework,
    argument: usize,
    depth: usize,
    reply: &dyn Fn(usize) -> Option<usize>,
    require_reply: bool,
) -> Result<DisputeNode> {
    if depth > fw.len() {
        return Err(Error::Internal(
            "dispute tree deeper than the framework; attack graph is cyclic".into(),
        ));
    }
    let mut children = Vec::new();
    for &attacker in fw.attackers(argument) {
        let answer = match reply(attacker) {
            Some(defender) => vec![expand(fw, defender, depth + 2, reply, require_reply)?],
            None if require_reply => {
                return Err(Error::Internal(format!(
                    "no proponent reply to {} inside the extension",
                    fw.id(attacker)
                )))
            }
            None => vec![],
        };
        children.push(DisputeNode {
            party: Party::Opponent,
            argument: attacker,
            children: answer,
        });
    }
    Ok(DisputeNode {
        party: Party::Proponent,
        argument,
        children,
    })
}

/// Admissible tree for a member of the (grounded) extension; each opponent is
/// answered by its lowest-positioned attacker inside the extension.
pub fn admissible_dispute_tree(
    fw: &AaFramework,
    extension: &ArgSet,
    root: usize,
) -> Result<DisputeTree> {
    if !extension.contains(&root) {
        return Err(Error::NotInExtension(fw.id(root).to_string()));
    }
    let reply = |opponent: usize| {
        fw.attackers(opponent)
            .iter()
            .copied()
            .find(|d| extension.contains(d))
    };
    let tree = DisputeTree {
        root: expand(fw, root, 0, &reply, true)?,
        kind: TreeKind::Admissible,
    };
    verify_dispute_tree(fw, &tree).map_err(Error::Internal)?;
    Ok(tree)
}

/// Maximal tree for any argument; each attacked opponent is answered by its
/// lowest-positioned attacker.
pub fn maximal_dispute_tree(fw: &AaFramework, root: usize) -> Result<DisputeTree> {
    let reply = |opponent: usize| fw.attackers(opponent).first().copied();
    let tree = DisputeTree {
        root: expand(fw, root, 0, &reply, false)?,
        kind: TreeKind::Maximal,
    };
    verify_dispute_tree(fw, &tree).map_err(Error::Internal)?;
    Ok(tree)
}

/// Checks the structural dispute-tree conditions and the invariant of the
/// tree's kind. Returns a description of the first violation.
pub fn verify_dispute_tree(fw: &AaFramework, tree: &DisputeTree) -> std::result::Result<(), String> {
    if tree.root.party != Party::Proponent {
        return Err("root is not a proponent node".into());
    }
    for (depth, node) in tree.root.walk() {
        if depth > fw.len() {
            return Err(format!("depth {depth} exceeds the argument count"));
        }
        if node.argument >= fw.len() {
            return Err(format!("node references missing argument {}", node.argument));
        }
        let id = fw.id(node.argument);
        match node.party {
            Party::Proponent => {
                let mut children: Vec<usize> = node.children.iter().map(|c| c.argument).collect();
                children.sort_unstable();
                if children != fw.attackers(node.argument)
                    || node.children.iter().any(|c| c.party != Party::Opponent)
                {
                    return Err(format!(
                        "[P:{id}] children are not exactly its attackers as opponents"
                    ));
                }
            }
            Party::Opponent => {
                if node.children.len() > 1 {
                    return Err(format!("[O:{id}] has more than one child"));
                }
                if let Some(child) = node.children.first() {
                    if child.party != Party::Proponent
                        || !fw.attacks_pair(child.argument, node.argument)
                    {
                        return Err(format!(
                            "[O:{id}] child is not a proponent attacking it"
                        ));
                    }
                }
            }
        }
    }
    let opponents = tree.root.walk().into_iter().filter(|(_, n)| n.party == Party::Opponent);
    match tree.kind {
        TreeKind::Admissible => {
            if let Some((_, n)) = opponents.clone().find(|(_, n)| n.children.is_empty()) {
                return Err(format!("[O:{}] is unanswered", fw.id(n.argument)));
            }
            let both = tree
                .arguments_of(Party::Proponent)
                .intersection(&tree.arguments_of(Party::Opponent))
                .next()
                .copied();
            if let Some(x) = both {
                return Err(format!("{} plays both proponent and opponent", fw.id(x)));
            }
        }
        TreeKind::Maximal => {
            if let Some((_, n)) = opponents
                .filter(|(_, n)| n.children.is_empty())
                .find(|(_, n)| !fw.attackers(n.argument).is_empty())
            {
                return Err(format!("opponent leaf [O:{}] is attacked", fw.id(n.argument)));
            }
        }
    }
    Ok(())
}

/// Which consequence polarity an explanation argues for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stance {
    Obligatory,
    Forbidden,
}

impl Stance {
    fn winning(self) -> DerivationState {
        match self {
            Stance::Obligatory => DerivationState::Pos,
            Stance::Forbidden => DerivationState::Neg,
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stance::Obligatory => "OBLIGATORY",
            Stance::Forbidden => "FORBIDDEN",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplainedTree {
    pub root: usize,
    pub tree: DisputeTree,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Explanation {
    pub stance: Stance,
    /// Admissible trees first, then maximal trees; roots ascending within each.
    pub trees: Vec<ExplainedTree>,
    /// Roots owed an admissible tree that lie outside the grounded extension.
    pub missing: Vec<usize>,
    pub locally_optimized: bool,
}

/// Roots owed a tree: empty-knowledge arguments in `state`, then attackers in
/// `state` of empty-knowledge neutral arguments.
fn qualifying_roots(fw: &DsaFramework, state: DerivationState) -> Vec<usize> {
    let args = &fw.arguments;
    let mut roots: Vec<usize> = (0..args.len())
        .filter(|&i| args[i].pi_mask == 0 && args[i].sigma == state)
        .collect();
    for n in (0..args.len()).filter(|&i| args[i].pi_mask == 0 && args[i].sigma == DerivationState::Neu) {
        roots.extend(fw.attackers_of(n).filter(|&a| args[a].sigma == state));
    }
    roots.sort_unstable();
    roots.dedup();
    roots
}

/// Assembles the tree bundle for `stance` without consulting the verdict.
pub fn explanation_family(
    fw: &DsaFramework,
    stance: Stance,
    locally_optimized: bool,
) -> Result<Explanation> {
    let aa = fw.to_aa();
    let extension = grounded_extension(&aa).members;
    let mut trees = Vec::new();
    let mut missing = Vec::new();
    for root in qualifying_roots(fw, stance.winning()) {
        if extension.contains(&root) {
            trees.push(ExplainedTree {
                root,
                tree: admissible_dispute_tree(&aa, &extension, root)?,
            });
        } else {
            missing.push(root);
        }
    }
    for root in qualifying_roots(fw, stance.winning().dual()) {
        trees.push(ExplainedTree {
            root,
            tree: maximal_dispute_tree(&aa, root)?,
        });
    }
    Ok(Explanation {
        stance,
        trees,
        missing,
        locally_optimized,
    })
}

/// Explanation of why the consequence is obligatory or forbidden.
///
/// Refuses with [`Error::NoVerdict`] when it is neither; use [`diagnose`]
/// for that case.
pub fn build_explanation(case: &NormCase) -> Result<Explanation> {
    let stance = match verdict(case).kind {
        VerdictKind::Obligatory => Stance::Obligatory,
        VerdictKind::Forbidden => Stance::Forbidden,
        VerdictKind::Neither => return Err(Error::NoVerdict),
    };
    let optimized = is_locally_optimized(case)?.optimized;
    let fw = build_framework(case)?;
    let explanation = explanation_family(&fw, stance, optimized)?;
    if optimized {
        if let Some(&root) = explanation.missing.first() {
            return Err(Error::ExistenceViolation(format!(
                "{} owes an admissible dispute tree but lies outside the grounded extension",
                fw.arguments[root].id
            )));
        }
    }
    Ok(explanation)
}

/// Both rival bundles, whatever the verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnosis {
    pub verdict: VerdictKind,
    pub obligatory: Explanation,
    pub forbidden: Explanation,
}

pub fn diagnose(case: &NormCase) -> Result<Diagnosis> {
    let optimized = is_locally_optimized(case)?.optimized;
    let fw = build_framework(case)?;
    Ok(Diagnosis {
        verdict: verdict(case).kind,
        obligatory: explanation_family(&fw, Stance::Obligatory, optimized)?,
        forbidden: explanation_family(&fw, Stance::Forbidden, optimized)?,
    })
}

/// Depth-first `P:`/`O:` lines, indented by depth. Each line carries the
/// argument id, its label (sub-base rank, knowledge, state) and the sub-base
/// contents level by level.
pub fn render_tree_dialogue(
    tree: &DisputeTree,
    fw: &DsaFramework,
    case: &NormCase,
    ascii: bool,
) -> String {
    let mut out = String::new();
    for (depth, node) in tree.root.walk() {
        let arg = &fw.arguments[node.argument];
        out.push_str(&format!(
            "{}{}: {} {} sub-base {}\n",
            "  ".repeat(depth),
            node.party.letter(),
            arg.id,
            arg.label(ascii),
            arg.delta.describe(case.hierarchy(), ascii)
        ));
    }
    out
}

/// Renders a whole bundle; `#` lines introduce each tree.
pub fn render_dialogue(
    expl: &Explanation,
    fw: &DsaFramework,
    case: &NormCase,
    ascii: bool,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# {} {}\n", case.consequence(), expl.stance));
    if !expl.locally_optimized {
        out.push_str("# warning: case is not locally optimized; explanation is best-effort\n");
    }
    for item in &expl.trees {
        out.push_str(&format!(
            "# {} dispute tree for {}\n",
            item.tree.kind, fw.arguments[item.root].id
        ));
        out.push_str(&render_tree_dialogue(&item.tree, fw, case, ascii));
    }
    for &root in &expl.missing {
        out.push_str(&format!(
            "# no admissible dispute tree for {}\n",
            fw.arguments[root].id
        ));
    }
    out
}
