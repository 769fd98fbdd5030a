//! Derivation states, the derivation-state space, DS-arguments and the
//! attack relation between them.
//!
//! A DS-argument pairs a piece of situational knowledge `π ⊆ Π` with a
//! maximal sub-base consistent with it and the polarity that combination
//! derives for the consequence. Attacks run from better-informed arguments to
//! less-informed ones whose polarity differs.

use std::cmp::Reverse;
use std::collections::BTreeSet;
use std::fmt;

use petgraph::algo::is_cyclic_directed;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::hierarchy::{
    is_locally_optimized, local_gt, verdict, ConstraintHierarchy, NormCase, SpaceModels, SubBase,
    VerdictKind,
};
use crate::logic::{Formula, FormulaSet, MAX_ATOMS};
use crate::semantics::AaFramework;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DerivationState {
    /// Sub-base inconsistent with the knowledge.
    Bot,
    /// Derives the consequence only.
    Pos,
    /// Derives its negation only.
    Neg,
    /// Derives neither.
    Neu,
}

impl DerivationState {
    pub fn symbol(self, ascii: bool) -> &'static str {
        match self {
            DerivationState::Bot if ascii => "B",
            DerivationState::Bot => "⊥",
            DerivationState::Pos => "+",
            DerivationState::Neg => "-",
            DerivationState::Neu => "n",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        match s {
            "+" => Some(DerivationState::Pos),
            "-" => Some(DerivationState::Neg),
            "n" => Some(DerivationState::Neu),
            "B" | "⊥" => Some(DerivationState::Bot),
            _ => None,
        }
    }

    /// Swaps `+` and `-`.
    pub fn dual(self) -> Self {
        match self {
            DerivationState::Pos => DerivationState::Neg,
            DerivationState::Neg => DerivationState::Pos,
            other => other,
        }
    }

    fn canonical_rank(self) -> u8 {
        match self {
            DerivationState::Pos => 0,
            DerivationState::Neg => 1,
            DerivationState::Neu => 2,
            DerivationState::Bot => 3,
        }
    }
}

impl fmt::Display for DerivationState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol(false))
    }
}

/// State of `psi` with respect to `delta` and `pi` on top of `theory`.
pub fn derivation_state(
    theory: &FormulaSet,
    hierarchy: &ConstraintHierarchy,
    delta: &SubBase,
    pi: &FormulaSet,
    psi: &Formula,
) -> Result<DerivationState> {
    let space = SpaceModels::new(hierarchy, &[theory, pi], Some(psi), MAX_ATOMS)?;
    let table = &space.table;
    let base = table.models_of_set(theory.iter().chain(pi.iter()));
    let models = space.with_subbase(delta, &base);
    let goal = table.models(psi);
    Ok(if models.is_empty() {
        DerivationState::Bot
    } else if models.is_subset(&goal) {
        DerivationState::Pos
    } else if models.is_subset(&goal.complement()) {
        DerivationState::Neg
    } else {
        DerivationState::Neu
    })
}

/// Knowledge masks ordered by size, then by the sorted canonical prints of
/// their members.
pub fn knowledge_order(case: &NormCase) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..=case.full_situation_mask()).collect();
    masks.sort_by_cached_key(|&m| knowledge_key(case, m));
    masks
}

fn knowledge_key(case: &NormCase, mask: u32) -> (u32, Vec<String>) {
    let mut prints: Vec<String> = case.knowledge(mask).iter().map(|f| f.to_string()).collect();
    prints.sort();
    (mask.count_ones(), prints)
}

/// The full `|Δ| × 2^|Π|` grid of derivation states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSpace {
    /// Columns, by descending canonical index.
    pub subbases: Vec<SubBase>,
    /// Rows, as situation masks in [`knowledge_order`].
    pub knowledge: Vec<u32>,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<DerivationState>>,
}

impl StateSpace {
    pub fn get(&self, pi_mask: u32, subbase_rank: u32) -> Option<DerivationState> {
        let row = self.knowledge.iter().position(|&m| m == pi_mask)?;
        self.cells[row].get(subbase_rank as usize).copied()
    }
}

pub fn state_space(case: &NormCase) -> Result<StateSpace> {
    let subbases = crate::hierarchy::enumerate_subbases(case.hierarchy())?;
    let knowledge = knowledge_order(case);
    let models = case.models();
    let cells = knowledge
        .iter()
        .map(|&pi| subbases.iter().map(|sb| models.state(sb, pi)).collect())
        .collect();
    Ok(StateSpace {
        subbases,
        knowledge,
        cells,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsArgument {
    pub id: String,
    pub delta: SubBase,
    /// Situation subset as a bitmask over the situation's elements.
    pub pi_mask: u32,
    pub pi: FormulaSet,
    pub sigma: DerivationState,
}

impl DsArgument {
    /// `⟨δk,{π},σ⟩` (or `<dk,{π},σ>` in ASCII).
    pub fn label(&self, ascii: bool) -> String {
        let items: Vec<String> = self.pi.iter().map(|f| f.to_string()).collect();
        let (open, delta, close) = if ascii { ("<", "d", ">") } else { ("⟨", "δ", "⟩") };
        format!(
            "{open}{delta}{},{{{}}},{}{close}",
            self.delta.rank(),
            items.join(", "),
            self.sigma.symbol(ascii)
        )
    }

    fn knows_strictly_less_than(&self, other: &DsArgument) -> bool {
        self.pi_mask != other.pi_mask && self.pi_mask & !other.pi_mask == 0
    }
}

/// Every DS-argument of the case, in canonical order with ids `a1, a2, ...`.
pub fn ds_arguments(case: &NormCase) -> Result<Vec<DsArgument>> {
    let models = case.models();
    let mut args = Vec::new();
    for pi_mask in 0..=case.full_situation_mask() {
        for delta in case.maximal_subbases(pi_mask) {
            let sigma = models.state(&delta, pi_mask);
            if sigma == DerivationState::Bot {
                return Err(Error::Internal(format!(
                    "maximal sub-base {} is inconsistent with {}",
                    delta.describe(case.hierarchy(), true),
                    case.knowledge(pi_mask)
                )));
            }
            args.push(DsArgument {
                id: String::new(),
                delta,
                pi_mask,
                pi: case.knowledge(pi_mask),
                sigma,
            });
        }
    }
    args.sort_by_cached_key(|a| {
        let (size, prints) = knowledge_key(case, a.pi_mask);
        (size, prints, Reverse(a.delta.index()), a.sigma.canonical_rank())
    });
    for (i, arg) in args.iter_mut().enumerate() {
        arg.id = format!("a{}", i + 1);
    }
    Ok(args)
}

/// Attacks as `(attacker, attacked)` positions into `args`.
///
/// `x` attacks `y` when their states differ, `x` knows strictly more, and no
/// argument sharing `x`'s state sits strictly between them in knowledge.
pub fn compute_attacks(args: &[DsArgument]) -> BTreeSet<(usize, usize)> {
    let mut attacks = BTreeSet::new();
    for (i, x) in args.iter().enumerate() {
        for (j, y) in args.iter().enumerate() {
            if x.sigma == y.sigma || !y.knows_strictly_less_than(x) {
                continue;
            }
            let interposed = args.iter().any(|z| {
                z.sigma == x.sigma && y.knows_strictly_less_than(z) && z.knows_strictly_less_than(x)
            });
            if !interposed {
                attacks.insert((i, j));
            }
        }
    }
    attacks
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DsaFramework {
    pub arguments: Vec<DsArgument>,
    pub attacks: BTreeSet<(usize, usize)>,
}

impl DsaFramework {
    pub fn position(&self, id: &str) -> Option<usize> {
        self.arguments.iter().position(|a| a.id == id)
    }

    pub fn attack_ids(&self) -> Vec<(&str, &str)> {
        self.attacks
            .iter()
            .map(|&(x, y)| (self.arguments[x].id.as_str(), self.arguments[y].id.as_str()))
            .collect()
    }

    pub fn attackers_of(&self, target: usize) -> impl Iterator<Item = usize> + '_ {
        self.attacks
            .iter()
            .filter(move |&&(_, y)| y == target)
            .map(|&(x, _)| x)
    }

    pub fn attacked_by(&self, source: usize) -> impl Iterator<Item = usize> + '_ {
        self.attacks
            .iter()
            .filter(move |&&(x, _)| x == source)
            .map(|&(_, y)| y)
    }

    pub fn is_acyclic(&self) -> bool {
        let mut g = DiGraph::<(), ()>::new();
        let nodes: Vec<_> = self.arguments.iter().map(|_| g.add_node(())).collect();
        for &(x, y) in &self.attacks {
            g.add_edge(nodes[x], nodes[y], ());
        }
        !is_cyclic_directed(&g)
    }

    /// The id-level abstract framework (same argument order).
    pub fn to_aa(&self) -> AaFramework {
        AaFramework::new(
            self.arguments.iter().map(|a| a.id.clone()).collect(),
            self.attacks.iter().copied(),
        )
        .expect("attack positions are in range")
    }
}

pub fn build_framework(case: &NormCase) -> Result<DsaFramework> {
    let arguments = ds_arguments(case)?;
    let attacks = compute_attacks(&arguments);
    let fw = DsaFramework { arguments, attacks };
    if !fw.is_acyclic() {
        return Err(Error::Internal("attack graph contains a cycle".into()));
    }
    Ok(fw)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyCheck {
    pub name: &'static str,
    /// False when the property's hypothesis does not hold for this case.
    pub applicable: bool,
    pub passed: bool,
    pub detail: String,
}

impl PropertyCheck {
    fn holds(name: &'static str, failures: Vec<String>) -> Self {
        PropertyCheck {
            name,
            applicable: true,
            passed: failures.is_empty(),
            detail: failures.join("; "),
        }
    }

    fn not_applicable(name: &'static str, why: &str) -> Self {
        PropertyCheck {
            name,
            applicable: false,
            passed: true,
            detail: why.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Structural guarantees of the framework, plus the polarity guarantees that
/// hold when the case is locally optimized and decided.
pub fn check_framework_properties(fw: &DsaFramework, case: &NormCase) -> PropertyReport {
    let mut checks = Vec::new();

    let uncovered: Vec<String> = (0..=case.full_situation_mask())
        .filter(|&m| !fw.arguments.iter().any(|a| a.pi_mask == m))
        .map(|m| format!("no argument with knowledge {}", case.knowledge(m)))
        .collect();
    checks.push(PropertyCheck::holds("knowledge-coverage", uncovered));

    let cyclic = if fw.is_acyclic() {
        vec![]
    } else {
        vec!["attack graph has a cycle".to_string()]
    };
    checks.push(PropertyCheck::holds("acyclic", cyclic));

    let v = verdict(case);
    let full = case.full_situation_mask();
    let expected = match v.kind {
        VerdictKind::Obligatory => Some(DerivationState::Pos),
        VerdictKind::Forbidden => Some(DerivationState::Neg),
        VerdictKind::Neither => None,
    };
    match expected {
        Some(state) => {
            let bad = fw
                .arguments
                .iter()
                .filter(|a| a.pi_mask == full && a.sigma != state)
                .map(|a| format!("{} has complete knowledge but state {}", a.id, a.sigma))
                .collect();
            checks.push(PropertyCheck::holds("complete-knowledge-polarity", bad));
        }
        None => checks.push(PropertyCheck::not_applicable(
            "complete-knowledge-polarity",
            "consequence is neither obligatory nor forbidden",
        )),
    }

    let preferred_attackers = fw
        .attacks
        .iter()
        .filter(|&&(x, y)| local_gt(&fw.arguments[x].delta, &fw.arguments[y].delta))
        .map(|&(x, y)| {
            format!(
                "{} attacks {} with a preferred sub-base",
                fw.arguments[x].id, fw.arguments[y].id
            )
        })
        .collect();
    checks.push(PropertyCheck::holds("no-preferred-attacker", preferred_attackers));

    let names = ["neutral-attacks-nothing", "neutral-attacked", "opposing-attacked"];
    let optimized = match is_locally_optimized(case) {
        Ok(lo) => Some(lo.optimized),
        Err(_) => None,
    };
    let winning = match (optimized, expected) {
        (Some(true), Some(state)) => state,
        (None, _) => {
            for name in names {
                checks.push(PropertyCheck::not_applicable(
                    name,
                    "local optimality could not be decided within caps",
                ));
            }
            return PropertyReport { checks };
        }
        (Some(false), _) | (_, None) => {
            for name in names {
                checks.push(PropertyCheck::not_applicable(
                    name,
                    "requires a locally optimized, decided case",
                ));
            }
            return PropertyReport { checks };
        }
    };

    let neutral_attacking = fw
        .attacks
        .iter()
        .filter(|&&(x, _)| fw.arguments[x].sigma == DerivationState::Neu)
        .map(|&(x, y)| format!("{} (n) attacks {}", fw.arguments[x].id, fw.arguments[y].id))
        .collect();
    checks.push(PropertyCheck::holds(names[0], neutral_attacking));

    let unattacked_with = |state: DerivationState| -> Vec<String> {
        fw.arguments
            .iter()
            .enumerate()
            .filter(|(i, a)| a.sigma == state && fw.attackers_of(*i).next().is_none())
            .map(|(_, a)| format!("{} ({}) is unattacked", a.id, a.sigma))
            .collect()
    };
    checks.push(PropertyCheck::holds(
        names[1],
        unattacked_with(DerivationState::Neu),
    ));
    checks.push(PropertyCheck::holds(names[2], unattacked_with(winning.dual())));

    PropertyReport { checks }
}
