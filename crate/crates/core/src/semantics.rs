//! Abstract argumentation over arbitrary attack digraphs: conflict-freeness,
//! defence, admissibility, and the grounded, stable, preferred and complete
//! extensions.
//!
//! Extensions are sets of argument positions. Stable, preferred and complete
//! are verification predicates; exhaustive enumeration exists only for small
//! frameworks (see [`MAX_BRUTE_FORCE_ARGUMENTS`]).

use std::collections::{BTreeSet, HashMap};

use crate::dsa::{DerivationState, DsaFramework, PropertyCheck, PropertyReport};
use crate::error::{CapKind, Error, Result};
use crate::hierarchy::{is_locally_optimized, verdict, NormCase, VerdictKind};

pub const MAX_BRUTE_FORCE_ARGUMENTS: usize = 20;

pub type ArgSet = BTreeSet<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AaFramework {
    ids: Vec<String>,
    attacks: BTreeSet<(usize, usize)>,
    attackers: Vec<Vec<usize>>,
}

impl AaFramework {
    pub fn new(ids: Vec<String>, attacks: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashMap::new();
        for (i, id) in ids.iter().enumerate() {
            if seen.insert(id.as_str(), i).is_some() {
                return Err(Error::InvalidCase(format!("duplicate argument id `{id}`")));
            }
        }
        let attacks: BTreeSet<(usize, usize)> = attacks.into_iter().collect();
        let mut attackers = vec![Vec::new(); ids.len()];
        for &(x, y) in &attacks {
            if x >= ids.len() || y >= ids.len() {
                return Err(Error::InvalidCase(format!(
                    "attack ({x}, {y}) references a missing argument"
                )));
            }
            attackers[y].push(x);
        }
        Ok(AaFramework {
            ids,
            attacks,
            attackers,
        })
    }

    /// Builds a framework from ids and `(attacker, attacked)` id pairs.
    pub fn from_ids(ids: &[&str], attacks: &[(&str, &str)]) -> Result<Self> {
        let lookup: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let resolve = |id: &str| {
            lookup
                .get(id)
                .copied()
                .ok_or_else(|| Error::InvalidCase(format!("unknown argument id `{id}`")))
        };
        let pairs = attacks
            .iter()
            .map(|&(x, y)| Ok((resolve(x)?, resolve(y)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ids.iter().map(|s| s.to_string()).collect(), pairs)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|s| s == id)
    }

    pub fn attacks(&self) -> &BTreeSet<(usize, usize)> {
        &self.attacks
    }

    pub fn attacks_pair(&self, x: usize, y: usize) -> bool {
        self.attacks.contains(&(x, y))
    }

    /// Attackers of `y` in ascending position order.
    pub fn attackers(&self, y: usize) -> &[usize] {
        &self.attackers[y]
    }

    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm over attacker counts.
        let mut indegree: Vec<usize> = self.attackers.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..self.len()).filter(|&x| indegree[x] == 0).collect();
        let mut visited = 0;
        while let Some(x) = ready.pop() {
            visited += 1;
            for &(_, y) in self.attacks.range((x, 0)..(x + 1, 0)) {
                indegree[y] -= 1;
                if indegree[y] == 0 {
                    ready.push(y);
                }
            }
        }
        visited == self.len()
    }

    pub fn ids_of(&self, set: &ArgSet) -> Vec<&str> {
        set.iter().map(|&x| self.id(x)).collect()
    }
}

/// Whether some member of `set` attacks `x`.
pub fn set_attacks(fw: &AaFramework, set: &ArgSet, x: usize) -> bool {
    fw.attackers(x).iter().any(|a| set.contains(a))
}

pub fn is_conflict_free(fw: &AaFramework, set: &ArgSet) -> bool {
    set.iter().all(|&y| !set_attacks(fw, set, y))
}

/// Every attacker of `y` is attacked by `set`.
pub fn defends(fw: &AaFramework, set: &ArgSet, y: usize) -> bool {
    fw.attackers(y).iter().all(|&x| set_attacks(fw, set, x))
}

pub fn is_admissible(fw: &AaFramework, set: &ArgSet) -> bool {
    is_conflict_free(fw, set) && set.iter().all(|&y| defends(fw, set, y))
}

pub fn is_stable(fw: &AaFramework, set: &ArgSet) -> bool {
    is_conflict_free(fw, set)
        && (0..fw.len()).all(|x| set.contains(&x) || set_attacks(fw, set, x))
}

pub fn is_complete(fw: &AaFramework, set: &ArgSet) -> bool {
    is_admissible(fw, set) && (0..fw.len()).all(|x| !defends(fw, set, x) || set.contains(&x))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extension {
    pub members: ArgSet,
    pub grounded: bool,
    pub stable: bool,
    pub preferred: bool,
    pub complete: bool,
}

/// The sets `E0 ⊆ E1 ⊆ ...` of the inductive grounded construction, up to the fixpoint.
pub fn grounded_stages(fw: &AaFramework) -> Vec<ArgSet> {
    let mut stages = vec![(0..fw.len())
        .filter(|&x| fw.attackers(x).is_empty())
        .collect::<ArgSet>()];
    loop {
        let last = stages.last().expect("non-empty");
        let next: ArgSet = (0..fw.len()).filter(|&x| defends(fw, last, x)).collect();
        if &next == last {
            return stages;
        }
        stages.push(next);
    }
}

/// Least fixpoint of the defence function. On acyclic frameworks it is also
/// the unique stable, preferred and complete extension, and is tagged so.
pub fn grounded_extension(fw: &AaFramework) -> Extension {
    let members = grounded_stages(fw).pop().expect("non-empty");
    if fw.is_acyclic() {
        return Extension {
            members,
            grounded: true,
            stable: true,
            preferred: true,
            complete: true,
        };
    }
    let stable = is_stable(fw, &members);
    let complete = is_complete(fw, &members);
    let preferred = check_extension_kinds(fw, &members)
        .map(|k| k.preferred)
        .unwrap_or(false);
    Extension {
        members,
        grounded: true,
        stable,
        preferred,
        complete,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KindReport {
    pub conflict_free: bool,
    pub admissible: bool,
    pub stable: bool,
    pub preferred: bool,
    pub complete: bool,
}

/// Which extension kinds `set` satisfies. Preferred is decided by searching
/// every superset, so the framework must be small.
pub fn check_extension_kinds(fw: &AaFramework, set: &ArgSet) -> Result<KindReport> {
    if fw.len() > MAX_BRUTE_FORCE_ARGUMENTS {
        return Err(Error::cap(
            CapKind::Arguments,
            MAX_BRUTE_FORCE_ARGUMENTS,
            fw.len(),
        ));
    }
    let masks = MaskFramework::new(fw);
    let base = masks.encode(set);
    let admissible = masks.admissible(base);
    let preferred = admissible && {
        let free = masks.all & !base;
        // walk all non-empty submasks of the free arguments
        let mut sub = free;
        let mut larger_admissible = false;
        while sub != 0 {
            if masks.admissible(base | sub) {
                larger_admissible = true;
                break;
            }
            sub = (sub - 1) & free;
        }
        !larger_admissible
    };
    Ok(KindReport {
        conflict_free: masks.conflict_free(base),
        admissible,
        stable: masks.stable(base),
        preferred,
        complete: masks.complete(base),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Admissible,
    Complete,
    Stable,
    Preferred,
}

/// Every extension of the given kind, found by exhaustive search.
pub fn enumerate_extensions(fw: &AaFramework, kind: Semantics) -> Result<Vec<ArgSet>> {
    if fw.len() > MAX_BRUTE_FORCE_ARGUMENTS {
        return Err(Error::cap(
            CapKind::Arguments,
            MAX_BRUTE_FORCE_ARGUMENTS,
            fw.len(),
        ));
    }
    let masks = MaskFramework::new(fw);
    let test: fn(&MaskFramework, u32) -> bool = match kind {
        Semantics::Admissible | Semantics::Preferred => MaskFramework::admissible,
        Semantics::Complete => MaskFramework::complete,
        Semantics::Stable => MaskFramework::stable,
    };
    let mut found: Vec<u32> = (0..=masks.all).filter(|&s| test(&masks, s)).collect();
    if kind == Semantics::Preferred {
        let admissible = found.clone();
        found.retain(|&s| !admissible.iter().any(|&t| t != s && t & s == s));
    }
    Ok(found.into_iter().map(|s| masks.decode(s)).collect())
}

/// Bitmask view of a framework with at most 20 arguments.
struct MaskFramework {
    all: u32,
    attackers: Vec<u32>,
    attacked: Vec<u32>,
}

impl MaskFramework {
    fn new(fw: &AaFramework) -> Self {
        let n = fw.len();
        let mut attackers = vec![0u32; n];
        let mut attacked = vec![0u32; n];
        for &(x, y) in fw.attacks() {
            attackers[y] |= 1 << x;
            attacked[x] |= 1 << y;
        }
        MaskFramework {
            all: if n == 0 { 0 } else { (1u32 << n) - 1 },
            attackers,
            attacked,
        }
    }

    fn encode(&self, set: &ArgSet) -> u32 {
        set.iter().fold(0, |acc, &x| acc | 1 << x)
    }

    fn decode(&self, mask: u32) -> ArgSet {
        (0..self.attackers.len()).filter(|&x| mask >> x & 1 == 1).collect()
    }

    fn attacked_by(&self, set: u32) -> u32 {
        (0..self.attacked.len())
            .filter(|&x| set >> x & 1 == 1)
            .fold(0, |acc, x| acc | self.attacked[x])
    }

    fn conflict_free(&self, set: u32) -> bool {
        self.attacked_by(set) & set == 0
    }

    fn defended(&self, set: u32) -> u32 {
        let hit = self.attacked_by(set);
        (0..self.attackers.len())
            .filter(|&y| self.attackers[y] & !hit == 0)
            .fold(0, |acc, y| acc | 1 << y)
    }

    fn admissible(&self, set: u32) -> bool {
        self.conflict_free(set) && set & !self.defended(set) == 0
    }

    fn complete(&self, set: u32) -> bool {
        self.conflict_free(set) && self.defended(set) == set
    }

    fn stable(&self, set: u32) -> bool {
        self.conflict_free(set) && (set | self.attacked_by(set)) == self.all
    }
}

/// Extension membership guarantees for locally optimized, decided cases:
/// empty-knowledge arguments of the winning polarity are in, those of the
/// losing polarity are out, and so are the respective attackers of
/// empty-knowledge neutral arguments.
pub fn check_extension_properties(
    fw: &DsaFramework,
    case: &NormCase,
    extension: &ArgSet,
) -> PropertyReport {
    let names = [
        "empty-knowledge-winning-in",
        "empty-knowledge-losing-out",
        "neutral-winning-attackers-in",
        "neutral-losing-attackers-out",
    ];
    let winning = match verdict(case).kind {
        VerdictKind::Obligatory => Some(DerivationState::Pos),
        VerdictKind::Forbidden => Some(DerivationState::Neg),
        VerdictKind::Neither => None,
    };
    let optimized = is_locally_optimized(case).map(|lo| lo.optimized).ok();
    let winning = match (optimized, winning) {
        (Some(true), Some(w)) => w,
        _ => {
            return PropertyReport {
                checks: names
                    .iter()
                    .map(|&name| PropertyCheck {
                        name,
                        applicable: false,
                        passed: true,
                        detail: "requires a locally optimized, decided case".into(),
                    })
                    .collect(),
            }
        }
    };
    let losing = winning.dual();
    let args = &fw.arguments;
    let empty_knowledge = |state: DerivationState| {
        (0..args.len()).filter(move |&i| args[i].pi_mask == 0 && args[i].sigma == state)
    };
    let describe = |i: usize, expect_in: bool| {
        format!(
            "{} {} {} the extension",
            args[i].id,
            args[i].label(true),
            if expect_in { "missing from" } else { "unexpectedly in" }
        )
    };

    let mut failures: [Vec<String>; 4] = Default::default();
    for i in empty_knowledge(winning) {
        if !extension.contains(&i) {
            failures[0].push(describe(i, true));
        }
    }
    for i in empty_knowledge(losing) {
        if extension.contains(&i) {
            failures[1].push(describe(i, false));
        }
    }
    for n in empty_knowledge(DerivationState::Neu) {
        for a in fw.attackers_of(n) {
            if args[a].sigma == winning && !extension.contains(&a) {
                failures[2].push(describe(a, true));
            }
            if args[a].sigma == losing && extension.contains(&a) {
                failures[3].push(describe(a, false));
            }
        }
    }
    PropertyReport {
        checks: names
            .iter()
            .zip(failures)
            .map(|(&name, fails)| PropertyCheck {
                name,
                applicable: true,
                passed: fails.is_empty(),
                detail: fails.join("; "),
            })
            .collect(),
    }
}
