//! Constraint hierarchies, the sub-base space under local preference, and
//! obligation verdicts.
//!
//! Soft constraints are numbered globally, level 1 first and in insertion
//! order within a level. A sub-base is identified by a bit-vector over that
//! numbering with constraint 0 in the most significant bit, so the full
//! hierarchy has the largest index and the empty one index 0. Listing
//! sub-bases by descending index yields the conventional `δ0, δ1, ...` names.

use std::fmt;

use crate::dsa::DerivationState;
use crate::error::{CapKind, Error, Result};
use crate::logic::{Formula, FormulaSet, ModelSet, TruthTable, MAX_ATOMS};

pub const MAX_CONSTRAINTS: usize = 16;
pub const MAX_SITUATION: usize = 10;
/// Cap on `|flatten(H) ∪ Π|` for the local-optimality subset enumeration.
pub const MAX_FLAT_SET: usize = 16;
/// Environment variable that may lower (never raise) the atom cap.
pub const MAX_ATOMS_ENV: &str = "PREEMPT_MAX_ATOMS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_atoms: usize,
    pub max_constraints: usize,
    pub max_situation: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_atoms: MAX_ATOMS,
            max_constraints: MAX_CONSTRAINTS,
            max_situation: MAX_SITUATION,
        }
    }
}

impl Limits {
    /// Defaults, with the atom cap lowered by `PREEMPT_MAX_ATOMS` when set.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(n) = std::env::var(MAX_ATOMS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            limits.max_atoms = limits.max_atoms.min(n);
        }
        limits
    }
}

/// `⟨H1, ..., Hl⟩`, level 1 most important.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintHierarchy {
    levels: Vec<FormulaSet>,
}

impl ConstraintHierarchy {
    pub fn new(levels: Vec<FormulaSet>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidCase(
                "a constraint hierarchy needs at least one level".into(),
            ));
        }
        Ok(ConstraintHierarchy { levels })
    }

    /// Convenience constructor from per-level formula strings.
    pub fn parse(levels: &[&[&str]]) -> Result<Self> {
        let levels = levels
            .iter()
            .map(|lvl| FormulaSet::parse(lvl.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(levels)
    }

    pub fn levels(&self) -> &[FormulaSet] {
        &self.levels
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// `Σ |Hi|`; duplicates across levels count once per level.
    pub fn constraint_count(&self) -> usize {
        self.levels.iter().map(FormulaSet::len).sum()
    }

    /// Union of all levels.
    pub fn flatten(&self) -> FormulaSet {
        self.levels.iter().flat_map(|l| l.iter().cloned()).collect()
    }

    /// Sub-base with the given canonical index.
    pub fn subbase(&self, index: u32) -> SubBase {
        let width = self.constraint_count() as u32;
        let mut remaining = width;
        let masks = self
            .levels
            .iter()
            .map(|lvl| {
                let n = lvl.len() as u32;
                remaining -= n;
                (index >> remaining) & low_bits(n)
            })
            .collect();
        SubBase {
            masks,
            index,
            width,
        }
    }

    /// Sub-base from per-level masks (bit `len-1-j` selects formula `j` of the level).
    pub fn subbase_from_masks(&self, masks: Vec<u32>) -> SubBase {
        assert_eq!(masks.len(), self.levels.len(), "one mask per level");
        let mut index = 0u32;
        for (mask, lvl) in masks.iter().zip(&self.levels) {
            let n = lvl.len() as u32;
            debug_assert_eq!(mask & !low_bits(n), 0);
            index = (index << n) | mask;
        }
        SubBase {
            masks,
            index,
            width: self.constraint_count() as u32,
        }
    }

    pub fn full(&self) -> SubBase {
        self.subbase(low_bits(self.constraint_count() as u32))
    }

    pub fn empty(&self) -> SubBase {
        self.subbase(0)
    }

    fn check_cap(&self) -> Result<()> {
        let n = self.constraint_count();
        if n > MAX_CONSTRAINTS {
            return Err(Error::cap(CapKind::Constraints, MAX_CONSTRAINTS, n));
        }
        Ok(())
    }
}

fn low_bits(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A level-wise subset of a constraint hierarchy.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubBase {
    masks: Vec<u32>,
    index: u32,
    width: u32,
}

impl SubBase {
    /// Canonical index: concatenated level masks, level 1 most significant.
    pub fn index(&self) -> u32 {
        self.index
    }

    /// Position in the descending-index enumeration (the `k` of `δk`).
    pub fn rank(&self) -> u32 {
        low_bits(self.width) - self.index
    }

    pub fn masks(&self) -> &[u32] {
        &self.masks
    }

    pub fn size(&self) -> u32 {
        self.index.count_ones()
    }

    /// Selected formulas, one list per level.
    pub fn levels<'h>(&self, h: &'h ConstraintHierarchy) -> Vec<Vec<&'h Formula>> {
        self.masks
            .iter()
            .zip(h.levels())
            .map(|(&mask, lvl)| {
                let n = lvl.len();
                lvl.iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> (n - 1 - j) & 1 == 1)
                    .map(|(_, f)| f)
                    .collect()
            })
            .collect()
    }

    /// Selected formulas as a flat set.
    pub fn formulas(&self, h: &ConstraintHierarchy) -> FormulaSet {
        self.levels(h).into_iter().flatten().cloned().collect()
    }

    /// Readable form such as `⟨{p -> !r}, {}, {!r}⟩`.
    pub fn describe(&self, h: &ConstraintHierarchy, ascii: bool) -> String {
        let parts: Vec<String> = self
            .levels(h)
            .iter()
            .map(|lvl| {
                let items: Vec<String> = lvl.iter().map(|f| f.to_string()).collect();
                format!("{{{}}}", items.join(", "))
            })
            .collect();
        let (open, close) = if ascii { ("<", ">") } else { ("⟨", "⟩") };
        format!("{open}{}{close}", parts.join(", "))
    }
}

/// All `2^(Σ|Hi|)` sub-bases by descending canonical index.
pub fn enumerate_subbases(h: &ConstraintHierarchy) -> Result<Vec<SubBase>> {
    h.check_cap()?;
    let top = low_bits(h.constraint_count() as u32);
    Ok((0..=top).rev().map(|i| h.subbase(i)).collect())
}

/// Strict local preference: at the first level where the two differ, `b`'s
/// selection is a proper subset of `a`'s.
pub fn local_gt(a: &SubBase, b: &SubBase) -> bool {
    debug_assert_eq!(a.masks.len(), b.masks.len(), "same parent hierarchy");
    match a.masks.iter().zip(&b.masks).find(|(x, y)| x != y) {
        Some((&x, &y)) => y & !x == 0,
        None => false,
    }
}

fn sort_descending(mut subbases: Vec<SubBase>) -> Vec<SubBase> {
    subbases.sort_by_key(|sb| std::cmp::Reverse(sb.index));
    subbases
}

/// Per-constraint model sets for a hierarchy over a shared truth table.
#[derive(Debug, Clone)]
pub(crate) struct SpaceModels {
    pub(crate) table: TruthTable,
    levels: Vec<Vec<ModelSet>>,
}

impl SpaceModels {
    pub(crate) fn new(
        h: &ConstraintHierarchy,
        extra: &[&FormulaSet],
        extra_formula: Option<&Formula>,
        atom_cap: usize,
    ) -> Result<Self> {
        h.check_cap()?;
        let mut atoms = h.flatten().atoms();
        for fs in extra {
            atoms.extend(fs.atoms());
        }
        if let Some(f) = extra_formula {
            atoms.extend(f.atoms());
        }
        let table = TruthTable::new(atoms, atom_cap)?;
        let levels = h
            .levels()
            .iter()
            .map(|lvl| lvl.iter().map(|f| table.models(f)).collect())
            .collect();
        Ok(SpaceModels { table, levels })
    }

    fn level_models(&self, level: usize, mask: u32, acc: &ModelSet) -> ModelSet {
        let models = &self.levels[level];
        let n = models.len();
        let mut out = acc.clone();
        for (j, m) in models.iter().enumerate() {
            if mask >> (n - 1 - j) & 1 == 1 {
                out.and_assign(m);
            }
        }
        out
    }

    /// `base ∧ δ`.
    pub(crate) fn with_subbase(&self, sb: &SubBase, base: &ModelSet) -> ModelSet {
        let mut acc = base.clone();
        for (level, &mask) in sb.masks.iter().enumerate() {
            acc = self.level_models(level, mask, &acc);
        }
        acc
    }

    pub(crate) fn consistent(&self, sb: &SubBase, base: &ModelSet) -> bool {
        !self.with_subbase(sb, base).is_empty()
    }

    pub(crate) fn consistent_subbases(
        &self,
        h: &ConstraintHierarchy,
        base: &ModelSet,
    ) -> Vec<SubBase> {
        let top = low_bits(h.constraint_count() as u32);
        (0..=top)
            .rev()
            .map(|i| h.subbase(i))
            .filter(|sb| self.consistent(sb, base))
            .collect()
    }

    /// Maxima of `Δ^base` built level by level: at each level keep every
    /// inclusion-maximal subset consistent with what earlier levels fixed.
    pub(crate) fn maximal_levelwise(&self, h: &ConstraintHierarchy, base: &ModelSet) -> Vec<SubBase> {
        let mut out = Vec::new();
        let mut masks = Vec::with_capacity(h.level_count());
        self.extend_level(h, 0, base, &mut masks, &mut out);
        sort_descending(out)
    }

    fn extend_level(
        &self,
        h: &ConstraintHierarchy,
        level: usize,
        acc: &ModelSet,
        masks: &mut Vec<u32>,
        out: &mut Vec<SubBase>,
    ) {
        if level == h.level_count() {
            out.push(h.subbase_from_masks(masks.clone()));
            return;
        }
        if acc.is_empty() {
            return;
        }
        let n = self.levels[level].len() as u32;
        let top = low_bits(n);
        let consistent: Vec<bool> = (0..=top)
            .map(|m| !self.level_models(level, m, acc).is_empty())
            .collect();
        for m in (0..=top).rev() {
            if !consistent[m as usize] {
                continue;
            }
            let extendable = (0..n)
                .map(|b| 1u32 << b)
                .any(|bit| m & bit == 0 && consistent[(m | bit) as usize]);
            if extendable {
                continue;
            }
            masks.push(m);
            let next = self.level_models(level, m, acc);
            self.extend_level(h, level + 1, &next, masks, out);
            masks.pop();
        }
    }

    /// Maxima of `Δ^base` by filtering every consistent sub-base with `local_gt`.
    pub(crate) fn maximal_brute(&self, h: &ConstraintHierarchy, base: &ModelSet) -> Vec<SubBase> {
        let consistent = self.consistent_subbases(h, base);
        let maxima = consistent
            .iter()
            .filter(|a| !consistent.iter().any(|b| local_gt(b, a)))
            .cloned()
            .collect();
        sort_descending(maxima)
    }
}

fn base_models(models: &SpaceModels, theory: &FormulaSet, constraints: &FormulaSet) -> ModelSet {
    models
        .table
        .models_of_set(theory.iter().chain(constraints.iter()))
}

/// `Δ^Φ`: sub-bases `δ` with `T0 ∪ δ ∪ Φ` consistent, by descending index.
pub fn consistent_subbases(
    h: &ConstraintHierarchy,
    constraints: &FormulaSet,
    theory: &FormulaSet,
) -> Result<Vec<SubBase>> {
    let models = SpaceModels::new(h, &[constraints, theory], None, MAX_ATOMS)?;
    let base = base_models(&models, theory, constraints);
    Ok(models.consistent_subbases(h, &base))
}

/// `max(Δ^Φ)` under local preference, computed level-wise.
pub fn maximal_consistent_subbases(
    h: &ConstraintHierarchy,
    constraints: &FormulaSet,
    theory: &FormulaSet,
) -> Result<Vec<SubBase>> {
    let models = SpaceModels::new(h, &[constraints, theory], None, MAX_ATOMS)?;
    let base = base_models(&models, theory, constraints);
    Ok(models.maximal_levelwise(h, &base))
}

/// Reference implementation of [`maximal_consistent_subbases`] that filters
/// all of `Δ^Φ` pairwise with [`local_gt`].
pub fn maximal_consistent_subbases_brute(
    h: &ConstraintHierarchy,
    constraints: &FormulaSet,
    theory: &FormulaSet,
) -> Result<Vec<SubBase>> {
    let models = SpaceModels::new(h, &[constraints, theory], None, MAX_ATOMS)?;
    let base = base_models(&models, theory, constraints);
    Ok(models.maximal_brute(h, &base))
}

/// Model sets for everything a [`NormCase`] mentions.
#[derive(Debug, Clone)]
pub(crate) struct CaseModels {
    pub(crate) space: SpaceModels,
    pub(crate) theory: ModelSet,
    pub(crate) situation: Vec<ModelSet>,
    pub(crate) consequence: ModelSet,
    pub(crate) negation: ModelSet,
}

impl CaseModels {
    /// `T0 ∧ π` for the situation subset selected by `pi_mask` (bit `i` = element `i`).
    pub(crate) fn knowledge(&self, pi_mask: u32) -> ModelSet {
        let mut acc = self.theory.clone();
        for (i, m) in self.situation.iter().enumerate() {
            if pi_mask >> i & 1 == 1 {
                acc.and_assign(m);
            }
        }
        acc
    }

    pub(crate) fn classify(&self, models: &ModelSet) -> DerivationState {
        if models.is_empty() {
            DerivationState::Bot
        } else if models.is_subset(&self.consequence) {
            DerivationState::Pos
        } else if models.is_subset(&self.negation) {
            DerivationState::Neg
        } else {
            DerivationState::Neu
        }
    }

    pub(crate) fn state(&self, sb: &SubBase, pi_mask: u32) -> DerivationState {
        let knowledge = self.knowledge(pi_mask);
        self.classify(&self.space.with_subbase(sb, &knowledge))
    }
}

/// A validated problem instance: background theory, hierarchy, situation, consequence.
#[derive(Debug, Clone)]
pub struct NormCase {
    theory: FormulaSet,
    hierarchy: ConstraintHierarchy,
    situation: FormulaSet,
    consequence: Formula,
    models: CaseModels,
}

impl PartialEq for NormCase {
    fn eq(&self, other: &Self) -> bool {
        self.theory == other.theory
            && self.hierarchy == other.hierarchy
            && self.situation == other.situation
            && self.consequence == other.consequence
    }
}

impl NormCase {
    pub fn new(
        theory: FormulaSet,
        hierarchy: ConstraintHierarchy,
        situation: FormulaSet,
        consequence: Formula,
    ) -> Result<Self> {
        Self::with_limits(theory, hierarchy, situation, consequence, Limits::default())
    }

    /// Validates caps first, then the consistency and independence invariants.
    pub fn with_limits(
        theory: FormulaSet,
        hierarchy: ConstraintHierarchy,
        situation: FormulaSet,
        consequence: Formula,
        limits: Limits,
    ) -> Result<Self> {
        let max_constraints = limits.max_constraints.min(MAX_CONSTRAINTS);
        if hierarchy.constraint_count() > max_constraints {
            return Err(Error::cap(
                CapKind::Constraints,
                max_constraints,
                hierarchy.constraint_count(),
            ));
        }
        let max_situation = limits.max_situation.min(MAX_SITUATION);
        if situation.len() > max_situation {
            return Err(Error::cap(CapKind::Situation, max_situation, situation.len()));
        }
        let space = SpaceModels::new(
            &hierarchy,
            &[&theory, &situation],
            Some(&consequence),
            limits.max_atoms,
        )?;
        let table = &space.table;
        let theory_models = table.models_of_set(&theory);
        let situation_models: Vec<ModelSet> = situation.iter().map(|f| table.models(f)).collect();
        let consequence_models = table.models(&consequence);
        let negation = consequence_models.complement();
        let models = CaseModels {
            theory: theory_models,
            situation: situation_models,
            consequence: consequence_models,
            negation,
            space,
        };

        if models.theory.is_empty() {
            return Err(Error::InvalidCase(format!(
                "invariant `T₀ ⊬ ⊥` violated: background theory {theory} is inconsistent"
            )));
        }
        let all = low_bits(situation.len() as u32);
        let known = models.knowledge(all);
        if known.is_empty() {
            return Err(Error::InvalidCase(format!(
                "invariant `T₀ ∪ Π ⊬ ⊥` violated: situation {situation} is inconsistent with the background theory"
            )));
        }
        if known.is_subset(&models.consequence) {
            return Err(Error::InvalidCase(format!(
                "invariant `T₀ ∪ Π ⊬ ψ` violated: situation {situation} already entails consequence {consequence}"
            )));
        }
        if known.is_subset(&models.negation) {
            return Err(Error::InvalidCase(format!(
                "invariant `T₀ ∪ Π ⊬ ¬ψ` violated: situation {situation} already entails !({consequence})"
            )));
        }
        Ok(NormCase {
            theory,
            hierarchy,
            situation,
            consequence,
            models,
        })
    }

    pub fn theory(&self) -> &FormulaSet {
        &self.theory
    }

    pub fn hierarchy(&self) -> &ConstraintHierarchy {
        &self.hierarchy
    }

    pub fn situation(&self) -> &FormulaSet {
        &self.situation
    }

    pub fn consequence(&self) -> &Formula {
        &self.consequence
    }

    pub(crate) fn models(&self) -> &CaseModels {
        &self.models
    }

    /// Same norms and situation with a different consequence.
    pub fn with_consequence(&self, consequence: Formula) -> Result<NormCase> {
        NormCase::new(
            self.theory.clone(),
            self.hierarchy.clone(),
            self.situation.clone(),
            consequence,
        )
    }

    /// Same norms and consequence with a different situation.
    pub fn with_situation(&self, situation: FormulaSet) -> Result<NormCase> {
        NormCase::new(
            self.theory.clone(),
            self.hierarchy.clone(),
            situation,
            self.consequence.clone(),
        )
    }

    /// Situation subset selected by a bitmask (bit `i` = element `i`).
    pub fn knowledge(&self, pi_mask: u32) -> FormulaSet {
        self.situation
            .iter()
            .enumerate()
            .filter(|(i, _)| pi_mask >> i & 1 == 1)
            .map(|(_, f)| f.clone())
            .collect()
    }

    /// `max(Δ^π)` for the situation subset selected by `pi_mask`.
    pub fn maximal_subbases(&self, pi_mask: u32) -> Vec<SubBase> {
        let base = self.models.knowledge(pi_mask);
        self.models.space.maximal_levelwise(&self.hierarchy, &base)
    }

    /// Brute-force counterpart of [`NormCase::maximal_subbases`].
    pub fn maximal_subbases_brute(&self, pi_mask: u32) -> Vec<SubBase> {
        let base = self.models.knowledge(pi_mask);
        self.models.space.maximal_brute(&self.hierarchy, &base)
    }

    pub fn full_situation_mask(&self) -> u32 {
        low_bits(self.situation.len() as u32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    Obligatory,
    Forbidden,
    Neither,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Obligatory => "OBLIGATORY",
            VerdictKind::Forbidden => "FORBIDDEN",
            VerdictKind::Neither => "NEITHER",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// Each element of `max(Δ^Π)` with the polarity it derives.
    pub witnesses: Vec<(SubBase, DerivationState)>,
}

pub fn verdict(case: &NormCase) -> Verdict {
    let full = case.full_situation_mask();
    let witnesses: Vec<(SubBase, DerivationState)> = case
        .maximal_subbases(full)
        .into_iter()
        .map(|sb| {
            let state = case.models.state(&sb, full);
            (sb, state)
        })
        .collect();
    debug_assert!(!witnesses.is_empty(), "empty sub-base is always consistent");
    let kind = if witnesses.iter().all(|(_, s)| *s == DerivationState::Pos) {
        VerdictKind::Obligatory
    } else if witnesses.iter().all(|(_, s)| *s == DerivationState::Neg) {
        VerdictKind::Forbidden
    } else {
        VerdictKind::Neither
    };
    Verdict { kind, witnesses }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalOptimality {
    pub optimized: bool,
    /// Maximal consistent subsets of `flatten(H) ∪ Π` deciding neither `ψ` nor `¬ψ`.
    pub non_decisive: Vec<FormulaSet>,
}

/// Checks that every maximal consistent subset of `flatten(H) ∪ Π` decides
/// the consequence. Local preference is the only comparator, so the other
/// condition holds trivially.
pub fn is_locally_optimized(case: &NormCase) -> Result<LocalOptimality> {
    let flat = case.hierarchy.flatten().union(&case.situation);
    if flat.len() > MAX_FLAT_SET {
        return Err(Error::cap(CapKind::FlatSet, MAX_FLAT_SET, flat.len()));
    }
    let models = &case.models;
    let table = &models.space.table;
    let member_models: Vec<ModelSet> = flat.iter().map(|f| table.models(f)).collect();
    let n = flat.len();
    let top = low_bits(n as u32);
    let consistent: Vec<bool> = (0..=top)
        .map(|mask| {
            let mut acc = models.theory.clone();
            for (i, m) in member_models.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc.and_assign(m);
                }
            }
            !acc.is_empty()
        })
        .collect();
    let mut non_decisive = Vec::new();
    for mask in (0..=top).rev() {
        if !consistent[mask as usize] {
            continue;
        }
        let maximal = (0..n)
            .map(|i| 1u32 << i)
            .all(|bit| mask & bit != 0 || !consistent[(mask | bit) as usize]);
        if !maximal {
            continue;
        }
        let subset: FormulaSet = flat
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, f)| f.clone())
            .collect();
        let selected = table.models_of_set(subset.iter().chain(case.theory.iter()));
        let decisive =
            selected.is_subset(&models.consequence) || selected.is_subset(&models.negation);
        if !decisive {
            non_decisive.push(subset);
        }
    }
    Ok(LocalOptimality {
        optimized: non_decisive.is_empty(),
        non_decisive,
    })
}
