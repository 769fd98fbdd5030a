//! Cross-checks of one case, and a seeded generator that runs them over many
//! small random cases.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dsa::{build_framework, check_framework_properties, PropertyCheck, PropertyReport};
use crate::error::{Error, Result};
use crate::explain::{
    admissible_dispute_tree, build_explanation, maximal_dispute_tree, verify_dispute_tree, Party,
};
use crate::hierarchy::{
    is_locally_optimized, verdict, ConstraintHierarchy, NormCase, SubBase, VerdictKind,
};
use crate::logic::{Formula, FormulaSet};
use crate::normfile::to_normfile;
use crate::semantics::{
    check_extension_properties, enumerate_extensions, grounded_extension, is_admissible,
    Semantics, MAX_BRUTE_FORCE_ARGUMENTS,
};

fn check(name: &'static str, failures: Vec<String>) -> PropertyCheck {
    PropertyCheck {
        name,
        applicable: true,
        passed: failures.is_empty(),
        detail: failures.join("; "),
    }
}

fn skipped(name: &'static str, why: &str) -> PropertyCheck {
    PropertyCheck {
        name,
        applicable: false,
        passed: true,
        detail: why.to_string(),
    }
}

fn sorted_indices(sbs: &[SubBase]) -> Vec<u32> {
    let mut v: Vec<u32> = sbs.iter().map(SubBase::index).collect();
    v.sort_unstable();
    v
}

/// Runs every cross-check on `case`. Errors only when a computation itself
/// fails (caps, or an internal inconsistency).
pub fn check_case(case: &NormCase) -> Result<PropertyReport> {
    let mut checks = Vec::new();

    let mut failures = Vec::new();
    for pi in 0..=case.full_situation_mask() {
        let fast = sorted_indices(&case.maximal_subbases(pi));
        let brute = sorted_indices(&case.maximal_subbases_brute(pi));
        if fast != brute {
            failures.push(format!(
                "{}: level-wise {fast:?}, brute force {brute:?}",
                case.knowledge(pi)
            ));
        }
    }
    checks.push(check("levelwise-maxima", failures));

    let fw = build_framework(case)?;
    checks.extend(check_framework_properties(&fw, case).checks);

    let aa = fw.to_aa();
    let grounded = grounded_extension(&aa).members;
    checks.extend(check_extension_properties(&fw, case, &grounded).checks);

    if aa.len() > MAX_BRUTE_FORCE_ARGUMENTS {
        checks.push(skipped("grounded-unique-extension", "too many arguments"));
    } else if !aa.is_acyclic() {
        checks.push(skipped("grounded-unique-extension", "framework is cyclic"));
    } else {
        let mut failures = Vec::new();
        for (name, kind) in [
            ("stable", Semantics::Stable),
            ("preferred", Semantics::Preferred),
            ("complete", Semantics::Complete),
        ] {
            let found = enumerate_extensions(&aa, kind)?;
            if found != [grounded.clone()] {
                failures.push(format!("{name} extensions {found:?}, grounded {grounded:?}"));
            }
        }
        checks.push(check("grounded-unique-extension", failures));
    }

    if aa.is_acyclic() {
        let mut failures = Vec::new();
        for x in 0..aa.len() {
            let id = aa.id(x);
            let tree = maximal_dispute_tree(&aa, x)?;
            if let Err(why) = verify_dispute_tree(&aa, &tree) {
                failures.push(format!("maximal tree for {id}: {why}"));
            }
            if grounded.contains(&x) {
                let tree = admissible_dispute_tree(&aa, &grounded, x)?;
                if let Err(why) = verify_dispute_tree(&aa, &tree) {
                    failures.push(format!("admissible tree for {id}: {why}"));
                }
                if !is_admissible(&aa, &tree.arguments_of(Party::Proponent)) {
                    failures.push(format!("proponents of {id}'s tree are not admissible"));
                }
            }
        }
        checks.push(check("dispute-trees", failures));
    } else {
        checks.push(skipped("dispute-trees", "framework is cyclic"));
    }

    let decided = verdict(case).kind != VerdictKind::Neither;
    let optimized = is_locally_optimized(case)?.optimized;
    if decided && optimized {
        let failures = match build_explanation(case) {
            Ok(_) => Vec::new(),
            Err(Error::ExistenceViolation(why)) => vec![why],
            Err(e) => return Err(e),
        };
        checks.push(check("explanation-exists", failures));
    } else {
        checks.push(skipped(
            "explanation-exists",
            "requires a locally optimized, decided case",
        ));
    }

    let negated = case.with_consequence(Formula::not(case.consequence().clone()))?;
    let (a, b) = (verdict(case).kind, verdict(&negated).kind);
    let expected = match a {
        VerdictKind::Obligatory => VerdictKind::Forbidden,
        VerdictKind::Forbidden => VerdictKind::Obligatory,
        VerdictKind::Neither => VerdictKind::Neither,
    };
    let failures = if b == expected {
        Vec::new()
    } else {
        vec![format!("{a} for the consequence but {b} for its negation")]
    };
    checks.push(check("verdict-duality", failures));

    Ok(PropertyReport { checks })
}

const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

fn literal(rng: &mut ChaCha8Rng, atoms: &[&str]) -> Formula {
    let a = Formula::atom(*atoms.choose(rng).expect("non-empty"));
    if rng.gen_bool(0.5) {
        Formula::not(a)
    } else {
        a
    }
}

fn constraint(rng: &mut ChaCha8Rng, atoms: &[&str]) -> Formula {
    match rng.gen_range(0..10) {
        0..=2 => literal(rng, atoms),
        3..=7 => Formula::implies(literal(rng, atoms), literal(rng, atoms)),
        _ => Formula::implies(
            Formula::and(literal(rng, atoms), literal(rng, atoms)),
            literal(rng, atoms),
        ),
    }
}

/// Draws one candidate case; it may fail validation.
pub fn random_case(rng: &mut ChaCha8Rng) -> Result<NormCase> {
    let atoms = &ATOMS[..rng.gen_range(2..=ATOMS.len())];
    let level_count = rng.gen_range(1..=3);
    let total = rng.gen_range(level_count..=6);
    let mut levels = vec![FormulaSet::new(); level_count];
    for i in 0..total {
        let level = if i < level_count { i } else { rng.gen_range(0..level_count) };
        levels[level].insert(constraint(rng, atoms));
    }
    let mut theory = FormulaSet::new();
    if rng.gen_bool(0.2) {
        theory.insert(Formula::implies(literal(rng, atoms), literal(rng, atoms)));
    }
    let mut situation = FormulaSet::new();
    for _ in 0..rng.gen_range(0..=3) {
        situation.insert(literal(rng, atoms));
    }
    let consequence = Formula::atom(*atoms.choose(rng).expect("non-empty"));
    NormCase::new(theory, ConstraintHierarchy::new(levels)?, situation, consequence)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub not_applicable: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub normfile: String,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfcheckReport {
    pub seed: u64,
    pub checked: usize,
    pub discarded: usize,
    pub tallies: BTreeMap<&'static str, Tally>,
    pub counterexamples: Vec<Counterexample>,
}

impl SelfcheckReport {
    fn new(seed: u64) -> Self {
        SelfcheckReport {
            seed,
            checked: 0,
            discarded: 0,
            tallies: BTreeMap::new(),
            counterexamples: Vec::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.counterexamples.is_empty()
    }

    fn record(&mut self, case: &NormCase, report: &PropertyReport) {
        self.checked += 1;
        for c in &report.checks {
            let t = self.tallies.entry(c.name).or_default();
            match (c.applicable, c.passed) {
                (false, _) => t.not_applicable += 1,
                (true, true) => t.passed += 1,
                (true, false) => t.failed += 1,
            }
        }
        if !report.all_passed() {
            self.counterexamples.push(Counterexample {
                normfile: to_normfile(case),
                failures: report
                    .failures()
                    .map(|c| format!("{}: {}", c.name, c.detail))
                    .collect(),
            });
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!(
            "selfcheck seed {}: {} cases checked, {} candidates discarded\n",
            self.seed, self.checked, self.discarded
        );
        let width = self.tallies.keys().map(|k| k.len()).max().unwrap_or(0);
        for (name, t) in &self.tallies {
            out.push_str(&format!(
                "  {name:<width$}  passed {:>4}  failed {:>4}  n/a {:>4}\n",
                t.passed, t.failed, t.not_applicable
            ));
        }
        for (i, cx) in self.counterexamples.iter().enumerate() {
            out.push_str(&format!("# counterexample {}\n", i + 1));
            for f in &cx.failures {
                out.push_str(&format!("# {f}\n"));
            }
            out.push_str(&cx.normfile);
        }
        out.push_str(if self.all_passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

/// Checks `count` valid random cases drawn from `seed`. Candidates failing
/// validation are discarded and redrawn.
pub fn run_selfcheck(seed: u64, count: usize) -> Result<SelfcheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SelfcheckReport::new(seed);
    let budget = count.saturating_mul(100).max(100);
    while report.checked < count {
        if report.checked + report.discarded >= budget {
            return Err(Error::Internal(format!(
                "only {} valid cases in {budget} draws",
                report.checked
            )));
        }
        let case = match random_case(&mut rng) {
            Ok(case) => case,
            Err(Error::InvalidCase(_)) => {
                report.discarded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let checks = check_case(&case)?;
        report.record(&case, &checks);
    }
    Ok(report)
}

/// Same report shape for a single case.
pub fn selfcheck_case(case: &NormCase) -> Result<SelfcheckReport> {
    let mut report = SelfcheckReport::new(0);
    let checks = check_case(case)?;
    report.record(case, &checks);
    Ok(report)
}
