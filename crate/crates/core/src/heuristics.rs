//! Post-synthesis static heuristics.
//!
//! Two rules run in order, and the first one that matches a slide wins:
//! exact duplicates (normalized native text equal to an earlier non-empty
//! slide) and title slides (synthesized role `title`). Both zero the budget.
//! Extra [`BudgetRule`]s may be supplied; they can only lower budgets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::ingest::{normalize_slide_text, ExtractedDeck};
use crate::schema::{RoleInDeck, SlidePlan};

pub const RULE_EXACT_DUPLICATE: &str = "static_heuristic:exact_duplicate";
pub const RULE_TITLE_SLIDE: &str = "static_heuristic:title_slide";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuplicateHit {
    pub slide_number: u32,
    pub duplicate_of: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleHit {
    pub slide_number: u32,
    pub rule: String,
    pub previous_budget: u8,
    pub new_budget: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct HeuristicReport {
    pub zeroed_duplicates: Vec<DuplicateHit>,
    pub zeroed_titles: Vec<u32>,
    /// Hits from caller-supplied rules, if any.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub adjusted: Vec<RuleHit>,
    pub untouched: usize,
}

impl HeuristicReport {
    pub fn touched_slides(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .zeroed_duplicates
            .iter()
            .map(|d| d.slide_number)
            .chain(self.zeroed_titles.iter().copied())
            .chain(self.adjusted.iter().map(|h| h.slide_number))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Hook for additional budget-balancing rules (for example per-modality
/// caps). A rule returns the budget it wants for a plan, or `None` to pass.
pub trait BudgetRule: Send + Sync {
    fn name(&self) -> &str;
    fn budget_for(&self, plan: &SlidePlan) -> Option<u8>;
}

/// Every slide whose normalized text equals an earlier slide's, paired with
/// the earliest such slide. Empty text never matches.
pub fn find_duplicate_slides(deck: &ExtractedDeck) -> Vec<DuplicateHit> {
    let mut first_seen: HashMap<String, u32> = HashMap::new();
    let mut hits = Vec::new();
    for slide in &deck.slides {
        let key = normalize_slide_text(&slide.native_text);
        if key.is_empty() {
            continue;
        }
        match first_seen.get(&key) {
            Some(&first) => hits.push(DuplicateHit {
                slide_number: slide.slide_number,
                duplicate_of: first,
            }),
            None => {
                first_seen.insert(key, slide.slide_number);
            }
        }
    }
    hits
}

fn zero(plan: &mut SlidePlan, reason: String) {
    plan.question_budget = 0;
    plan.eligible_for_questions = false;
    plan.eligibility_reason = reason;
}

pub fn apply_static_heuristics(
    plans: &[SlidePlan],
    deck: &ExtractedDeck,
) -> (Vec<SlidePlan>, HeuristicReport) {
    apply_static_heuristics_with(plans, deck, &[])
}

pub fn apply_static_heuristics_with(
    plans: &[SlidePlan],
    deck: &ExtractedDeck,
    extra_rules: &[&dyn BudgetRule],
) -> (Vec<SlidePlan>, HeuristicReport) {
    let duplicates: HashMap<u32, u32> = find_duplicate_slides(deck)
        .into_iter()
        .map(|d| (d.slide_number, d.duplicate_of))
        .collect();
    let mut report = HeuristicReport::default();
    let mut out = Vec::with_capacity(plans.len());
    for plan in plans {
        let mut plan = plan.clone();
        if let Some(&first) = duplicates.get(&plan.slide_number) {
            zero(
                &mut plan,
                format!("{RULE_EXACT_DUPLICATE} (same text as slide {first})"),
            );
            report.zeroed_duplicates.push(DuplicateHit {
                slide_number: plan.slide_number,
                duplicate_of: first,
            });
        } else if plan.role_in_deck == RoleInDeck::Title {
            zero(&mut plan, RULE_TITLE_SLIDE.to_string());
            report.zeroed_titles.push(plan.slide_number);
        } else if let Some((rule, budget)) = extra_rules
            .iter()
            .find_map(|r| r.budget_for(&plan).map(|b| (r.name(), b)))
            .filter(|(_, b)| *b < plan.question_budget)
        {
            report.adjusted.push(RuleHit {
                slide_number: plan.slide_number,
                rule: rule.to_string(),
                previous_budget: plan.question_budget,
                new_budget: budget,
            });
            if budget == 0 {
                zero(&mut plan, format!("static_heuristic:{rule}"));
            } else {
                plan.question_budget = budget;
            }
        } else {
            report.untouched += 1;
        }
        out.push(plan);
    }
    (out, report)
}
