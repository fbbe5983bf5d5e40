mod common;

use common::{check_window_properties, expected_windows, plain_plan};
use deckqa_core::schema::RoleInDeck;
use deckqa_core::windowing::{collate_candidates, plan_windows, WindowError, WindowPlanResult};

fn spans(total: u32, size: u32, overlap: u32) -> Vec<(u32, u32)> {
    plan_windows(total, size, overlap)
        .unwrap()
        .iter()
        .map(|w| (w.start_slide, w.end_slide))
        .collect()
}

#[test]
fn exhaustive_grid_matches_closed_form() {
    for total in 1..=200 {
        for size in 2..=12 {
            for overlap in 0..size {
                let got = spans(total, size, overlap);
                assert_eq!(
                    got,
                    expected_windows(total, size, overlap),
                    "total={total} size={size} overlap={overlap}"
                );
                check_window_properties(total, size, overlap, &got).unwrap();
                let ws = plan_windows(total, size, overlap).unwrap();
                assert!(ws.iter().enumerate().all(|(i, w)| w.index == i));
            }
        }
    }
}

#[test]
fn documented_examples() {
    assert_eq!(spans(4, 6, 2), vec![(1, 4)]);
    assert_eq!(spans(10, 6, 2), vec![(1, 6), (5, 10)]);
    assert_eq!(spans(12, 6, 2), vec![(1, 6), (5, 10), (7, 12)]);
}

#[test]
fn overlap_must_be_smaller_than_size() {
    for size in 2..=12 {
        assert!(matches!(
            plan_windows(20, size, size),
            Err(WindowError::InvalidParameters { .. })
        ));
    }
}

fn results_for(total: u32, size: u32, overlap: u32) -> Vec<WindowPlanResult> {
    plan_windows(total, size, overlap)
        .unwrap()
        .into_iter()
        .map(|w| WindowPlanResult {
            window: w,
            plans: w
                .slides()
                .map(|n| plain_plan(n, RoleInDeck::Mechanism, 1))
                .collect(),
        })
        .collect()
}

#[test]
fn candidate_counts_equal_covering_windows() {
    for total in 1..=40 {
        for size in 2..=8 {
            for overlap in 0..size {
                let results = results_for(total, size, overlap);
                let collated = collate_candidates(&results, total).unwrap();
                assert_eq!(collated.len(), total as usize);
                for sc in &collated {
                    let covering: Vec<usize> = results
                        .iter()
                        .filter(|r| {
                            r.window.start_slide <= sc.slide_number
                                && sc.slide_number <= r.window.end_slide
                        })
                        .map(|r| r.window.index)
                        .collect();
                    let got: Vec<usize> = sc.candidates.iter().map(|c| c.window_index).collect();
                    assert_eq!(got, covering, "slide {}", sc.slide_number);
                }
            }
        }
    }
}

#[test]
fn overlap_slide_has_two_candidates() {
    let collated = collate_candidates(&results_for(10, 6, 2), 10).unwrap();
    assert_eq!(collated[4].candidates.len(), 2);
    assert_eq!(collated[2].candidates.len(), 1);
}

#[test]
fn missing_slide_is_reported() {
    let mut results = results_for(10, 6, 2);
    for r in &mut results {
        r.plans.retain(|p| p.slide_number != 6);
    }
    assert_eq!(
        collate_candidates(&results, 10),
        Err(WindowError::MissingSlide(6))
    );
}

#[test]
fn results_are_ordered_by_window_index() {
    let mut results = results_for(12, 6, 2);
    results.reverse();
    let collated = collate_candidates(&results, 12).unwrap();
    let order: Vec<usize> = collated[6]
        .candidates
        .iter()
        .map(|c| c.window_index)
        .collect();
    assert_eq!(order, vec![1, 2]);
}
