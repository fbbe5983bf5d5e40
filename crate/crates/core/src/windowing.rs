//! Overlapping slide windows and per-slide candidate collation.

use serde::{Deserialize, Serialize};

use crate::schema::SlidePlan;

pub const DEFAULT_WINDOW_SIZE: u32 = 8;
pub const DEFAULT_OVERLAP: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WindowSpec {
    pub index: usize,
    pub start_slide: u32,
    pub end_slide: u32,
}

impl WindowSpec {
    pub fn contains(&self, slide_number: u32) -> bool {
        (self.start_slide..=self.end_slide).contains(&slide_number)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> u32 {
        self.end_slide - self.start_slide + 1
    }

    pub fn slides(&self) -> std::ops::RangeInclusive<u32> {
        self.start_slide..=self.end_slide
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlanResult {
    pub window: WindowSpec,
    pub plans: Vec<SlidePlan>,
}

/// One per-window plan proposed for a slide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub window_index: usize,
    pub plan: SlidePlan,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlideCandidates {
    pub slide_number: u32,
    pub candidates: Vec<Candidate>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WindowError {
    #[error("invalid window parameters: total_slides={total_slides}, window_size={window_size}, overlap={overlap} (need total >= 1, size >= 2, overlap < size)")]
    InvalidParameters {
        total_slides: u32,
        window_size: u32,
        overlap: u32,
    },
    #[error("slide {0} has no window plan candidate")]
    MissingSlide(u32),
    #[error("window {window_index} returned a plan for slide {slide_number} outside the deck or its window")]
    UnexpectedSlide {
        window_index: usize,
        slide_number: u32,
    },
    #[error("window {window_index} returned more than one plan for slide {slide_number}")]
    DuplicateCandidate {
        window_index: usize,
        slide_number: u32,
    },
}

/// Splits `1..=total_slides` into windows of `window_size` advancing by
/// `window_size - overlap`. The last window is pulled back so it ends at
/// `total_slides` at full size.
pub fn plan_windows(
    total_slides: u32,
    window_size: u32,
    overlap: u32,
) -> Result<Vec<WindowSpec>, WindowError> {
    if total_slides == 0 || window_size < 2 || overlap >= window_size {
        return Err(WindowError::InvalidParameters {
            total_slides,
            window_size,
            overlap,
        });
    }
    if total_slides <= window_size {
        return Ok(vec![WindowSpec {
            index: 0,
            start_slide: 1,
            end_slide: total_slides,
        }]);
    }
    let stride = window_size - overlap;
    let mut windows = Vec::new();
    let mut start = 1u32;
    loop {
        let end = start + window_size - 1;
        if end >= total_slides {
            windows.push(WindowSpec {
                index: windows.len(),
                start_slide: total_slides - window_size + 1,
                end_slide: total_slides,
            });
            break;
        }
        windows.push(WindowSpec {
            index: windows.len(),
            start_slide: start,
            end_slide: end,
        });
        start += stride;
    }
    Ok(windows)
}

/// Groups window plans by slide, keeping every window's proposal labeled by
/// its window index. Resolution is left to deck synthesis.
pub fn collate_candidates(
    results: &[WindowPlanResult],
    total_slides: u32,
) -> Result<Vec<SlideCandidates>, WindowError> {
    let mut slots: Vec<Vec<Candidate>> = vec![Vec::new(); total_slides as usize];
    let mut ordered: Vec<&WindowPlanResult> = results.iter().collect();
    ordered.sort_by_key(|r| r.window.index);
    for result in ordered {
        let window_index = result.window.index;
        for plan in &result.plans {
            let n = plan.slide_number;
            if n == 0 || n > total_slides || !result.window.contains(n) {
                return Err(WindowError::UnexpectedSlide {
                    window_index,
                    slide_number: n,
                });
            }
            let slot = &mut slots[(n - 1) as usize];
            if slot.iter().any(|c| c.window_index == window_index) {
                return Err(WindowError::DuplicateCandidate {
                    window_index,
                    slide_number: n,
                });
            }
            slot.push(Candidate {
                window_index,
                plan: plan.clone(),
            });
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(i, candidates)| {
            let slide_number = i as u32 + 1;
            if candidates.is_empty() {
                Err(WindowError::MissingSlide(slide_number))
            } else {
                Ok(SlideCandidates {
                    slide_number,
                    candidates,
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{ModalityType, RoleInDeck};

    fn spans(ws: &[WindowSpec]) -> Vec<(u32, u32)> {
        ws.iter().map(|w| (w.start_slide, w.end_slide)).collect()
    }

    #[test]
    fn single_window_when_deck_fits() {
        assert_eq!(spans(&plan_windows(4, 6, 2).unwrap()), vec![(1, 4)]);
        assert_eq!(spans(&plan_windows(6, 6, 2).unwrap()), vec![(1, 6)]);
    }

    #[test]
    fn stride_and_clamp() {
        assert_eq!(
            spans(&plan_windows(10, 6, 2).unwrap()),
            vec![(1, 6), (5, 10)]
        );
        assert_eq!(
            spans(&plan_windows(12, 6, 2).unwrap()),
            vec![(1, 6), (5, 10), (7, 12)]
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(plan_windows(10, 6, 6).is_err());
        assert!(plan_windows(10, 1, 0).is_err());
        assert!(plan_windows(0, 6, 2).is_err());
    }

    fn plan(n: u32) -> SlidePlan {
        SlidePlan {
            slide_number: n,
            slide_title: format!("Slide {n}"),
            local_summary: String::new(),
            modality_type: ModalityType::Text,
            role_in_deck: RoleInDeck::Mechanism,
            eligible_for_questions: true,
            eligibility_reason: String::new(),
            question_budget: 1,
            question_mix: vec![],
        }
    }

    fn results_for(windows: &[WindowSpec]) -> Vec<WindowPlanResult> {
        windows
            .iter()
            .map(|w| WindowPlanResult {
                window: *w,
                plans: w.slides().map(plan).collect(),
            })
            .collect()
    }

    #[test]
    fn overlap_slides_get_one_candidate_per_window() {
        let windows = plan_windows(10, 6, 2).unwrap();
        let collated = collate_candidates(&results_for(&windows), 10).unwrap();
        assert_eq!(collated.len(), 10);
        assert_eq!(collated[4].candidates.len(), 2);
        assert_eq!(collated[2].candidates.len(), 1);
        let idx: Vec<usize> = collated[5]
            .candidates
            .iter()
            .map(|c| c.window_index)
            .collect();
        assert_eq!(idx, vec![0, 1]);
    }

    #[test]
    fn single_window_gives_one_candidate_each() {
        let windows = plan_windows(5, 8, 2).unwrap();
        let collated = collate_candidates(&results_for(&windows), 5).unwrap();
        assert!(collated.iter().all(|c| c.candidates.len() == 1));
    }

    #[test]
    fn missing_slide_is_reported() {
        let windows = plan_windows(10, 6, 2).unwrap();
        let mut results = results_for(&windows);
        // slide 6 is covered by both windows; drop it from both
        for r in &mut results {
            r.plans.retain(|p| p.slide_number != 6);
        }
        assert_eq!(
            collate_candidates(&results, 10),
            Err(WindowError::MissingSlide(6))
        );
    }

    #[test]
    fn plans_outside_window_are_rejected() {
        let windows = plan_windows(10, 6, 2).unwrap();
        let mut results = results_for(&windows);
        results[0].plans.push(plan(9));
        assert!(matches!(
            collate_candidates(&results, 10),
            Err(WindowError::UnexpectedSlide {
                slide_number: 9,
                ..
            })
        ));
    }
}
