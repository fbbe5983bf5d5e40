use std::sync::mpsc::Sender;
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::heuristics::HeuristicReport;
use crate::schema::FinalDocument;

/// Pipeline stages in the order they run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Preprocess,
    WindowPlanning,
    DeckSynthesis,
    Heuristics,
    Annotation,
    Reconciliation,
    Reannotation,
    Compile,
}

impl Stage {
    pub const ALL: &'static [Stage] = &[
        Stage::Preprocess,
        Stage::WindowPlanning,
        Stage::DeckSynthesis,
        Stage::Heuristics,
        Stage::Annotation,
        Stage::Reconciliation,
        Stage::Reannotation,
        Stage::Compile,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventPayload {
    PhaseStarted {
        phase: Stage,
    },
    WindowPlanned {
        window_index: usize,
        start_slide: u32,
        end_slide: u32,
        attempts: usize,
    },
    SynthesisDone {
        total_slides: u32,
        sections: usize,
        eligible_slides: usize,
        attempts: usize,
    },
    HeuristicsApplied {
        report: HeuristicReport,
    },
    SlideAnnotated {
        slide_number: u32,
        questions: usize,
        /// False when the slide had no budget and was built locally.
        generated: bool,
        attempts: usize,
    },
    ReconciliationDone {
        actions: usize,
        rerun_slides: Vec<u32>,
        attempts: usize,
    },
    SlideReannotated {
        slide_number: u32,
        questions: usize,
        attempts: usize,
    },
    Completed {
        document: Box<FinalDocument>,
    },
    Error {
        message: String,
        status: u16,
    },
}

impl EventPayload {
    pub fn kind(&self) -> &'static str {
        match self {
            EventPayload::PhaseStarted { .. } => "phase_started",
            EventPayload::WindowPlanned { .. } => "window_planned",
            EventPayload::SynthesisDone { .. } => "synthesis_done",
            EventPayload::HeuristicsApplied { .. } => "heuristics_applied",
            EventPayload::SlideAnnotated { .. } => "slide_annotated",
            EventPayload::ReconciliationDone { .. } => "reconciliation_done",
            EventPayload::SlideReannotated { .. } => "slide_reannotated",
            EventPayload::Completed { .. } => "completed",
            EventPayload::Error { .. } => "error",
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            EventPayload::Completed { .. } | EventPayload::Error { .. }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineEvent {
    pub at: DateTime<Utc>,
    #[serde(flatten)]
    pub payload: EventPayload,
}

impl PipelineEvent {
    /// One NDJSON line, without the trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("events serialize")
    }
}

/// Receives events, possibly from several worker threads.
pub trait EventSink: Send + Sync {
    fn emit(&self, event: PipelineEvent);
}

/// Discards everything.
pub struct NullSink;

impl EventSink for NullSink {
    fn emit(&self, _event: PipelineEvent) {}
}

/// Collects events in arrival order.
#[derive(Default)]
pub struct VecSink(Mutex<Vec<PipelineEvent>>);

impl VecSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn events(&self) -> Vec<PipelineEvent> {
        self.0.lock().expect("sink lock").clone()
    }

    pub fn into_events(self) -> Vec<PipelineEvent> {
        self.0.into_inner().expect("sink lock")
    }
}

impl EventSink for VecSink {
    fn emit(&self, event: PipelineEvent) {
        self.0.lock().expect("sink lock").push(event);
    }
}

/// Forwards events over a channel; sends after the receiver is gone are
/// dropped.
pub struct ChannelSink(Mutex<Sender<PipelineEvent>>);

impl ChannelSink {
    pub fn new(tx: Sender<PipelineEvent>) -> Self {
        Self(Mutex::new(tx))
    }
}

impl EventSink for ChannelSink {
    fn emit(&self, event: PipelineEvent) {
        let _ = self.0.lock().expect("sink lock").send(event);
    }
}

/// Calls a closure for each event. The closure is serialized by a lock.
pub struct FnSink<F>(Mutex<F>);

impl<F: FnMut(PipelineEvent) + Send> FnSink<F> {
    pub fn new(f: F) -> Self {
        Self(Mutex::new(f))
    }
}

impl<F: FnMut(PipelineEvent) + Send> EventSink for FnSink<F> {
    fn emit(&self, event: PipelineEvent) {
        (self.0.lock().expect("sink lock"))(event);
    }
}

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

/// Stamps payloads with the clock and hands them to the sink.
pub struct Emitter<'a> {
    sink: &'a dyn EventSink,
    clock: &'a dyn Clock,
}

impl<'a> Emitter<'a> {
    pub fn new(sink: &'a dyn EventSink, clock: &'a dyn Clock) -> Self {
        Self { sink, clock }
    }

    pub fn emit(&self, payload: EventPayload) {
        self.sink.emit(PipelineEvent {
            at: self.clock.now(),
            payload,
        });
    }

    pub fn stage(&self, phase: Stage) {
        self.emit(EventPayload::PhaseStarted { phase });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    #[test]
    fn wire_shape() {
        let e = PipelineEvent {
            at: Utc.with_ymd_and_hms(2024, 1, 2, 3, 4, 5).unwrap(),
            payload: EventPayload::PhaseStarted {
                phase: Stage::WindowPlanning,
            },
        };
        let line = e.to_json_line();
        assert_eq!(
            line,
            r#"{"at":"2024-01-02T03:04:05Z","event":"phase_started","phase":"window_planning"}"#
        );
        let back: PipelineEvent = serde_json::from_str(&line).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn error_event_shape() {
        let e = PipelineEvent {
            at: Utc.with_ymd_and_hms(2024, 1, 2, 3, 4, 5).unwrap(),
            payload: EventPayload::Error {
                message: "boom".into(),
                status: 502,
            },
        };
        let v: serde_json::Value = serde_json::from_str(&e.to_json_line()).unwrap();
        assert_eq!(v["event"], "error");
        assert_eq!(v["message"], "boom");
        assert_eq!(v["status"], 502);
        assert_eq!(e.payload.kind(), "error");
        assert!(e.payload.is_terminal());
    }
}
