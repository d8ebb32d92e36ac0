//! Turn-taking state machine.

use copaint_core::affect::VaPoint;
use copaint_core::canvas::Raster;
use copaint_core::metaphor::{MetaphorDecision, TurnAnalysis, TurnHistory};
use copaint_core::sketch::StrokePlan;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionState {
    HumanTurn,
    RobotTurn,
    AwaitingFeedback,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SessionEvent {
    EndTurn,
    ResponseReady,
    Feedback,
    Skip,
    Close,
}

impl SessionState {
    pub const ALL: [SessionState; 4] = [
        SessionState::HumanTurn,
        SessionState::RobotTurn,
        SessionState::AwaitingFeedback,
        SessionState::Closed,
    ];
}

impl SessionEvent {
    pub const ALL: [SessionEvent; 5] = [
        SessionEvent::EndTurn,
        SessionEvent::ResponseReady,
        SessionEvent::Feedback,
        SessionEvent::Skip,
        SessionEvent::Close,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("invalid transition: {event:?} while {state:?}")]
pub struct InvalidTransition {
    pub state: SessionState,
    pub event: SessionEvent,
}

/// The transition table. Closing is allowed from anywhere, including an
/// already closed session.
pub fn next_state(state: SessionState, event: SessionEvent) -> Result<SessionState, InvalidTransition> {
    use SessionEvent as E;
    use SessionState as S;
    match (state, event) {
        (_, E::Close) => Ok(S::Closed),
        (S::HumanTurn, E::EndTurn) => Ok(S::RobotTurn),
        (S::RobotTurn, E::ResponseReady) => Ok(S::AwaitingFeedback),
        (S::AwaitingFeedback, E::Feedback | E::Skip) => Ok(S::HumanTurn),
        _ => Err(InvalidTransition { state, event }),
    }
}

/// Self-Assessment Manikin ratings, 1 being the positive / excited pole.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Feedback {
    pub sam_valence: u8,
    pub sam_arousal: u8,
    pub mapped: VaPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("SAM ratings must lie in 1..=9, got ({0}, {1})")]
pub struct SamOutOfRange(pub u8, pub u8);

impl Feedback {
    pub fn from_sam(sam_valence: u8, sam_arousal: u8) -> Result<Self, SamOutOfRange> {
        let ok = |v: u8| (1..=9).contains(&v);
        if !ok(sam_valence) || !ok(sam_arousal) {
            return Err(SamOutOfRange(sam_valence, sam_arousal));
        }
        let map = |v: u8| (5.0 - v as f64) / 4.0;
        Ok(Self {
            sam_valence,
            sam_arousal,
            mapped: VaPoint::new(map(sam_valence), map(sam_arousal)),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RobotResponse {
    pub analysis: TurnAnalysis,
    pub decision: MetaphorDecision,
    pub stroke_plan: StrokePlan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TurnRecord {
    #[serde(flatten)]
    pub response: RobotResponse,
    pub feedback: Option<Feedback>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub profile_ids: Vec<String>,
    pub state: SessionState,
    pub canvas: Option<Raster>,
    /// Robot turns completed.
    pub turn_count: usize,
    pub history: Vec<TurnRecord>,
    /// Recently painted concepts and recipes, never repeated.
    pub painted: TurnHistory,
}

impl Session {
    pub fn new(id: impl Into<String>, profile_ids: Vec<String>, history_capacity: usize) -> Self {
        Self {
            id: id.into(),
            profile_ids,
            state: SessionState::HumanTurn,
            canvas: None,
            turn_count: 0,
            history: Vec::new(),
            painted: TurnHistory::new(history_capacity),
        }
    }

    pub fn advance(&mut self, event: SessionEvent) -> Result<SessionState, InvalidTransition> {
        self.state = next_state(self.state, event)?;
        Ok(self.state)
    }

    /// Checks that `event` would be accepted without applying it.
    pub fn expect(&self, event: SessionEvent) -> Result<(), InvalidTransition> {
        next_state(self.state, event).map(|_| ())
    }
}

/// Public view of a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSummary {
    pub session_id: String,
    pub profile_ids: Vec<String>,
    pub state: SessionState,
    pub turn_count: usize,
    pub has_canvas: bool,
}

impl From<&Session> for SessionSummary {
    fn from(s: &Session) -> Self {
        Self {
            session_id: s.id.clone(),
            profile_ids: s.profile_ids.clone(),
            state: s.state,
            turn_count: s.turn_count,
            has_canvas: s.canvas.is_some(),
        }
    }
}
