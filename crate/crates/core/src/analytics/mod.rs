//! Interaction statements, their durable log, and engagement summaries.

pub mod statement;
pub mod store;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{RecordId, UiControl};

pub use statement::{validate_statement, AnalyticsStatement, StatementCode, StatementFinding};
pub use store::{EventStore, StoreError};

pub const PARAM_BINS: usize = 10;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("no statements to summarize")]
    Empty,
    #[error("statements belong to more than one session or simulation")]
    MixedSession,
    #[error("no statements recorded for `{0}`")]
    UnknownSim(RecordId),
    #[error(transparent)]
    Store(#[from] StoreError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SessionSummary {
    pub session_id: String,
    pub sim_id: RecordId,
    pub duration_seconds: f64,
    pub event_counts_by_type: BTreeMap<String, usize>,
    /// Distinct declared controls touched over declared controls.
    pub control_coverage: f64,
    /// Per slider: share of the equal-width value bins visited.
    pub param_coverage: BTreeMap<String, f64>,
    pub first_timestamp: u64,
    pub last_timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimSummary {
    pub sim_id: RecordId,
    pub sessions: usize,
    pub mean_duration: f64,
    pub mean_control_coverage: f64,
    pub event_counts_by_type: BTreeMap<String, usize>,
}

/// Bin of `v` among `PARAM_BINS` equal-width bins over `[min, max]`.
pub fn slider_bin(v: f64, min: f64, max: f64) -> usize {
    let raw = (PARAM_BINS as f64 * (v - min) / (max - min)).floor();
    raw.clamp(0.0, (PARAM_BINS - 1) as f64) as usize
}

/// Summarizes one session. Input order does not matter.
pub fn summarize_session(statements: &[AnalyticsStatement], declared: &[UiControl]) -> Result<SessionSummary, AnalyticsError> {
    let first = statements.first().ok_or(AnalyticsError::Empty)?;
    if statements
        .iter()
        .any(|s| s.session_id != first.session_id || s.object_sim_id != first.object_sim_id)
    {
        return Err(AnalyticsError::MixedSession);
    }
    let first_timestamp = statements.iter().map(|s| s.timestamp).min().unwrap_or(0);
    let last_timestamp = statements.iter().map(|s| s.timestamp).max().unwrap_or(0);

    let mut event_counts_by_type = BTreeMap::new();
    for s in statements {
        *event_counts_by_type.entry(s.verb.as_str().to_string()).or_insert(0) += 1;
    }

    let names: BTreeSet<&str> = declared.iter().filter_map(|c| c.name.as_deref()).collect();
    let touched: BTreeSet<&str> = statements
        .iter()
        .filter_map(|s| s.control_ref.as_deref())
        .filter(|c| names.contains(c))
        .collect();
    let control_coverage = if names.is_empty() {
        0.0
    } else {
        touched.len() as f64 / names.len() as f64
    };

    let mut param_coverage = BTreeMap::new();
    for control in declared {
        let (Some(name), Some((min, max))) = (control.name.as_deref(), control.slider_range()) else {
            continue;
        };
        let bins: BTreeSet<usize> = statements
            .iter()
            .filter(|s| s.control_ref.as_deref() == Some(name))
            .filter_map(|s| s.result_value)
            .map(|v| slider_bin(v, min, max))
            .collect();
        param_coverage.insert(name.to_string(), bins.len() as f64 / PARAM_BINS as f64);
    }

    Ok(SessionSummary {
        session_id: first.session_id.clone(),
        sim_id: first.object_sim_id.clone(),
        duration_seconds: (last_timestamp - first_timestamp) as f64 / 1000.0,
        event_counts_by_type,
        control_coverage,
        param_coverage,
        first_timestamp,
        last_timestamp,
    })
}

/// Summaries of every session of one simulation, keyed by session id.
pub fn session_summaries(
    statements: &[AnalyticsStatement],
    declared: &[UiControl],
) -> Result<BTreeMap<String, SessionSummary>, AnalyticsError> {
    let mut sessions: BTreeMap<&str, Vec<AnalyticsStatement>> = BTreeMap::new();
    for s in statements {
        sessions.entry(&s.session_id).or_default().push(s.clone());
    }
    sessions
        .into_iter()
        .map(|(id, group)| Ok((id.to_string(), summarize_session(&group, declared)?)))
        .collect()
}

/// Aggregates over every session stored for `sim`.
pub fn summarize_sim(store: &EventStore, sim: &RecordId, declared: &[UiControl]) -> Result<SimSummary, AnalyticsError> {
    let statements = store.read(sim)?;
    if statements.is_empty() {
        return Err(AnalyticsError::UnknownSim(sim.clone()));
    }
    let sessions = session_summaries(&statements, declared)?;
    let n = sessions.len() as f64;
    let mut event_counts_by_type = BTreeMap::new();
    for summary in sessions.values() {
        for (verb, count) in &summary.event_counts_by_type {
            *event_counts_by_type.entry(verb.clone()).or_insert(0) += count;
        }
    }
    Ok(SimSummary {
        sim_id: sim.clone(),
        sessions: sessions.len(),
        mean_duration: sessions.values().map(|s| s.duration_seconds).sum::<f64>() / n,
        mean_control_coverage: sessions.values().map(|s| s.control_coverage).sum::<f64>() / n,
        event_counts_by_type,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ControlKind, EventType};

    fn controls() -> Vec<UiControl> {
        vec![
            UiControl {
                name: Some("speed".into()),
                kind: Some(ControlKind::Slider),
                min: Some(0.0),
                max: Some(20.0),
                default_value: Some(3.0),
                ..UiControl::default()
            },
            UiControl {
                name: Some("start".into()),
                kind: Some(ControlKind::Button),
                ..UiControl::default()
            },
        ]
    }

    fn event(session: &str, verb: EventType, control: Option<&str>, value: Option<f64>, ts: u64) -> AnalyticsStatement {
        AnalyticsStatement {
            actor: "learner-1".into(),
            verb,
            object_sim_id: RecordId::parse("bouncing-ball-1940fd3d").unwrap(),
            control_ref: control.map(str::to_string),
            result_value: value,
            prev_value: None,
            timestamp: ts,
            session_id: session.into(),
        }
    }

    #[test]
    fn bin_arithmetic() {
        // floor(10 (v - min) / (max - min)) with the top edge clamped into bin 9
        for (v, bin) in [(0.0, 0), (3.0, 1), (19.0, 9), (20.0, 9), (10.0, 5), (1.99, 0), (-1.0, 0), (25.0, 9)] {
            assert_eq!(slider_bin(v, 0.0, 20.0), bin, "{v}");
        }
    }

    #[test]
    fn param_coverage_counts_distinct_bins() {
        let events: Vec<_> = [0.0, 3.0, 19.0, 20.0]
            .iter()
            .enumerate()
            .map(|(i, v)| event("s", EventType::Interaction, Some("speed"), Some(*v), 1000 + i as u64))
            .collect();
        let summary = summarize_session(&events, &controls()).unwrap();
        assert_eq!(summary.param_coverage["speed"], 0.3);
        assert_eq!(summary.control_coverage, 0.5);
        assert_eq!(summary.duration_seconds, 0.003);
    }

    #[test]
    fn single_event_session() {
        let summary = summarize_session(&[event("s", EventType::Engagement, None, None, 5000)], &controls()).unwrap();
        assert_eq!(summary.duration_seconds, 0.0);
        assert_eq!(summary.event_counts_by_type, BTreeMap::from([("engagement".to_string(), 1)]));
        assert_eq!(summary.param_coverage["speed"], 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(summarize_session(&[], &controls()), Err(AnalyticsError::Empty)));
        let mixed = [
            event("a", EventType::Engagement, None, None, 1),
            event("b", EventType::Engagement, None, None, 2),
        ];
        assert!(matches!(summarize_session(&mixed, &controls()), Err(AnalyticsError::MixedSession)));
    }

    #[test]
    fn sim_means() {
        let dir = tempfile::tempdir().unwrap();
        let store = EventStore::open(dir.path()).unwrap();
        for e in [
            event("a", EventType::Engagement, None, None, 0),
            event("a", EventType::Interaction, Some("start"), None, 10_000),
            event("b", EventType::Engagement, None, None, 100_000),
            event("b", EventType::Navigation, None, None, 130_000),
        ] {
            store.append(&e).unwrap();
        }
        let sim = RecordId::parse("bouncing-ball-1940fd3d").unwrap();
        let summary = summarize_sim(&store, &sim, &controls()).unwrap();
        assert_eq!(summary.sessions, 2);
        assert_eq!(summary.mean_duration, 20.0);
        assert_eq!(summary.mean_control_coverage, 0.25);
        assert_eq!(summary.event_counts_by_type["engagement"], 2);
        assert!(matches!(
            summarize_sim(&store, &RecordId::parse("other").unwrap(), &controls()),
            Err(AnalyticsError::UnknownSim(_))
        ));
    }
}
