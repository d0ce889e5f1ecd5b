//! Event logs of the writing process and directly-follows graph discovery.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display, Write as _};

use serde::Serialize;
use thiserror::Error;

use crate::features::active_time_ms;
use crate::ingest::{Corpus, Group};
use crate::sessionizer::UserSessions;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcMineError {
    #[error("event log is empty")]
    EmptyLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Activity {
    Start,
    /// Writing the first draft of the k-th recipe (1-based).
    WriteRecipe(usize),
    Revise,
    End,
}

impl Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::Start => f.write_str("Start"),
            Activity::WriteRecipe(k) => write!(f, "Write Recipe {k}"),
            Activity::Revise => f.write_str("Revise"),
            Activity::End => f.write_str("End"),
        }
    }
}

/// One activity occurrence with the time spent producing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityInstance<A> {
    pub activity: A,
    pub duration_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace<A = Activity> {
    pub events: Vec<ActivityInstance<A>>,
}

impl<A: Clone> Trace<A> {
    /// A trace whose instances all have zero duration.
    pub fn from_activities(activities: impl IntoIterator<Item = A>) -> Self {
        Self {
            events: activities
                .into_iter()
                .map(|activity| ActivityInstance {
                    activity,
                    duration_s: 0.0,
                })
                .collect(),
        }
    }

    pub fn activities(&self) -> Vec<A> {
        self.events.iter().map(|e| e.activity.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }
}

/// A multiset of traces; duplicates are kept and counted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventLog<A = Activity> {
    pub traces: Vec<Trace<A>>,
}

impl<A> Default for EventLog<A> {
    fn default() -> Self {
        Self { traces: Vec::new() }
    }
}

impl<A> EventLog<A> {
    pub fn new(traces: Vec<Trace<A>>) -> Self {
        Self { traces }
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Multiset union.
    pub fn merged(mut self, other: EventLog<A>) -> Self {
        self.traces.extend(other.traces);
        self
    }
}

/// Trace of one user: Start, then per session its draft followed by one
/// Revise per revision entry, then End. Durations are active typing time.
pub fn user_trace(user: &UserSessions) -> Trace {
    let seconds = |ms: u64| ms as f64 / 1000.0;
    let mut events = vec![ActivityInstance {
        activity: Activity::Start,
        duration_s: 0.0,
    }];
    for s in &user.sessions {
        events.push(ActivityInstance {
            activity: Activity::WriteRecipe(s.recipe_ordinal),
            duration_s: seconds(active_time_ms(&s.draft.keystrokes)),
        });
        events.extend(s.revisions.iter().map(|r| ActivityInstance {
            activity: Activity::Revise,
            duration_s: seconds(active_time_ms(&r.keystrokes)),
        }));
    }
    events.push(ActivityInstance {
        activity: Activity::End,
        duration_s: 0.0,
    });
    Trace { events }
}

/// One trace per user of `group`, in user order.
pub fn build_event_log(corpus: &Corpus, users: &[UserSessions], group: Group) -> EventLog {
    EventLog::new(
        users
            .iter()
            .filter(|u| corpus.group_of(&u.user_id) == Some(group))
            .map(user_trace)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EdgeStats {
    pub frequency: u64,
    /// Mean duration of the target activity instances reached over this edge.
    pub mean_duration_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dfg<A = Activity> {
    pub nodes: BTreeSet<A>,
    pub edges: BTreeMap<(A, A), EdgeStats>,
}

impl<A: Ord> Dfg<A> {
    pub fn frequency(&self, from: &A, to: &A) -> u64
    where
        A: Clone,
    {
        self.edges
            .get(&(from.clone(), to.clone()))
            .map_or(0, |e| e.frequency)
    }

    pub fn total_frequency(&self) -> u64 {
        self.edges.values().map(|e| e.frequency).sum()
    }
}

pub fn discover_dfg<A: Ord + Clone>(log: &EventLog<A>) -> Result<Dfg<A>, ProcMineError> {
    if log.is_empty() {
        return Err(ProcMineError::EmptyLog);
    }
    let mut nodes = BTreeSet::new();
    let mut sums: BTreeMap<(A, A), (u64, f64)> = BTreeMap::new();
    for trace in &log.traces {
        nodes.extend(trace.events.iter().map(|e| e.activity.clone()));
        for pair in trace.events.windows(2) {
            let slot = sums
                .entry((pair[0].activity.clone(), pair[1].activity.clone()))
                .or_insert((0, 0.0));
            slot.0 += 1;
            slot.1 += pair[1].duration_s;
        }
    }
    let edges = sums
        .into_iter()
        .map(|(k, (n, total))| {
            (
                k,
                EdgeStats {
                    frequency: n,
                    mean_duration_s: total / n as f64,
                },
            )
        })
        .collect();
    Ok(Dfg { nodes, edges })
}

fn dot_quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Renders the graph as DOT. Nodes and edges are sorted by label; each edge
/// carries `n=<frequency>, t̄=<mean>s`.
pub fn export_dot<A: Display>(dfg: &Dfg<A>, name: &str, comments: &[String]) -> String {
    let mut nodes: Vec<String> = dfg.nodes.iter().map(ToString::to_string).collect();
    nodes.sort();
    let mut edges: Vec<(String, String, &EdgeStats)> = dfg
        .edges
        .iter()
        .map(|((u, v), stats)| (u.to_string(), v.to_string(), stats))
        .collect();
    edges.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));

    let mut out = String::new();
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "// {line}");
        }
    }
    let _ = writeln!(out, "digraph {} {{", dot_quote(name));
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box, style=rounded];\n");
    for n in &nodes {
        let _ = writeln!(out, "  {};", dot_quote(n));
    }
    for (u, v, stats) in &edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label=\"n={}, t̄={:.2}s\"];",
            dot_quote(u),
            dot_quote(v),
            stats.frequency,
            stats.mean_duration_s
        );
    }
    out.push_str("}\n");
    out
}
