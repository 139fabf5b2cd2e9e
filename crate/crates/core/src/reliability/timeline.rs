//! Chronological up/down simulation of every failable component over one year.

use std::collections::BTreeMap;

use crate::model::{GenId, LineId, NetworkCase};

use super::sampling::{sample_ttf, sample_ttr, TwoStateParams, UniformSource};

pub const YEAR_HOURS: u32 = 8760;

/// A failable component. Components are ordered lines first, then generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Line(LineId),
    Generator(GenId),
}

/// A maximal run of hours with a constant, non-empty set of failed components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutageEvent {
    pub start_hour: u32,
    /// Exclusive.
    pub end_hour: u32,
    pub components: Vec<Component>,
}

impl OutageEvent {
    pub fn hours(&self) -> u32 {
        self.end_hour - self.start_hour
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct YearTimeline {
    /// Outage intervals `[start, end)` in whole hours per component; lines
    /// first, then generators.
    pub component_outages: Vec<Vec<(u32, u32)>>,
    /// Constant-state outage windows in chronological order.
    pub outage_events: Vec<OutageEvent>,
    pub(crate) n_lines: usize,
}

impl YearTimeline {
    pub fn component(&self, slot: usize) -> Component {
        if slot < self.n_lines {
            Component::Line(LineId::from_index(slot))
        } else {
            Component::Generator(GenId::from_index(slot - self.n_lines))
        }
    }

    /// Hourly status (true = up) of one component slot.
    pub fn hourly_status(&self, slot: usize) -> Vec<bool> {
        let mut up = vec![true; YEAR_HOURS as usize];
        for &(s, e) in &self.component_outages[slot] {
            for h in s..e {
                up[h as usize] = false;
            }
        }
        up
    }

    /// Whether a component slot is down during `hour`.
    pub fn is_down(&self, slot: usize, hour: u32) -> bool {
        self.component_outages[slot]
            .iter()
            .any(|&(s, e)| s <= hour && hour < e)
    }

    pub fn all_up(&self) -> bool {
        self.outage_events.is_empty()
    }
}

/// Samples one year of alternating time-to-failure / time-to-repair for each
/// component, every component starting in service at hour 0.
///
/// Draw order: components in slot order (lines, then generators); per
/// component alternately one TTF and one TTR variate until the year ends.
/// Continuous transition times are rounded to the nearest hour.
pub fn simulate_year(case: &NetworkCase, source: &mut impl UniformSource) -> YearTimeline {
    let params: Vec<TwoStateParams> = case
        .lines()
        .iter()
        .map(|l| TwoStateParams::new(l.failure_rate, l.repair_rate))
        .chain(
            case.generators()
                .iter()
                .map(|g| TwoStateParams::new(g.failure_rate, g.repair_rate)),
        )
        .collect();

    let horizon = f64::from(YEAR_HOURS);
    let mut component_outages = Vec::with_capacity(params.len());
    for p in &params {
        let mut outages = Vec::new();
        if p.lambda > 0.0 {
            let mut t = 0.0;
            loop {
                let ttf = sample_ttf(p, source.next_uniform()).expect("uniform in (0,1]");
                let fail_at = t + ttf;
                if fail_at >= horizon {
                    break;
                }
                let ttr = sample_ttr(p, source.next_uniform()).expect("uniform in (0,1]");
                let repaired_at = fail_at + ttr;
                let start = fail_at.round() as u32;
                let end = (repaired_at.min(horizon).round() as u32).min(YEAR_HOURS);
                if end > start {
                    match outages.last_mut() {
                        Some((_, prev_end)) if *prev_end >= start => *prev_end = end,
                        _ => outages.push((start, end)),
                    }
                }
                t = repaired_at;
                if t >= horizon {
                    break;
                }
            }
        }
        component_outages.push(outages);
    }

    let n_lines = case.line_count();
    let outage_events = overlap_windows(&component_outages, n_lines);
    YearTimeline {
        component_outages,
        outage_events,
        n_lines,
    }
}

/// Splits the union of all outage intervals at every transition so that the
/// failed set is constant inside each window.
pub(crate) fn overlap_windows(component_outages: &[Vec<(u32, u32)>], n_lines: usize) -> Vec<OutageEvent> {
    // hour -> (slot, +1 start / -1 end)
    let mut edges: BTreeMap<u32, Vec<(usize, i32)>> = BTreeMap::new();
    for (slot, outs) in component_outages.iter().enumerate() {
        for &(s, e) in outs {
            edges.entry(s).or_default().push((slot, 1));
            edges.entry(e).or_default().push((slot, -1));
        }
    }
    let mut down_count = vec![0i32; component_outages.len()];
    let mut events = Vec::new();
    let mut prev_hour: Option<u32> = None;
    for (&hour, changes) in &edges {
        if let Some(p) = prev_hour {
            let failed: Vec<usize> = down_count
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(s, _)| s)
                .collect();
            if !failed.is_empty() && hour > p {
                events.push(OutageEvent {
                    start_hour: p,
                    end_hour: hour,
                    components: failed
                        .into_iter()
                        .map(|s| {
                            if s < n_lines {
                                Component::Line(LineId::from_index(s))
                            } else {
                                Component::Generator(GenId::from_index(s - n_lines))
                            }
                        })
                        .collect(),
                });
            }
        }
        for &(slot, delta) in changes {
            down_count[slot] += delta;
        }
        prev_hour = Some(hour);
    }
    events
}
