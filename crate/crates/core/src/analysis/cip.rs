use crate::fitting::CipSamples;
use crate::model::{ContactNetwork, NodeId};

use super::Histogram;

/// Raw CIP samples of a network.
///
/// `activation_frequencies` has one entry per node and day, zeros included.
/// `degrees` counts links per copy.
pub fn cip_samples(net: &ContactNetwork) -> CipSamples {
    let grid = net.grid();
    let days = grid.horizon_days() as usize;
    let mut s = CipSamples::default();
    let mut per_day = vec![0u64; days];
    for node in 0..net.node_count() {
        per_day.iter_mut().for_each(|c| *c = 0);
        let range = net.copy_range(NodeId(node));
        let spans = net.spans_of(NodeId(node));
        for (i, span) in spans.iter().enumerate() {
            s.active_periods.push((span.end - span.start) as u64);
            if i > 0 {
                s.inactive_periods.push((span.start - spans[i - 1].end) as u64);
            }
            per_day[grid.day_of(span.start) as usize] += 1;
            let links = net.link_records(range.start + i);
            if !links.is_empty() {
                s.degrees.push(links.len() as u64);
            }
            for l in links {
                s.link_delays.push((l.join - span.start) as u64);
                s.link_durations.push((l.leave - l.join) as u64);
            }
        }
        s.activation_frequencies.extend_from_slice(&per_day);
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct CipHistograms {
    pub active_periods: Histogram,
    pub inactive_periods: Histogram,
    pub activation_frequencies: Histogram,
    pub degrees: Histogram,
    pub link_delays: Histogram,
    pub link_durations: Histogram,
}

impl CipHistograms {
    pub fn named(&self) -> [(&'static str, &Histogram); 6] {
        [
            ("t_a", &self.active_periods),
            ("t_w", &self.inactive_periods),
            ("h", &self.activation_frequencies),
            ("d", &self.degrees),
            ("t_c", &self.link_delays),
            ("t_d", &self.link_durations),
        ]
    }
}

pub fn cip_histograms(net: &ContactNetwork) -> CipHistograms {
    let s = cip_samples(net);
    CipHistograms {
        active_periods: Histogram::from_integers(&s.active_periods),
        inactive_periods: Histogram::from_integers(&s.inactive_periods),
        activation_frequencies: Histogram::from_integers(&s.activation_frequencies),
        degrees: Histogram::from_integers(&s.degrees),
        link_delays: Histogram::from_integers(&s.link_delays),
        link_durations: Histogram::from_integers(&s.link_durations),
    }
}
