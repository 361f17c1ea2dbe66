use std::fmt;
use std::ops::Range;

use super::{NetworkError, TimeGrid};

/// Dense node identifier in `[0, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One activation interval `[start, end)` of a host. The copy can still
/// receive links until `end + delta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActiveCopy {
    pub host: NodeId,
    pub start: u32,
    pub end: u32,
    /// Ordinal of this copy within the host's sequence.
    pub index: u32,
}

impl ActiveCopy {
    pub fn duration(&self) -> u32 {
        self.end - self.start
    }

    pub fn expiry(&self, delta: u32) -> u32 {
        self.end + delta
    }

    #[inline]
    pub fn alive_at(&self, step: u32, delta: u32) -> bool {
        self.start <= step && step < self.end + delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    /// Neighbour leaves no later than the host.
    DirectOnly,
    /// Neighbour arrives while the host is present and stays after it leaves.
    Mixed,
    /// Neighbour arrives after the host has left.
    IndirectOnly,
}

impl LinkClass {
    pub fn of(copy_end: u32, join: u32, leave: u32) -> LinkClass {
        if join >= copy_end {
            LinkClass::IndirectOnly
        } else if leave > copy_end {
            LinkClass::Mixed
        } else {
            LinkClass::DirectOnly
        }
    }

    pub fn has_indirect(self) -> bool {
        !matches!(self, LinkClass::DirectOnly)
    }
}

/// A timed link from an active copy to a neighbour, `e = (v_i, u, join, leave)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContactLink {
    pub host: NodeId,
    pub copy_start: u32,
    pub copy_end: u32,
    pub copy_index: u32,
    pub neighbour: NodeId,
    pub join: u32,
    pub leave: u32,
}

impl ContactLink {
    pub fn class(&self) -> LinkClass {
        LinkClass::of(self.copy_end, self.join, self.leave)
    }

    /// `t_c`: steps between host and neighbour arrival.
    pub fn creation_delay(&self) -> u32 {
        self.join - self.copy_start
    }

    /// `t_d`: neighbour stay in steps.
    pub fn duration(&self) -> u32 {
        self.leave - self.join
    }

    pub fn event(&self) -> LinkEvent {
        LinkEvent {
            host: self.host.0,
            copy_start: self.copy_start,
            copy_end: self.copy_end,
            neighbour: self.neighbour.0,
            join: self.join,
            leave: self.leave,
        }
    }
}

/// One line of the link-event file. Field order is the canonical sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkEvent {
    pub host: u32,
    pub copy_start: u32,
    pub copy_end: u32,
    pub neighbour: u32,
    pub join: u32,
    pub leave: u32,
}

impl LinkEvent {
    fn canonical_key(&self) -> (u32, u32, u32, u32, u32, u32) {
        (self.host, self.copy_start, self.copy_end, self.join, self.leave, self.neighbour)
    }

    /// Checks everything that can be checked from the record alone.
    pub fn check(&self, grid: &TimeGrid, delta: u32, node_count: u32) -> Result<(), NetworkError> {
        for node in [self.host, self.neighbour] {
            if node >= node_count {
                return Err(NetworkError::UnknownNode { node, node_count });
            }
        }
        check_span(self.host, self.copy_start, self.copy_end, grid.horizon_steps())?;
        check_link(self.host, self.copy_start, self.copy_end, delta, self.neighbour, self.join, self.leave)
    }
}

/// Stored interval of a copy; the host and ordinal are implied by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CopySpan {
    pub start: u32,
    pub end: u32,
}

/// Stored link of a copy. Field order gives the canonical order within a copy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkRecord {
    pub join: u32,
    pub leave: u32,
    pub neighbour: u32,
}

fn check_span(host: u32, start: u32, end: u32, horizon: u32) -> Result<(), NetworkError> {
    if start >= end || end > horizon {
        return Err(NetworkError::CopyInterval { host, start, end, horizon });
    }
    Ok(())
}

fn check_link(
    host: u32,
    copy_start: u32,
    copy_end: u32,
    delta: u32,
    neighbour: u32,
    join: u32,
    leave: u32,
) -> Result<(), NetworkError> {
    if neighbour == host {
        return Err(NetworkError::SelfLink { host });
    }
    if join < copy_start || join >= copy_end + delta {
        return Err(NetworkError::LinkWindow { host, copy_start, copy_end, join, delta });
    }
    if join >= leave {
        return Err(NetworkError::LinkDuration { join, leave });
    }
    Ok(())
}

/// An SPDT contact network `G = (Z, A, L, T)`.
///
/// Copies are stored host-major, links copy-major in canonical order
/// `(join, leave, neighbour)`, so iteration order and serialisation are a
/// function of the content only. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactNetwork {
    grid: TimeGrid,
    delta: u32,
    node_count: u32,
    copy_offsets: Vec<usize>,
    spans: Vec<CopySpan>,
    link_offsets: Vec<usize>,
    links: Vec<LinkRecord>,
}

impl ContactNetwork {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn node_count(&self) -> u32 {
        self.node_count
    }

    pub fn copy_count(&self) -> usize {
        self.spans.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Global copy indices belonging to `node`.
    pub fn copy_range(&self, node: NodeId) -> Range<usize> {
        self.copy_offsets[node.index()]..self.copy_offsets[node.index() + 1]
    }

    pub fn spans_of(&self, node: NodeId) -> &[CopySpan] {
        &self.spans[self.copy_range(node)]
    }

    pub fn spans(&self) -> &[CopySpan] {
        &self.spans
    }

    /// Links of the copy with global index `copy`.
    pub fn link_records(&self, copy: usize) -> &[LinkRecord] {
        &self.links[self.link_offsets[copy]..self.link_offsets[copy + 1]]
    }

    pub fn copies_of(&self, node: NodeId) -> impl Iterator<Item = ActiveCopy> + '_ {
        self.spans_of(node).iter().enumerate().map(move |(i, s)| ActiveCopy {
            host: node,
            start: s.start,
            end: s.end,
            index: i as u32,
        })
    }

    pub fn copies(&self) -> impl Iterator<Item = ActiveCopy> + '_ {
        (0..self.node_count).flat_map(move |n| self.copies_of(NodeId(n)))
    }

    /// All links in canonical order.
    pub fn links(&self) -> impl Iterator<Item = ContactLink> + '_ {
        (0..self.node_count).flat_map(move |n| {
            let node = NodeId(n);
            let base = self.copy_offsets[node.index()];
            self.copies_of(node).flat_map(move |c| {
                self.link_records(base + c.index as usize).iter().map(move |l| ContactLink {
                    host: node,
                    copy_start: c.start,
                    copy_end: c.end,
                    copy_index: c.index,
                    neighbour: NodeId(l.neighbour),
                    join: l.join,
                    leave: l.leave,
                })
            })
        })
    }

    /// Host of every global copy index, in order.
    pub fn copy_hosts(&self) -> Vec<u32> {
        let mut hosts = Vec::with_capacity(self.spans.len());
        for n in 0..self.node_count as usize {
            let k = self.copy_offsets[n + 1] - self.copy_offsets[n];
            hosts.extend(std::iter::repeat_n(n as u32, k));
        }
        hosts
    }

    /// Number of copies of `node` alive (`start <= step < end + delta`) at `step`.
    pub fn concurrent_copies(&self, node: NodeId, step: u32) -> Result<usize, NetworkError> {
        if node.0 >= self.node_count {
            return Err(NetworkError::UnknownNode { node: node.0, node_count: self.node_count });
        }
        let spans = self.spans_of(node);
        // copies starting after `step` cannot be alive
        let upto = spans.partition_point(|s| s.start <= step);
        Ok(spans[..upto].iter().filter(|s| step < s.end + self.delta).count())
    }

    /// Re-checks every structural invariant.
    pub fn validate(&self) -> Result<(), NetworkError> {
        let horizon = self.grid.horizon_steps();
        for n in 0..self.node_count {
            let mut previous_end: Option<u32> = None;
            for (ci, s) in self.spans_of(NodeId(n)).iter().enumerate() {
                check_span(n, s.start, s.end, horizon)?;
                if let Some(pe) = previous_end {
                    if s.start <= pe {
                        return Err(NetworkError::CopyOrder { host: n, start: s.start, previous_end: pe });
                    }
                }
                previous_end = Some(s.end);
                let global = self.copy_offsets[n as usize] + ci;
                let recs = self.link_records(global);
                for (i, l) in recs.iter().enumerate() {
                    if l.neighbour >= self.node_count {
                        return Err(NetworkError::UnknownNode { node: l.neighbour, node_count: self.node_count });
                    }
                    check_link(n, s.start, s.end, self.delta, l.neighbour, l.join, l.leave)?;
                    if i > 0 && recs[i - 1] > *l {
                        return Err(NetworkError::Metadata(format!("links of node {n} are not in canonical order")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds from records in any order. Copies are identified by `(host, copy_start)`.
    pub fn from_events(
        grid: TimeGrid,
        delta: u32,
        node_count: u32,
        mut events: Vec<LinkEvent>,
    ) -> Result<ContactNetwork, NetworkError> {
        events.sort_unstable_by_key(|e| e.canonical_key());
        let mut b = NetworkBuilder::new(grid, delta, node_count);
        let mut current: Option<(u32, u32, u32)> = None;
        for e in &events {
            if current != Some((e.host, e.copy_start, e.copy_end)) {
                b.push_copy(NodeId(e.host), e.copy_start, e.copy_end)?;
                current = Some((e.host, e.copy_start, e.copy_end));
            }
            b.push_link(NodeId(e.neighbour), e.join, e.leave)?;
        }
        Ok(b.finish())
    }
}

/// Host-major incremental builder; enforces every invariant as records arrive.
#[derive(Debug)]
pub struct NetworkBuilder {
    net: ContactNetwork,
    current_host: Option<u32>,
    copy_open: bool,
}

impl NetworkBuilder {
    pub fn new(grid: TimeGrid, delta: u32, node_count: u32) -> Self {
        NetworkBuilder {
            net: ContactNetwork {
                grid,
                delta,
                node_count,
                copy_offsets: vec![0],
                spans: Vec::new(),
                link_offsets: vec![0],
                links: Vec::new(),
            },
            current_host: None,
            copy_open: false,
        }
    }

    pub fn with_capacity(mut self, copies: usize, links: usize) -> Self {
        self.net.spans.reserve(copies);
        self.net.link_offsets.reserve(copies);
        self.net.links.reserve(links);
        self
    }

    fn close_copy(&mut self) {
        if self.copy_open {
            let from = *self.net.link_offsets.last().unwrap();
            self.net.links[from..].sort_unstable();
            self.net.link_offsets.push(self.net.links.len());
            self.copy_open = false;
        }
    }

    /// Advances copy offsets so that every node below `host` is closed.
    fn advance_to(&mut self, host: u32) {
        while self.net.copy_offsets.len() <= host as usize {
            self.net.copy_offsets.push(self.net.spans.len());
        }
    }

    pub fn push_copy(&mut self, host: NodeId, start: u32, end: u32) -> Result<(), NetworkError> {
        let h = host.0;
        if h >= self.net.node_count {
            return Err(NetworkError::UnknownNode { node: h, node_count: self.net.node_count });
        }
        check_span(h, start, end, self.net.grid.horizon_steps())?;
        match self.current_host {
            Some(prev) if h < prev => return Err(NetworkError::HostOrder { host: h, previous: prev }),
            Some(prev) if h == prev => {
                let last = self.net.spans.last().unwrap();
                if start <= last.end {
                    return Err(NetworkError::CopyOrder { host: h, start, previous_end: last.end });
                }
            }
            _ => {}
        }
        self.close_copy();
        self.advance_to(h);
        self.current_host = Some(h);
        self.net.spans.push(CopySpan { start, end });
        self.copy_open = true;
        Ok(())
    }

    pub fn push_link(&mut self, neighbour: NodeId, join: u32, leave: u32) -> Result<(), NetworkError> {
        if !self.copy_open {
            return Err(NetworkError::NoCopy);
        }
        let host = self.current_host.unwrap();
        if neighbour.0 >= self.net.node_count {
            return Err(NetworkError::UnknownNode { node: neighbour.0, node_count: self.net.node_count });
        }
        let span = *self.net.spans.last().unwrap();
        check_link(host, span.start, span.end, self.net.delta, neighbour.0, join, leave)?;
        self.net.links.push(LinkRecord { join, leave, neighbour: neighbour.0 });
        Ok(())
    }

    pub fn finish(mut self) -> ContactNetwork {
        self.close_copy();
        let n = self.net.node_count;
        self.advance_to(n);
        self.net
    }
}
