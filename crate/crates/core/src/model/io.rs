//! On-disk form of a network: a directory holding `links.csv` and `meta.kv`.
//!
//! `links.csv` has one record per line, no header:
//! `host_id,copy_start_step,copy_end_step,neighbour_id,join_step,leave_step`.
//! `meta.kv` has exactly four `key=value` lines in a fixed order.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::{ContactNetwork, LinkEvent, NetworkBuilder, NetworkError, NodeId, TimeGrid};

pub const LINKS_FILE: &str = "links.csv";
pub const META_FILE: &str = "meta.kv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetworkMeta {
    pub grid: TimeGrid,
    pub delta_steps: u32,
    pub node_count: u32,
}

impl NetworkMeta {
    pub fn of(net: &ContactNetwork) -> Self {
        NetworkMeta { grid: *net.grid(), delta_steps: net.delta(), node_count: net.node_count() }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(
            w,
            "step_seconds={}\nhorizon_steps={}\ndelta_steps={}\nnode_count={}\n",
            self.grid.step_seconds(),
            self.grid.horizon_steps(),
            self.delta_steps,
            self.node_count
        )
    }

    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut fields = [None; 4];
        const KEYS: [&str; 4] = ["step_seconds", "horizon_steps", "delta_steps", "node_count"];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| NetworkError::Parse { line: i + 1, message: format!("expected key=value, got {line:?}") })?;
            let slot = KEYS
                .iter()
                .position(|&key| key == k.trim())
                .ok_or_else(|| NetworkError::Parse { line: i + 1, message: format!("unknown metadata key {k:?}") })?;
            let value: u32 = v
                .trim()
                .parse()
                .map_err(|_| NetworkError::Parse { line: i + 1, message: format!("{k} is not an integer: {v:?}") })?;
            fields[slot] = Some(value);
        }
        let get = |i: usize| fields[i].ok_or_else(|| NetworkError::Metadata(format!("missing key {}", KEYS[i])));
        let grid = TimeGrid::from_horizon_steps(get(0)?, get(1)?)?;
        Ok(NetworkMeta { grid, delta_steps: get(2)?, node_count: get(3)? })
    }

    pub fn read(dir: &Path) -> Result<Self, NetworkError> {
        let text = fs::read_to_string(dir.join(META_FILE))?;
        NetworkMeta::parse(&text)
    }
}

#[inline]
pub fn write_event<W: Write>(w: &mut W, e: &LinkEvent) -> io::Result<()> {
    writeln!(w, "{},{},{},{},{},{}", e.host, e.copy_start, e.copy_end, e.neighbour, e.join, e.leave)
}

pub fn write_links<W: Write>(net: &ContactNetwork, w: W) -> io::Result<()> {
    let mut w = BufWriter::with_capacity(1 << 20, w);
    for link in net.links() {
        write_event(&mut w, &link.event())?;
    }
    w.flush()
}

pub fn parse_event(line: &str, lineno: usize) -> Result<LinkEvent, NetworkError> {
    let mut it = line.split(',');
    let mut next = |name: &str| -> Result<u32, NetworkError> {
        let field = it
            .next()
            .ok_or_else(|| NetworkError::Parse { line: lineno, message: format!("missing field {name}") })?;
        field
            .parse::<u32>()
            .map_err(|_| NetworkError::Parse { line: lineno, message: format!("{name} is not a non-negative integer: {field:?}") })
    };
    let e = LinkEvent {
        host: next("host_id")?,
        copy_start: next("copy_start_step")?,
        copy_end: next("copy_end_step")?,
        neighbour: next("neighbour_id")?,
        join: next("join_step")?,
        leave: next("leave_step")?,
    };
    if it.next().is_some() {
        return Err(NetworkError::Parse { line: lineno, message: "too many fields".into() });
    }
    Ok(e)
}

/// Reads and validates a link file. Per-record violations are reported in
/// file order with their line number; ordering violations between copies of
/// the same host are reported with the line of the offending record.
pub fn read_links<R: BufRead>(reader: R, meta: &NetworkMeta) -> Result<ContactNetwork, NetworkError> {
    let mut events: Vec<(LinkEvent, usize)> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let e = parse_event(&line, lineno)?;
        e.check(&meta.grid, meta.delta_steps, meta.node_count)
            .map_err(|source| NetworkError::AtLine { line: lineno, source: Box::new(source) })?;
        events.push((e, lineno));
    }
    let sorted = events.windows(2).all(|w| key(&w[0].0) <= key(&w[1].0));
    if !sorted {
        events.sort_by_key(|(e, line)| (key(e), *line));
    }
    let mut b = NetworkBuilder::new(meta.grid, meta.delta_steps, meta.node_count).with_capacity(0, events.len());
    let mut current = None;
    for (e, line) in &events {
        let at = |source| NetworkError::AtLine { line: *line, source: Box::new(source) };
        if current != Some((e.host, e.copy_start, e.copy_end)) {
            b.push_copy(NodeId(e.host), e.copy_start, e.copy_end).map_err(at)?;
            current = Some((e.host, e.copy_start, e.copy_end));
        }
        b.push_link(NodeId(e.neighbour), e.join, e.leave).map_err(at)?;
    }
    Ok(b.finish())
}

fn key(e: &LinkEvent) -> (u32, u32, u32, u32, u32, u32) {
    (e.host, e.copy_start, e.copy_end, e.join, e.leave, e.neighbour)
}

pub fn read_network(dir: &Path) -> Result<ContactNetwork, NetworkError> {
    let meta = NetworkMeta::read(dir)?;
    let file = File::open(dir.join(LINKS_FILE))?;
    read_links(BufReader::with_capacity(1 << 20, file), &meta)
}

pub fn write_network(net: &ContactNetwork, dir: &Path) -> Result<(), NetworkError> {
    fs::create_dir_all(dir)?;
    let mut meta = BufWriter::new(File::create(dir.join(META_FILE))?);
    NetworkMeta::of(net).write_to(&mut meta)?;
    meta.flush()?;
    write_links(net, File::create(dir.join(LINKS_FILE))?)?;
    Ok(())
}

/// Streaming writer for networks too large to hold in memory. Records must
/// be supplied in canonical order; the caller is responsible for that.
pub struct LinkWriter {
    out: BufWriter<File>,
    written: u64,
}

impl LinkWriter {
    pub fn create(dir: &Path, meta: &NetworkMeta) -> Result<Self, NetworkError> {
        fs::create_dir_all(dir)?;
        let mut m = BufWriter::new(File::create(dir.join(META_FILE))?);
        meta.write_to(&mut m)?;
        m.flush()?;
        let out = BufWriter::with_capacity(1 << 22, File::create(dir.join(LINKS_FILE))?);
        Ok(LinkWriter { out, written: 0 })
    }

    pub fn write(&mut self, e: &LinkEvent) -> io::Result<()> {
        self.written += 1;
        write_event(&mut self.out, e)
    }

    pub fn finish(mut self) -> io::Result<u64> {
        self.out.flush()?;
        Ok(self.written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const META: &str = "step_seconds=300\nhorizon_steps=576\ndelta_steps=36\nnode_count=3\n";

    #[test]
    fn metadata_round_trip_is_exact() {
        let meta = NetworkMeta::parse(META).unwrap();
        let mut out = Vec::new();
        meta.write_to(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), META);
    }

    #[test]
    fn reports_line_of_first_bad_record() {
        let meta = NetworkMeta::parse(META).unwrap();
        let text = "0,0,10,1,2,8\n0,0,10,0,2,8\n";
        let err = read_links(text.as_bytes(), &meta).unwrap_err();
        match err {
            NetworkError::AtLine { line, source } => {
                assert_eq!(line, 2);
                assert!(matches!(*source, NetworkError::SelfLink { host: 0 }));
            }
            other => panic!("unexpected {other:?}"),
        }
        let err = read_links("0,0,10,1,x,8\n".as_bytes(), &meta).unwrap_err();
        assert!(matches!(err, NetworkError::Parse { line: 1, .. }));
    }

    #[test]
    fn overlapping_copies_are_rejected_with_line() {
        let meta = NetworkMeta::parse(META).unwrap();
        let text = "0,0,10,1,2,8\n0,5,20,2,6,8\n";
        let err = read_links(text.as_bytes(), &meta).unwrap_err();
        assert!(matches!(err, NetworkError::AtLine { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn canonical_file_round_trips() {
        let meta = NetworkMeta::parse(META).unwrap();
        let text = "0,0,10,1,2,8\n0,0,10,2,2,8\n0,20,40,2,45,50\n2,300,301,0,300,302\n";
        let net = read_links(text.as_bytes(), &meta).unwrap();
        let mut out = Vec::new();
        write_links(&net, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), text);
    }
}
