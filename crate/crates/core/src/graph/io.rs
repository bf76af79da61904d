use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use log::warn;

use super::{Graph, NodeId};
use crate::error::{Error, Result};

const GRAPH_MAGIC: &[u8; 4] = b"HOGR";
const GRAPH_VERSION: u8 = 1;

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Lines whose first non-blank characters equal this prefix are skipped.
    pub comment_prefix: String,
    /// Token separators in addition to ASCII whitespace.
    pub delimiters: Vec<char>,
    /// When true every line is one undirected edge. When false lines are arcs;
    /// an arc and its reverse merge into one edge without counting as a duplicate.
    pub undirected: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions { comment_prefix: "#".to_string(), delimiters: vec![',', ';'], undirected: true }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NormalizationReport {
    pub self_loops: usize,
    pub duplicate_edges: usize,
    pub collapsed_reverse_arcs: usize,
}

/// Mapping between dense node ids and the ids found in the input.
///
/// External ids are assigned dense ids in ascending order, so an input that
/// already uses `0..n` keeps its numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relabel {
    external: Vec<u64>,
}

impl Relabel {
    pub fn identity(n: usize) -> Relabel {
        Relabel { external: (0..n as u64).collect() }
    }

    pub fn to_external(&self, v: NodeId) -> u64 {
        self.external[v as usize]
    }

    pub fn to_node(&self, external: u64) -> Option<NodeId> {
        self.external.binary_search(&external).ok().map(|i| i as NodeId)
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    /// Restricts to the kept nodes, where `kept[i]` is the old id of new node `i`.
    pub fn restrict(&self, kept: &[NodeId]) -> Relabel {
        Relabel { external: kept.iter().map(|&v| self.external[v as usize]).collect() }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub relabel: Relabel,
    pub report: NormalizationReport,
}

/// Parses a whitespace-separated edge list ("u v" per line).
///
/// Tokens after the second on a line are ignored (weight columns).
pub fn load_edge_list<R: BufRead>(source: R, options: &LoadOptions) -> Result<LoadedGraph> {
    let is_delim = |c: char| c.is_ascii_whitespace() || options.delimiters.contains(&c);
    let mut raw: Vec<(u64, u64)> = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let body = line.trim();
        if body.is_empty() || (!options.comment_prefix.is_empty() && body.starts_with(&options.comment_prefix)) {
            continue;
        }
        let mut tokens = body.split(is_delim).filter(|t| !t.is_empty());
        let id = |tokens: &mut dyn Iterator<Item = &str>| -> Result<u64> {
            let tok =
                tokens.next().ok_or_else(|| Error::Parse { line: lineno, msg: "expected two node ids".into() })?;
            tok.parse::<u64>().map_err(|_| Error::Parse { line: lineno, msg: format!("malformed node id {tok:?}") })
        };
        let u = id(&mut tokens)?;
        let v = id(&mut tokens)?;
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut external: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    external.sort_unstable();
    external.dedup();
    let relabel = Relabel { external };
    let dense = |x: u64| relabel.to_node(x).expect("id collected above");
    let arcs: Vec<(NodeId, NodeId)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    drop(raw);

    let mut directed_dups = 0;
    let mut collapsed = 0;
    if !options.undirected {
        let mut distinct: Vec<(NodeId, NodeId)> = arcs.iter().copied().filter(|(u, v)| u != v).collect();
        let total = distinct.len();
        distinct.sort_unstable();
        distinct.dedup();
        directed_dups = total - distinct.len();
        collapsed = distinct.iter().filter(|&&(u, v)| u < v && distinct.binary_search(&(v, u)).is_ok()).count();
    }

    let (graph, mut report) = Graph::from_edges(relabel.len(), arcs)?;
    if !options.undirected {
        report.duplicate_edges = directed_dups;
        report.collapsed_reverse_arcs = collapsed;
    }
    if graph.m() == 0 {
        return Err(Error::EmptyInput);
    }
    if report.self_loops > 0 || report.duplicate_edges > 0 {
        warn!("dropped {} self-loops and {} duplicate edges", report.self_loops, report.duplicate_edges);
    }
    Ok(LoadedGraph { graph, relabel, report })
}

/// Writes each edge once as "u v" with `u < v`, ascending.
pub fn write_edge_list<W: Write>(g: &Graph, sink: W) -> Result<()> {
    let mut out = BufWriter::new(sink);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    out.flush()?;
    Ok(())
}

/// Binary layout: `HOGR`, version byte, n and m as u64, `n + 1` u64 offsets,
/// then `2m` u32 neighbors. Little-endian.
pub fn write_binary<W: Write>(g: &Graph, sink: W) -> Result<()> {
    let mut out = BufWriter::new(sink);
    out.write_all(GRAPH_MAGIC)?;
    out.write_all(&[GRAPH_VERSION])?;
    out.write_all(&(g.n() as u64).to_le_bytes())?;
    out.write_all(&(g.m() as u64).to_le_bytes())?;
    for &o in g.offsets() {
        out.write_all(&o.to_le_bytes())?;
    }
    for &v in g.neighbor_array() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

fn read_exact_or<R: Read>(src: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    src.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format(format!("truncated {what}")),
        _ => Error::Io(e),
    })
}

pub fn read_binary<R: Read>(source: R) -> Result<Graph> {
    let mut src = BufReader::new(source);
    let mut magic = [0u8; 4];
    read_exact_or(&mut src, &mut magic, "header")?;
    if &magic != GRAPH_MAGIC {
        return Err(Error::Format("not a graph file (bad magic)".into()));
    }
    let mut version = [0u8; 1];
    read_exact_or(&mut src, &mut version, "header")?;
    if version[0] != GRAPH_VERSION {
        return Err(Error::Format(format!("unsupported graph version {}", version[0])));
    }
    let mut word = [0u8; 8];
    read_exact_or(&mut src, &mut word, "header")?;
    let n = u64::from_le_bytes(word) as usize;
    read_exact_or(&mut src, &mut word, "header")?;
    let m = u64::from_le_bytes(word) as usize;
    if n >= NodeId::MAX as usize {
        return Err(Error::Format(format!("node count {n} too large")));
    }

    let mut offsets = Vec::with_capacity(n + 1);
    for _ in 0..=n {
        read_exact_or(&mut src, &mut word, "offsets")?;
        offsets.push(u64::from_le_bytes(word));
    }
    let mut half = [0u8; 4];
    let mut neighbors = Vec::with_capacity(2 * m);
    for _ in 0..2 * m {
        read_exact_or(&mut src, &mut half, "neighbors")?;
        neighbors.push(u32::from_le_bytes(half));
    }
    Graph::from_csr(offsets, neighbors)
}

/// Reads either format, choosing binary when the file starts with the graph magic.
pub fn read_graph_file(path: &Path, options: &LoadOptions) -> Result<LoadedGraph> {
    let mut reader = BufReader::new(File::open(path)?);
    let is_binary = reader.fill_buf()?.starts_with(GRAPH_MAGIC);
    if is_binary {
        let graph = read_binary(reader)?;
        let relabel = Relabel::identity(graph.n());
        Ok(LoadedGraph { graph, relabel, report: NormalizationReport::default() })
    } else {
        load_edge_list(reader, options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<LoadedGraph> {
        load_edge_list(text.as_bytes(), &LoadOptions::default())
    }

    #[test]
    fn triangle() {
        let l = load("0 1\n1 2\n2 0\n").unwrap();
        assert_eq!((l.graph.n(), l.graph.m()), (3, 3));
    }

    #[test]
    fn loops_and_duplicates_are_dropped() {
        let l = load("0 1\n1 0\n0 0\n0 1\n").unwrap();
        assert_eq!((l.graph.n(), l.graph.m()), (2, 1));
        assert_eq!(l.report.self_loops, 1);
        assert_eq!(l.report.duplicate_edges, 2);
    }

    #[test]
    fn directed_input_collapses_reverse_arcs() {
        let opts = LoadOptions { undirected: false, ..LoadOptions::default() };
        let l = load_edge_list("0 1\n1 0\n1 2\n1 2\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.graph.m(), 2);
        assert_eq!(l.report.duplicate_edges, 1);
        assert_eq!(l.report.collapsed_reverse_arcs, 1);
    }

    #[test]
    fn comments_blank_lines_and_sparse_ids() {
        let l = load("# FromNodeId\tToNodeId\n\n100\t7\n7 3000 1.5\n").unwrap();
        assert_eq!(l.graph.n(), 3);
        assert_eq!(l.relabel.to_node(7), Some(0));
        assert_eq!(l.relabel.to_node(100), Some(1));
        assert_eq!(l.relabel.to_external(2), 3000);
        assert_eq!(l.relabel.to_node(8), None);
    }

    #[test]
    fn custom_delimiters() {
        let opts = LoadOptions { comment_prefix: "%".into(), delimiters: vec![','], undirected: true };
        let l = load_edge_list("% header\n0,1\n1, 2\n".as_bytes(), &opts).unwrap();
        assert_eq!(l.graph.m(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("0 1\n# c\n2 x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        match load("0 1\n5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(load("-1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(load(""), Err(Error::EmptyInput)));
        assert!(matches!(load("# only comments\n"), Err(Error::EmptyInput)));
        assert!(matches!(load("4 4\n"), Err(Error::EmptyInput)));
    }

    #[test]
    fn binary_round_trip_and_corruption() {
        let l = load("0 1\n1 2\n2 0\n2 3\n").unwrap();
        let mut buf = Vec::new();
        write_binary(&l.graph, &mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 1 + 16 + 5 * 8 + 8 * 4);
        assert_eq!(read_binary(&buf[..]).unwrap(), l.graph);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_binary(&bad[..]), Err(Error::Format(_))));
        assert!(matches!(read_binary(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        let mut asym = buf.clone();
        let last = asym.len() - 4;
        asym[last] = 1;
        assert!(read_binary(&asym[..]).is_err());
    }
}
