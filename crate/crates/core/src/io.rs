//! Text formats: CCF documents, catalogs, graph files and JSON-line reports.
//!
//! A CCF document is
//!
//! ```text
//! # optional comments, only before the first line
//! ccf 1
//! <n> <rank>
//! <n rows of n relation indices, single spaces>
//! ```
//!
//! with LF newlines and no trailing whitespace.

use serde::Serialize;

use crate::budget::Budget;
use crate::cc::{CoherentConfiguration, Point};
use crate::error::{AxiomError, Error, Result};
use crate::iso::{first_algebraic_isomorphism, relation_prints, RelationPrint};

pub const CCF_MAGIC: &str = "ccf 1";

/// A line of input with its 1-based number.
#[derive(Clone, Copy)]
struct Line<'a> {
    no: usize,
    text: &'a [u8],
}

fn lex_error(line: usize, col: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        col,
        message: message.into(),
    }
}

fn split_lines(bytes: &[u8]) -> Result<Vec<Line<'_>>> {
    let mut lines: Vec<Line> = bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, text)| Line { no: i + 1, text })
        .collect();
    if lines.last().is_some_and(|l| l.text.is_empty()) {
        lines.pop();
    }
    for l in &lines {
        if let Some(col) = l.text.iter().position(|&b| b == b'\r') {
            return Err(lex_error(l.no, col + 1, "carriage return; lines must end with LF only"));
        }
    }
    Ok(lines)
}

/// Decimals separated by single spaces, with their columns.
fn strict_numbers(line: Line) -> Result<Vec<u64>> {
    if line.text.is_empty() {
        return Err(lex_error(line.no, 1, "expected decimal numbers, found an empty line"));
    }
    let mut out = Vec::new();
    let mut col = 1;
    for token in line.text.split(|&b| b == b' ') {
        if token.is_empty() {
            return Err(lex_error(
                line.no,
                col,
                "expected a decimal number (single spaces only, no trailing whitespace)",
            ));
        }
        let mut v: u64 = 0;
        for (i, &b) in token.iter().enumerate() {
            if !b.is_ascii_digit() {
                return Err(lex_error(line.no, col + i, format!("unexpected byte 0x{b:02x}")));
            }
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| lex_error(line.no, col, "number too large"))?;
        }
        out.push(v);
        col += token.len() + 1;
    }
    Ok(out)
}

/// Whitespace-separated decimals, for the lenient catalog format.
fn loose_numbers(line: Line) -> Result<Vec<u64>> {
    let text = std::str::from_utf8(line.text).map_err(|e| lex_error(line.no, e.valid_up_to() + 1, "invalid UTF-8"))?;
    let mut out = Vec::new();
    for token in text.split_ascii_whitespace() {
        let col = token.as_ptr() as usize - text.as_ptr() as usize + 1;
        out.push(
            token
                .parse()
                .map_err(|_| lex_error(line.no, col, format!("'{token}' is not a decimal number")))?,
        );
    }
    Ok(out)
}

fn to_index(v: u64, line: usize, what: &str) -> Result<usize> {
    usize::try_from(v).map_err(|_| lex_error(line, 1, format!("{what} {v} is too large")))
}

/// Reads `n` rows of `n` indices below `rank` (when given) into a flat matrix
/// and builds the configuration.
fn read_matrix(
    rows: &[Line],
    n: usize,
    rank: Option<usize>,
    header_line: usize,
    numbers: fn(Line) -> Result<Vec<u64>>,
) -> Result<CoherentConfiguration> {
    if n == 0 {
        return Err(AxiomError::Empty.into());
    }
    if rows.len() < n {
        let row = rows.len() + 1;
        return Err(Error::Dimension {
            row,
            line: rows.last().map_or(header_line, |l| l.no) + 1,
            message: format!("expected {n} matrix rows, found {}; row {row} is missing", rows.len()),
        });
    }
    if let Some(extra) = rows.get(n) {
        return Err(lex_error(
            extra.no,
            1,
            format!("unexpected content after the {n} matrix rows"),
        ));
    }
    let mut flat = Vec::new();
    for (i, &line) in rows.iter().enumerate() {
        let vals = numbers(line)?;
        if vals.len() != n {
            return Err(Error::Dimension {
                row: i + 1,
                line: line.no,
                message: format!("row {} has {} entries, expected {n}", i + 1, vals.len()),
            });
        }
        for (j, v) in vals.into_iter().enumerate() {
            if let Some(rank) = rank {
                if v >= rank as u64 {
                    return Err(lex_error(
                        line.no,
                        1,
                        format!("entry {} of row {} is {v}, outside 0..{rank}", j + 1, i + 1),
                    ));
                }
            }
            let c = u32::try_from(v).map_err(|_| lex_error(line.no, 1, format!("relation index {v} is too large")))?;
            flat.push(c);
        }
    }
    if let Some(rank) = rank {
        let used = flat.iter().max().map_or(0, |&m| m as usize + 1);
        if used != rank {
            return Err(lex_error(
                header_line,
                1,
                format!(
                    "header declares rank {rank} but the matrix uses indices up to {}",
                    used - 1
                ),
            ));
        }
    }
    CoherentConfiguration::from_flat(n, flat)
}

fn parse_ccf_lines(lines: &[Line]) -> Result<CoherentConfiguration> {
    let start = lines.iter().position(|l| !l.text.starts_with(b"#"));
    let Some(start) = start else {
        let line = lines.last().map_or(1, |l| l.no + 1);
        return Err(lex_error(line, 1, format!("expected '{CCF_MAGIC}'")));
    };
    let magic = lines[start];
    if magic.text != CCF_MAGIC.as_bytes() {
        return Err(lex_error(magic.no, 1, format!("expected '{CCF_MAGIC}'")));
    }
    let Some(&header) = lines.get(start + 1) else {
        return Err(lex_error(magic.no + 1, 1, "missing '<n> <rank>' header"));
    };
    let dims = strict_numbers(header)?;
    if dims.len() != 2 {
        return Err(lex_error(
            header.no,
            1,
            format!("header must be '<n> <rank>', found {} numbers", dims.len()),
        ));
    }
    let n = to_index(dims[0], header.no, "degree")?;
    let rank = to_index(dims[1], header.no, "rank")?;
    let rows = &lines[start + 2..];
    if let Some(c) = rows.iter().find(|l| l.text.starts_with(b"#")) {
        return Err(lex_error(c.no, 1, "comments are only allowed before the first line"));
    }
    read_matrix(rows, n, Some(rank), header.no, strict_numbers)
}

/// Parses a CCF document, validating the coherence axioms.
pub fn parse_ccf(text: &str) -> Result<CoherentConfiguration> {
    parse_ccf_bytes(text.as_bytes())
}

pub fn parse_ccf_bytes(bytes: &[u8]) -> Result<CoherentConfiguration> {
    parse_ccf_lines(&split_lines(bytes)?)
}

/// The canonical CCF text of a configuration.
pub fn write_ccf(x: &CoherentConfiguration) -> String {
    let n = x.n();
    let mut out = format!("{CCF_MAGIC}\n{n} {}\n", x.rank());
    for row in x.colors().chunks(n) {
        let cells: Vec<String> = row.iter().map(u32::to_string).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatalogFormat {
    /// CCF documents separated by blank lines.
    CcfMulti,
    /// Blocks of a line `n` followed by `n` whitespace-separated rows.
    MatrixList,
}

impl std::str::FromStr for CatalogFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ccf-multi" => Ok(Self::CcfMulti),
            "matrix-list" => Ok(Self::MatrixList),
            _ => Err(Error::InvalidArgument(format!(
                "unknown catalog format '{s}' (expected ccf-multi or matrix-list)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    /// Accepted configurations with their 1-based block numbers.
    pub entries: Vec<(usize, CoherentConfiguration)>,
    /// Rejected blocks, when not strict.
    pub rejected: Vec<Error>,
}

fn blocks<'a>(lines: &[Line<'a>]) -> Vec<Vec<Line<'a>>> {
    let mut out: Vec<Vec<Line>> = Vec::new();
    let mut cur = Vec::new();
    for &l in lines {
        if l.text.iter().all(u8::is_ascii_whitespace) {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
        } else {
            cur.push(l);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn parse_matrix_block(lines: &[Line]) -> Result<CoherentConfiguration> {
    let head = lines[0];
    let dims = loose_numbers(head)?;
    if dims.len() != 1 {
        return Err(lex_error(head.no, 1, "block must start with a line holding n"));
    }
    let n = to_index(dims[0], head.no, "degree")?;
    read_matrix(&lines[1..], n, None, head.no, loose_numbers)
}

/// Reads every block of a catalog. In strict mode the first bad block is
/// fatal; otherwise it is recorded in `rejected` and skipped.
pub fn ingest_catalog(text: &str, format: CatalogFormat, strict: bool) -> Result<Catalog> {
    let lines = split_lines(text.as_bytes())?;
    let blocks = blocks(&lines);
    if blocks.is_empty() {
        return Err(Error::InvalidArgument("catalog is empty".into()));
    }
    let mut catalog = Catalog::default();
    for (i, block) in blocks.iter().enumerate() {
        let parsed = match format {
            CatalogFormat::CcfMulti => parse_ccf_lines(block),
            CatalogFormat::MatrixList => parse_matrix_block(block),
        };
        match parsed {
            Ok(x) => catalog.entries.push((i + 1, x)),
            Err(e) => {
                let err = Error::Catalog {
                    block: i + 1,
                    line: block[0].no,
                    source: Box::new(e),
                };
                if strict {
                    return Err(err);
                }
                catalog.rejected.push(err);
            }
        }
    }
    Ok(catalog)
}

/// A graph file: a line `n`, then one arc `u v` per line. Blank lines and
/// lines starting with `#` are ignored.
pub fn parse_graph(text: &str) -> Result<(usize, Vec<(Point, Point)>)> {
    let lines = split_lines(text.as_bytes())?;
    let mut content = lines.into_iter().filter(|l| {
        let t = l.text.trim_ascii();
        !t.is_empty() && !t.starts_with(b"#")
    });
    let head = content.next().ok_or_else(|| lex_error(1, 1, "missing vertex count"))?;
    let dims = loose_numbers(head)?;
    if dims.len() != 1 {
        return Err(lex_error(head.no, 1, "first line must hold the vertex count"));
    }
    let n = to_index(dims[0], head.no, "vertex count")?;
    let mut arcs = Vec::new();
    for l in content {
        let v = loose_numbers(l)?;
        if v.len() != 2 {
            return Err(lex_error(
                l.no,
                1,
                format!("expected an arc 'u v', found {} numbers", v.len()),
            ));
        }
        let (a, b) = (to_index(v[0], l.no, "vertex")?, to_index(v[1], l.no, "vertex")?);
        if a >= n || b >= n {
            return Err(lex_error(l.no, 1, format!("vertex {} is outside 0..{n}", a.max(b))));
        }
        arcs.push((a, b));
    }
    Ok((n, arcs))
}

/// Invariants shared by algebraically isomorphic configurations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicFingerprint {
    n: usize,
    rank: usize,
    fiber_sizes: Vec<usize>,
    relations: Vec<RelationPrint>,
}

pub fn algebraic_fingerprint(x: &CoherentConfiguration) -> AlgebraicFingerprint {
    let mut fiber_sizes: Vec<usize> = x.fibers().iter().map(Vec::len).collect();
    fiber_sizes.sort_unstable();
    let mut relations = relation_prints(x);
    relations.sort();
    AlgebraicFingerprint {
        n: x.n(),
        rank: x.rank(),
        fiber_sizes,
        relations,
    }
}

/// Positions of catalog entries algebraically isomorphic to `target`:
/// fingerprint filter, then an explicit algebraic isomorphism.
pub fn locate(
    catalog: &[CoherentConfiguration],
    target: &CoherentConfiguration,
    budget: &Budget,
) -> Result<Vec<usize>> {
    let print = algebraic_fingerprint(target);
    let mut out = Vec::new();
    for (i, x) in catalog.iter().enumerate() {
        if algebraic_fingerprint(x) == print && first_algebraic_isomorphism(x, target, budget)?.is_some() {
            out.push(i);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigurationSummary {
    pub n: usize,
    pub rank: usize,
    pub homogeneous: bool,
    pub fibers: Vec<usize>,
    pub valencies: Vec<usize>,
    pub converse: Vec<usize>,
}

impl ConfigurationSummary {
    pub fn of(x: &CoherentConfiguration) -> Self {
        Self {
            n: x.n(),
            rank: x.rank(),
            homogeneous: x.is_homogeneous(),
            fibers: x.fibers().iter().map(Vec::len).collect(),
            valencies: x.valencies().to_vec(),
            converse: (0..x.rank()).map(|r| x.converse(r)).collect(),
        }
    }
}

/// One report object as a single JSON line.
pub fn json_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize to JSON")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{paley, PaleyKind};

    #[test]
    fn round_trip() {
        let x = paley(5, PaleyKind::Graph).unwrap().scheme;
        let text = write_ccf(&x);
        assert!(text.starts_with("ccf 1\n5 3\n0 1 2 2 1\n"));
        assert_eq!(parse_ccf(&text).unwrap(), x);
        let commented = format!("# Paley graph on 5 points\n{text}");
        assert_eq!(parse_ccf(&commented).unwrap(), x);
        assert_eq!(parse_ccf(text.trim_end()).unwrap(), x);
    }

    #[test]
    fn short_matrix_names_missing_row() {
        let err = parse_ccf("ccf 1\n3 2\n0 1 1\n1 0 1\n").unwrap_err();
        assert!(matches!(err, Error::Dimension { row: 3, line: 5, .. }), "{err}");
        assert!(err.to_string().contains("row 3"));
    }

    #[test]
    fn lexical_errors_carry_positions() {
        let pos = |text: &str| match parse_ccf(text).unwrap_err() {
            Error::Parse { line, col, .. } => (line, col),
            e => panic!("unexpected {e}"),
        };
        assert_eq!(pos("ccf 2\n"), (1, 1));
        assert_eq!(pos("ccf 1\n2 2\n0 1\n1 x\n"), (4, 3));
        assert_eq!(pos("ccf 1\n2 2\n0 1 \n1 0\n"), (3, 5));
        assert_eq!(pos("ccf 1\r\n2 2\n0 1\n1 0\n"), (1, 6));
        assert_eq!(pos("ccf 1\n2 2\n0 1\n1 0\n# late\n"), (5, 1));
        assert_eq!(pos("ccf 1\n2 3\n0 1\n1 0\n"), (2, 1));
        assert_eq!(pos("ccf 1\n2 2\n0 1\n1 5\n"), (4, 1));
        assert_eq!(pos("ccf 1\n2 2\n0 1\n1 0\n1 0\n"), (5, 1));
    }

    #[test]
    fn directed_four_cycle_is_rejected() {
        let text = "ccf 1\n4 3\n0 1 2 2\n2 0 1 2\n2 2 0 1\n1 2 2 0\n";
        assert!(matches!(
            parse_ccf(text).unwrap_err(),
            Error::Axiom(AxiomError::NonCoherent { .. })
        ));
    }

    #[test]
    fn catalogs() {
        let a = write_ccf(&CoherentConfiguration::trivial(3));
        let b = write_ccf(&CoherentConfiguration::discrete(2));
        let cat = ingest_catalog(&format!("{a}\n{b}"), CatalogFormat::CcfMulti, true).unwrap();
        assert_eq!(cat.entries.len(), 2);
        let bad = "ccf 1\n4 3\n0 1 2 2\n2 0 1 2\n2 2 0 1\n1 2 2 0\n";
        let err = ingest_catalog(&format!("{a}\n{bad}"), CatalogFormat::CcfMulti, true).unwrap_err();
        assert!(matches!(err, Error::Catalog { block: 2, line: 7, .. }), "{err}");
        let lenient = ingest_catalog(&format!("{a}\n{bad}\n{b}"), CatalogFormat::CcfMulti, false).unwrap();
        assert_eq!(lenient.entries.iter().map(|e| e.0).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(lenient.rejected.len(), 1);
        let list = "3\n0 1 1\n1 0 1\n1 1 0\n\n2\n0  1\n2 3\n";
        let cat = ingest_catalog(list, CatalogFormat::MatrixList, true).unwrap();
        assert_eq!(cat.entries[1].1, CoherentConfiguration::discrete(2));
        assert!(ingest_catalog("\n\n", CatalogFormat::MatrixList, true).is_err());
        assert!("xml".parse::<CatalogFormat>().is_err());
    }

    #[test]
    fn graph_files() {
        let (n, arcs) = parse_graph("# 5-cycle\n5\n0 1\n1 2\n\n2 3\n3 4\n4 0\n").unwrap();
        assert_eq!((n, arcs.len()), (5, 5));
        assert!(parse_graph("3\n0 3\n").is_err());
        assert!(parse_graph("3\n0\n").is_err());
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn fingerprint_locates_relabelled_copy() {
        let x = paley(13, PaleyKind::Graph).unwrap().scheme;
        let perm: Vec<usize> = (0..13).map(|i| (i * 5 + 3) % 13).collect();
        let y = x.permute_points(&perm).unwrap();
        assert_eq!(algebraic_fingerprint(&x), algebraic_fingerprint(&y));
        let catalog = vec![
            CoherentConfiguration::trivial(13),
            y,
            CoherentConfiguration::discrete(3),
        ];
        assert_eq!(locate(&catalog, &x, &Budget::default()).unwrap(), vec![1]);
    }

    #[test]
    fn summary_json_keys() {
        let line = json_line(&ConfigurationSummary::of(&CoherentConfiguration::trivial(3)));
        assert_eq!(
            line,
            r#"{"n":3,"rank":2,"homogeneous":true,"fibers":[3],"valencies":[1,2],"converse":[0,1]}"#
        );
    }
}
