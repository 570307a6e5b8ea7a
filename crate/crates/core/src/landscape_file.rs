//! Plain-text landscape files.
//!
//! ```text
//! # comments and blank lines are ignored
//! format nk-landscape/1
//! n 4
//! k 1
//! seed 42
//! packing first-site-msb
//! row 1.23456789012345678e-1 6.00000000000000000e-1 ...
//! ...                                   (exactly n rows, 2^(k+1) values each)
//! ```
//!
//! The header keys `n`, `k`, `seed` and `packing` follow the `format` line in
//! any order, each exactly once, and precede the rows. Row `i` lists
//! `phi_i` in column order, where column bits read `x_i .. x_{i+k}` from most
//! to least significant. Values are written with 18 significant digits, enough
//! to reproduce every `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::landscape::{NkLandscape, NkParams, PACKING};

pub const FORMAT_TAG: &str = "nk-landscape/1";

pub fn to_text(landscape: &NkLandscape) -> String {
    let p = landscape.params();
    let mut out = String::new();
    let _ = writeln!(out, "format {FORMAT_TAG}");
    let _ = writeln!(out, "n {}", p.n);
    let _ = writeln!(out, "k {}", p.k);
    let _ = writeln!(out, "seed {}", p.seed);
    let _ = writeln!(out, "packing {PACKING}");
    for row in landscape.rows() {
        out.push_str("row");
        for v in row {
            let _ = write!(out, " {v:.17e}");
        }
        out.push('\n');
    }
    out
}

pub fn write<W: Write>(landscape: &NkLandscape, mut w: W) -> Result<()> {
    w.write_all(to_text(landscape).as_bytes())?;
    Ok(())
}

pub fn save(landscape: &NkLandscape, path: &Path) -> Result<()> {
    fs::write(path, to_text(landscape))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<NkLandscape> {
    parse(&fs::read_to_string(path)?)
}

#[derive(Default)]
struct Header {
    n: Option<usize>,
    k: Option<usize>,
    seed: Option<u64>,
    packing: bool,
}

/// Parses a landscape document. Never panics on malformed input.
pub fn parse(text: &str) -> Result<NkLandscape> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    match lines.next() {
        Some((_, line)) if split_key(line) == ("format", FORMAT_TAG) => {}
        Some((no, line)) => {
            return Err(Error::parse(
                no,
                format!("expected `format {FORMAT_TAG}`, found {line:?}"),
            ))
        }
        None => return Err(Error::parse(0, "empty document")),
    }

    let mut header = Header::default();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut params: Option<NkParams> = None;
    let mut last_line = 0;

    for (no, line) in lines {
        last_line = no;
        let (key, rest) = split_key(line);
        if key == "row" {
            let p = match params {
                Some(p) => p,
                None => {
                    let p = header_params(&header, no)?;
                    params = Some(p);
                    p
                }
            };
            if rows.len() == p.n {
                return Err(Error::parse(no, format!("more than n = {} rows", p.n)));
            }
            rows.push(parse_row(rest, p.row_len(), no)?);
            continue;
        }
        if params.is_some() {
            return Err(Error::parse(no, format!("header key {key:?} after rows")));
        }
        match key {
            "n" => set_once(&mut header.n, parse_num(rest, no)?, key, no)?,
            "k" => set_once(&mut header.k, parse_num(rest, no)?, key, no)?,
            "seed" => set_once(&mut header.seed, parse_num(rest, no)?, key, no)?,
            "packing" => {
                if header.packing {
                    return Err(Error::parse(no, "duplicate key \"packing\""));
                }
                if rest != PACKING {
                    return Err(Error::parse(
                        no,
                        format!("unsupported packing {rest:?}, expected {PACKING:?}"),
                    ));
                }
                header.packing = true;
            }
            other => return Err(Error::parse(no, format!("unknown key {other:?}"))),
        }
    }

    let params = match params {
        Some(p) => p,
        None => header_params(&header, last_line)?,
    };
    if rows.len() != params.n {
        return Err(Error::parse(
            last_line,
            format!("expected {} rows, found {}", params.n, rows.len()),
        ));
    }
    NkLandscape::from_rows(params, rows).map_err(|e| Error::parse(last_line, e.to_string()))
}

fn split_key(line: &str) -> (&str, &str) {
    match line.split_once(char::is_whitespace) {
        Some((key, rest)) => (key, rest.trim()),
        None => (line, ""),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid integer {s:?}")))
}

fn set_once<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(Error::parse(line, format!("duplicate key {key:?}")));
    }
    *slot = Some(value);
    Ok(())
}

fn header_params(header: &Header, line: usize) -> Result<NkParams> {
    let missing = |key: &str| Error::parse(line, format!("missing header key {key:?}"));
    let n = header.n.ok_or_else(|| missing("n"))?;
    let k = header.k.ok_or_else(|| missing("k"))?;
    let seed = header.seed.ok_or_else(|| missing("seed"))?;
    if !header.packing {
        return Err(missing("packing"));
    }
    NkParams::new(n, k, seed).map_err(|e| Error::parse(line, e.to_string()))
}

fn parse_row(rest: &str, expected: usize, line: usize) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for token in rest.split_whitespace() {
        if values.len() == expected {
            return Err(Error::parse(
                line,
                format!("row has more than {expected} values"),
            ));
        }
        let v: f64 = token
            .parse()
            .map_err(|_| Error::parse(line, format!("invalid number {token:?}")))?;
        if !(0.0..1.0).contains(&v) {
            return Err(Error::parse(line, format!("value {v} outside [0, 1)")));
        }
        values.push(v);
    }
    if values.len() != expected {
        return Err(Error::parse(
            line,
            format!("row has {} values, expected {expected}", values.len()),
        ));
    }
    Ok(values)
}
