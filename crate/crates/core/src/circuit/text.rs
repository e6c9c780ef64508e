//! Line-oriented grid format (`.pqc`).
//!
//! ```text
//! format_version 1
//! qubits 2 stages 2
//! init 00
//! q0: H , C
//! q1: I , X
//! measure 0 1
//! ```
//!
//! `#` starts a comment. The header, `init` and `measure` lines may be omitted
//! when dimensions can be taken from the grid rows. An optional
//! `noise <p> <overshoot|stochastic> <seed>` line attaches a noise configuration.

use std::fmt::Write as _;
use std::str::FromStr;

use super::{Circuit, CircuitCell, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::gates::{GateKind, GateSpec};
use crate::noise::{NoiseConfig, NoiseMode};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses one grid token such as `H`, `C`, `SW` or `U3(0.1,0.2,0.3)`.
pub(crate) fn parse_token(token: &str) -> std::result::Result<CircuitCell, String> {
    let token = token.trim();
    let (name, args) = match token.find('(') {
        Some(open) => {
            let close = token
                .strip_suffix(')')
                .ok_or_else(|| format!("unterminated parameter list in `{token}`"))?;
            (&token[..open], Some(&close[open + 1..]))
        }
        None => (token, None),
    };
    let name = name.trim();
    match name.to_ascii_uppercase().as_str() {
        "C" if args.is_none() => return Ok(CircuitCell::Control),
        "SW" if args.is_none() => return Ok(CircuitCell::SwapEndpoint),
        "I" if args.is_none() => return Ok(CircuitCell::Identity),
        _ => {}
    }
    let kind = GateKind::from_str(name).map_err(|_| format!("unknown token `{token}`"))?;
    if kind.token().is_none() {
        return Err(format!(
            "`{name}` is written with C/SW markers, not as a cell token"
        ));
    }
    let params = match args {
        None => Vec::new(),
        Some(list) => list
            .split(',')
            .map(|a| {
                let a = a.trim();
                a.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| format!("bad angle `{a}` in `{token}`"))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?,
    };
    let spec = GateSpec { kind, params };
    spec.validate().map_err(|e| e.to_string())?;
    Ok(CircuitCell::Gate(spec))
}

pub(crate) fn format_token(cell: &CircuitCell) -> String {
    match cell {
        CircuitCell::Identity => "I".into(),
        CircuitCell::Control => "C".into(),
        CircuitCell::SwapEndpoint => "SW".into(),
        CircuitCell::Gate(spec) => {
            let name = spec.kind.token().unwrap_or(spec.kind.name());
            if spec.params.is_empty() {
                name.to_string()
            } else {
                let args: Vec<String> = spec.params.iter().map(|p| format!("{p:?}")).collect();
                format!("{name}({})", args.join(","))
            }
        }
    }
}

/// Splits on commas that are not inside parentheses.
fn split_cells(row: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (i, ch) in row.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&row[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&row[start..]);
    out
}

pub(crate) fn parse_bits(bits: &str, num_qubits: usize) -> std::result::Result<Vec<bool>, String> {
    if bits.len() != num_qubits {
        return Err(format!(
            "init has {} bits for {num_qubits} qubits",
            bits.len()
        ));
    }
    // leftmost character is qubit N-1
    bits.chars()
        .rev()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("init bit `{other}` is not 0 or 1")),
        })
        .collect()
}

pub(crate) fn format_bits(bits: &[bool]) -> String {
    bits.iter()
        .rev()
        .map(|&b| if b { '1' } else { '0' })
        .collect()
}

impl Circuit {
    /// Parses the text grid format.
    pub fn parse_text(source: &str) -> Result<Self> {
        let mut dims: Option<(usize, usize)> = None;
        let mut init: Option<(usize, String)> = None;
        let mut measure: Option<Vec<usize>> = None;
        let mut noise = None;
        let mut rows: Vec<(usize, usize, Vec<CircuitCell>)> = Vec::new();

        for (idx, raw) in source.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let first = words.next().unwrap_or("");
            match first {
                "format_version" => {
                    let v: u32 = words
                        .next()
                        .and_then(|w| w.parse().ok())
                        .ok_or_else(|| parse_err(line_no, "format_version needs an integer"))?;
                    if v != FORMAT_VERSION {
                        return Err(parse_err(
                            line_no,
                            format!("unsupported format_version {v}"),
                        ));
                    }
                }
                "qubits" => {
                    let rest: Vec<&str> = words.collect();
                    match rest.as_slice() {
                        [n, "stages", m] => {
                            let n = n
                                .parse()
                                .map_err(|_| parse_err(line_no, "bad qubit count"))?;
                            let m = m
                                .parse()
                                .map_err(|_| parse_err(line_no, "bad stage count"))?;
                            dims = Some((n, m));
                        }
                        _ => return Err(parse_err(line_no, "expected `qubits N stages M`")),
                    }
                }
                "init" => {
                    let bits = words
                        .next()
                        .ok_or_else(|| parse_err(line_no, "init needs a bitstring"))?;
                    init = Some((line_no, bits.to_string()));
                }
                "measure" => {
                    let qs = words
                        .map(|w| w.parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| parse_err(line_no, "measure takes qubit indices"))?;
                    measure = Some(qs);
                }
                "noise" => {
                    let rest: Vec<&str> = words.collect();
                    let [p, mode, seed] = rest.as_slice() else {
                        return Err(parse_err(line_no, "expected `noise <p> <mode> <seed>`"));
                    };
                    noise = Some(NoiseConfig {
                        p: p.parse()
                            .map_err(|_| parse_err(line_no, "bad noise rate"))?,
                        mode: NoiseMode::from_str(mode).map_err(|e| parse_err(line_no, e))?,
                        seed: seed
                            .parse()
                            .map_err(|_| parse_err(line_no, "bad noise seed"))?,
                    });
                }
                _ => {
                    let (label, body) = line
                        .split_once(':')
                        .ok_or_else(|| parse_err(line_no, format!("unrecognized line `{line}`")))?;
                    let qubit = label
                        .trim()
                        .strip_prefix('q')
                        .and_then(|k| k.parse::<usize>().ok())
                        .ok_or_else(|| parse_err(line_no, format!("bad row label `{label}`")))?;
                    let cells = split_cells(body)
                        .into_iter()
                        .map(|tok| parse_token(tok).map_err(|m| parse_err(line_no, m)))
                        .collect::<Result<Vec<_>>>()?;
                    rows.push((line_no, qubit, cells));
                }
            }
        }

        let num_qubits = dims.map(|d| d.0).unwrap_or(rows.len());
        if num_qubits == 0 {
            return Err(parse_err(1, "no qubit rows"));
        }
        let mut grid: Vec<Option<Vec<CircuitCell>>> = vec![None; num_qubits];
        for (line_no, qubit, cells) in rows {
            if qubit >= num_qubits {
                return Err(parse_err(
                    line_no,
                    format!("row q{qubit} beyond {num_qubits} qubits"),
                ));
            }
            if grid[qubit].is_some() {
                return Err(parse_err(line_no, format!("duplicate row q{qubit}")));
            }
            grid[qubit] = Some(cells);
        }
        let grid = grid
            .into_iter()
            .enumerate()
            .map(|(q, r)| r.ok_or_else(|| parse_err(0, format!("missing row q{q}"))))
            .collect::<Result<Vec<_>>>()?;
        let num_stages = dims.map(|d| d.1).unwrap_or(grid[0].len());
        for (q, row) in grid.iter().enumerate() {
            if row.len() != num_stages {
                return Err(parse_err(
                    0,
                    format!(
                        "ragged row q{q}: {} cells, expected {num_stages}",
                        row.len()
                    ),
                ));
            }
        }
        let bits = match init {
            Some((line_no, bits)) => {
                parse_bits(&bits, num_qubits).map_err(|m| parse_err(line_no, m))?
            }
            None => vec![false; num_qubits],
        };
        Ok(Circuit::new(grid, bits, measure.unwrap_or_default())?.with_noise(noise))
    }

    /// Canonical text rendering; `parse_text` inverts it exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format_version {FORMAT_VERSION}");
        let _ = writeln!(out, "qubits {} stages {}", self.num_qubits, self.num_stages);
        let _ = writeln!(out, "init {}", format_bits(&self.initial_bits));
        for (q, row) in self.grid.iter().enumerate() {
            let toks: Vec<String> = row.iter().map(format_token).collect();
            let _ = writeln!(out, "q{q}: {}", toks.join(" , "));
        }
        let measured: Vec<String> = self.measured.iter().map(|q| q.to_string()).collect();
        if measured.is_empty() {
            out.push_str("measure\n");
        } else {
            let _ = writeln!(out, "measure {}", measured.join(" "));
        }
        if let Some(n) = &self.noise {
            let _ = writeln!(out, "noise {:?} {} {}", n.p, n.mode, n.seed);
        }
        out
    }
}
