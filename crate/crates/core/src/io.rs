//! File formats: state and channel JSON, scan CSV.
//!
//! Complex numbers are `[re, im]` pairs. Joint indices are row-major,
//! `(i, j) ↦ i·dim_b + j`. Floats are written in shortest round-trip form.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{KrausChannel, Side, TruncationScan};
use crate::error::{Error, Result};
use crate::linalg::{self, c, CMat};
use crate::oracles::FamilyState;
use crate::states::{DensityMatrix, PureState};

type Pair = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Pure,
    Mixed,
}

/// Either a flat row-major list or a list of rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ComplexArray {
    Flat(Vec<Pair>),
    Rows(Vec<Vec<Pair>>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dim_a: usize,
    dim_b: usize,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amps: Option<ComplexArray>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<ComplexArray>,
}

fn parse_err(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("field `{field}`: {msg}"))
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Parse(format!("{e}"))
}

/// Materialize a `rows x cols` matrix, checking shape and finiteness.
fn to_matrix(arr: &ComplexArray, rows: usize, cols: usize, field: &str) -> Result<CMat> {
    let flat: Vec<Pair> = match arr {
        ComplexArray::Flat(v) => {
            if v.len() != rows * cols {
                return Err(parse_err(
                    field,
                    format!("expected {} entries ({rows} x {cols}), got {}", rows * cols, v.len()),
                ));
            }
            v.clone()
        }
        ComplexArray::Rows(r) => {
            if r.len() != rows {
                return Err(parse_err(field, format!("expected {rows} rows, got {}", r.len())));
            }
            for (i, row) in r.iter().enumerate() {
                if row.len() != cols {
                    return Err(parse_err(
                        &format!("{field}[{i}]"),
                        format!("expected {cols} entries, got {}", row.len()),
                    ));
                }
            }
            r.concat()
        }
    };
    if let Some(k) = flat.iter().position(|p| !p[0].is_finite() || !p[1].is_finite()) {
        return Err(parse_err(field, format!("entry {k} is not finite")));
    }
    Ok(CMat::from_row_iterator(rows, cols, flat.iter().map(|p| c(p[0], p[1]))))
}

fn rows_of(m: &CMat) -> ComplexArray {
    ComplexArray::Rows(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect(),
    )
}

fn flat_of(m: &CMat) -> ComplexArray {
    ComplexArray::Flat(
        (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect(),
    )
}

/// Parse a state document. Shape problems are parse errors; physical
/// violations (trace, positivity, zero norm) surface as validation errors.
pub fn parse_state(text: &str) -> Result<FamilyState> {
    let file: StateFile = serde_json::from_str(text).map_err(json_err)?;
    if file.dim_a == 0 || file.dim_b == 0 {
        return Err(parse_err("dim_a/dim_b", "dimensions must be positive"));
    }
    let (a, b) = (file.dim_a, file.dim_b);
    match file.kind {
        Kind::Pure => {
            if file.rho.is_some() {
                return Err(parse_err("rho", "not allowed when kind = \"pure\""));
            }
            let amps = file.amps.as_ref().ok_or_else(|| parse_err("amps", "missing for kind = \"pure\""))?;
            Ok(FamilyState::Pure(PureState::new(to_matrix(amps, a, b, "amps")?)?))
        }
        Kind::Mixed => {
            if file.amps.is_some() {
                return Err(parse_err("amps", "not allowed when kind = \"mixed\""));
            }
            let rho = file.rho.as_ref().ok_or_else(|| parse_err("rho", "missing for kind = \"mixed\""))?;
            let n = a * b;
            Ok(FamilyState::Mixed(DensityMatrix::new(to_matrix(rho, n, n, "rho")?, Some((a, b)))?))
        }
    }
}

pub fn state_to_json(state: &FamilyState) -> String {
    let (dim_a, dim_b) = state.dims();
    let file = match state {
        FamilyState::Pure(p) => StateFile {
            dim_a,
            dim_b,
            kind: Kind::Pure,
            amps: Some(rows_of(p.amps())),
            rho: None,
        },
        FamilyState::Mixed(m) => StateFile {
            dim_a,
            dim_b,
            kind: Kind::Mixed,
            amps: None,
            rho: Some(flat_of(m.entries())),
        },
    };
    serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_state(path: impl AsRef<Path>) -> Result<FamilyState> {
    let path = path.as_ref();
    parse_state(&read_text(path)?).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_state(path: impl AsRef<Path>, state: &FamilyState) -> Result<()> {
    write_text(path.as_ref(), &state_to_json(state))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum KrausEntry {
    Pair { a: Vec<Vec<Pair>>, b: Vec<Vec<Pair>> },
    Local(Vec<Vec<Pair>>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    side: SideName,
    dim_a: usize,
    dim_b: usize,
    kraus: Vec<KrausEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    branches: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
enum SideName {
    #[serde(alias = "a")]
    A,
    #[serde(alias = "b")]
    B,
    #[serde(rename = "both")]
    Both,
}

impl From<SideName> for Side {
    fn from(s: SideName) -> Side {
        match s {
            SideName::A => Side::A,
            SideName::B => Side::B,
            SideName::Both => Side::Both,
        }
    }
}

impl From<Side> for SideName {
    fn from(s: Side) -> SideName {
        match s {
            Side::A => SideName::A,
            Side::B => SideName::B,
            Side::Both => SideName::Both,
        }
    }
}

fn rows_matrix(rows: &[Vec<Pair>], field: &str) -> Result<CMat> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if n == 0 || m == 0 {
        return Err(parse_err(field, "empty matrix"));
    }
    to_matrix(&ComplexArray::Rows(rows.to_vec()), n, m, field)
}

/// Parse a channel document into instrument branches. Without `branches`,
/// every Kraus operator forms its own branch.
pub fn parse_instrument(text: &str) -> Result<Vec<KrausChannel>> {
    let file: ChannelFile = serde_json::from_str(text).map_err(json_err)?;
    let side = Side::from(file.side);
    let dims = (file.dim_a, file.dim_b);
    if file.kraus.is_empty() {
        return Err(parse_err("kraus", "at least one operator is required"));
    }
    let mut pairs = Vec::with_capacity(file.kraus.len());
    for (k, entry) in file.kraus.iter().enumerate() {
        let field = format!("kraus[{k}]");
        let pair = match (side, entry) {
            (Side::Both, KrausEntry::Pair { a, b }) => {
                (rows_matrix(a, &format!("{field}.a"))?, rows_matrix(b, &format!("{field}.b"))?)
            }
            (Side::Both, KrausEntry::Local(_)) => {
                return Err(parse_err(&field, "side \"both\" needs {\"a\": ..., \"b\": ...} pairs"))
            }
            (Side::A, KrausEntry::Local(m)) => (rows_matrix(m, &field)?, linalg::identity(dims.1)),
            (Side::B, KrausEntry::Local(m)) => (linalg::identity(dims.0), rows_matrix(m, &field)?),
            (_, KrausEntry::Pair { .. }) => {
                return Err(parse_err(&field, "one-sided channels take plain matrices"))
            }
        };
        pairs.push(pair);
    }
    let groups = match file.branches {
        Some(g) => {
            let mut seen = vec![false; pairs.len()];
            for (bi, group) in g.iter().enumerate() {
                if group.is_empty() {
                    return Err(parse_err(&format!("branches[{bi}]"), "empty branch"));
                }
                for &idx in group {
                    if idx >= pairs.len() {
                        return Err(parse_err(
                            &format!("branches[{bi}]"),
                            format!("index {idx} out of range for {} operators", pairs.len()),
                        ));
                    }
                    if std::mem::replace(&mut seen[idx], true) {
                        return Err(parse_err(&format!("branches[{bi}]"), format!("index {idx} used twice")));
                    }
                }
            }
            g
        }
        None => (0..pairs.len()).map(|k| vec![k]).collect(),
    };
    groups
        .iter()
        .map(|group| KrausChannel::new(side, group.iter().map(|&k| pairs[k].clone()).collect(), dims))
        .collect()
}

pub fn instrument_to_json(branches: &[KrausChannel]) -> Result<String> {
    let first = branches
        .first()
        .ok_or_else(|| Error::Param("cannot serialize an empty instrument".into()))?;
    let side = first.side();
    let (dim_a, dim_b) = first.input_dims();
    let mut kraus = Vec::new();
    let mut groups = Vec::new();
    for ch in branches {
        if ch.side() != side || ch.input_dims() != (dim_a, dim_b) {
            return Err(Error::Param("instrument branches disagree on side or dimensions".into()));
        }
        let mut group = Vec::new();
        for (a, b) in ch.pairs() {
            let rows = |m: &CMat| match rows_of(m) {
                ComplexArray::Rows(r) => r,
                ComplexArray::Flat(_) => unreachable!(),
            };
            group.push(kraus.len());
            kraus.push(match side {
                Side::A => KrausEntry::Local(rows(a)),
                Side::B => KrausEntry::Local(rows(b)),
                Side::Both => KrausEntry::Pair { a: rows(a), b: rows(b) },
            });
        }
        groups.push(group);
    }
    let file = ChannelFile {
        side: side.into(),
        dim_a,
        dim_b,
        kraus,
        branches: Some(groups),
    };
    Ok(serde_json::to_string_pretty(&file).expect("channel serialization cannot fail"))
}

pub fn read_instrument(path: impl AsRef<Path>) -> Result<Vec<KrausChannel>> {
    let path = path.as_ref();
    parse_instrument(&read_text(path)?).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[derive(Serialize)]
struct ScanRow {
    dim: usize,
    concurrence: f64,
    trace_gap: Option<f64>,
    certified_bound: Option<f64>,
    analytic_limit: Option<f64>,
}

/// One row per size; `trace_gap` and `certified_bound` refer to the step
/// from the previous size and are blank on the first row.
pub fn scan_to_csv(scan: &TruncationScan) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (t, (&dim, &concurrence)) in scan.dims.iter().zip(&scan.values).enumerate() {
        let step = t.checked_sub(1);
        w.serialize(ScanRow {
            dim,
            concurrence,
            trace_gap: step.map(|s| scan.trace_gaps[s]),
            certified_bound: step.map(|s| scan.certified_bounds[s]),
            analytic_limit: scan.analytic_limit,
        })
        .expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

pub fn write_scan_csv(path: impl AsRef<Path>, scan: &TruncationScan) -> Result<()> {
    write_text(path.as_ref(), &scan_to_csv(scan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{apply_instrument, projective_measurement, truncation_scan};
    use crate::measures::concurrence_purity;
    use crate::oracles::{make_family, StateFamily};

    #[test]
    fn bell_document_parses() {
        let text = r#"{"dim_a":2,"dim_b":2,"kind":"pure",
            "amps":[[[0.7071067811865476,0],[0,0]],[[0,0],[0.7071067811865476,0]]]}"#;
        let FamilyState::Pure(psi) = parse_state(text).unwrap() else { panic!("expected pure") };
        assert!((concurrence_purity(&psi) - 1.0).abs() < 1e-15);
        // flat layout is accepted too
        let flat = r#"{"dim_a":1,"dim_b":2,"kind":"pure","amps":[[1,0],[0,0]]}"#;
        assert!(parse_state(flat).is_ok());
    }

    #[test]
    fn round_trip_reproduces_states_exactly() {
        for spec in ["werner:p=0.3", "two_mode_squeezed:r=0.7,d=5", "rank_k_random:da=2,db=3,k=3,seed=9"] {
            let state = make_family(&spec.parse::<StateFamily>().unwrap()).unwrap();
            let back = parse_state(&state_to_json(&state)).unwrap();
            let gap = linalg::max_abs(&(back.density().entries() - state.density().entries()));
            assert!(gap < 1e-15, "{spec}: {gap:e}");
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        let cases = [
            (r#"{"dim_a":2,"kind":"pure","amps":[]}"#, "dim_b"),
            (r#"{"dim_a":2,"dim_b":2,"kind":"pure","amps":[[[1,0]],[[0,0]]]}"#, "amps[0]"),
            (r#"{"dim_a":2,"dim_b":2,"kind":"mixed"}"#, "rho"),
            (r#"{"dim_a":2,"dim_b":2,"kind":"weird","amps":[]}"#, "weird"),
            (r#"{"dim_a":1,"dim_b":1,"kind":"pure","amps":[[1,0]],"extra":1}"#, "extra"),
            ("{not json", "line 1"),
        ];
        for (text, needle) in cases {
            match parse_state(text) {
                Err(Error::Parse(msg)) => assert!(msg.contains(needle), "{msg} lacks {needle}"),
                other => panic!("expected parse error for {text}, got {other:?}"),
            }
        }
    }

    #[test]
    fn physical_violations_are_validation_errors() {
        let text = r#"{"dim_a":1,"dim_b":2,"kind":"mixed","rho":[[0.5,0],[0,0],[0,0],[0.6,0]]}"#;
        let err = parse_state(text).unwrap_err();
        assert!(matches!(err, Error::TraceViolation { .. }), "{err:?}");
        assert!(err.is_validation());
        let zero = r#"{"dim_a":1,"dim_b":1,"kind":"pure","amps":[[0,0]]}"#;
        assert!(matches!(parse_state(zero), Err(Error::ZeroState { .. })));
    }

    #[test]
    fn channel_documents() {
        let text = r#"{"side":"B","dim_a":2,"dim_b":2,
            "kraus":[[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#;
        let inst = parse_instrument(text).unwrap();
        assert_eq!(inst.len(), 2);
        let reference = projective_measurement(Side::B, (2, 2)).unwrap();
        assert_eq!(inst, reference);

        let grouped = text.replace("]]]}", "]]], \"branches\":[[0,1]]}");
        let one = parse_instrument(&grouped).unwrap();
        assert_eq!(one.len(), 1);
        let out = apply_instrument(&PureState::max_entangled(2).density(), &one).unwrap();
        assert!((out[0].probability - 1.0).abs() < 1e-15);

        let back = parse_instrument(&instrument_to_json(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);

        let bad = text.replace("]]]}", "]]], \"branches\":[[0,3]]}");
        assert!(matches!(parse_instrument(&bad), Err(Error::Parse(m)) if m.contains("branches[0]")));
    }

    #[test]
    fn scan_csv_layout() {
        let fam: StateFamily = "two_mode_squeezed:r=0.5".parse().unwrap();
        let csv = scan_to_csv(&truncation_scan(&fam, &[2, 4, 8, 16]).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "dim,concurrence,trace_gap,certified_bound,analytic_limit");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2,") && lines[1].contains(",,"));
    }
}
