//! Line-oriented circuit text:
//!
//! ```text
//! # comment
//! DIMS 2 3 2 2
//! GATE SQCZ 0 1 3.141592653589793 0 25
//! BARRIER
//! POSTSELECT 1 1
//! ```
//!
//! A `GATE` line lists the gate name, its sites, its parameters, then the
//! duration in ns. Floats are written in shortest round-trip form so
//! `parse_circuit(write_circuit(c)) == c` exactly.

use crate::{Circuit, GateError, GateKind, GateSpec, Op, Result};
use std::fmt::Write;

pub fn write_circuit(c: &Circuit) -> String {
    let mut s = String::new();
    let dims: Vec<String> = c.dims().iter().map(|d| d.to_string()).collect();
    writeln!(s, "DIMS {}", dims.join(" ")).unwrap();
    for op in c.ops() {
        match op {
            Op::Gate(g) => {
                write!(s, "GATE {}", g.kind.name()).unwrap();
                for site in &g.sites {
                    write!(s, " {site}").unwrap();
                }
                for p in g.kind.params() {
                    write!(s, " {p}").unwrap();
                }
                writeln!(s, " {}", g.duration_ns).unwrap();
            }
            Op::Barrier => s.push_str("BARRIER\n"),
            Op::PostSelect { site, forbidden } => writeln!(s, "POSTSELECT {site} {forbidden}").unwrap(),
        }
    }
    s
}

fn arity_of(name: &str) -> Option<usize> {
    match name {
        "SQCZ" | "SQCZDG" | "CX" | "SWAP" => Some(2),
        "X01" | "X12" | "R01" | "R12" | "R02" | "Z" | "H" | "T" | "TDG" | "X" | "XC" => Some(1),
        _ => None,
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| GateError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let head = tok.next().unwrap();
        let rest: Vec<&str> = tok.collect();
        if head == "DIMS" {
            if circuit.is_some() {
                return Err(err("duplicate DIMS".into()));
            }
            let dims = rest
                .iter()
                .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad dimension {t:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            if dims.is_empty() || dims.iter().any(|&d| d != 2 && d != 3) {
                return Err(err(format!("dimensions must be 2 or 3, got {dims:?}")));
            }
            circuit = Some(Circuit::new(&dims));
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| err("DIMS must come first".into()))?;
        let wrap = |e: GateError| match e {
            GateError::Parse { .. } => e,
            other => err(other.to_string()),
        };
        match head {
            "BARRIER" => {
                if !rest.is_empty() {
                    return Err(err("BARRIER takes no arguments".into()));
                }
                c.barrier();
            }
            "POSTSELECT" => {
                let nums = rest
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad integer {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                if nums.len() != 2 {
                    return Err(err("POSTSELECT takes a site and a level".into()));
                }
                c.postselect(nums[0], nums[1]).map_err(wrap)?;
            }
            "GATE" => {
                let name = *rest.first().ok_or_else(|| err("missing gate name".into()))?;
                let arity = arity_of(name).ok_or_else(|| err(format!("unknown gate {name:?}")))?;
                if rest.len() < 2 + arity {
                    return Err(err(format!("{name} needs {arity} sites and a duration")));
                }
                let sites = rest[1..1 + arity]
                    .iter()
                    .map(|t| t.parse::<usize>().map_err(|e| err(format!("bad site {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                let floats = rest[1 + arity..]
                    .iter()
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad number {t:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                let (params, dur) = floats.split_at(floats.len() - 1);
                let kind = GateKind::from_name(name, params).map_err(wrap)?;
                c.push(Op::Gate(GateSpec::new(kind, &sites, dur[0]))).map_err(wrap)?;
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    circuit.ok_or(GateError::Parse { line: 0, msg: "empty circuit text".into() })
}
