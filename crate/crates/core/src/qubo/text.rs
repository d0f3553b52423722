//! Line-oriented text formats.
//!
//! QUBO:
//!
//! ```text
//! n <num_vars>
//! # vars <flights> <gates>
//! <j> <k> <value>
//! offset <value>
//! ```
//!
//! Ising: `n <num_spins>`, then `h <i> <value>`, `J <i> <j> <value>` and
//! `offset <value>` lines. Blank lines and other `#` comments are ignored.
//! Values are written in shortest round-trip form, so reading back yields
//! bit-identical models.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::{IsingModel, Qubo, VarMap};
use crate::error::{read_file, write_file};
use crate::{Error, Result};

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| err(line, format!("bad {what} `{tok}`")))
}

/// Content lines with their 1-based line numbers; `# vars` lines are kept.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        let keep = !l.is_empty() && (!l.starts_with('#') || l.starts_with("# vars"));
        keep.then_some((i + 1, l))
    })
}

fn header(lines: &mut dyn Iterator<Item = (usize, &str)>) -> Result<usize> {
    let (no, line) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let mut toks = line.split_whitespace();
    if toks.next() != Some("n") {
        return Err(err(no, "expected `n <count>` header"));
    }
    let n = field(toks.next(), no, "count")?;
    if toks.next().is_some() {
        return Err(err(no, "trailing tokens"));
    }
    Ok(n)
}

impl Qubo {
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.n);
        if let Some(vm) = self.var_map {
            let _ = writeln!(s, "# vars {} {}", vm.num_flights, vm.num_gates);
        }
        for (&(j, k), v) in &self.coeffs {
            let _ = writeln!(s, "{j} {k} {v}");
        }
        let _ = writeln!(s, "offset {}", self.offset);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let n = header(&mut lines)?;
        let mut q = Qubo::new(n);
        let mut seen_offset = false;
        for (no, line) in lines {
            let mut toks = line.split_whitespace();
            let first = toks.next().unwrap_or_default();
            match first {
                "#" => {
                    toks.next();
                    let vm = VarMap {
                        num_flights: field(toks.next(), no, "flight count")?,
                        num_gates: field(toks.next(), no, "gate count")?,
                    };
                    if vm.len() != n {
                        return Err(err(no, "var map size does not match n"));
                    }
                    q.var_map = Some(vm);
                }
                "offset" => {
                    if seen_offset {
                        return Err(err(no, "duplicate offset"));
                    }
                    seen_offset = true;
                    q.offset = field(toks.next(), no, "offset")?;
                }
                _ => {
                    let j: usize = field(Some(first), no, "row index")?;
                    let k: usize = field(toks.next(), no, "column index")?;
                    let v: f64 = field(toks.next(), no, "value")?;
                    if j > k || k >= n {
                        return Err(err(no, format!("entry ({j}, {k}) not upper-triangular in n={n}")));
                    }
                    if q.coeffs.contains_key(&(j, k)) {
                        return Err(err(no, format!("duplicate entry ({j}, {k})")));
                    }
                    if v != 0.0 {
                        q.coeffs.insert((j, k), v);
                    }
                }
            }
            if toks.next().is_some() {
                return Err(err(no, "trailing tokens"));
            }
        }
        Ok(q)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_text())
    }
}

impl IsingModel {
    pub fn to_text(&self) -> String {
        let mut s = format!("n {}\n", self.h.len());
        for (i, h) in self.h.iter().enumerate() {
            if *h != 0.0 {
                let _ = writeln!(s, "h {i} {h}");
            }
        }
        for (&(a, b), v) in &self.j {
            let _ = writeln!(s, "J {a} {b} {v}");
        }
        let _ = writeln!(s, "offset {}", self.offset);
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text).filter(|(_, l)| !l.starts_with('#'));
        let n = header(&mut lines)?;
        let mut m = IsingModel::new(n);
        let mut seen_offset = false;
        for (no, line) in lines {
            let mut toks = line.split_whitespace();
            match toks.next().unwrap_or_default() {
                "h" => {
                    let i: usize = field(toks.next(), no, "spin index")?;
                    if i >= n {
                        return Err(err(no, format!("spin {i} out of range")));
                    }
                    m.h[i] = field(toks.next(), no, "field")?;
                }
                "J" => {
                    let a: usize = field(toks.next(), no, "spin index")?;
                    let b: usize = field(toks.next(), no, "spin index")?;
                    if a >= b || b >= n {
                        return Err(err(no, format!("coupling ({a}, {b}) not strictly upper-triangular")));
                    }
                    let v: f64 = field(toks.next(), no, "coupling")?;
                    if m.j.contains_key(&(a, b)) {
                        return Err(err(no, format!("duplicate coupling ({a}, {b})")));
                    }
                    if v != 0.0 {
                        m.j.insert((a, b), v);
                    }
                }
                "offset" => {
                    if seen_offset {
                        return Err(err(no, "duplicate offset"));
                    }
                    seen_offset = true;
                    m.offset = field(toks.next(), no, "offset")?;
                }
                other => return Err(err(no, format!("unknown record `{other}`"))),
            }
            if toks.next().is_some() {
                return Err(err(no, "trailing tokens"));
            }
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_text())
    }
}

/// True when the text holds Ising records rather than QUBO entries.
pub fn looks_like_ising(text: &str) -> bool {
    content_lines(text).any(|(_, l)| l.starts_with("h ") || l.starts_with("J "))
}
