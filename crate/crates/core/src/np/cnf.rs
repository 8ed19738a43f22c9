//! CNF formulas and their DIMACS form.
//!
//! Variables are numbered from 1; a literal is a non-zero `i32` whose sign is
//! its polarity. Annotations name groups of variables ("instance", "flip",
//! "selector", ...) and travel through DIMACS as `c role <name> <vars...>`
//! comment lines ahead of the header.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

pub type Lit = i32;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    annotations: BTreeMap<String, Vec<u32>>,
}

#[inline]
pub fn var_of(l: Lit) -> usize {
    l.unsigned_abs() as usize
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            ..Default::default()
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        self.num_vars as Lit
    }

    pub fn new_vars(&mut self, n: usize) -> Vec<Lit> {
        (0..n).map(|_| self.new_var()).collect()
    }

    /// Adds a clause. Panics on an empty clause or an undeclared variable:
    /// both are construction bugs, never data errors.
    pub fn add_clause(&mut self, clause: impl Into<Vec<Lit>>) {
        let clause = clause.into();
        assert!(!clause.is_empty(), "empty clause");
        assert!(
            clause.iter().all(|&l| l != 0 && var_of(l) <= self.num_vars),
            "clause {clause:?} references an undeclared variable"
        );
        self.clauses.push(clause);
    }

    pub fn annotate(&mut self, role: &str, vars: impl IntoIterator<Item = u32>) {
        assert!(
            !role.is_empty() && !role.contains(char::is_whitespace),
            "annotation roles are single words"
        );
        self.annotations.entry(role.to_string()).or_default().extend(vars);
    }

    pub fn annotation(&self, role: &str) -> Option<&[u32]> {
        self.annotations.get(role).map(Vec::as_slice)
    }

    pub fn annotations(&self) -> &BTreeMap<String, Vec<u32>> {
        &self.annotations
    }

    /// Copies `other`'s clauses and annotations into fresh variables; returns
    /// the offset added to each of its variable numbers.
    pub fn append(&mut self, other: &CnfFormula) -> usize {
        self.append_guarded(other, None)
    }

    /// Like [`append`](Self::append), with `¬guard` added to every copied clause.
    pub fn append_guarded(&mut self, other: &CnfFormula, guard: Option<Lit>) -> usize {
        let offset = self.num_vars;
        self.num_vars += other.num_vars;
        for c in &other.clauses {
            let mut shifted: Vec<Lit> = Vec::with_capacity(c.len() + 1);
            if let Some(g) = guard {
                shifted.push(-g);
            }
            shifted.extend(c.iter().map(|&l| l.signum() * (var_of(l) + offset) as Lit));
            self.clauses.push(shifted);
        }
        for (role, vars) in &other.annotations {
            self.annotate(role, vars.iter().map(|&v| v + offset as u32));
        }
        offset
    }

    /// Truth value under `assignment[v - 1]`.
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| assignment[var_of(l) - 1] == (l > 0)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = String::new();
        for (role, vars) in &self.annotations {
            s.push_str("c role ");
            s.push_str(role);
            for v in vars {
                write!(s, " {v}").unwrap();
            }
            s.push('\n');
        }
        writeln!(s, "p cnf {} {}", self.num_vars, self.clauses.len()).unwrap();
        for c in &self.clauses {
            for l in c {
                write!(s, "{l} ").unwrap();
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn write_dimacs<W: std::io::Write>(&self, mut sink: W) -> std::io::Result<()> {
        sink.write_all(self.to_dimacs().as_bytes())
    }

    pub fn read_dimacs(source: &str) -> Result<CnfFormula> {
        let bad = |line: usize, msg: &str| Error::Format(format!("DIMACS line {line}: {msg}"));
        let mut annotations: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (i, line) in source.lines().enumerate() {
            let n = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('c') {
                let mut words = rest.split_whitespace();
                if words.next() == Some("role") {
                    let role = words.next().ok_or_else(|| bad(n, "annotation without a role name"))?;
                    let vars = words
                        .map(|w| w.parse::<u32>().map_err(|_| bad(n, "bad annotation variable")))
                        .collect::<Result<Vec<_>>>()?;
                    annotations.entry(role.to_string()).or_default().extend(vars);
                }
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(bad(n, "second header"));
                }
                let w: Vec<&str> = rest.split_whitespace().collect();
                if w.len() != 3 || w[0] != "cnf" {
                    return Err(bad(n, "expected `p cnf <vars> <clauses>`"));
                }
                let v = w[1].parse().map_err(|_| bad(n, "bad variable count"))?;
                let c = w[2].parse().map_err(|_| bad(n, "bad clause count"))?;
                header = Some((v, c));
                continue;
            }
            let (num_vars, _) = header.ok_or_else(|| bad(n, "clause before header"))?;
            for tok in line.split_whitespace() {
                let l: Lit = tok.parse().map_err(|_| bad(n, "bad literal"))?;
                if l == 0 {
                    if current.is_empty() {
                        return Err(bad(n, "empty clause"));
                    }
                    clauses.push(std::mem::take(&mut current));
                } else if var_of(l) > num_vars {
                    return Err(bad(n, "literal exceeds the declared variable count"));
                } else {
                    current.push(l);
                }
            }
        }
        let (num_vars, num_clauses) = header.ok_or_else(|| Error::Format("DIMACS header missing".into()))?;
        if !current.is_empty() {
            return Err(Error::Format("unterminated final clause".into()));
        }
        if clauses.len() != num_clauses {
            return Err(Error::Format(format!(
                "header declares {num_clauses} clauses but {} were read",
                clauses.len()
            )));
        }
        if annotations.values().flatten().any(|&v| v as usize > num_vars) {
            return Err(Error::Format("annotation names an undeclared variable".into()));
        }
        Ok(CnfFormula {
            num_vars,
            clauses,
            annotations,
        })
    }
}
