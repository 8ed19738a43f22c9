//! Gate-by-gate CNF encoding of circuits.
//!
//! Wire `w` becomes variable `w + 1`, so the inputs keep their indices and
//! each gate gets one auxiliary variable. The encoding only defines the wires;
//! callers constrain the outputs.

use super::circuit::{BoolCircuit, Gate};
use super::cnf::{CnfFormula, Lit};

pub fn wire_var(w: usize) -> Lit {
    (w + 1) as Lit
}

pub fn tseitin(c: &BoolCircuit) -> CnfFormula {
    let mut f = CnfFormula::new(c.wire_count());
    for (g, gate) in c.gates().iter().enumerate() {
        let o = wire_var(c.inputs() + g);
        match *gate {
            Gate::And(a, b) => {
                let (a, b) = (wire_var(a), wire_var(b));
                f.add_clause([-o, a]);
                f.add_clause([-o, b]);
                f.add_clause([o, -a, -b]);
            }
            Gate::Or(a, b) => {
                let (a, b) = (wire_var(a), wire_var(b));
                f.add_clause([o, -a]);
                f.add_clause([o, -b]);
                f.add_clause([-o, a, b]);
            }
            Gate::Not(a) => {
                let a = wire_var(a);
                f.add_clause([o, a]);
                f.add_clause([-o, -a]);
            }
            Gate::Xor(a, b) => {
                let (a, b) = (wire_var(a), wire_var(b));
                f.add_clause([-o, a, b]);
                f.add_clause([-o, -a, -b]);
                f.add_clause([o, -a, b]);
                f.add_clause([o, a, -b]);
            }
        }
    }
    f.annotate("input", (1..=c.inputs()).map(|v| v as u32));
    f.annotate("output", c.outputs().iter().map(|&w| wire_var(w) as u32));
    f
}
