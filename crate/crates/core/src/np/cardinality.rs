//! Cardinality constraints (sequential counter) and Hamming balls.

use super::cnf::{CnfFormula, Lit};
use crate::bits::BitString;

/// At most `k` of `lits` are true. Sequential-counter encoding: register
/// `r[i][j]` means "at least `j + 1` of the first `i + 1` literals are true".
pub fn at_most(f: &mut CnfFormula, lits: &[Lit], k: usize) {
    let n = lits.len();
    if k >= n {
        return;
    }
    if k == 0 {
        for &x in lits {
            f.add_clause([-x]);
        }
        return;
    }
    let regs: Vec<Vec<Lit>> = (0..n - 1).map(|_| f.new_vars(k)).collect();
    f.add_clause([-lits[0], regs[0][0]]);
    for j in 1..k {
        f.add_clause([-regs[0][j]]);
    }
    for i in 1..n - 1 {
        let x = lits[i];
        f.add_clause([-x, regs[i][0]]);
        f.add_clause([-regs[i - 1][0], regs[i][0]]);
        for j in 1..k {
            f.add_clause([-x, -regs[i - 1][j - 1], regs[i][j]]);
            f.add_clause([-regs[i - 1][j], regs[i][j]]);
        }
        f.add_clause([-x, -regs[i - 1][k - 1]]);
    }
    f.add_clause([-lits[n - 1], -regs[n - 2][k - 1]]);
}

/// At least `t` of `lits` are true, as "at most `n - t` are false".
pub fn at_least(f: &mut CnfFormula, lits: &[Lit], t: usize) {
    let n = lits.len();
    if t == 0 {
        return;
    }
    if t > n {
        // Unsatisfiable; spelled out without an empty clause.
        let v = f.new_var();
        f.add_clause([v]);
        f.add_clause([-v]);
        return;
    }
    let negated: Vec<Lit> = lits.iter().map(|&l| -l).collect();
    at_most(f, &negated, n - t);
}

/// Constrains `vars` to lie within Hamming distance `b` of `center`; returns
/// the flip indicators `f_i <-> (vars_i != center_i)`.
pub fn encode_hamming_ball(f: &mut CnfFormula, center: &BitString, b: usize, vars: &[Lit]) -> Vec<Lit> {
    assert_eq!(center.len(), vars.len());
    let flips = f.new_vars(vars.len());
    for (i, (&v, &fl)) in vars.iter().zip(&flips).enumerate() {
        // fl <-> v when the centre bit is 0, fl <-> ¬v when it is 1.
        let v = if center.get(i) { -v } else { v };
        f.add_clause([-fl, v]);
        f.add_clause([fl, -v]);
    }
    f.annotate("flip", flips.iter().map(|&l| l as u32));
    at_most(f, &flips, b);
    flips
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::np::solver::{brute_force, projected_model_count, solve, SolveResult, SolverLimits};

    fn binom_prefix(n: usize, k: usize) -> u64 {
        let mut c = 1u64;
        let mut sum = 0;
        for j in 0..=k.min(n) {
            sum += c;
            c = c * (n - j) as u64 / (j + 1) as u64;
        }
        sum
    }

    #[test]
    fn at_most_model_counts_are_binomial_prefix_sums() {
        for n in 1..=10usize {
            for k in 0..=n {
                let mut f = CnfFormula::new(n);
                let lits: Vec<Lit> = (1..=n as Lit).collect();
                at_most(&mut f, &lits, k);
                let count = projected_model_count(&f, &lits);
                assert_eq!(count, binom_prefix(n, k), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn at_least_model_counts() {
        for n in 1..=8usize {
            for t in 0..=n + 1 {
                let mut f = CnfFormula::new(n);
                let lits: Vec<Lit> = (1..=n as Lit).collect();
                at_least(&mut f, &lits, t);
                let want = if t > n { 0 } else { (1u64 << n) - if t == 0 { 0 } else { binom_prefix(n, t - 1) } };
                assert_eq!(projected_model_count(&f, &lits), want, "n={n} t={t}");
            }
        }
    }

    #[test]
    fn ball_of_radius_two_in_six_bits() {
        let center = BitString::parse_bits("101100").unwrap();
        let mut f = CnfFormula::new(6);
        let vars: Vec<Lit> = (1..=6).collect();
        encode_hamming_ball(&mut f, &center, 2, &vars);
        assert!(f.num_vars() <= 24);
        // Each x' determines the flips; counter registers may leave slack, so
        // count distinct projections.
        assert_eq!(projected_model_count(&f, &vars), 22);
        let full = brute_force(&f);
        assert!(full.count >= 22);
    }

    #[test]
    fn radius_zero_pins_the_centre() {
        let center = BitString::parse_bits("0110").unwrap();
        let mut f = CnfFormula::new(4);
        let vars: Vec<Lit> = (1..=4).collect();
        encode_hamming_ball(&mut f, &center, 0, &vars);
        match solve(&f, &SolverLimits::default()) {
            SolveResult::Sat(a) => assert_eq!(&a[..4], &[false, true, true, false]),
            other => panic!("{other:?}"),
        }
        assert_eq!(projected_model_count(&f, &vars), 1);
    }

    #[test]
    fn full_radius_is_vacuous() {
        for len in 1..=10usize {
            let center = BitString::zeros(len);
            let mut f = CnfFormula::new(len);
            let vars: Vec<Lit> = (1..=len as Lit).collect();
            encode_hamming_ball(&mut f, &center, len, &vars);
            assert_eq!(projected_model_count(&f, &vars), 1 << len);
        }
    }
}
