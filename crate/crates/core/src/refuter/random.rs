//! Small random canonical formulas for testing.

use rand::Rng;

use super::{CanonicalFormula, Clause, LinearConstraint, Polyhedron, Rel, SignalAtom};
use crate::formula::parse;
use crate::time::rat;

const PSI: [&str; 8] = ["p", "!p", "q", "!q", "p & q", "p | !q", "!p & !q", "true"];
const RELS: [Rel; 4] = [Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge];

fn constraint<R: Rng>(rng: &mut R) -> LinearConstraint {
    let a1 = rng.gen_range(-2..=2);
    let a2 = if a1 == 0 { [-1, 1][rng.gen_range(0..2)] } else { rng.gen_range(-2..=2) };
    LinearConstraint::new(rat(a1, 1), rat(a2, 1), RELS[rng.gen_range(0..4)], rat(rng.gen_range(-4..=8), 2))
}

fn atom<R: Rng>(rng: &mut R, var: u8) -> SignalAtom {
    let psi = parse(PSI[rng.gen_range(0..PSI.len())]).expect("fixed formulas parse");
    SignalAtom::new(var, psi).expect("fixed formulas are propositional")
}

fn clause<R: Rng>(rng: &mut R) -> Clause {
    let domain = Polyhedron::new((0..rng.gen_range(0..=3)).map(|_| constraint(rng)).collect());
    let mut signal = Vec::new();
    for var in [1, 2] {
        if rng.gen_bool(0.6) {
            signal.push(atom(rng, var));
        }
    }
    Clause::new(domain, signal).expect("one atom per variable")
}

/// Up to two blocks of up to two disjuncts of up to three clauses.
pub fn random_canonical<R: Rng>(rng: &mut R) -> CanonicalFormula {
    let blocks = (0..rng.gen_range(1..=2))
        .map(|_| (0..rng.gen_range(1..=2)).map(|_| (0..rng.gen_range(1..=3)).map(|_| clause(rng)).collect()).collect())
        .collect();
    CanonicalFormula { blocks }
}
