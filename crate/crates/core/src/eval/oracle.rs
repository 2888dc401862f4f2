//! Pointwise satisfaction straight from the quantified definitions.
//!
//! Every subformula is constant between consecutive points of its critical
//! grid, so each quantifier ranges over finitely many atoms: grid points and
//! the open cells between them. This module shares no code with the
//! truth-set engine.

use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{Signed, Zero};

use super::Semantics;
use crate::formula::{Dag, Formula, Node, NodeId};
use crate::signal::Signal;
use crate::time::{int, midpoint, Interval, Rational};

pub struct Oracle<'a> {
    signal: &'a Signal,
    sem: Semantics,
    dag: Dag,
    grids: HashMap<NodeId, Rc<Vec<Rational>>>,
    memo: HashMap<(NodeId, Rational), bool>,
}

/// One point or open cell of the local partition at the evaluation time.
struct Atom {
    is_cell: bool,
    in_j: bool,
    in_closed_j: bool,
    v1: bool,
    v2: bool,
}

impl<'a> Oracle<'a> {
    pub fn new(signal: &'a Signal, sem: Semantics) -> Self {
        Oracle { signal, sem, dag: Dag::default(), grids: HashMap::new(), memo: HashMap::new() }
    }

    pub fn sat_at(&mut self, phi: &Formula, t: &Rational) -> bool {
        let id = self.dag.insert(phi);
        self.holds(id, t)
    }

    fn grid(&mut self, id: NodeId) -> Rc<Vec<Rational>> {
        if let Some(g) = self.grids.get(&id) {
            return g.clone();
        }
        let mut points = match self.dag.node(id).clone() {
            Node::Top | Node::Bottom => vec![Rational::zero()],
            Node::Atom(_) => self.signal.breakpoints(),
            Node::Not(a) => self.grid(a).to_vec(),
            Node::Or(a, b) | Node::And(a, b) => {
                let mut v = self.grid(a).to_vec();
                v.extend(self.grid(b).iter().cloned());
                v
            }
            Node::Until(a, b, i) | Node::Release(a, b, i) => {
                let offsets: Vec<Rational> =
                    [Some(Rational::zero()), i.lo().finite().cloned(), i.hi().finite().cloned()]
                        .into_iter()
                        .flatten()
                        .collect();
                let mut v = vec![Rational::zero()];
                let (ga, gb) = (self.grid(a), self.grid(b));
                for x in ga.iter().chain(gb.iter()) {
                    for e in &offsets {
                        let d = x - e;
                        if !d.is_negative() {
                            v.push(d);
                        }
                    }
                }
                v
            }
        };
        points.sort();
        points.dedup();
        let g = Rc::new(points);
        self.grids.insert(id, g.clone());
        g
    }

    /// A fixed sample of the grid atom containing `x`.
    fn representative(&mut self, id: NodeId, x: &Rational) -> Rational {
        if x.is_negative() {
            return x.clone();
        }
        let g = self.grid(id);
        match g.binary_search(x) {
            Ok(_) => x.clone(),
            Err(k) if k == g.len() => g[k - 1].clone() + int(1),
            Err(k) => midpoint(&g[k - 1], &g[k]),
        }
    }

    fn child(&mut self, id: NodeId, x: &Rational) -> bool {
        let r = self.representative(id, x);
        self.holds(id, &r)
    }

    fn holds(&mut self, id: NodeId, t: &Rational) -> bool {
        if let Some(&v) = self.memo.get(&(id, t.clone())) {
            return v;
        }
        let v = match self.dag.node(id).clone() {
            Node::Top => true,
            Node::Bottom => false,
            Node::Atom(p) => !t.is_negative() && self.signal.value_at(t).map(|s| s.contains(&p)).unwrap_or(false),
            Node::Not(a) => !self.child(a, t),
            Node::Or(a, b) => self.child(a, t) || self.child(b, t),
            Node::And(a, b) => self.child(a, t) && self.child(b, t),
            Node::Until(a, b, i) => {
                let atoms = self.atoms(a, b, &i, t);
                until_holds(&atoms)
            }
            Node::Release(a, b, i) => {
                let atoms = self.atoms(a, b, &i, t);
                release_holds(&atoms, self.sem)
            }
        };
        self.memo.insert((id, t.clone()), v);
        v
    }

    /// Partition of `[t, inf)` fine enough that both children and membership
    /// in `t + i` are constant on each atom.
    fn atoms(&mut self, a: NodeId, b: NodeId, i: &Interval, t: &Rational) -> Vec<Atom> {
        let j = i.shift(t);
        let closed_j = j.close_left();
        let mut points: Vec<Rational> = vec![t.clone()];
        for e in [i.lo().finite(), i.hi().finite()].into_iter().flatten() {
            points.push(t + e);
        }
        let (ga, gb) = (self.grid(a), self.grid(b));
        points.extend(ga.iter().chain(gb.iter()).filter(|x| *x >= t).cloned());
        points.sort();
        points.dedup();

        let mut atoms = Vec::with_capacity(2 * points.len());
        for (k, p) in points.iter().enumerate() {
            let cell = match points.get(k + 1) {
                Some(q) => midpoint(p, q),
                None => p + int(1),
            };
            for (x, is_cell) in [(p.clone(), false), (cell, true)] {
                atoms.push(Atom {
                    is_cell,
                    in_j: j.contains(&x),
                    in_closed_j: closed_j.contains(&x),
                    v1: self.child(a, &x),
                    v2: self.child(b, &x),
                });
            }
        }
        atoms
    }
}

/// `∃ t1 ∈ I: phi2 at t + t1 and phi1 on (t, t + t1)`. Atom 0 is `t` itself.
fn until_holds(atoms: &[Atom]) -> bool {
    atoms.iter().enumerate().any(|(k, w)| {
        w.in_j && w.v2 && atoms[1..k.max(1)].iter().all(|m| m.v1) && (!w.is_cell || w.v1)
    })
}

fn release_holds(atoms: &[Atom], sem: Semantics) -> bool {
    // ∀ t1 ∈ I: phi2 at t + t1
    let always = atoms.iter().all(|m| !m.in_j || m.v2);
    // ∃ t1 > 0: phi1 at t + t1 and phi2 on [t, t + t1] ∩ (t + I)
    let trigger = (1..atoms.len()).any(|k| atoms[k].v1 && atoms[..=k].iter().all(|m| !m.in_j || m.v2));
    if always || trigger {
        return true;
    }
    if sem == Semantics::Old {
        return false;
    }
    // ∃ t1 ∈ closeL(I), t2 ∈ I, t1 < t2: phi2 on I up to t1, phi1 on (t1, t2]
    for k1 in 0..atoms.len() {
        let x1 = &atoms[k1];
        if !x1.in_closed_j || !atoms[..k1].iter().all(|m| !m.in_j || m.v2) {
            continue;
        }
        if x1.in_j && !x1.v2 {
            continue;
        }
        if x1.is_cell && !x1.v1 {
            continue;
        }
        let start = if x1.is_cell { k1 } else { k1 + 1 };
        for k2 in start..atoms.len() {
            let x2 = &atoms[k2];
            if !x2.v1 {
                break;
            }
            if x2.in_j {
                return true;
            }
        }
    }
    false
}

/// Satisfaction of `phi` by the suffix of `f` at time `t`.
pub fn oracle_sat(f: &Signal, phi: &Formula, t: &Rational, sem: Semantics) -> bool {
    Oracle::new(f, sem).sat_at(phi, t)
}
