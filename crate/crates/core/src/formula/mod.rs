//! Formula syntax: the stored AST, parsing and printing, rewrites, and
//! fragment classification.

mod classify;
mod dag;
mod parse;
mod print;
pub mod random;
mod transform;

pub use classify::{classify, normal_form_type, FragmentReport, NormalFormReport, NormalFormTag};
pub use dag::{Dag, Node, NodeId};
pub use parse::{parse, ParseError};
pub use transform::{nnf, to_old};

use crate::time::Interval;

/// Core formula tree. `F`, `G` and `N` are expanded by the parser and never
/// stored; decoration intervals lie in `[0, inf)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(String),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Until(Box<Formula>, Box<Formula>, Interval),
    Release(Box<Formula>, Box<Formula>, Interval),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn until(a: Formula, b: Formula, i: Interval) -> Formula {
        Formula::Until(Box::new(a), Box::new(b), i)
    }

    pub fn release(a: Formula, b: Formula, i: Interval) -> Formula {
        Formula::Release(Box::new(a), Box::new(b), i)
    }

    /// `F_i f`, stored as `true U_i f`.
    pub fn eventually(i: Interval, f: Formula) -> Formula {
        Formula::until(Formula::Top, f, i)
    }

    /// `G_i f`, stored as `false R_i f`.
    pub fn always(i: Interval, f: Formula) -> Formula {
        Formula::release(Formula::Bottom, f, i)
    }

    /// `N f`, stored as `f R_(0,inf) f`.
    pub fn next(f: Formula) -> Formula {
        Formula::release(f.clone(), f, Interval::positive())
    }

    /// Number of nodes of the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Operator nesting depth; leaves have depth 0.
    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::Not(a) => vec![a],
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Until(a, b, _) | Formula::Release(a, b, _) => {
                vec![a, b]
            }
        }
    }

    /// Decoration intervals in pre-order, one entry per occurrence.
    pub fn intervals(&self) -> Vec<&Interval> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Until(_, _, i) | Formula::Release(_, _, i) = f {
                out.push(i);
            }
        });
        out
    }

    /// Visits every node in pre-order.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Formula)) {
        visit(self);
        for c in self.children() {
            c.walk(visit);
        }
    }

    /// Negation occurs only directly above atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Not(a) => matches!(**a, Formula::Atom(_)),
            _ => self.children().iter().all(|c| c.is_nnf()),
        }
    }

    pub fn is_temporal(&self) -> bool {
        matches!(self, Formula::Until(..) | Formula::Release(..))
    }

    /// No temporal operator anywhere.
    pub fn is_propositional(&self) -> bool {
        !self.is_temporal() && self.children().iter().all(|c| c.is_propositional())
    }

    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p) = f {
                out.push(p.as_str());
            }
        });
        out.sort();
        out.dedup();
        out
    }
}

pub fn subformula_dag_size(f: &Formula) -> usize {
    let mut dag = Dag::default();
    dag.insert(f);
    dag.len()
}
