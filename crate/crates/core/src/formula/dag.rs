use std::collections::HashMap;

use super::Formula;
use crate::time::Interval;

pub type NodeId = usize;

/// One hash-consed node; children are ids of earlier nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Top,
    Bottom,
    Atom(String),
    Not(NodeId),
    Or(NodeId, NodeId),
    And(NodeId, NodeId),
    Until(NodeId, NodeId, Interval),
    Release(NodeId, NodeId, Interval),
}

/// Structurally distinct subformulas, each stored once. Children always
/// precede their parents, so ids are a topological order.
#[derive(Debug, Clone, Default)]
pub struct Dag {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
}

impl Dag {
    pub fn insert(&mut self, f: &Formula) -> NodeId {
        let node = match f {
            Formula::Top => Node::Top,
            Formula::Bottom => Node::Bottom,
            Formula::Atom(p) => Node::Atom(p.clone()),
            Formula::Not(a) => Node::Not(self.insert(a)),
            Formula::Or(a, b) => Node::Or(self.insert(a), self.insert(b)),
            Formula::And(a, b) => Node::And(self.insert(a), self.insert(b)),
            Formula::Until(a, b, i) => Node::Until(self.insert(a), self.insert(b), i.clone()),
            Formula::Release(a, b, i) => Node::Release(self.insert(a), self.insert(b), i.clone()),
        };
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        self.nodes.push(node.clone());
        self.index.insert(node, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}
