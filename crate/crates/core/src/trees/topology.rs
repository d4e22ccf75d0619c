use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::partitions::set_partitions;
use crate::algebra::{Leg, LegSet};
use crate::rules::{EdgeContext, EdgeVar};

/// Rooted subtree. Children of a vertex are ordered by their smallest leaf.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Leaf(Leg),
    Vertex { leaves: LegSet, children: Vec<Arc<Node>> },
}

impl Node {
    pub fn leaves(&self) -> LegSet {
        match self {
            Node::Leaf(l) => LegSet::single(*l),
            Node::Vertex { leaves, .. } => *leaves,
        }
    }

    fn encode(&self, out: &mut String) {
        match self {
            Node::Leaf(l) => out.push_str(&l.to_string()),
            Node::Vertex { children, .. } => {
                out.push('(');
                for (k, c) in children.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    c.encode(out);
                }
                out.push(')');
            }
        }
    }
}

/// Tree with labelled external legs. One leg (`0` for rooted trees, `n`
/// for unrooted ones) is the root; `top` is the internal vertex it
/// attaches to.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeTopology {
    context: EdgeContext,
    top: Arc<Node>,
}

/// An internal vertex seen from the evaluator: its adjacent edges, first
/// the edge towards the root, then the children in order.
#[derive(Clone, Debug)]
pub struct VertexView {
    pub adjacent: Vec<EdgeVar>,
}

impl VertexView {
    pub fn valence(&self) -> usize {
        self.adjacent.len()
    }
}

impl TreeTopology {
    pub fn context(&self) -> EdgeContext {
        self.context
    }

    pub fn top(&self) -> &Node {
        &self.top
    }

    pub fn root_leg(&self) -> Leg {
        match self.context {
            EdgeContext::Rooted { .. } => 0,
            EdgeContext::Unrooted { n } => n,
        }
    }

    /// Canonical string such as `0>((1,2),3)`: the root leg, then the
    /// nested children lists.
    pub fn encoding(&self) -> String {
        let mut out = format!("{}>", self.root_leg());
        self.top.encode(&mut out);
        out
    }

    /// Internal vertices in pre-order.
    pub fn vertices(&self) -> Vec<VertexView> {
        let mut out = Vec::new();
        self.collect(&self.top, &mut out);
        out
    }

    fn collect(&self, node: &Node, out: &mut Vec<VertexView>) {
        let Node::Vertex { leaves, children } = node else { return };
        let up = self.context.universe().difference(*leaves);
        let mut adjacent = vec![EdgeVar::new(up, self.context).expect("proper subset")];
        adjacent.extend(children.iter().map(|c| EdgeVar::new(c.leaves(), self.context).expect("proper subset")));
        out.push(VertexView { adjacent });
        for c in children {
            self.collect(c, out);
        }
    }

    /// Internal edges, each as seen from its lower endpoint's parent (far
    /// side = the lower subtree's leaves). The root edge is not included.
    pub fn internal_edges(&self) -> Vec<EdgeVar> {
        let mut out = Vec::new();
        fn rec(node: &Node, ctx: EdgeContext, top: bool, out: &mut Vec<EdgeVar>) {
            if let Node::Vertex { leaves, children } = node {
                if !top {
                    out.push(EdgeVar::new(*leaves, ctx).expect("proper subset"));
                }
                for c in children {
                    rec(c, ctx, false, out);
                }
            }
        }
        rec(&self.top, self.context, true, &mut out);
        out
    }

    /// The edge joining the root leg to `top`.
    pub fn root_edge(&self) -> EdgeVar {
        EdgeVar::new(self.top.leaves(), self.context).expect("proper subset")
    }

    /// Number of internal vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices().len()
    }
}

impl fmt::Display for TreeTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encoding())
    }
}

type Memo = HashMap<LegSet, Arc<Vec<Arc<Node>>>>;

fn subtrees(set: LegSet, memo: &mut Memo) -> Arc<Vec<Arc<Node>>> {
    if let Some(v) = memo.get(&set) {
        return v.clone();
    }
    let out = if set.len() == 1 {
        vec![Arc::new(Node::Leaf(set.min().expect("non-empty")))]
    } else {
        let mut out = Vec::new();
        for partition in set_partitions(set).into_iter().filter(|p| p.len() >= 2) {
            let choices: Vec<_> = partition.iter().map(|b| subtrees(*b, memo)).collect();
            cartesian(&choices, &mut Vec::new(), &mut |children| {
                out.push(Arc::new(Node::Vertex { leaves: set, children: children.to_vec() }));
            });
        }
        out
    };
    let out = Arc::new(out);
    memo.insert(set, out.clone());
    out
}

/// Calls `f` on every selection, the last position varying fastest.
fn cartesian(choices: &[Arc<Vec<Arc<Node>>>], picked: &mut Vec<Arc<Node>>, f: &mut impl FnMut(&[Arc<Node>])) {
    let k = picked.len();
    if k == choices.len() {
        f(picked);
        return;
    }
    for c in choices[k].iter() {
        picked.push(c.clone());
        cartesian(choices, picked, f);
        picked.pop();
    }
}

/// All trees with internal valence >= 3 on legs `1..=n` plus a root: leg 0
/// when `rooted`, otherwise leg `n` doubles as the root and the remaining
/// legs `1..n-1` are the leaves. Trees sharing the partition under the top
/// vertex come out contiguously.
pub fn enumerate_trees(n: Leg, rooted: bool) -> Vec<TreeTopology> {
    let (context, leaves) = if rooted {
        (EdgeContext::Rooted { n }, LegSet::range(1, n))
    } else {
        (EdgeContext::Unrooted { n }, LegSet::range(1, n.saturating_sub(1)))
    };
    if leaves.len() < 2 {
        return Vec::new();
    }
    let mut memo = Memo::new();
    subtrees(leaves, &mut memo).iter().map(|top| TreeTopology { context, top: top.clone() }).collect()
}

/// Splits an enumeration into maximal runs sharing the top-vertex
/// partition.
pub fn top_partition_groups(trees: &[TreeTopology]) -> Vec<&[TreeTopology]> {
    let key = |t: &TreeTopology| match t.top() {
        Node::Vertex { children, .. } => children.iter().map(|c| c.leaves()).collect::<Vec<_>>(),
        Node::Leaf(_) => Vec::new(),
    };
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=trees.len() {
        if i == trees.len() || key(&trees[i]) != key(&trees[start]) {
            out.push(&trees[start..i]);
            start = i;
        }
    }
    out
}
