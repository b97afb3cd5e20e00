//! Dendrograms (the branch nodes of the tree of ideal balls), points of the
//! tree, canonical codes, and isometry groups.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::rat::Rat;
use crate::ultracore::UltraSpace;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DendroError {
    /// Leaves sit at height zero and have nothing below them.
    #[error("node {0} is a leaf and has no downward germs")]
    LeafHasNoDownGerms(usize),
    /// The node id does not belong to this dendrogram.
    #[error("unknown node {0}")]
    UnknownNode(usize),
    /// Tree points live at non-negative heights.
    #[error("height {0} is negative")]
    NegativeHeight(Rat),
    /// A point index is out of range.
    #[error("point index {0} is out of range")]
    IndexOutOfRange(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DendroNode {
    pub height: Rat,
    /// Point indices under this node, ascending.
    pub members: Vec<usize>,
    /// Children ordered by their least member.
    pub children: Vec<NodeId>,
    pub parent: Option<NodeId>,
}

impl DendroNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A downward germ at a branch node, identified by the child it points to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Germ {
    pub vertex: NodeId,
    pub child: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dendrogram {
    nodes: Vec<DendroNode>,
    root: NodeId,
    leaf_of: Vec<NodeId>,
}

impl Dendrogram {
    pub fn build(space: &UltraSpace) -> Dendrogram {
        let mut d = Dendrogram { nodes: Vec::new(), root: NodeId(0), leaf_of: vec![NodeId(0); space.len()] };
        let all: Vec<usize> = (0..space.len()).collect();
        d.root = d.build_block(space, all, None);
        d
    }

    fn build_block(&mut self, space: &UltraSpace, members: Vec<usize>, parent: Option<NodeId>) -> NodeId {
        let id = NodeId(self.nodes.len());
        let height = members
            .iter()
            .flat_map(|&i| members.iter().map(move |&j| (i, j)))
            .map(|(i, j)| space.d(i, j))
            .max()
            .unwrap_or(Rat::ZERO);
        self.nodes.push(DendroNode { height, members: members.clone(), children: Vec::new(), parent });
        if members.len() == 1 {
            self.leaf_of[members[0]] = id;
            return id;
        }
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &i in &members {
            match blocks.iter_mut().find(|b| space.d(b[0], i) < height) {
                Some(b) => b.push(i),
                None => blocks.push(vec![i]),
            }
        }
        let children: Vec<NodeId> =
            blocks.into_iter().map(|b| self.build_block(space, b, Some(id))).collect();
        self.nodes[id.0].children = children;
        id
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DendroNode {
        &self.nodes[id.0]
    }

    pub fn get(&self, id: NodeId) -> Result<&DendroNode, DendroError> {
        self.nodes.get(id.0).ok_or(DendroError::UnknownNode(id.0))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn leaf(&self, x: usize) -> NodeId {
        self.leaf_of[x]
    }

    /// Edges as `(child, parent)` pairs in node order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.ids().filter_map(|c| self.node(c).parent.map(|p| (c, p))).collect()
    }

    /// Branch nodes (non-leaves) in node order.
    pub fn branch_nodes(&self) -> Vec<NodeId> {
        self.ids().filter(|&v| !self.node(v).is_leaf()).collect()
    }

    /// The tree point represented by a node.
    pub fn point_of(&self, id: NodeId) -> TreePoint {
        let n = self.node(id);
        TreePoint { base: n.members[0], height: n.height }
    }

    pub fn germs_down(&self, v: NodeId) -> Result<Vec<Germ>, DendroError> {
        let node = self.get(v)?;
        if node.is_leaf() {
            return Err(DendroError::LeafHasNoDownGerms(v.0));
        }
        Ok(node.children.iter().map(|&child| Germ { vertex: v, child }).collect())
    }

    /// Canonical code of the subtree under `v`, leaves decorated by `tag`.
    pub fn code_with(&self, v: NodeId, tag: &dyn Fn(usize) -> String) -> CanonCode {
        let node = self.node(v);
        if node.is_leaf() {
            return CanonCode { height: node.height, tag: tag(node.members[0]), children: Vec::new() };
        }
        let mut children: Vec<CanonCode> =
            node.children.iter().map(|&c| self.code_with(c, tag)).collect();
        children.sort();
        CanonCode { height: node.height, tag: String::new(), children }
    }

    pub fn canon_code(&self) -> CanonCode {
        self.code_with(self.root, &|_| String::new())
    }

    pub fn to_json(&self, space: &UltraSpace) -> Value {
        self.node_json(space, self.root)
    }

    fn node_json(&self, space: &UltraSpace, v: NodeId) -> Value {
        let n = self.node(v);
        json!({
            "height": n.height,
            "members": n.members.iter().map(|&i| space.labels[i].clone()).collect::<Vec<_>>(),
            "children": n.children.iter().map(|&c| self.node_json(space, c)).collect::<Vec<_>>(),
        })
    }

    /// Indented text rendering, one node per line.
    pub fn to_text(&self, space: &UltraSpace) -> String {
        let mut out = String::new();
        self.node_text(space, self.root, 0, &mut out);
        out
    }

    fn node_text(&self, space: &UltraSpace, v: NodeId, depth: usize, out: &mut String) {
        let n = self.node(v);
        let names: Vec<&str> = n.members.iter().map(|&i| space.labels[i].as_str()).collect();
        out.push_str(&format!("{}{} {{{}}}\n", "  ".repeat(depth), n.height, names.join(",")));
        for &c in &n.children {
            self.node_text(space, c, depth + 1, out);
        }
    }
}

/// Isomorphism-invariant code of a rooted dendrogram: height, leaf tag, and
/// the sorted codes of the children.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonCode {
    pub height: Rat,
    pub tag: String,
    pub children: Vec<CanonCode>,
}

impl fmt::Display for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            if self.tag.is_empty() {
                return write!(f, "*");
            }
            return write!(f, "<{}>", self.tag);
        }
        write!(f, "{}(", self.height)?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub fn canonical_code(space: &UltraSpace) -> CanonCode {
    Dendrogram::build(space).canon_code()
}

pub fn are_isometric(a: &UltraSpace, b: &UltraSpace) -> bool {
    a.len() == b.len() && canonical_code(a) == canonical_code(b)
}

/// A point of the tree of ideal balls: the ball of radius `height` around
/// `base`. The base is normalised to the least index in that ball, so the
/// derived equality is equality of tree points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreePoint {
    pub height: Rat,
    pub base: usize,
}

impl TreePoint {
    pub fn new(space: &UltraSpace, base: usize, height: Rat) -> Result<TreePoint, DendroError> {
        if base >= space.len() {
            return Err(DendroError::IndexOutOfRange(base));
        }
        if height.is_negative() {
            return Err(DendroError::NegativeHeight(height));
        }
        Ok(TreePoint::normalized(space, base, height))
    }

    pub(crate) fn normalized(space: &UltraSpace, base: usize, height: Rat) -> TreePoint {
        let least = (0..space.len()).find(|&y| space.d(base, y) <= height).unwrap_or(base);
        TreePoint { height, base: least }
    }

    /// True when `self` lies on the ascending path of `other` or equals it.
    pub fn is_above(&self, other: &TreePoint, space: &UltraSpace) -> bool {
        self.height >= other.height && space.d(self.base, other.base) <= self.height
    }

    pub fn comparable(&self, other: &TreePoint, space: &UltraSpace) -> bool {
        self.is_above(other, space) || other.is_above(self, space)
    }

    /// Moves up the ascending path to `height` (which must not be lower).
    pub fn lift(&self, space: &UltraSpace, height: Rat) -> TreePoint {
        debug_assert!(height >= self.height);
        TreePoint::normalized(space, self.base, height)
    }
}

/// Lowest common point of the two ascending paths.
pub fn highest_point(space: &UltraSpace, p: &TreePoint, q: &TreePoint) -> TreePoint {
    let h = p.height.max(q.height).max(space.d(p.base, q.base));
    TreePoint::normalized(space, p.base, h)
}

/// Path length in the tree, where an edge between heights `a < b` has length `(b - a)/2`.
pub fn tree_distance(space: &UltraSpace, p: &TreePoint, q: &TreePoint) -> Rat {
    let join = highest_point(space, p, q).height;
    ((join - p.height) + (join - q.height)).half()
}

/// All isometries of the space as permutations `perm[x] = image of x`,
/// sorted lexicographically (the identity comes first).
pub fn isometry_group(space: &UltraSpace) -> Vec<Vec<usize>> {
    let d = Dendrogram::build(space);
    let codes: Vec<CanonCode> = d.ids().map(|v| d.code_with(v, &|_| String::new())).collect();
    let maps = subtree_isos(&d, &codes, d.root(), d.root());
    let mut perms: Vec<Vec<usize>> = maps
        .into_iter()
        .map(|pairs| {
            let mut perm = vec![0; space.len()];
            for (a, b) in pairs {
                perm[a] = b;
            }
            perm
        })
        .collect();
    perms.sort();
    perms
}

/// Every code-preserving bijection between the subtrees under `a` and `b`,
/// expressed on their leaves.
fn subtree_isos(d: &Dendrogram, codes: &[CanonCode], a: NodeId, b: NodeId) -> Vec<Vec<(usize, usize)>> {
    let na = d.node(a);
    let nb = d.node(b);
    if na.is_leaf() {
        return vec![vec![(na.members[0], nb.members[0])]];
    }
    let mut classes: BTreeMap<&CanonCode, (Vec<NodeId>, Vec<NodeId>)> = BTreeMap::new();
    for &c in &na.children {
        classes.entry(&codes[c.0]).or_default().0.push(c);
    }
    for &c in &nb.children {
        classes.entry(&codes[c.0]).or_default().1.push(c);
    }
    let mut acc: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for (left, right) in classes.values() {
        let mut class_maps: Vec<Vec<(usize, usize)>> = Vec::new();
        for order in permutations(right.len()) {
            let mut partial: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
            for (i, &l) in left.iter().enumerate() {
                let sub = subtree_isos(d, codes, l, right[order[i]]);
                partial = combine(&partial, &sub);
            }
            class_maps.extend(partial);
        }
        acc = combine(&acc, &class_maps);
    }
    acc
}

fn combine(a: &[Vec<(usize, usize)>], b: &[Vec<(usize, usize)>]) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            let mut m = x.clone();
            m.extend_from_slice(y);
            out.push(m);
        }
    }
    out
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_122() -> UltraSpace {
        UltraSpace::from_ints(&[&[0, 1, 2], &[1, 0, 2], &[2, 2, 0]]).unwrap()
    }

    #[test]
    fn triangle_dendrogram_shape() {
        let x = triangle_122();
        let d = Dendrogram::build(&x);
        let root = d.node(d.root());
        assert_eq!(root.height, Rat::int(2));
        assert_eq!(root.children.len(), 2);
        let ab = d.node(root.children[0]);
        assert_eq!(ab.height, Rat::ONE);
        assert_eq!(ab.members, vec![0, 1]);
        assert!(d.node(root.children[1]).is_leaf());
        assert_eq!(d.to_text(&x), "2 {a,b,c}\n  1 {a,b}\n    0 {a}\n    0 {b}\n  0 {c}\n");
    }

    #[test]
    fn single_point_root_is_leaf() {
        let x = UltraSpace::single_point("a");
        let d = Dendrogram::build(&x);
        assert_eq!(d.len(), 1);
        assert_eq!(d.node(d.root()).height, Rat::ZERO);
        assert_eq!(d.germs_down(d.root()), Err(DendroError::LeafHasNoDownGerms(0)));
    }

    #[test]
    fn tree_points_and_distances() {
        let x = triangle_122();
        let a0 = TreePoint::new(&x, 0, Rat::ZERO).unwrap();
        let c0 = TreePoint::new(&x, 2, Rat::ZERO).unwrap();
        let a2 = TreePoint::new(&x, 0, Rat::int(2)).unwrap();
        assert_eq!(tree_distance(&x, &a0, &c0), Rat::int(2));
        assert_eq!(tree_distance(&x, &a0, &a2), Rat::ONE);
        assert_eq!(highest_point(&x, &a0, &c0), a2);
        assert_eq!(TreePoint::new(&x, 1, Rat::ONE).unwrap(), TreePoint::new(&x, 0, Rat::ONE).unwrap());
        assert_ne!(TreePoint::new(&x, 2, Rat::ONE).unwrap(), TreePoint::new(&x, 0, Rat::ONE).unwrap());
    }

    #[test]
    fn germs_of_root() {
        let x = triangle_122();
        let d = Dendrogram::build(&x);
        assert_eq!(d.germs_down(d.root()).unwrap().len(), 2);
    }

    #[test]
    fn canonical_code_string() {
        assert_eq!(canonical_code(&triangle_122()).to_string(), "2(*,1(*,*))");
    }

    #[test]
    fn isometry_groups_of_small_spaces() {
        assert_eq!(isometry_group(&triangle_122()), vec![vec![0, 1, 2], vec![1, 0, 2]]);
        let eq = UltraSpace::from_ints(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]).unwrap();
        assert_eq!(isometry_group(&eq).len(), 6);
    }

    #[test]
    fn permutation_listing() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0), vec![Vec::<usize>::new()]);
    }
}
