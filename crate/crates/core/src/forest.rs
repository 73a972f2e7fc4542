//! Leveled trees and forests.
//!
//! A forest of dimension `n` has node levels `0..=n`; every node below the top
//! level has exactly one parent one level up. A tree is a forest whose top
//! level is a single root. Children are unordered: iteration order is always
//! by ascending [`NodeId`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque node identifier, unique within one structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ForestError {
    #[error("node {0} appears on more than one level")]
    DuplicateNode(NodeId),
    #[error("node {0} at level {1} has no parent")]
    MissingParent(NodeId, usize),
    #[error("parent of {node} is {parent}, which is not on level {expected}")]
    ParentLevel { node: NodeId, parent: NodeId, expected: usize },
    #[error("top-level node {0} has a parent")]
    TopHasParent(NodeId),
    #[error("parent map mentions unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown node {0}")]
    NoSuchNode(NodeId),
    #[error("node {0} is on level 0 and has no subforest")]
    LeafSubforest(NodeId),
    #[error("level count {levels} does not match dimension {dim}")]
    LevelCount { levels: usize, dim: usize },
}

/// A finite leveled forest with parent maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    dim: usize,
    levels: Vec<BTreeSet<NodeId>>,
    parent: BTreeMap<NodeId, NodeId>,
    level_of: BTreeMap<NodeId, usize>,
    children: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl Forest {
    /// Builds a forest from explicit levels and a parent map, checking every invariant.
    pub fn new(
        dim: usize,
        levels: Vec<BTreeSet<NodeId>>,
        parent: BTreeMap<NodeId, NodeId>,
    ) -> Result<Forest, ForestError> {
        if levels.len() != dim + 1 {
            return Err(ForestError::LevelCount { levels: levels.len(), dim });
        }
        let mut level_of = BTreeMap::new();
        for (i, level) in levels.iter().enumerate() {
            for &n in level {
                if level_of.insert(n, i).is_some() {
                    return Err(ForestError::DuplicateNode(n));
                }
            }
        }
        for (&n, &p) in &parent {
            let Some(&ln) = level_of.get(&n) else {
                return Err(ForestError::UnknownNode(n));
            };
            if ln == dim {
                return Err(ForestError::TopHasParent(n));
            }
            match level_of.get(&p) {
                Some(&lp) if lp == ln + 1 => {}
                Some(_) => return Err(ForestError::ParentLevel { node: n, parent: p, expected: ln + 1 }),
                None => return Err(ForestError::UnknownNode(p)),
            }
        }
        let mut children: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
        for (i, level) in levels.iter().enumerate() {
            for &n in level {
                children.entry(n).or_default();
                if i < dim {
                    let Some(&p) = parent.get(&n) else {
                        return Err(ForestError::MissingParent(n, i));
                    };
                    children.entry(p).or_default().insert(n);
                }
            }
        }
        Ok(Forest { dim, levels, parent, level_of, children })
    }

    /// The empty forest of the given dimension.
    pub fn empty(dim: usize) -> Forest {
        Forest::new(dim, vec![BTreeSet::new(); dim + 1], BTreeMap::new()).expect("empty forest")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self, i: usize) -> &BTreeSet<NodeId> {
        &self.levels[i]
    }

    pub fn levels(&self) -> &[BTreeSet<NodeId>] {
        &self.levels
    }

    pub fn top(&self) -> &BTreeSet<NodeId> {
        &self.levels[self.dim]
    }

    /// The root, if this forest is a tree.
    pub fn root(&self) -> Option<NodeId> {
        let top = self.top();
        if top.len() == 1 {
            top.iter().next().copied()
        } else {
            None
        }
    }

    pub fn is_tree(&self) -> bool {
        self.top().len() == 1
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.level_of.contains_key(&n)
    }

    pub fn level_of(&self, n: NodeId) -> Option<usize> {
        self.level_of.get(&n).copied()
    }

    pub fn parent(&self, n: NodeId) -> Option<NodeId> {
        self.parent.get(&n).copied()
    }

    pub fn parents(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.parent
    }

    pub fn children(&self, n: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.children.get(&n).into_iter().flat_map(|c| c.iter().copied())
    }

    pub fn child_count(&self, n: NodeId) -> usize {
        self.children.get(&n).map_or(0, |c| c.len())
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.levels.iter().flat_map(|l| l.iter().copied())
    }

    pub fn node_count(&self) -> usize {
        self.level_of.len()
    }

    pub fn max_id(&self) -> Option<NodeId> {
        self.level_of.keys().next_back().copied()
    }

    /// `π^k(n)`, or `None` when it would leave the forest.
    pub fn ancestor(&self, n: NodeId, k: usize) -> Option<NodeId> {
        let mut cur = n;
        for _ in 0..k {
            cur = self.parent(cur)?;
        }
        Some(cur)
    }

    /// Whether `t` lies in the subtree rooted at `s` (including `t == s`).
    pub fn is_under(&self, t: NodeId, s: NodeId) -> bool {
        match (self.level_of(t), self.level_of(s)) {
            (Some(lt), Some(ls)) if lt <= ls => self.ancestor(t, ls - lt) == Some(s),
            _ => false,
        }
    }

    /// All nodes of the subtree at `s`, `s` included, in ascending level then id order.
    pub fn descendants(&self, s: NodeId) -> Vec<NodeId> {
        let mut out = vec![s];
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for n in frontier {
                next.extend(self.children(n));
            }
            out.extend(next.iter().copied());
            frontier = next;
        }
        out
    }

    /// Restriction to a node set closed under parents within levels `0..=dim`.
    ///
    /// Panics if `nodes` is not closed under parents below `dim`.
    pub fn restrict(&self, dim: usize, nodes: &BTreeSet<NodeId>) -> Forest {
        let mut levels = vec![BTreeSet::new(); dim + 1];
        let mut parent = BTreeMap::new();
        for &n in nodes {
            let l = self.level_of[&n];
            levels[l].insert(n);
            if l < dim {
                parent.insert(n, self.parent[&n]);
            }
        }
        Forest::new(dim, levels, parent).expect("restriction of a valid forest")
    }

    /// The subtree `F|^s`: every node whose ancestor at the level of `s` is `s`.
    pub fn subtree(&self, s: NodeId) -> Result<Forest, ForestError> {
        let k = self.level_of(s).ok_or(ForestError::NoSuchNode(s))?;
        let nodes: BTreeSet<_> = self.descendants(s).into_iter().collect();
        Ok(self.restrict(k, &nodes))
    }

    /// The subforest `F|_s`: the subtree at `s` with `s` removed.
    pub fn subforest(&self, s: NodeId) -> Result<Forest, ForestError> {
        let k = self.level_of(s).ok_or(ForestError::NoSuchNode(s))?;
        if k == 0 {
            return Err(ForestError::LeafSubforest(s));
        }
        let mut nodes: BTreeSet<_> = self.descendants(s).into_iter().collect();
        nodes.remove(&s);
        Ok(self.restrict(k - 1, &nodes))
    }

    /// Canonical code of the subtree at `n`, decorated by `key`.
    ///
    /// Two decorated subtrees get equal codes iff a decoration-preserving
    /// isomorphism exists between them.
    pub fn subtree_code(&self, n: NodeId, key: &dyn Fn(NodeId) -> Vec<u8>) -> Vec<u8> {
        let mut memo = BTreeMap::new();
        self.code_rec(n, key, &mut memo)
    }

    fn code_rec(
        &self,
        n: NodeId,
        key: &dyn Fn(NodeId) -> Vec<u8>,
        memo: &mut BTreeMap<NodeId, Vec<u8>>,
    ) -> Vec<u8> {
        if let Some(c) = memo.get(&n) {
            return c.clone();
        }
        let mut kids: Vec<Vec<u8>> = self.children(n).map(|c| self.code_rec(c, key, memo)).collect();
        kids.sort();
        let k = key(n);
        let mut out = Vec::with_capacity(16 + kids.iter().map(Vec::len).sum::<usize>());
        out.push(b'(');
        out.extend_from_slice(&(k.len() as u32).to_le_bytes());
        out.extend_from_slice(&k);
        for c in kids {
            out.extend_from_slice(&c);
        }
        out.push(b')');
        memo.insert(n, out.clone());
        out
    }

    /// Codes for every node at once.
    pub fn all_codes(&self, key: &dyn Fn(NodeId) -> Vec<u8>) -> BTreeMap<NodeId, Vec<u8>> {
        let mut memo = BTreeMap::new();
        for n in self.top().clone() {
            self.code_rec(n, key, &mut memo);
        }
        memo
    }
}

/// Incremental construction with a per-structure id counter.
#[derive(Clone, Debug)]
pub struct ForestBuilder {
    dim: usize,
    next: u32,
    levels: Vec<BTreeSet<NodeId>>,
    parent: BTreeMap<NodeId, NodeId>,
}

impl ForestBuilder {
    pub fn new(dim: usize) -> Self {
        ForestBuilder { dim, next: 0, levels: vec![BTreeSet::new(); dim + 1], parent: BTreeMap::new() }
    }

    /// Adds a top-level node.
    pub fn top(&mut self) -> NodeId {
        let id = NodeId(self.next);
        self.next += 1;
        self.levels[self.dim].insert(id);
        id
    }

    /// Adds a child of `parent`, one level below it.
    ///
    /// Panics if `parent` is unknown or on level 0.
    pub fn child(&mut self, parent: NodeId) -> NodeId {
        let pl = self
            .levels
            .iter()
            .position(|l| l.contains(&parent))
            .expect("parent must already exist");
        assert!(pl > 0, "level-0 nodes have no children");
        let id = NodeId(self.next);
        self.next += 1;
        self.levels[pl - 1].insert(id);
        self.parent.insert(id, parent);
        id
    }

    pub fn build(self) -> Forest {
        Forest::new(self.dim, self.levels, self.parent).expect("builder keeps invariants")
    }
}

/// An explicit finite node map.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelMap(BTreeMap<NodeId, NodeId>);

impl LevelMap {
    pub fn new() -> Self {
        LevelMap(BTreeMap::new())
    }

    pub fn identity(nodes: impl IntoIterator<Item = NodeId>) -> Self {
        LevelMap(nodes.into_iter().map(|n| (n, n)).collect())
    }

    pub fn insert(&mut self, from: NodeId, to: NodeId) -> Option<NodeId> {
        self.0.insert(from, to)
    }

    pub fn get(&self, n: NodeId) -> Option<NodeId> {
        self.0.get(&n).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.0.iter().map(|(&a, &b)| (a, b))
    }

    pub fn domain(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.keys().copied()
    }

    pub fn is_injective(&self) -> bool {
        let image: BTreeSet<_> = self.0.values().collect();
        image.len() == self.0.len()
    }

    /// The inverse map. Only meaningful for injective maps.
    pub fn inverse(&self) -> LevelMap {
        LevelMap(self.0.iter().map(|(&a, &b)| (b, a)).collect())
    }

    /// `other ∘ self`, defined where both steps are.
    pub fn then(&self, other: &LevelMap) -> LevelMap {
        LevelMap(self.0.iter().filter_map(|(&a, &b)| other.get(b).map(|c| (a, c))).collect())
    }

    /// Restriction to the given domain.
    pub fn restrict(&self, dom: impl IntoIterator<Item = NodeId>) -> LevelMap {
        LevelMap(dom.into_iter().filter_map(|a| self.get(a).map(|b| (a, b))).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|(a, b)| a == b)
    }

    pub fn as_map(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.0
    }
}

impl FromIterator<(NodeId, NodeId)> for LevelMap {
    fn from_iter<T: IntoIterator<Item = (NodeId, NodeId)>>(iter: T) -> Self {
        LevelMap(iter.into_iter().collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HomViolation {
    /// The map is undefined on a node of the source.
    Undefined(NodeId),
    /// The image is not a node of the target.
    OutsideTarget(NodeId, NodeId),
    /// `f(x)` sits on a different level than `x`.
    Level { node: NodeId, image: NodeId },
    /// `f(π(x)) ≠ π(f(x))`.
    ParentSquare { node: NodeId, image: NodeId },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomReport {
    pub violations: Vec<HomViolation>,
    pub bijective: bool,
}

impl HomReport {
    pub fn is_homomorphism(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.violations.is_empty() && self.bijective
    }
}

/// Lists every way in which `f` fails to be a homomorphism `from → to`.
pub fn check_homomorphism(f: &LevelMap, from: &Forest, to: &Forest) -> HomReport {
    let mut violations = Vec::new();
    for x in from.nodes() {
        let Some(y) = f.get(x) else {
            violations.push(HomViolation::Undefined(x));
            continue;
        };
        let Some(ly) = to.level_of(y) else {
            violations.push(HomViolation::OutsideTarget(x, y));
            continue;
        };
        if from.level_of(x) != Some(ly) {
            violations.push(HomViolation::Level { node: x, image: y });
            continue;
        }
        if let Some(px) = from.parent(x) {
            if f.get(px) != to.parent(y) {
                violations.push(HomViolation::ParentSquare { node: x, image: y });
            }
        }
    }
    let image: BTreeSet<_> = from.nodes().filter_map(|x| f.get(x)).collect();
    let bijective = f.len() == from.node_count()
        && from.nodes().all(|x| f.get(x).is_some())
        && image.len() == from.node_count()
        && image.len() == to.node_count();
    HomReport { violations, bijective }
}

/// Visits every level-preserving, parent-commuting bijection `t → t2` that
/// satisfies `allowed` on every node pair. Enumeration order is deterministic.
pub fn for_each_isomorphism(
    t: &Forest,
    t2: &Forest,
    allowed: &dyn Fn(NodeId, NodeId) -> bool,
    visit: &mut dyn FnMut(&LevelMap) -> ControlFlow<()>,
) {
    if t.dim() != t2.dim() || t.top().len() != t2.top().len() {
        return;
    }
    for i in 0..=t.dim() {
        if t.level(i).len() != t2.level(i).len() {
            return;
        }
    }
    let plain = |_: NodeId| Vec::new();
    let ca = t.all_codes(&plain);
    let cb = t2.all_codes(&plain);
    let tops_a: Vec<_> = t.top().iter().copied().collect();
    let tops_b: Vec<_> = t2.top().iter().copied().collect();
    let mut search = IsoEnum { t, t2, ca: &ca, cb: &cb, allowed, map: LevelMap::new() };
    let _ = search.run(&mut vec![(tops_a, tops_b)], visit);
}

/// Collects all isomorphisms satisfying the per-node constraint.
pub fn enumerate_isomorphisms(
    t: &Forest,
    t2: &Forest,
    allowed: &dyn Fn(NodeId, NodeId) -> bool,
) -> Vec<LevelMap> {
    let mut out = Vec::new();
    for_each_isomorphism(t, t2, allowed, &mut |m| {
        out.push(m.clone());
        ControlFlow::Continue(())
    });
    out
}

struct IsoEnum<'a> {
    t: &'a Forest,
    t2: &'a Forest,
    ca: &'a BTreeMap<NodeId, Vec<u8>>,
    cb: &'a BTreeMap<NodeId, Vec<u8>>,
    allowed: &'a dyn Fn(NodeId, NodeId) -> bool,
    map: LevelMap,
}

impl IsoEnum<'_> {
    /// Pops one pair of sibling sets and matches it; recurses until the worklist is empty.
    fn run(
        &mut self,
        pending: &mut Vec<(Vec<NodeId>, Vec<NodeId>)>,
        visit: &mut dyn FnMut(&LevelMap) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((xs, ys)) = pending.pop() else {
            return visit(&self.map);
        };
        let mut used = vec![false; ys.len()];
        let flow = if xs.len() == ys.len() {
            self.assign(&xs, &ys, 0, &mut used, pending, visit)
        } else {
            ControlFlow::Continue(())
        };
        pending.push((xs, ys));
        flow
    }

    fn assign(
        &mut self,
        xs: &[NodeId],
        ys: &[NodeId],
        i: usize,
        used: &mut Vec<bool>,
        pending: &mut Vec<(Vec<NodeId>, Vec<NodeId>)>,
        visit: &mut dyn FnMut(&LevelMap) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == xs.len() {
            return self.run(pending, visit);
        }
        let x = xs[i];
        for j in 0..ys.len() {
            let y = ys[j];
            if used[j] || self.ca[&x] != self.cb[&y] || !(self.allowed)(x, y) {
                continue;
            }
            used[j] = true;
            self.map.insert(x, y);
            pending.push((self.t.children(x).collect(), self.t2.children(y).collect()));
            let flow = self.assign(xs, ys, i + 1, used, pending, visit);
            pending.pop();
            self.map.0.remove(&x);
            used[j] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Decorated canonical code of a whole tree.
pub fn canonical_code(t: &Forest, decoration: &dyn Fn(NodeId) -> Vec<u8>) -> Vec<u8> {
    let mut out = Vec::new();
    let mut tops: Vec<Vec<u8>> = t.top().iter().map(|&r| t.subtree_code(r, decoration)).collect();
    tops.sort();
    out.extend_from_slice(&(t.dim() as u32).to_le_bytes());
    for c in tops {
        out.extend_from_slice(&c);
    }
    out
}
