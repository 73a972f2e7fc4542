//! Shape graphs, directedness, domain/codomain splitting and directed closures.

use std::collections::{BTreeMap, BTreeSet};

use crate::forest::{LevelMap, NodeId};
use crate::hypergraph::{validate_cell_diagram, validate_frame, validate_pasting_diagram, CellId, Diagram, Registry};
use crate::pasting::{close_shell, open_nodes, Closure, PastingError};
use crate::shell::{validate, Polarity, Report, Shell, ShellKind};

pub use crate::gallery::{build_gallery, Gallery, GALLERY_NAMES};

/// Bipartite body/foot graph of an `n`-dimensional structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShapeGraph {
    pub bodies: BTreeSet<NodeId>,
    pub feet: BTreeSet<NodeId>,
    /// `(body, foot)`.
    pub legs: BTreeSet<(NodeId, NodeId)>,
    /// Unordered, stored as `(min, max)`.
    pub links: BTreeSet<(NodeId, NodeId)>,
}

impl ShapeGraph {
    pub fn node_count(&self) -> usize {
        self.bodies.len() + self.feet.len()
    }

    pub fn edge_count(&self) -> usize {
        self.legs.len() + self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    /// Removes a body with its legs, its feet and link edges touching those feet.
    pub fn without_body(&self, body: NodeId) -> ShapeGraph {
        let gone: BTreeSet<NodeId> = self.legs.iter().filter(|(b, _)| *b == body).map(|&(_, f)| f).collect();
        ShapeGraph {
            bodies: self.bodies.iter().copied().filter(|&b| b != body).collect(),
            feet: self.feet.difference(&gone).copied().collect(),
            legs: self.legs.iter().copied().filter(|&(b, _)| b != body).collect(),
            links: self.links.iter().copied().filter(|(a, b)| !gone.contains(a) && !gone.contains(b)).collect(),
        }
    }

    fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.legs.iter().copied().chain(self.links.iter().copied())
    }

    fn components_and_cycle(&self) -> (usize, bool) {
        let nodes: Vec<NodeId> = self.bodies.iter().chain(self.feet.iter()).copied().collect();
        let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = nodes.len();
        let mut cycle = false;
        for (a, b) in self.edges() {
            let (ra, rb) = (find(&mut parent, index[&a]), find(&mut parent, index[&b]));
            if ra == rb {
                cycle = true;
            } else {
                parent[ra] = rb;
                comps -= 1;
            }
        }
        (comps, cycle)
    }

    /// Connected and non-empty.
    pub fn is_connected(&self) -> bool {
        self.components_and_cycle().0 == 1
    }

    pub fn is_acyclic(&self) -> bool {
        !self.components_and_cycle().1
    }

    /// Acyclic and connected; the empty graph counts as a tree.
    pub fn is_tree(&self) -> bool {
        let (c, cycle) = self.components_and_cycle();
        !cycle && c <= 1
    }
}

/// Shape graph of any shell: bodies on the top level, feet one level below.
pub fn shape_graph(xi: &Shell) -> ShapeGraph {
    let f = xi.forest();
    let n = xi.dim();
    let mut g = ShapeGraph { bodies: f.top().clone(), ..ShapeGraph::default() };
    if n == 0 {
        return g;
    }
    for &t in f.level(n - 1) {
        g.feet.insert(t);
        g.legs.insert((f.parent(t).unwrap(), t));
    }
    for (a, b) in xi.links_at(n - 1) {
        g.links.insert((a.min(b), a.max(b)));
    }
    g
}

/// Shape graph of the dual of the closer boundary, with each copied node named
/// after the node of `xi` it was copied from.
pub fn boundary_graph(xi: &Shell) -> Result<ShapeGraph, PastingError> {
    let cl = close_shell(xi, Polarity::Pos)?;
    if xi.dim() == 0 {
        return Ok(ShapeGraph::default());
    }
    let back: BTreeMap<NodeId, NodeId> = cl.copies.iter().flat_map(|(_, _, fl)| fl.iter()).collect();
    Ok(shape_graph(&cl.closer.boundary_of(cl.root).dual().rename(&|n| back[&n])))
}

/// Top-level directedness facts about a frame-like structure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Verdict {
    pub positive_head: Option<NodeId>,
    pub negative_head: Option<NodeId>,
    pub connected: bool,
    /// Acyclicity after deleting the positive (resp. negative) head.
    pub acyclic_positive: bool,
    pub acyclic_negative: bool,
    /// Whether the head-deleted graph is a tree, per head.
    pub residual_tree_positive: bool,
    pub residual_tree_negative: bool,
    pub orientations: BTreeSet<Polarity>,
}

impl Verdict {
    pub fn headed(&self) -> bool {
        self.positive_head.is_some() || self.negative_head.is_some()
    }

    pub fn is_directed(&self) -> bool {
        !self.orientations.is_empty()
    }

    pub fn head(&self, p: Polarity) -> Option<NodeId> {
        match p {
            Polarity::Pos => self.positive_head,
            Polarity::Neg => self.negative_head,
        }
    }
}

/// Verdict for a frame-like structure whose top nodes carry the given signs.
fn verdict_with(xi: &Shell, sign: &dyn Fn(NodeId) -> Polarity) -> Verdict {
    let f = xi.forest();
    let tops: Vec<NodeId> = f.top().iter().copied().collect();
    let single = |p: Polarity| {
        let hs: Vec<NodeId> = tops.iter().copied().filter(|&t| sign(t) == p).collect();
        (hs.len() == 1).then(|| hs[0])
    };
    let g = shape_graph(xi);
    let low = xi.dim() == 0;
    let connected = low || g.is_connected();
    let mut v = Verdict { connected, ..Verdict::default() };
    for p in [Polarity::Pos, Polarity::Neg] {
        let Some(h) = single(p) else { continue };
        let rest = g.without_body(h);
        let acyclic = low || rest.is_acyclic();
        let tree = low || rest.is_tree();
        match p {
            Polarity::Pos => {
                v.positive_head = Some(h);
                v.acyclic_positive = acyclic;
                v.residual_tree_positive = tree;
            }
            Polarity::Neg => {
                v.negative_head = Some(h);
                v.acyclic_negative = acyclic;
                v.residual_tree_negative = tree;
            }
        }
        if connected && acyclic {
            v.orientations.insert(p);
        }
    }
    v
}

/// Top-level verdict of a frame shell, by node polarity.
pub fn frame_shell_verdict(xi: &Shell) -> Verdict {
    verdict_with(xi, &|n| xi.polarity(n))
}

/// `n`-directedness of a labeled frame, by label polarity.
///
/// Panics if a label polarity differs from the node polarity, which a valid frame rules out.
pub fn frame_verdict(reg: &Registry, zeta: &Diagram) -> Verdict {
    let by_label = verdict_with(&zeta.shell, &|n| reg.cell(zeta.labels[&n]).polarity);
    let by_node = frame_shell_verdict(&zeta.shell);
    assert_eq!(by_label, by_node, "label and node polarity disagree on a valid frame");
    by_label
}

/// Facts about a pasting shell.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PastingVerdict {
    pub homogeneous: Option<Polarity>,
    pub connected: bool,
    pub acyclic: bool,
}

impl PastingVerdict {
    pub fn is_directed(&self) -> bool {
        self.homogeneous.is_some() && self.connected && self.acyclic
    }
}

pub fn pasting_verdict(xi: &Shell) -> PastingVerdict {
    let f = xi.forest();
    let signs: BTreeSet<Polarity> = f.top().iter().map(|&t| xi.polarity(t)).collect();
    let homogeneous = if signs.len() == 1 { signs.into_iter().next() } else { None };
    let g = shape_graph(xi);
    PastingVerdict { homogeneous, connected: g.is_connected(), acyclic: g.is_acyclic() }
}

/// Full directedness of a shell of the given kind, including every cell inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Directedness {
    pub kind: ShellKind,
    /// Orientations in which the structure is directed; empty when it is not.
    pub orientations: BTreeSet<Polarity>,
    /// Nodes whose cell shell is not directed, with the reason.
    pub failures: Vec<(NodeId, String)>,
    pub frame: Option<Verdict>,
    pub pasting: Option<PastingVerdict>,
}

impl Directedness {
    pub fn is_directed(&self) -> bool {
        !self.orientations.is_empty() && self.failures.is_empty()
    }

    pub fn is(&self, p: Polarity) -> bool {
        self.orientations.contains(&p) && self.failures.is_empty()
    }
}

/// Checks every node at level ≥ 1 below the top: its cell shell must be directed
/// with the orientation of its polarity.
fn inner_failures(xi: &Shell, below: usize) -> Vec<(NodeId, String)> {
    let f = xi.forest();
    let mut out = Vec::new();
    for level in 1..=below {
        for &s in f.level(level) {
            let v = frame_shell_verdict(&xi.boundary_of(s));
            let p = xi.polarity(s);
            if !v.orientations.contains(&p) {
                let want = if p == Polarity::Pos { "positively" } else { "negatively" };
                out.push((s, format!("boundary is not {want} directed")));
            }
        }
    }
    out
}

/// Directedness of a valid shell of the given kind.
pub fn check_directed(xi: &Shell, kind: ShellKind) -> Directedness {
    let n = xi.dim();
    match kind {
        ShellKind::Frame => {
            let v = frame_shell_verdict(xi);
            Directedness {
                kind,
                orientations: v.orientations.clone(),
                failures: inner_failures(xi, n),
                frame: Some(v),
                pasting: None,
            }
        }
        ShellKind::Cell => {
            let Some(root) = xi.forest().root() else {
                return Directedness { kind, orientations: BTreeSet::new(), failures: vec![], frame: None, pasting: None };
            };
            let p = xi.polarity(root);
            if n == 0 {
                return Directedness { kind, orientations: [p].into(), failures: vec![], frame: None, pasting: None };
            }
            let v = frame_shell_verdict(&xi.boundary_of(root));
            let orientations = if v.orientations.contains(&p) { [p].into() } else { BTreeSet::new() };
            Directedness { kind, orientations, failures: inner_failures(xi, n - 1), frame: Some(v), pasting: None }
        }
        ShellKind::Pasting => {
            let v = pasting_verdict(xi);
            let orientations = match v.homogeneous {
                Some(p) if v.is_directed() => [p].into(),
                _ => BTreeSet::new(),
            };
            Directedness { kind, orientations, failures: inner_failures(xi, n), frame: None, pasting: Some(v) }
        }
    }
}

/// One directedness failure of a registered cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellFailure {
    pub cell: CellId,
    pub detail: String,
}

/// Checks that every positive (negative) cell has a positively (negatively)
/// directed boundary, and cross-checks against shell-level directedness.
pub fn check_directed_hypergraph(reg: &Registry) -> Vec<CellFailure> {
    let mut out = Vec::new();
    for c in reg.cells() {
        let Some(bd) = &c.boundary else { continue };
        let v = frame_verdict(reg, bd);
        if !v.orientations.contains(&c.polarity) {
            let detail = if !v.headed() || v.head(c.polarity).is_none() {
                "headedness fails".to_string()
            } else if !v.connected {
                "connectedness fails".to_string()
            } else {
                "acyclicity fails".to_string()
            };
            out.push(CellFailure { cell: c.id, detail: format!("boundary of {}: {detail}", c.name) });
        }
    }
    if out.is_empty() {
        for c in reg.cells() {
            let Some(bd) = &c.boundary else { continue };
            let d = check_directed(&bd.shell, ShellKind::Frame);
            if !d.is(c.polarity) {
                out.push(CellFailure {
                    cell: c.id,
                    detail: format!("boundary shell of {} is not directed although every boundary frame is", c.name),
                });
            }
        }
    }
    out
}

/// A cell `c` is simple when its boundary is directed both ways.
pub fn is_simple(reg: &Registry, c: CellId) -> bool {
    reg.boundary(c).is_some_and(|bd| frame_verdict(reg, bd).orientations.len() == 2)
}

#[derive(Debug, thiserror::Error)]
pub enum DirectedError {
    #[error("not directed")]
    NotDirected,
    #[error("invalid input: {0}")]
    Invalid(Report),
    #[error(transparent)]
    Pasting(#[from] PastingError),
    #[error("split produced an invalid {0}: {1}")]
    BadSplit(&'static str, Report),
    #[error("directed closure is not directed ({0}); closer: {1:?}; closure: {2:?}")]
    Internal(String, Box<Shell>, Box<Shell>),
}

/// Domain/codomain decomposition of a directed frame.
#[derive(Clone, Debug)]
pub struct Split {
    pub head: NodeId,
    pub orientation: Polarity,
    pub dom: Diagram,
    pub cod: Diagram,
    /// Links removed between the two parts.
    pub removed: BTreeMap<(NodeId, NodeId), LevelMap>,
}

/// Splits a directed frame at its head. `orientation` picks the head when the
/// frame is directed both ways; by default the positive head is used.
pub fn split_frame(reg: &Registry, zeta: &Diagram, orientation: Option<Polarity>) -> Result<Split, DirectedError> {
    let r = validate_frame(reg, zeta);
    if !r.is_ok() {
        return Err(DirectedError::Invalid(r));
    }
    let v = frame_verdict(reg, zeta);
    let p = match orientation {
        Some(p) if v.orientations.contains(&p) => p,
        Some(_) => return Err(DirectedError::NotDirected),
        None => *v.orientations.iter().next_back().ok_or(DirectedError::NotDirected)?,
    };
    let head = v.head(p).unwrap();
    let f = zeta.shell.forest();
    let under: BTreeSet<NodeId> = f.descendants(head).into_iter().collect();
    let rest: BTreeSet<NodeId> = f.nodes().filter(|n| !under.contains(n)).collect();
    let n = zeta.dim();
    let cod = zeta.cell_at(head);
    let dom = zeta.restrict(n, &rest, n.checked_sub(1));
    let removed = zeta
        .shell
        .links()
        .iter()
        .filter(|((a, b), _)| under.contains(a) != under.contains(b))
        .map(|(&k, v)| (k, v.clone()))
        .collect();
    let r = validate_cell_diagram(reg, &cod);
    if !r.is_ok() {
        return Err(DirectedError::BadSplit("codomain", r));
    }
    let r = validate_pasting_diagram(reg, &dom);
    if !r.is_ok() {
        return Err(DirectedError::BadSplit("domain", r));
    }
    Ok(Split { head, orientation: p, dom, cod, removed })
}

/// Glues a split back together along the removed links.
pub fn reassemble(split: &Split) -> Diagram {
    let mut d = split.dom.union(&split.cod);
    for ((a, b), s) in &split.removed {
        d.shell = d.shell.with_link(*a, *b, s.clone());
    }
    d
}

/// Closes a directed pasting shell with the closer polarity opposite to its sign,
/// and certifies both directedness claims.
pub fn close_directed(xi: &Shell) -> Result<Closure, DirectedError> {
    let r = validate(xi, ShellKind::Pasting);
    if !r.is_ok() {
        return Err(DirectedError::Invalid(r));
    }
    let d = check_directed(xi, ShellKind::Pasting);
    if !d.is_directed() {
        return Err(DirectedError::NotDirected);
    }
    let sign = *d.orientations.iter().next().unwrap();
    let cl = close_shell(xi, sign.flip())?;
    let closer = check_directed(&cl.closer, ShellKind::Cell);
    let closure = check_directed(&cl.closure, ShellKind::Frame);
    if !closer.is(sign.flip()) || !closure.is(sign.flip()) {
        let why = format!("closer {:?}, closure {:?}", closer, closure);
        return Err(DirectedError::Internal(why, Box::new(cl.closer), Box::new(cl.closure)));
    }
    Ok(cl)
}

/// Open nodes of a pasting shell, re-exported for callers working on directed shells.
pub fn open_feet(xi: &Shell) -> BTreeSet<NodeId> {
    open_nodes(xi)
}
