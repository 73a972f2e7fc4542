//! Open nodes, boundary chains and the closer/closure construction.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::forest::{Forest, LevelMap, NodeId};
use crate::hypergraph::{diagram_isomorphism, validate_frame, validate_pasting_diagram, CellId, Diagram, Registry};
use crate::shell::{validate_frame_shell, validate_pasting_shell, Polarity, Report, Shell};

#[derive(Debug, thiserror::Error)]
pub enum PastingError {
    #[error("not a valid pasting shell: {0}")]
    InvalidShell(Report),
    #[error("not a valid pasting diagram: {0}")]
    InvalidDiagram(Report),
    #[error("{0} is not an open node")]
    NotOpen(NodeId),
    #[error("{1} is not a child of {0}")]
    NotChild(NodeId, NodeId),
    #[error("chains need dimension at least 2")]
    Dimension,
    #[error("chain broke at {0}: {1}")]
    Broken(NodeId, &'static str),
    #[error("occupant {0} has dimension {1}, expected {2}")]
    OccupantDimension(CellId, usize, usize),
    #[error("boundary of the occupant does not match the closer boundary")]
    BoundaryMismatch,
    #[error("closure failed validation: {0}")]
    Closure(Report),
}

/// Level-(n−1) nodes without a top-level link.
pub fn open_nodes(xi: &Shell) -> BTreeSet<NodeId> {
    let n = xi.dim();
    if n == 0 {
        return BTreeSet::new();
    }
    xi.forest().level(n - 1).iter().copied().filter(|&s| xi.partners(s).is_empty()).collect()
}

/// A traced boundary chain `y_0, x_0, x_1, y_1, y_2, …, y_m, x_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub ys: Vec<NodeId>,
    pub xs: Vec<NodeId>,
    /// Composite of the σ along the chain, from the subtree at `x_0` onto the one at `x_m`.
    pub sigma: LevelMap,
}

impl Chain {
    pub fn m(&self) -> usize {
        self.xs.len() - 1
    }

    pub fn start(&self) -> (NodeId, NodeId) {
        (self.ys[0], self.xs[0])
    }

    pub fn end(&self) -> (NodeId, NodeId) {
        (*self.ys.last().unwrap(), *self.xs.last().unwrap())
    }

    /// Level-(n−2) links in chain order: `⟨x_0,x_1⟩, ⟨x_2,x_3⟩, …`.
    pub fn low_links(&self) -> Vec<(NodeId, NodeId)> {
        self.xs.chunks(2).map(|p| (p[0], p[1])).collect()
    }

    pub fn reversed(&self) -> (Vec<NodeId>, Vec<NodeId>) {
        (self.ys.iter().rev().copied().collect(), self.xs.iter().rev().copied().collect())
    }
}

/// Traces the unique chain from an open node `y0` through its child `x0` to the next open node.
pub fn trace_chain(xi: &Shell, y0: NodeId, x0: NodeId) -> Result<Chain, PastingError> {
    let n = xi.dim();
    if n < 2 {
        return Err(PastingError::Dimension);
    }
    let f = xi.forest();
    if f.level_of(y0) != Some(n - 1) || !xi.partners(y0).is_empty() {
        return Err(PastingError::NotOpen(y0));
    }
    if f.parent(x0) != Some(y0) {
        return Err(PastingError::NotChild(y0, x0));
    }
    let mut ys = vec![y0];
    let mut xs = vec![x0];
    let mut sigma = LevelMap::identity(f.descendants(x0));
    let mut used = BTreeSet::new();
    let mut x = x0;
    loop {
        let [x1] = xi.partners(x) else {
            return Err(PastingError::Broken(x, "a level-(n−2) node without a unique link"));
        };
        let x1 = *x1;
        assert!(used.insert((x, x1)), "link ⟨{x},{x1}⟩ appears twice in one chain");
        sigma = sigma.then(&xi.links()[&(x, x1)]);
        let y1 = f.parent(x1).expect("level n−2 has parents");
        xs.push(x1);
        ys.push(y1);
        let [y2] = xi.partners(y1) else {
            if xi.partners(y1).is_empty() {
                return Ok(Chain { ys, xs, sigma });
            }
            return Err(PastingError::Broken(y1, "a level-(n−1) node with several links"));
        };
        let y2 = *y2;
        let x2 = xi.links()[&(y1, y2)].get(x1).expect("σ is total");
        sigma = sigma.then(&xi.links()[&(y1, y2)]);
        ys.push(y2);
        xs.push(x2);
        x = x2;
    }
}

/// Fresh node ids for a closure.
#[derive(Clone, Debug)]
pub struct IdAlloc {
    pool: Vec<u32>,
    next: u32,
}

impl IdAlloc {
    pub fn sequential(start: u32) -> IdAlloc {
        IdAlloc { pool: Vec::new(), next: start }
    }

    /// Hands out `count` ids above `start` in a seeded random order, then continues sequentially.
    pub fn scattered(start: u32, count: usize, seed: u64) -> IdAlloc {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<u32> = (start..start + 3 * count as u32).collect();
        pool.shuffle(&mut rng);
        pool.truncate(count);
        IdAlloc { pool, next: start + 3 * count as u32 }
    }

    pub fn fresh(&mut self) -> NodeId {
        if let Some(id) = self.pool.pop() {
            return NodeId(id);
        }
        self.next += 1;
        NodeId(self.next - 1)
    }
}

/// Result of closing a pasting shell.
#[derive(Clone, Debug)]
pub struct Closure {
    pub closer: Shell,
    pub closure: Shell,
    pub root: NodeId,
    /// `(s_l, t_l, f_l)`: each open node, the top of its dual copy, and `f_l: τ_l → (ξ|^{s_l})*`.
    pub copies: Vec<(NodeId, NodeId, LevelMap)>,
}

/// Builds the closer and the closure with the given root polarity.
pub fn close_shell(xi: &Shell, root_polarity: Polarity) -> Result<Closure, PastingError> {
    let start = xi.max_id().map_or(0, |m| m.0 + 1);
    close_shell_with(xi, root_polarity, &mut IdAlloc::sequential(start))
}

pub fn close_shell_with(xi: &Shell, root_polarity: Polarity, alloc: &mut IdAlloc) -> Result<Closure, PastingError> {
    let report = validate_pasting_shell(xi);
    if !report.is_ok() {
        return Err(PastingError::InvalidShell(report));
    }
    let closure = build_closure(xi, root_polarity, alloc)?;
    let report = validate_frame_shell(&closure.closure);
    if !report.is_ok() {
        return Err(PastingError::Closure(report));
    }
    Ok(closure)
}

fn build_closure(xi: &Shell, root_polarity: Polarity, alloc: &mut IdAlloc) -> Result<Closure, PastingError> {
    let n = xi.dim();
    let f = xi.forest();
    let open = open_nodes(xi);
    let root = alloc.fresh();
    let mut levels: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n + 1];
    levels[n].insert(root);
    let mut parent = BTreeMap::new();
    let mut pol = BTreeMap::from([(root, root_polarity)]);
    let mut links: BTreeMap<(NodeId, NodeId), LevelMap> = BTreeMap::new();
    let mut copies = Vec::new();
    // inverse of f_l on all copies at once: original node -> copy
    let mut to_copy: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    for &s in &open {
        let nodes = f.descendants(s);
        let mut fl = LevelMap::new();
        for &x in &nodes {
            let t = alloc.fresh();
            fl.insert(t, x);
            to_copy.insert(x, t);
        }
        for &x in &nodes {
            let t = to_copy[&x];
            levels[f.level_of(x).unwrap()].insert(t);
            pol.insert(t, xi.polarity(x).flip());
            let p = if x == s { root } else { to_copy[&f.parent(x).unwrap()] };
            parent.insert(t, p);
        }
        for (&(a, b), sigma) in xi.links() {
            if f.is_under(a, s) && f.is_under(b, s) && a != s {
                let m = sigma.iter().map(|(p, q)| (to_copy[&p], to_copy[&q])).collect();
                links.insert((to_copy[&a], to_copy[&b]), m);
            }
        }
        copies.push((s, to_copy[&s], fl));
    }
    if n >= 2 {
        for &s in &open {
            for x in f.children(s) {
                let chain = trace_chain(xi, s, x)?;
                let (_, xm) = chain.end();
                let m = chain.sigma.iter().map(|(p, q)| (to_copy[&p], to_copy[&q])).collect();
                links.insert((to_copy[&x], to_copy[&xm]), m);
            }
        }
    }
    let closer_forest = Forest::new(n, levels.clone(), parent.clone()).expect("closer is a tree");
    let closer = Shell::new(closer_forest, pol.clone(), links.clone());

    let mut all_levels = f.levels().to_vec();
    for (i, l) in levels.into_iter().enumerate() {
        all_levels[i].extend(l);
    }
    let mut all_parent = f.parents().clone();
    all_parent.extend(parent);
    let mut all_pol = xi.polarities().clone();
    all_pol.extend(pol);
    let mut all_links = xi.links().clone();
    all_links.extend(links);
    for (s, t, fl) in &copies {
        all_links.insert((*t, *s), fl.clone());
        all_links.insert((*s, *t), fl.inverse());
    }
    let forest = Forest::new(n, all_levels, all_parent).expect("fresh ids are disjoint");
    let closure = Shell::new(forest, all_pol, all_links);
    Ok(Closure { closer, closure, root, copies })
}

/// Closes a pasting diagram with `occupant` labeling the new top node.
///
/// The closer boundary is labeled by transporting labels along `f_l` and
/// conjugating; the occupant's boundary must be isomorphic to it.
pub fn close_diagram(reg: &Registry, p: &Diagram, occupant: CellId) -> Result<(Diagram, Closure), PastingError> {
    let report = validate_pasting_diagram(reg, p);
    if !report.is_ok() {
        return Err(PastingError::InvalidDiagram(report));
    }
    let cell = reg.cell(occupant);
    if cell.dim != p.dim() {
        return Err(PastingError::OccupantDimension(occupant, cell.dim, p.dim()));
    }
    let cl = close_shell(&p.shell, cell.polarity)?;
    let mut labels = p.labels.clone();
    let mut rho = p.rho.clone();
    let f = p.shell.forest();
    for (_, _, fl) in &cl.copies {
        let inv = fl.inverse();
        for (t, x) in fl.iter() {
            labels.insert(t, reg.conj(p.labels[&x]));
            if let Some(rx) = p.rho.get(&x) {
                let r = f.descendants(x).into_iter().skip(1).map(|u| (inv.get(u).unwrap(), rx.get(u).unwrap()));
                rho.insert(t, r.collect());
            }
        }
    }
    let mut closed = Diagram { shell: cl.closure.clone(), labels, rho };
    if let Some(bd) = &cell.boundary {
        let here = closed.boundary_of(cl.root);
        let m = diagram_isomorphism(&here, bd).ok_or(PastingError::BoundaryMismatch)?;
        closed.rho.insert(cl.root, m);
    }
    closed.labels.insert(cl.root, occupant);
    let report = validate_frame(reg, &closed);
    if !report.is_ok() {
        return Err(PastingError::Closure(report));
    }
    Ok((closed, cl))
}
