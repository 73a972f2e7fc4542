//! Cells, the cell registry, and labeled diagrams (cell diagrams, frames,
//! pasting diagrams) over shells.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::forest::{LevelMap, NodeId};
use crate::iso::{self, View};
use crate::shell::{validate, Condition, Polarity, Report, Shell, ShellKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub u32);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// An `i`-cell. `boundary` is `None` exactly for 0-cells (the empty −1-frame).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub name: String,
    pub dim: usize,
    pub polarity: Polarity,
    pub conjugate: CellId,
    pub boundary: Option<Diagram>,
}

/// A shell with cell labels `λ` and boundary identifications `ρ`.
///
/// `rho` has an entry for every node above level 0; level-0 nodes carry the
/// empty function implicitly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    pub shell: Shell,
    pub labels: BTreeMap<NodeId, CellId>,
    pub rho: BTreeMap<NodeId, LevelMap>,
}

impl Diagram {
    pub fn empty(dim: usize) -> Diagram {
        Diagram { shell: Shell::empty(dim), labels: BTreeMap::new(), rho: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.shell.dim()
    }

    pub fn view(&self) -> View<'_> {
        View::labeled(&self.shell, &self.labels, &self.rho)
    }

    pub fn label(&self, n: NodeId) -> CellId {
        self.labels[&n]
    }

    fn restrict_to(&self, shell: Shell) -> Diagram {
        let f = shell.forest();
        let labels = self.labels.iter().filter(|(n, _)| f.contains(**n)).map(|(&n, &c)| (n, c)).collect();
        let rho = self
            .rho
            .iter()
            .filter(|(n, _)| f.level_of(**n).is_some_and(|l| l > 0))
            .map(|(&n, r)| (n, r.clone()))
            .collect();
        Diagram { shell, labels, rho }
    }

    /// `ζ|^s` as a cell diagram.
    pub fn cell_at(&self, s: NodeId) -> Diagram {
        self.restrict_to(self.shell.cell_at(s))
    }

    /// `ζ|_s` as a frame.
    pub fn boundary_of(&self, s: NodeId) -> Diagram {
        self.restrict_to(self.shell.boundary_of(s))
    }

    /// Restriction to a parent-closed node set.
    pub fn restrict(&self, dim: usize, nodes: &BTreeSet<NodeId>, max_link_level: Option<usize>) -> Diagram {
        self.restrict_to(self.shell.restrict(dim, nodes, max_link_level))
    }

    pub fn rename(&self, rename: &dyn Fn(NodeId) -> NodeId) -> Diagram {
        Diagram {
            shell: self.shell.rename(rename),
            labels: self.labels.iter().map(|(&n, &c)| (rename(n), c)).collect(),
            rho: self
                .rho
                .iter()
                .map(|(&n, r)| (rename(n), r.iter().map(|(a, b)| (rename(a), b)).collect()))
                .collect(),
        }
    }

    /// Disjoint union; node ids must not overlap.
    pub fn union(&self, other: &Diagram) -> Diagram {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().map(|(&a, &b)| (a, b)));
        let mut rho = self.rho.clone();
        rho.extend(other.rho.iter().map(|(&a, b)| (a, b.clone())));
        Diagram { shell: self.shell.union(&other.shell), labels, rho }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("boundary of a {0}-cell must be a {1}-frame")]
    Dimension(usize, i64),
    #[error("invalid boundary: {0}")]
    InvalidBoundary(Report),
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("invalid diagram: {0}")]
    Invalid(Report),
    #[error("diagrams have different dimensions")]
    DimensionMismatch,
}

/// `Σ` with conjugation and boundaries. Append-only.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Registry {
    cells: Vec<Cell>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    pub fn get(&self, c: CellId) -> Option<&Cell> {
        self.cells.get(c.0 as usize)
    }

    pub fn cell(&self, c: CellId) -> &Cell {
        &self.cells[c.0 as usize]
    }

    pub fn conj(&self, c: CellId) -> CellId {
        self.cell(c).conjugate
    }

    pub fn boundary(&self, c: CellId) -> Option<&Diagram> {
        self.cell(c).boundary.as_ref()
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn by_name(&self, name: &str) -> Option<CellId> {
        self.cells.iter().find(|c| c.name == name).map(|c| c.id)
    }

    pub fn of_dim(&self, dim: usize) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.dim == dim)
    }

    pub fn positive(&self, dim: usize) -> impl Iterator<Item = &Cell> {
        self.of_dim(dim).filter(|c| c.polarity == Polarity::Pos)
    }

    /// Registers `c` (positive) with `boundary` and `c*` with its dual. Returns `(c, c*)`.
    pub fn register_cell_pair(
        &mut self,
        name: &str,
        dim: usize,
        boundary: Option<Diagram>,
    ) -> Result<(CellId, CellId), RegistryError> {
        match (&boundary, dim) {
            (None, 0) => {}
            (Some(b), d) if d > 0 && b.dim() == d - 1 => {
                let report = validate_frame(self, b);
                if !report.is_ok() {
                    return Err(RegistryError::InvalidBoundary(report));
                }
            }
            _ => return Err(RegistryError::Dimension(dim, dim as i64 - 1)),
        }
        let pos = CellId(self.cells.len() as u32);
        let neg = CellId(pos.0 + 1);
        let dual = boundary.as_ref().map(|b| dual_unchecked(self, b));
        self.cells.push(Cell { id: pos, name: name.to_string(), dim, polarity: Polarity::Pos, conjugate: neg, boundary });
        self.cells.push(Cell {
            id: neg,
            name: format!("{name}*"),
            dim,
            polarity: Polarity::Neg,
            conjugate: pos,
            boundary: dual,
        });
        Ok((pos, neg))
    }

    /// Inserts a raw cell without checks; used by loaders, which validate afterwards
    /// through [`validate_registry`].
    pub fn push_raw(&mut self, cell: Cell) {
        self.cells.push(cell);
    }
}

/// Cross-checks conjugation and every boundary of a registry.
pub fn validate_registry(reg: &Registry) -> Report {
    let mut report = Report::default();
    for (i, c) in reg.cells.iter().enumerate() {
        if c.id.0 as usize != i {
            report.push(Condition::Structure, vec![], format!("cell {} stored at index {i}", c.id));
            continue;
        }
        let Some(k) = reg.get(c.conjugate) else {
            report.push(Condition::Structure, vec![], format!("conjugate of {} is unknown", c.name));
            continue;
        };
        if k.conjugate != c.id || k.polarity == c.polarity || k.dim != c.dim {
            report.push(Condition::Structure, vec![], format!("conjugation is not an involution at {}", c.name));
        }
        match (&c.boundary, c.dim) {
            (None, 0) => {}
            (Some(b), d) if d > 0 && b.dim() == d - 1 => {
                let r = validate_frame(reg, b);
                if !r.is_ok() {
                    report.push(Condition::Structure, vec![], format!("boundary of {} is not a frame: {r}", c.name));
                } else if b.labels.values().any(|&l| reg.get(l).is_none_or(|x| x.id.0 >= c.id.0.min(k.id.0))) {
                    report.push(Condition::Structure, vec![], format!("boundary of {} uses later cells", c.name));
                } else if let Some(kb) = &k.boundary {
                    if *kb != dual_unchecked(reg, b) {
                        report.push(Condition::Structure, vec![], format!("boundary of {} is not the dual", k.name));
                    }
                }
            }
            _ => report.push(Condition::Structure, vec![], format!("boundary of {} has the wrong dimension", c.name)),
        }
    }
    report
}

pub fn validate_frame(reg: &Registry, d: &Diagram) -> Report {
    validate_diagram(reg, d, ShellKind::Frame)
}

pub fn validate_cell_diagram(reg: &Registry, d: &Diagram) -> Report {
    validate_diagram(reg, d, ShellKind::Cell)
}

pub fn validate_pasting_diagram(reg: &Registry, d: &Diagram) -> Report {
    validate_diagram(reg, d, ShellKind::Pasting)
}

pub fn validate_diagram(reg: &Registry, d: &Diagram, kind: ShellKind) -> Report {
    let mut report = validate(&d.shell, kind);
    if !report.is_ok() {
        return report;
    }
    let f = d.shell.forest();
    let mut typed = BTreeSet::new();
    for s in f.nodes() {
        let level = f.level_of(s).unwrap();
        let Some(&c) = d.labels.get(&s) else {
            report.push(Condition::AssignmentOfCells, vec![s], "node has no label");
            continue;
        };
        let Some(cell) = reg.get(c) else {
            report.push(Condition::AssignmentOfCells, vec![s], format!("label {c} is not a registered cell"));
            continue;
        };
        if cell.dim != level {
            report.push(Condition::AssignmentOfCells, vec![s], format!("{}-cell on a level-{level} node", cell.dim));
        } else if cell.polarity != d.shell.polarity(s) {
            report.push(Condition::AssignmentOfCells, vec![s], "label polarity differs from node polarity");
        } else {
            typed.insert(s);
        }
    }
    for &n in d.labels.keys() {
        if !f.contains(n) {
            report.push(Condition::AssignmentOfCells, vec![n], "label on an unknown node");
        }
    }
    if !report.is_ok() {
        return report;
    }
    for s in f.nodes() {
        if f.level_of(s) == Some(0) {
            if d.rho.contains_key(&s) {
                report.push(Condition::IdentificationInBoundaries, vec![s], "ρ on a level-0 node must be empty");
            }
            continue;
        }
        let Some(r) = d.rho.get(&s) else {
            report.push(Condition::IdentificationInBoundaries, vec![s], "missing ρ");
            continue;
        };
        let bd = reg.boundary(d.labels[&s]).expect("cells above dimension 0 have boundaries");
        let here = d.boundary_of(s);
        let problems = iso::check(r, &here.view(), &bd.view());
        if !problems.is_empty() {
            report.push(
                Condition::IdentificationInBoundaries,
                vec![s],
                format!("ρ is not a frame isomorphism onto ∂({}): {}", reg.cell(d.labels[&s]).name, problems[0]),
            );
        }
    }
    for &n in d.rho.keys() {
        if !f.contains(n) {
            report.push(Condition::IdentificationInBoundaries, vec![n], "ρ on an unknown node");
        }
    }
    if !report.is_ok() {
        return report;
    }
    for (&(s, s2), sigma) in d.shell.links() {
        if d.labels[&s] != reg.conj(d.labels[&s2]) {
            report.push(Condition::CompatibilityOnLinks, vec![s, s2], "λ(s) is not the conjugate of λ(s′)");
            continue;
        }
        if f.level_of(s).is_some_and(|l| l > 0) {
            let (rs, rs2) = (&d.rho[&s], &d.rho[&s2]);
            let bad: Vec<NodeId> = f
                .descendants(s)
                .into_iter()
                .skip(1)
                .filter(|&t| rs.get(t) != sigma.get(t).and_then(|u| rs2.get(u)))
                .collect();
            if !bad.is_empty() {
                report.push(
                    Condition::CompatibilityOnLinks,
                    [vec![s, s2], bad].concat(),
                    "ρ_s differs from ρ_s′ ∘ σ",
                );
                continue;
            }
        }
        // derived: labels along σ are conjugate
        if let Some(t) = f.descendants(s).into_iter().find(|&t| sigma.get(t).map(|u| d.labels[&u]) != Some(reg.conj(d.labels[&t]))) {
            report.push(Condition::CompatibilityOnLinks, vec![s, s2, t], "σ does not conjugate labels");
        }
    }
    report
}

/// Dual without validation; ρ is unchanged because `∂(c*)` shares node ids with `∂(c)`.
fn dual_unchecked(reg: &Registry, d: &Diagram) -> Diagram {
    Diagram {
        shell: d.shell.dual(),
        labels: d.labels.iter().map(|(&n, &c)| (n, reg.conj(c))).collect(),
        rho: d.rho.clone(),
    }
}

/// `(ζ)*`: polarities negated and labels conjugated.
pub fn frame_dual(reg: &Registry, d: &Diagram) -> Result<Diagram, RegistryError> {
    let r = validate_frame(reg, d);
    if !r.is_ok() {
        return Err(RegistryError::Invalid(r));
    }
    Ok(dual_unchecked(reg, d))
}

/// Dual of any valid diagram (frame, cell or pasting).
pub fn diagram_dual(reg: &Registry, d: &Diagram) -> Diagram {
    dual_unchecked(reg, d)
}

/// Searches for a frame isomorphism `a ≅ b`.
pub fn frame_isomorphism(reg: &Registry, a: &Diagram, b: &Diagram) -> Result<Option<LevelMap>, RegistryError> {
    for d in [a, b] {
        let r = validate_any(reg, d);
        if !r.is_ok() {
            return Err(RegistryError::Invalid(r));
        }
    }
    if a.dim() != b.dim() {
        return Err(RegistryError::DimensionMismatch);
    }
    Ok(diagram_isomorphism(a, b))
}

/// Isomorphism search without validating the inputs.
pub fn diagram_isomorphism(a: &Diagram, b: &Diagram) -> Option<LevelMap> {
    let found = iso::find(&a.view(), &b.view());
    if let Some(m) = &found {
        assert!(iso::check(m, &a.view(), &b.view()).is_empty(), "search returned a non-isomorphism");
    }
    found
}

pub(crate) fn validate_any(reg: &Registry, d: &Diagram) -> Report {
    let r = validate_pasting_diagram(reg, d);
    if r.is_ok() {
        return r;
    }
    let c = validate_cell_diagram(reg, d);
    if c.is_ok() {
        c
    } else {
        r
    }
}

/// The cell diagram of a single cell: a root labeled `c` over a copy of `∂c`.
pub fn cell_diagram(reg: &Registry, c: CellId) -> Diagram {
    let cell = reg.cell(c);
    let Some(bd) = &cell.boundary else {
        let forest = crate::forest::Forest::new(0, vec![BTreeSet::from([NodeId(0)])], BTreeMap::new())
            .expect("singleton");
        return Diagram {
            shell: Shell::new(forest, BTreeMap::from([(NodeId(0), cell.polarity)]), BTreeMap::new()),
            labels: BTreeMap::from([(NodeId(0), c)]),
            rho: BTreeMap::new(),
        };
    };
    let root = NodeId(bd.shell.max_id().map_or(0, |m| m.0 + 1));
    let (f, mut pol, links) = bd.shell.clone().into_parts();
    let mut levels = f.levels().to_vec();
    levels.push(BTreeSet::from([root]));
    let mut parent = f.parents().clone();
    for &t in f.top() {
        parent.insert(t, root);
    }
    let forest = crate::forest::Forest::new(cell.dim, levels, parent).expect("adding a root");
    pol.insert(root, cell.polarity);
    let mut labels = bd.labels.clone();
    labels.insert(root, c);
    let mut rho = bd.rho.clone();
    rho.insert(root, LevelMap::identity(f.nodes()));
    Diagram { shell: Shell::new(forest, pol, links), labels, rho }
}

/// Labels a valid shell with freshly registered cells, one conjugate pair per
/// class of nodes identified through linking isomorphisms.
pub fn label_freely(reg: &mut Registry, shell: &Shell, prefix: &str) -> Diagram {
    let f = shell.forest();
    // edges t -> σ(t) carrying the restricted σ
    let mut adj: BTreeMap<NodeId, Vec<(NodeId, NodeId, NodeId)>> = BTreeMap::new();
    for &(a, b) in shell.links().keys() {
        for t in f.descendants(a) {
            let u = shell.links()[&(a, b)].get(t).expect("σ is total on the subtree");
            adj.entry(t).or_default().push((u, a, b));
            adj.entry(u).or_default().push((t, b, a));
        }
    }
    let mut labels: BTreeMap<NodeId, CellId> = BTreeMap::new();
    let mut rho: BTreeMap<NodeId, LevelMap> = BTreeMap::new();
    let mut counter = 0usize;
    for level in 0..=f.dim() {
        for &rep in f.level(level) {
            if labels.contains_key(&rep) {
                continue;
            }
            // to_rep[x]: map from the subtree at x onto the subtree at rep
            let mut to_rep: BTreeMap<NodeId, LevelMap> = BTreeMap::new();
            to_rep.insert(rep, LevelMap::identity(f.descendants(rep)));
            let mut queue = VecDeque::from([rep]);
            while let Some(x) = queue.pop_front() {
                for &(y, a, b) in adj.get(&x).map_or(&[][..], |v| v.as_slice()) {
                    if to_rep.contains_key(&y) {
                        continue;
                    }
                    // σ⟨b,a⟩ maps the subtree at y back to the subtree at x
                    let back = shell.links().get(&(b, a)).cloned().unwrap_or_else(|| shell.links()[&(a, b)].inverse());
                    let m = back.restrict(f.descendants(y)).then(&to_rep[&x]);
                    to_rep.insert(y, m);
                    queue.push_back(y);
                }
            }
            let boundary = (level > 0).then(|| {
                let mut bd = Diagram {
                    shell: shell.clone(),
                    labels: labels.clone(),
                    rho: rho.clone(),
                }
                .boundary_of(rep);
                if shell.polarity(rep) == Polarity::Neg {
                    bd = dual_unchecked(reg, &bd);
                }
                bd
            });
            let name = format!("{prefix}{level}_{counter}");
            counter += 1;
            let (pos, neg) = reg.register_cell_pair(&name, level, boundary).expect("free labeling yields frames");
            for (x, m) in to_rep {
                labels.insert(x, if shell.polarity(x) == Polarity::Pos { pos } else { neg });
                if level > 0 {
                    rho.insert(x, m.restrict(f.descendants(x).into_iter().skip(1)));
                }
            }
        }
    }
    Diagram { shell: shell.clone(), labels, rho }
}

/// A 0-frame: one level-0 node per cell, numbered from 0.
pub fn zero_frame(reg: &Registry, cells: &[CellId]) -> Diagram {
    let nodes: BTreeSet<NodeId> = (0..cells.len() as u32).map(NodeId).collect();
    let forest = crate::forest::Forest::new(0, vec![nodes], BTreeMap::new()).expect("flat forest");
    let pol = cells.iter().enumerate().map(|(i, &c)| (NodeId(i as u32), reg.cell(c).polarity)).collect();
    let labels = cells.iter().enumerate().map(|(i, &c)| (NodeId(i as u32), c)).collect();
    Diagram { shell: Shell::new(forest, pol, BTreeMap::new()), labels, rho: BTreeMap::new() }
}

/// Glues diagrams of equal dimension along links. Piece `i` is shifted past the
/// ids of the pieces before it; `offsets()` of the result reports the shifts.
/// Each join `(i, a, j, b)` links node `a` of piece `i` to node `b` of piece `j`,
/// with σ derived from the boundary identifications. The result is not validated.
pub fn paste(pieces: &[Diagram], joins: &[(usize, NodeId, usize, NodeId)]) -> (Diagram, Vec<u32>) {
    assert!(!pieces.is_empty(), "nothing to paste");
    let mut offsets = Vec::new();
    let mut next = 0u32;
    let mut acc: Option<Diagram> = None;
    for p in pieces {
        let off = next;
        offsets.push(off);
        let moved = p.rename(&|n| NodeId(n.0 + off));
        next = moved.shell.max_id().map_or(next, |m| m.0 + 1);
        acc = Some(match acc {
            None => moved,
            Some(a) => a.union(&moved),
        });
    }
    let mut d = acc.unwrap();
    for &(i, a, j, b) in joins {
        let (a, b) = (NodeId(a.0 + offsets[i]), NodeId(b.0 + offsets[j]));
        let f = d.shell.forest();
        let mut sigma = LevelMap::new();
        sigma.insert(a, b);
        if let (Some(ra), Some(rb)) = (d.rho.get(&a), d.rho.get(&b)) {
            let back = rb.inverse();
            for t in f.descendants(a).into_iter().skip(1) {
                let u = ra.get(t).and_then(|x| back.get(x)).expect("boundaries of linked nodes must match");
                sigma.insert(t, u);
            }
        }
        let inv = sigma.inverse();
        d.shell = d.shell.with_link(a, b, sigma).with_link(b, a, inv);
    }
    (d, offsets)
}
