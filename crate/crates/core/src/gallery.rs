//! Named fixture hypergraphs together with a few structures built over them.
//!
//! The 2-cell shapes of `doublegraph` and `fc_multigraph` are small
//! reconstructions: each 2-cell has a chain of 1-cells as domain and a single
//! 1-cell as codomain.

use std::collections::BTreeMap;

use crate::forest::NodeId;
use crate::hypergraph::{cell_diagram, paste, validate_diagram, zero_frame, CellId, Diagram, Registry};
use crate::pasting::close_diagram;
use crate::shell::{validate, Report, Shell, ShellKind};

pub const GALLERY_NAMES: &[&str] = &[
    "empty",
    "rewrite1",
    "omega_multigraph",
    "doublegraph",
    "fc_multigraph",
    "globe0",
    "globe1",
    "globe2",
    "globe3",
    "comp2v",
    "comp2h",
    "globe2-weak",
];

/// A shell or a labeled diagram, tagged with the kind it is meant to be.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Shell { kind: ShellKind, shell: Shell },
    Diagram { kind: ShellKind, diagram: Diagram },
}

impl Structure {
    pub fn kind(&self) -> ShellKind {
        match self {
            Structure::Shell { kind, .. } | Structure::Diagram { kind, .. } => *kind,
        }
    }

    pub fn shell(&self) -> &Shell {
        match self {
            Structure::Shell { shell, .. } => shell,
            Structure::Diagram { diagram, .. } => &diagram.shell,
        }
    }

    pub fn diagram(&self) -> Option<&Diagram> {
        match self {
            Structure::Diagram { diagram, .. } => Some(diagram),
            Structure::Shell { .. } => None,
        }
    }

    pub fn validate(&self, reg: &Registry) -> Report {
        match self {
            Structure::Shell { kind, shell } => validate(shell, *kind),
            Structure::Diagram { kind, diagram } => validate_diagram(reg, diagram, *kind),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Gallery {
    pub name: String,
    pub registry: Registry,
    pub structures: BTreeMap<String, Structure>,
}

impl Gallery {
    pub(crate) fn new(name: &str) -> Gallery {
        Gallery { name: name.to_string(), ..Gallery::default() }
    }

    pub(crate) fn add(&mut self, name: &str, kind: ShellKind, diagram: Diagram) {
        self.structures.insert(name.to_string(), Structure::Diagram { kind, diagram });
    }

    pub(crate) fn vertex(&mut self, name: &str) -> CellId {
        self.registry.register_cell_pair(name, 0, None).expect("0-cell").0
    }

    /// A 1-cell with source node 0 and target node 1 in its boundary.
    pub(crate) fn arrow(&mut self, name: &str, src: CellId, tgt: CellId) -> CellId {
        let bd = zero_frame(&self.registry, &[self.registry.conj(src), tgt]);
        self.registry.register_cell_pair(name, 1, Some(bd)).expect("arrow boundary").0
    }

    /// A 2-cell from a composable chain of 1-cells to a single 1-cell.
    /// An empty chain gives a unit cell, whose codomain must be a loop.
    pub(crate) fn two_cell(&mut self, name: &str, dom: &[CellId], cod: CellId) -> CellId {
        let bd = chain_frame(&self.registry, dom, cod);
        self.registry.register_cell_pair(name, 2, Some(bd)).expect("2-cell boundary").0
    }

}

/// The 1-frame `dom* ; cod` of a 2-cell. Piece `i < dom.len()` is the dual of
/// `dom[i]`, the last piece is `cod`; in each piece node 0 is the source foot
/// and node 1 the target foot.
pub(crate) fn chain_frame(reg: &Registry, dom: &[CellId], cod: CellId) -> Diagram {
    let mut pieces: Vec<Diagram> = dom.iter().map(|&d| cell_diagram(reg, reg.conj(d))).collect();
    pieces.push(cell_diagram(reg, cod));
    let k = dom.len();
    let (s, t) = (NodeId(0), NodeId(1));
    let mut joins = Vec::new();
    if k == 0 {
        joins.push((0, s, 0, t));
    } else {
        joins.push((k, s, 0, s));
        for i in 1..k {
            joins.push((i - 1, t, i, s));
        }
        joins.push((k - 1, t, k, t));
    }
    paste(&pieces, &joins).0
}

/// Glues negative cells along level-(n−1) nodes: `(i, a, j, b)` links node `a`
/// of the boundary of piece `i` to node `b` of piece `j`.
fn negative_pasting(reg: &Registry, cells: &[CellId], joins: &[(usize, NodeId, usize, NodeId)]) -> Diagram {
    let pieces: Vec<Diagram> = cells.iter().map(|&c| cell_diagram(reg, reg.conj(c))).collect();
    paste(&pieces, joins).0
}

fn globe(name: &str, n: usize) -> Gallery {
    let mut g = Gallery::new(name);
    let mut gs = vec![g.vertex("g0")];
    for k in 1..=n {
        let prev = gs[k - 1];
        let p = cell_diagram(&g.registry, g.registry.conj(prev));
        let (bd, _) = close_diagram(&g.registry, &p, prev).expect("globe boundary");
        gs.push(g.registry.register_cell_pair(&format!("g{k}"), k, Some(bd)).expect("globe cell").0);
    }
    let top = gs[n];
    g.add("cell", ShellKind::Cell, cell_diagram(&g.registry, top));
    g.add("pasting", ShellKind::Pasting, cell_diagram(&g.registry, g.registry.conj(top)));
    if n > 0 {
        g.add("boundary", ShellKind::Frame, g.registry.boundary(top).unwrap().clone());
    }
    g
}

fn rewrite1() -> Gallery {
    let mut g = Gallery::new("rewrite1");
    let [a, b, c] = ["a", "b", "c"].map(|v| g.vertex(v));
    let f = g.arrow("f", a, b);
    g.arrow("g", b, c);
    let bd = zero_frame(&g.registry, &[g.registry.conj(a), g.registry.conj(b), c]);
    let e = g.registry.register_cell_pair("e", 1, Some(bd)).unwrap().0;
    g.add("hyperedge", ShellKind::Cell, cell_diagram(&g.registry, e));
    g.add("f", ShellKind::Cell, cell_diagram(&g.registry, f));
    g
}

fn omega_multigraph() -> Gallery {
    let mut g = Gallery::new("omega_multigraph");
    let x = g.vertex("x");
    let f = g.arrow("f", x, x);
    let h = g.arrow("g", x, x);
    let alpha = g.two_cell("alpha", &[f], h);
    g.two_cell("mu", &[f, h], f);
    g.add("alpha", ShellKind::Cell, cell_diagram(&g.registry, alpha));
    g
}

fn doublegraph() -> Gallery {
    let mut g = Gallery::new("doublegraph");
    let [a, b, c, d] = ["a", "b", "c", "d"].map(|v| g.vertex(v));
    let v1 = g.arrow("v1", a, c);
    let v2 = g.arrow("v2", d, b);
    let h1 = g.arrow("h1", a, b);
    let h2 = g.arrow("h2", c, d);
    let sq = g.two_cell("square", &[v1, h2, v2], h1);
    g.add("square", ShellKind::Cell, cell_diagram(&g.registry, sq));
    g
}

fn fc_multigraph() -> Gallery {
    let mut g = Gallery::new("fc_multigraph");
    let [a, b, c, d, e] = ["a", "b", "c", "d", "e"].map(|v| g.vertex(v));
    let v1 = g.arrow("v1", a, c);
    let v3 = g.arrow("v3", c, b);
    let v2 = g.arrow("v2", e, b);
    let h0 = g.arrow("h0", a, b);
    let h2 = g.arrow("h2", c, d);
    let h3 = g.arrow("h3", d, e);
    g.two_cell("sq0", &[v1, v3], h0);
    let sq2 = g.two_cell("sq2", &[v1, h2, h3, v2], h0);
    g.add("sq2", ShellKind::Cell, cell_diagram(&g.registry, sq2));
    g
}

fn comp2v() -> Gallery {
    let mut g = Gallery::new("comp2v");
    let [x, y] = ["x", "y"].map(|v| g.vertex(v));
    let f = g.arrow("f", x, y);
    let h = g.arrow("g", x, y);
    let k = g.arrow("k", x, y);
    let alpha = g.two_cell("alpha", &[f], h);
    let beta = g.two_cell("beta", &[h], k);
    // in ∂α the codomain body is node 5; in ∂β the domain body is node 2
    let p = negative_pasting(&g.registry, &[alpha, beta], &[(0, NodeId(5), 1, NodeId(2))]);
    g.add("comp2v", ShellKind::Pasting, p);
    g
}

fn comp2h() -> Gallery {
    let mut g = Gallery::new("comp2h");
    let [x, y, z] = ["x", "y", "z"].map(|v| g.vertex(v));
    let f = g.arrow("f", x, y);
    let h = g.arrow("g", x, y);
    let k = g.arrow("k", y, z);
    let m = g.arrow("m", x, z);
    let alpha = g.two_cell("alpha", &[f], h);
    let beta = g.two_cell("beta", &[h, k], m);
    let p = negative_pasting(&g.registry, &[alpha, beta], &[(0, NodeId(5), 1, NodeId(2))]);
    g.add("comp2h", ShellKind::Pasting, p);
    g
}

#[derive(Debug, thiserror::Error)]
#[error("unknown gallery name {0:?}")]
pub struct UnknownGallery(pub String);

/// Builds a named fixture. `globeN` (also written `globe(N)`) works for any `N`.
pub fn build_gallery(name: &str) -> Result<Gallery, UnknownGallery> {
    let globe_dim = name
        .strip_prefix("globe(")
        .and_then(|r| r.strip_suffix(')'))
        .or_else(|| name.strip_prefix("globe"))
        .and_then(|d| d.parse::<usize>().ok());
    if let Some(n) = globe_dim {
        return Ok(globe(name, n));
    }
    Ok(match name {
        "empty" => Gallery::new("empty"),
        "rewrite1" => rewrite1(),
        "omega_multigraph" => omega_multigraph(),
        "doublegraph" => doublegraph(),
        "fc_multigraph" => fc_multigraph(),
        "comp2v" => comp2v(),
        "comp2h" => comp2h(),
        "globe2-weak" => crate::weakcat::globe2_certificate().0,
        _ => return Err(UnknownGallery(name.to_string())),
    })
}
