//! Seeded random shells and frames for property tests and `selftest`.
//!
//! Pasting shells grow one cell at a time: an open node `y` is picked and a new
//! cell is built whose boundary contains a node isomorphic to the dual of the
//! cell at `y`, then the two are linked. Cell boundaries are closures of
//! smaller random pasting shells.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IteratorRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::forest::{Forest, NodeId};
use crate::hypergraph::{label_freely, Diagram, Registry};
use crate::pasting::{close_shell, open_nodes};
use crate::shell::{shell_isomorphism, validate_pasting_shell, Polarity, Shell};

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Upper bound on top nodes of a generated pasting shell.
    pub max_tops: usize,
    /// Upper bound on the domain size of a generated cell.
    pub max_inner: usize,
    /// Homogeneous polarities and tree-shaped gluing only.
    pub directed: bool,
    /// Chance of trying an extra link between two open nodes after each gluing step.
    pub extra_link: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig { max_tops: 6, max_inner: 2, directed: false, extra_link: 0.2 }
    }
}

impl GenConfig {
    pub fn directed() -> Self {
        GenConfig { directed: true, extra_link: 0.0, ..GenConfig::default() }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn polarity<R: Rng>(rng: &mut R) -> Polarity {
    if rng.gen_bool(0.5) {
        Polarity::Pos
    } else {
        Polarity::Neg
    }
}

fn next_id(s: &Shell) -> u32 {
    s.max_id().map_or(0, |m| m.0 + 1)
}

/// Adds a root of polarity `p` above every top node of `frame`.
pub fn cone(frame: &Shell, p: Polarity) -> Shell {
    let root = NodeId(next_id(frame));
    let (f, mut pol, links) = frame.clone().into_parts();
    let mut levels = f.levels().to_vec();
    levels.push(BTreeSet::from([root]));
    let mut parent = f.parents().clone();
    for &t in f.top() {
        parent.insert(t, root);
    }
    pol.insert(root, p);
    Shell::new(Forest::new(f.dim() + 1, levels, parent).expect("cone"), pol, links)
}

fn points(pols: &[Polarity]) -> Shell {
    let nodes: BTreeSet<NodeId> = (0..pols.len() as u32).map(NodeId).collect();
    let forest = Forest::new(0, vec![nodes], BTreeMap::new()).expect("flat");
    let pol = pols.iter().enumerate().map(|(i, &p)| (NodeId(i as u32), p)).collect();
    Shell::new(forest, pol, BTreeMap::new())
}

/// A random `n`-cell shell with root polarity `p`.
pub fn cell_shell<R: Rng>(rng: &mut R, n: usize, p: Polarity, cfg: &GenConfig) -> Shell {
    if n == 0 {
        return points(&[p]);
    }
    let inner = GenConfig { max_tops: cfg.max_inner, ..cfg.clone() };
    let q = pasting_shell(rng, n - 1, p.flip(), &inner);
    let cl = close_shell(&q, p).expect("generated pasting shells close");
    cone(&cl.closure, p)
}

/// A random `n`-pasting shell with `1..=max_tops` top nodes. In directed mode
/// every top node has polarity `sign`, and in dimension 0 there is one point
/// since several points are never connected.
pub fn pasting_shell<R: Rng>(rng: &mut R, n: usize, sign: Polarity, cfg: &GenConfig) -> Shell {
    let most = if cfg.directed && n == 0 { 1 } else { cfg.max_tops.max(1) };
    let target = rng.gen_range(1..=most);
    let first = if cfg.directed { sign } else { polarity(rng) };
    let start = if n == 0 { points(&[first]) } else { cell_shell(rng, n, first, cfg) };
    grow(rng, start, n, sign, target, cfg)
}

/// Glues random cells onto `xi` until it has `target` top nodes.
fn grow<R: Rng>(rng: &mut R, mut xi: Shell, n: usize, sign: Polarity, target: usize, cfg: &GenConfig) -> Shell {
    while xi.forest().top().len() < target {
        let p = if cfg.directed { sign } else { polarity(rng) };
        if n == 0 {
            let id = NodeId(next_id(&xi));
            let (f, mut pol, links) = xi.into_parts();
            let mut level = f.level(0).clone();
            level.insert(id);
            pol.insert(id, p);
            xi = Shell::new(Forest::new(0, vec![level], BTreeMap::new()).expect("flat"), pol, links);
            continue;
        }
        let Some(&y) = open_nodes(&xi).iter().choose(rng) else { break };
        let Some(next) = glue_at(rng, &xi, y, p, cfg) else { break };
        xi = next;
        if !cfg.directed && rng.gen_bool(cfg.extra_link) {
            if let Some(next) = extra_link(rng, &xi) {
                xi = next;
            }
        }
    }
    xi
}

/// Builds a cell of polarity `p` containing a node dual to the cell at `y` and links it to `y`.
fn glue_at<R: Rng>(rng: &mut R, xi: &Shell, y: NodeId, p: Polarity, cfg: &GenConfig) -> Option<Shell> {
    let n = xi.dim();
    let d = xi.cell_at(y);
    let (c, y_new) = if xi.polarity(y) == p {
        // the dual of the cell at y becomes a domain body
        let body = d.dual();
        let want = rng.gen_range(1..=cfg.max_inner.max(1));
        let q = grow(rng, body, n - 1, p.flip(), want, cfg);
        let cl = close_shell(&q, p).ok()?;
        (cone(&cl.closure, p), y)
    } else {
        // the closer of the single cell at y is its dual
        let cl = close_shell(&d, p).ok()?;
        (cone(&cl.closure, p), cl.root)
    };
    let off = next_id(xi);
    let c = c.rename(&|x| NodeId(x.0 + off));
    let y_new = NodeId(y_new.0 + off);
    let sigma = shell_isomorphism(&d, &c.cell_at(y_new).dual()).ok()??;
    let joined = xi.union(&c).with_link(y, y_new, sigma.clone()).with_link(y_new, y, sigma.inverse());
    validate_pasting_shell(&joined).is_ok().then_some(joined)
}

/// Tries to link two open nodes whose cells are dual to each other.
fn extra_link<R: Rng>(rng: &mut R, xi: &Shell) -> Option<Shell> {
    let open: Vec<NodeId> = open_nodes(xi).into_iter().collect();
    let a = *open.iter().choose(rng)?;
    let da = xi.cell_at(a).dual();
    for &b in &open {
        if b == a || xi.polarity(b) == xi.polarity(a) || xi.forest().parent(a) == xi.forest().parent(b) {
            continue;
        }
        let Ok(Some(sigma)) = shell_isomorphism(&xi.cell_at(b), &da) else { continue };
        let inv = sigma.inverse();
        let joined = xi.with_link(b, a, sigma).with_link(a, b, inv);
        if validate_pasting_shell(&joined).is_ok() {
            return Some(joined);
        }
    }
    None
}

/// The closure of a random `n`-pasting shell.
pub fn frame_shell<R: Rng>(rng: &mut R, n: usize, cfg: &GenConfig) -> Shell {
    let sign = polarity(rng);
    let xi = pasting_shell(rng, n, sign, cfg);
    let p = if cfg.directed { sign.flip() } else { polarity(rng) };
    close_shell(&xi, p).expect("generated pasting shells close").closure
}

/// A random frame, labeled by freshly registered cells.
pub fn frame<R: Rng>(rng: &mut R, reg: &mut Registry, n: usize, cfg: &GenConfig, prefix: &str) -> Diagram {
    let shell = frame_shell(rng, n, cfg);
    label_freely(reg, &shell, prefix)
}
