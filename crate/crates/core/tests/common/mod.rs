//! Oracles, corpora and mutants shared by the integration tests.
//!
//! The oracles here are written directly from the definitions and share no
//! code with the library beyond plain data access.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use ohg::forest::{canonical_code, enumerate_isomorphisms, Forest, LevelMap, NodeId};
use ohg::gallery::build_gallery;
use ohg::gen::{self, GenConfig};
use ohg::hypergraph::{validate_frame, Diagram, Registry};
use ohg::shell::{validate, Condition, Polarity, Report, Shell, ShellKind};

pub type Map = BTreeMap<NodeId, NodeId>;

// ---------------------------------------------------------------------------
// brute-force isomorphisms

fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Visits every level-preserving bijection `a → b` whose parent squares commute,
/// trying every permutation of every level from the top down. `visit` returns
/// `false` to stop.
pub fn level_bijections(a: &Forest, b: &Forest, visit: &mut dyn FnMut(&Map) -> bool) {
    if a.dim() != b.dim() || (0..=a.dim()).any(|i| a.level(i).len() != b.level(i).len()) {
        return;
    }
    fn go(a: &Forest, b: &Forest, level: usize, m: &mut Map, visit: &mut dyn FnMut(&Map) -> bool) -> bool {
        let xs: Vec<NodeId> = a.level(level).iter().copied().collect();
        let ys: Vec<NodeId> = b.level(level).iter().copied().collect();
        for p in permutations(&ys) {
            let ok = xs.iter().zip(&p).all(|(&x, &y)| match a.parent(x) {
                Some(px) => m.get(&px).copied() == b.parent(y),
                None => b.parent(y).is_none(),
            });
            if !ok {
                continue;
            }
            for (&x, &y) in xs.iter().zip(&p) {
                m.insert(x, y);
            }
            let more = if level == 0 { visit(m) } else { go(a, b, level - 1, m, visit) };
            for x in &xs {
                m.remove(x);
            }
            if !more {
                return false;
            }
        }
        true
    }
    let mut m = Map::new();
    go(a, b, a.dim(), &mut m, visit);
}

/// Shell isomorphism clauses: polarity, links, and `m ∘ σ = σ′ ∘ m`.
pub fn is_shell_iso(m: &Map, a: &Shell, b: &Shell) -> bool {
    if a.links().len() != b.links().len() {
        return false;
    }
    if a.forest().nodes().any(|x| a.polarity(x) != b.polarity(m[&x])) {
        return false;
    }
    a.links().iter().all(|(&(s, t), sigma)| {
        let Some(tau) = b.links().get(&(m[&s], m[&t])) else { return false };
        sigma.len() == tau.len() && sigma.iter().all(|(x, y)| tau.get(m[&x]) == Some(m[&y]))
    })
}

/// Adds the label clause and `ρ′_{m(s)}(m(t)) = ρ_s(t)`.
pub fn is_diagram_iso(m: &Map, a: &Diagram, b: &Diagram) -> bool {
    is_shell_iso(m, &a.shell, &b.shell)
        && a.labels.iter().all(|(x, c)| b.labels.get(&m[x]) == Some(c))
        && a.rho.iter().all(|(s, r)| {
            let Some(r2) = b.rho.get(&m[s]) else { return false };
            r.len() == r2.len() && r.iter().all(|(t, u)| r2.get(m[&t]) == Some(u))
        })
}

pub fn brute_shell_iso(a: &Shell, b: &Shell) -> Option<Map> {
    let mut found = None;
    level_bijections(a.forest(), b.forest(), &mut |m| {
        if is_shell_iso(m, a, b) {
            found = Some(m.clone());
            return false;
        }
        true
    });
    found
}

pub fn brute_diagram_iso(a: &Diagram, b: &Diagram) -> Option<Map> {
    let mut found = None;
    level_bijections(a.shell.forest(), b.shell.forest(), &mut |m| {
        if is_diagram_iso(m, a, b) {
            found = Some(m.clone());
            return false;
        }
        true
    });
    found
}

pub fn to_map(m: &LevelMap) -> Map {
    m.iter().collect()
}

/// Decoration-preserving tree isomorphisms, counted by brute force.
pub fn brute_tree_isos(a: &Forest, b: &Forest, deco: &dyn Fn(NodeId) -> u8, deco_b: &dyn Fn(NodeId) -> u8) -> usize {
    let mut n = 0;
    level_bijections(a, b, &mut |m| {
        if m.iter().all(|(&x, &y)| deco(x) == deco_b(y)) {
            n += 1;
        }
        true
    });
    n
}

/// Every leveled tree with at most `max_nodes` nodes, as raw parent assignments
/// (isomorphic copies included).
pub fn all_trees(max_nodes: usize) -> Vec<Forest> {
    let mut out = Vec::new();
    for dim in 0..max_nodes {
        // level sizes from the top; a level may be empty only if all below are
        let mut sizes = vec![vec![1usize]];
        for _ in 0..dim {
            let mut next = Vec::new();
            for s in &sizes {
                let used: usize = s.iter().sum();
                let last = *s.last().unwrap();
                let hi = if last == 0 { 0 } else { max_nodes - used };
                for k in 0..=hi {
                    let mut t = s.clone();
                    t.push(k);
                    next.push(t);
                }
            }
            sizes = next;
        }
        for s in sizes {
            trees_with_sizes(dim, &s, &mut out);
        }
    }
    out
}

/// Compares canonical codes and isomorphism enumeration against brute force on
/// every tree with at most `max_nodes` nodes under every 0/1 decoration.
/// Returns `(comparisons, disagreements)`.
pub fn decorated_tree_check(max_nodes: usize) -> (usize, usize) {
    let mut decorated: Vec<(Forest, Vec<u8>)> = Vec::new();
    for t in all_trees(max_nodes) {
        let n = t.node_count();
        for bits in 0..(1u32 << n) {
            decorated.push((t.clone(), (0..n).map(|i| (bits >> i & 1) as u8).collect()));
        }
    }
    let code = |(t, d): &(Forest, Vec<u8>)| canonical_code(t, &|x| vec![d[x.0 as usize]]);
    // codes of different level profiles cannot be compared by brute force, so group first
    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (i, (t, _)) in decorated.iter().enumerate() {
        groups.entry((0..=t.dim()).map(|l| t.level(l).len()).collect()).or_default().push(i);
    }
    let (mut checked, mut bad) = (0, 0);
    let mut all_codes = BTreeSet::new();
    for members in groups.values() {
        let mut reps: Vec<(usize, Vec<u8>)> = Vec::new();
        for &i in members {
            let (t, d) = &decorated[i];
            let c = code(&decorated[i]);
            all_codes.insert(c.clone());
            let mut found = false;
            for (r, rc) in &reps {
                let (rt, rd) = &decorated[*r];
                let slow = brute_tree_isos(t, rt, &|x| d[x.0 as usize], &|y| rd[y.0 as usize]);
                let fast = enumerate_isomorphisms(t, rt, &|x, y| d[x.0 as usize] == rd[y.0 as usize]).len();
                checked += 1;
                if (slow > 0) != (c == *rc) || slow != fast {
                    bad += 1;
                }
                found |= slow > 0;
            }
            if !found {
                reps.push((i, c));
            }
        }
    }
    // one code per class across all groups
    let classes: usize = groups
        .values()
        .map(|m| m.iter().map(|&i| code(&decorated[i])).collect::<BTreeSet<_>>().len())
        .sum();
    if classes != all_codes.len() {
        bad += 1;
    }
    (checked, bad)
}

fn trees_with_sizes(dim: usize, sizes_top_down: &[usize], out: &mut Vec<Forest>) {
    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); dim + 1];
    let mut next = 0u32;
    for (i, &k) in sizes_top_down.iter().enumerate() {
        for _ in 0..k {
            levels[dim - i].push(NodeId(next));
            next += 1;
        }
    }
    let mut choices: Vec<(NodeId, Vec<NodeId>)> = Vec::new();
    for l in 0..dim {
        for &x in &levels[l] {
            choices.push((x, levels[l + 1].clone()));
        }
    }
    let mut idx = vec![0usize; choices.len()];
    loop {
        let parent: BTreeMap<NodeId, NodeId> = choices.iter().zip(&idx).map(|((x, ps), &i)| (*x, ps[i])).collect();
        let lv = levels.iter().map(|l| l.iter().copied().collect()).collect();
        out.push(Forest::new(dim, lv, parent).expect("enumerated tree"));
        let mut k = 0;
        loop {
            if k == choices.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < choices[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// commutativity walks

/// One chain step from anchor `x` with point `q`: take every link out of `x`,
/// transport the point, and move to the parent of the far end or to its child
/// containing the point.
pub fn chain_steps(xi: &Shell, x: NodeId, q: NodeId) -> Vec<(NodeId, NodeId)> {
    let f = xi.forest();
    let mut out = Vec::new();
    for (&(s, t), sigma) in xi.links() {
        if s != x {
            continue;
        }
        let Some(q2) = sigma.get(q) else { continue };
        if let Some(p) = f.parent(t) {
            out.push((p, q2));
        }
        if q2 != t {
            let mut c = q2;
            while f.parent(c) != Some(t) {
                c = f.parent(c).expect("point lies under the link end");
            }
            out.push((c, q2));
        }
    }
    out
}

/// Depth-first enumeration of chains of at most `max_links` links, read from
/// their lowest anchor, looking for one that returns to its anchor with a
/// different point.
pub fn commutativity_walk(xi: &Shell, max_links: usize) -> Option<Vec<(NodeId, NodeId)>> {
    let f = xi.forest();
    let anchors: BTreeSet<NodeId> = xi.links().keys().map(|&(s, _)| s).collect();
    for &a in &anchors {
        let floor = f.level_of(a).unwrap();
        for p in f.descendants(a) {
            let mut path = vec![(a, p)];
            if walk(xi, a, p, floor, max_links, &anchors, &mut path) {
                return Some(path);
            }
        }
    }
    None
}

fn walk(
    xi: &Shell,
    a: NodeId,
    p: NodeId,
    floor: usize,
    left: usize,
    anchors: &BTreeSet<NodeId>,
    path: &mut Vec<(NodeId, NodeId)>,
) -> bool {
    if left == 0 {
        return false;
    }
    let (x, q) = *path.last().unwrap();
    for (y, r) in chain_steps(xi, x, q) {
        if xi.forest().level_of(y).unwrap() < floor || !anchors.contains(&y) {
            continue;
        }
        path.push((y, r));
        if y == a && r != p {
            return true;
        }
        if walk(xi, a, p, floor, left - 1, anchors, path) {
            return true;
        }
        path.pop();
    }
    false
}

// ---------------------------------------------------------------------------
// corpora

/// Random valid pasting shells in dimensions 1 to 3 with at most 12 top nodes.
pub fn pasting_corpus(count: usize, seed: u64) -> Vec<Shell> {
    let cfg = GenConfig { max_tops: 12, ..GenConfig::default() };
    (0..count)
        .map(|i| {
            let mut rng = gen::rng(seed + i as u64);
            let n = 1 + i % 3;
            let sign = if i % 2 == 0 { Polarity::Pos } else { Polarity::Neg };
            gen::pasting_shell(&mut rng, n, sign, &cfg)
        })
        .collect()
}

/// Random directed pasting shells in dimensions 1 to 3.
pub fn directed_corpus(count: usize, seed: u64) -> Vec<Shell> {
    let cfg = GenConfig { max_tops: 5, ..GenConfig::directed() };
    (0..count)
        .map(|i| {
            let mut rng = gen::rng(seed + i as u64);
            let n = 1 + i % 3;
            let sign = if i % 2 == 0 { Polarity::Neg } else { Polarity::Pos };
            gen::pasting_shell(&mut rng, n, sign, &cfg)
        })
        .collect()
}

/// Random directed frames, freshly labeled, in dimensions 1 to 3.
pub fn directed_frames(count: usize, seed: u64) -> Vec<(Registry, Diagram)> {
    let cfg = GenConfig { max_tops: 4, ..GenConfig::directed() };
    (0..count)
        .map(|i| {
            let mut rng = gen::rng(seed + i as u64);
            let mut reg = Registry::new();
            let d = gen::frame(&mut rng, &mut reg, 1 + i % 3, &cfg, "z");
            (reg, d)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// mutants

pub enum Mutant {
    Shell(Shell),
    Frame(Registry, Diagram),
}

impl Mutant {
    pub fn report(&self) -> Report {
        match self {
            Mutant::Shell(s) => validate(s, ShellKind::Frame),
            Mutant::Frame(reg, d) => validate_frame(reg, d),
        }
    }
}

fn single(a: u32, b: u32) -> LevelMap {
    [(NodeId(a), NodeId(b))].into_iter().collect()
}

/// Replaces the level-0 links of a 1-frame shell by the given directed pairs.
fn relink(xi: &Shell, pairs: &[(u32, u32)]) -> Shell {
    let mut out = xi.clone();
    for &(a, b) in xi.links().keys() {
        out = out.without_link(a, b);
    }
    for &(a, b) in pairs {
        out = out.with_link(NodeId(a), NodeId(b), single(a, b));
    }
    out
}

fn both(pairs: &[(u32, u32)]) -> Vec<(u32, u32)> {
    pairs.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect()
}

/// The labeled 1-frame `GLOBE1`: bodies n2 (−) over feet n0 (+), n1 (−) and
/// n3 (+) over n4 (−), n5 (+); links n0 ↔ n4 and n1 ↔ n5.
pub fn globe1_frame() -> (Registry, Diagram) {
    let g = build_gallery("globe2").unwrap();
    let d = g.structures["boundary"].diagram().unwrap().clone();
    (g.registry, d)
}

/// The first generated directed 3-frame in which swapping one linking
/// isomorphism for another polarity-reversing tree isomorphism breaks exactly
/// `want`.
pub fn sigma_mutant(want: Condition) -> Shell {
    for seed in 0.. {
        let mut rng = gen::rng(seed);
        let xi = gen::frame_shell(&mut rng, 3, &GenConfig { max_tops: 3, ..GenConfig::directed() });
        let f = xi.forest();
        for (&(a, b), sigma) in xi.links() {
            if a > b {
                continue;
            }
            let (sa, sb) = (f.subtree(a).unwrap(), f.subtree(b).unwrap());
            for alt in enumerate_isomorphisms(&sa, &sb, &|x, y| xi.polarity(x) != xi.polarity(y)) {
                if &alt == sigma {
                    continue;
                }
                let inv = alt.inverse();
                let m = xi.without_link(a, b).without_link(b, a).with_link(a, b, alt).with_link(b, a, inv);
                if validate(&m, ShellKind::Frame).conditions() == BTreeSet::from([want]) {
                    return m;
                }
            }
        }
    }
    unreachable!()
}

/// The 2-frame boundary of the 3-globe with one extra level-0 link between
/// its two top cells. Inside each cell every node keeps exactly one partner.
fn mutuality_mutant() -> Shell {
    let g = build_gallery("globe3").unwrap();
    let xi = g.structures["boundary"].shell().clone();
    let f = xi.forest();
    let (&(s, s2), sigma) = xi.links().iter().find(|(&(s, _), _)| f.level_of(s) == Some(1)).unwrap();
    assert!(f.parent(s) != f.parent(s2));
    let p = f.children(s).next().unwrap();
    let p2 = sigma.get(p).unwrap();
    xi.with_link(p, p2, [(p, p2)].into_iter().collect()).with_link(p2, p, [(p2, p)].into_iter().collect())
}

/// Ten mutants, one per validity condition, each meant to fail exactly that condition.
pub fn mutants() -> Vec<(Condition, Mutant)> {
    let (reg, globe1) = globe1_frame();
    let xi = globe1.shell.clone();

    // ∂α for α: f ⇒ g with f, g: x → y; feet n0 (x), n1 (y*) under f*, n3 (x*), n4 (y) under g
    let c = build_gallery("comp2v").unwrap();
    let alpha = c.registry.by_name("alpha").unwrap();
    let bd = c.registry.boundary(alpha).unwrap().clone();
    let swapped = {
        let f = bd.shell.forest();
        let bodies: Vec<NodeId> = f.level(1).iter().copied().collect();
        let feet = |b: NodeId| -> Vec<NodeId> { f.children(b).collect() };
        let (a0, a1) = (feet(bodies[0])[0], feet(bodies[0])[1]);
        let (b0, b1) = (feet(bodies[1])[0], feet(bodies[1])[1]);
        let mut s = bd.shell.clone();
        for &k in bd.shell.links().keys() {
            s = s.without_link(k.0, k.1);
        }
        for (x, y) in [(a0, a1), (a1, a0), (b0, b1), (b1, b0)] {
            s = s.with_link(x, y, [(x, y)].into_iter().collect());
        }
        Diagram { shell: s, ..bd.clone() }
    };

    let mut unlabeled = globe1.clone();
    unlabeled.labels.insert(NodeId(2), reg.by_name("g0*").unwrap());
    let mut bad_rho = globe1.clone();
    bad_rho.rho.insert(NodeId(2), [(NodeId(0), NodeId(1)), (NodeId(1), NodeId(0))].into_iter().collect());

    vec![
        (Condition::Mutuality, Mutant::Shell(mutuality_mutant())),
        (Condition::Bijectivity, Mutant::Shell(relink(&xi, &both(&[(0, 4), (1, 5), (0, 1)])))),
        (Condition::Involution, Mutant::Shell(relink(&xi, &[(0, 4), (4, 5), (5, 1), (1, 0)]))),
        (Condition::Conjugation, Mutant::Shell(relink(&xi, &both(&[(0, 5), (1, 4)])))),
        (Condition::CorrespondenceOfLinks, Mutant::Shell(sigma_mutant(Condition::CorrespondenceOfLinks))),
        (Condition::CommutativityOfLinks, Mutant::Shell(sigma_mutant(Condition::CommutativityOfLinks))),
        (Condition::Closedness, Mutant::Shell(relink(&xi, &both(&[(1, 5)])))),
        (Condition::AssignmentOfCells, Mutant::Frame(reg.clone(), unlabeled)),
        (Condition::IdentificationInBoundaries, Mutant::Frame(reg.clone(), bad_rho)),
        (Condition::CompatibilityOnLinks, Mutant::Frame(c.registry.clone(), swapped)),
    ]
}
