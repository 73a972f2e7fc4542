//! Isomorphism search for shells and labeled diagrams.
//!
//! Backtracking over top-level choices with constraint propagation: parents,
//! link partners, linking isomorphisms and boundary identifications all force
//! further assignments. Candidates are pre-filtered by decorated subtree codes.

use std::collections::{BTreeMap, BTreeSet};

use crate::forest::{check_homomorphism, LevelMap, NodeId};
use crate::hypergraph::CellId;
use crate::shell::Shell;

/// What an isomorphism has to respect.
#[derive(Clone, Copy, Debug)]
pub struct View<'a> {
    pub shell: &'a Shell,
    pub labels: Option<&'a BTreeMap<NodeId, CellId>>,
    pub rho: Option<&'a BTreeMap<NodeId, LevelMap>>,
}

impl<'a> View<'a> {
    pub fn shell(shell: &'a Shell) -> View<'a> {
        View { shell, labels: None, rho: None }
    }

    pub fn labeled(
        shell: &'a Shell,
        labels: &'a BTreeMap<NodeId, CellId>,
        rho: &'a BTreeMap<NodeId, LevelMap>,
    ) -> View<'a> {
        View { shell, labels: Some(labels), rho: Some(rho) }
    }

    fn key(&self, n: NodeId) -> Vec<u8> {
        let mut k = vec![self.shell.polarity(n).sign() as u8, self.shell.partners(n).len() as u8];
        if let Some(l) = self.labels.and_then(|l| l.get(&n)) {
            k.extend_from_slice(&l.0.to_le_bytes());
        }
        k
    }

    fn rho_at(&self, n: NodeId) -> Option<&'a LevelMap> {
        self.rho.and_then(|r| r.get(&n))
    }
}

/// Lists the clauses `m` violates as an isomorphism `a → b`; empty means it is one.
pub fn check(m: &LevelMap, a: &View, b: &View) -> Vec<String> {
    let mut out = Vec::new();
    let (fa, fb) = (a.shell.forest(), b.shell.forest());
    if fa.dim() != fb.dim() {
        out.push("dimension differs".into());
        return out;
    }
    let hom = check_homomorphism(m, fa, fb);
    if !hom.is_isomorphism() {
        out.push(format!("not a forest isomorphism: {:?}", hom.violations));
        return out;
    }
    for x in fa.nodes() {
        let y = m.get(x).unwrap();
        if a.shell.polarity(x) != b.shell.polarity(y) {
            out.push(format!("polarity differs at {x}"));
        }
        if a.labels.map(|l| l.get(&x)) != b.labels.map(|l| l.get(&y)) {
            out.push(format!("label differs at {x}"));
        }
        match (a.rho_at(x), b.rho_at(y)) {
            (None, None) => {}
            (Some(ra), Some(rb)) => {
                for t in fa.descendants(x).into_iter().skip(1) {
                    if ra.get(t) != m.get(t).and_then(|u| rb.get(u)) {
                        out.push(format!("ρ differs at {x} on {t}"));
                    }
                }
            }
            _ => out.push(format!("ρ present on one side only at {x}")),
        }
    }
    let image: BTreeSet<(NodeId, NodeId)> = a
        .shell
        .links()
        .keys()
        .map(|&(s, t)| (m.get(s).unwrap(), m.get(t).unwrap()))
        .collect();
    let target: BTreeSet<(NodeId, NodeId)> = b.shell.links().keys().copied().collect();
    if image != target {
        out.push("links are not mapped onto links".into());
        return out;
    }
    for (&(s, t), sigma) in a.shell.links() {
        let sb = b.shell.sigma(m.get(s).unwrap(), m.get(t).unwrap()).unwrap();
        for (x, y) in sigma.iter() {
            if m.get(y) != m.get(x).and_then(|u| sb.get(u)) {
                out.push(format!("σ⟨{s},{t}⟩ does not commute at {x}"));
            }
        }
    }
    out
}

/// Finds an isomorphism `a → b`, if one exists.
pub fn find(a: &View, b: &View) -> Option<LevelMap> {
    let (fa, fb) = (a.shell.forest(), b.shell.forest());
    if fa.dim() != fb.dim() || (0..=fa.dim()).any(|i| fa.level(i).len() != fb.level(i).len()) {
        return None;
    }
    if a.shell.links().len() != b.shell.links().len() {
        return None;
    }
    let ca = fa.all_codes(&|n| a.key(n));
    let cb = fb.all_codes(&|n| b.key(n));
    let mut ka: Vec<_> = ca.values().collect();
    let mut kb: Vec<_> = cb.values().collect();
    ka.sort();
    kb.sort();
    if ka != kb {
        return None;
    }
    let order: Vec<NodeId> = (0..=fa.dim()).rev().flat_map(|i| fa.level(i).iter().copied()).collect();
    let search = Search { a, b, ca: &ca, cb: &cb, order };
    let found = search.dfs(State::default())?;
    Some(found.fwd.into_iter().collect())
}

#[derive(Clone, Default)]
struct State {
    fwd: BTreeMap<NodeId, NodeId>,
    bwd: BTreeMap<NodeId, NodeId>,
}

struct Search<'s, 'a> {
    a: &'s View<'a>,
    b: &'s View<'a>,
    ca: &'s BTreeMap<NodeId, Vec<u8>>,
    cb: &'s BTreeMap<NodeId, Vec<u8>>,
    order: Vec<NodeId>,
}

impl Search<'_, '_> {
    fn dfs(&self, st: State) -> Option<State> {
        let Some(&x) = self.order.iter().find(|x| !st.fwd.contains_key(x)) else {
            let m: LevelMap = st.fwd.iter().map(|(&x, &y)| (x, y)).collect();
            return check(&m, self.a, self.b).is_empty().then_some(st);
        };
        let fa = self.a.shell.forest();
        let fb = self.b.shell.forest();
        let candidates: Vec<NodeId> = match fa.parent(x) {
            Some(p) => fb.children(st.fwd[&p]).collect(),
            None => fb.top().iter().copied().collect(),
        };
        for y in candidates {
            if st.bwd.contains_key(&y) || self.ca[&x] != self.cb[&y] {
                continue;
            }
            let mut next = st.clone();
            if self.propagate(&mut next, x, y) {
                if let Some(done) = self.dfs(next) {
                    return Some(done);
                }
            }
        }
        None
    }

    fn force(&self, st: &mut State, queue: &mut Vec<NodeId>, x: NodeId, y: NodeId) -> bool {
        match (st.fwd.get(&x), st.bwd.get(&y)) {
            (Some(&y0), _) => y0 == y,
            (None, Some(_)) => false,
            (None, None) => {
                if self.ca.get(&x) != self.cb.get(&y) {
                    return false;
                }
                st.fwd.insert(x, y);
                st.bwd.insert(y, x);
                queue.push(x);
                true
            }
        }
    }

    fn propagate(&self, st: &mut State, x0: NodeId, y0: NodeId) -> bool {
        let mut queue = Vec::new();
        if !self.force(st, &mut queue, x0, y0) {
            return false;
        }
        let fa = self.a.shell.forest();
        let fb = self.b.shell.forest();
        loop {
            while let Some(x) = queue.pop() {
                let y = st.fwd[&x];
                if let Some(px) = fa.parent(x) {
                    let Some(py) = fb.parent(y) else { return false };
                    if !self.force(st, &mut queue, px, py) {
                        return false;
                    }
                }
                match (self.a.rho_at(x), self.b.rho_at(y)) {
                    (None, None) => {}
                    (Some(ra), Some(rb)) => {
                        let back = rb.inverse();
                        for t in fa.descendants(x).into_iter().skip(1) {
                            let Some(u) = ra.get(t).and_then(|z| back.get(z)) else { return false };
                            if !self.force(st, &mut queue, t, u) {
                                return false;
                            }
                        }
                    }
                    _ => return false,
                }
                let (pa, pb) = (self.a.shell.partners(x), self.b.shell.partners(y));
                if pa.len() != pb.len() {
                    return false;
                }
                if pa.len() == 1 && !self.force(st, &mut queue, pa[0], pb[0]) {
                    return false;
                }
            }
            // σ-forcing over links whose endpoints are both placed
            for (&(s, t), sigma) in self.a.shell.links() {
                let (Some(&fs), Some(&ft)) = (st.fwd.get(&s), st.fwd.get(&t)) else { continue };
                let Some(sb) = self.b.shell.sigma(fs, ft) else { return false };
                for (p, q) in sigma.iter() {
                    if let Some(&fp) = st.fwd.get(&p) {
                        let Some(fq) = sb.get(fp) else { return false };
                        if !self.force(st, &mut queue, q, fq) {
                            return false;
                        }
                    }
                }
            }
            if queue.is_empty() {
                return true;
            }
        }
    }
}
