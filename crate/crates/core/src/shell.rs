//! Polarized shells: forests with polarity, links and linking isomorphisms.
//!
//! One [`Shell`] value carries the raw data of a frame shell, a cell shell or
//! a pasting shell. Which of the three it is depends on the validator it
//! passes: [`validate_frame_shell`], [`validate_cell_shell`] or
//! [`validate_pasting_shell`]. Validation is report-style; an empty
//! [`Report`] certifies the value.
//!
//! The frame-shell conditions are checked level by level through mutuality:
//! every top node must carry a cell shell, whose boundary is again a frame
//! shell one dimension lower, down to dimension 0 where a frame shell is just
//! a set with polarity.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::forest::{check_homomorphism, Forest, LevelMap, NodeId};

/// Sign of a node or a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Neg,
    Pos,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Neg => Polarity::Pos,
            Polarity::Pos => Polarity::Neg,
        }
    }

    pub fn sign(self) -> i8 {
        match self {
            Polarity::Neg => -1,
            Polarity::Pos => 1,
        }
    }

    pub fn from_sign(s: i64) -> Option<Polarity> {
        match s {
            1 => Some(Polarity::Pos),
            -1 => Some(Polarity::Neg),
            _ => None,
        }
    }
}

impl std::ops::Neg for Polarity {
    type Output = Polarity;
    fn neg(self) -> Polarity {
        self.flip()
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Neg => "-",
            Polarity::Pos => "+",
        })
    }
}

/// Named validity conditions, rendered with their conventional names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    /// Malformed raw data: missing polarity, links on illegal levels, a tree that is not a tree.
    Structure,
    /// A σ that is not a tree isomorphism between the two linked subtrees.
    LinkingIsomorphism,
    Mutuality,
    Bijectivity,
    Involution,
    Conjugation,
    CorrespondenceOfLinks,
    CommutativityOfLinks,
    Closedness,
    AssignmentOfCells,
    IdentificationInBoundaries,
    CompatibilityOnLinks,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Structure => "structure",
            Condition::LinkingIsomorphism => "linking isomorphism",
            Condition::Mutuality => "mutuality",
            Condition::Bijectivity => "bijectivity",
            Condition::Involution => "involution",
            Condition::Conjugation => "conjugation",
            Condition::CorrespondenceOfLinks => "correspondence of links",
            Condition::CommutativityOfLinks => "commutativity of links",
            Condition::Closedness => "closedness",
            Condition::AssignmentOfCells => "assignment of cells",
            Condition::IdentificationInBoundaries => "identification in boundaries",
            Condition::CompatibilityOnLinks => "compatibility on links",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub nodes: Vec<NodeId>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.condition, self.detail)?;
        if !self.nodes.is_empty() {
            let ids: Vec<String> = self.nodes.iter().map(|n| n.to_string()).collect();
            write!(f, " [{}]", ids.join(", "))?;
        }
        Ok(())
    }
}

/// Validation outcome. Empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, condition: Condition, nodes: Vec<NodeId>, detail: impl Into<String>) {
        self.violations.push(Violation { condition, nodes, detail: detail.into() });
    }

    pub fn has(&self, c: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == c)
    }

    pub fn conditions(&self) -> BTreeSet<Condition> {
        self.violations.iter().map(|v| v.condition).collect()
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Raw shell data: base forest, polarity, links and their linking isomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shell {
    forest: Forest,
    polarity: BTreeMap<NodeId, Polarity>,
    links: BTreeMap<(NodeId, NodeId), LevelMap>,
    out: BTreeMap<NodeId, Vec<NodeId>>,
}

impl Shell {
    pub fn new(
        forest: Forest,
        polarity: BTreeMap<NodeId, Polarity>,
        links: BTreeMap<(NodeId, NodeId), LevelMap>,
    ) -> Shell {
        let mut out: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for &(a, b) in links.keys() {
            out.entry(a).or_default().push(b);
        }
        Shell { forest, polarity, links, out }
    }

    pub fn empty(dim: usize) -> Shell {
        Shell::new(Forest::empty(dim), BTreeMap::new(), BTreeMap::new())
    }

    pub fn dim(&self) -> usize {
        self.forest.dim()
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn polarity(&self, n: NodeId) -> Polarity {
        self.polarity[&n]
    }

    pub fn polarities(&self) -> &BTreeMap<NodeId, Polarity> {
        &self.polarity
    }

    pub fn links(&self) -> &BTreeMap<(NodeId, NodeId), LevelMap> {
        &self.links
    }

    pub fn sigma(&self, a: NodeId, b: NodeId) -> Option<&LevelMap> {
        self.links.get(&(a, b))
    }

    /// The (first) link partner of `n`.
    pub fn partner(&self, n: NodeId) -> Option<NodeId> {
        self.out.get(&n).and_then(|v| v.first().copied())
    }

    pub fn partners(&self, n: NodeId) -> &[NodeId] {
        self.out.get(&n).map_or(&[], |v| v.as_slice())
    }

    pub fn links_at(&self, level: usize) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.links
            .keys()
            .copied()
            .filter(move |&(a, _)| self.forest.level_of(a) == Some(level))
    }

    pub fn max_id(&self) -> Option<NodeId> {
        self.forest.max_id()
    }

    /// `(ξ)*`: every polarity negated, everything else unchanged.
    pub fn dual(&self) -> Shell {
        let polarity = self.polarity.iter().map(|(&n, &p)| (n, p.flip())).collect();
        Shell { forest: self.forest.clone(), polarity, links: self.links.clone(), out: self.out.clone() }
    }

    /// Restriction to `nodes` as a shell of dimension `dim`; keeps links with both
    /// endpoints inside and level at most `max_link_level`.
    pub fn restrict(&self, dim: usize, nodes: &BTreeSet<NodeId>, max_link_level: Option<usize>) -> Shell {
        let forest = self.forest.restrict(dim, nodes);
        let polarity = nodes.iter().map(|&n| (n, self.polarity[&n])).collect();
        let links = self
            .links
            .iter()
            .filter(|((a, b), _)| {
                nodes.contains(a)
                    && nodes.contains(b)
                    && max_link_level.is_some_and(|m| self.forest.level_of(*a).is_some_and(|l| l <= m))
            })
            .map(|(&k, v)| (k, v.clone()))
            .collect();
        Shell::new(forest, polarity, links)
    }

    /// `ξ|^s` as a cell shell.
    pub fn cell_at(&self, s: NodeId) -> Shell {
        let k = self.forest.level_of(s).expect("node of the shell");
        let nodes: BTreeSet<_> = self.forest.descendants(s).into_iter().collect();
        self.restrict(k, &nodes, k.checked_sub(2))
    }

    /// `ξ|_s` as a frame shell one dimension below `s`.
    pub fn boundary_of(&self, s: NodeId) -> Shell {
        let k = self.forest.level_of(s).expect("node of the shell");
        assert!(k > 0, "level-0 nodes have no boundary");
        let mut nodes: BTreeSet<_> = self.forest.descendants(s).into_iter().collect();
        nodes.remove(&s);
        self.restrict(k - 1, &nodes, k.checked_sub(2))
    }

    /// Renames every node through `rename`, which must be injective on the node set.
    pub fn rename(&self, rename: &dyn Fn(NodeId) -> NodeId) -> Shell {
        let levels = self.forest.levels().iter().map(|l| l.iter().map(|&n| rename(n)).collect()).collect();
        let parent = self.forest.parents().iter().map(|(&a, &b)| (rename(a), rename(b))).collect();
        let forest = Forest::new(self.dim(), levels, parent).expect("renaming keeps invariants");
        let polarity = self.polarity.iter().map(|(&n, &p)| (rename(n), p)).collect();
        let links = self
            .links
            .iter()
            .map(|(&(a, b), s)| ((rename(a), rename(b)), s.iter().map(|(x, y)| (rename(x), rename(y))).collect()))
            .collect();
        Shell::new(forest, polarity, links)
    }

    /// Disjoint union of shells of equal dimension with disjoint node ids.
    pub fn union(&self, other: &Shell) -> Shell {
        assert_eq!(self.dim(), other.dim());
        let levels = (0..=self.dim())
            .map(|i| self.forest.level(i).union(other.forest.level(i)).copied().collect())
            .collect();
        let mut parent = self.forest.parents().clone();
        parent.extend(other.forest.parents().iter().map(|(&a, &b)| (a, b)));
        let forest = Forest::new(self.dim(), levels, parent).expect("node ids must be disjoint");
        let mut polarity = self.polarity.clone();
        polarity.extend(other.polarity.iter().map(|(&a, &b)| (a, b)));
        let mut links = self.links.clone();
        links.extend(other.links.iter().map(|(&k, v)| (k, v.clone())));
        Shell::new(forest, polarity, links)
    }

    /// Adds (or replaces) a link with its σ.
    pub fn with_link(&self, a: NodeId, b: NodeId, sigma: LevelMap) -> Shell {
        let mut links = self.links.clone();
        links.insert((a, b), sigma);
        Shell::new(self.forest.clone(), self.polarity.clone(), links)
    }

    pub fn without_link(&self, a: NodeId, b: NodeId) -> Shell {
        let mut links = self.links.clone();
        links.remove(&(a, b));
        Shell::new(self.forest.clone(), self.polarity.clone(), links)
    }

    pub fn with_polarity(&self, n: NodeId, p: Polarity) -> Shell {
        let mut polarity = self.polarity.clone();
        polarity.insert(n, p);
        Shell::new(self.forest.clone(), polarity, self.links.clone())
    }

    pub fn into_parts(self) -> (Forest, BTreeMap<NodeId, Polarity>, BTreeMap<(NodeId, NodeId), LevelMap>) {
        (self.forest, self.polarity, self.links)
    }
}

/// Which of the three shell notions a validator checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellKind {
    Frame,
    Cell,
    Pasting,
}

pub fn validate_frame_shell(shell: &Shell) -> Report {
    validate(shell, ShellKind::Frame)
}

pub fn validate_cell_shell(shell: &Shell) -> Report {
    validate(shell, ShellKind::Cell)
}

pub fn validate_pasting_shell(shell: &Shell) -> Report {
    validate(shell, ShellKind::Pasting)
}

pub fn validate(shell: &Shell, kind: ShellKind) -> Report {
    let mut report = structure(shell, kind);
    if !report.is_ok() {
        return report;
    }
    let f = shell.forest();
    let n = shell.dim();
    match kind {
        ShellKind::Frame | ShellKind::Pasting => {
            let tops: Vec<_> = f.top().iter().copied().collect();
            frame_conditions(shell, &tops, n, kind == ShellKind::Frame, &mut report);
        }
        ShellKind::Cell => {
            if n > 0 {
                let root = f.root().expect("checked by structure");
                let tops: Vec<_> = f.children(root).collect();
                frame_conditions(shell, &tops, n - 1, true, &mut report);
            }
        }
    }
    commutativity(shell, &mut report);
    report
}

fn structure(shell: &Shell, kind: ShellKind) -> Report {
    let mut report = Report::default();
    let f = shell.forest();
    let n = shell.dim();
    for node in f.nodes() {
        if !shell.polarity.contains_key(&node) {
            report.push(Condition::Structure, vec![node], "node without polarity");
        }
    }
    for &node in shell.polarity.keys() {
        if !f.contains(node) {
            report.push(Condition::Structure, vec![node], "polarity for an unknown node");
        }
    }
    if kind == ShellKind::Cell && !f.is_tree() {
        report.push(Condition::Structure, f.top().iter().copied().collect(), "a cell shell needs exactly one root");
    }
    let max_level = match kind {
        ShellKind::Cell => n.checked_sub(2),
        _ => n.checked_sub(1),
    };
    for (&(a, b), sigma) in &shell.links {
        let (Some(la), Some(lb)) = (f.level_of(a), f.level_of(b)) else {
            report.push(Condition::Structure, vec![a, b], "link endpoint is not a node");
            continue;
        };
        if la != lb {
            report.push(Condition::Structure, vec![a, b], "link endpoints on different levels");
            continue;
        }
        if max_level.map_or(true, |m| la > m) {
            report.push(Condition::Structure, vec![a, b], format!("link on level {la} is not allowed here"));
            continue;
        }
        let sa = f.subtree(a).expect("node exists");
        let sb = f.subtree(b).expect("node exists");
        let hom = check_homomorphism(sigma, &sa, &sb);
        let extra = sigma.domain().any(|x| !sa.contains(x));
        if !hom.is_isomorphism() || extra || sigma.get(a) != Some(b) {
            report.push(
                Condition::LinkingIsomorphism,
                vec![a, b],
                "σ is not an isomorphism between the linked subtrees",
            );
        }
    }
    report
}

/// Checks one frame shell whose top nodes are `tops` on level `m`; `closed`
/// selects whether closedness applies at this level. Recurses through mutuality.
fn frame_conditions(shell: &Shell, tops: &[NodeId], m: usize, closed: bool, report: &mut Report) {
    if m == 0 {
        return;
    }
    let f = shell.forest();
    let feet: BTreeSet<NodeId> = tops.iter().flat_map(|&t| f.children(t)).collect();
    let mut incoming: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    let mut top_links = Vec::new();
    for &a in &feet {
        for &b in shell.partners(a) {
            if !feet.contains(&b) {
                report.push(Condition::Mutuality, vec![a, b], "link leaves the enclosing cell");
                continue;
            }
            top_links.push((a, b));
            incoming.entry(b).or_default().push(a);
        }
    }
    for &a in &feet {
        let outs: Vec<_> = shell.partners(a).iter().filter(|b| feet.contains(b)).copied().collect();
        if outs.len() > 1 {
            report.push(Condition::Bijectivity, [vec![a], outs.clone()].concat(), "node linked to several targets");
        }
        if let Some(ins) = incoming.get(&a) {
            if ins.len() > 1 {
                report.push(Condition::Bijectivity, [vec![a], ins.clone()].concat(), "node linked from several sources");
            }
        }
        if closed && outs.is_empty() {
            report.push(Condition::Closedness, vec![a], format!("level-{} node has no link", m - 1));
        }
    }
    for &(a, b) in &top_links {
        let sab = &shell.links[&(a, b)];
        match shell.links.get(&(b, a)) {
            None => report.push(Condition::Involution, vec![a, b], "reverse link missing"),
            Some(sba) => {
                if !sab.then(sba).is_identity() || sab.then(sba).len() != sab.len() || !sba.then(sab).is_identity() {
                    report.push(Condition::Involution, vec![a, b], "σ⟨s,t⟩ and σ⟨t,s⟩ are not mutually inverse");
                }
            }
        }
        if a == b {
            report.push(Condition::Conjugation, vec![a], "link from a node to itself");
        } else {
            let bad: Vec<_> = sab.iter().filter(|&(t, u)| shell.polarity(t) == shell.polarity(u)).map(|(t, _)| t).collect();
            if !bad.is_empty() {
                report.push(
                    Condition::Conjugation,
                    [vec![a, b], bad].concat(),
                    "σ sends a node to one of the same polarity",
                );
            }
        }
        correspondence(shell, a, b, m - 1, report);
    }
    for &t in tops {
        let kids: Vec<_> = f.children(t).collect();
        frame_conditions(shell, &kids, m - 1, true, report);
    }
}

fn correspondence(shell: &Shell, s: NodeId, s2: NodeId, level: usize, report: &mut Report) {
    let f = shell.forest();
    let sigma = &shell.links[&(s, s2)];
    for (&(t, t2), tau) in &shell.links {
        let Some(lt) = f.level_of(t) else { continue };
        if lt + 2 > level || !f.is_under(t, s) || !f.is_under(t2, s) {
            continue;
        }
        let (Some(u), Some(u2)) = (sigma.get(t), sigma.get(t2)) else { continue };
        let Some(tau2) = shell.links.get(&(u, u2)) else {
            report.push(
                Condition::CorrespondenceOfLinks,
                vec![s, s2, t, t2],
                "image of an inner link under σ is not a link",
            );
            continue;
        };
        // σ⟨σt,σt'⟩ ∘ σ⟨s,s'⟩ = σ⟨s,s'⟩ ∘ σ⟨t,t'⟩ on the subtree at t
        let ok = f.descendants(t).into_iter().all(|x| {
            let lhs = sigma.get(x).and_then(|y| tau2.get(y));
            let rhs = tau.get(x).and_then(|y| sigma.get(y));
            lhs.is_some() && lhs == rhs
        });
        if !ok {
            report.push(
                Condition::CorrespondenceOfLinks,
                vec![s, s2, t, t2],
                "σ does not commute with the inner linking isomorphisms",
            );
        }
    }
}

/// Commutativity of links over every closed chain of links.
///
/// A chain alternates link steps with a move between parent-adjacent nodes. The
/// check explores states `(anchor, point)`: from an anchor carrying a link, the
/// point is transported by σ and the anchor moves to the parent or to the child
/// containing the point. A chain is read from its lowest anchor: starting at
/// `(a, p)` and staying at or above the level of `a`, any return to `a` must
/// bring `p` back to itself.
fn commutativity(shell: &Shell, report: &mut Report) {
    if let Some(path) = commutativity_counterexample(shell) {
        let (a, p) = path[0];
        let q = path.last().unwrap().1;
        let steps: Vec<String> = path.iter().map(|(x, y)| format!("{x}:{y}")).collect();
        report.push(
            Condition::CommutativityOfLinks,
            vec![a, p, q],
            format!("a chain of links starting at {a} sends {p} to {q} (via {})", steps.join(" → ")),
        );
    }
}

/// A closed chain of links that moves a point, as `(anchor, point)` states from start to return.
pub fn commutativity_counterexample(shell: &Shell) -> Option<Vec<(NodeId, NodeId)>> {
    let f = shell.forest();
    let anchors: Vec<NodeId> = shell.out.keys().copied().collect();
    let mut index: BTreeMap<(NodeId, NodeId), usize> = BTreeMap::new();
    let mut states: Vec<(NodeId, NodeId)> = Vec::new();
    for &a in &anchors {
        for p in f.descendants(a) {
            index.insert((a, p), states.len());
            states.push((a, p));
        }
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); states.len()];
    for (i, &(a, p)) in states.iter().enumerate() {
        for &b in shell.partners(a) {
            let Some(q) = shell.links[&(a, b)].get(p) else { continue };
            if let Some(up) = f.parent(b) {
                if let Some(&j) = index.get(&(up, q)) {
                    succ[i].push(j);
                }
            }
            let (lb, lq) = (f.level_of(b).unwrap(), f.level_of(q).unwrap());
            if lq < lb {
                let c = f.ancestor(q, lb - 1 - lq).unwrap();
                if let Some(&j) = index.get(&(c, q)) {
                    succ[i].push(j);
                }
            }
        }
    }
    let mut seen = vec![usize::MAX; states.len()];
    let mut pred = vec![usize::MAX; states.len()];
    for start in 0..states.len() {
        let (a, p) = states[start];
        let floor = f.level_of(a).unwrap();
        let mut queue = VecDeque::new();
        for &j in &succ[start] {
            if seen[j] != start && f.level_of(states[j].0).unwrap() >= floor {
                seen[j] = start;
                pred[j] = start;
                queue.push_back(j);
            }
        }
        while let Some(i) = queue.pop_front() {
            let (b, q) = states[i];
            if b == a && q != p {
                let mut path = vec![states[i]];
                let mut k = pred[i];
                while k != start {
                    path.push(states[k]);
                    k = pred[k];
                }
                path.push(states[start]);
                path.reverse();
                return Some(path);
            }
            for &j in &succ[i] {
                if seen[j] != start && f.level_of(states[j].0).unwrap() >= floor {
                    seen[j] = start;
                    pred[j] = i;
                    queue.push_back(j);
                }
            }
        }
    }
    None
}

#[derive(Debug, thiserror::Error)]
pub enum ShellError {
    #[error("invalid shell: {0}")]
    Invalid(Report),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
}

/// `(ξ)*` for a valid frame shell.
pub fn dual_shell(shell: &Shell) -> Result<Shell, ShellError> {
    let report = validate_frame_shell(shell);
    if !report.is_ok() {
        return Err(ShellError::Invalid(report));
    }
    Ok(shell.dual())
}

/// Searches for a shell isomorphism `a ≅ b`. Accepts any valid frame, cell or pasting shells.
pub fn shell_isomorphism(a: &Shell, b: &Shell) -> Result<Option<LevelMap>, ShellError> {
    for s in [a, b] {
        let report = validate_any(s);
        if !report.is_ok() {
            return Err(ShellError::Invalid(report));
        }
    }
    if a.dim() != b.dim() {
        return Err(ShellError::DimensionMismatch(a.dim(), b.dim()));
    }
    let found = crate::iso::find(&crate::iso::View::shell(a), &crate::iso::View::shell(b));
    if let Some(m) = &found {
        assert!(
            crate::iso::check(m, &crate::iso::View::shell(a), &crate::iso::View::shell(b)).is_empty(),
            "search returned a map that is not a shell isomorphism"
        );
    }
    Ok(found)
}

/// Validates as a frame shell, falling back to pasting or cell shell.
pub(crate) fn validate_any(s: &Shell) -> Report {
    let r = validate_pasting_shell(s);
    if r.is_ok() {
        return r;
    }
    let c = validate_cell_shell(s);
    if c.is_ok() {
        c
    } else {
        r
    }
}
