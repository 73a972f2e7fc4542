//! Certificate checking for weak ω-categories, truncated at a dimension `N`.
//!
//! The coinductive notions (identical, invertible, universal) are replaced by
//! marks in a [`WitnessTable`]. Every existential is a named table entry; every
//! universal quantifier ranges over the finite registry. A mark is checked when
//! some obligation consumes it; obligations whose witnesses would live above
//! dimension `N` are trusted and only counted.
//!
//! Shapes: `dom(c)` and `cod(c)` come from splitting `∂c` at its head. Gluing
//! `a` then `b` means the negative pasting of `a*` and `b*` with the head of
//! `∂a` linked to a domain body of `∂b`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::directed::{check_directed_hypergraph, split_frame};
use crate::forest::NodeId;
use crate::gallery::{chain_frame, Gallery};
use crate::hypergraph::{
    cell_diagram, diagram_dual, diagram_isomorphism, paste, validate_registry, CellId, Diagram, Registry,
};
use crate::pasting::close_diagram;
use crate::shell::{Polarity, ShellKind};

/// Marks and witnesses. Invertible pairs are stored with the smaller id first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessTable {
    pub universal: BTreeSet<CellId>,
    pub identical: BTreeSet<CellId>,
    pub invertible: BTreeSet<(CellId, CellId)>,
    /// Obligation key to witness cells.
    pub witnesses: BTreeMap<String, Vec<CellId>>,
    /// Listed pasting diagrams (negative, as domains of occupants) by name.
    pub problems: BTreeMap<String, Diagram>,
    /// Claim: every simple `k`-cell with `k > n` lies in an invertible pair,
    /// with the partner recorded under `weak-n(name)`.
    pub weak_n: Option<usize>,
}

/// One removable entry of a table.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Entry {
    Universal(CellId),
    Identical(CellId),
    Invertible(CellId, CellId),
    Witness(String),
}

impl WitnessTable {
    pub fn mark_invertible(&mut self, f: CellId, g: CellId) {
        self.invertible.insert((f.min(g), f.max(g)));
    }

    pub fn is_invertible_pair(&self, f: CellId, g: CellId) -> bool {
        self.invertible.contains(&(f.min(g), f.max(g)))
    }

    pub fn entries(&self) -> Vec<Entry> {
        let mut out: Vec<Entry> = self.universal.iter().map(|&c| Entry::Universal(c)).collect();
        out.extend(self.identical.iter().map(|&c| Entry::Identical(c)));
        out.extend(self.invertible.iter().map(|&(a, b)| Entry::Invertible(a, b)));
        out.extend(self.witnesses.keys().map(|k| Entry::Witness(k.clone())));
        out
    }

    pub fn without(&self, e: &Entry) -> WitnessTable {
        let mut t = self.clone();
        match e {
            Entry::Universal(c) => {
                t.universal.remove(c);
            }
            Entry::Identical(c) => {
                t.identical.remove(c);
            }
            Entry::Invertible(a, b) => {
                t.invertible.remove(&(*a, *b));
            }
            Entry::Witness(k) => {
                t.witnesses.remove(k);
            }
        }
        t
    }
}

impl Entry {
    /// The name used for this entry in reports.
    pub fn key(&self, reg: &Registry) -> String {
        let n = |c: &CellId| reg.get(*c).map_or_else(|| c.to_string(), |x| x.name.clone());
        match self {
            Entry::Universal(c) => format!("universal({})", n(c)),
            Entry::Identical(c) => format!("identical({})", n(c)),
            Entry::Invertible(a, b) => format!("invertible({},{})", n(a), n(b)),
            Entry::Witness(k) => k.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    #[default]
    Main,
    /// No empty pasting diagrams; instead every cell has an identical cell over it.
    IdentityAxiom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    Directed,
    Existence,
    Uniqueness,
    Saturation,
    IdenticalClosers1,
    IdenticalClosers2,
    UniversalClosers,
    IdentityCells,
    WeakN,
    Identical,
    Invertible,
    Universal,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Directed => "directed hypergraph",
            Axiom::Existence => "existence of closers and occupants",
            Axiom::Uniqueness => "weak uniqueness of closers and occupants",
            Axiom::Saturation => "saturation of closers and occupants",
            Axiom::IdenticalClosers1 => "ω-identical closers (1)",
            Axiom::IdenticalClosers2 => "ω-identical closers (2)",
            Axiom::UniversalClosers => "ω-universal closers",
            Axiom::IdentityCells => "existence of ω-identical cells",
            Axiom::WeakN => "weak n-category",
            Axiom::Identical => "ω-identical",
            Axiom::Invertible => "ω-invertible",
            Axiom::Universal => "ω-universal",
        }
    }

    /// The six axioms of the main definition.
    pub const SIX: [Axiom; 6] = [
        Axiom::Existence,
        Axiom::Uniqueness,
        Axiom::Saturation,
        Axiom::IdenticalClosers1,
        Axiom::IdenticalClosers2,
        Axiom::UniversalClosers,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub axiom: Axiom,
    /// The obligation or table entry at fault.
    pub entry: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AxiomReport {
    pub failures: Vec<Failure>,
    /// Obligations discharged or failed, per axiom.
    pub checked: BTreeMap<Axiom, usize>,
    /// Obligations skipped because their witnesses lie above the truncation.
    pub trusted: usize,
    /// `(a, b)` with `a ≃ b`, recorded from checked invertible pairs.
    pub equivalences: BTreeSet<(CellId, CellId)>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn passes(&self, a: Axiom) -> bool {
        !self.failures.iter().any(|f| f.axiom == a)
    }

    pub fn names(&self, entry: &str) -> bool {
        self.failures.iter().any(|f| f.entry == entry)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, n) in &self.checked {
            let bad = self.failures.iter().filter(|x| x.axiom == *a).count();
            let verdict = if bad == 0 { "pass" } else { "FAIL" };
            writeln!(f, "{verdict} {} ({n} obligations)", a.name())?;
        }
        for x in &self.failures {
            writeln!(f, "  {}: {}: {}", x.axiom.name(), x.entry, x.detail)?;
        }
        write!(f, "trusted above truncation: {}", self.trusted)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Mark {
    Universal(CellId),
    Identical(CellId),
    Invertible(CellId, CellId),
}

/// Domain, codomain and the boundary node ids needed for gluing.
#[derive(Clone, Debug)]
struct Parts {
    dom: Diagram,
    cod: Diagram,
    head: NodeId,
    dom_tops: Vec<NodeId>,
    cod_label: CellId,
}

struct Checker<'a> {
    reg: &'a Registry,
    table: &'a WitnessTable,
    n: usize,
    parts: BTreeMap<CellId, Option<Parts>>,
    queue: VecDeque<Mark>,
    seen: BTreeSet<Mark>,
    report: AxiomReport,
}

impl<'a> Checker<'a> {
    fn new(reg: &'a Registry, table: &'a WitnessTable, n: usize) -> Checker<'a> {
        Checker {
            reg,
            table,
            n,
            parts: BTreeMap::new(),
            queue: VecDeque::new(),
            seen: BTreeSet::new(),
            report: AxiomReport::default(),
        }
    }

    fn name(&self, c: CellId) -> String {
        self.reg.get(c).map_or_else(|| c.to_string(), |x| x.name.clone())
    }

    fn fail(&mut self, axiom: Axiom, entry: impl Into<String>, detail: impl Into<String>) {
        self.report.failures.push(Failure { axiom, entry: entry.into(), detail: detail.into() });
    }

    fn count(&mut self, axiom: Axiom) {
        *self.report.checked.entry(axiom).or_default() += 1;
    }

    fn dim(&self, c: CellId) -> usize {
        self.reg.cell(c).dim
    }

    /// Whether witnesses of dimension `d` are within the truncation; counts a trusted obligation otherwise.
    fn within(&mut self, d: usize) -> bool {
        if d > self.n {
            self.report.trusted += 1;
            return false;
        }
        true
    }

    fn parts(&mut self, c: CellId) -> Option<Parts> {
        if let Some(p) = self.parts.get(&c) {
            return p.clone();
        }
        let cell = self.reg.cell(c);
        let p = cell.boundary.as_ref().and_then(|bd| {
            let s = split_frame(self.reg, bd, Some(cell.polarity)).ok()?;
            let dom_tops = s.dom.shell.forest().top().iter().copied().collect();
            let cod_label = s.cod.labels[&s.head];
            Some(Parts { dom: s.dom, cod: s.cod, head: s.head, dom_tops, cod_label })
        });
        self.parts.insert(c, p.clone());
        p
    }

    fn simple(&mut self, c: CellId) -> bool {
        self.parts(c).is_some_and(|p| p.dom_tops.len() == 1)
    }

    /// `dom(a) ≅ cod(b)`, comparing the dual of the negative domain with the codomain.
    fn dom_is_cod(&mut self, a: CellId, b: CellId) -> bool {
        let (Some(pa), Some(pb)) = (self.parts(a), self.parts(b)) else { return false };
        iso(&diagram_dual(self.reg, &pa.dom), &pb.cod)
    }

    /// `a` then `b`, with the head of `a` glued to the domain body `at` of `b`.
    fn glue(&self, a: CellId, head: NodeId, b: CellId, at: NodeId) -> Diagram {
        glue(self.reg, a, head, b, at)
    }

    fn consume(&mut self, axiom: Axiom, context: &str, m: Mark) -> bool {
        let present = match m {
            Mark::Universal(c) => self.table.universal.contains(&c),
            Mark::Identical(c) => self.table.identical.contains(&c),
            Mark::Invertible(a, b) => self.table.is_invertible_pair(a, b),
        };
        let key = self.mark_key(m);
        if !present {
            self.fail(axiom, key.clone(), format!("{context} requires the mark {key}"));
            return false;
        }
        if self.seen.insert(m) {
            self.queue.push_back(m);
        }
        true
    }

    fn mark_key(&self, m: Mark) -> String {
        let e = match m {
            Mark::Universal(c) => Entry::Universal(c),
            Mark::Identical(c) => Entry::Identical(c),
            Mark::Invertible(a, b) => Entry::Invertible(a.min(b), a.max(b)),
        };
        e.key(self.reg)
    }

    /// Looks up a witness record of the given arity and dimensions.
    fn witness(&mut self, axiom: Axiom, key: &str, dims: &[usize]) -> Option<Vec<CellId>> {
        self.count(axiom);
        let Some(cells) = self.table.witnesses.get(key) else {
            self.fail(axiom, key, "missing witness");
            return None;
        };
        if cells.len() != dims.len() {
            self.fail(axiom, key, format!("expected {} witness cells, found {}", dims.len(), cells.len()));
            return None;
        }
        for (&c, &d) in cells.iter().zip(dims) {
            let Some(cell) = self.reg.get(c) else {
                self.fail(axiom, key, format!("unknown cell {c}"));
                return None;
            };
            if cell.dim != d || cell.polarity != Polarity::Pos {
                self.fail(axiom, key, format!("{} must be a positive {d}-cell", cell.name));
                return None;
            }
        }
        Some(cells.clone())
    }

    /// `α` has `dom(α) ≅ p` and `cod(α)` labeled `target`.
    fn shaped(&mut self, alpha: CellId, p: &Diagram, target: CellId) -> Result<(), String> {
        let Some(pa) = self.parts(alpha) else {
            return Err(format!("{} has no directed boundary", self.name(alpha)));
        };
        if pa.cod_label != target {
            return Err(format!("codomain of {} is {}, expected {}", self.name(alpha), self.name(pa.cod_label), self.name(target)));
        }
        if !iso(&pa.dom, p) {
            return Err(format!("domain of {} has the wrong shape", self.name(alpha)));
        }
        Ok(())
    }

    fn positive(&self, dim: usize) -> Vec<CellId> {
        self.reg.positive(dim).map(|c| c.id).collect()
    }

    fn run(&mut self) {
        while let Some(m) = self.queue.pop_front() {
            match m {
                Mark::Identical(c) => self.identical(c),
                Mark::Universal(c) => self.universal(c),
                Mark::Invertible(a, b) => self.invertible(a, b),
            }
        }
    }

    fn identical(&mut self, c: CellId) {
        let ax = Axiom::Identical;
        let cn = self.name(c);
        let d = self.dim(c);
        if d == 0 || !self.within(d + 1) {
            return;
        }
        self.count(ax);
        if !self.simple(c) {
            self.fail(ax, format!("identical({cn})"), "simplicity fails");
            return;
        }
        if !self.dom_is_cod(c, c) {
            self.fail(ax, format!("identical({cn})"), "dom ≇ cod");
        }
        let pc = self.parts(c).unwrap();
        let (head_label, dom_node) = (pc.cod_label, pc.dom_tops[0]);
        let dom_label = pc.dom.labels[&dom_node];
        for f in self.positive(d) {
            let Some(pf) = self.parts(f) else { continue };
            for &y in &pf.dom_tops {
                if pf.dom.labels[&y] != self.reg.conj(head_label) {
                    continue;
                }
                let key = format!("identical({cn}).left({}@{})", self.name(f), y.0);
                let Some(w) = self.witness(ax, &key, &[d + 1]) else { continue };
                let p = self.glue(c, pc.head, f, y);
                match self.shaped(w[0], &p, f) {
                    Ok(()) => {
                        self.consume(ax, &key, Mark::Universal(w[0]));
                    }
                    Err(e) => self.fail(ax, key, e),
                }
            }
            if pf.cod_label == self.reg.conj(dom_label) {
                let key = format!("identical({cn}).right({})", self.name(f));
                let Some(w) = self.witness(ax, &key, &[d + 1]) else { continue };
                let p = self.glue(f, pf.head, c, dom_node);
                match self.shaped(w[0], &p, f) {
                    Ok(()) => {
                        self.consume(ax, &key, Mark::Universal(w[0]));
                    }
                    Err(e) => self.fail(ax, key, e),
                }
            }
        }
    }

    fn invertible(&mut self, f: CellId, g: CellId) {
        let ax = Axiom::Invertible;
        let d = self.dim(f);
        let base = format!("invertible({},{})", self.name(f), self.name(g));
        if !self.within(d + 1) {
            return;
        }
        self.count(ax);
        if self.dim(g) != d || !self.simple(f) || !self.simple(g) {
            self.fail(ax, base, "both cells must be simple of equal dimension");
            return;
        }
        if !self.dom_is_cod(f, g) || !self.dom_is_cod(g, f) {
            self.fail(ax, base, "dom(f) ≅ cod(g) and dom(g) ≅ cod(f) fail");
            return;
        }
        let (pf, pg) = (self.parts(f).unwrap(), self.parts(g).unwrap());
        for (side, a, pa, b, pb) in [("left", g, &pg, f, &pf), ("right", f, &pf, g, &pg)] {
            let key = format!("{base}.{side}");
            let Some(w) = self.witness(ax, &key, &[d + 1, d]) else { continue };
            let p = self.glue(a, pa.head, b, pb.dom_tops[0]);
            match self.shaped(w[0], &p, w[1]) {
                Ok(()) => {
                    self.consume(ax, &key, Mark::Identical(w[1]));
                }
                Err(e) => self.fail(ax, key, e),
            }
        }
        let from = self.reg.conj(pf.dom.labels[&pf.dom_tops[0]]);
        self.report.equivalences.insert((from, pf.cod_label));
    }

    fn universal(&mut self, u: CellId) {
        let ax = Axiom::Universal;
        let d = self.dim(u);
        let un = self.name(u);
        if d == 0 || !self.within(d + 1) {
            return;
        }
        let Some(pu) = self.parts(u) else {
            self.count(ax);
            self.fail(ax, format!("universal({un})"), "boundary is not directed");
            return;
        };
        for f in self.positive(d) {
            let Some(pf) = self.parts(f) else { continue };
            if !iso(&pf.dom, &pu.dom) {
                continue;
            }
            let key = format!("universal({un}).factor({})", self.name(f));
            if let Some(w) = self.witness(ax, &key, &[d, d + 1]) {
                let (g, alpha) = (w[0], w[1]);
                match self.solution(u, &pu, f, g, alpha) {
                    Ok(()) => {
                        self.consume(ax, &key, Mark::Universal(alpha));
                    }
                    Err(e) => self.fail(ax, key, e),
                }
            }
            if !self.within(d + 2) {
                continue;
            }
            let sols = self.solutions(u, &pu, f);
            for (i, &(g, a)) in sols.iter().enumerate() {
                for &(h, b) in &sols[i + 1..] {
                    let key = format!("universal({un}).compare({};{},{})", self.name(f), self.name(a), self.name(b));
                    self.comparison(ax, &key, (a, g), (b, h));
                }
            }
        }
    }

    fn solution(&mut self, u: CellId, pu: &Parts, f: CellId, g: CellId, alpha: CellId) -> Result<(), String> {
        let Some(pg) = self.parts(g) else { return Err(format!("{} has no directed boundary", self.name(g))) };
        let pf = self.parts(f).unwrap();
        if pg.dom_tops.len() != 1 || !iso(&diagram_dual(self.reg, &pg.dom), &pu.cod) {
            return Err(format!("dom({}) ≇ cod({})", self.name(g), self.name(u)));
        }
        if pg.cod_label != pf.cod_label {
            return Err(format!("cod({}) ≠ cod({})", self.name(g), self.name(f)));
        }
        let p = self.glue(u, pu.head, g, pg.dom_tops[0]);
        self.shaped(alpha, &p, f)
    }

    /// Every registered `(g, α)` solving the factorization of `f` through `u` with `α` marked universal.
    fn solutions(&mut self, u: CellId, pu: &Parts, f: CellId) -> Vec<(CellId, CellId)> {
        let d = self.dim(u);
        let mut out = Vec::new();
        for g in self.positive(d) {
            for alpha in self.positive(d + 1) {
                if self.table.universal.contains(&alpha) && self.solution(u, pu, f, g, alpha).is_ok() {
                    out.push((g, alpha));
                }
            }
        }
        out
    }

    /// Two occupant-like pairs `α: P ⇒ h` and `β: P ⇒ k` need invertible `γ: h ⇒ k`,
    /// `δ: k ⇒ h` and universal `Φ: [α;γ] ⇒ β`, `Ψ: [β;δ] ⇒ α`.
    fn comparison(&mut self, ax: Axiom, key: &str, (alpha, h): (CellId, CellId), (beta, k): (CellId, CellId)) {
        let d = self.dim(alpha);
        let Some(w) = self.witness(ax, key, &[d, d, d + 1, d + 1]) else { return };
        let [gamma, delta, phi, psi] = [w[0], w[1], w[2], w[3]];
        let r = self.compare_shapes(alpha, h, beta, k, gamma, delta, phi, psi);
        match r {
            Ok(()) => {
                self.consume(ax, key, Mark::Invertible(gamma, delta));
                self.consume(ax, key, Mark::Universal(phi));
                self.consume(ax, key, Mark::Universal(psi));
            }
            Err(e) => self.fail(ax, key, e),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn compare_shapes(
        &mut self,
        alpha: CellId,
        h: CellId,
        beta: CellId,
        k: CellId,
        gamma: CellId,
        delta: CellId,
        phi: CellId,
        psi: CellId,
    ) -> Result<(), String> {
        for (x, from, to) in [(gamma, h, k), (delta, k, h)] {
            let px = self.parts(x).ok_or_else(|| format!("{} has no directed boundary", self.name(x)))?;
            let ok = px.dom_tops.len() == 1
                && self.reg.conj(px.dom.labels[&px.dom_tops[0]]) == from
                && px.cod_label == to;
            if !ok {
                return Err(format!("{} is not a cell {} ⇒ {}", self.name(x), self.name(from), self.name(to)));
            }
        }
        let (pa, pb) = (self.parts(alpha).unwrap(), self.parts(beta).unwrap());
        let (pg, pd) = (self.parts(gamma).unwrap(), self.parts(delta).unwrap());
        let p = self.glue(alpha, pa.head, gamma, pg.dom_tops[0]);
        self.shaped(phi, &p, beta)?;
        let q = self.glue(beta, pb.head, delta, pd.dom_tops[0]);
        self.shaped(psi, &q, alpha)
    }

    fn occupants_of(&mut self, p: &Diagram) -> Vec<(CellId, CellId)> {
        let d = p.dim();
        let mut out = Vec::new();
        for a in self.positive(d + 1) {
            if !self.table.universal.contains(&a) {
                continue;
            }
            if let Some(pa) = self.parts(a) {
                if iso(&pa.dom, p) {
                    out.push((a, pa.cod_label));
                }
            }
        }
        out
    }

    /// Occupants with empty domain whose closer `h` has `dom(h) ≅ cod(h) ≅ x`.
    fn empty_occupants(&mut self, x: CellId) -> Vec<(CellId, CellId)> {
        let d = self.dim(x) + 1;
        let empty = Diagram::empty(d);
        let mut out = Vec::new();
        for (a, h) in self.occupants_of(&empty) {
            if self.unit_over(h, x) {
                out.push((a, h));
            }
        }
        out
    }

    fn unit_over(&mut self, h: CellId, x: CellId) -> bool {
        let Some(ph) = self.parts(h) else { return false };
        let cx = cell_diagram(self.reg, x);
        iso(&diagram_dual(self.reg, &ph.dom), &cx) && iso(&ph.cod, &cx)
    }

    fn all_universal(&self, p: &Diagram) -> bool {
        let f = p.shell.forest();
        f.top().iter().all(|t| self.table.universal.contains(&self.reg.conj(p.labels[t])))
    }

    fn axioms(&mut self, mode: Mode) {
        for f in check_directed_hypergraph(self.reg) {
            self.count(Axiom::Directed);
            self.fail(Axiom::Directed, self.name(f.cell), f.detail);
        }
        let problems: Vec<(String, Diagram)> = self.table.problems.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        // existence, uniqueness and universal closers for listed diagrams
        for (name, p) in &problems {
            let d = p.dim();
            if !self.within(d + 1) {
                continue;
            }
            let key = format!("existence({name})");
            if let Some(w) = self.witness(Axiom::Existence, &key, &[d + 1, d]) {
                match self.shaped(w[0], p, w[1]) {
                    Ok(()) => {
                        self.consume(Axiom::Existence, &key, Mark::Universal(w[0]));
                        if self.all_universal(p) {
                            self.count(Axiom::UniversalClosers);
                            self.consume(Axiom::UniversalClosers, &key, Mark::Universal(w[1]));
                        }
                    }
                    Err(e) => self.fail(Axiom::Existence, key, e),
                }
            }
            self.uniqueness(name, p);
        }
        match mode {
            Mode::Main => self.empty_axioms(),
            Mode::IdentityAxiom => self.identity_axiom(),
        }
        // saturation
        let universal: Vec<CellId> = self.table.universal.iter().copied().collect();
        let pairs: Vec<(CellId, CellId)> = self.table.invertible.iter().copied().collect();
        for &alpha in &universal {
            let d = self.dim(alpha);
            if d == 0 || self.reg.cell(alpha).polarity != Polarity::Pos {
                continue;
            }
            let Some(pa) = self.parts(alpha) else { continue };
            let mut seen = BTreeSet::new();
            for &(a, b) in &pairs {
                for (gamma, delta) in [(a, b), (b, a)] {
                    if self.dim(gamma) != d || !seen.insert((gamma, delta)) {
                        continue;
                    }
                    let Some(pg) = self.parts(gamma) else { continue };
                    if pg.dom_tops.len() != 1 || self.reg.conj(pg.dom.labels[&pg.dom_tops[0]]) != pa.cod_label {
                        continue;
                    }
                    if !self.within(d + 1) {
                        continue;
                    }
                    let key = format!("saturation({};{},{})", self.name(alpha), self.name(gamma), self.name(delta));
                    self.saturation(&key, alpha, &pa, gamma, delta);
                }
            }
        }
        // identical closers (1): universal cells with empty domain close onto identical cells
        if mode == Mode::Main {
            for &alpha in &universal {
                if self.dim(alpha) == 0 || self.dim(alpha) > self.n {
                    continue;
                }
                let Some(pa) = self.parts(alpha) else { continue };
                if !pa.dom.shell.forest().levels().iter().all(|l| l.is_empty()) {
                    continue;
                }
                self.count(Axiom::IdenticalClosers1);
                let ctx = format!("identical closer of {}", self.name(alpha));
                self.consume(Axiom::IdenticalClosers1, &ctx, Mark::Identical(pa.cod_label));
            }
        }
        self.run();
        // closers (2) quantify over every identical mark, consumed or listed
        if mode == Mode::Main {
            let identical: Vec<CellId> = self.table.identical.iter().copied().collect();
            for i in identical {
                let d = self.dim(i);
                if !self.within(d + 1) {
                    continue;
                }
                let key = format!("identical-closer({})", self.name(i));
                let Some(w) = self.witness(Axiom::IdenticalClosers2, &key, &[d + 1]) else { continue };
                match self.shaped(w[0], &Diagram::empty(d), i) {
                    Ok(()) => {
                        self.consume(Axiom::IdenticalClosers2, &key, Mark::Universal(w[0]));
                    }
                    Err(e) => self.fail(Axiom::IdenticalClosers2, key, e),
                }
            }
        }
        if let Some(wn) = self.table.weak_n {
            for k in wn + 1..=self.n {
                for c in self.positive(k) {
                    if !self.simple(c) {
                        continue;
                    }
                    let key = format!("weak-n({})", self.name(c));
                    let Some(w) = self.witness(Axiom::WeakN, &key, &[k]) else { continue };
                    self.consume(Axiom::WeakN, &key, Mark::Invertible(c, w[0]));
                }
            }
        }
        self.run();
    }

    fn uniqueness(&mut self, name: &str, p: &Diagram) {
        let d = p.dim();
        if !self.within(d + 2) {
            return;
        }
        let occ = self.occupants_of(p);
        self.pairs(&format!("uniqueness({name}"), &occ);
    }

    fn pairs(&mut self, prefix: &str, occ: &[(CellId, CellId)]) {
        for (i, &(a, h)) in occ.iter().enumerate() {
            for &(b, k) in &occ[i + 1..] {
                let key = format!("{prefix};{},{})", self.name(a), self.name(b));
                self.comparison(Axiom::Uniqueness, &key, (a, h), (b, k));
            }
        }
    }

    fn empty_axioms(&mut self) {
        let top = self.reg.max_dim().unwrap_or(0);
        for d in 1..=top {
            for x in self.positive(d - 1) {
                if !self.within(d + 1) {
                    continue;
                }
                let key = format!("existence.empty({})", self.name(x));
                if let Some(w) = self.witness(Axiom::Existence, &key, &[d + 1, d]) {
                    let (alpha, h) = (w[0], w[1]);
                    let r = self.shaped(alpha, &Diagram::empty(d), h);
                    match r {
                        Ok(()) if !self.unit_over(h, x) => {
                            self.fail(Axiom::Existence, key, format!("dom({0}) ≅ cod({0}) ≅ {1} fails", self.name(h), self.name(x)));
                        }
                        Ok(()) => {
                            self.consume(Axiom::Existence, &key, Mark::Universal(alpha));
                            self.count(Axiom::UniversalClosers);
                            self.consume(Axiom::UniversalClosers, &key, Mark::Universal(h));
                        }
                        Err(e) => self.fail(Axiom::Existence, key, e),
                    }
                }
                if self.within(d + 2) {
                    let occ = self.empty_occupants(x);
                    self.pairs(&format!("uniqueness(empty {}", self.name(x)), &occ);
                }
            }
        }
    }

    fn identity_axiom(&mut self) {
        let top = self.reg.max_dim().unwrap_or(0);
        for d in 0..=top {
            if !self.within(d + 1) {
                continue;
            }
            for x in self.positive(d) {
                let key = format!("identity({})", self.name(x));
                let Some(w) = self.witness(Axiom::IdentityCells, &key, &[d + 1]) else { continue };
                if self.unit_over(w[0], x) {
                    self.consume(Axiom::IdentityCells, &key, Mark::Identical(w[0]));
                } else {
                    self.fail(Axiom::IdentityCells, key, format!("{} is not a cell {1} ⇒ {1}", self.name(w[0]), self.name(x)));
                }
            }
        }
    }

    fn saturation(&mut self, key: &str, alpha: CellId, pa: &Parts, gamma: CellId, delta: CellId) {
        let d = self.dim(alpha);
        let ax = Axiom::Saturation;
        let Some(w) = self.witness(ax, key, &[d, d + 1, d + 1]) else { return };
        let [beta, phi, psi] = [w[0], w[1], w[2]];
        let k = self.parts(gamma).unwrap().cod_label;
        let r = (|| {
            self.shaped(beta, &pa.dom, k)?;
            let pg = self.parts(gamma).unwrap();
            let p = self.glue(alpha, pa.head, gamma, pg.dom_tops[0]);
            self.shaped(phi, &p, beta)?;
            let pb = self.parts(beta).unwrap();
            let pd = self.parts(delta).ok_or("δ has no directed boundary")?;
            let q = self.glue(beta, pb.head, delta, pd.dom_tops[0]);
            self.shaped(psi, &q, alpha)
        })();
        match r {
            Ok(()) => {
                for c in [beta, phi, psi] {
                    self.consume(ax, key, Mark::Universal(c));
                }
            }
            Err(e) => self.fail(ax, key, e),
        }
    }
}

fn iso(a: &Diagram, b: &Diagram) -> bool {
    a.dim() == b.dim() && diagram_isomorphism(a, b).is_some()
}

/// The negative pasting of `a*` and `b*`, with node `head` of `∂a` linked to node `at` of `∂b`.
pub fn glue(reg: &Registry, a: CellId, head: NodeId, b: CellId, at: NodeId) -> Diagram {
    let pieces = [cell_diagram(reg, reg.conj(a)), cell_diagram(reg, reg.conj(b))];
    paste(&pieces, &[(0, head, 1, at)]).0
}

/// A frame made of one body `h` whose codomain foot is linked to its single domain foot.
pub fn unit_frame(reg: &Registry, h: CellId) -> Option<Diagram> {
    let bd = reg.boundary(h)?;
    let s = split_frame(reg, bd, Some(reg.cell(h).polarity)).ok()?;
    let [y] = s.dom.shell.forest().top().iter().copied().collect::<Vec<_>>()[..] else { return None };
    Some(paste(&[cell_diagram(reg, h)], &[(0, s.head, 0, y)]).0)
}

fn checker_for<'a>(reg: &'a Registry, table: &'a WitnessTable, n: usize) -> Result<Checker<'a>, AxiomReport> {
    let r = validate_registry(reg);
    if !r.is_ok() {
        let mut rep = AxiomReport::default();
        rep.failures.push(Failure { axiom: Axiom::Directed, entry: "registry".into(), detail: r.to_string() });
        return Err(rep);
    }
    Ok(Checker::new(reg, table, n))
}

fn check_mark(reg: &Registry, table: &WitnessTable, n: usize, m: Mark) -> AxiomReport {
    let mut ch = match checker_for(reg, table, n) {
        Ok(c) => c,
        Err(r) => return r,
    };
    ch.seen.insert(m);
    ch.queue.push_back(m);
    ch.run();
    ch.report
}

/// Checks that `c` is ω-identical at truncation `n`, including every mark its witnesses consume.
pub fn check_identical(reg: &Registry, table: &WitnessTable, c: CellId, n: usize) -> AxiomReport {
    check_mark(reg, table, n, Mark::Identical(c))
}

pub fn check_invertible(reg: &Registry, table: &WitnessTable, f: CellId, g: CellId, n: usize) -> AxiomReport {
    check_mark(reg, table, n, Mark::Invertible(f, g))
}

pub fn check_universal(reg: &Registry, table: &WitnessTable, u: CellId, n: usize) -> AxiomReport {
    check_mark(reg, table, n, Mark::Universal(u))
}

/// Checks the axioms of a weak ω-category against `table` up to dimension `n`.
pub fn check_axioms(reg: &Registry, table: &WitnessTable, n: usize, mode: Mode) -> AxiomReport {
    let mut ch = match checker_for(reg, table, n) {
        Ok(c) => c,
        Err(r) => return r,
    };
    ch.axioms(mode);
    let axioms: &[Axiom] = match mode {
        Mode::Main => &Axiom::SIX,
        Mode::IdentityAxiom => &[Axiom::Existence, Axiom::Uniqueness, Axiom::Saturation, Axiom::UniversalClosers, Axiom::IdentityCells],
    };
    for a in axioms {
        ch.report.checked.entry(*a).or_default();
    }
    ch.report
}

fn register(g: &mut Gallery, name: &str, dim: usize, bd: Diagram) -> CellId {
    g.registry.register_cell_pair(name, dim, Some(bd)).expect("certificate cell").0
}

fn closed(g: &Gallery, p: &Diagram, h: CellId) -> Diagram {
    close_diagram(&g.registry, p, h).expect("certificate boundary").0
}

/// A weak-category certificate over the 2-globe at truncation 3.
///
/// One object `x`, a loop `f`, a 2-cell `A: f ⇒ f`, a unit `e1: ∅ ⇒ f` and a
/// composite `mu: [f;f] ⇒ f`; the 3-cells close the diagrams that the
/// definitions ask about.
pub fn globe2_certificate() -> (Gallery, WitnessTable) {
    let mut g = Gallery::new("globe2-weak");
    let x = g.vertex("x");
    let f = g.arrow("f", x, x);
    let a = g.two_cell("A", &[f], f);
    let bd = chain_frame(&g.registry, &[], f);
    let e1 = register(&mut g, "e1", 2, bd);
    let mu = g.two_cell("mu", &[f, f], f);

    // node ids in the boundaries: ∂f has source 0 and target 1; ∂A has domain
    // body 2 and head 5; ∂mu has domain bodies 2, 5 and head 8; ∂e1 has head 2
    let (n0, n1, n2, n5, n8) = (NodeId(0), NodeId(1), NodeId(2), NodeId(5), NodeId(8));
    let bd = unit_frame(&g.registry, a).expect("A is simple");
    let eps2 = register(&mut g, "eps2", 3, bd);
    let bd = closed(&g, &glue(&g.registry, a, n5, a, n2), a);
    let nu_a = register(&mut g, "nu_A", 3, bd);
    let bd = closed(&g, &glue(&g.registry, mu, n8, a, n2), mu);
    let nu_mu = register(&mut g, "nu_mu", 3, bd);
    let bd = closed(&g, &glue(&g.registry, e1, n2, a, n2), e1);
    let nu_e = register(&mut g, "nu_e", 3, bd);
    let bd = closed(&g, &glue(&g.registry, a, n5, mu, n2), mu);
    let nu_am1 = register(&mut g, "nu_Amu1", 3, bd);
    let bd = closed(&g, &glue(&g.registry, a, n5, mu, n5), mu);
    let nu_am2 = register(&mut g, "nu_Amu2", 3, bd);

    let p1 = cell_diagram(&g.registry, g.registry.conj(f));
    let p2 = glue(&g.registry, f, n1, f, n0);
    g.add("P1", ShellKind::Pasting, p1.clone());
    g.add("P2", ShellKind::Pasting, p2.clone());

    let mut t = WitnessTable::default();
    t.universal.extend([f, a, mu, e1, eps2, nu_a, nu_mu, nu_e, nu_am1, nu_am2]);
    t.identical.extend([f, a]);
    t.mark_invertible(a, a);
    t.weak_n = Some(1);
    t.problems.insert("P1".into(), p1);
    t.problems.insert("P2".into(), p2);
    let w: &[(&str, &[CellId])] = &[
        ("existence(P1)", &[a, f]),
        ("existence(P2)", &[mu, f]),
        ("existence.empty(x)", &[e1, f]),
        ("existence.empty(f)", &[eps2, a]),
        ("identical-closer(f)", &[e1]),
        ("identical-closer(A)", &[eps2]),
        ("identical(f).left(f@0)", &[mu]),
        ("identical(f).right(f)", &[mu]),
        ("identical(A).left(A@2)", &[nu_a]),
        ("identical(A).left(mu@2)", &[nu_am1]),
        ("identical(A).left(mu@5)", &[nu_am2]),
        ("identical(A).right(A)", &[nu_a]),
        ("identical(A).right(mu)", &[nu_mu]),
        ("identical(A).right(e1)", &[nu_e]),
        ("universal(f).factor(f)", &[f, mu]),
        ("universal(A).factor(A)", &[a, nu_a]),
        ("universal(mu).factor(mu)", &[a, nu_mu]),
        ("universal(e1).factor(e1)", &[a, nu_e]),
        ("invertible(A,A).left", &[nu_a, a]),
        ("invertible(A,A).right", &[nu_a, a]),
        ("saturation(A;A,A)", &[a, nu_a, nu_a]),
        ("saturation(mu;A,A)", &[mu, nu_mu, nu_mu]),
        ("saturation(e1;A,A)", &[e1, nu_e, nu_e]),
        ("weak-n(A)", &[a]),
    ];
    for (k, cells) in w {
        t.witnesses.insert(k.to_string(), cells.to_vec());
    }
    (g, t)
}
