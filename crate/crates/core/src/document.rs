//! JSON documents: a registry, named structures over it and an optional
//! witness table.
//!
//! Node maps (`σ`, `ρ`, parents, labels) are written as arrays of `[from, to]`
//! pairs. Every collection is emitted in sorted order, so saving the same
//! document twice gives identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::forest::{Forest, ForestError, LevelMap, NodeId};
use crate::gallery::{build_gallery, Gallery, Structure, UnknownGallery};
use crate::hypergraph::{validate_diagram, validate_registry, Cell, CellId, Diagram, Registry};
use crate::shell::{Polarity, Report, Shell, ShellKind};
use crate::weakcat::{globe2_certificate, WitnessTable};

pub const FORMAT_VERSION: u32 = 1;
pub const EXTENSION: &str = ".ohg.json";

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported format_version {0}")]
    Version(u32),
    #[error("{path}: {message}")]
    Reference { path: String, message: String },
    #[error("{path}: {source}")]
    Forest { path: String, source: ForestError },
    #[error("{path}: {report}")]
    Invalid { path: String, report: Report },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl DocumentError {
    fn reference(path: &str, message: impl Into<String>) -> DocumentError {
        DocumentError::Reference { path: path.to_string(), message: message.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub name: String,
    pub registry: Registry,
    pub structures: BTreeMap<String, Structure>,
    pub witnesses: Option<WitnessTable>,
}

impl From<Gallery> for Document {
    fn from(g: Gallery) -> Document {
        Document { name: g.name, registry: g.registry, structures: g.structures, witnesses: None }
    }
}

/// The gallery fixture `name` as a document, with its witness table when it has one.
pub fn gallery_document(name: &str) -> Result<Document, UnknownGallery> {
    if name == "globe2-weak" {
        let (g, table) = globe2_certificate();
        return Ok(Document { witnesses: Some(table), ..Document::from(g) });
    }
    build_gallery(name).map(Document::from)
}

impl Document {
    /// Parses a document and resolves every reference, without running validators.
    pub fn from_json(text: &str) -> Result<Document, DocumentError> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        })?;
        raw.resolve()
    }

    /// Parses and validates; the first failing part is returned as [`DocumentError::Invalid`].
    pub fn parse(text: &str) -> Result<Document, DocumentError> {
        let doc = Document::from_json(text)?;
        if let Some((path, report)) = doc.validate().into_iter().find(|(_, r)| !r.is_ok()) {
            return Err(DocumentError::Invalid { path, report });
        }
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Document, DocumentError> {
        Document::parse(&std::fs::read_to_string(path)?)
    }

    pub fn load_unchecked(path: impl AsRef<Path>) -> Result<Document, DocumentError> {
        Document::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), DocumentError> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&RawDocument::from(self)).expect("documents serialize");
        s.push('\n');
        s
    }

    /// Runs the registry validator and the validator of every structure and listed problem.
    pub fn validate(&self) -> Vec<(String, Report)> {
        let mut out = vec![("registry".to_string(), validate_registry(&self.registry))];
        for (name, s) in &self.structures {
            out.push((format!("structure {name:?}"), s.validate(&self.registry)));
        }
        if let Some(w) = &self.witnesses {
            for (name, p) in &w.problems {
                out.push((format!("problem {name:?}"), validate_diagram(&self.registry, p, ShellKind::Pasting)));
            }
        }
        out
    }

    pub fn structure(&self, name: &str) -> Option<&Structure> {
        self.structures.get(name)
    }
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

// Raw serde mirror of the format.

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
enum Sign {
    #[serde(rename = "+")]
    Pos,
    #[serde(rename = "-")]
    Neg,
}

impl From<Polarity> for Sign {
    fn from(p: Polarity) -> Sign {
        match p {
            Polarity::Pos => Sign::Pos,
            Polarity::Neg => Sign::Neg,
        }
    }
}

impl From<Sign> for Polarity {
    fn from(s: Sign) -> Polarity {
        match s {
            Sign::Pos => Polarity::Pos,
            Sign::Neg => Polarity::Neg,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Frame,
    Cell,
    Pasting,
}

impl From<ShellKind> for Kind {
    fn from(k: ShellKind) -> Kind {
        match k {
            ShellKind::Frame => Kind::Frame,
            ShellKind::Cell => Kind::Cell,
            ShellKind::Pasting => Kind::Pasting,
        }
    }
}

impl From<Kind> for ShellKind {
    fn from(k: Kind) -> ShellKind {
        match k {
            Kind::Frame => ShellKind::Frame,
            Kind::Cell => ShellKind::Cell,
            Kind::Pasting => ShellKind::Pasting,
        }
    }
}

type Pairs = Vec<[u32; 2]>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format_version: u32,
    #[serde(default)]
    name: String,
    registry: Vec<RawCell>,
    #[serde(default)]
    structures: BTreeMap<String, RawStructure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witnesses: Option<RawWitnesses>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    id: u32,
    name: String,
    dim: usize,
    polarity: Sign,
    conjugate: u32,
    boundary: Option<RawDiagram>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShell {
    dim: usize,
    levels: Vec<Vec<u32>>,
    parents: Pairs,
    polarity: Vec<(u32, Sign)>,
    links: Vec<RawLink>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLink {
    from: u32,
    to: u32,
    sigma: Pairs,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRho {
    node: u32,
    map: Pairs,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDiagram {
    shell: RawShell,
    labels: Pairs,
    rho: Vec<RawRho>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    kind: Kind,
    shell: RawShell,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Pairs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<Vec<RawRho>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitnesses {
    universal: Vec<u32>,
    identical: Vec<u32>,
    invertible: Pairs,
    witnesses: BTreeMap<String, Vec<u32>>,
    problems: BTreeMap<String, RawDiagram>,
    weak_n: Option<usize>,
}

fn pairs(m: impl IntoIterator<Item = (NodeId, NodeId)>) -> Pairs {
    m.into_iter().map(|(a, b)| [a.0, b.0]).collect()
}

impl From<&Shell> for RawShell {
    fn from(s: &Shell) -> RawShell {
        let f = s.forest();
        RawShell {
            dim: s.dim(),
            levels: f.levels().iter().map(|l| l.iter().map(|n| n.0).collect()).collect(),
            parents: pairs(f.parents().iter().map(|(&a, &b)| (a, b))),
            polarity: s.polarities().iter().map(|(n, &p)| (n.0, p.into())).collect(),
            links: s
                .links()
                .iter()
                .map(|(&(a, b), sigma)| RawLink { from: a.0, to: b.0, sigma: pairs(sigma.iter()) })
                .collect(),
        }
    }
}

fn raw_labels(d: &Diagram) -> Pairs {
    d.labels.iter().map(|(n, c)| [n.0, c.0]).collect()
}

fn raw_rho(d: &Diagram) -> Vec<RawRho> {
    d.rho.iter().map(|(n, m)| RawRho { node: n.0, map: pairs(m.iter()) }).collect()
}

impl From<&Diagram> for RawDiagram {
    fn from(d: &Diagram) -> RawDiagram {
        RawDiagram { shell: (&d.shell).into(), labels: raw_labels(d), rho: raw_rho(d) }
    }
}

impl From<&Structure> for RawStructure {
    fn from(s: &Structure) -> RawStructure {
        match s {
            Structure::Shell { kind, shell } => {
                RawStructure { kind: (*kind).into(), shell: shell.into(), labels: None, rho: None }
            }
            Structure::Diagram { kind, diagram } => RawStructure {
                kind: (*kind).into(),
                shell: (&diagram.shell).into(),
                labels: Some(raw_labels(diagram)),
                rho: Some(raw_rho(diagram)),
            },
        }
    }
}

impl From<&WitnessTable> for RawWitnesses {
    fn from(w: &WitnessTable) -> RawWitnesses {
        RawWitnesses {
            universal: w.universal.iter().map(|c| c.0).collect(),
            identical: w.identical.iter().map(|c| c.0).collect(),
            invertible: w.invertible.iter().map(|(a, b)| [a.0, b.0]).collect(),
            witnesses: w.witnesses.iter().map(|(k, v)| (k.clone(), v.iter().map(|c| c.0).collect())).collect(),
            problems: w.problems.iter().map(|(k, d)| (k.clone(), d.into())).collect(),
            weak_n: w.weak_n,
        }
    }
}

impl From<&Document> for RawDocument {
    fn from(d: &Document) -> RawDocument {
        RawDocument {
            format_version: FORMAT_VERSION,
            name: d.name.clone(),
            registry: d
                .registry
                .cells()
                .map(|c| RawCell {
                    id: c.id.0,
                    name: c.name.clone(),
                    dim: c.dim,
                    polarity: c.polarity.into(),
                    conjugate: c.conjugate.0,
                    boundary: c.boundary.as_ref().map(RawDiagram::from),
                })
                .collect(),
            structures: d.structures.iter().map(|(k, s)| (k.clone(), s.into())).collect(),
            witnesses: d.witnesses.as_ref().map(RawWitnesses::from),
        }
    }
}

// Resolution: raw data to checked domain values.

fn node_map(path: &str, what: &str, raw: &Pairs) -> Result<BTreeMap<NodeId, NodeId>, DocumentError> {
    let mut m = BTreeMap::new();
    for &[a, b] in raw {
        if m.insert(NodeId(a), NodeId(b)).is_some() {
            return Err(DocumentError::reference(path, format!("{what} lists n{a} twice")));
        }
    }
    Ok(m)
}

fn level_map(path: &str, what: &str, raw: &Pairs) -> Result<LevelMap, DocumentError> {
    Ok(node_map(path, what, raw)?.into_iter().collect())
}

impl RawShell {
    fn resolve(&self, path: &str) -> Result<Shell, DocumentError> {
        let levels: Vec<BTreeSet<NodeId>> =
            self.levels.iter().map(|l| l.iter().map(|&n| NodeId(n)).collect()).collect();
        let parent = node_map(path, "parents", &self.parents)?;
        let forest = Forest::new(self.dim, levels, parent)
            .map_err(|source| DocumentError::Forest { path: path.to_string(), source })?;
        let known = |n: u32| forest.level_of(NodeId(n)).is_some();

        let mut polarity = BTreeMap::new();
        for &(n, p) in &self.polarity {
            if !known(n) {
                return Err(DocumentError::reference(path, format!("polarity given for unknown node n{n}")));
            }
            if polarity.insert(NodeId(n), p.into()).is_some() {
                return Err(DocumentError::reference(path, format!("polarity lists n{n} twice")));
            }
        }
        if let Some(n) = forest.nodes().find(|n| !polarity.contains_key(n)) {
            return Err(DocumentError::reference(path, format!("node {n} has no polarity")));
        }

        let mut links = BTreeMap::new();
        for l in &self.links {
            for n in [l.from, l.to] {
                if !known(n) {
                    return Err(DocumentError::reference(path, format!("link mentions unknown node n{n}")));
                }
            }
            let sigma = level_map(path, "sigma", &l.sigma)?;
            if let Some((a, b)) = sigma.iter().find(|&(a, b)| !known(a.0) || !known(b.0)) {
                return Err(DocumentError::reference(
                    path,
                    format!("sigma of link n{} -> n{} maps {a} to {b}, which is not a node", l.from, l.to),
                ));
            }
            if links.insert((NodeId(l.from), NodeId(l.to)), sigma).is_some() {
                return Err(DocumentError::reference(path, format!("link n{} -> n{} listed twice", l.from, l.to)));
            }
        }
        Ok(Shell::new(forest, polarity, links))
    }
}

fn resolve_labels(
    path: &str,
    shell: &Shell,
    labels: &Pairs,
    rho: &[RawRho],
    cells: usize,
) -> Result<Diagram, DocumentError> {
    let known = |n: NodeId| shell.forest().level_of(n).is_some();
    let mut lab = BTreeMap::new();
    for &[n, c] in labels {
        if !known(NodeId(n)) {
            return Err(DocumentError::reference(path, format!("label given for unknown node n{n}")));
        }
        if c as usize >= cells {
            return Err(DocumentError::reference(path, format!("label of n{n} names unknown cell c{c}")));
        }
        if lab.insert(NodeId(n), CellId(c)).is_some() {
            return Err(DocumentError::reference(path, format!("labels list n{n} twice")));
        }
    }
    if let Some(n) = shell.forest().nodes().find(|n| !lab.contains_key(n)) {
        return Err(DocumentError::reference(path, format!("node {n} has no label")));
    }
    let mut rhos = BTreeMap::new();
    for r in rho {
        let node = NodeId(r.node);
        if !known(node) {
            return Err(DocumentError::reference(path, format!("rho given for unknown node {node}")));
        }
        let m = level_map(path, "rho", &r.map)?;
        if let Some((a, _)) = m.iter().find(|&(a, _)| !known(a)) {
            return Err(DocumentError::reference(path, format!("rho of {node} maps unknown node {a}")));
        }
        if rhos.insert(node, m).is_some() {
            return Err(DocumentError::reference(path, format!("rho lists {node} twice")));
        }
    }
    Ok(Diagram { shell: shell.clone(), labels: lab, rho: rhos })
}

impl RawDiagram {
    fn resolve(&self, path: &str, cells: usize) -> Result<Diagram, DocumentError> {
        let shell = self.shell.resolve(path)?;
        resolve_labels(path, &shell, &self.labels, &self.rho, cells)
    }
}

fn cell_ids(path: &str, ids: &[u32], cells: usize) -> Result<Vec<CellId>, DocumentError> {
    ids.iter()
        .map(|&c| {
            if (c as usize) < cells {
                Ok(CellId(c))
            } else {
                Err(DocumentError::reference(path, format!("unknown cell c{c}")))
            }
        })
        .collect()
}

impl RawDocument {
    fn resolve(self) -> Result<Document, DocumentError> {
        if self.format_version != FORMAT_VERSION {
            return Err(DocumentError::Version(self.format_version));
        }
        let n = self.registry.len();
        let mut registry = Registry::new();
        for (i, c) in self.registry.iter().enumerate() {
            let path = format!("registry cell {i}");
            if c.id as usize != i {
                return Err(DocumentError::reference(&path, format!("has id c{}, expected c{i}", c.id)));
            }
            if c.conjugate as usize >= n {
                return Err(DocumentError::reference(&path, format!("conjugate c{} is unknown", c.conjugate)));
            }
            let boundary = match &c.boundary {
                Some(b) => Some(b.resolve(&format!("{path} boundary"), n)?),
                None => None,
            };
            registry.push_raw(Cell {
                id: CellId(c.id),
                name: c.name.clone(),
                dim: c.dim,
                polarity: c.polarity.into(),
                conjugate: CellId(c.conjugate),
                boundary,
            });
        }

        let mut structures = BTreeMap::new();
        for (name, s) in &self.structures {
            let path = format!("structure {name:?}");
            let shell = s.shell.resolve(&path)?;
            let kind = ShellKind::from(s.kind);
            let st = match (&s.labels, &s.rho) {
                (None, None) => Structure::Shell { kind, shell },
                (Some(labels), rho) => Structure::Diagram {
                    kind,
                    diagram: resolve_labels(&path, &shell, labels, rho.as_deref().unwrap_or(&[]), n)?,
                },
                (None, Some(_)) => return Err(DocumentError::reference(&path, "rho given without labels")),
            };
            structures.insert(name.clone(), st);
        }

        let witnesses = match &self.witnesses {
            None => None,
            Some(w) => {
                let path = "witnesses";
                let mut problems = BTreeMap::new();
                for (k, d) in &w.problems {
                    problems.insert(k.clone(), d.resolve(&format!("problem {k:?}"), n)?);
                }
                let mut invertible = BTreeSet::new();
                for &[a, b] in &w.invertible {
                    let ids = cell_ids(path, &[a, b], n)?;
                    invertible.insert((ids[0].min(ids[1]), ids[0].max(ids[1])));
                }
                let mut witnesses = BTreeMap::new();
                for (k, v) in &w.witnesses {
                    witnesses.insert(k.clone(), cell_ids(&format!("witness {k:?}"), v, n)?);
                }
                Some(WitnessTable {
                    universal: cell_ids(path, &w.universal, n)?.into_iter().collect(),
                    identical: cell_ids(path, &w.identical, n)?.into_iter().collect(),
                    invertible,
                    witnesses,
                    problems,
                    weak_n: w.weak_n,
                })
            }
        };

        Ok(Document { name: self.name, registry, structures, witnesses })
    }
}
