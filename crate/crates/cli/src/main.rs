//! `ohg`: command-line access to documents of ω-hypergraph structures.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage,
//! parse or reference errors.

mod dot;
mod selftest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ohg::directed::{boundary_graph, check_directed, check_directed_hypergraph, shape_graph, split_frame, ShapeGraph};
use ohg::document::{gallery_document, Document};
use ohg::gallery::{Structure, GALLERY_NAMES};
use ohg::hypergraph::{diagram_dual, diagram_isomorphism, frame_dual, frame_isomorphism};
use ohg::pasting::{close_diagram, close_shell};
use ohg::shell::{dual_shell, shell_isomorphism, Polarity, ShellKind};
use ohg::weakcat::{check_axioms, Mode};

#[derive(Parser)]
#[command(name = "ohg", version, about = "Validate, transform and check ω-hypergraph documents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sign {
    Pos,
    Neg,
}

impl From<Sign> for Polarity {
    fn from(s: Sign) -> Polarity {
        match s {
            Sign::Pos => Polarity::Pos,
            Sign::Neg => Polarity::Neg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeakMode {
    Main,
    IdentityAxiom,
}

#[derive(Subcommand)]
enum Command {
    /// Run the validators on the registry and on every (or one) structure.
    Validate {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
    },
    /// Replace a structure by its dual.
    Dual {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search for an isomorphism between a structure of A and one of B.
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        /// Structure of B, when its name differs.
        #[arg(long)]
        structure_b: Option<String>,
    },
    /// Close a pasting structure; the closure is added as `<name>.closure`.
    Close {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        #[arg(long, value_enum)]
        polarity: Sign,
        /// Label the new top node with this cell and keep the labels.
        #[arg(long)]
        occupant: Option<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print the body/foot shape graph.
    Shape {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        #[arg(long)]
        dot: bool,
    },
    /// Print the shape graph of the closer boundary of a pasting structure.
    BoundaryGraph {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        #[arg(long)]
        dot: bool,
    },
    /// Split a directed frame into `<name>.dom` and `<name>.cod`.
    Split {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
        #[arg(long, value_enum)]
        orientation: Option<Sign>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Check directedness of the registry and of every (or one) structure.
    CheckDirected {
        file: PathBuf,
        #[arg(long, short)]
        structure: Option<String>,
    },
    /// Check the weak-category axioms against the document's witness table.
    CheckWeak {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        truncate: usize,
        #[arg(long, value_enum, default_value = "main")]
        mode: WeakMode,
    },
    /// Write a named fixture document.
    Gallery {
        name: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random round-trip checks; seeded by OHG_SEED.
    Selftest {
        #[arg(long, default_value_t = 40)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(path: &Path) -> Result<Document> {
    Document::from_json(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
        .with_context(|| format!("loading {}", path.display()))
}

fn emit(doc: &Document, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => doc.save(p).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", doc.to_json());
            Ok(())
        }
    }
}

/// The named structure, or the only one when no name is given.
fn pick<'a>(doc: &'a Document, name: Option<&str>) -> Result<(String, &'a Structure)> {
    match name {
        Some(n) => doc
            .structure(n)
            .map(|s| (n.to_string(), s))
            .ok_or_else(|| anyhow!("no structure named {n:?}; have {:?}", doc.structures.keys().collect::<Vec<_>>())),
        None if doc.structures.len() == 1 => {
            let (n, s) = doc.structures.iter().next().unwrap();
            Ok((n.clone(), s))
        }
        None => bail!(
            "document has {} structures; pick one with --structure ({:?})",
            doc.structures.len(),
            doc.structures.keys().collect::<Vec<_>>()
        ),
    }
}

fn kind_name(k: ShellKind) -> &'static str {
    match k {
        ShellKind::Frame => "frame",
        ShellKind::Cell => "cell",
        ShellKind::Pasting => "pasting",
    }
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Validate { file, structure } => {
            let doc = load(&file)?;
            let parts = match structure {
                Some(n) => {
                    let (n, s) = pick(&doc, Some(&n))?;
                    vec![(format!("structure {n:?}"), s.validate(&doc.registry))]
                }
                None => doc.validate(),
            };
            let mut ok = true;
            for (path, report) in parts {
                ok &= report.is_ok();
                println!("{}: {report}", path);
            }
            Ok(ok)
        }
        Command::Dual { file, structure, output } => {
            let mut doc = load(&file)?;
            let (name, s) = pick(&doc, structure.as_deref())?;
            let dual = match s {
                Structure::Shell { kind, shell } => Structure::Shell { kind: *kind, shell: dual_shell(shell)? },
                Structure::Diagram { kind: ShellKind::Frame, diagram } => {
                    Structure::Diagram { kind: ShellKind::Frame, diagram: frame_dual(&doc.registry, diagram)? }
                }
                Structure::Diagram { kind, diagram } => {
                    Structure::Diagram { kind: *kind, diagram: diagram_dual(&doc.registry, diagram) }
                }
            };
            doc.structures.insert(name, dual);
            emit(&doc, output.as_deref())?;
            Ok(true)
        }
        Command::Iso { a, b, structure, structure_b } => {
            let (da, db) = (load(&a)?, load(&b)?);
            let (_, sa) = pick(&da, structure.as_deref())?;
            let (_, sb) = pick(&db, structure_b.as_deref().or(structure.as_deref()))?;
            let map = match (sa, sb) {
                (
                    Structure::Diagram { kind: ShellKind::Frame, diagram: x },
                    Structure::Diagram { kind: ShellKind::Frame, diagram: y },
                ) if da.registry == db.registry => frame_isomorphism(&da.registry, x, y)?,
                (Structure::Diagram { diagram: x, .. }, Structure::Diagram { diagram: y, .. }) => {
                    diagram_isomorphism(x, y)
                }
                _ => shell_isomorphism(sa.shell(), sb.shell())?,
            };
            match map {
                Some(m) => {
                    for (x, y) in m.iter() {
                        println!("{x} -> {y}");
                    }
                    Ok(true)
                }
                None => {
                    println!("none");
                    Ok(false)
                }
            }
        }
        Command::Close { file, structure, polarity, occupant, output } => {
            let mut doc = load(&file)?;
            let (name, s) = pick(&doc, structure.as_deref())?;
            let closed = match (occupant, s.diagram()) {
                (Some(occ), Some(d)) => {
                    let c = doc.registry.by_name(&occ).ok_or_else(|| anyhow!("no cell named {occ:?}"))?;
                    if doc.registry.cell(c).polarity != Polarity::from(polarity) {
                        bail!("occupant {occ:?} does not have the requested polarity");
                    }
                    let (frame, _) = close_diagram(&doc.registry, d, c)?;
                    Structure::Diagram { kind: ShellKind::Frame, diagram: frame }
                }
                (Some(_), None) => bail!("structure {name:?} is unlabeled; --occupant needs a diagram"),
                (None, _) => Structure::Shell {
                    kind: ShellKind::Frame,
                    shell: close_shell(s.shell(), polarity.into())?.closure,
                },
            };
            doc.structures.insert(format!("{name}.closure"), closed);
            emit(&doc, output.as_deref())?;
            Ok(true)
        }
        Command::Shape { file, structure, dot } => {
            let doc = load(&file)?;
            let (name, s) = pick(&doc, structure.as_deref())?;
            show_graph(&name, &shape_graph(s.shell()), dot);
            Ok(true)
        }
        Command::BoundaryGraph { file, structure, dot } => {
            let doc = load(&file)?;
            let (name, s) = pick(&doc, structure.as_deref())?;
            show_graph(&format!("{name}.boundary"), &boundary_graph(s.shell())?, dot);
            Ok(true)
        }
        Command::Split { file, structure, orientation, output } => {
            let mut doc = load(&file)?;
            let (name, s) = pick(&doc, structure.as_deref())?;
            let d = s.diagram().ok_or_else(|| anyhow!("structure {name:?} is unlabeled; split needs a frame"))?;
            let split = split_frame(&doc.registry, d, orientation.map(Polarity::from))?;
            println!("head {} ({:?}), {} link(s) cut", split.head, split.orientation, split.removed.len());
            doc.structures.insert(format!("{name}.dom"), Structure::Diagram { kind: ShellKind::Pasting, diagram: split.dom });
            doc.structures.insert(format!("{name}.cod"), Structure::Diagram { kind: ShellKind::Cell, diagram: split.cod });
            match output {
                Some(p) => emit(&doc, Some(&p))?,
                None => eprintln!("(no --output given; split not written)"),
            }
            Ok(true)
        }
        Command::CheckDirected { file, structure } => {
            let doc = load(&file)?;
            let mut ok = true;
            if structure.is_none() {
                let failures = check_directed_hypergraph(&doc.registry);
                for f in &failures {
                    println!("registry: {}: {}", f.cell, f.detail);
                }
                if failures.is_empty() {
                    println!("registry: directed ({} cells)", doc.registry.len());
                }
                ok &= failures.is_empty();
            }
            let picked: Vec<(String, &Structure)> = match structure {
                Some(n) => vec![pick(&doc, Some(&n))?],
                None => doc.structures.iter().map(|(n, s)| (n.clone(), s)).collect(),
            };
            for (name, s) in picked {
                let r = s.validate(&doc.registry);
                if !r.is_ok() {
                    println!("structure {name:?}: invalid {}: {r}", kind_name(s.kind()));
                    ok = false;
                    continue;
                }
                let d = check_directed(s.shell(), s.kind());
                if d.is_directed() {
                    println!("structure {name:?}: directed {} {:?}", kind_name(s.kind()), d.orientations);
                } else {
                    ok = false;
                    println!("structure {name:?}: not directed {}", kind_name(s.kind()));
                    for (n, why) in &d.failures {
                        println!("  {n}: {why}");
                    }
                }
            }
            Ok(ok)
        }
        Command::CheckWeak { file, truncate, mode } => {
            let doc = load(&file)?;
            let table = doc.witnesses.as_ref().ok_or_else(|| anyhow!("document has no witness table"))?;
            let mode = match mode {
                WeakMode::Main => Mode::Main,
                WeakMode::IdentityAxiom => Mode::IdentityAxiom,
            };
            let report = check_axioms(&doc.registry, table, truncate, mode);
            println!("{report}");
            Ok(report.is_ok())
        }
        Command::Gallery { name, output } => {
            let doc = gallery_document(&name).map_err(|e| anyhow!("{e}; known: {}", GALLERY_NAMES.join(", ")))?;
            emit(&doc, output.as_deref())?;
            Ok(true)
        }
        Command::Selftest { count } => {
            let seed = match std::env::var("OHG_SEED") {
                Ok(s) => s.parse().with_context(|| format!("OHG_SEED={s:?} is not an integer"))?,
                Err(_) => 0,
            };
            Ok(selftest::run(seed, count))
        }
    }
}

fn show_graph(name: &str, g: &ShapeGraph, as_dot: bool) {
    if as_dot {
        print!("{}", dot::render(name, g));
        return;
    }
    println!(
        "{} bodies, {} feet, {} legs, {} links; connected: {}, acyclic: {}",
        g.bodies.len(),
        g.feet.len(),
        g.legs.len(),
        g.links.len(),
        g.is_connected(),
        g.is_acyclic()
    );
}
