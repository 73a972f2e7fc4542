//! ω-hypergraphs at finite dimension: leveled forests, polarized shells with
//! links, labeled diagrams over a cell registry, pasting and closure,
//! directedness, and truncated certificate checking for weak ω-categories.

pub mod forest;
pub mod hypergraph;
pub mod iso;
pub mod pasting;
pub mod shell;
pub mod directed;
pub mod gallery;
pub mod weakcat;
pub mod gen;
pub mod document;
