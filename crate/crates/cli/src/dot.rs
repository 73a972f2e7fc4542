use std::fmt::Write;

use ohg::directed::ShapeGraph;

/// Graphviz source: bodies are boxes, feet circles, legs solid, links dashed.
pub fn render(name: &str, g: &ShapeGraph) -> String {
    let mut out = String::new();
    writeln!(out, "graph {:?} {{", name).unwrap();
    for b in &g.bodies {
        writeln!(out, "  {b} [shape=box];").unwrap();
    }
    for f in &g.feet {
        writeln!(out, "  {f} [shape=circle];").unwrap();
    }
    for (b, f) in &g.legs {
        writeln!(out, "  {b} -- {f};").unwrap();
    }
    for (x, y) in &g.links {
        writeln!(out, "  {x} -- {y} [style=dashed];").unwrap();
    }
    out.push_str("}\n");
    out
}
