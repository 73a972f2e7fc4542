//! The acceptance criteria, one line each. Runs without the test harness so the
//! verdict lines always reach the output.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use ohg::directed::{check_directed, check_directed_hypergraph, close_directed, is_simple, reassemble, split_frame};
use ohg::document::gallery_document;
use ohg::gallery::{build_gallery, GALLERY_NAMES};
use ohg::gen::{self, GenConfig};
use ohg::hypergraph::{frame_dual, frame_isomorphism, Diagram, Registry};
use ohg::pasting::{close_shell, close_shell_with, open_nodes, trace_chain, IdAlloc};
use ohg::shell::{dual_shell, shell_isomorphism, validate, validate_frame_shell, Polarity, Shell, ShellKind};
use ohg::weakcat::{check_axioms, globe2_certificate, Mode};

use common::{
    brute_diagram_iso, brute_shell_iso, decorated_tree_check, directed_corpus, directed_frames, is_diagram_iso,
    is_shell_iso, mutants, pasting_corpus, to_map,
};

struct Outcome {
    ok: bool,
    summary: String,
}

fn outcome(ok: bool, summary: impl Into<String>) -> Outcome {
    Outcome { ok, summary: summary.into() }
}

const CORPUS_SEED: u64 = 20_000;

fn corpus() -> Vec<Shell> {
    pasting_corpus(500, CORPUS_SEED)
}

fn validator_completeness() -> Outcome {
    let mut tags = BTreeSet::new();
    let mut wrong = Vec::new();
    let all = mutants();
    for (want, m) in &all {
        let got = m.report().conditions();
        if got != BTreeSet::from([*want]) {
            wrong.push(format!("{want}: got {got:?}"));
        }
        tags.insert(*want);
    }
    let ok = wrong.is_empty() && all.len() == 10 && tags.len() == 10;
    outcome(ok, format!("{} mutants, {} distinct tags, {} wrong {wrong:?}", all.len(), tags.len(), wrong.len()))
}

fn closure_correctness() -> Outcome {
    let shells = corpus();
    let dims: BTreeSet<usize> = shells.iter().map(|s| s.dim()).collect();
    let max_tops = shells.iter().map(|s| s.forest().top().len()).max().unwrap_or(0);
    let mut failed = 0;
    for (i, xi) in shells.iter().enumerate() {
        let p = if i % 2 == 0 { Polarity::Neg } else { Polarity::Pos };
        let ok = validate(xi, ShellKind::Pasting).is_ok()
            && close_shell(xi, p).is_ok_and(|c| validate_frame_shell(&c.closure).is_ok());
        failed += usize::from(!ok);
    }
    let ok = failed == 0 && shells.len() >= 500 && dims == BTreeSet::from([1, 2, 3]) && max_tops <= 12;
    outcome(ok, format!("{} shells, dims {dims:?}, at most {max_tops} tops, {failed} failures", shells.len()))
}

fn chain_properties() -> Outcome {
    let (mut chains, mut failed) = (0, 0);
    for xi in corpus().iter().filter(|s| s.dim() >= 2) {
        let f = xi.forest();
        let open = open_nodes(xi);
        for &y0 in &open {
            for x0 in f.children(y0) {
                chains += 1;
                let Ok(c) = trace_chain(xi, y0, x0) else {
                    failed += 1;
                    continue;
                };
                let low = c.low_links();
                let back = trace_chain(xi, c.end().0, c.end().1);
                let ok = open.contains(&c.end().0)
                    && back.is_ok_and(|b| (b.ys, b.xs) == c.reversed())
                    && low.iter().collect::<BTreeSet<_>>().len() == low.len();
                failed += usize::from(!ok);
            }
        }
    }
    outcome(failed == 0 && chains > 0, format!("{chains} chains, {failed} failures"))
}

fn closure_uniqueness() -> Outcome {
    let mut failed = 0;
    let shells = corpus();
    for (i, xi) in shells.iter().take(200).enumerate() {
        let start = xi.max_id().map_or(0, |m| m.0 + 1);
        let count = 4 * xi.forest().node_count() + 1;
        let a = close_shell_with(xi, Polarity::Pos, &mut IdAlloc::scattered(start, count, i as u64));
        let b = close_shell_with(xi, Polarity::Pos, &mut IdAlloc::scattered(start, count, !(i as u64)));
        let ok = match (a, b) {
            (Ok(a), Ok(b)) => shell_isomorphism(&a.closure, &b.closure).is_ok_and(|m| m.is_some()),
            _ => false,
        };
        failed += usize::from(!ok);
    }
    outcome(failed == 0, format!("200 pairs of closures, {failed} not isomorphic"))
}

fn directed_closure() -> Outcome {
    let shells = directed_corpus(240, CORPUS_SEED);
    let dims: BTreeSet<usize> = shells.iter().map(|s| s.dim()).collect();
    let mut failed = 0;
    for xi in &shells {
        let sign = check_directed(xi, ShellKind::Pasting).orientations.iter().next().copied();
        let ok = sign.is_some_and(|p| {
            close_directed(xi).is_ok_and(|c| {
                check_directed(&c.closer, ShellKind::Cell).is(p.flip())
                    && check_directed(&c.closure, ShellKind::Frame).is(p.flip())
            })
        });
        failed += usize::from(!ok);
    }
    let ok = failed == 0 && shells.len() >= 200 && dims == BTreeSet::from([1, 2, 3]);
    outcome(ok, format!("{} directed pasting shells, dims {dims:?}, {failed} failures", shells.len()))
}

fn small(levels: impl Fn(usize) -> usize, dim: usize) -> bool {
    (0..=dim).all(|l| levels(l) <= 8)
}

fn isomorphism_oracle() -> Outcome {
    let (trees, mut bad) = decorated_tree_check(6);
    let cfg = GenConfig { max_tops: 2, max_inner: 1, ..GenConfig::default() };
    let (mut shells, mut frames) = (0, 0);
    for seed in 0..150u64 {
        let mut rng = gen::rng(seed);
        let n = (seed % 3) as usize;
        let a = gen::pasting_shell(&mut rng, n, Polarity::Pos, &cfg);
        let b = gen::pasting_shell(&mut rng, n, Polarity::Pos, &cfg);
        let fits = |s: &Shell| small(|l| s.forest().level(l).len(), s.dim());
        if fits(&a) && fits(&b) {
            let ren = a.rename(&|x| ohg::forest::NodeId(x.0 + 1000));
            for (x, y) in [(&a, &b), (&a, &ren), (&b, &a)] {
                let fast = shell_isomorphism(x, y).ok().flatten();
                let slow = brute_shell_iso(x, y);
                let good = fast.is_some() == slow.is_some() && fast.is_none_or(|m| is_shell_iso(&to_map(&m), x, y));
                bad += usize::from(!good);
                shells += 1;
            }
        }

        let mut reg = Registry::new();
        let z = gen::frame(&mut rng, &mut reg, n, &cfg, "a");
        if small(|l| z.shell.forest().level(l).len(), z.dim()) {
            let d = frame_dual(&reg, &z).unwrap();
            let ren = z.rename(&|x| ohg::forest::NodeId(x.0 * 3 + 7));
            for y in [&z, &d, &ren] {
                let fast = frame_isomorphism(&reg, &z, y).ok().flatten();
                let slow = brute_diagram_iso(&z, y);
                let good = fast.is_some() == slow.is_some() && fast.is_none_or(|m| is_diagram_iso(&to_map(&m), &z, y));
                bad += usize::from(!good);
                frames += 1;
            }
        }
    }
    let ok = bad == 0 && shells > 100 && frames > 100;
    outcome(ok, format!("{trees} tree comparisons, {shells} shell pairs, {frames} frame pairs, {bad} disagreements"))
}

fn involutions() -> Outcome {
    let mut failed = Vec::new();
    let mut cells = 0;
    for seed in 0..200u64 {
        let mut rng = gen::rng(seed);
        let n = (seed % 4) as usize;
        let cfg = if seed % 2 == 0 { GenConfig::default() } else { GenConfig::directed() };
        let xi = gen::frame_shell(&mut rng, n, &cfg);
        if dual_shell(&xi).and_then(|d| dual_shell(&d)).map_or(true, |b| b != xi) {
            failed.push(format!("shell {seed}"));
        }
        let mut reg = Registry::new();
        let z = gen::frame(&mut rng, &mut reg, n, &cfg, "c");
        if frame_dual(&reg, &z).and_then(|d| frame_dual(&reg, &d)).map_or(true, |b| b != z) {
            failed.push(format!("frame {seed}"));
        }
        for c in reg.cells() {
            cells += 1;
            let k = reg.conj(c.id);
            let boundary_ok = match (reg.boundary(c.id), reg.boundary(k)) {
                (Some(b), Some(bk)) => frame_dual(&reg, b).is_ok_and(|d| &d == bk),
                (None, None) => true,
                _ => false,
            };
            if reg.conj(k) != c.id || reg.cell(k).polarity == c.polarity || !boundary_ok {
                failed.push(format!("cell {} in {seed}", c.name));
            }
        }
    }
    outcome(failed.is_empty(), format!("200 shells, 200 frames, {cells} cells, failures {failed:?}"))
}

fn split_reassemble() -> Outcome {
    let frames = directed_frames(220, CORPUS_SEED);
    let (mut splits, mut failed) = (0, 0);
    for (reg, z) in &frames {
        let v = ohg::directed::frame_verdict(reg, z);
        if v.orientations.is_empty() {
            failed += 1;
        }
        for &p in &v.orientations {
            splits += 1;
            let ok = split_frame(reg, z, Some(p)).is_ok_and(|s| {
                let root = s.cod.shell.forest().root().unwrap();
                let tops = |d: &Diagram| d.shell.forest().top().iter().all(|&t| d.shell.polarity(t) == p.flip());
                s.cod.shell.polarity(root) == p
                    && tops(&s.dom)
                    && frame_isomorphism(reg, &reassemble(&s), z).is_ok_and(|m| m.is_some())
            });
            failed += usize::from(!ok);
        }
    }
    outcome(failed == 0 && frames.len() >= 200, format!("{} frames, {splits} splits, {failed} failures", frames.len()))
}

fn ohg_bin(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_ohg")).args(args).output().ok().and_then(|o| o.status.code())
}

fn gallery_conformance() -> Outcome {
    let names = ["rewrite1", "omega_multigraph", "doublegraph", "fc_multigraph", "globe0", "globe1", "globe2", "globe3"];
    let dir = std::env::temp_dir().join(format!("ohg-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut failed = Vec::new();
    for name in names {
        let g = build_gallery(name).unwrap();
        if !check_directed_hypergraph(&g.registry).is_empty() {
            failed.push(format!("{name} (library)"));
        }
        let path = dir.join(format!("{name}.ohg.json"));
        let p = path.to_str().unwrap();
        if ohg_bin(&["gallery", name, "-o", p]) != Some(0) || ohg_bin(&["check-directed", p]) != Some(0) {
            failed.push(format!("{name} (cli)"));
        }
    }
    std::fs::remove_dir_all(&dir).ok();
    let om = build_gallery("omega_multigraph").unwrap();
    let reg = &om.registry;
    let one_object = reg.positive(0).count() == 1;
    let simple = reg.positive(1).all(|c| is_simple(reg, c.id));
    if !one_object || !simple {
        failed.push(format!("omega_multigraph: one object {one_object}, simple arrows {simple}"));
    }
    outcome(failed.is_empty(), format!("{} fixtures, failures {failed:?}", names.len()))
}

fn weak_certificate() -> Outcome {
    let (g, t) = globe2_certificate();
    let full = check_axioms(&g.registry, &t, 3, Mode::Main);
    let mut unnamed = Vec::new();
    let entries = t.entries();
    for e in &entries {
        let key = e.key(&g.registry);
        let r = check_axioms(&g.registry, &t.without(e), 3, Mode::Main);
        if r.is_ok() || !r.names(&key) {
            unnamed.push(key);
        }
    }
    let ok = full.is_ok() && unnamed.is_empty();
    let passed = ohg::weakcat::Axiom::SIX.iter().filter(|a| full.passes(**a)).count();
    outcome(ok, format!("{passed}/6 axioms at N = 3, {} deletions, not named {unnamed:?}", entries.len()))
}

fn serialization() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let mut failed = Vec::new();
    for &name in GALLERY_NAMES {
        let Ok(want) = std::fs::read_to_string(dir.join(format!("{name}.ohg.json"))) else {
            failed.push(format!("{name}: missing"));
            continue;
        };
        let written = gallery_document(name).unwrap().to_json();
        let reread = ohg::document::Document::parse(&want).map(|d| d.to_json());
        let cli = Command::new(env!("CARGO_BIN_EXE_ohg")).args(["gallery", name]).output().unwrap().stdout;
        if written != want || reread.ok().as_deref() != Some(want.as_str()) || cli != want.as_bytes() {
            failed.push(name.to_string());
        }
    }
    outcome(failed.is_empty(), format!("{} fixtures, mismatches {failed:?}", GALLERY_NAMES.len()))
}

fn main() {
    let criteria: [(&str, Option<u64>, fn() -> Outcome); 11] = [
        ("validator completeness", Some(1), validator_completeness),
        ("closure correctness", Some(30), closure_correctness),
        ("chain properties", None, chain_properties),
        ("closure uniqueness", None, closure_uniqueness),
        ("directed closure", None, directed_closure),
        ("isomorphism oracle", Some(60), isomorphism_oracle),
        ("involutions", None, involutions),
        ("split and reassemble", None, split_reassemble),
        ("gallery conformance", None, gallery_conformance),
        ("weak-category certificate", Some(5), weak_certificate),
        ("serialization", None, serialization),
    ];
    let mut all = true;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|s| took < Duration::from_secs(s));
        let ok = o.ok && in_time;
        let bound = limit.map_or(String::new(), |s| format!(" < {s} s"));
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict} {:>2} {name}: {} ({:.2} s{bound})", i + 1, o.summary, took.as_secs_f64());
        all &= ok;
    }
    if !all {
        std::process::exit(1);
    }
}
