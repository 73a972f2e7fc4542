use rand::Rng;

use ohg::directed::{close_directed, reassemble, split_frame};
use ohg::gen::{self, GenConfig};
use ohg::hypergraph::{frame_dual, frame_isomorphism, validate_frame, Registry};
use ohg::pasting::close_shell;
use ohg::shell::{validate_frame_shell, validate_pasting_shell, Polarity};

struct Tally {
    name: &'static str,
    passed: usize,
    failed: Vec<String>,
}

impl Tally {
    fn new(name: &'static str) -> Tally {
        Tally { name, passed: 0, failed: Vec::new() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(what());
        }
    }
}

/// Runs `count` rounds of each check and prints one line per check.
pub fn run(seed: u64, count: usize) -> bool {
    let mut closure = Tally::new("pasting shells close to frames");
    let mut directed = Tally::new("directed pasting shells close directedly");
    let mut dual = Tally::new("frame duality is an involution");
    let mut split = Tally::new("split and reassemble recovers the frame");

    for i in 0..count {
        let round = seed.wrapping_add(i as u64);
        let mut rng = gen::rng(round);
        let n = rng.gen_range(0..=3);

        let xi = gen::pasting_shell(&mut rng, n, Polarity::Pos, &GenConfig::default());
        let ok = validate_pasting_shell(&xi).is_ok()
            && close_shell(&xi, Polarity::Neg).is_ok_and(|c| validate_frame_shell(&c.closure).is_ok());
        closure.record(ok, || format!("seed {round}, dim {n}"));

        let sign = if rng.gen_bool(0.5) { Polarity::Pos } else { Polarity::Neg };
        let xi = gen::pasting_shell(&mut rng, n, sign, &GenConfig::directed());
        let res = close_directed(&xi);
        directed.record(res.is_ok(), || format!("seed {round}, dim {n}: {}", res.err().unwrap()));

        let mut reg = Registry::new();
        let zeta = gen::frame(&mut rng, &mut reg, n, &GenConfig::directed(), "s");
        let back = frame_dual(&reg, &zeta).and_then(|d| frame_dual(&reg, &d));
        dual.record(validate_frame(&reg, &zeta).is_ok() && back.is_ok_and(|b| b == zeta), || {
            format!("seed {round}, dim {n}")
        });

        let ok = split_frame(&reg, &zeta, None)
            .ok()
            .and_then(|s| frame_isomorphism(&reg, &reassemble(&s), &zeta).ok().flatten())
            .is_some();
        split.record(ok, || format!("seed {round}, dim {n}"));
    }

    let mut all = true;
    for t in [closure, directed, dual, split] {
        let verdict = if t.failed.is_empty() { "pass" } else { "FAIL" };
        println!("{verdict} {}: {}/{}", t.name, t.passed, t.passed + t.failed.len());
        for f in &t.failed {
            println!("  {f}");
        }
        all &= t.failed.is_empty();
    }
    println!("seed {seed}");
    all
}
