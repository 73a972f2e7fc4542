use ohg::hypergraph::CellId;
use ohg::weakcat::{
    check_axioms, check_identical, check_invertible, check_universal, globe2_certificate, Axiom, Entry, Mode,
    WitnessTable,
};
use proptest::prelude::*;

fn cell(g: &ohg::gallery::Gallery, name: &str) -> CellId {
    g.registry.by_name(name).unwrap()
}

#[test]
fn certificate_passes_all_six_axioms() {
    let (g, t) = globe2_certificate();
    let r = check_axioms(&g.registry, &t, 3, Mode::Main);
    assert!(r.is_ok(), "{r}");
    for a in Axiom::SIX {
        assert!(r.checked.contains_key(&a), "{} not reported", a.name());
    }
    assert!(r.checked.values().sum::<usize>() > 0);
}

#[test]
fn deleting_any_entry_names_it() {
    let (g, t) = globe2_certificate();
    let entries = t.entries();
    assert!(entries.len() > 30);
    for e in entries {
        let key = e.key(&g.registry);
        let r = check_axioms(&g.registry, &t.without(&e), 3, Mode::Main);
        assert!(!r.is_ok(), "removing {key} still passes");
        assert!(r.names(&key), "removing {key} gives\n{r}");
    }
}

#[test]
fn missing_empty_occupant_fails_existence() {
    let (g, t) = globe2_certificate();
    let r = check_axioms(&g.registry, &t.without(&Entry::Witness("existence.empty(x)".into())), 3, Mode::Main);
    assert!(!r.passes(Axiom::Existence));
    assert!(r.failures.iter().any(|f| f.axiom == Axiom::Existence && f.entry == "existence.empty(x)"), "{r}");
}

#[test]
fn closer_of_universal_cells_must_be_universal() {
    let (g, t) = globe2_certificate();
    // the empty pasting diagram on x is vacuously made of universal cells, and f closes it
    let r = check_axioms(&g.registry, &t.without(&Entry::Universal(cell(&g, "f"))), 3, Mode::Main);
    assert!(!r.passes(Axiom::UniversalClosers), "{r}");
    let hit = r.failures.iter().find(|x| x.axiom == Axiom::UniversalClosers).unwrap();
    assert_eq!(hit.entry, "universal(f)");
    assert!(hit.detail.contains("existence.empty(x)"), "{r}");
}

#[test]
fn identical_cells() {
    let (g, t) = globe2_certificate();
    let reg = &g.registry;
    assert!(check_identical(reg, &t, cell(&g, "f"), 3).is_ok());
    let r = check_identical(reg, &t, cell(&g, "mu"), 3);
    assert!(r.failures.iter().any(|f| f.detail.contains("simpl")), "{r}");
    let r = check_identical(reg, &t.without(&Entry::Witness("identical(f).left(f@0)".into())), cell(&g, "f"), 3);
    assert!(r.names("identical(f).left(f@0)"), "{r}");
}

#[test]
fn invertible_pairs() {
    let (g, t) = globe2_certificate();
    let reg = &g.registry;
    let (a, mu) = (cell(&g, "A"), cell(&g, "mu"));
    let r = check_invertible(reg, &t, a, a, 3);
    assert!(r.is_ok(), "{r}");
    assert!(!r.equivalences.is_empty());
    // dom(mu) is two arrows, cod(A) is one
    let mut t2 = t.clone();
    t2.mark_invertible(a, mu);
    assert!(!check_invertible(reg, &t2, a, mu, 3).is_ok());
}

#[test]
fn universal_cells() {
    let (g, t) = globe2_certificate();
    let reg = &g.registry;
    for name in ["f", "A", "mu", "e1"] {
        assert!(check_universal(reg, &t, cell(&g, name), 3).is_ok(), "{name}");
    }
    let r = check_universal(reg, &t.without(&Entry::Witness("universal(A).factor(A)".into())), cell(&g, "A"), 3);
    assert!(r.names("universal(A).factor(A)"), "{r}");
}

#[test]
fn certificate_holds_at_lower_truncations() {
    let (g, t) = globe2_certificate();
    for n in 0..=3 {
        let r = check_axioms(&g.registry, &t, n, Mode::Main);
        assert!(r.is_ok(), "N = {n}\n{r}");
    }
}

#[test]
fn empty_table_fails() {
    let (g, _) = globe2_certificate();
    let r = check_axioms(&g.registry, &WitnessTable::default(), 3, Mode::Main);
    assert!(!r.is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn enlarging_a_table_keeps_it_passing(
        extra in prop::collection::vec(("[a-z]{1,6}\\([a-z]{1,3}\\)", prop::collection::vec(0u32..12, 0..3)), 0..6),
    ) {
        let (g, t) = globe2_certificate();
        let mut big = t.clone();
        for (k, cells) in extra {
            big.witnesses.entry(format!("extra.{k}")).or_insert_with(|| cells.into_iter().map(CellId).collect());
        }
        prop_assert!(check_axioms(&g.registry, &big, 3, Mode::Main).is_ok());
    }
}
