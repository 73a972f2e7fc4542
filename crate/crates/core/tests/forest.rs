mod common;

use std::collections::{BTreeMap, BTreeSet};

use ohg::forest::{canonical_code, check_homomorphism, enumerate_isomorphisms, Forest, LevelMap, NodeId};
use proptest::prelude::*;

use common::{brute_tree_isos, decorated_tree_check};

/// A forest with the given level sizes (top first); `picks` chooses parents.
fn build(sizes: &[usize], picks: &[usize]) -> Forest {
    let dim = sizes.len() - 1;
    let mut levels: Vec<Vec<NodeId>> = vec![Vec::new(); dim + 1];
    let mut next = 0;
    for (i, &k) in sizes.iter().enumerate() {
        for _ in 0..k {
            levels[dim - i].push(NodeId(next));
            next += 1;
        }
    }
    let mut parent = BTreeMap::new();
    let mut pick = picks.iter().cycle();
    for l in 0..dim {
        if levels[l + 1].is_empty() {
            levels[l].clear();
        }
        for &x in &levels[l] {
            let ps = &levels[l + 1];
            parent.insert(x, ps[pick.next().unwrap() % ps.len()]);
        }
    }
    Forest::new(dim, levels.into_iter().map(|l| l.into_iter().collect()).collect(), parent).unwrap()
}

fn forest_strategy(max_per_level: usize) -> impl Strategy<Value = Forest> {
    (1usize..4, prop::collection::vec(0usize..64, 1..40)).prop_flat_map(move |(dim, picks)| {
        prop::collection::vec(1..=max_per_level, dim + 1).prop_map(move |sizes| build(&sizes, &picks))
    })
}

fn tree_strategy(max_nodes: usize) -> impl Strategy<Value = Forest> {
    (0usize..4, prop::collection::vec(0usize..64, 1..16)).prop_flat_map(move |(dim, picks)| {
        prop::collection::vec(1usize..=3, dim).prop_map(move |raw| {
            // once the budget runs out every lower level is empty
            let mut budget = max_nodes - 1;
            let mut sizes = vec![1];
            for k in raw {
                let k = k.min(budget);
                budget -= k;
                sizes.push(k);
            }
            build(&sizes, &picks)
        })
    })
}

#[test]
fn decorated_trees_codes_match_brute_force() {
    let (checked, bad) = decorated_tree_check(6);
    assert_eq!(bad, 0);
    assert!(checked > 1000);
}

#[test]
fn two_triangles_subforest() {
    // two roots with three children each, every child with one leaf
    let f = build(&[2, 6, 6], &[0, 1, 2, 3, 4, 5, 0, 0, 0, 1, 1, 1]);
    let r = *f.top().iter().next().unwrap();
    let sub = f.subforest(r).unwrap();
    assert_eq!(sub.dim(), 1);
    assert_eq!(sub.top().len(), 3);
    assert_eq!(sub.node_count(), 6);
    // subforest of a subtree is the subforest
    assert_eq!(f.subtree(r).unwrap().subforest(r).unwrap(), sub);
}

proptest! {
    #[test]
    fn subtrees_partition_the_forest(f in forest_strategy(4)) {
        let mut seen = BTreeSet::new();
        for &r in f.top() {
            for n in f.subtree(r).unwrap().nodes() {
                prop_assert!(seen.insert(n), "node {n} in two subtrees");
            }
        }
        prop_assert_eq!(seen.len(), f.node_count());
    }

    #[test]
    fn identity_is_an_isomorphism(f in forest_strategy(4)) {
        let rep = check_homomorphism(&LevelMap::identity(f.nodes()), &f, &f);
        prop_assert!(rep.is_isomorphism());
    }

    #[test]
    fn isomorphism_count_matches_brute_force(t in tree_strategy(8), u in tree_strategy(8)) {
        let none = |_: NodeId| 0u8;
        for (a, b) in [(&t, &t), (&t, &u)] {
            let fast = enumerate_isomorphisms(a, b, &|_, _| true);
            prop_assert_eq!(fast.len(), brute_tree_isos(a, b, &none, &none));
            for m in &fast {
                prop_assert!(check_homomorphism(m, a, b).is_isomorphism());
            }
        }
    }

    #[test]
    fn codes_are_invariant_under_renaming(t in tree_strategy(8), shift in 1u32..50) {
        let renamed = Forest::new(
            t.dim(),
            t.levels().iter().map(|l| l.iter().map(|n| NodeId(n.0 * 3 + shift)).collect()).collect(),
            t.parents().iter().map(|(a, b)| (NodeId(a.0 * 3 + shift), NodeId(b.0 * 3 + shift))).collect(),
        ).unwrap();
        let plain = |_: NodeId| Vec::new();
        prop_assert_eq!(canonical_code(&t, &plain), canonical_code(&renamed, &plain));
    }
}
