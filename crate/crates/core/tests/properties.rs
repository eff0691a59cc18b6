use corrclust::{
    count_mistakes, is_delta_good_badset, is_delta_good_vertex, parse_instance, write_instance, Clustering,
    DeltaParams, Factor, Label, SignedGraph,
};
use proptest::prelude::*;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = SignedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(0u8..3, n * (n - 1) / 2).prop_map(move |labels| {
            let mut g = SignedGraph::new(n);
            let mut it = labels.into_iter();
            for u in 0..n {
                for v in u + 1..n {
                    let l = match it.next().unwrap() {
                        0 => Label::Plus,
                        1 => Label::Minus,
                        _ => Label::Missing,
                    };
                    g.set_label(u, v, l);
                }
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(g in graph_strategy(10)) {
        let text = write_instance(&g);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn relabeling_clusters_keeps_mistakes(
        g in graph_strategy(9),
        raw in proptest::collection::vec(0usize..4, 9),
        shift in 1usize..7,
    ) {
        let raw = &raw[..g.n()];
        let moved: Vec<usize> = raw.iter().map(|&c| (c * 5 + shift) % 11).collect();
        let a = count_mistakes(&g, &Clustering::from_assignment(raw)).unwrap();
        let b = count_mistakes(&g, &Clustering::from_assignment(&moved)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn goodness_is_monotone_in_factor(
        g in graph_strategy(9),
        pick in proptest::collection::vec(any::<bool>(), 9),
        den in 13i64..80,
    ) {
        let n = g.n();
        let c: Vec<usize> = (0..n).filter(|&v| pick[v]).collect();
        prop_assume!(!c.is_empty());
        let p = DeltaParams::new(1, den).unwrap();
        let factors = [Factor::One, Factor::Three, Factor::Nine, Factor::Thirteen];
        for v in 0..n {
            let good: Vec<bool> = factors.iter().map(|&f| is_delta_good_vertex(&g, v, &c, &p, f).unwrap()).collect();
            for w in good.windows(2) {
                prop_assert!(!w[0] || w[1]);
            }
        }
        let b = vec![c[0]];
        let good: Vec<bool> = factors.iter().map(|&f| is_delta_good_badset(&g, &b, &c, &p, f).unwrap()).collect();
        for w in good.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
    }

    #[test]
    fn goodness_is_monotone_in_delta(
        g in graph_strategy(9),
        pick in proptest::collection::vec(any::<bool>(), 9),
        den in 14i64..80,
    ) {
        let n = g.n();
        let c: Vec<usize> = (0..n).filter(|&v| pick[v]).collect();
        prop_assume!(!c.is_empty());
        let small = DeltaParams::new(1, den).unwrap();
        let large = DeltaParams::new(1, den - 1).unwrap();
        for v in 0..n {
            let a = is_delta_good_vertex(&g, v, &c, &small, Factor::Three).unwrap();
            let b = is_delta_good_vertex(&g, v, &c, &large, Factor::Three).unwrap();
            prop_assert!(!a || b);
        }
    }
}

#[test]
fn factor_times_delta_above_one_is_rejected() {
    let g = SignedGraph::filled(3, Label::Plus);
    let p = DeltaParams::new(1, 5).unwrap();
    assert!(is_delta_good_vertex(&g, 0, &[0, 1], &p, Factor::Three).is_ok());
    assert!(matches!(
        is_delta_good_vertex(&g, 0, &[0, 1], &p, Factor::Nine),
        Err(corrclust::Error::Config(_))
    ));
}

#[test]
fn delta_range_is_enforced() {
    assert!(DeltaParams::new(1, 5).is_ok());
    assert!(DeltaParams::new(1, 4).is_err());
    assert!(DeltaParams::new(0, 4).is_err());
    assert!("2/11".parse::<DeltaParams>().is_ok());
    assert!("abc".parse::<DeltaParams>().is_err());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = parse_instance("p cc 3\n0 1 +\n0 0 +\n").unwrap_err();
    assert!(matches!(err, corrclust::Error::Parse { line: 3, .. }), "{err:?}");
    let err = parse_instance("p cc 3\n0 1 +\n1 0 -\n").unwrap_err();
    assert!(matches!(err, corrclust::Error::Parse { line: 3, .. }), "{err:?}");
    let err = parse_instance("p cc 3\n0 5 +\n").unwrap_err();
    assert!(matches!(err, corrclust::Error::Parse { line: 2, .. }), "{err:?}");
    let g = parse_instance("# c\np cc 3\n0 1 +\n0 2 -\n").unwrap();
    assert_eq!(g.label(1, 2), Label::Missing);
}

#[test]
fn clustering_files_must_be_exact_covers() {
    use corrclust::parse_clustering;
    assert!(parse_clustering("0 1\n2\n", 3).is_ok());
    assert!(parse_clustering("0 1\n", 3).is_err());
    assert!(parse_clustering("0 1\n2 3\n", 3).is_err());
    assert!(parse_clustering("0 1\n1 2\n", 3).is_err());
}
