use orgsim_core::graph::{barabasi_albert, erdos_renyi, Graph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Clustering by enumerating every ordered triple of distinct nodes.
fn brute_force_clustering(g: &Graph) -> f64 {
    let n = g.node_count();
    let mut total = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| u != v && g.has_link(v, u)).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut closed = 0usize;
        for a in 0..n {
            for b in 0..n {
                if a < b && a != v && b != v && g.has_link(v, a) && g.has_link(v, b) && g.has_link(a, b) {
                    closed += 1;
                }
            }
        }
        total += closed as f64 / (k * (k - 1) / 2) as f64;
    }
    total / n as f64
}

/// Mean finite distance over unordered pairs, by Floyd–Warshall.
#[allow(clippy::needless_range_loop)]
fn floyd_warshall_apl(g: &Graph) -> Option<f64> {
    let n = g.node_count();
    const INF: u64 = u64::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
        for j in 0..n {
            if g.has_link(i, j) {
                row[j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let (mut sum, mut count) = (0u64, 0u64);
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] < INF {
                sum += d[i][j];
                count += 1;
            }
        }
    }
    (count > 0).then(|| sum as f64 / count as f64)
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let p: f64 = rng.random_range(0.0..0.6);
    let mut g = Graph::new(n).unwrap();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                g.add_link(i, j).unwrap();
            }
        }
    }
    g
}

#[test]
fn chorded_square_matches_hand_count() {
    let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
    assert!((brute_force_clustering(&g) - 5.0 / 6.0).abs() < 1e-15);
    assert!((g.clustering_coefficient() - 5.0 / 6.0).abs() < 1e-15);
    assert!((g.local_clustering(0) - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(g.local_clustering(1), 1.0);
}

#[test]
fn metrics_match_oracles_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for _ in 0..200 {
        let n = rng.random_range(1..=30);
        let g = random_graph(&mut rng, n);
        assert!((g.clustering_coefficient() - brute_force_clustering(&g)).abs() <= 1e-12);
        match floyd_warshall_apl(&g) {
            Some(expected) => assert!((g.average_path_length().unwrap() - expected).abs() <= 1e-12),
            None => assert!(g.average_path_length().is_err()),
        }
    }
}

#[test]
fn n20_path_lengths_equal_floyd_warshall() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let g = random_graph(&mut rng, 20);
        if let Some(expected) = floyd_warshall_apl(&g) {
            assert_eq!(g.average_path_length().unwrap(), expected);
        }
    }
}

#[test]
fn barabasi_hubs_beat_erdos_renyi() {
    let mut wins = 0;
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ba = barabasi_albert(100, 2, 3, &mut rng).unwrap();
        let er = erdos_renyi(100, ba.edge_count(), &mut rng).unwrap();
        let max_deg = |g: &Graph| (0..g.node_count()).map(|v| g.degree(v)).max().unwrap();
        if max_deg(&ba) > max_deg(&er) {
            wins += 1;
        }
    }
    assert!(wins >= 950, "BA max degree exceeded ER in only {wins}/1000 draws");
}

#[test]
fn generators_are_deterministic() {
    let a = erdos_renyi(50, 80, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let b = erdos_renyi(50, 80, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(a, b);
    let a = barabasi_albert(50, 3, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let b = barabasi_albert(50, 3, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    assert_eq!(a, b);
}

fn assert_symmetric(g: &Graph) {
    let mut half = 0;
    for i in 0..g.node_count() {
        for &j in g.neighbors(i) {
            assert!(g.neighbors(j).contains(&i));
            assert_ne!(i, j);
        }
        half += g.degree(i);
    }
    assert_eq!(half, 2 * g.edge_count());
}

proptest! {
    #[test]
    fn erdos_renyi_has_exact_edges(n in 1usize..40, frac in 0.0f64..=1.0, seed: u64) {
        let total = n * (n - 1) / 2;
        let m = (frac * total as f64) as usize;
        let g = erdos_renyi(n, m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(g.edge_count(), m);
        assert_symmetric(&g);
    }

    #[test]
    fn barabasi_albert_has_exact_edges(m in 1usize..5, extra_seed in 0usize..4, grow in 0usize..40, seed: u64) {
        let s = m + extra_seed;
        let n = s + grow;
        let g = barabasi_albert(n, m, s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(g.edge_count(), s * (s - 1) / 2 + (n - s) * m);
        assert_symmetric(&g);
    }

    #[test]
    fn link_edits_keep_symmetry(ops in proptest::collection::vec((any::<bool>(), 0usize..12, 0usize..12), 0..200)) {
        let mut g = Graph::new(12).unwrap();
        for (add, i, j) in ops {
            let r = if add { g.add_link(i, j) } else { g.remove_link(i, j) };
            prop_assert_eq!(r.is_err(), i == j);
        }
        assert_symmetric(&g);
        let hist_total: usize = g.degree_histogram().values().sum();
        prop_assert_eq!(hist_total, 12);
    }

    #[test]
    fn order_two_neighborhood_matches_definition(seed: u64, v in 0usize..15) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng, 15);
        let got = g.neighbors_within(v, 2).unwrap();
        for u in 0..15 {
            let expect = u != v && (g.has_link(v, u) || g.neighbors(v).iter().any(|&w| g.has_link(w, u)));
            prop_assert_eq!(got.contains(&u), expect);
        }
    }
}
