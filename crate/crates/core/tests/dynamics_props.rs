use std::collections::BTreeMap;

use orgsim_core::dynamics::{choose_destination, fire_rate, hire_rate, quit_rate, select_cn_members, step};
use orgsim_core::{
    init_ecosystem, EcosystemConfig, EcosystemState, EmploymentMatrix, Generator, Graph, ModelParams, OrgId,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_config(generator: Generator, seed_links: usize) -> EcosystemConfig {
    EcosystemConfig {
        generator,
        n_orgs: 30,
        n_links: seed_links,
        ba_m_per_node: 2,
        ba_seed_size: 3,
        staffing_sd: 20.0,
        ..EcosystemConfig::default()
    }
}

/// Every active network's pairs are linked and the shared counters agree
/// with the active set.
fn assert_link_consistency(s: &EcosystemState) {
    let mut shared: BTreeMap<(OrgId, OrgId), u32> = BTreeMap::new();
    for cn in &s.active_cns {
        assert!(cn.is_active(s.clock), "inactive network kept at t={}", s.clock);
        for (i, j) in cn.pairs() {
            assert!(s.graph.has_link(i.node(), j.node()));
            *shared.entry((i, j)).or_default() += 1;
        }
    }
    for i in s.organizations() {
        for j in s.organizations().filter(|&j| j > i) {
            assert_eq!(s.pairs.shared_active(i, j), shared.get(&(i, j)).copied().unwrap_or(0));
        }
    }
}

fn state(rows: &[&[u64]], edges: &[(usize, usize)]) -> EcosystemState {
    let mut all = vec![vec![0; rows[0].len()]];
    all.extend(rows.iter().map(|r| r.to_vec()));
    EcosystemState::new(
        Graph::from_edges(rows.len(), edges).unwrap(),
        EmploymentMatrix::from_rows(&all).unwrap(),
    )
    .unwrap()
}

#[test]
fn trajectories_are_reproducible() {
    let config = small_config(Generator::BarabasiAlbert, 57);
    let p = ModelParams::default();
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut s = init_ecosystem(&config, &mut rng).unwrap();
        let reports: Vec<_> = (0..60).map(|_| step(&mut s, &p, &mut rng).unwrap()).collect();
        (s, reports)
    };
    assert_eq!(run(), run());
}

#[test]
fn isolated_creator_falls_back_to_everyone() {
    let s = state(&[&[3, 0], &[1, 0], &[0, 2], &[5, 5], &[0, 1]], &[(1, 2)]);
    let p = ModelParams {
        pi_random: 0.0,
        ..ModelParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for size in 2..=7 {
        let m = select_cn_members(&s, OrgId(1), size, &p, &mut rng).unwrap();
        assert_eq!(m.len(), size.min(5));
        assert!(m.contains(&OrgId(1)));
        assert!(m.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn full_random_admission_reaches_everyone() {
    let s = state(&[&[3, 0], &[1, 0], &[0, 2], &[5, 5], &[0, 1], &[2, 0]], &[]);
    let p = ModelParams {
        pi_random: 1.0,
        pi_same: 0.5,
        ..ModelParams::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut seen = [false; 6];
    for _ in 0..200 {
        for o in select_cn_members(&s, OrgId(1), 3, &p, &mut rng).unwrap() {
            seen[o.node()] = true;
        }
    }
    assert!(seen.iter().all(|&x| x));
}

#[test]
fn same_profile_share_is_honored() {
    let mut rows: Vec<Vec<u64>> = (0..10).map(|_| vec![4, 0]).collect();
    rows.extend((0..10).map(|_| vec![0, 4]));
    let refs: Vec<&[u64]> = rows.iter().map(|r| r.as_slice()).collect();
    let edges: Vec<(usize, usize)> = (1..20).map(|v| (0, v)).collect();
    let s = state(&refs, &edges);
    let profiles = s.profiles();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (pi_same, expect_same) in [(1.0, 4), (0.0, 0), (0.5, 2)] {
        let p = ModelParams {
            pi_same,
            ..ModelParams::default()
        };
        let m = select_cn_members(&s, OrgId(1), 5, &p, &mut rng).unwrap();
        let same = m.iter().filter(|o| **o != OrgId(1) && profiles[o.node()] == 0).count();
        assert_eq!(same, expect_same, "pi_same={pi_same}");
    }
}

#[test]
fn preferences_hold_when_forced() {
    let s = state(&[&[3, 0], &[0, 4], &[5, 1], &[0, 9], &[2, 0]], &[(0, 1), (0, 3)]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let local = ModelParams {
        pi_local: 1.0,
        pi_profile: 0.0,
        ..ModelParams::default()
    };
    let profile = ModelParams {
        pi_local: 0.0,
        pi_profile: 1.0,
        ..ModelParams::default()
    };
    for _ in 0..200 {
        let d = choose_destination(&s, OrgId(1), 0, &local, &mut rng).unwrap();
        assert!(d == OrgId(2) || d == OrgId(4));
        let d = choose_destination(&s, OrgId(1), 0, &profile, &mut rng).unwrap();
        assert!(d == OrgId(3) || d == OrgId(5));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn simulation_invariants(seed: u64, ba: bool, pi_cn in 0.0f64..0.3, pi_random in 0.0f64..1.0, kappa in 0.0f64..0.5) {
        let config = if ba { small_config(Generator::BarabasiAlbert, 57) } else { small_config(Generator::ErdosRenyi, 45) };
        let p = ModelParams {
            pi_cn,
            pi_random,
            kappa_hire: kappa,
            kappa_fire: kappa,
            kappa_quit: kappa,
            ..ModelParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = init_ecosystem(&config, &mut rng).unwrap();
        let people = s.employment.total();
        for t in 1..=80u64 {
            let r = step(&mut s, &p, &mut rng).unwrap();
            prop_assert_eq!(r.t, t);
            prop_assert_eq!(s.employment.total(), people);
            prop_assert_eq!(s.organization_count(), 30);
            prop_assert_eq!(r.edges, s.graph.edge_count());
            assert_link_consistency(&s);
            for e in &r.quit_events {
                prop_assert_ne!(e.source, e.destination);
                prop_assert_eq!(e.destination_is_neighbor, s.graph.has_link(e.source.node(), e.destination.node()));
            }
        }
    }

    #[test]
    fn rates_are_probabilities(kappa in 0.0f64..100.0, value in -10.0f64..1e6, heads in 0u64..10_000, mean in proptest::option::of(0.0f64..1e6)) {
        for r in [hire_rate(kappa, value, heads), fire_rate(kappa, value, heads), quit_rate(kappa, value, mean)] {
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn members_are_distinct_and_sized(seed: u64, size in 2usize..12, pi_same in 0.0f64..=1.0, pi_random in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = init_ecosystem(&small_config(Generator::ErdosRenyi, 20), &mut rng).unwrap();
        let p = ModelParams { pi_same, pi_random, ..ModelParams::default() };
        let creator = OrgId(1 + (seed % 30) as u32);
        let m = select_cn_members(&s, creator, size, &p, &mut rng).unwrap();
        prop_assert_eq!(m.len(), size);
        prop_assert!(m.contains(&creator));
        prop_assert!(m.windows(2).all(|w| w[0] < w[1]));
    }
}
