mod common;

use common::random_complex;
use homology_core::complex::{build_boundaries, build_laplacian_algebraic, build_laplacian_combinatorial, SimplicialComplex2, SparseChain};
use homology_core::cyclebasis::{run_centralized, run_with_tree, spanning_tree_bfs, PipelineConfig};
use homology_core::geomgraph::{generate, GeomConfig};
use homology_core::harmonic::{compute_delta, iterate_harmonic, HarmonicConfig};
use homology_core::netsim::{
    network_of, run_distributed_harmonic, run_full_pipeline, run_max_gossip, EdgeEmulation, Phase, SimConfig,
    Simulator, TranscriptLevel,
};
use homology_core::oracle::HomologyOracle;
use proptest::prelude::*;

fn tight(seed: u64) -> PipelineConfig {
    let mut c = PipelineConfig::with_seed(seed);
    c.harmonic.epsilon = 1e-11;
    c.label_harmonics = 2;
    c
}

fn params() -> impl Strategy<Value = (usize, u64, f64, f64)> {
    (2..=14usize, any::<u64>(), 0.0..0.5f64, 0.0..1.0f64)
}

fn chains(h: &[homology_core::cyclebasis::CycleRecord]) -> Vec<SparseChain> {
    h.iter().map(|r| r.chain.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn synchronous_run_equals_centralized((n, seed, ep, tp) in params()) {
        let k = random_complex(n, seed, ep, tp);
        let cfg = tight(seed);
        let c = run_centralized(&k, &cfg).unwrap();
        let d = run_full_pipeline(&k, &cfg, &SimConfig::default()).unwrap();
        prop_assert!(d.cost_violations().is_empty(), "{:?}", d.cost_violations());
        prop_assert_eq!(d.cost.phase_total(Phase::Tree).broadcasts, n as u64);
        prop_assert_eq!(d.harmonics.len(), c.harmonics.len());
        for (a, b) in d.harmonics.iter().zip(&c.harmonics) {
            prop_assert_eq!(a.iterations, b.iterations);
            prop_assert!(a.y.iter().zip(&b.y).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        prop_assert_eq!(d.tree.parents(), c.tree.parents());
        prop_assert_eq!(chains(&d.generators.h), chains(&c.generators.h));
    }

    #[test]
    fn asynchronous_run_is_classwise_equal((n, seed, ep, tp) in params(), spread in 2..6u64) {
        let k = random_complex(n, seed, ep, tp);
        let cfg = tight(seed);
        let c = run_centralized(&k, &cfg).unwrap();
        let d = run_full_pipeline(&k, &cfg, &SimConfig::asynchronous(seed, spread)).unwrap();
        prop_assert!(d.cost_violations().is_empty(), "{:?}", d.cost_violations());
        for (a, b) in d.harmonics.iter().zip(&c.harmonics) {
            prop_assert!(a.y.iter().zip(&b.y).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        prop_assert_eq!(d.tree.hops(), c.tree.hops());
        let o = HomologyOracle::new(&build_boundaries(&k));
        let dh = chains(&d.generators.h);
        prop_assert!(o.verify_generating_set(&dh).unwrap());
        // equal-depth parents can win in either order, so the cycle basis
        // is only comparable against the centralized run on the same tree
        let l = build_laplacian_algebraic(&build_boundaries(&k));
        let same = run_with_tree(&k, &l, d.tree.clone(), &cfg).unwrap();
        prop_assert_eq!(&dh, &chains(&same.generators.h));
        if d.tree.parents() == c.tree.parents() {
            let ch = chains(&c.generators.h);
            for x in &dh {
                let matches = ch.iter().filter(|y| o.are_homologous(x, y).unwrap()).count();
                prop_assert_eq!(matches, 1);
            }
        }
    }

    #[test]
    fn transcripts_repeat((n, seed, ep, tp) in params(), spread in 1..5u64) {
        let k = random_complex(n, seed, ep, tp);
        let sim = SimConfig { transcript: TranscriptLevel::Debug, ..SimConfig::asynchronous(seed, spread) };
        let cfg = PipelineConfig::with_seed(seed);
        let a = run_full_pipeline(&k, &cfg, &sim);
        let b = run_full_pipeline(&k, &cfg, &sim);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(&a.transcript, &b.transcript);
                prop_assert_eq!(a.cost.to_csv(), b.cost.to_csv());
                prop_assert_eq!(a.to_result_json(&k), b.to_result_json(&k));
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn harmonic_phase_conserves_and_counts((n, seed, ep, tp) in params(), spread in 1..5u64) {
        let k = random_complex(n, seed, ep, tp);
        let l = build_laplacian_combinatorial(&k);
        let tree = spanning_tree_bfs(&k, n - 1).unwrap();
        let em = EdgeEmulation::new(&k, &l);
        let cfg = HarmonicConfig::with_seed(seed);
        let delta = compute_delta(&l).unwrap();
        let mut sim = Simulator::new(network_of(&k), SimConfig::asynchronous(seed, spread)).unwrap();
        let d = run_distributed_harmonic(&mut sim, &em, &l, &tree, &cfg, delta, 0).unwrap();
        let (sent, delivered) = sim.delivery_counts();
        prop_assert_eq!(sent, delivered);
        let c = iterate_harmonic(&l, &cfg).unwrap();
        prop_assert_eq!(d.result.iterations, c.iterations);
        prop_assert!(d.result.y.iter().zip(&c.y).all(|(x, y)| x.to_bits() == y.to_bits()));
        for v in 0..n {
            prop_assert_eq!(
                sim.cost().get(Phase::Harmonic, v).broadcasts,
                (em.owned[v].len() * c.iterations) as u64
            );
        }
    }

    #[test]
    fn gossip_finds_the_maximum((n, seed, ep, tp) in params(), spread in 1..5u64) {
        let k = random_complex(n, seed, ep, tp);
        let values: Vec<f64> = (0..n).map(|v| ((v as u64 * 2654435761) % 97) as f64).collect();
        let mut sim = Simulator::new(network_of(&k), SimConfig::asynchronous(seed, spread)).unwrap();
        let g = run_max_gossip(&mut sim, Phase::GossipDelta, &values).unwrap();
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        prop_assert_eq!(g.value, max);
        prop_assert!(g.local_max.iter().all(|&m| m == max));
        prop_assert!(g.improvement_broadcasts <= (n * (n - 1) / 2) as u64);
    }

    #[test]
    fn generated_complexes_are_valid_flag_complexes(n in 2..120usize, k in 2.0..10.0f64, seed in any::<u64>()) {
        let c = match generate(&GeomConfig::new(n, k, seed)) {
            Ok(c) => c,
            Err(_) => return Ok(()),
        };
        let again = SimplicialComplex2::new(c.vertex_count(), c.edges().to_vec(), c.triangles().to_vec()).unwrap();
        prop_assert_eq!(&again, &c);
        let mut cliques = 0;
        for &[a, b] in c.edges() {
            for &x in c.neighbors(b) {
                if x > b && c.edge_id(a, x).is_some() {
                    cliques += 1;
                }
            }
        }
        prop_assert_eq!(cliques, c.triangle_count());
        prop_assert_eq!(generate(&GeomConfig::new(n, k, seed)).unwrap(), c);
    }
}
