use dtn_core::{seeded_rng, ModelConfig};
use dtn_diagnostics::select_k;
use dtn_genmodel::{simulate, Scenario};

#[test]
fn each_fit_is_independent_of_grid_order() {
    let cfg = ModelConfig {
        topics: 3,
        ell: 3,
        iters: 8,
        burn_in: 4,
        thin: 2,
        sweeps: 2,
        network_updates: 1,
        block_sweeps: 1,
        stages: vec!["topics".into(), "pi".into()],
        ..Default::default()
    };
    let scenario = Scenario {
        n_blogs: 6,
        horizon: 6,
        vocab_size: 25,
        ..Default::default()
    };
    let s = simulate(&cfg, &scenario, &mut seeded_rng(1)).unwrap();
    let a = select_k(&s.corpus, &s.adjacency, &cfg, &[2, 3, 4], 9).unwrap();
    let b = select_k(&s.corpus, &s.adjacency, &cfg, &[4, 2, 3], 9).unwrap();
    assert_eq!(a.best, b.best);
    for p in &a.points {
        let q = b.points.iter().find(|q| q.topics == p.topics).unwrap();
        assert_eq!(p.criterion, q.criterion);
        assert!(p.criterion.is_finite() && p.criterion >= 0.0);
    }
    let min = a.points.iter().map(|p| p.criterion).fold(f64::INFINITY, f64::min);
    assert_eq!(a.points.iter().find(|p| p.topics == a.best).unwrap().criterion, min);
    assert!(select_k(&s.corpus, &s.adjacency, &cfg, &[3], 9).is_err());
}
