use dtn_core::math::{ln_dirichlet_pdf, ln_poisson_pmf};
use dtn_core::{seeded_rng, AdjacencyTensor, ModelConfig};
use dtn_genmodel::{block_similarity, simulate, Scenario, Simulation};
use dtn_inference::stages::{
    block_conditional, event_log_ratio, network_loglik, pair_tables, pi_log_ratio, psi_log_ratio, rho_log_ratio,
    theta_log_ratio, LinkDesign,
};
use dtn_inference::{Model, SamplerState};

fn cfg() -> ModelConfig {
    ModelConfig {
        topics: 3,
        ell: 3,
        event_prob: vec![0.1],
        ..Default::default()
    }
}

fn sim(cfg: &ModelConfig, seed: u64) -> Simulation {
    let scenario = Scenario {
        n_blogs: 10,
        horizon: 8,
        vocab_size: 30,
        theta: [-2.5, 1.0, 0.5, 0.1, 0.1],
        psi: Some(vec![0.5]),
    };
    simulate(cfg, &scenario, &mut seeded_rng(seed)).unwrap()
}

/// Direct Bernoulli sum over every ordered pair and day.
fn brute_network_loglik(model: &Model, b: &[usize], pi: &[Vec<f64>], theta: &[f64; 5]) -> f64 {
    let n = model.n_blogs();
    let mut acc = 0.0;
    for t in 1..=model.horizon() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let s = model.covariates.covariates(i, j, t, block_similarity(b[i], b[j], &pi[i], &pi[j]));
                let eta: f64 = theta.iter().zip(s).map(|(a, x)| a * x).sum();
                let p = 1.0 / (1.0 + (-eta).exp());
                acc += if model.adjacency.get(i, j, t) { p.ln() } else { (1.0 - p).ln() };
            }
        }
    }
    acc
}

#[test]
fn network_loglik_matches_pairwise_sum() {
    let cfg = cfg();
    let s = sim(&cfg, 3);
    let model = Model::new(&s.corpus, &s.adjacency, &cfg);
    let state = SamplerState::initialise(&model, &mut seeded_rng(4));
    let theta = [-2.0, 0.7, 0.4, -0.3, 0.2];
    let fast = network_loglik(&model, &state.b, &state.pi, &theta);
    let slow = brute_network_loglik(&model, &state.b, &state.pi, &theta);
    assert!(s.adjacency.n_edges() > 0);
    assert!((fast - slow).abs() < 1e-9 * slow.abs(), "{fast} vs {slow}");
}

#[test]
fn block_conditional_matches_enumeration() {
    let cfg = cfg();
    let s = sim(&cfg, 5);
    let model = Model::new(&s.corpus, &s.adjacency, &cfg);
    let mut state = SamplerState::initialise(&model, &mut seeded_rng(6));
    state.theta = [-2.0, 1.5, 0.3, 0.2, 0.1];
    let tables = pair_tables(&model, &state.pi, &state.theta);
    let n = model.n_blogs() as f64;
    let alpha_b = cfg.block_concentration;
    for i in 0..model.n_blogs() {
        let (candidates, probs) = block_conditional(&model, &state, &tables, i);
        let logs: Vec<f64> = candidates
            .iter()
            .map(|&b| {
                let mut labels = state.b.clone();
                labels[i] = b;
                let others = labels.iter().enumerate().filter(|&(j, &x)| j != i && x == b).count() as f64;
                let mut occupied: Vec<usize> = labels.clone();
                occupied.sort_unstable();
                occupied.dedup();
                let occ = occupied.len();
                (others + alpha_b).ln() - (alpha_b * occ as f64 + n - 1.0).ln()
                    + network_loglik(&model, &labels, &state.pi, &state.theta)
                    + ln_dirichlet_pdf(&state.pi[i], &model.catalog.interest_prior(b, cfg.interest_concentration))
                    + ln_poisson_pmf(occ as u64, cfg.block_prior_mean)
            })
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = logs.iter().map(|l| (l - top).exp()).sum();
        for (p, l) in probs.iter().zip(&logs) {
            let want = (l - top).exp() / total;
            assert!((p - want).abs() < 1e-9, "blog {i}: {p} vs {want}");
        }
    }
}

#[test]
fn proposals_equal_to_current_have_zero_log_ratio() {
    let cfg = cfg();
    let s = sim(&cfg, 8);
    let model = Model::new(&s.corpus, &s.adjacency, &cfg);
    let mut state = SamplerState::initialise(&model, &mut seeded_rng(9));
    state.events[1][2] = true;
    state.theta = [-2.0, 1.0, 0.2, 0.1, 0.1];
    let mass = state.event_mass();
    let total = state.total_rate();
    for i in 0..model.n_blogs() {
        let pi = state.pi[i].clone();
        assert!(pi_log_ratio(&model, &state, i, &pi, mass).abs() < 1e-12);
        assert!(rho_log_ratio(&model, &state, i, state.rho[i], 0.5, mass).abs() < 1e-12);
    }
    for k in 0..model.n_topics() {
        assert!(psi_log_ratio(&model, &state, k, state.psi[k], 0.5, total).abs() < 1e-12);
    }
    let design = LinkDesign::new(&model, &state.b, &state.pi);
    let current = design.loglik(&state.theta);
    let (ratio, ll) = theta_log_ratio(&model, &design, current, &state.theta, &state.theta);
    assert_eq!(ratio, 0.0);
    assert_eq!(ll, current);
}

#[test]
fn event_flip_without_boost_is_prior_odds() {
    let cfg = cfg();
    let s = sim(&cfg, 10);
    let model = Model::new(&s.corpus, &s.adjacency, &cfg);
    let mut state = SamplerState::initialise(&model, &mut seeded_rng(11));
    state.psi = vec![0.0; model.n_topics()];
    let odds = (cfg.event_prior / (1.0 - cfg.event_prior)).ln();
    let total = state.total_rate();
    for k in 0..model.n_topics() {
        for t in 1..=model.horizon() {
            let on = event_log_ratio(&model, &state, k, t, total);
            assert!((on - odds).abs() < 1e-12);
            state.events[k][t as usize - 1] = true;
            let off = event_log_ratio(&model, &state, k, t, total);
            assert!((off + odds).abs() < 1e-12);
            state.events[k][t as usize - 1] = false;
        }
    }
}

#[test]
fn empty_network_likelihood_falls_with_intercept() {
    let cfg = cfg();
    let s = sim(&cfg, 12);
    let empty = AdjacencyTensor::new(s.corpus.n_blogs(), s.corpus.horizon());
    let model = Model::new(&s.corpus, &empty, &cfg);
    let state = SamplerState::initialise(&model, &mut seeded_rng(13));
    let mut last = f64::INFINITY;
    for step in -20..=20 {
        let theta = [step as f64 * 0.5, 0.5, 0.5, 0.5, 0.5];
        let ll = network_loglik(&model, &state.b, &state.pi, &theta);
        assert!(ll < last && ll <= 0.0);
        last = ll;
    }
}
