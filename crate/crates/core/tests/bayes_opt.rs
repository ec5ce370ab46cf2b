mod common;

use common::oracles::{dense_gp, kernel};
use physguide::bayes_opt::{
    aggregate_neighborhood, composite_loss, expected_improvement, gp_fit, matern52, propose_next, reevaluation_due,
    rescaled_branin, select_hyperparameters, AcquisitionConfig, BayesOptimizer, BoConfig, Observation, ParamBox,
    ProposalKind, SyntheticObjective, BRANIN_MINIMIZERS_UNIT, LENGTH_SCALE_GRID, NOISE_GRID,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_observations(rng: &mut ChaCha8Rng, n: usize) -> Vec<Observation> {
    (0..n)
        .map(|_| {
            let th = [rng.gen_range(0.5..10.0), rng.gen_range(0.5..10.0)];
            Observation::new(th, (th[0] * 0.7).sin() + 0.1 * th[1] + 0.05 * rng.sample::<f64, _>(StandardNormal))
        })
        .collect()
}

#[test]
fn kernel_matches_definition() {
    for r in [0.0, 0.1, 1.0, 2.5, 7.0] {
        for ls in [0.5, 2.0, 6.0] {
            let direct = kernel(&[0.0, 0.0], &[r, 0.0], ls);
            assert!((matern52(r, ls) - direct).abs() < 1e-15);
        }
    }
}

#[test]
fn posterior_matches_dense_solve() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for case in 0..20 {
        let obs = random_observations(&mut rng, 5 + case);
        let (ls, noise) = (LENGTH_SCALE_GRID[case % 7], NOISE_GRID[case % 6]);
        let gp = gp_fit(&obs, ls, noise).unwrap();
        let dense = dense_gp(&obs, ls, noise);
        for _ in 0..20 {
            let th = [rng.gen_range(0.5..10.0), rng.gen_range(0.5..10.0)];
            let (m, v) = gp.predict(&th);
            let (dm, dv) = dense.predict(&th);
            assert!((m - dm).abs() < 1e-8 * dm.abs().max(1.0), "case {case}: mean {m} vs {dm}");
            assert!((v - dv.max(0.0)).abs() < 1e-8, "case {case}: var {v} vs {dv}");
        }
        assert!((gp.log_marginal_likelihood() - dense.lml).abs() < 1e-8 * dense.lml.abs().max(1.0));
    }
}

#[test]
fn noiseless_fit_interpolates() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    for _ in 0..20 {
        let obs = random_observations(&mut rng, 15);
        let gp = gp_fit(&obs, 1.0, 0.0).unwrap();
        for o in &obs {
            let (m, v) = gp.predict(&o.theta);
            assert!((m - o.loss).abs() < 1e-8, "{m} vs {}", o.loss);
            assert!(v < 1e-8);
        }
    }
}

#[test]
fn hyperparameters_maximize_marginal_likelihood() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..5 {
        let obs = random_observations(&mut rng, 25);
        let chosen = select_hyperparameters(&obs).unwrap();
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for &ls in &LENGTH_SCALE_GRID {
            for &noise in &NOISE_GRID {
                let l = dense_gp(&obs, ls, noise).lml;
                if l > best.0 {
                    best = (l, ls, noise);
                }
            }
        }
        assert_eq!(chosen, (best.1, best.2));
    }
}

#[test]
fn ei_matches_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let draws = 100_000;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mu = rng.gen_range(-2.0..2.0);
        let sigma = rng.gen_range(0.05..2.0);
        // keep the incumbent within reach so every case has improvement mass
        let f_best = mu + sigma * rng.gen_range(-2.0..2.0);
        let xi = 0.01;
        let samples: Vec<f64> = (0..draws)
            .map(|_| {
                let y = mu + sigma * rng.sample::<f64, _>(StandardNormal);
                (f_best - xi - y).max(0.0)
            })
            .collect();
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        let ei = expected_improvement(mu, sigma, f_best, xi);
        worst = worst.max((ei - mean).abs() / se);
    }
    assert!(worst < 3.0, "largest deviation {worst} standard errors");
}

#[test]
fn ei_edge_cases() {
    assert_eq!(expected_improvement(0.0, 0.0, 1.0, 0.0), 1.0);
    assert_eq!(expected_improvement(2.0, 0.0, 1.0, 0.0), 0.0);
    // far below the incumbent EI approaches the gain itself
    assert!((expected_improvement(-10.0, 0.1, 0.0, 0.0) - 10.0).abs() < 1e-12);
    assert!(expected_improvement(10.0, 0.1, 0.0, 0.0) < 1e-300);
}

#[test]
fn proposal_beats_a_finer_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let bounds = ParamBox::default();
    let cfg = AcquisitionConfig::default();
    for _ in 0..10 {
        let obs = random_observations(&mut rng, 12);
        let gp = gp_fit(&obs, 2.0, 0.1).unwrap();
        let p = propose_next(Some(&gp), &bounds, &cfg, &mut rng).unwrap();
        assert_eq!(p.kind, ProposalKind::Acquisition);
        assert!(bounds.contains(&p.theta));
        let f_best = gp.best();
        let grid_max = bounds.grid(64).iter().map(|t| gp.expected_improvement(t, f_best, cfg.xi)).fold(0.0, f64::max);
        assert!(p.ei >= 0.99 * grid_max, "proposal EI {} vs grid {}", p.ei, grid_max);
        assert!((gp.expected_improvement(&p.theta, f_best, cfg.xi) - p.ei).abs() < 1e-15);
    }
}

#[test]
fn proposal_falls_back_when_ei_vanishes() {
    // a flat, noiseless model that is certain everywhere near its data has no improvement to offer
    let obs: Vec<Observation> = ParamBox::default().grid(6).into_iter().map(|t| Observation::new(t, 1.0)).collect();
    let gp = gp_fit(&obs, 50.0, 0.0).unwrap();
    let cfg = AcquisitionConfig { xi: 1.0, ..AcquisitionConfig::default() };
    let p = propose_next(Some(&gp), &ParamBox::default(), &cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(p.kind, ProposalKind::RandomFallback);
    assert!(ParamBox::default().contains(&p.theta));
}

#[test]
fn separated_groups_aggregate_to_their_means() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let centres = [[1.0, 1.0], [5.0, 5.0], [9.0, 2.0], [2.0, 9.0]];
    let mut obs = Vec::new();
    let mut sums = vec![([0.0, 0.0], 0.0, 0usize); centres.len()];
    for k in 0..80 {
        let g = rng.gen_range(0..centres.len());
        let th = [centres[g][0] + rng.gen_range(-0.2..0.2), centres[g][1] + rng.gen_range(-0.2..0.2)];
        let loss = g as f64 + rng.gen_range(-0.1..0.1) + k as f64 * 1e-3;
        obs.push(Observation::new(th, loss));
        sums[g].0[0] += th[0];
        sums[g].0[1] += th[1];
        sums[g].1 += loss;
        sums[g].2 += 1;
    }
    // radius 0.5 in units of 2: any two points of a group are within 0.8 < 1.0
    let agg = aggregate_neighborhood(&obs, 0.5, [2.0, 2.0]).unwrap();
    assert_eq!(agg.len(), sums.iter().filter(|s| s.2 > 0).count());
    for a in &agg {
        let g =
            centres.iter().position(|c| (c[0] - a.theta[0]).abs() < 0.3 && (c[1] - a.theta[1]).abs() < 0.3).unwrap();
        let (s, l, n) = sums[g];
        assert_eq!(a.count, n);
        assert!((a.theta[0] - s[0] / n as f64).abs() < 1e-12);
        assert!((a.theta[1] - s[1] / n as f64).abs() < 1e-12);
        assert!((a.loss - l / n as f64).abs() < 1e-12);
    }
}

#[test]
fn reevaluation_picks_top_ei_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    let obs = random_observations(&mut rng, 20);
    let gp = gp_fit(&obs, 2.0, 0.1).unwrap();
    let mut configs: Vec<[f64; 2]> = obs.iter().map(|o| o.theta).collect();
    configs.push(configs[0]);
    assert!(reevaluation_due(49, 50, 0.1, &configs, Some(&gp), 0.01).is_empty());
    assert!(reevaluation_due(0, 50, 0.1, &configs, Some(&gp), 0.01).is_empty());
    let picked = reevaluation_due(50, 50, 0.1, &configs, Some(&gp), 0.01);
    assert_eq!(picked.len(), 2);
    let mut ei: Vec<f64> = obs.iter().map(|o| gp.expected_improvement(&o.theta, gp.best(), 0.01)).collect();
    ei.sort_by(|a, b| b.total_cmp(a));
    for (p, e) in picked.iter().zip(&ei) {
        assert_eq!(gp.expected_improvement(p, gp.best(), 0.01), *e);
    }
    assert_eq!(reevaluation_due(100, 50, 0.1, &configs[..21], Some(&gp), 0.01).len(), 2);
    assert_eq!(reevaluation_due(100, 50, 0.15, &configs, Some(&gp), 0.01).len(), 3);
}

#[test]
fn composite_loss_by_hand() {
    let l = composite_loss(&[3.0, 3.5, 2.0], &[1.0, 2.0, 0.5], &[1.5, 7.0, 10.0]).unwrap();
    assert!((l - (2.0 + 1.0 + 0.1)).abs() < 1e-15);
}

#[test]
fn branin_minimum_value() {
    for u in BRANIN_MINIMIZERS_UNIT {
        assert!((rescaled_branin(u) + 1.047_393_8).abs() < 1e-5, "{}", rescaled_branin(u));
    }
    let obj = SyntheticObjective::new(ParamBox::default(), 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid_min = ParamBox::default().grid(200).iter().map(|t| obj.value(t)).fold(f64::INFINITY, f64::min);
    assert!(grid_min > -1.048 && grid_min < -1.04);
    assert_eq!(obj.noisy(&[2.0, 2.0], &mut rng), obj.value(&[2.0, 2.0]));
}

#[test]
fn replaying_history_reproduces_the_optimizer() {
    let obj = SyntheticObjective::new(ParamBox::default(), 0.1);
    let mut a = BayesOptimizer::new(BoConfig::default()).unwrap();
    for k in 0..25 {
        let p = a.propose(&mut ChaCha8Rng::seed_from_u64(k)).unwrap();
        a.observe(p.theta, obj.noisy(&p.theta, &mut ChaCha8Rng::seed_from_u64(1000 + k))).unwrap();
    }
    let mut b = BayesOptimizer::new(BoConfig::default()).unwrap();
    for o in a.history() {
        b.observe(o.theta, o.loss).unwrap();
    }
    assert_eq!(a.hyperparameters(), b.hyperparameters());
    let pa = a.propose(&mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    let pb = b.propose(&mut ChaCha8Rng::seed_from_u64(99)).unwrap();
    assert_eq!(pa, pb);
    assert_eq!(a.incumbent().unwrap(), b.incumbent().unwrap());
    assert!(a.observe([2.0, 2.0], f64::NAN).is_err());
}

proptest! {
    #[test]
    fn aggregation_conserves_counts_and_loss_mass(seed in any::<u64>(), n in 1usize..60, radius in 0.05f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let obs = random_observations(&mut rng, n);
        let agg = aggregate_neighborhood(&obs, radius, [2.0, 2.0]).unwrap();
        prop_assert_eq!(agg.iter().map(|a| a.count).sum::<usize>(), n);
        let mass: f64 = agg.iter().map(|a| a.loss * a.count as f64).sum();
        let raw: f64 = obs.iter().map(|o| o.loss).sum();
        prop_assert!((mass - raw).abs() < 1e-9 * raw.abs().max(1.0));
        for a in &agg {
            prop_assert!(ParamBox::default().contains(&a.theta));
        }
    }

    #[test]
    fn ei_is_nonnegative_and_monotone_in_mean(mu in -3.0f64..3.0, sigma in 0.01f64..3.0, d in 0.0f64..1.0) {
        let a = expected_improvement(mu, sigma, 0.0, 0.01);
        let b = expected_improvement(mu + d, sigma, 0.0, 0.01);
        prop_assert!(a >= 0.0 && b >= 0.0);
        prop_assert!(b <= a + 1e-15);
    }
}
