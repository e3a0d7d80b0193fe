mod common;

use common::{singular_values, sym_eigenvalues};
use ndarray::{Array1, Array2};
use omega_core::games::{
    distance_to_optimum, nash_equilibrium, sample_singular_band, sample_spd_with_band, JointPoint, StochasticGame,
};
use omega_core::{Band, Game, GameKind, GameSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small_spec(kind: GameKind, seed: u64) -> GameSpec {
    let mut spec = GameSpec {
        d_x: 6,
        d_y: 6,
        n: 8,
        seed,
        ..GameSpec::defaults(kind)
    };
    spec.band_b = Band::new(0.5, 2.0).unwrap();
    if spec.band_a.is_some() {
        spec.band_a = Some(Band::new(0.3, 3.0).unwrap());
    }
    if spec.band_c.is_some() {
        spec.band_c = Some(Band::new(0.2, 4.0).unwrap());
    }
    spec
}

fn random_point(rng: &mut ChaCha8Rng, d_x: usize, d_y: usize) -> JointPoint<f64> {
    let data = Array1::from_shape_simple_fn(d_x + d_y, || rng.random_range(-2.0..2.0));
    JointPoint::from_joint(data, d_x).unwrap()
}

#[test]
fn spd_band_extremes_pinned() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let a = sample_spd_with_band::<f64, _>(10, 1.0, 10.0, &mut rng).unwrap();
    let ev = sym_eigenvalues(&a);
    assert!((ev[0] - 1.0).abs() <= 1e-8, "{ev:?}");
    assert!((ev[9] - 10.0).abs() <= 1e-8, "{ev:?}");
    assert_eq!(a, a.t());
}

#[test]
fn singular_band_extremes_pinned() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let b = sample_singular_band::<f64, _>(4, 4, 1.0, 10.0, &mut rng).unwrap();
    let sv = singular_values(&b);
    assert!((sv[0] - 1.0).abs() <= 1e-8, "{sv:?}");
    assert!((sv[3] - 10.0).abs() <= 1e-8, "{sv:?}");
}

#[test]
fn rectangular_singular_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for (d_x, d_y) in [(6, 4), (3, 7)] {
        let b = sample_singular_band::<f64, _>(d_x, d_y, 0.5, 2.0, &mut rng).unwrap();
        assert_eq!(b.dim(), (d_x, d_y));
        let sv = singular_values(&b);
        assert!(
            (sv[0] - 0.5).abs() <= 1e-8 && (sv[sv.len() - 1] - 2.0).abs() <= 1e-8,
            "{sv:?}"
        );
    }
}

#[test]
fn generated_spectra_within_bands() {
    for kind in [GameKind::Bilinear, GameKind::Quadratic, GameKind::QuadraticLinear] {
        let spec = small_spec(kind, 3);
        let game = Game::generate(&spec).unwrap();
        for s in game.samples() {
            let sv = singular_values(&s.coupling);
            assert!(sv.iter().all(|&v| (0.5 - 1e-8..=2.0 + 1e-8).contains(&v)), "{sv:?}");
            if let Some(a) = &s.quad_x {
                assert_eq!(a, &a.t());
                let ev = sym_eigenvalues(a);
                assert!(ev.iter().all(|&v| (0.3 - 1e-8..=3.0 + 1e-8).contains(&v)), "{ev:?}");
            }
            if let Some(c) = &s.quad_y {
                assert_eq!(c, &c.t());
                let ev = sym_eigenvalues(c);
                assert!(ev.iter().all(|&v| (0.2 - 1e-8..=4.0 + 1e-8).contains(&v)), "{ev:?}");
            }
        }
    }
}

#[test]
fn default_quadratic_game_is_identity_blocks() {
    let game = Game::generate(&GameSpec {
        n: 5,
        ..GameSpec::defaults(GameKind::Quadratic)
    })
    .unwrap();
    let eye = Array2::<f64>::eye(100);
    for s in game.samples() {
        assert_eq!(s.quad_x.as_ref().unwrap(), &eye);
        assert_eq!(s.quad_y.as_ref().unwrap(), &eye);
        let defect = s.coupling.t().dot(&s.coupling) - &eye;
        assert!(defect.iter().all(|v| v.abs() <= 1e-10));
    }
}

#[test]
fn linear_terms_have_dimension_scaled_variance() {
    let spec = GameSpec {
        d_x: 50,
        d_y: 20,
        n: 200,
        ..GameSpec::defaults(GameKind::Bilinear)
    };
    let game = Game::generate(&spec).unwrap();
    let var = |get: &dyn Fn(&omega_core::GameSample<f64>) -> &Array1<f64>| {
        let values: Vec<f64> = game.samples().iter().flat_map(|s| get(s).iter().copied()).collect();
        values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64
    };
    let vx = var(&|s| &s.lin_x);
    let vy = var(&|s| &s.lin_y);
    assert!((vx * 50.0 - 1.0).abs() < 0.05, "{vx}");
    assert!((vy * 20.0 - 1.0).abs() < 0.05, "{vy}");
}

#[test]
fn generation_is_deterministic() {
    let spec = small_spec(GameKind::Quadratic, 77);
    assert_eq!(Game::generate(&spec).unwrap(), Game::generate(&spec).unwrap());
    let other = GameSpec {
        seed: 78,
        ..spec.clone()
    };
    assert_ne!(Game::generate(&spec).unwrap(), Game::generate(&other).unwrap());
}

#[test]
fn averages_match_sample_means() {
    let game = Game::generate(&small_spec(GameKind::Quadratic, 5)).unwrap();
    let n = game.n() as f64;
    let mean_b = game
        .samples()
        .iter()
        .fold(Array2::<f64>::zeros((6, 6)), |acc, s| acc + &s.coupling)
        / n;
    let mean_a = game
        .samples()
        .iter()
        .fold(Array2::<f64>::zeros((6, 6)), |acc, s| acc + s.quad_x.as_ref().unwrap())
        / n;
    let mean_c = game
        .samples()
        .iter()
        .fold(Array1::<f64>::zeros(6), |acc, s| acc + &s.lin_y)
        / n;
    let avg = game.average();
    assert!((&avg.coupling - &mean_b).iter().all(|v| v.abs() <= 1e-12));
    assert!((avg.quad_x.as_ref().unwrap() - &mean_a)
        .iter()
        .all(|v| v.abs() <= 1e-12));
    assert!((&avg.lin_y - &mean_c).iter().all(|v| v.abs() <= 1e-12));
}

/// Central differences of the payoff match `(g_x, −g_y)`.
#[test]
fn gradient_matches_finite_differences() {
    let h = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for trial in 0..50u64 {
        let kind = [GameKind::Bilinear, GameKind::Quadratic, GameKind::QuadraticLinear][trial as usize % 3];
        let game = Game::generate(&small_spec(kind, trial)).unwrap();
        let w = random_point(&mut rng, 6, 6);
        let batch: Vec<usize> = (0..rng.random_range(1..=3)).map(|_| rng.random_range(0..8)).collect();
        let g = game.gradient_field(&batch, &w).unwrap();
        for i in 0..12 {
            let mut plus = w.clone();
            let mut minus = w.clone();
            plus.as_array_mut()[i] += h;
            minus.as_array_mut()[i] -= h;
            let fd = (game.payoff(&batch, &plus).unwrap() - game.payoff(&batch, &minus).unwrap()) / (2.0 * h);
            let expected = if i < 6 { g.as_array()[i] } else { -g.as_array()[i] };
            let rel = (fd - expected).abs() / expected.abs().max(1.0);
            assert!(rel <= 1e-5, "trial {trial} coord {i}: fd {fd} vs {expected}");
            checked += 1;
        }
    }
    assert_eq!(checked, 600);
}

#[test]
fn full_batch_equals_mean_of_singletons() {
    let game = Game::generate(&small_spec(GameKind::Quadratic, 8)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let w = random_point(&mut rng, 6, 6);
    let full = game.full_batch();
    let mean_payoff = full.iter().map(|&i| game.payoff(&[i], &w).unwrap()).sum::<f64>() / 8.0;
    assert!((game.payoff(&full, &w).unwrap() - mean_payoff).abs() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn batch_field_is_mean_of_sample_fields(
        seed in 0u64..1000,
        batch in proptest::collection::vec(0usize..8, 1..8),
        coords in proptest::collection::vec(-3.0f64..3.0, 12),
    ) {
        let game = Game::generate(&small_spec(GameKind::Quadratic, seed % 7)).unwrap();
        let w = JointPoint::from_joint(Array1::from(coords), 6).unwrap();
        let joint = game.gradient_field(&batch, &w).unwrap();
        let mean = batch
            .iter()
            .fold(Array1::<f64>::zeros(12), |acc, &i| acc + game.gradient_field(&[i], &w).unwrap().as_array())
            / batch.len() as f64;
        prop_assert!((joint.as_array() - &mean).iter().all(|v| v.abs() <= 1e-12));
    }
}

#[test]
fn nash_is_stationary_for_every_kind() {
    for kind in [GameKind::Bilinear, GameKind::Quadratic, GameKind::QuadraticLinear] {
        let game = Game::generate(&GameSpec {
            seed: 4,
            ..GameSpec::defaults(kind)
        })
        .unwrap();
        let sol = nash_equilibrium(&game).unwrap();
        assert!(sol.residual <= 1e-8, "{kind}: residual {}", sol.residual);
        let field = game.gradient_field(&game.full_batch(), &sol.w_star).unwrap();
        assert!(field.norm_inf() <= 1e-6, "{kind}: field {}", field.norm_inf());
    }
}

#[test]
fn f32_games_run() {
    let spec = small_spec(GameKind::Quadratic, 2);
    let game = StochasticGame::<f32>::generate(&spec).unwrap();
    let sol = nash_equilibrium(&game).unwrap();
    let field = game.gradient_field(&game.full_batch(), &sol.w_star).unwrap();
    assert!(field.norm_inf() <= 1e-4);
    let g64 = Game::generate(&spec).unwrap();
    let diff = (&g64.average().lin_x - &game.average().lin_x.mapv(f64::from))
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(diff < 1e-6);
}

#[test]
fn distance_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_point(&mut rng, 3, 2);
    let b = random_point(&mut rng, 3, 2);
    assert_eq!(
        distance_to_optimum(&a, &b).unwrap(),
        distance_to_optimum(&b, &a).unwrap()
    );
}
