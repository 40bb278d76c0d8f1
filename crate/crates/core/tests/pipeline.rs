use elastic_schro::evolution::{evolve_modes, EvolutionConfig, Scheme};
use elastic_schro::recovery::{qft_p, recover, RecoveryPlan};
use elastic_schro::schrodinger::{hermitian_split, pstar, schrodingerize_modes, WarpFunction};
use elastic_schro::{c64, Operator, PGrid};

fn damped_rotation() -> Operator {
    let d = [-0.5, 1.0, -1.0, -0.5].map(|x| c64::new(x, 0.0));
    Operator::from_dense(2, 2, &d)
}

fn solve(a: &Operator, u0: &[c64], warp: &WarpFunction, n: usize, p1: f64, t: f64) -> Vec<c64> {
    let pair = hermitian_split(a).unwrap();
    let pg = PGrid::symmetric(12.0, n).unwrap();
    let sys = schrodingerize_modes(&pair, u0, &pg, warp, 0).unwrap();
    let cfg = EvolutionConfig::new(Scheme::ExactExponential, t, t).unwrap();
    let c = evolve_modes(&sys.hamiltonian, &sys.c0, &cfg).unwrap();
    let v = qft_p(&c, sys.n_aug, &pg).unwrap();
    let p_star = pstar(&pair.h1, t).unwrap();
    recover(&v, sys.n_aug, &pg, &RecoveryPlan::point_at(&pg, p_star, p1).unwrap()).unwrap()
}

fn err(u: &[c64], t: f64) -> f64 {
    let e = (-0.5 * t).exp();
    let exact = [c64::new(e * t.cos(), 0.0), c64::new(-e * t.sin(), 0.0)];
    u.iter().zip(&exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

#[test]
fn damped_rotation_recovers_exact_flow() {
    let u0 = [c64::new(1.0, 0.0), c64::new(0.0, 0.0)];
    let a = damped_rotation();
    for t in [0.5, 1.0, 2.0] {
        let e: Vec<f64> = [128, 256, 512, 1024].iter().map(|&n| err(&solve(&a, &u0, &WarpFunction::ExactKink, n, 2.0, t), t)).collect();
        assert!(e[3] < 5e-3 && e[3] < e[0] / 10.0, "t = {t}: {e:?}");
    }
}

#[test]
fn smooth_warp_is_more_accurate() {
    let u0 = [c64::new(1.0, 0.0), c64::new(0.0, 0.0)];
    let a = damped_rotation();
    let kink = err(&solve(&a, &u0, &WarpFunction::ExactKink, 128, 2.0, 1.0), 1.0);
    let smooth = err(&solve(&a, &u0, &WarpFunction::smooth(3), 128, 2.0, 1.0), 1.0);
    assert!(smooth < kink, "smooth {smooth} vs kink {kink}");
}

#[test]
fn growing_mode_needs_recovery_beyond_pstar() {
    let a = Operator::from_dense(1, 1, &[c64::new(0.8, 0.0)]);
    let pair = hermitian_split(&a).unwrap();
    assert!((pstar(&pair.h1, 2.0).unwrap() - 1.6).abs() < 1e-12);
    let u = solve(&a, &[c64::new(1.0, 0.0)], &WarpFunction::ExactKink, 512, 3.0, 2.0);
    assert!((u[0].re - 1.6f64.exp()).abs() < 5e-2 * 1.6f64.exp(), "{}", u[0]);
}
