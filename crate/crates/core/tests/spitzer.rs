use ladderlab::rng::{path_stream, Domain};
use ladderlab::spitzer::{
    mixed_identity_check, order_for, phi_factor, sb_lhs, sb_rhs, symmetric_identity, CostMap,
    JointLattice, Transform,
};
use ladderlab::stats::MeanSe;
use ladderlab::walk::first_ladder;
use ladderlab::JumpLaw;
use num_complex::Complex64;

fn first_passage_gf(z: Complex64) -> Complex64 {
    (1.0 - (1.0 - z * z).sqrt()) / z
}

#[test]
fn ladder_and_series_sides_agree_on_grid() {
    let lat = JointLattice::new(&JumpLaw::simple_symmetric(), &CostMap::Abs).unwrap();
    for zi in 1..=9 {
        let z = zi as f64 / 10.0;
        let n = order_for(z, 1e-8);
        for s in [0.0, 0.2, 0.5] {
            for t in [0.0, 0.3] {
                let l = sb_lhs(z, t, s, &lat, Transform::Fourier, n).unwrap();
                let r = sb_rhs(z, t, s, &lat, Transform::Fourier, n).unwrap();
                let diff = (l.ladder.value - r.ladder.value).norm();
                assert!(
                    diff <= l.ladder.bound + r.ladder.bound,
                    "z={z} s={s} t={t}: {diff}"
                );
                assert!(diff <= 1e-6);
                let diff = (l.pre_passage.value - r.pre_passage.value).norm();
                assert!(
                    diff <= l.pre_passage.bound + r.pre_passage.bound,
                    "pre-passage z={z} s={s} t={t}"
                );
            }
        }
    }
}

#[test]
fn series_side_matches_closed_forms() {
    let lat = JointLattice::new(&JumpLaw::simple_symmetric(), &CostMap::Abs).unwrap();
    let r = sb_rhs(0.5, 0.0, 0.0, &lat, Transform::Fourier, 60).unwrap();
    assert!((r.ladder.value.re - (2.0 - 3f64.sqrt())).abs() <= r.ladder.bound);
    let z = 1e-4;
    let r = sb_rhs(z, 0.0, 0.0, &lat, Transform::Fourier, 10).unwrap();
    assert!((r.ladder.value.re - z / 2.0).abs() < z * z);
    // |xi| = 1 makes C_T = T
    let (z, s) = (0.6, 0.4);
    let r = sb_rhs(z, 0.0, s, &lat, Transform::Fourier, order_for(z, 1e-12)).unwrap();
    let want = first_passage_gf(Complex64::from_polar(z, s));
    assert!((r.ladder.value - want).norm() < 1e-10);
}

#[test]
fn pre_passage_sum_matches_ladder_transform() {
    // sum_{n < T} z^n = (1 - E z^T) / (1 - z)
    let lat = JointLattice::new(&JumpLaw::simple_symmetric(), &CostMap::Zero).unwrap();
    let z = 0.5;
    let l = sb_lhs(z, 0.0, 0.0, &lat, Transform::Fourier, 80).unwrap();
    let want = (1.0 - (2.0 - 3f64.sqrt())) / (1.0 - z);
    assert!((l.pre_passage.value.re - want).abs() < 1e-12);
}

#[test]
fn phi_anchors() {
    let law = JumpLaw::simple_symmetric();
    let p1 = phi_factor(1.0, 0.0, &law, &CostMap::Zero, Transform::Fourier).unwrap();
    assert!((p1.value.re - 2f64.sqrt()).abs() < 1e-8, "{}", p1.value);
    let p = phi_factor(0.5, 0.0, &law, &CostMap::Zero, Transform::Fourier).unwrap();
    assert!((p.value.re - (2.0 / (1.0 + 0.75f64.sqrt())).sqrt()).abs() < 1e-8);
}

#[test]
fn symmetric_identity_reproduces_sparre_andersen() {
    let law = JumpLaw::simple_symmetric();
    for zi in 1..=9 {
        let z = zi as f64 / 10.0;
        let c = symmetric_identity(z, 0.0, &law, &CostMap::Abs, Transform::Fourier).unwrap();
        let want = (1.0 - (1.0 - z * z).sqrt()) / z;
        assert!((c.lhs.value.re - want).abs() < 1e-6);
        assert!((c.rhs.value.re - want).abs() < 1e-6);
    }
    let c = symmetric_identity(0.5, 0.3, &law, &CostMap::Abs, Transform::Laplace).unwrap();
    assert!(c.residual() < 1e-6, "{}", c.residual());
}

#[test]
fn symmetric_identity_on_wider_law() {
    let law = JumpLaw::custom(&[(-3, 0.1), (-1, 0.25), (0, 0.3), (1, 0.25), (3, 0.1)]).unwrap();
    for (z, s) in [(0.3, 0.0), (0.7, 0.4), (0.9, 1.1)] {
        let c = symmetric_identity(z, s, &law, &CostMap::Abs, Transform::Fourier).unwrap();
        assert!(c.residual() < 1e-8, "z={z} s={s}: {}", c.residual());
    }
}

#[test]
fn mixed_identity_balances() {
    let law = JumpLaw::simple_symmetric();
    let c = mixed_identity_check(
        0.5,
        0.2,
        &law,
        &CostMap::Abs,
        &CostMap::Identity,
        Transform::Fourier,
    )
    .unwrap();
    assert!(c.residual() <= 1e-6, "{}", c.residual());
    let c = mixed_identity_check(
        0.5,
        0.0,
        &law,
        &CostMap::Abs,
        &CostMap::Identity,
        Transform::Fourier,
    )
    .unwrap();
    let sa = 2.0 - 3f64.sqrt();
    assert!((c.lhs.re - (1.0 - sa).powi(2)).abs() < 1e-10);
    assert!(c.residual() <= 1e-6);
    let c = mixed_identity_check(
        0.7,
        0.3,
        &law,
        &CostMap::Abs,
        &CostMap::Zero,
        Transform::Fourier,
    )
    .unwrap();
    let sym = symmetric_identity(0.7, 0.3, &law, &CostMap::Abs, Transform::Fourier).unwrap();
    assert!((c.lhs - (1.0 - sym.lhs.value).powi(2)).norm() < 1e-10);
    assert!(c.residual() <= 1e-6);
}

#[test]
fn monte_carlo_matches_ladder_side() {
    let law = JumpLaw::simple_symmetric();
    let lat = JointLattice::new(&law, &CostMap::Abs).unwrap();
    let (z, s) = (0.8, 0.3);
    let exact = sb_lhs(z, 0.0, s, &lat, Transform::Laplace, order_for(z, 1e-14))
        .unwrap()
        .ladder
        .value
        .re;
    let est: MeanSe = (0..200_000u64)
        .map(|i| {
            let f = first_ladder(&law, path_stream(3, Domain::Walk, i), 1 << 20).unwrap();
            z.powf(f.time as f64) * (-s * f.length as f64).exp()
        })
        .collect();
    assert!(
        (est.mean() - exact).abs() < 3.0 * est.std_error(),
        "{} vs {exact}",
        est.mean()
    );
}

#[test]
fn phi_of_zipf_is_finite_and_above_one() {
    for beta in [0.7, 1.5] {
        let law = JumpLaw::zipf(beta).unwrap();
        let p = phi_factor(1.0, 0.0, &law, &CostMap::Zero, Transform::Fourier).unwrap();
        assert!(
            p.value.re > 1.0 && p.value.re.is_finite() && p.value.im.abs() < 1e-12,
            "{}",
            p.value
        );
        assert!(p.error < 1e-9);
    }
}
