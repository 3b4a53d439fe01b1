//! Principal angles against references that do not share code with the
//! library route: prescribed-angle constructions, brute-force search over
//! unit vectors, and the recursive definition.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use grassmann_core::grassmann::{
    gap_distance, min_angle, principal_angles, principal_angles_general, principal_angles_oracle, trace_product,
    Subspace,
};
use grassmann_core::maps::apply_isometry;
use grassmann_core::numerics::{CMatrix, Tolerance, C64, ONE, ZERO};
use grassmann_core::sampling::{Conjugation, Seed};

/// `span{e_k}` and `span{cos t_k e_k + sin t_k e_{n+k}}`, rotated by a random unitary.
fn prescribed(angles: &[f64], d: usize, seed: u64) -> (Subspace, Subspace) {
    let n = angles.len();
    let mut a = CMatrix::zeros(d, n);
    let mut b = CMatrix::zeros(d, n);
    for (k, t) in angles.iter().enumerate() {
        a[(k, k)] = ONE;
        b[(k, k)] = C64::new(t.cos(), 0.0);
        b[(n + k, k)] = C64::new(0.0, t.sin());
    }
    let tol = Tolerance::default();
    let u = Seed(seed).sampler().unitary(d, Conjugation::Linear).unwrap();
    let s = Subspace::new(a, &tol).unwrap();
    let t = Subspace::new(b, &tol).unwrap();
    (apply_isometry(&u, &s).unwrap(), apply_isometry(&u, &t).unwrap())
}

#[test]
fn prescribed_angles_recovered() {
    let cases: [&[f64]; 4] = [&[1e-9, 0.3, 1.2], &[0.0, 1e-5], &[FRAC_PI_4, FRAC_PI_2 - 1e-9], &[0.7]];
    for (i, angles) in cases.iter().enumerate() {
        let d = 2 * angles.len() + 1;
        let (s, t) = prescribed(angles, d, i as u64);
        let got = principal_angles(&s, &t).unwrap().angles;
        let oracle = principal_angles_oracle(&s, &t).unwrap().angles;
        for k in 0..angles.len() {
            assert!((got[k] - angles[k]).abs() < 1e-12, "{angles:?}: {got:?}");
            assert!((oracle[k] - angles[k]).abs() < 1e-10, "{angles:?}: oracle {oracle:?}");
        }
    }
}

#[test]
fn prescribed_angles_formulas() {
    let angles = [0.1, 0.4, 0.9];
    let (s, t) = prescribed(&angles, 7, 3);
    let (p, q) = (s.to_projection(), t.to_projection());
    assert!((gap_distance(&p, &q).unwrap() - 0.9f64.sin()).abs() < 1e-12);
    let cos2: f64 = angles.iter().map(|a| a.cos().powi(2)).sum();
    assert!((trace_product(&p, &q).unwrap() - cos2).abs() < 1e-12);
}

/// Minimal angle by scanning unit vectors `cos a e1 + e^{ib} sin a q`
/// of a line against a plane; the plane is real so phase does not matter.
fn brute_force_min_angle(x: &[f64; 3], plane: &[[f64; 3]; 2]) -> f64 {
    let mut best = FRAC_PI_2;
    let steps = 20_000;
    for i in 0..=steps {
        let a = std::f64::consts::PI * i as f64 / steps as f64;
        let y: Vec<f64> = (0..3).map(|k| a.cos() * plane[0][k] + a.sin() * plane[1][k]).collect();
        let ip: f64 = (0..3).map(|k| x[k] * y[k]).sum::<f64>().abs();
        best = best.min(ip.clamp(0.0, 1.0).acos());
    }
    best
}

#[test]
fn unequal_rank_pi_over_4_by_search() {
    let tol = Tolerance::default();
    let h = FRAC_1_SQRT_2;
    let line = Subspace::coordinate(3, &[0]).unwrap();
    let plane = Subspace::span_of(
        &[vec![C64::new(h, 0.0), C64::new(h, 0.0), ZERO], vec![ZERO, ZERO, ONE]],
        &tol,
    )
    .unwrap();
    let searched = brute_force_min_angle(&[1.0, 0.0, 0.0], &[[h, h, 0.0], [0.0, 0.0, 1.0]]);
    let ma = min_angle(&line.to_projection(), &plane.to_projection()).unwrap();
    assert!((searched - FRAC_PI_4).abs() < 1e-6);
    assert!((ma - searched).abs() < 1e-6);
    assert!((ma - FRAC_PI_4).abs() < 1e-15);
    assert_eq!(principal_angles_general(&plane, &line).unwrap().len(), 1);
}

#[test]
fn oracle_agrees_on_random_pairs() {
    for t in 0..200 {
        let mut smp = Seed(11).trial(t);
        let n = 1 + (t as usize % 3);
        let d = n + (t as usize % 6);
        let (s, q) = (smp.subspace(d, n).unwrap(), smp.subspace(d, n).unwrap());
        let a = principal_angles(&s, &q).unwrap();
        let b = principal_angles_oracle(&s, &q).unwrap();
        for k in 0..n {
            assert!((a.angles[k] - b.angles[k]).abs() < 1e-8, "trial {t}");
            // oracle principal vectors realise the angle
            let x = b.left_frame.col(k);
            let y = b.right_frame.col(k);
            let ip: C64 = x.iter().zip(&y).map(|(u, v)| u.conj() * v).sum();
            assert!((ip.norm() - b.angles[k].cos()).abs() < 1e-8);
        }
    }
}
