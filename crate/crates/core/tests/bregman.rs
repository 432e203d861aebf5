//! Bregman divergence axioms, Pinsker, and reference values.

mod common;

use ndarray::{Array1, ArrayView1};
use nlpdhg::numeric::{dist1, dist2};
use nlpdhg::{Geometry, Norm};
use proptest::prelude::*;

fn simplex(raw: Vec<f64>) -> Array1<f64> {
    let v = Array1::from(raw);
    let s = v.sum();
    v / s
}

fn box_point(raw: Vec<f64>, m: usize) -> Array1<f64> {
    Array1::from(raw) / m as f64
}

fn dist(norm: Norm, a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    match norm {
        Norm::L1 => dist1(a, b),
        Norm::L2 => dist2(a, b),
    }
}

/// Nonnegativity, `D(x, x) = 0`, the three-point identity and the
/// strong-convexity lower bound at one triple.
fn check_axioms(g: Geometry, x: &Array1<f64>, xh: &Array1<f64>, xp: &Array1<f64>) -> Result<(), TestCaseError> {
    let d = g.divergence(x.view(), xp.view()).unwrap();
    prop_assert!(d >= 0.0);
    prop_assert!(g.divergence(xp.view(), xp.view()).unwrap().abs() < 1e-12);
    let scale = d + g.divergence(xh.view(), xp.view()).unwrap() + g.divergence(x.view(), xh.view()).unwrap();
    let res = g.three_point_check(x.view(), xh.view(), xp.view()).unwrap();
    prop_assert!(res <= 1e-10 * scale.max(1e-300), "three-point residual {res} vs scale {scale}");
    let (norm, modulus) = g.strong_convexity();
    let r = dist(norm, x.view(), xp.view());
    prop_assert!(d >= 0.5 * modulus * r * r * (1.0 - 1e-9) - 1e-15, "D = {d}, bound {}", 0.5 * modulus * r * r);
    Ok(())
}

proptest! {
    #[test]
    fn quadratic_axioms(
        x in prop::collection::vec(-5.0..5.0f64, 4),
        xh in prop::collection::vec(-5.0..5.0f64, 4),
        xp in prop::collection::vec(-5.0..5.0f64, 4),
        scale in 0.1..10.0f64,
    ) {
        check_axioms(Geometry::quadratic(scale).unwrap(), &Array1::from(x), &Array1::from(xh), &Array1::from(xp))?;
    }

    #[test]
    fn entropy_axioms_on_simplex(
        x in prop::collection::vec(1e-6..1.0f64, 5),
        xh in prop::collection::vec(1e-6..1.0f64, 5),
        xp in prop::collection::vec(1e-6..1.0f64, 5),
    ) {
        check_axioms(Geometry::NegEntropy, &simplex(x), &simplex(xh), &simplex(xp))?;
    }

    #[test]
    fn binary_entropy_axioms(
        x in prop::collection::vec(1e-6..0.999_999f64, 3),
        xh in prop::collection::vec(1e-6..0.999_999f64, 3),
        xp in prop::collection::vec(1e-6..0.999_999f64, 3),
    ) {
        let g = Geometry::logistic_dual(3);
        check_axioms(g, &box_point(x, 3), &box_point(xh, 3), &box_point(xp, 3))?;
    }

    /// Pinsker: `KL(p, q) ≥ ½‖p − q‖₁²`.
    #[test]
    fn pinsker(p in prop::collection::vec(1e-9..1.0f64, 2..8), seed in any::<u64>()) {
        let p = simplex(p);
        let mut rng = common::rng(seed);
        let q = common::simplex_point(&mut rng, p.len());
        let kl = Geometry::NegEntropy.divergence(p.view(), q.view()).unwrap();
        let l1 = dist1(p.view(), q.view());
        prop_assert!(kl >= 0.5 * l1 * l1 - 1e-15);
    }

    /// Divergence through differences of φ agrees with the log-ratio form.
    #[test]
    fn divergence_matches_definition(
        x in prop::collection::vec(0.01..0.99f64, 4),
        xb in prop::collection::vec(0.01..0.99f64, 4),
    ) {
        for g in [Geometry::NegEntropy, Geometry::logistic_dual(4), Geometry::quadratic(2.0).unwrap()] {
            let (x, xb) = (box_point(x.clone(), 4), box_point(xb.clone(), 4));
            let def = g.value(x.view()).unwrap() - g.value(xb.view()).unwrap()
                - g.gradient(xb.view()).unwrap().dot(&(&x - &xb));
            let d = g.divergence(x.view(), xb.view()).unwrap();
            prop_assert!((def - d).abs() < 1e-12, "{g:?}: {def} vs {d}");
        }
    }
}

#[test]
fn kl_reference_values() {
    // KL((½,½), (¼,¾)) = ½ ln 2 + ½ ln(2/3) = ½ ln(4/3)
    let p = Array1::from(vec![0.5, 0.5]);
    let q = Array1::from(vec![0.25, 0.75]);
    let kl = Geometry::NegEntropy.divergence(p.view(), q.view()).unwrap();
    assert!((kl - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-15);
    // zero entries of the first argument contribute nothing
    let e1 = Array1::from(vec![1.0, 0.0]);
    let kl = Geometry::NegEntropy.divergence(e1.view(), q.view()).unwrap();
    assert!((kl - 4f64.ln()).abs() < 1e-15);
}

#[test]
fn binary_entropy_printed_form() {
    // D = (1/4m²) Σ [m y ln(y/ȳ) + (1 − m y) ln((1 − m y)/(1 − m ȳ))]
    let m = 3usize;
    let mf = m as f64;
    let y = Array1::from(vec![0.1, 0.2, 0.3]);
    let yb = Array1::from(vec![0.25, 0.05, 0.15]);
    let printed: f64 = y
        .iter()
        .zip(yb.iter())
        .map(|(&a, &b)| mf * a * (a / b).ln() + (1.0 - mf * a) * ((1.0 - mf * a) / (1.0 - mf * b)).ln())
        .sum::<f64>()
        / (4.0 * mf * mf);
    let d = Geometry::logistic_dual(m).divergence(y.view(), yb.view()).unwrap();
    assert!((d - printed).abs() < 1e-15);
}

#[test]
fn domain_violations_are_errors() {
    let g = Geometry::logistic_dual(2);
    assert!(g.divergence(Array1::from(vec![0.1, 0.6]).view(), Array1::from(vec![0.1, 0.1]).view()).is_err());
    assert!(Geometry::NegEntropy.gradient(Array1::from(vec![0.0, 1.0]).view()).is_err());
    assert!(Geometry::NegEntropy.value(Array1::from(vec![-0.1, 1.1]).view()).is_err());
    assert!(Geometry::quadratic(0.0).is_err());
}

#[test]
fn binary_entropy_is_not_l1_strongly_convex() {
    // shifting both coordinates of the centre by t gives D ≈ t², which is
    // ½‖δ‖₂² but only half of ½‖δ‖₁²
    let g = Geometry::logistic_dual(2);
    let c = Array1::from(vec![0.25, 0.25]);
    let t = 1e-3;
    let s = &c + t;
    let d = g.divergence(s.view(), c.view()).unwrap();
    let l1 = dist1(s.view(), c.view());
    let l2 = dist2(s.view(), c.view());
    assert!(d < 0.5 * l1 * l1);
    assert!(d >= 0.5 * l2 * l2);
}
