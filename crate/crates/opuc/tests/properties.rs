//! Property-based invariants: reversal involutions, conjugate-function
//! algebra, Jensen positivity, product-factor positivity, extraction-path
//! agreement, and zero locations.

use num_complex::Complex64;
use proptest::prelude::*;

use opuc::entropy;
use opuc::grid::{harmonic_conjugate, GridFunction};
use opuc::measure::CircleMeasure;
use opuc::orthopoly::szego_recursion;
use opuc::poly::ComplexPoly;
use opuc::schur::{caratheodory_to_schur, schur_algorithm, verblunsky_levinson, VerblunskySeq};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

prop_compose! {
    fn small_complex(radius: f64)(re in -1.0..1.0f64, im in -1.0..1.0f64) -> Complex64 {
        Complex64::new(re, im) * (radius / 2.0f64.sqrt())
    }
}

prop_compose! {
    fn coefficient_seq(max_len: usize)(values in prop::collection::vec(small_complex(0.8), 1..max_len)) -> VerblunskySeq {
        VerblunskySeq::prescribed(values).unwrap()
    }
}

prop_compose! {
    fn random_poly()(coeffs in prop::collection::vec(small_complex(2.0), 2..12)) -> ComplexPoly {
        ComplexPoly::new(coeffs)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reverse_star_involution(p in random_poly(), extra in 0usize..4) {
        let n = p.degree() + extra;
        let back = p.reverse_star(n).unwrap().reverse_star(n).unwrap();
        prop_assert!(p.max_coeff_distance(&back) < 1e-14);
    }

    #[test]
    fn reversal_keeps_boundary_modulus(p in random_poly(), angle in 0.0..6.28f64) {
        let n = p.degree();
        let star = p.reverse_star(n).unwrap();
        let xi = Complex64::from_polar(1.0, angle);
        let scale = p.eval(xi).norm().max(1.0);
        prop_assert!((star.eval(xi).norm() - p.eval(xi).norm()).abs() < 1e-12 * scale);
    }

    #[test]
    fn conjugate_involution(coeffs in prop::collection::vec(-1.0..1.0f64, 1..6)) {
        // band-limited u: Q(Qu) = -(u - mean u)
        let m = 256;
        let u = GridFunction::from_fn(m, |t| {
            let mut acc = 0.5;
            for (k, &a) in coeffs.iter().enumerate() {
                acc += a * ((k as f64 + 1.0) * t).cos();
            }
            c(acc, 0.0)
        }).unwrap();
        let qq = harmonic_conjugate(&harmonic_conjugate(&u).unwrap()).unwrap();
        let mean = u.mean().re;
        for j in 0..m {
            prop_assert!((qq.value(j).re + (u.value(j).re - mean)).abs() < 1e-9);
        }
    }

    #[test]
    fn jensen_positivity_for_trig_densities(
        a1 in -0.4..0.4f64,
        b1 in -0.4..0.4f64,
        a2 in -0.2..0.2f64,
        re in -0.9..0.9f64,
        im in -0.9..0.9f64,
    ) {
        // strictly positive trigonometric density
        let mu = CircleMeasure::from_cos_sin(&[1.0, a1, a2], &[b1], 512)
            .unwrap()
            .normalize()
            .unwrap();
        let z = c(re, im);
        prop_assume!(z.norm() <= 0.9);
        let p = mu.poisson_density(z).unwrap();
        let p_log = mu.poisson_log_density(z).unwrap();
        prop_assert!(p.ln() - p_log >= -1e-10);
    }

    #[test]
    fn product_factors_stay_above_one(a in coefficient_seq(8), re in -0.9..0.9f64, im in -0.9..0.9f64) {
        let z = c(re, im);
        prop_assume!(z.norm() <= 0.9);
        let mu = CircleMeasure::from_verblunsky(&a, 4096).unwrap();
        let wall = opuc::schur::WallPolynomials::build(&a, a.len());
        let f = wall.schur_series(256).unwrap();
        let row = entropy::entropy_product_row(&mu, &f, &a, z, 16).unwrap();
        let mut prev = 0.0;
        for &p in &row.partial_logs {
            prop_assert!(p >= prev - 1e-12, "factor below one");
            prev = p;
        }
        // and the truncated product reproduces the entropy for finite data
        prop_assert!(row.residual < 1e-7, "residual {}", row.residual);
    }

    #[test]
    fn extraction_paths_agree(a in coefficient_seq(6)) {
        let mu = CircleMeasure::from_verblunsky(&a, 4096).unwrap();
        let count = a.len() + 4;
        let moments = mu.moments(count + 8).unwrap();
        let f = caratheodory_to_schur(&moments).unwrap();
        let alg = schur_algorithm(&f, count).unwrap();
        let lev = verblunsky_levinson(&moments, count).unwrap();
        for k in 0..count {
            prop_assert!(
                (alg.coefficients.at(k) - lev.at(k)).norm() < 1e-8,
                "paths disagree at {k}"
            );
            prop_assert!((alg.coefficients.at(k) - a.at(k)).norm() < 1e-8);
        }
    }

    #[test]
    fn orthogonal_polynomial_zeros_stay_inside(a in coefficient_seq(6)) {
        let sys = szego_recursion(&a, 8).unwrap();
        for n in 1..=8 {
            let roots = sys.zero_set(n).unwrap();
            prop_assert!(roots.max_modulus() <= 1.0 - 1e-10);
        }
    }
}
