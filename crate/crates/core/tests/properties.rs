use proptest::prelude::*;

use susy_spectra::darboux::{self, inverse_steps, MapForm, TransformStep};
use susy_spectra::parse::{parse_complex, parse_rect};
use susy_spectra::potentials::{eval_potential, eval_potential_derivative, Potential, PotentialSpec};
use susy_spectra::schrodinger::{self, closed_form_jost, uniform_grid, wronskian};
use susy_spectra::spectral;
use susy_spectra::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn catalog_spec() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        Just(PotentialSpec::zero()),
        (1u32..6, 0.3f64..3.0).prop_map(|(l, a)| PotentialSpec::sech_well(l, a).unwrap()),
        (0.3f64..3.0, -1.0f64..1.0, -1.4f64..1.4)
            .prop_map(|(a, br, bi)| PotentialSpec::shifted_one_soliton(a, Complex64::new(br, bi)).unwrap()),
        (0.3f64..3.0).prop_map(|a| PotentialSpec::sinh_barrier(a).unwrap()),
        (0.3f64..3.0, prop_oneof![-3.0f64..-0.1, 0.1f64..3.0])
            .prop_map(|(a, k)| PotentialSpec::closed_form_2susy(a, k).unwrap()),
    ]
}

fn any_spec() -> impl Strategy<Value = PotentialSpec> {
    let step = prop_oneof![
        (-3.0f64..3.0, 0.05f64..3.0).prop_map(|(re, im)| TransformStep::jost(Complex64::new(re, im))),
        (-4.0f64..-0.1).prop_map(|a| TransformStep::regular(Complex64::new(a, 0.0))),
        (0.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, -3.0f64..3.0)
            .prop_map(|(x0, y, dy, a)| TransformStep::custom(Complex64::new(a, 0.0), x0, Complex64::new(y, 0.0), Complex64::new(0.0, dy))),
    ];
    (catalog_spec(), prop::collection::vec(step, 0..3)).prop_map(|(base, chain)| {
        if chain.is_empty() {
            base
        } else {
            PotentialSpec::transformed(base, chain).unwrap()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spec_json_round_trip(spec in any_spec()) {
        let text = spec.to_json();
        let back = PotentialSpec::from_json(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.digest(), spec.digest());
    }

    #[test]
    fn complex_literal_round_trip(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let text = format!("{re}{}{}i", if im < 0.0 { "-" } else { "+" }, im.abs());
        prop_assert_eq!(parse_complex(&text).unwrap(), Complex64::new(re, im));
    }

    #[test]
    fn rect_parse_accepts_ordered_edges(a in -5.0f64..5.0, w in 0.01f64..5.0, b in 0.0f64..5.0, h in 0.01f64..5.0) {
        let r = parse_rect(&format!("{a},{},{b},{}", a + w, b + h)).unwrap();
        prop_assert!(r.contains(r.center()));
        let swapped = format!("{},{a},{b},{}", a + w, b + h);
        prop_assert!(parse_rect(&swapped).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient(spec in catalog_spec(), x in 0.2f64..4.0) {
        let h = 1e-4;
        let fd = (eval_potential(&spec, x + h).unwrap() - eval_potential(&spec, x - h).unwrap()) / (2.0 * h);
        let d = eval_potential_derivative(&spec, x, 1).unwrap();
        let scale = eval_potential(&spec, x).unwrap().norm().max(1.0) * spec.scale().powi(3).max(1.0);
        prop_assert!((fd - d).norm() <= 1e-5 * scale, "fd {} vs {}", fd, d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn jost_wronskian_is_constant(spec in catalog_spec(), k in 0.2f64..3.0, eta in -0.05f64..0.3) {
        let pot = Potential::new(&spec).unwrap();
        prop_assume!(eta.abs() < pot.decay_rate() / 4.0);
        let s = Complex64::new(k, eta.max(0.0));
        let grid = uniform_grid(0.1 / spec.scale(), 10.0 / spec.scale(), 200);
        let a = schrodinger::jost_solution(&pot, s, &grid).unwrap();
        let b = schrodinger::jost_solution(&pot, -s, &grid).unwrap();
        let w0 = -2.0 * I * s;
        for (p, q) in a.states.iter().zip(&b.states) {
            prop_assert!((wronskian(p, q).unwrap() - w0).norm() <= 1e-6 * w0.norm());
        }
    }

    #[test]
    fn sech_jost_matches_closed_form(lambda in prop::sample::select(vec![1u32, 2, 4]), a in 0.5f64..2.0, re in -3.0f64..3.0, im in 0.0f64..1.5) {
        let spec = PotentialSpec::sech_well(lambda, a).unwrap();
        let s = Complex64::new(re, im);
        let want = closed_form_jost(&spec, s).unwrap();
        let pot = Potential::new(&spec).unwrap();
        let got = schrodinger::jost_function(&pot, s).unwrap().a;
        prop_assert!((got - want).norm() <= 1e-7 * (1.0 + want.norm()), "{} vs {}", got, want);
    }

    #[test]
    fn second_order_map_forms_agree(lambda in 1u32..4, k0 in prop_oneof![-2.5f64..-0.3, 0.3f64..2.5], k in 0.2f64..3.0) {
        let base = PotentialSpec::sech_well(lambda, 1.0).unwrap();
        let pot = Potential::new(&base).unwrap();
        let kappa = lambda as f64;
        let (s1, s2) = (TransformStep::jost(I * kappa), TransformStep::jost(Complex64::new(k0, 0.0)));
        prop_assume!((k - k0.abs()).abs() > 1e-3);
        let grid = uniform_grid(0.05, 8.0, 400);
        let u1 = darboux::build_transformation_function(&pot, &s1, &grid).unwrap();
        let u2 = darboux::build_transformation_function(&pot, &s2, &grid).unwrap();
        let psi = schrodinger::jost_solution(&pot, Complex64::new(k, 0.0), &grid).unwrap();
        let f1 = darboux::susy2_map(&psi, &u1, s1.alpha, &u2, s2.alpha, MapForm::Fi1).unwrap();
        let f2 = darboux::susy2_map(&psi, &u1, s1.alpha, &u2, s2.alpha, MapForm::Fi2).unwrap();
        for (p, q) in f1.states.iter().zip(&f2.states) {
            prop_assert!((p.y - q.y).norm() <= 1e-9 * p.y.norm().max(q.y.norm()));
            prop_assert!((p.dy - q.dy).norm() <= 1e-9 * p.dy.norm().max(q.dy.norm()));
        }
        let prof = darboux::wronskian_profile(&u1, &u2, s1.alpha, s2.alpha).unwrap();
        prop_assert!(prof.validated);
    }

    #[test]
    fn inverse_chain_restores_the_base(a1 in 0.5f64..2.5, k0 in prop_oneof![-2.0f64..-0.2, 0.2f64..2.0]) {
        let chain = vec![TransformStep::regular(Complex64::new(-a1 * a1, 0.0)), TransformStep::jost(Complex64::new(k0, 0.0))];
        let mut full = chain.clone();
        full.extend(inverse_steps(&chain));
        let back = Potential::new(&PotentialSpec::transformed(PotentialSpec::zero(), full).unwrap()).unwrap();
        for x in uniform_grid(0.01, 20.0, 200) {
            prop_assert!(back.eval(x).unwrap().norm() <= 1e-7);
        }
    }

    #[test]
    fn winding_equals_polished_roots(lambda in 1u32..6, a in 0.4f64..2.0) {
        let pot = Potential::new(&PotentialSpec::sech_well(lambda, a).unwrap()).unwrap();
        let rect = spectral::default_contour(&pot).unwrap();
        let n = spectral::count_zeros(&pot, &rect).unwrap();
        let roots = spectral::find_bound_states(&pot, &rect).unwrap();
        prop_assert_eq!(n as usize, roots.len());
        prop_assert_eq!(roots.len(), (lambda / 2) as usize);
        for r in roots {
            prop_assert!(r.residual < 1e-8);
        }
    }
}
