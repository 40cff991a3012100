use susy_spectra::darboux::TransformStep;
use susy_spectra::parse::Rect;
use susy_spectra::potentials::PotentialSpec;
use susy_spectra::verify::{self, ExampleReport};
use susy_spectra::Complex64;

fn show(r: &ExampleReport) {
    for c in &r.checks {
        println!("[{}] {:<6} {:.3e} <= {:.1e}  {}  {}", r.example_id, c.pass, c.max_deviation, c.tolerance, c.name, c.detail.as_deref().unwrap_or(""));
    }
}

#[test]
fn example_1_default_passes() {
    let r = verify::run_example_1(Complex64::new(1.0, 0.0), 1.0);
    show(&r);
    assert!(r.overall);
}

#[test]
fn example_1_other_parameters() {
    for (a1, k0) in [(2.0, 1.0), (1.0, 0.5)] {
        let r = verify::run_example_1(Complex64::new(a1, 0.0), k0);
        show(&r);
        assert!(r.overall, "a1 = {a1}, k0 = {k0}");
    }
}

#[test]
fn example_1_coinciding_factorization_energies_fail() {
    let r = verify::run_example_1(Complex64::new(0.0, 1.0), 1.0);
    show(&r);
    assert!(!r.overall);
    assert!(r.checks[0].detail.is_some());
}

#[test]
fn example_2_default_passes() {
    let r = verify::run_example_2(1.0, None);
    show(&r);
    assert!(r.overall);
}

#[test]
fn example_2_with_noded_seed_reports_it() {
    let r = verify::run_example_2(1.0, Some(TransformStep::regular(Complex64::new(4.0, 0.0))));
    show(&r);
    assert!(!r.overall);
    assert!(!r.check("u1 nodeless").unwrap().pass);
}

#[test]
fn example_3_default_passes() {
    let r = verify::run_example_3(1.0, None);
    show(&r);
    assert!(r.overall);
}

#[test]
fn example_3_contour_missing_the_bound_state() {
    let rect = Rect::new(-3.0, 3.0, 1.5, 4.0).unwrap();
    let r = verify::run_example_3(1.0, Some(rect));
    show(&r);
    assert!(!r.overall);
    assert!(!r.check("bound state").unwrap().pass);
}

#[test]
fn removal_roundtrip_on_shifted_soliton() {
    let spec = PotentialSpec::shifted_one_soliton(1.0, Complex64::new(0.0, std::f64::consts::FRAC_PI_4)).unwrap();
    let target = PotentialSpec::sinh_barrier(1.0).unwrap();
    let r = verify::verify_removal_roundtrip(&spec, 1.0, Some(&target));
    show(&r);
    assert!(r.overall);
}

#[test]
fn removal_refuses_a_regular_point() {
    let spec = PotentialSpec::sech_well(2, 1.0).unwrap();
    let r = verify::verify_removal_roundtrip(&spec, 1.0, None);
    show(&r);
    assert!(!r.overall);
}
