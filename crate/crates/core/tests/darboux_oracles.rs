use std::f64::consts::FRAC_PI_4;

use susy_spectra::darboux::*;
use susy_spectra::potentials::{Potential, PotentialSpec};
use susy_spectra::schrodinger::uniform_grid;
use susy_spectra::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_diff(a: &Potential, b: &Potential, grid: &[f64]) -> (f64, f64) {
    grid.iter()
        .map(|&x| ((a.eval(x).unwrap() - b.eval(x).unwrap()).norm(), x))
        .fold((0.0, 0.0), |m, p| if p.0 > m.0 { p } else { m })
}

fn example1(a1: f64, k0: f64) -> PotentialSpec {
    susy2_potential(
        &PotentialSpec::zero(),
        &TransformStep::regular(c(-a1 * a1, 0.0)),
        &TransformStep::jost(c(-k0, 0.0)),
    )
    .unwrap()
}

#[test]
fn example_one_two_susy_matches_closed_form() {
    for &(a1, k0) in &[(1.0, 1.0), (2.0, 1.0), (1.0, 0.5)] {
        let got = Potential::new(&example1(a1, k0)).unwrap();
        // The literal seed exp(-i k0 x) produces the closed form at -k0.
        let want = Potential::new(&PotentialSpec::closed_form_2susy(a1, -k0).unwrap()).unwrap();
        let grid = uniform_grid(0.0, 25.0, 2001);
        let vmax = grid.iter().map(|&x| want.eval(x).unwrap().norm()).fold(0.0, f64::max);
        let (d, x) = max_diff(&got, &want, &grid);
        println!("a1={a1} k0={k0} dev={d:e} at {x} rel={:e}", d / vmax);
        assert!(d <= 1e-7 * vmax);
    }
}

#[test]
fn removal_of_shifted_soliton_gives_sinh_barrier() {
    let spec = PotentialSpec::shifted_one_soliton(1.0, c(0.0, FRAC_PI_4)).unwrap();
    let pot = Potential::new(&spec).unwrap();
    let r = remove_spectral_singularity(&pot, 1.0).unwrap();
    let got = Potential::new(&r.spec).unwrap();
    let want = Potential::new(&PotentialSpec::sinh_barrier(1.0).unwrap()).unwrap();
    let (d, x) = max_diff(&got, &want, &uniform_grid(0.05, 25.0, 2000));
    println!("removal dev {d:e} at {x}, nu {} A {} slope {}", got.origin_strength(), r.jost_at_k0, r.jost_slope);
    assert!(d < 1e-7);
    assert_eq!(got.origin_strength(), 1.0);
}
