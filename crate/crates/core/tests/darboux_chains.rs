use std::f64::consts::PI;

use susy_spectra::darboux::{self, Pairing, PrepareOptions, TransformStep};
use susy_spectra::potentials::{check_exponential_decay, Potential, PotentialSpec};
use susy_spectra::schrodinger::{self, closed_form_jost_solution, uniform_grid};
use susy_spectra::verify::verify_removal_roundtrip;
use susy_spectra::{Complex64, Error};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// V_base - 2 (log W)'' from the Wronskian of the seeds, differenced on a fine grid.
fn crum_deviation(base: &PotentialSpec, seeds: Vec<TransformStep>) -> f64 {
    let h = 1e-3;
    let grid = uniform_grid(0.3, 6.0, 5701);
    let w = darboux::crum_wronskian_oracle(base, &seeds, &grid).unwrap();
    let pot = Potential::new(&PotentialSpec::transformed(base.clone(), seeds).unwrap()).unwrap();
    let bp = Potential::new(base).unwrap();
    let l: Vec<Complex64> = w.iter().map(|z| z.ln()).collect();
    let mut worst: f64 = 0.0;
    for i in 2..grid.len() - 2 {
        let d = |j: usize| {
            let mut z = l[j] - l[i];
            z.im -= (z.im / (2.0 * PI)).round() * 2.0 * PI;
            z
        };
        let d2 = (-d(i - 2) + 16.0 * d(i - 1) + 16.0 * d(i + 1) - d(i + 2)) / (12.0 * h * h);
        let want = bp.eval(grid[i]).unwrap() - 2.0 * d2;
        let got = pot.eval(grid[i]).unwrap();
        worst = worst.max((want - got).norm() / (1.0 + got.norm()));
    }
    worst
}

#[test]
fn chains_match_the_wronskian_formula() {
    let base = PotentialSpec::sech_well(4, 1.0).unwrap();
    let two = vec![TransformStep::jost(3.0 * I), TransformStep::jost(re(1.0))];
    let three = vec![TransformStep::jost(3.0 * I), TransformStep::jost(re(1.0)), TransformStep::jost(re(2.0))];
    let four = vec![TransformStep::jost(3.0 * I), TransformStep::jost(re(1.0)), TransformStep::jost(I), TransformStep::jost(re(2.0))];
    for seeds in [two, three, four] {
        let n = seeds.len();
        let dev = crum_deviation(&base, seeds);
        assert!(dev < 2e-6, "{n} seeds: {dev:e}");
    }
}

#[test]
fn pairing_strategies_agree() {
    let spec = PotentialSpec::transformed(PotentialSpec::sech_well(2, 1.0).unwrap(), vec![TransformStep::jost(I), TransformStep::jost(re(1.0))]).unwrap();
    let greedy = Potential::new(&spec).unwrap();
    let opts = PrepareOptions { pairing: Pairing::Sequential, ..PrepareOptions::default() };
    let seq = Potential::with_options(&spec, &opts).unwrap();
    for x in uniform_grid(0.05, 20.0, 400) {
        assert!((greedy.eval(x).unwrap() - seq.eval(x).unwrap()).norm() < 1e-10, "x = {x}");
    }
}

#[test]
fn excited_state_seed_is_degenerate_with_location() {
    // Jost(i) on -20 sech^2 is the excited bound state, which has a node.
    let spec = PotentialSpec::transformed(PotentialSpec::sech_well(4, 1.0).unwrap(), vec![TransformStep::jost(I)]).unwrap();
    match Potential::new(&spec) {
        Err(Error::Stage { stage: 0, source }) => match *source {
            Error::Degenerate { x, .. } => assert!(x > 0.5 && x < 1.1, "x = {x}"),
            other => panic!("unexpected {other}"),
        },
        Err(other) => panic!("unexpected {other}"),
        Ok(_) => panic!("node went unnoticed"),
    }
}

#[test]
fn second_order_block_is_nodeless_and_decays() {
    let spec = PotentialSpec::transformed(PotentialSpec::sech_well(4, 1.0).unwrap(), vec![TransformStep::jost(3.0 * I), TransformStep::jost(re(1.0))]).unwrap();
    let pot = Potential::new(&spec).unwrap();
    let minima = darboux::block_minima(&pot);
    assert_eq!(minima.len(), 1);
    assert_eq!(minima[0].order, 2);
    assert!(minima[0].value > 1e-6);
    // Beyond x ~ 18 the chain sits on its roundoff floor, which e^x would amplify.
    let rep = check_exponential_decay(&pot, pot.decay_rate() / 2.0, 15.0, None).unwrap();
    assert!(rep.integral.is_finite() && !rep.tail_growing, "{rep:?}");
}

#[test]
fn physical_solution_flags_the_singularity() {
    let pot = Potential::new(&PotentialSpec::shifted_one_soliton(1.0, I * PI / 4.0).unwrap()).unwrap();
    let grid = uniform_grid(0.0, 3.0, 31);
    assert!(schrodinger::physical_solution(&pot, 1.0, &grid).unwrap().at_singularity);
    assert!(!schrodinger::physical_solution(&pot, 1.7, &grid).unwrap().at_singularity);
}

#[test]
fn removal_on_the_closed_form_partner() {
    let spec = PotentialSpec::closed_form_2susy(2.0, 1.0).unwrap();
    let rep = verify_removal_roundtrip(&spec, -1.0, None);
    assert!(rep.overall, "{rep:#?}");
}

#[test]
fn numeric_jost_trace_matches_closed_form() {
    let spec = PotentialSpec::sech_well(2, 1.0).unwrap();
    let pot = Potential::new(&spec).unwrap();
    let s = Complex64::new(0.8, 0.3);
    let grid = uniform_grid(0.0, 8.0, 81);
    let tr = schrodinger::jost_solution(&pot, s, &grid).unwrap();
    for (x, st) in grid.iter().zip(&tr.states) {
        let (y, dy) = closed_form_jost_solution(&spec, s, *x).unwrap();
        assert!((st.y - y).norm() < 1e-7 * (1.0 + y.norm()), "x = {x}");
        assert!((st.dy - dy).norm() < 1e-7 * (1.0 + dy.norm()), "x = {x}");
    }
}

#[test]
fn regular_solution_of_free_particle() {
    let pot = Potential::new(&PotentialSpec::zero()).unwrap();
    let k = 1.3;
    let grid = uniform_grid(0.0, 6.0, 61);
    let tr = schrodinger::regular_solution(&pot, re(k * k), &grid).unwrap();
    for (x, st) in grid.iter().zip(&tr.states) {
        assert!((st.y - re((k * x).sin() / k)).norm() < 1e-8, "x = {x}");
    }
}
