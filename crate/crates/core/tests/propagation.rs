//! End-to-end properties of the split-operator pipeline on small grids.

use sauter_core::fields::{FieldSampler, Potential, ZeroField};
use sauter_core::observables::{density_from_transition_matrix, momentum_spectrum, total_number};
use sauter_core::oracle::{dense_oracle, max_entry_difference};
use sauter_core::propagator::{evolve_all, Evolution, MatrixRetention};
use sauter_core::{EvolutionSchedule, FreeBasis, Grid, SimulationConfig};

fn config(nz: usize, nt: usize) -> SimulationConfig {
    SimulationConfig {
        nz,
        nt,
        sample_stride: (nt / 50).max(1),
        ..SimulationConfig::default()
    }
}

fn widths(cfg: SimulationConfig, w1_le: f64, w2_le: f64) -> SimulationConfig {
    let le = 1.0 / cfg.c;
    SimulationConfig {
        w1: w1_le * le,
        w2: w2_le * le,
        ..cfg
    }
}

fn run(cfg: &SimulationConfig, retain: MatrixRetention) -> Evolution {
    let grid = Grid::from_config(cfg).unwrap();
    let basis = FreeBasis::new(&grid, cfg.c);
    let sampler = FieldSampler::new(cfg, &grid);
    let schedule = EvolutionSchedule::from_config(cfg).retain(retain);
    evolve_all(&basis, &sampler, &schedule).unwrap()
}

#[test]
fn strang_error_is_second_order_over_the_full_run() {
    let cfg = widths(config(32, 128), 0.3, 0.15);
    let grid = Grid::from_config(&cfg).unwrap();
    let basis = FreeBasis::new(&grid, cfg.c);
    let well = FieldSampler::static_well(&cfg, &grid);
    let total = cfg.total_time();
    let error = |nt: usize| {
        let schedule = EvolutionSchedule::new(nt, total / nt as f64, nt).retain(MatrixRetention::Final);
        let dense = dense_oracle(&basis, &well, &schedule).unwrap();
        let split = evolve_all(&basis, &well, &schedule).unwrap();
        max_entry_difference(dense.matrices.last().unwrap(), split.final_matrix().unwrap())
    };
    let errors: Vec<f64> = [128, 256, 512].iter().map(|&nt| error(nt)).collect();
    for pair in errors.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!(ratio >= 3.5, "errors {errors:?}");
    }
}

#[test]
fn split_operator_tracks_dense_oracle_for_the_driven_well() {
    let cfg = widths(config(16, 2000), 0.3, 0.15);
    let grid = Grid::from_config(&cfg).unwrap();
    let basis = FreeBasis::new(&grid, cfg.c);
    let sampler = FieldSampler::new(&cfg, &grid);
    let schedule = EvolutionSchedule::from_config(&cfg).retain(MatrixRetention::All);
    let dense = dense_oracle(&basis, &sampler, &schedule).unwrap();
    let split = evolve_all(&basis, &sampler, &schedule).unwrap();
    assert_eq!(dense.matrices.len(), split.matrices.len());
    for (d, s) in dense.matrices.iter().zip(&split.matrices) {
        assert_eq!(d.step, s.step);
        assert!(max_entry_difference(d, s) < 1e-4);
    }
}

#[test]
fn symmetric_well_has_exact_parity() {
    let cfg = widths(config(128, 400), 0.3, 0.3);
    let evo = run(&cfg, MatrixRetention::Final);
    let spectrum = momentum_spectrum(evo.final_matrix().unwrap());
    let scale = spectrum.occupation.iter().cloned().fold(0.0, f64::max);
    assert!(scale > 0.0);
    for k in 1..64 {
        let (a, b) = (spectrum.at(k).unwrap(), spectrum.at(-k).unwrap());
        assert!((a - b).abs() <= 1e-10 * scale, "k = {k}: {a} vs {b}");
    }
}

#[test]
fn swapping_widths_mirrors_the_spectrum() {
    let base = config(128, 400);
    let a = momentum_spectrum(run(&widths(base.clone(), 0.3, 0.6), MatrixRetention::Final).final_matrix().unwrap());
    let b = momentum_spectrum(run(&widths(base, 0.6, 0.3), MatrixRetention::Final).final_matrix().unwrap());
    let scale = a.occupation.iter().cloned().fold(0.0, f64::max);
    for k in 1..64 {
        assert!((a.at(k).unwrap() - b.at(-k).unwrap()).abs() <= 1e-10 * scale);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = widths(config(64, 300), 0.3, 0.15);
    let on = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| run(&cfg, MatrixRetention::All))
    };
    let one = on(1);
    let three = on(3);
    assert_eq!(one.samples, three.samples);
    assert_eq!(one.diagnostics, three.diagnostics);
    for (a, b) in one.matrices.iter().zip(&three.matrices) {
        assert_eq!(a.as_slice(), b.as_slice());
    }
}

#[test]
fn observables_agree_and_columns_stay_complete() {
    let cfg = widths(config(128, 400), 0.3, 0.15);
    let evo = run(&cfg, MatrixRetention::Final);
    let u = evo.final_matrix().unwrap();
    let grid = Grid::from_config(&cfg).unwrap();
    let basis = FreeBasis::new(&grid, cfg.c);
    let n = total_number(u);
    let spectrum = momentum_spectrum(u).total();
    let density = density_from_transition_matrix(u, &basis).unwrap().integral();
    let from_samples = evo.samples.last().unwrap().total_number;
    for other in [spectrum, density, from_samples] {
        assert!((n - other).abs() <= 1e-10 * n, "{n} vs {other}");
    }
    assert!(n > 0.0);
    assert!(evo.diagnostics.max_completeness_error < 1e-10);
    assert!(evo.diagnostics.max_norm_drift < 1e-10);
    assert!(u.column_norms().iter().all(|&c| c <= 1.0));
}

#[test]
fn no_field_no_pairs() {
    let cfg = config(64, 200);
    let grid = Grid::from_config(&cfg).unwrap();
    let basis = FreeBasis::new(&grid, cfg.c);
    let schedule = EvolutionSchedule::from_config(&cfg).retain(MatrixRetention::Final);
    let zero: &dyn Potential = &ZeroField;
    let evo = evolve_all(&basis, zero, &schedule).unwrap();
    assert!(evo.samples.iter().all(|s| s.total_number < 1e-20));
}
