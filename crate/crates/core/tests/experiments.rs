use kgz::experiments::{
    default_tau_list, fit_slope, read_csv, run_convergence, steps_for, write_csv, ConvergenceReport,
    ConvergenceRow, Scheme, SweepConfig, CSV_HEADER,
};
use kgz::spectral_core::TorusGrid;
use kgz::KgzError;
use proptest::prelude::*;

fn small_sweep(scheme: Scheme) -> SweepConfig {
    let mut cfg = SweepConfig::standard(scheme, vec![1.0, 32.0]);
    cfg.grid = TorusGrid::with_points(32).unwrap();
    cfg.tau_list = vec![0.0625, 0.03125, 0.015625];
    cfg.ref_tau = 1.0 / 1024.0;
    cfg
}

#[test]
fn slope_examples() {
    assert_eq!(fit_slope(&[(1.0, 1.0), (2.0, 4.0), (4.0, 16.0)]).unwrap(), 2.0);
    assert_eq!(fit_slope(&[(1.0, 1.0), (2.0, 1.0)]).unwrap(), 0.0);
    assert!(matches!(fit_slope(&[(1.0, 1.0)]), Err(KgzError::Input(_))));
    assert!(fit_slope(&[(1.0, 1.0), (2.0, -1.0)]).is_err());
    assert!(fit_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
}

#[test]
fn slope_of_published_limit_errors() {
    let pts = [
        (256.0, 0.00952528670150864),
        (512.000000000001, 0.00238406272750457),
        (1024.0, 0.000597525223731854),
    ];
    let s = fit_slope(&pts).unwrap();
    assert!((s + 2.0).abs() <= 0.02, "{s}");
}

#[test]
fn step_count_checks() {
    assert_eq!(steps_for(0.5, 1.0).unwrap(), 2);
    assert_eq!(steps_for(1.0 / 4096.0, 1.0).unwrap(), 4096);
    assert_eq!(steps_for(0.1, 1.0).unwrap(), 10);
    assert!(matches!(steps_for(0.3, 1.0), Err(KgzError::Config(_))));
    assert!(steps_for(0.0, 1.0).is_err());
    assert_eq!(default_tau_list(1.0).len(), 7);
    assert_eq!(default_tau_list(1.0)[6], 1.0 / 256.0);
}

#[test]
fn sweep_validation() {
    let mut cfg = small_sweep(Scheme::Uaosc1);
    cfg.ref_tau = 0.1;
    assert!(cfg.validate().is_err());
    let mut cfg = small_sweep(Scheme::Uaosc1);
    cfg.c_list = vec![0.5];
    assert!(run_convergence(&cfg).is_err());
    assert!("uaosc3".parse::<Scheme>().is_err());
    assert_eq!("uaosc2".parse::<Scheme>().unwrap(), Scheme::Uaosc2);
}

#[test]
fn sweep_shape_and_order() {
    let report = run_convergence(&small_sweep(Scheme::Uaosc2)).unwrap();
    assert_eq!(report.rows.len(), 6);
    assert!(report.rows.windows(2).all(|w| {
        w[0].c < w[1].c || (w[0].c == w[1].c && w[0].tau > w[1].tau)
    }));
    let fits = report.slopes().unwrap();
    assert_eq!(fits.len(), 2);
    for f in fits {
        assert!(f.slope > 1.5, "{f:?}");
    }
    assert!(report.uniformity_ratio(Scheme::Uaosc2, 0.03125).unwrap() >= 1.0);
    assert!(report.uniformity_ratio(Scheme::Uaosc1, 0.03125).is_none());
}

#[test]
fn sweeps_are_byte_identical() {
    let cfg = small_sweep(Scheme::Uaosc1);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_csv(&run_convergence(&cfg).unwrap(), &mut a).unwrap();
    write_csv(&run_convergence(&cfg).unwrap(), &mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn csv_examples() {
    let mut out = Vec::new();
    write_csv(&ConvergenceReport::default(), &mut out).unwrap();
    assert_eq!(String::from_utf8(out.clone()).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    assert!(read_csv(out.as_slice()).unwrap().rows.is_empty());

    let report = ConvergenceReport {
        rows: vec![ConvergenceRow {
            scheme: Scheme::Uaosc1,
            c: 32.0,
            tau: 0.25,
            err_z_h1: 1.5e-3,
            err_n_l2: 2.0e-4,
        }],
    };
    let mut out = Vec::new();
    write_csv(&report, &mut out).unwrap();
    let text = String::from_utf8(out.clone()).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert_eq!(read_csv(out.as_slice()).unwrap(), report);
    assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(
        (any::<bool>(), 1.0..1e4f64, 1e-6..1.0f64, 1e-300..1e3f64, 1e-300..1e3f64), 0..10)
    ) {
        let report = ConvergenceReport {
            rows: rows.into_iter().map(|(s, c, tau, ez, en)| ConvergenceRow {
                scheme: if s { Scheme::Uaosc1 } else { Scheme::Uaosc2 },
                c, tau, err_z_h1: ez, err_n_l2: en,
            }).collect(),
        };
        let mut out = Vec::new();
        write_csv(&report, &mut out).unwrap();
        prop_assert_eq!(read_csv(out.as_slice()).unwrap(), report);
    }

    #[test]
    fn power_laws_are_recovered(p in -3.0..3.0f64, a in 1e-3..1e3f64) {
        let pts: Vec<(f64, f64)> = (0..5).map(|j| {
            let x = 2f64.powi(j);
            (x, a * x.powf(p))
        }).collect();
        prop_assert!((fit_slope(&pts).unwrap() - p).abs() < 1e-12);
    }
}
