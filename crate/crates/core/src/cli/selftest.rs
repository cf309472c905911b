//! Quick property checks run by `kgz selftest`.

use std::io::Write;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::experiments::{simulate, state_errors, Scheme};
use crate::integrator_uaosc1::{step1, StepOperators1};
use crate::integrator_uaosc2::{step2, StepOperators2, Uaosc2Options};
use crate::kgz_model::{benchmark_initial_data, initial_state, ModelParams, PhysicalState, SchemeOrder};
use crate::oscillatory_kernels::{a_c, phi, phi1, phi2, psi2, PhiKind};
use crate::spectral_core::{sobolev_norm, SpectralField, TorusGrid};

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spectral() -> Check {
    let mut rng = StdRng::seed_from_u64(7);
    for n in [8, 32, 128] {
        let g = TorusGrid::with_points(n).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let s: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let f = SpectralField::to_spectral(g, &s).map_err(|e| e.to_string())?;
            let back = f.to_physical();
            let scale = s.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = back.iter().zip(&s).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            ensure(err <= 1e-12 * scale, || format!("round trip error {err:e} at N = {n}"))?;
            let mean_sq = s.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            let l2 = sobolev_norm(&f, 0.0).powi(2);
            ensure((l2 - mean_sq).abs() <= 1e-12 * mean_sq, || {
                format!("Parseval mismatch {l2} vs {mean_sq} at N = {n}")
            })?;
        }
    }
    Ok(())
}

fn kernels() -> Check {
    for &r in &[1e-6, 5e-3, 0.0099, 0.0101, 0.3, 2.0, 40.0, 900.0] {
        for &arg in &[0.5 * std::f64::consts::PI, 0.3, 2.5] {
            let z = Complex64::from_polar(r, arg);
            if z.re > 600.0 {
                continue;
            }
            let checks = [
                (z * phi1(z), phi(PhiKind::Phi0, z) - 1.0),
                (z * phi2(z), phi1(z) - 1.0),
                (z * psi2(z), z.exp() - phi1(z)),
            ];
            for (lhs, rhs) in checks {
                // the subtractions on the right cancel down to |e^z|-sized rounding
                let scale = lhs.norm().max(rhs.norm()).max(z.exp().norm());
                ensure((lhs - rhs).norm() <= 1e-12 * scale, || {
                    format!("recurrence off at z = {z}: {lhs} vs {rhs}")
                })?;
            }
        }
    }
    for x in [-50.0, -1.0, 0.001, 3.0, 100.0] {
        let z = Complex64::new(0.0, x);
        ensure(phi1(z).norm() <= 1.0 + 1e-15 && phi2(z).norm() <= 1.0 + 1e-15, || {
            format!("phi bound violated at ix = {z}")
        })?;
    }
    let exact = 1.0 / (2.0 + 1e-8 / (1.0 + (1.0f64 + 1e-8).sqrt()));
    let got = a_c(1e4, 1.0);
    ensure((got - exact).abs() <= 1e-14 * exact, || format!("A_c(1e4, 1) = {got}"))
}

fn free_wave() -> Check {
    let g = TorusGrid::default();
    for c in [1.0, 1024.0] {
        let params = ModelParams::new(c, g).map_err(|e| e.to_string())?;
        let mut p = PhysicalState::zero(g);
        p.n = SpectralField::from_fn(g, f64::cos);
        let tau = 0.01;
        let s1 = initial_state(&p, &params, tau, SchemeOrder::First).map_err(|e| e.to_string())?;
        let s2 = initial_state(&p, &params, tau, SchemeOrder::Second).map_err(|e| e.to_string())?;
        let o1 = StepOperators1::new(&params, tau).map_err(|e| e.to_string())?;
        let o2 = StepOperators2::new(&params, tau).map_err(|e| e.to_string())?;
        let (mut a, mut b) = (s1.clone(), s2.clone());
        for _ in 0..100 {
            a = step1(&a, &o1).map_err(|e| e.to_string())?;
            b = step2(&b, &s2.u, &o2).map_err(|e| e.to_string())?;
        }
        let expect = SpectralField::from_fn(g, |x| 1f64.cos() * x.cos());
        for s in [&a, &b] {
            let err = sobolev_norm(&s.n.sub(&expect).map_err(|e| e.to_string())?, 0.0);
            ensure(err < 1e-11, || format!("free wave error {err:e} at c = {c}"))?;
            ensure(s.u.max_abs_coeff() == 0.0, || "u left zero sector".into())?;
        }
    }
    Ok(())
}

fn realness() -> Check {
    let g = TorusGrid::default();
    let c = 1024.0;
    let params = ModelParams::new(c, g).map_err(|e| e.to_string())?;
    let data = benchmark_initial_data(g, c);
    for scheme in [Scheme::Uaosc1, Scheme::Uaosc2] {
        let s = simulate(scheme, &params, &data, 1e-3, 200, Uaosc2Options::default())
            .map_err(|e| e.to_string())?;
        let im = s.n.max_imag_sample().max(s.ndot.max_imag_sample());
        ensure(im < 1e-10, || format!("{scheme}: imaginary part {im:e}"))?;
    }
    Ok(())
}

fn order() -> Check {
    let g = TorusGrid::default();
    let params = ModelParams::new(1.0, g).map_err(|e| e.to_string())?;
    let data = benchmark_initial_data(g, 1.0);
    let t = 0.25;
    for (scheme, lo, hi) in [(Scheme::Uaosc1, 1.6, 2.5), (Scheme::Uaosc2, 3.0, 5.2)] {
        let run = |steps: usize| {
            simulate(scheme, &params, &data, t / steps as f64, steps, Uaosc2Options::default())
                .map_err(|e| e.to_string())
        };
        let reference = run(1024)?;
        let e = |steps| -> std::result::Result<f64, String> {
            let (ez, en, _) = state_errors(&run(steps)?, &reference).map_err(|e| e.to_string())?;
            Ok(ez + en)
        };
        let ratio = e(8)? / e(16)?;
        ensure((lo..=hi).contains(&ratio), || format!("{scheme}: error ratio {ratio:.3}"))?;
    }
    Ok(())
}

/// Runs every suite, printing one line each; true when all pass.
pub fn run_all(out: &mut dyn Write) -> bool {
    type Suite = (&'static str, fn() -> Check);
    let suites: [Suite; 5] = [
        ("spectral", spectral),
        ("kernels", kernels),
        ("free-wave", free_wave),
        ("realness", realness),
        ("order", order),
    ];
    let mut all = true;
    for (name, f) in suites {
        match f() {
            Ok(()) => {
                let _ = writeln!(out, "PASS {name}");
            }
            Err(msg) => {
                all = false;
                let _ = writeln!(out, "FAIL {name}: {msg}");
            }
        }
    }
    all
}
