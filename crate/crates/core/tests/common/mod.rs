//! Independent reference code for the integration tests: direct O(N^2)
//! transforms and straight-line transcriptions of the two schemes on plain
//! coefficient vectors.

#![allow(dead_code)]

use std::f64::consts::PI;

use kgz::Complex64;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn modes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 })
        .collect()
}

/// `f_m = (1/N) sum_j f_j exp(-i m x_j)` on `[0, 2pi)` by direct summation.
pub fn dft(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let ks = modes(n);
    ks.iter()
        .map(|&k| {
            samples
                .iter()
                .enumerate()
                .map(|(j, f)| f * Complex64::from_polar(1.0, -k * 2.0 * PI * j as f64 / n as f64))
                .sum::<Complex64>()
                / n as f64
        })
        .collect()
}

pub fn idft(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let ks = modes(n);
    (0..n)
        .map(|j| {
            let x = 2.0 * PI * j as f64 / n as f64;
            coeffs
                .iter()
                .zip(&ks)
                .map(|(c, &k)| c * Complex64::from_polar(1.0, k * x))
                .sum()
        })
        .collect()
}

type V = Vec<Complex64>;

fn prod(a: &V, b: &V) -> V {
    let (pa, pb) = (idft(a), idft(b));
    dft(&pa.iter().zip(&pb).map(|(x, y)| x * y).collect::<V>())
}

fn conj(a: &V) -> V {
    let p: V = idft(a).iter().map(|v| v.conj()).collect();
    dft(&p)
}

fn re_part(a: &V) -> V {
    let p: V = idft(a).iter().map(|v| Complex64::new(v.re, 0.0)).collect();
    dft(&p)
}

fn add(a: &V, b: &V) -> V {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sym(ks: &[f64], f: impl Fn(f64) -> Complex64) -> V {
    ks.iter().map(|&k| f(k)).collect()
}

fn mul(m: &V, a: &V) -> V {
    m.iter().zip(a).map(|(x, y)| x * y).collect()
}

fn scal(s: Complex64, a: &V) -> V {
    a.iter().map(|v| s * v).collect()
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|v| v as f64).product()
}

/// `sum_j z^j / (j + p)!` for small arguments, the closed form otherwise.
pub fn phi_ref(p: u32, z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        (0..40).map(|j| z.powu(j) / fact(j + p)).sum()
    } else {
        match p {
            0 => z.exp(),
            1 => (z.exp() - 1.0) / z,
            2 => ((z.exp() - 1.0) / z - 1.0) / z,
            _ => unreachable!(),
        }
    }
}

/// `int_0^1 s e^{sz} ds`.
pub fn psi2_ref(z: Complex64) -> Complex64 {
    if z.norm() < 0.5 {
        (0..40).map(|j| z.powu(j) * (j + 1) as f64 / fact(j + 2)).sum()
    } else {
        (z.exp() - (z.exp() - 1.0) / z) / z
    }
}

/// `phi1[a, b]`: the quotient when the points are apart, otherwise
/// `int_0^1 phi1'(b + t (a - b)) dt` by 8-point Gauss-Legendre, with
/// `phi1' = psi2`.
pub fn dd_phi1_ref(a: Complex64, b: Complex64) -> Complex64 {
    if (a - b).norm() > 1e-3 {
        return (phi_ref(1, a) - phi_ref(1, b)) / (a - b);
    }
    const X: [f64; 4] = [0.1834346424956498, 0.525532409916329, 0.7966664774136267, 0.9602898564975363];
    const W: [f64; 4] = [0.362683783378362, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in X.iter().zip(W) {
        for t in [0.5 * (1.0 + x), 0.5 * (1.0 - x)] {
            acc += 0.5 * w * psi2_ref(b + t * (a - b));
        }
    }
    acc
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.sin() / x
    }
}

#[derive(Clone, Debug)]
pub struct RefState {
    pub u: V,
    pub g: V,
    pub n: V,
    pub nd: V,
    pub s: V,
}

fn n_update(c: f64, tau: f64, ks: &[f64], st: &RefState, ub: &V) -> V {
    let (u, n, nd) = (&st.u, &st.n, &st.nd);
    let uu = prod(u, ub);
    let u2 = prod(u, u);
    let ub2 = prod(ub, ub);
    let p2 = phi_ref(2, 2.0 * c * c * tau * I);
    let p2m = phi_ref(2, -2.0 * c * c * tau * I);
    let quad: V = (0..ks.len()).map(|m| uu[m] + p2 * u2[m] + p2m * ub2[m]).collect();
    let out: V = (0..ks.len())
        .map(|m| {
            let k = ks[m].abs();
            (tau * k).cos() * n[m] + tau * sinc(tau * k) * nd[m]
                - tau * tau / 4.0 * sinc(tau * k) * ks[m] * ks[m] * quad[m]
        })
        .collect();
    re_part(&out)
}

/// One step of the first-order scheme, transcribed line by line.
pub fn ref_step1(c: f64, tau: f64, st: &RefState) -> RefState {
    let ks = modes(st.u.len());
    let bsq = |k: f64| k * k + c * c;
    let om = |k: f64| c * bsq(k).sqrt();
    let e = sym(&ks, |k| Complex64::from_polar(1.0, tau * om(k)));
    let (u, n, nd) = (&st.u, &st.n, &st.nd);
    let ub = conj(u);
    let wu = mul(&sym(&ks, |k| om(k).into()), u);
    let wub = mul(&sym(&ks, |k| om(k).into()), &ub);
    let t1 = add(&prod(nd, u), &scal(I, &prod(n, &wu)));
    let t2 = add(&prod(nd, &ub), &scal(-I, &prod(n, &wub)));
    let g_next: V = (0..ks.len())
        .map(|m| {
            let k = ks[m];
            let pre = 0.5 * tau * I * e[m] / bsq(k);
            e[m] * st.g[m]
                + pre * phi_ref(1, -0.5 * tau * I * k * k) * t1[m]
                + pre * phi_ref(1, -tau * I * (om(k) + c * c)) * t2[m]
        })
        .collect();
    let n_next = n_update(c, tau, &ks, st, &ub);
    let uu = prod(u, &ub);
    let u2 = prod(u, u);
    let ub2 = prod(&ub, &ub);
    let p1 = phi_ref(1, 2.0 * c * c * tau * I);
    let p1m = phi_ref(1, -2.0 * c * c * tau * I);
    let nd_next: V = (0..ks.len())
        .map(|m| {
            let k = ks[m].abs();
            -k * (tau * k).sin() * n[m] + (tau * k).cos() * nd[m]
                - tau / 4.0 * (tau * k).cos() * ks[m] * ks[m]
                    * (2.0 * uu[m] + p1 * u2[m] + p1m * ub2[m])
        })
        .collect();
    let nd_next = re_part(&nd_next);
    let s_next: V = (0..ks.len())
        .map(|m| st.s[m] - I * (e[m] - 1.0) * st.g[m])
        .collect();
    let re2 = add(&s_next, &conj(&s_next));
    let corr = prod(&n_next, &re2);
    let u_next: V = (0..ks.len())
        .map(|m| -I * g_next[m] - 0.5 / bsq(ks[m]) * corr[m])
        .collect();
    RefState {
        u: u_next,
        g: g_next,
        n: n_next,
        nd: nd_next,
        s: s_next,
    }
}

/// One step of the second-order scheme, transcribed line by line.
pub fn ref_step2(c: f64, tau: f64, u0: &V, st: &RefState) -> RefState {
    let ks = modes(st.u.len());
    let len = ks.len();
    let c2 = c * c;
    let b = |k: f64| (k * k + c2).sqrt();
    let om = |k: f64| c * b(k);
    let a = |k: f64| om(k) - c2 + 0.0 * k; // plain form; fine at c <= 10
    let w = |k: f64| om(k) + c2;
    let e = sym(&ks, |k| Complex64::from_polar(1.0, tau * om(k)));
    let (u, n, nd) = (&st.u, &st.n, &st.nd);
    let ub = conj(u);
    let f = mul(&sym(&ks, |k| om(k).into()), &st.g);
    let fb = conj(&f);
    let psi = sym(&ks, |k| sinc(0.5 * tau * k * k).into());
    let psin = mul(&psi, n);
    let aeff = sym(&ks, |k| a(k) * phi_ref(1, tau * I * a(k)));

    let re2 = add(u, &ub);
    let sq = prod(&re2, &re2);
    let inner: V = (0..len).map(|m| n[m] + 0.25 * sq[m]).collect();
    let lap_inner: V = (0..len).map(|m| -ks[m] * ks[m] * inner[m]).collect();
    let au = mul(&aeff, u);
    let iau_f: V = (0..len).map(|m| I * au[m] + f[m]).collect();
    let af = mul(&aeff, &f);
    let i1 = prod(u, &lap_inner);
    let i2 = prod(nd, &iau_f);
    let i3 = prod(n, &af);
    let corr: V = (0..len).map(|m| i1[m] + i2[m] + I * i3[m]).collect();
    let corr_b = conj(&corr);

    let wu = mul(&sym(&ks, |k| om(k).into()), u);
    let wub = mul(&sym(&ks, |k| om(k).into()), &ub);
    let nwu = prod(n, &wu);
    let nwub = prod(n, &wub);
    let bracket: V = (0..len)
        .map(|m| {
            let k = ks[m];
            let q1 = dd_phi1_ref(tau * I * a(k), -2.0 * c2 * tau * I);
            (-psi2_ref(-tau * I * a(k)) + q1) * nwu[m]
                + (-psi2_ref(-tau * I * w(k)) + phi_ref(2, -tau * I * w(k))) * nwub[m]
        })
        .collect();
    let cb: V = (0..len).map(|m| c / b(ks[m]) * bracket[m]).collect();
    let bterm = prod(n, &cb);
    let p_a = add(&prod(nd, u), &prod(&psin, &f));
    let p_w = add(&prod(nd, &ub), &prod(&psin, &fb));
    let g_next: V = (0..len)
        .map(|m| {
            let k = ks[m];
            let inside = phi_ref(1, -tau * I * a(k)) * p_a[m]
                + phi_ref(1, -tau * I * w(k)) * p_w[m]
                + tau * psi[m] * psi2_ref(-tau * I * a(k)) * corr[m]
                + tau * psi2_ref(-tau * I * w(k)) * corr_b[m]
                + 0.5 * tau * psi[m] * bterm[m];
            e[m] * st.g[m] + 0.5 * tau * I * e[m] / (b(k) * b(k)) * inside
        })
        .collect();

    let n_next = n_update(c, tau, &ks, st, &ub);

    let nu = prod(n, u);
    let nub = prod(n, &ub);
    let cnu: V = (0..len).map(|m| c / b(ks[m]) * nu[m]).collect();
    let qnub: V = (0..len)
        .map(|m| c / b(ks[m]) * dd_phi1_ref(-tau * I * a(ks[m]), 2.0 * c2 * tau * I) * nub[m])
        .collect();
    let p2nub: V = (0..len)
        .map(|m| c / b(ks[m]) * phi_ref(2, -tau * I * w(ks[m])) * nub[m])
        .collect();
    let ps = psi2_ref(2.0 * c2 * tau * I);
    let j1a = prod(u, &cnu);
    let j1b = prod(u, &qnub);
    let j2a = prod(&ub, &cnu);
    let j2b = prod(&ub, &p2nub);
    let j1: V = (0..len)
        .map(|m| sinc(tau * ks[m].abs()) * (I * tau * ps * j1a[m] + I * tau * j1b[m]))
        .collect();
    let j2: V = (0..len)
        .map(|m| sinc(tau * ks[m].abs()) * (0.5 * I * tau * j2a[m] + I * tau * j2b[m]))
        .collect();
    let pa = sym(&ks, |k| phi_ref(1, tau * I * a(k)) - 1.0);
    let pma = sym(&ks, |k| phi_ref(1, -tau * I * a(k)));
    let ppw = sym(&ks, |k| phi_ref(1, tau * I * w(k)));
    let pmw = sym(&ks, |k| phi_ref(1, -tau * I * w(k)));
    let t_a = prod(&ub, &mul(&pa, u));
    let t_b = prod(u, &mul(&pma, &ub));
    let t_c = prod(u, u);
    let t_d = prod(u, &mul(&ppw, u));
    let t_e = prod(&ub, &ub);
    let t_f = prod(&ub, &mul(&pmw, &ub));
    let (j1c, j2c) = (conj(&j1), conj(&j2));
    let p1 = phi_ref(1, 2.0 * c2 * tau * I);
    let p1m = phi_ref(1, -2.0 * c2 * tau * I);
    let nd_next: V = (0..len)
        .map(|m| {
            let k = ks[m].abs();
            let brace = 2.0 * t_a[m] + 2.0 * t_b[m] - p1 * t_c[m] + 2.0 * t_d[m] - p1m * t_e[m]
                + 2.0 * t_f[m]
                + j1[m]
                + j1c[m]
                + j2[m]
                + j2c[m];
            -k * (tau * k).sin() * n[m] + (tau * k).cos() * nd[m] - tau / 4.0 * k * k * brace
        })
        .collect();
    let nd_next = re_part(&nd_next);

    let t1 = add(&prod(nd, u), &scal(I, &nwu));
    let t2 = add(&prod(nd, &ub), &scal(-I, &nwub));
    let ps1 = psi2_ref(tau * c2 * I);
    let s_next: V = (0..len)
        .map(|m| {
            let k = ks[m];
            st.s[m] - I * (e[m] - 1.0) * st.g[m]
                + 0.5 * I * tau * tau * c / b(k) * ps1 * phi_ref(1, -0.5 * tau * I * k * k) * t1[m]
                + 0.5 * I * tau * tau * c / b(k)
                    * dd_phi1_ref(tau * I * om(k), -c2 * tau * I)
                    * t2[m]
        })
        .collect();
    let su = add(u0, &s_next);
    let corr_u = prod(&n_next, &add(&su, &conj(&su)));
    let u_next: V = (0..len)
        .map(|m| -I * g_next[m] - 0.5 / (b(ks[m]) * b(ks[m])) * corr_u[m])
        .collect();
    RefState {
        u: u_next,
        g: g_next,
        n: n_next,
        nd: nd_next,
        s: s_next,
    }
}

/// Benchmark data and the twisted initial state, computed mode by mode.
pub fn ref_initial(c: f64, n_pts: usize, order: u32) -> (RefState, V) {
    let xs: Vec<f64> = (0..n_pts).map(|j| 2.0 * PI * j as f64 / n_pts as f64).collect();
    let real = |f: &dyn Fn(f64) -> f64| -> V { dft(&xs.iter().map(|&x| Complex64::new(f(x), 0.0)).collect::<V>()) };
    let z = real(&|x| 0.25 * x.sin() / (2.0 - (2.0 * x).cos()));
    let n = real(&|x| x.sin() * x.cos() / (2.0 - (2.0 * x).sin()));
    let nd = real(&|x| 0.5 * x.sin());
    let ks = modes(n_pts);
    let u: V = (0..n_pts)
        .map(|m| z[m] - I * c * c * z[m] / (c * (ks[m] * ks[m] + c * c).sqrt()))
        .collect();
    let re2 = add(&u, &conj(&u));
    let pr = prod(&n, &re2);
    let g: V = (0..n_pts)
        .map(|m| I * u[m] + 0.5 * I * pr[m] / (ks[m] * ks[m] + c * c))
        .collect();
    let s = if order == 1 { u.clone() } else { vec![Complex64::new(0.0, 0.0); n_pts] };
    (
        RefState {
            u: u.clone(),
            g,
            n,
            nd,
            s,
        },
        u,
    )
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
