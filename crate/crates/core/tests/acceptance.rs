//! Acceptance run. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any criterion fails.
//!
//! `SHEARWAVE_ACCEPTANCE=quick` shortens the time-marching runs to t ≤ 200
//! (model-vs-full bound only); the hump and peak-time checks are then skipped.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use shearwave::coeffs::*;
use shearwave::dno::{dno_apply, dno_term};
use shearwave::euler::{energy_full, eta_zeta_from_z, zeta_to_xi};
use shearwave::harness::*;
use shearwave::normalform::*;
use shearwave::{CanonicalState, DnoExpansion, EulerStepper, PhysicalParams, RealField, SurfaceState, Symbol, C64};

type Outcome = Result<String, String>;
type Criterion = fn(&mut Ctx) -> Outcome;

struct Ctx {
    quick: bool,
    compare: BTreeMap<i32, RunOutput>,
    dysthe: Option<(RunOutput, ScenarioConfig)>,
}

fn base(extra: &[(&str, &str)]) -> ScenarioConfig {
    let mut pairs = vec![("k0", "10"), ("B0", "0.002"), ("g", "1"), ("lambda_pert", "1")];
    pairs.extend_from_slice(extra);
    ScenarioConfig::from_pairs(pairs).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

impl Ctx {
    fn t_end(&self) -> f64 {
        if self.quick {
            200.0
        } else {
            1000.0
        }
    }

    /// Compare runs are shared by criteria 4 and 5. The full solver runs on
    /// 256 nodes: on 512 nodes the unfiltered expansion goes unstable at the
    /// top of the spectrum (γ = −2, t ≈ 372) before the instability peaks.
    fn compare(&mut self, gamma: i32) -> &RunOutput {
        let t_end = self.t_end();
        self.compare.entry(gamma).or_insert_with(|| {
            let g = gamma.to_string();
            let t = t_end.to_string();
            let cfg = base(&[
                ("gamma", &g),
                ("n_nodes", "256"),
                ("dt", "0.005"),
                ("t_end", &t),
                ("output_interval", "1"),
            ]);
            run_compare(&cfg).unwrap_or_else(|e| panic!("compare gamma={gamma}: {e}"))
        })
    }
}

fn c1_stability_threshold(_: &mut Ctx) -> Outcome {
    let cfg = base(&[
        ("kind", "stability-map"),
        ("gammas", "-2,-1,0,1,2,3,4"),
        ("lambda_max", "20"),
        ("lambda_step", "0.01"),
    ]);
    let rows = run_stability_map(&cfg).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    let mut ok = true;
    for gamma in [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0] {
        let max = rows
            .iter()
            .filter(|r| r.gamma == gamma)
            .map(|r| r.gamma_factor)
            .fold(f64::NEG_INFINITY, f64::max);
        ok &= if gamma < 3.5 { max > 0.0 } else { max <= 0.0 };
        detail.push(format!("γ={gamma}: max Γ={max:.3e}"));
    }
    check(ok, detail.join(", "))
}

fn c2_steepness(_: &mut Ctx) -> Outcome {
    let p = base(&[("gamma", "0")]).params().map_err(|e| e.to_string())?;
    check(
        (p.epsilon - 0.050).abs() <= 0.001,
        format!("ε = k0·A0 = {:.5}", p.epsilon),
    )
}

/// Shared by criteria 3 and 6.
fn dysthe_run(ctx: &mut Ctx) -> &(RunOutput, ScenarioConfig) {
    let t = if ctx.quick { "400" } else { "1000" };
    ctx.dysthe.get_or_insert_with(|| {
        let cfg = base(&[
            ("kind", "dysthe"),
            ("gamma", "-1"),
            ("n_nodes", "512"),
            ("dt", "0.005"),
            ("t_end", t),
            ("output_interval", "1"),
            ("reconstruction", "partial"),
        ]);
        let out = run_dysthe(&cfg).unwrap_or_else(|e| panic!("dysthe gamma=-1: {e}"));
        (out, cfg)
    })
}

fn c3_growth_rate(ctx: &mut Ctx) -> Outcome {
    let (out, cfg) = dysthe_run(ctx);
    let p = cfg.params().map_err(|e| e.to_string())?;
    let sigma = bf_growth_rate(1.0, cfg.b0(&p), &p).map_err(|e| e.to_string())?.sigma;
    let fit = measure_growth(&growth_samples(&out.records));
    if !fit.found {
        return Err(format!("no growth window (σ = {sigma:.4e})"));
    }
    let r = (fit.rate - sigma) / sigma;
    check(
        r.abs() < 0.1,
        format!(
            "fitted {:.4e} vs √α {:.4e} ({:+.1}%), window [{}, {}]",
            fit.rate,
            sigma,
            100.0 * r,
            fit.window.0,
            fit.window.1
        ),
    )
}

/// Median error over `[t0, t1]`.
fn median_error(out: &RunOutput, t0: f64, t1: f64) -> f64 {
    let mut v: Vec<f64> = out
        .records
        .iter()
        .filter(|r| r.t >= t0 && r.t <= t1)
        .map(|r| r.l2_rel_err)
        .collect();
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn c4_error_envelope(ctx: &mut Ctx) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for gamma in [-2, 0, 2] {
        let out = ctx.compare(gamma);
        let max = out.records.iter().map(|r| r.l2_rel_err).fold(0.0, f64::max);
        ok &= max < 1.0;
        detail.push(format!("γ={gamma}: max err {max:.3}"));
    }
    if ctx.quick {
        detail.push("hump skipped (quick)".into());
        return check(ok, detail.join(", "));
    }
    let out = ctx.compare(-2);
    let plateau = median_error(out, 100.0, 200.0);
    let hump = median_error(out, 490.0, 510.0);
    // A hump, not a ramp: the error recedes once the instability saturates.
    let top = out
        .records
        .iter()
        .filter(|r| r.t >= 400.0 && r.t <= 600.0)
        .map(|r| r.l2_rel_err)
        .fold(0.0, f64::max);
    let after = median_error(out, 690.0, 710.0);
    ok &= hump >= 2.0 * plateau && after < top;
    detail.push(format!(
        "γ=-2 plateau {plateau:.3e}, t≈500 {hump:.3e} (×{:.1}), hump top {top:.3e}, t≈700 {after:.3e}",
        hump / plateau
    ));
    check(ok, detail.join(", "))
}

fn c5_peak_times(ctx: &mut Ctx) -> Outcome {
    if ctx.quick {
        return Ok("skipped (quick)".into());
    }
    let mut detail = Vec::new();
    let mut ok = true;
    for (gamma, want, tol) in [(-2, 500.0, 50.0), (-1, 680.0, 70.0), (0, 940.0, 90.0)] {
        let out = ctx.compare(gamma);
        let peak = out
            .records
            .iter()
            .max_by(|a, b| a.max_eta.total_cmp(&b.max_eta))
            .unwrap();
        ok &= (peak.t - want).abs() <= tol;
        detail.push(format!("γ={gamma}: t={} (want {want}±{tol})", peak.t));
    }
    check(ok, detail.join(", "))
}

/// Relative energy drift of a steep single mode on 64 nodes after t = 4,
/// where time truncation dominates roundoff.
fn steep_drift(dt: f64) -> f64 {
    let g = grid(64);
    let p = PhysicalParams::new(1.0, 1.0, 10.0, 0.05).unwrap();
    let dno = DnoExpansion::default();
    let mut z = vec![C64::new(0.0, 0.0); 64];
    z[2] = C64::new(0.05, 0.0);
    let (eta, zeta) = eta_zeta_from_z(&g, &p, &z);
    let s = zeta_to_xi(
        &CanonicalState {
            eta: RealField::from_spectrum(g.clone(), &eta),
            zeta: RealField::from_spectrum(g.clone(), &zeta),
            time: 0.0,
        },
        &p,
    );
    let h0 = energy_full(&s, &p, &dno).unwrap();
    let mut st = EulerStepper::new(g.clone(), p, dno, dt).unwrap();
    let mut sp = s.to_spectral();
    for _ in 0..(4.0 / dt).round() as usize {
        st.step_spectral(&mut sp).unwrap();
    }
    assert_eq!(sp.volume(), 0.0);
    rel(
        energy_full(&SurfaceState::from_spectral(&g, &sp), &p, &dno).unwrap(),
        h0,
    )
}

fn c6_conservation(ctx: &mut Ctx) -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for gamma in ["-2", "0", "2"] {
        let cfg = base(&[("kind", "energy-check"), ("gamma", gamma), ("t_end", "10")]);
        let r = energy_check(&cfg).map_err(|e| e.to_string())?;
        ok &= r.h_drift <= 1e-6 && r.i_drift <= 1e-6 && r.volume_drift == 0.0;
        detail.push(format!(
            "γ={gamma}: H {:.1e}, I {:.1e}, volume drift {}",
            r.h_drift, r.i_drift, r.volume_drift
        ));
    }
    // At the defaults both drifts sit at roundoff; the order is read off a steep wave.
    let order = (steep_drift(0.1) / steep_drift(0.05)).log2();
    ok &= order > 3.5;
    detail.push(format!("steep-wave drift order {order:.2}, zero-mean volume 0"));
    let (out, _) = dysthe_run(ctx);
    let (m0, h0) = (out.records[0].m, out.records[0].h_reduced);
    let dm = out.records.iter().map(|r| rel(r.m, m0)).fold(0.0, f64::max);
    let dh = out.records.iter().map(|r| rel(r.h_reduced, h0)).fold(0.0, f64::max);
    ok &= dm <= 1e-10 && dh <= 1e-6;
    detail.push(format!(
        "Dysthe to t={}: M {dm:.1e}, H {dh:.1e}",
        out.records.last().unwrap().t
    ));
    check(ok, detail.join("; "))
}

fn nf_params(gamma: f64) -> PhysicalParams {
    PhysicalParams::new(1.0, gamma, 4.0, 0.05).unwrap()
}

fn nf_state(n: usize, kmax: usize, amp: f64, seed: u64) -> CanonicalState {
    let g = grid(n);
    let mut r = rng(seed);
    CanonicalState {
        eta: random_field(&g, kmax, amp, &mut r),
        zeta: random_field(&g, kmax, amp, &mut r),
        time: 0.0,
    }
}

fn c7_normal_form(_: &mut Ctx) -> Outcome {
    let gammas = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let (mut coh, mut orc, mut cons) = (0.0f64, 0.0f64, 0.0f64);
    for (i, gamma) in gammas.into_iter().enumerate() {
        let p = nf_params(gamma);
        let c = nf_state(32, 5, 0.02, 100 + i as u64);
        let g = c.eta.grid().clone();
        let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
        let (e, z) = (c.eta.spectrum(), c.zeta.spectrum());
        let h2_at = |s: f64| {
            let (a, b) = flow.integrate(&e, &z, 0.0, s, s.abs() / 4.0).unwrap();
            let st = CanonicalState {
                eta: RealField::from_spectrum(g.clone(), &a),
                zeta: RealField::from_spectrum(g.clone(), &b),
                time: 0.0,
            };
            h2(&st, &p)
        };
        let d = |h: f64| (h2_at(h) - h2_at(-h)) / (2.0 * h);
        let deriv = (4.0 * d(0.05) - d(0.1)) / 3.0;
        coh = coh.max(rel(deriv, h3_spectral(&c, &p).unwrap()));

        for (n, kmax) in [(16, 4), (32, 7), (64, 12)] {
            if gamma == 0.0 {
                continue;
            }
            let f = functionals(&nf_state(n, kmax, 0.3, 7 * n as u64 + i as u64), &p).unwrap();
            orc = orc.max(rel(f.k3_physical, f.k3_spectral));
        }

        let c = nf_state(64, 8, 0.02, 40 + i as u64);
        let g = c.eta.grid().clone();
        let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
        let k0 = k3_physical(&c, &p);
        let (e, z) = flow
            .integrate(&c.eta.spectrum(), &c.zeta.spectrum(), 0.0, -1.0, 0.005)
            .unwrap();
        let st = CanonicalState {
            eta: RealField::from_spectrum(g.clone(), &e),
            zeta: RealField::from_spectrum(g, &z),
            time: 0.0,
        };
        cons = cons.max(rel(k3_physical(&st, &p), k0));
    }

    // γ = 0: the Hilbert transform of η follows ∂ₛv = −v∂ₓv.
    let p = nf_params(0.0);
    let c = nf_state(64, 4, 0.05, 5);
    let g = c.eta.grid().clone();
    let flow = NormalFormFlow::new(g.clone(), &p).unwrap();
    let (e, _) = flow
        .integrate(&c.eta.spectrum(), &c.zeta.spectrum(), 0.0, -1.0, 0.01)
        .unwrap();
    let flowed = g.applied(&e, &Symbol::Hilbert);
    let burgers = |v: &[C64]| -> Vec<C64> {
        let sq = g.product_real(v, v);
        g.applied(&sq, &Symbol::Dx).iter().map(|x| -0.5 * x).collect()
    };
    let add = |x: &[C64], s: f64, y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(a, b)| a + s * b).collect() };
    let mut v = g.applied(&c.eta.spectrum(), &Symbol::Hilbert);
    let start = v.clone();
    let h = -0.01;
    for _ in 0..100 {
        let k1 = burgers(&v);
        let k2 = burgers(&add(&v, 0.5 * h, &k1));
        let k3 = burgers(&add(&v, 0.5 * h, &k2));
        let k4 = burgers(&add(&v, h, &k3));
        for j in 0..v.len() {
            v[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    let burg = spec_max_diff(&flowed, &v) / spec_max_diff(&v, &start);

    check(
        coh < 1e-6 && orc < 1e-9 && cons < 1e-8 && burg < 1e-12,
        format!("cohomological {coh:.1e}, K3 oracle {orc:.1e}, K3 drift {cons:.1e}, Burgers {burg:.1e}"),
    )
}

fn c8_coefficients(_: &mut Ctx) -> Outcome {
    const LAMBDA: [f64; 4] = [1.0, 2.0, 1.5, 1.5];
    let sum = LAMBDA[0] + LAMBDA[1];
    let gap = [(0, 2), (1, 2), (0, 3), (1, 3)]
        .iter()
        .map(|&(i, j)| (LAMBDA[i] - LAMBDA[j]).abs())
        .sum::<f64>()
        / 4.0;
    let mut worst = f64::INFINITY;
    for gamma in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let p = PhysicalParams::new(1.0, gamma, 10.0, 0.05).unwrap();
        let c = compute_coefficients(&p).unwrap();
        let q = |e: f64| LAMBDA.map(|l| p.k0 + e * l);
        let residuals: [Box<dyn Fn(f64) -> f64>; 4] = [
            Box::new(|e| symmetrize4(q(e), |a, b, x, y| t1(a, b, x, y, &p)).unwrap() - c.c0l - e * c.c0r * sum),
            Box::new(|e| symmetrize4(q(e), |a, b, x, y| t2_1(a, b, x, y, &p)).unwrap() - c.c1l - e * c.c1r * sum),
            Box::new(|e| symmetrize4(q(e), |a, b, x, y| t2_2(a, b, x, y, &p)).unwrap() - c.c2l - e * c.c2r * sum),
            Box::new(|e| {
                symmetrize4(q(e), |a, b, x, y| t2_3(a, b, x, y, &p)).unwrap()
                    - c.c3l
                    - e * c.c3r1 * sum
                    - e * c.c3r2 * gap
            }),
        ];
        for r in &residuals {
            let v: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&e| r(e).abs()).collect();
            worst = worst.min((v[0] / v[1]).min(v[1] / v[2]));
        }
    }
    let mut limit = 0.0f64;
    for k0 in [1.0, 4.0, 10.0, 25.0] {
        let c = compute_coefficients(&PhysicalParams::new(1.0, 0.0, k0, 0.05).unwrap()).unwrap();
        limit = limit.max(rel(c.beta0, k0.powi(3))).max(rel(c.beta3, k0 * k0));
    }
    check(
        worst >= 80.0 && limit <= 1e-12,
        format!("smallest residual shrink per decade {worst:.1} (O(ε²) needs ≥ 80), γ=0 limits {limit:.1e}"),
    )
}

fn c9_dno(_: &mut Ctx) -> Outcome {
    let g = grid(64);
    let dno = DnoExpansion::default();
    let mut r = rng(7);

    let mut recursion = 0.0f64;
    for _ in 0..20 {
        let eta = random_field(&g, 4, 0.3, &mut r);
        let xi = random_field(&g, 4, 1.0, &mut r);
        let explicit = dno.terms_spectral(&g, &eta.spectrum(), &xi.spectrum(), 2);
        let rec = dno.recursive_terms_spectral(&g, &eta.spectrum(), &xi.spectrum(), 2);
        let mut scale = eta
            .dealiased_product(&eta)
            .unwrap()
            .dealiased_product(&xi.apply_symbol(&Symbol::AbsD).unwrap())
            .unwrap()
            .spectrum();
        g.apply(&mut scale, &Symbol::AbsD);
        g.apply(&mut scale, &Symbol::AbsD);
        for j in 1..=2 {
            recursion = recursion.max(spec_max_diff(&explicit[j], &rec[j]) / spec_max(&scale));
        }
    }

    let mut adjoint = 0.0f64;
    for _ in 0..20 {
        let eta = random_field(&g, 4, 0.2, &mut r);
        let x1 = random_field(&g, 4, 1.0, &mut r);
        let x2 = random_field(&g, 4, 1.0, &mut r);
        let t1 = dno.terms_spectral(&g, &eta.spectrum(), &x1.spectrum(), 6);
        let t2 = dno.terms_spectral(&g, &eta.spectrum(), &x2.spectrum(), 6);
        for j in 0..=6 {
            let (a, b) = (g.inner(&x1.spectrum(), &t2[j]), g.inner(&x2.spectrum(), &t1[j]));
            let scale = (g.inner(&x1.spectrum(), &x1.spectrum()) * g.inner(&t2[j], &t2[j]))
                .sqrt()
                .max((g.inner(&x2.spectrum(), &x2.spectrum()) * g.inner(&t1[j], &t1[j])).sqrt());
            adjoint = adjoint.max((a - b).abs() / scale);
        }
    }

    let g32 = grid(32);
    let mut homog = 0.0f64;
    for _ in 0..10 {
        let eta = random_field(&g32, 3, 0.2, &mut r);
        let xi = random_field(&g32, 3, 1.0, &mut r);
        for t in [2.0, -1.0] {
            let scaled = RealField::new(g32.clone(), eta.values().iter().map(|v| t * v).collect()).unwrap();
            for j in 0..=6 {
                let a = dno_term(&dno, j, &scaled, &xi).unwrap();
                let b = dno_term(&dno, j, &eta, &xi).unwrap();
                let want: Vec<f64> = b.values().iter().map(|v| t.powi(j as i32) * v).collect();
                let scale = (3.0 * t.abs() * eta.max_abs()).powi(j as i32) * 3.0 * xi.max_abs();
                homog = homog.max(max_diff(a.values(), &want) / scale);
            }
        }
    }

    let flat = {
        let xi = RealField::from_fn(g32.clone(), |x| (3.0 * x).sin());
        let out = dno_apply(&dno, &RealField::zeros(g32.clone()), &xi).unwrap();
        let want: Vec<f64> = g32.nodes().iter().map(|x| 3.0 * (3.0 * x).sin()).collect();
        max_diff(out.values(), &want)
    };

    check(
        recursion < 1e-12 && adjoint <= 1e-10 && homog <= 1e-10 && flat < 1e-13,
        format!("recursion {recursion:.1e}, self-adjoint {adjoint:.1e}, homogeneity {homog:.1e}, flat {flat:.1e}"),
    )
}

fn main() -> ExitCode {
    let quick = std::env::var("SHEARWAVE_ACCEPTANCE").is_ok_and(|v| v == "quick");
    let mut ctx = Ctx {
        quick,
        compare: BTreeMap::new(),
        dysthe: None,
    };
    let criteria: [(&str, Criterion); 9] = [
        ("stability threshold", c1_stability_threshold),
        ("steepness", c2_steepness),
        ("growth rate", c3_growth_rate),
        ("model-vs-full error", c4_error_envelope),
        ("time of maximum growth", c5_peak_times),
        ("conservation", c6_conservation),
        ("normal form", c7_normal_form),
        ("coefficient asymptotics", c8_coefficients),
        ("DNO integrity", c9_dno),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut ctx))).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("criterion {} ({name}): PASS [{secs:.0}s] {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.0}s] {d}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
