//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use opstrata::codim::{gap, Projector};
use opstrata::matcore::{
    eigh, expm, gauge_norm, op_norm, ComplexMatrix, GaugeNorm, ToleranceConfig,
};
use opstrata::monotone::{
    make_atomic, make_sqrt, matrix_eval_integral, matrix_eval_spectral, riemann_decay, riemann_sum,
    series_tail_bound, taylor_remainder_bound, taylor_term, MonotoneFunction,
};
use opstrata::pinv::{index_bound, lipschitz_constant, moore_penrose, pinv, wedin_residual};
use opstrata::polar::{
    congruence_witness, isometry_orbit_witness, modulus_map, polar_decompose, polar_factor_map, positive_section,
    trivialize_alpha, trivialize_v, untrivialize_alpha, untrivialize_v, PartialIsometry,
};
use opstrata::random;
use opstrata::strata::{
    act, continuity_report, local_section_sigma, mp_tangent, mp_tangent_fd, stratum_index,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn rand_rank(r: &mut ChaCha8Rng, m: usize, n: usize) -> usize {
    r.gen_range(0..=m.min(n))
}

/// `e^{tX} A e^{−tY}` with `t` halved until `‖· − A‖_g < radius`.
fn curve_point(r: &mut ChaCha8Rng, a: &ComplexMatrix, radius: f64, g: GaugeNorm) -> ComplexMatrix {
    let x = random::direction(r, a.rows(), a.rows(), 1.0);
    let y = random::direction(r, a.cols(), a.cols(), 1.0);
    let mut t = r.gen_range(0.05..1.0);
    loop {
        let b = &(&expm(&x.scale_re(t)) * a) * &expm(&y.scale_re(-t));
        if gauge_norm(&(&b - a), g) < radius {
            return b;
        }
        t *= 0.5;
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = random::rng(101);
    let mut worst: f64 = 0.0;
    let trials = 600;
    for _ in 0..trials {
        let (m, n) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let (ra, rb) = (rand_rank(&mut r, m, n), rand_rank(&mut r, m, n));
        let a = random::with_rank(&mut r, m, n, ra, 0.1, 3.0);
        let b = if r.gen_bool(0.5) {
            random::with_rank(&mut r, m, n, rb, 0.1, 3.0)
        } else {
            &a + &random::direction(&mut r, m, n, 0.1)
        };
        let res = wedin_residual(&a, &b, GaugeNorm::Operator, &tol()).unwrap();
        let scale = 1.0 + op_norm(&pinv(&a, &tol()).unwrap()) + op_norm(&pinv(&b, &tol()).unwrap());
        worst = worst.max(res / scale);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && secs < 5.0,
        format!("{trials} pairs, max residual/(1+‖A†‖+‖B†‖) = {worst:.2e} (≤ 1e-8), {secs:.2}s (< 5s)"),
    )
}

fn criterion_2() -> Outcome {
    let mut r = random::rng(202);
    let mut tested = 0;
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    while tested < 250 {
        let n = r.gen_range(1..=6);
        let m = r.gen_range(1..=6);
        let k = r.gen_range(1..=m.min(n));
        let a = random::with_rank(&mut r, m, n, k, 0.3, 3.0);
        let gamma = moore_penrose(&a, &tol()).unwrap().gamma;
        let frac = r.gen_range(0.05..0.99);
        let b = curve_point(&mut r, &a, frac * gamma, GaugeNorm::Operator);
        let rep = index_bound(&a, &b, &tol()).unwrap();
        if !rep.hypothesis_met {
            continue;
        }
        tested += 1;
        let ratio = rep.actual / rep.bound;
        max_ratio = max_ratio.max(ratio);
        if rep.actual > rep.bound * (1.0 + 1e-9) {
            violations += 1;
        }
    }
    let tight = index_bound(
        &ComplexMatrix::identity(2),
        &ComplexMatrix::real_diag(&[1.0, 0.5]),
        &tol(),
    )
    .unwrap();
    let tight_err = (tight.actual - tight.bound).abs();
    outcome(
        violations == 0 && tight.hypothesis_met && tight_err <= 1e-12,
        format!(
            "{tested} equal-nullity pairs, {violations} violations, max ‖B†‖/bound = {max_ratio:.6}; \
             I₂ vs diag(1,0.5): |‖B†‖ − bound| = {tight_err:.1e}"
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut r = random::rng(303);
    let families = 60;
    let mut consistent = 0;
    let mut expected = 0;
    for i in 0..families {
        let n = r.gen_range(2..=6);
        let k = r.gen_range(1..n);
        let b = random::with_rank(&mut r, n, n, k, 0.5, 2.0);
        let jump = i % 2 == 1;
        let s = r.gen_range(0.5..2.0);
        let seq = if jump {
            random::jump_family(&mut r, &b, 50, s, &tol()).unwrap()
        } else {
            random::in_stratum_family(&mut r, &b, 50, s / 2.0)
        };
        let g = [GaugeNorm::TRACE, GaugeNorm::FROBENIUS, GaugeNorm::Operator][i % 3];
        let rep = continuity_report(&b, &seq, 25, g, &tol()).unwrap();
        if rep.consistent {
            consistent += 1;
        }
        if rep.verdicts.as_array().iter().all(|&v| v == !jump) {
            expected += 1;
        }
    }
    outcome(
        consistent == families,
        format!("{families} families (half jumping), consistent {consistent}/{families}, verdict matches generator {expected}/{families}"),
    )
}

fn criterion_4() -> Outcome {
    let mut r = random::rng(404);
    let gauges = [GaugeNorm::TRACE, GaugeNorm::FROBENIUS, GaugeNorm::Operator];
    let mut violations = 0;
    let mut total = 0;
    let mut max_ratio: f64 = 0.0;
    for g in gauges {
        for _ in 0..210 {
            let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
            let k = r.gen_range(1..=m.min(n));
            let a = random::with_rank(&mut r, m, n, k, 0.3, 3.0);
            let radius = moore_penrose(&a, &tol()).unwrap().gamma / 2.0;
            let b1 = curve_point(&mut r, &a, radius, g);
            let b2 = curve_point(&mut r, &a, radius, g);
            let lip = lipschitz_constant(&a, &tol()).unwrap();
            let lhs = gauge_norm(&(&pinv(&b2, &tol()).unwrap() - &pinv(&b1, &tol()).unwrap()), g);
            let rhs = lip * gauge_norm(&(&b2 - &b1), g);
            total += 1;
            if rhs > 0.0 {
                max_ratio = max_ratio.max(lhs / rhs);
            }
            if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
                violations += 1;
            }
        }
    }
    outcome(violations == 0, format!("{total} pairs over S1/S2/op, {violations} violations, max lhs/rhs = {max_ratio:.3e}"))
}

fn criterion_5() -> Outcome {
    let mut r = random::rng(505);
    let mut worst_sigma: f64 = 0.0;
    let mut worst_pos: f64 = 0.0;
    let mut failures = 0;
    let trials = 120;
    for _ in 0..trials {
        let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let k = r.gen_range(1..=m.min(n));
        let a = random::with_rank(&mut r, m, n, k, 0.3, 3.0);
        let gamma = moore_penrose(&a, &tol()).unwrap().gamma;
        let b = curve_point(&mut r, &a, gamma / 4.0, GaugeNorm::TRACE);
        match local_section_sigma(&a, &b, &tol()) {
            Ok(gk) => worst_sigma = worst_sigma.max(act(&gk, &a).unwrap().dist(&b)),
            Err(_) => failures += 1,
        }

        let d = r.gen_range(1..=6);
        let rc = r.gen_range(1..=d);
        let c = random::psd(&mut r, d, rc, 0.3, 3.0);
        let gc = moore_penrose(&c, &tol()).unwrap().gamma;
        let x = random::direction(&mut r, d, d, 1.0);
        let mut t = 1.0;
        let bp = loop {
            let e = expm(&x.scale_re(t));
            let bp = (&(&e * &c) * &e.adjoint()).hermitian_part();
            if gauge_norm(&(&bp - &c), GaugeNorm::TRACE) < gc / 4.0 {
                break bp;
            }
            t *= 0.5;
        };
        match positive_section(&c, &bp, &tol()) {
            Ok(s) => worst_pos = worst_pos.max((&(&s * &c) * &s.adjoint()).dist(&bp)),
            Err(_) => failures += 1,
        }
    }
    outcome(
        failures == 0 && worst_sigma <= 1e-8 && worst_pos <= 1e-8,
        format!(
            "{trials}+{trials} samples in the γ/4 ball, max ‖σ₁Aσ₂⁻¹ − B‖_F = {worst_sigma:.1e}, \
             max ‖σCσ* − B‖_F = {worst_pos:.1e}, failures {failures}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut r = random::rng(606);
    let mut worst: f64 = 0.0;
    let trials = 120;
    for _ in 0..trials {
        let (m, n) = (r.gen_range(1..=8), r.gen_range(1..=8));
        let k = r.gen_range(1..=m.min(n));
        let b = random::with_rank(&mut r, m, n, k, 0.5, 2.0);
        let x = random::direction(&mut r, m, m, 1.0);
        let y = random::direction(&mut r, n, n, 1.0);
        let v = &(&x * &b) - &(&b * &y);
        let exact = mp_tangent(&b, &v, true, &tol()).unwrap();
        let fd = mp_tangent_fd(&b, &x, &y, 1e-5, &tol()).unwrap();
        worst = worst.max(exact.dist(&fd) / exact.frobenius().max(1e-300));
    }
    outcome(worst <= 1e-6, format!("{trials} random (B, X, Y), max relative error {worst:.2e} (≤ 1e-6)"))
}

fn functions() -> Vec<(&'static str, MonotoneFunction)> {
    vec![
        ("sqrt", make_sqrt()),
        ("λ/(1+λ)", make_atomic(0.5, 0.0, vec![(1.0, 1.0)]).unwrap()),
        ("three-atom", make_atomic(-0.2, 0.3, vec![(0.25, 0.5), (2.0, 1.5), (10.0, 0.1)]).unwrap()),
    ]
}

fn criterion_7() -> Outcome {
    let mut r = random::rng(707);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, f) in functions() {
        for _ in 0..110 {
            let n = r.gen_range(1..=6);
            let rk = r.gen_range(0..=n);
            let c = random::psd(&mut r, n, rk, 0.01, 10.0);
            let a = matrix_eval_spectral(&f, &c, &tol()).unwrap();
            let b = matrix_eval_integral(&f, &c, &tol()).unwrap();
            worst = worst.max(a.dist(&b) / (1.0 + a.frobenius()));
            count += 1;
        }
    }
    let f = make_sqrt();
    let scalar = [0.0, 0.25, 1.0, 4.0, 100.0]
        .iter()
        .map(|&l| (f.scalar_eval_integral(l).unwrap() - f64::sqrt(l)).abs())
        .fold(0.0f64, f64::max);
    outcome(
        worst <= 1e-7 && scalar <= 1e-8,
        format!("{count} PSD matrices × (sqrt, two atomic), max gap/(1+‖f(C)‖_F) = {worst:.1e}; scalar sqrt max error {scalar:.1e}"),
    )
}

/// Successive remainder ratios `R_{m+1}/R_m` for `m = 1..6` and the bound check.
fn remainder_ratios(
    f: &MonotoneFunction,
    c: &ComplexMatrix,
    delta: &ComplexMatrix,
    g: GaugeNorm,
) -> (Vec<f64>, bool) {
    let target = matrix_eval_spectral(f, &(c + delta), &tol()).unwrap();
    let mut partial = matrix_eval_spectral(f, c, &tol()).unwrap();
    let mut rems = Vec::new();
    let mut bounds_ok = true;
    for m in 1..=7 {
        let term = taylor_term(f, c, delta, m, &tol()).unwrap();
        let bound = taylor_remainder_bound(f, c, delta, m, g, &tol()).unwrap();
        bounds_ok &= gauge_norm(&term, g) <= bound * (1.0 + 1e-6);
        partial += &term;
        rems.push(gauge_norm(&(&target - &partial), g));
        bounds_ok &= rems[m - 1] <= series_tail_bound(f, c, delta, m, g, &tol()).unwrap() * (1.0 + 1e-6) + 1e-12;
    }
    (rems.windows(2).map(|w| w[1] / w[0]).collect(), bounds_ok)
}

fn criterion_8() -> Outcome {
    let mut r = random::rng(808);
    let g = GaugeNorm::TRACE;
    let mut two_sided_ok = true;
    let mut bounds_ok = true;
    let mut tight_dev: f64 = 0.0;
    // Single atom at t₀ = 0.05 γ_C and Δ = −ρ γ_C v v* along the bottom eigenvector:
    // the remainders form an exact geometric sequence with ratio ρ/(1 + t₀/γ_C).
    for _ in 0..10 {
        let n = r.gen_range(2..=5);
        let c = random::psd(&mut r, n, n, 0.5, 3.0);
        let e = eigh(&c).unwrap();
        let gamma = e.eigenvalues[0];
        let v = e.q.column_range(0, 1);
        let f = make_atomic(0.0, 0.0, vec![(0.05 * gamma, 1.0)]).unwrap();
        for rho in [0.3, 0.5] {
            let delta = (&v * &v.adjoint()).scale_re(-rho * gamma);
            let (ratios, ok) = remainder_ratios(&f, &c, &delta, g);
            bounds_ok &= ok;
            for q in ratios.iter().take(5) {
                let dev = (q / rho - 1.0).abs();
                tight_dev = tight_dev.max(dev);
                two_sided_ok &= dev <= 0.15;
            }
        }
    }
    // Square root with generic Hermitian directions: only the upper side is expected,
    // since the scalar coefficients of √(γ+x) have ratios (n − 3/2)/n < 1.
    let f = make_sqrt();
    let mut upper_ok = true;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..10 {
        let n = r.gen_range(1..=4);
        let c = &ComplexMatrix::identity(n) + &random::psd(&mut r, n, n, 0.0, 0.2);
        let gamma = eigh(&c).unwrap().eigenvalues[0];
        let h = random::hermitian(&mut r, n);
        let rho = 0.3;
        let delta = h.scale_re(rho * gamma / gauge_norm(&h, g));
        let (ratios, ok) = remainder_ratios(&f, &c, &delta, g);
        bounds_ok &= ok;
        for q in ratios.iter().take(5) {
            lo = lo.min(q / rho);
            hi = hi.max(q / rho);
            upper_ok &= q / rho <= 1.15;
        }
    }
    let delta = ComplexMatrix::from_rows(&[&[0.1, 0.05], &[0.05, -0.2]]);
    let f1 = taylor_term(&f, &ComplexMatrix::identity(2), &delta, 1, &tol()).unwrap();
    let f1_err = f1.dist(&delta.scale_re(0.5));
    outcome(
        two_sided_ok && upper_ok && bounds_ok && f1_err <= 1e-8,
        format!(
            "geometric atom family: max |ratio/ρ − 1| = {tight_dev:.3} (≤ 0.15); \
             sqrt generic Δ: ratio/ρ ∈ [{lo:.3}, {hi:.3}] (upper side ≤ 1.15 only); \
             term and tail bounds hold: {bounds_ok}; sqrt f₁(Δ) − Δ/2 = {f1_err:.1e}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut r = random::rng(909);
    let f = make_sqrt();
    let ps: Vec<u32> = (4..=10).collect();
    let mut slopes = Vec::new();
    let mut bounds_ok = true;
    for _ in 0..10 {
        let n = r.gen_range(1..=4);
        let c = random::psd(&mut r, n, n, 0.5, 2.0);
        let d = random::psd(&mut r, n, n, 0.5, 2.0);
        let dec = riemann_decay(&f, &c, &d, &ps, 32.0, 1.0, GaugeNorm::TRACE, &tol()).unwrap();
        bounds_ok &= dec.reports.iter().all(|rep| rep.within_bound());
        slopes.push(dec.slope.unwrap_or(f64::NAN));
    }
    let slope_ok = slopes.iter().all(|s| (-1.2..=-0.8).contains(s));
    let (lo, hi) = slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &s| (a.min(s), b.max(s)));

    let c = ComplexMatrix::real_diag(&[1.0]);
    let d = ComplexMatrix::real_diag(&[2.0]);
    let mut scalar_err: f64 = 0.0;
    for p in [4u32, 7, 10] {
        let rep = riemann_sum(&f, &c, &d, p, 32.0, 1.0, GaugeNorm::Operator, &tol()).unwrap();
        let h = (p as f64).exp2();
        let cells = (32.0 * h) as usize;
        let mut s = 0.0;
        for j in 1..=cells {
            let (a, b) = ((j - 1) as f64 / h, j as f64 / h);
            let mass = 2.0 / (3.0 * std::f64::consts::PI) * (b.powf(1.5) - a.powf(1.5));
            s += mass * (2.0 - 1.0) / ((b + 1.0) * (b + 2.0));
        }
        scalar_err = scalar_err.max((rep.r_p[(0, 0)].re - s).abs());
    }
    outcome(
        slope_ok && bounds_ok && scalar_err <= 1e-10,
        format!(
            "10 random PD pairs, log₂ slopes in [{lo:.3}, {hi:.3}] (within [−1.2, −0.8]); gap ≤ bound: {bounds_ok}; \
             scalar oracle error {scalar_err:.1e}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut r = random::rng(1010);
    let mut worst_c: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    let mut far = 0;
    let trials = 120;
    for _ in 0..trials {
        let n = r.gen_range(1..=6);
        let k = r.gen_range(0..=n);
        let c = random::psd(&mut r, n, k, 0.2, 3.0);
        let g0 = random::ginibre(&mut r, n, n);
        let d = (&(&g0 * &c) * &g0.adjoint()).hermitian_part();
        let g = congruence_witness(&c, &d, &tol()).unwrap();
        worst_c = worst_c.max((&(&g * &c) * &g.adjoint()).dist(&d));

        let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let k = r.gen_range(0..=m.min(n));
        let pi = |r: &mut ChaCha8Rng| {
            PartialIsometry::new(polar_decompose(&random::with_rank(r, m, n, k, 1.0, 1.0), &tol()).unwrap().polar_factor)
                .unwrap()
        };
        let (v0, v) = (pi(&mut r), pi(&mut r));
        let pv0 = Projector::new(v0.initial_projector().hermitian_part());
        let pv = Projector::new(v.initial_projector().hermitian_part());
        if let (Ok(a), Ok(b)) = (pv0, pv) {
            if gap(&a, &b) >= 1.0 - 1e-10 {
                far += 1;
            }
        }
        let (u, w) = isometry_orbit_witness(&v0, &v, &tol()).unwrap();
        worst_v = worst_v.max((&(&u * v0.matrix()) * &w.adjoint()).dist(v.matrix()));
    }
    outcome(
        worst_c <= 1e-8 && worst_v <= 1e-8,
        format!(
            "{trials} congruence round trips, max residual {worst_c:.1e}; {trials} isometry round trips \
             ({far} with initial-space gap 1), max residual {worst_v:.1e}"
        ),
    )
}

fn criterion_11() -> Outcome {
    let mut r = random::rng(1111);
    let mut worst_a: f64 = 0.0;
    let mut worst_v: f64 = 0.0;
    let mut exact = true;
    let mut done = 0;
    let mut outside = 0;
    while done < 120 {
        let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let k = r.gen_range(1..=m.min(n));
        let a = random::with_rank(&mut r, m, n, k, 0.5, 2.0);
        let gamma = moore_penrose(&a, &tol()).unwrap().gamma;
        let b = curve_point(&mut r, &a, 0.25 * gamma, GaugeNorm::FROBENIUS);
        let c0 = polar_decompose(&a, &tol()).unwrap().modulus;
        let v0 = polar_factor_map(&a, &a, &tol()).unwrap();
        let (ta, tv) = match (trivialize_alpha(&b, &c0, &a, &tol()), trivialize_v(&b, &v0, &a, &tol())) {
            (Ok(ta), Ok(tv)) => (ta, tv),
            _ => {
                outside += 1;
                continue;
            }
        };
        done += 1;
        exact &= ta.0 == modulus_map(&b, &a, &tol()).unwrap();
        exact &= tv.0 == polar_factor_map(&b, &a, &tol()).unwrap();
        worst_a = worst_a.max(untrivialize_alpha(&ta.0, &ta.1, &c0, &tol()).unwrap().dist(&b));
        worst_v = worst_v.max(untrivialize_v(&tv.0, &tv.1, &v0, &tol()).unwrap().dist(&b));
    }
    outcome(
        worst_a <= 1e-7 && worst_v <= 1e-7 && exact,
        format!(
            "{done} in-chart samples ({outside} outside), round trip α {worst_a:.1e}, v {worst_v:.1e}; \
             first components identical to modulus_map/polar_factor_map: {exact}"
        ),
    )
}

fn criterion_12() -> Outcome {
    let mut r = random::rng(1212);
    let mut violations = 0;
    let samples = 300;
    for i in 0..samples {
        let (m, n) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let ka = rand_rank(&mut r, m, n);
        let a = random::with_rank(&mut r, m, n, ka, 0.3, 2.0);
        let b = if i % 3 == 0 {
            curve_point(&mut r, &a, 0.5, GaugeNorm::Operator)
        } else {
            let kb = rand_rank(&mut r, m, n);
            random::with_rank(&mut r, m, n, kb, 0.3, 2.0)
        };
        let k = stratum_index(&b, &a, &tol()).unwrap();
        let (pa, pb) = (polar_decompose(&a, &tol()).unwrap(), polar_decompose(&b, &tol()).unwrap());
        let k_mp = stratum_index(&pinv(&b, &tol()).unwrap(), &pinv(&a, &tol()).unwrap(), &tol()).unwrap();
        let k_mod = stratum_index(&pb.modulus, &pa.modulus, &tol()).unwrap();
        let k_v = stratum_index(&pb.polar_factor, &pa.polar_factor, &tol()).unwrap();
        if k_mp != k || k_mod != k || k_v != k {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("{samples} samples, {violations} violations"))
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 12] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
        (12, criterion_12),
    ];
    let mut failed = 0;
    for (i, run) in criteria {
        let t = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {i}: {} [{:.1}s]", o.detail, t.elapsed().as_secs_f64());
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
