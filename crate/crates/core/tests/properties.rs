//! Randomized invariants. Case counts are small: every case runs
//! multiprecision evaluations.

mod common;

use proptest::prelude::*;
use rug::ops::Pow;
use rug::Float;

use common::dirichlet_tail_bound;
use seczeta::analysis::xray::vertex_residual;
use seczeta::analysis::{check_modular, find_real_zero_near, trace_xray, z_real, Region};
use seczeta::arith::MangoldtTable;
use seczeta::engine::{agreed_digits, agreed_digits_real};
use seczeta::mpcontext::digits_to_bits;
use seczeta::specials::upper_gamma_prec;
use seczeta::terms::{term_a, term_e, term_p, term_s, EvalParams};
use seczeta::zeta_zeros::{count_zeros, hardy_z};
use seczeta::{secondzeta, ApComplex, EvalOptions, PrecisionContext, ZeroTable};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn params(sigma: f64, t: f64, a: f64, digits: u32) -> EvalParams {
    let ctx = PrecisionContext::new(digits).unwrap();
    let s = ApComplex::from_f64(ctx.bits(), sigma, t);
    EvalParams::new(&s, &Float::with_val(64, a), ctx).unwrap()
}

/// Digits to which `lhs` and `rhs` agree relative to `scale`.
fn digits_below(lhs: &ApComplex, rhs: &ApComplex, scale: &Float) -> f64 {
    let d = (lhs - rhs).abs();
    if d.is_zero() {
        return f64::INFINITY;
    }
    -(Float::with_val(d.prec(), &d / scale).log10().to_f64())
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn work_digits_cover_target_and_guard(t in 1u32..200, u in 1u32..200) {
        let (a, b) = (PrecisionContext::new(t).unwrap(), PrecisionContext::new(u).unwrap());
        prop_assert!(a.work_digits() >= t + a.guard_digits());
        prop_assert_eq!(t <= u, a.work_digits() <= b.work_digits());
    }

    #[test]
    fn chebyshev_bounds_for_psi(x in 100u64..1_000_000) {
        // Chebyshev's lower bound and the Rosser–Schoenfeld upper bound.
        let psi = MangoldtTable::global().chebyshev_psi(x);
        let xf = x as f64;
        prop_assert!(psi > 0.92129 * xf - 2.5 * xf.ln() - 1.0, "ψ({x}) = {psi}");
        prop_assert!(psi < 1.03883 * xf, "ψ({x}) = {psi}");
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn ordinates_are_sign_changes_of_hardy_z(n in 1usize..=120) {
        let ctx = PrecisionContext::new(25).unwrap();
        let g = ZeroTable::global().ordinate(n, &ctx).unwrap();
        let delta = Float::with_val(g.prec(), 1e-20);
        let lo = hardy_z(&Float::with_val(g.prec(), &g - &delta), &ctx).unwrap();
        let hi = hardy_z(&Float::with_val(g.prec(), &g + &delta), &ctx).unwrap();
        prop_assert!(lo.is_sign_negative() != hi.is_sign_negative(), "γ_{n}");
        let above = Float::with_val(g.prec(), &g + 1e-6);
        let count_ctx = PrecisionContext::new(15).unwrap();
        prop_assert_eq!(count_zeros(&above, &count_ctx).unwrap(), n as u64);
    }

    #[test]
    fn incomplete_gamma_recurrence(sigma in -4.5f64..8.0, t in -40.0f64..40.0, x in 0.05f64..60.0) {
        let work = 40;
        let prec = digits_to_bits(work);
        let s = ApComplex::from_f64(prec, sigma, t);
        let x = Float::with_val(prec, x);
        let g0 = upper_gamma_prec(&s, &x, prec, false).unwrap().value;
        let g1 = upper_gamma_prec(&s.add_real(&Float::with_val(prec, 1)), &x, prec, false).unwrap().value;
        let tail = ApComplex::real_pow(&x, &s).scale(&Float::with_val(prec, -&x).exp());
        let sg = &s * &g0;
        let scale = sg.abs().max(&tail.abs()).max(&g1.abs());
        let d = digits_below(&g1, &(&sg + &tail), &scale);
        prop_assert!(d >= (work - 3) as f64, "{d} digits");
    }

    #[test]
    fn incomplete_gamma_conjugate_symmetry(sigma in -4.5f64..8.0, t in 0.1f64..40.0, x in 0.05f64..60.0) {
        let prec = digits_to_bits(30);
        let s = ApComplex::from_f64(prec, sigma, t);
        let x = Float::with_val(prec, x);
        let g = upper_gamma_prec(&s, &x, prec, false).unwrap().value;
        let gc = upper_gamma_prec(&s.conj(), &x, prec, false).unwrap().value;
        prop_assert!(agreed_digits(&g.conj(), &gc, 30) >= 28);
    }

    #[test]
    fn incomplete_gamma_bound_large_argument(sigma in 1.0f64..12.0, excess in 0.01f64..60.0) {
        let a = sigma + excess;
        let prec = digits_to_bits(30);
        let g = upper_gamma_prec(&ApComplex::from_f64(prec, sigma, 0.0), &Float::with_val(prec, a), prec, false)
            .unwrap().value.re;
        let bound = Float::with_val(prec, -a).exp() * Float::with_val(prec, a).pow(sigma - 1.0) * sigma;
        prop_assert!(g <= bound, "Γ({sigma}, {a})");
    }

    #[test]
    fn incomplete_gamma_bound_small_exponent(sigma in -6.0f64..1.0, a in 0.01f64..60.0) {
        let prec = digits_to_bits(30);
        let g = upper_gamma_prec(&ApComplex::from_f64(prec, sigma, 0.0), &Float::with_val(prec, a), prec, false)
            .unwrap().value.re;
        let bound = Float::with_val(prec, -a).exp() * Float::with_val(prec, a).pow(sigma - 1.0);
        prop_assert!(g <= bound, "Γ({sigma}, {a})");
    }
}

proptest! {
    #![proptest_config(config(6))]

    #[test]
    fn terms_respect_conjugation(sigma in -5.0f64..4.0, t in 0.5f64..60.0, a in 0.004f64..0.03) {
        let p = params(sigma, t, a, 20);
        let q = EvalParams::new(&p.s.conj(), &p.a, p.ctx.clone()).unwrap();
        let zeros = ZeroTable::global();
        let mangoldt = MangoldtTable::global();
        let pairs = [
            (term_a(&p, zeros).unwrap().value, term_a(&q, zeros).unwrap().value),
            (term_p(&p, mangoldt, false).unwrap().value, term_p(&q, mangoldt, false).unwrap().value),
            (term_e(&p).unwrap().value, term_e(&q).unwrap().value),
            (term_s(&p).unwrap().value, term_s(&q).unwrap().value),
        ];
        for (x, y) in pairs {
            prop_assert!(agreed_digits(&x.conj(), &y, 30) >= 25);
        }
    }

    #[test]
    fn doubling_the_zeros_stays_within_the_main_estimate(sigma in -4.0f64..4.0, t in 0.0f64..120.0, a in 0.004f64..0.03) {
        let p = params(sigma, t, a, 15);
        let r = term_a(&p, ZeroTable::global()).unwrap();
        let n = r.terms_used;
        let prec = p.prec();
        let z = p.s.scale(&Float::with_val(prec, 0.5));
        let neg_s = -&p.s;
        let ordinates = ZeroTable::global().ordinates(2 * n, p.ctx.work_digits()).unwrap();
        let mut extra = ApComplex::zero(prec);
        for g in &ordinates[n - 1..2 * n] {
            let x = Float::with_val(prec, g.square_ref()) * &p.a;
            let q = upper_gamma_prec(&z, &x, prec, true).unwrap().value;
            extra += &(&q * &ApComplex::real_pow(g, &neg_s));
        }
        prop_assert!(extra.abs() <= r.error_estimate, "{:e} vs {:e}", extra.abs().to_f64(), r.error_estimate.to_f64());
    }

    #[test]
    fn regular_terms_are_smooth_across_the_lattice(m in 1u32..=2, t in 0.0f64..0.3, a in 0.005f64..0.03) {
        // Second differences of A, P, E stay bounded at s = −2m + it.
        let h = 1e-4;
        let sample = |dx: f64| {
            let p = params(-2.0 * m as f64 + dx, t, a, 20);
            [
                term_a(&p, ZeroTable::global()).unwrap().value,
                term_p(&p, MangoldtTable::global(), false).unwrap().value,
                term_e(&p).unwrap().value,
            ]
        };
        let (l, c, r) = (sample(-h), sample(0.0), sample(h));
        for k in 0..3 {
            prop_assert!(c[k].is_finite());
            let second = (&(&l[k] + &r[k]) - &c[k].scale(&Float::with_val(c[k].prec(), 2))).abs().to_f64() / (h * h);
            prop_assert!(second.is_finite() && second < 1e6, "term {k}: {second}");
        }
    }

    #[test]
    fn secondzeta_reflection_and_combiner(sigma in -6.0f64..4.0, t in 0.3f64..80.0) {
        let s = ApComplex::from_f64(digits_to_bits(40), sigma, t);
        let opts = EvalOptions::default();
        let r = secondzeta(&s, 18, None, &opts).unwrap();
        let rc = secondzeta(&s.conj(), 18, None, &opts).unwrap();
        prop_assert!(agreed_digits(&r.z.conj(), &rc.z, 18) >= 18);
        let b = &r.breakdown;
        let combined = &(&(&b.main - &b.prime) + &b.exponential) - &b.singular;
        prop_assert_eq!(combined.re, r.z.re);
        prop_assert_eq!(combined.im, r.z.im);
    }

    #[test]
    fn dirichlet_series_agreement(sigma in 2.0f64..4.0) {
        let s = ApComplex::from_f64(digits_to_bits(30), sigma, 0.0);
        let z = secondzeta(&s, 20, None, &EvalOptions::default()).unwrap().z.re;
        let zeros = ZeroTable::global().ordinates(100, 30).unwrap();
        let mut partial = Float::with_val(z.prec(), 0);
        for g in &zeros {
            partial += Float::with_val(z.prec(), g.pow(&Float::with_val(s.prec(), -&s.re)));
        }
        let gap = Float::with_val(z.prec(), &z - &partial).to_f64();
        prop_assert!(gap > 0.0 && gap <= dirichlet_tail_bound(sigma, zeros[99].to_f64(), 100));
    }

    #[test]
    fn real_zeros_vanish(k in 1u32..=6) {
        let p = find_real_zero_near(-(k as f64), 16).unwrap();
        let v = z_real(&p.location, 26).unwrap();
        prop_assert!(v.is_zero() || v.abs().log10().to_f64() < -14.0);
    }
}

#[test]
fn second_zeta_on_the_line_two() {
    // |Z(2+it)| stays within γ₁⁻² ± (γ₂⁻² + Σ_{n>2} γₙ⁻²).
    let zeros = ZeroTable::global().ordinates(100, 20).unwrap();
    let g: Vec<f64> = zeros.iter().map(|x| x.to_f64()).collect();
    let s2 = ApComplex::from_f64(digits_to_bits(30), 2.0, 0.0);
    let total = secondzeta(&s2, 20, None, &EvalOptions::default()).unwrap().z.re.to_f64();
    let tail = total - g[0].powi(-2) - g[1].powi(-2);
    let (lo, hi) = (g[0].powi(-2) - g[1].powi(-2) - tail, g[0].powi(-2) + g[1].powi(-2) + tail);
    for t in [50.0, 100.0, 200.0] {
        let s = ApComplex::from_f64(digits_to_bits(30), 2.0, t);
        let z = secondzeta(&s, 15, None, &EvalOptions::default()).unwrap().z.abs().to_f64();
        assert!(lo <= z && z <= hi, "t = {t}: {z} not in [{lo}, {hi}]");
    }
}

#[test]
fn ordinates_strictly_increase_in_range() {
    let zeros = ZeroTable::global().ordinates(150, 20).unwrap();
    assert!(zeros[0] > 14 && zeros[0] < 14.2);
    assert!(zeros.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn xray_vertices_sit_on_their_curves() {
    let region = Region { sigma_min: -2.6, sigma_max: -0.4, t_min: -1.5, t_max: 1.5 };
    let c = trace_xray(region, (8, 8), 10).unwrap();
    let mirrored = |list: &[seczeta::analysis::Polyline]| {
        let pts: Vec<(f64, f64)> = list.iter().flat_map(|l| l.points.iter().copied()).filter(|p| p.1.abs() > 1e-9).collect();
        pts.iter().all(|p| pts.iter().any(|q| (q.0 - p.0).abs() < 1e-9 && (q.1 + p.1).abs() < 1e-9))
    };
    assert!(mirrored(&c.real_curves) && mirrored(&c.imag_curves));
    for l in c.real_curves.iter().chain(&c.imag_curves) {
        for p in l.points.iter().step_by(3) {
            let r = vertex_residual(l.kind, p.0, p.1, 10).unwrap();
            let s = ApComplex::from_f64(64, p.0, p.1);
            let z = secondzeta(&s, 10, None, &EvalOptions::default()).unwrap().z.abs().to_f64();
            assert!(r <= 0.05 * z, "{:?} at {p:?}: {r} of {z}", l.kind);
        }
    }
}

#[test]
fn modular_agreement_grows_with_data() {
    let ctx = PrecisionContext::new(30).unwrap();
    let x = Float::with_val(ctx.bits(), 0.1);
    let small = check_modular(&x, 50, 2_000, &ctx).unwrap().digits_agreed;
    let large = check_modular(&x, 100, 4_000, &ctx).unwrap().digits_agreed;
    assert!(large >= small, "{small} then {large}");
}

#[test]
fn special_values_are_exact_at_high_precision() {
    for n in 1..=3 {
        let (z, exact) = seczeta::analysis::special_value_check(n, 60).unwrap();
        let e = Float::with_val(z.re.prec(), &exact);
        assert!(agreed_digits_real(&z.re, &e, 60) >= 60, "n = {n}");
    }
}
