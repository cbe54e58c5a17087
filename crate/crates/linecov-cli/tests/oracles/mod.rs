//! Shared test oracles, kept independent of the evaluation paths they
//! check: a series/continued-fraction error function, an adaptive Simpson
//! integrator, and ulp helpers.

#![allow(dead_code)]

use core::f64::consts::FRAC_2_SQRT_PI;

// Double-double helpers (Dekker/Bailey kernels) so the oracle's Taylor
// region carries ~32 significant digits before the final rounding.
#[derive(Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: e }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    quick_two_sum(s.hi, s.lo + a.lo + b.lo)
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let p = two_prod(a.hi, b.hi);
    quick_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi)
}

fn dd_div_f64(a: Dd, d: f64) -> Dd {
    let q1 = a.hi / d;
    let p = two_prod(q1, d);
    let r = ((a.hi - p.hi) - p.lo + a.lo) / d;
    quick_two_sum(q1, r)
}

fn dd_mul_f64(a: Dd, m: f64) -> Dd {
    let p = two_prod(a.hi, m);
    quick_two_sum(p.hi, p.lo + a.lo * m)
}

/// Error function oracle, independent of the rational-minimax
/// implementation it checks: a double-double alternating Taylor series for
/// `|x| < 1` (well conditioned there) and the complement of the
/// continued-fraction `erfc` beyond. About half an ulp on the Taylor
/// region and one ulp beyond.
pub fn erf_series(x: f64) -> f64 {
    if x < 0.0 {
        return -erf_series(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0 - erfc_cf(x);
    }
    let z = two_prod(x, x);
    let mut term = Dd { hi: x, lo: 0.0 };
    let mut sum = Dd { hi: 0.0, lo: 0.0 };
    let mut n = 0u32;
    loop {
        sum = dd_add(sum, term);
        n += 1;
        let nf = n as f64;
        // t_{n} = -t_{n-1} * z * (2n - 1) / (n (2n + 1))
        term = dd_mul(term, z);
        term = dd_mul_f64(term, -(2.0 * nf - 1.0));
        term = dd_div_f64(term, nf * (2.0 * nf + 1.0));
        if term.hi.abs() < 1e-35 * sum.hi.abs() {
            break;
        }
    }
    // 2/sqrt(pi) in double-double
    let c = Dd {
        hi: FRAC_2_SQRT_PI,
        lo: 1.533545961316588e-17,
    };
    let r = dd_mul(sum, c);
    r.hi + r.lo
}

/// Complementary error function from the Laplace continued fraction
/// `erfc(x) sqrt(pi) exp(x^2) = 1/(x+ (1/2)/(x+ 1/(x+ (3/2)/(x+ ...))))`,
/// evaluated by backward recurrence, for `x >= 1`.
pub fn erfc_cf(x: f64) -> f64 {
    assert!(x >= 1.0);
    let mut u = 0.0;
    for k in (1..=400u32).rev() {
        u = (k as f64 / 2.0) / (x + u);
    }
    let cf = 1.0 / (x + u);
    let hi = x * x;
    let lo = x.mul_add(x, -hi);
    (-hi).exp() * (1.0 - lo) * cf / core::f64::consts::PI.sqrt()
}

/// One ulp of `|v|`.
pub fn ulp(v: f64) -> f64 {
    let a = v.abs();
    if a == 0.0 {
        return f64::MIN_POSITIVE;
    }
    f64::from_bits(a.to_bits() + 1) - a
}

/// Adaptive Simpson quadrature with Richardson error control.
pub fn adaptive_quad<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
