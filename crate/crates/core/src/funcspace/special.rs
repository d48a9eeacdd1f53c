//! Upper incomplete gamma function for real (possibly negative) order.

use statrs::function::gamma::{gamma, gamma_ur};

const EULER: f64 = 0.577_215_664_901_532_9;

/// `Γ(s, x) = ∫_x^∞ y^{s-1} e^{-y} dy` for `x > 0` and any real `s`.
pub fn upper_gamma(s: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if s > 0.0 {
        if x > s + 1.0 && x > 1.0 {
            return continued_fraction(s, x);
        }
        return gamma_ur(s, x) * gamma(s);
    }
    if x > 1.0 {
        return continued_fraction(s, x);
    }
    if s == 0.0 {
        return exp_integral_e1(x);
    }
    // Γ(s, x) = (Γ(s+1, x) − x^s e^{−x}) / s
    (upper_gamma(s + 1.0, x) - x.powf(s) * (-x).exp()) / s
}

/// Modified Lentz evaluation of the Legendre continued fraction.
fn continued_fraction(s: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (s * x.ln() - x).exp() * h
}

/// `E_1(x)` by its power series, for `0 < x ≤ 1`.
fn exp_integral_e1(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER - x.ln() - sum
}
