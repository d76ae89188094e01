//! Error functions: Taylor-type series below |x| = 2, Lentz continued
//! fraction above, reflection for negative arguments.

use std::f64::consts::PI;

const SERIES_LIMIT: f64 = 2.0;

/// erf(x) = 2/√π · e^{-x²} · Σ 2ⁿ x^{2n+1} / (2n+1)!!, all terms positive.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x2).exp() * sum
}

/// Continued fraction x + (1/2)/(x + 1/(x + (3/2)/(x + ...))), so that
/// erfc(x) = e^{-x²} / (√π · cf(x)) for x > 0.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..5000 {
        let a = n as f64 * 0.5;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    f
}

/// Complementary error function 2/√π ∫ₓ^∞ e^{-s²} ds.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        (-x * x).exp() / (PI.sqrt() * erfc_continued_fraction(x))
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.abs() <= SERIES_LIMIT {
        erf_series(x)
    } else if x > 0.0 {
        1.0 - erfc(x)
    } else {
        erfc(-x) - 1.0
    }
}

/// Scaled complementary error function e^{x²} erfc(x).
pub fn erfcx(x: f64) -> f64 {
    if x > SERIES_LIMIT {
        1.0 / (PI.sqrt() * erfc_continued_fraction(x))
    } else if x >= 0.0 {
        (x * x).exp() * (1.0 - erf_series(x))
    } else {
        2.0 * (x * x).exp() - erfcx(-x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_and_reflection() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(0.3) - (2.0 - erfc(-0.3))).abs() < 1e-15);
        for i in 0..=600 {
            let x = -30.0 + 0.1 * i as f64;
            assert!((erfc(x) + erfc(-x) - 2.0).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn reference_value_at_one() {
        assert!((erfc(1.0) - 0.157_299_207_050_285_1).abs() < 1e-15);
    }

    #[test]
    fn continuity_across_branch_point() {
        // reference values from 30-digit arithmetic
        assert!((erfc(SERIES_LIMIT) - 0.004_677_734_981_047_266).abs() < 1e-15);
        assert!((erfc(SERIES_LIMIT + 1e-12) - 0.004_677_734_981_026_599).abs() < 1e-16);
        assert!((erfcx(SERIES_LIMIT) - 0.255_395_676_310_505_74).abs() < 5e-14);
        assert!((erfcx(SERIES_LIMIT) - erfcx(SERIES_LIMIT + 1e-12)).abs() < 1e-12);
    }

    #[test]
    fn monotone_decreasing() {
        let mut prev = erfc(-6.0);
        for i in 1..=1200 {
            let x = -6.0 + 0.01 * i as f64;
            let v = erfc(x);
            assert!(v <= prev, "not monotone at {x}");
            prev = v;
        }
    }

    #[test]
    fn scaled_matches_unscaled() {
        for &x in &[0.0f64, 0.5, 1.9, 2.1, 5.0, 10.0] {
            let direct = (x * x).exp() * erfc(x);
            assert!((erfcx(x) - direct).abs() < 1e-13 * erfcx(x).max(1.0));
        }
        // asymptotic 1/(x√π)
        let x = 1e4;
        assert!((erfcx(x) * x * PI.sqrt() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn erf_is_odd() {
        for &x in &[0.1, 1.0, 2.5, 7.0] {
            assert_eq!(erf(-x), -erf(x));
        }
    }
}
