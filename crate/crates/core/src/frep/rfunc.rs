//! R-functions: real functions whose sign depends only on the signs of their
//! arguments, used as set-theoretic operations on defining functions.
//!
//! Two systems are provided. The `r_*` pair is smooth except where both
//! arguments vanish; the `rv_*` family is `C^{n-1}` continuous everywhere
//! except at the origin of the argument plane.

/// `f1 + f2 + sqrt(f1² + f2²)`.
#[inline]
pub fn r_union(f1: f64, f2: f64) -> f64 {
    let (f1, f2) = ordered(f1, f2);
    let s = f1.hypot(f2);
    let sum = f1 + f2;
    if sum < 0.0 {
        // algebraically equal, avoids cancellation when both are negative
        -2.0 * f1 * (f2 / (s - sum))
    } else {
        sum + s
    }
}

/// `f1 + f2 - sqrt(f1² + f2²)`.
#[inline]
pub fn r_intersect(f1: f64, f2: f64) -> f64 {
    let (f1, f2) = ordered(f1, f2);
    let s = f1.hypot(f2);
    let sum = f1 + f2;
    if sum > 0.0 {
        2.0 * f1 * (f2 / (sum + s))
    } else {
        sum - s
    }
}

// Argument order fixed so rounding cannot break commutativity.
#[inline]
fn ordered(f1: f64, f2: f64) -> (f64, f64) {
    if f1 <= f2 {
        (f1, f2)
    } else {
        (f2, f1)
    }
}

/// `r_intersect(f1, -f2)`.
#[inline]
pub fn r_subtract(f1: f64, f2: f64) -> f64 {
    r_intersect(f1, -f2)
}

/// `(|f1|^n + |f2|^n)^(1/n)` evaluated without overflow.
#[inline]
fn pnorm(f1: f64, f2: f64, n: u32) -> f64 {
    let (f1, f2) = ordered(f1, f2);
    if n == 2 {
        return f1.hypot(f2);
    }
    let m = f1.abs().max(f2.abs());
    if m == 0.0 {
        return 0.0;
    }
    let (a, b) = ((f1 / m).abs(), (f2 / m).abs());
    m * (a.powi(n as i32) + b.powi(n as i32)).powf(1.0 / n as f64)
}

/// `f1 f2 (f1^n + f2^n)^(-1/n)` for same-sign arguments.
#[inline]
fn harmonic(f1: f64, f2: f64, n: u32) -> f64 {
    let (f1, f2) = ordered(f1, f2);
    let p = pnorm(f1, f2, n);
    if p == 0.0 {
        0.0
    } else {
        f1 * (f2 / p)
    }
}

/// Union of the `C^{n-1}` system. Follows the sign of `max(f1, f2)`.
///
/// Panics if `n` is zero or odd.
#[inline]
pub fn rv_union(f1: f64, f2: f64, n: u32) -> f64 {
    assert!(n >= 2 && n % 2 == 0, "rv order must be a positive even integer");
    if f1 >= 0.0 && f2 >= 0.0 {
        pnorm(f1, f2, n)
    } else if f1 < 0.0 && f2 < 0.0 {
        // (-1)^(n+1) = -1 for even n
        -harmonic(f1, f2, n)
    } else {
        f1.max(f2)
    }
}

/// Intersection of the `C^{n-1}` system. Follows the sign of `min(f1, f2)`.
///
/// Panics if `n` is zero or odd.
#[inline]
pub fn rv_intersect(f1: f64, f2: f64, n: u32) -> f64 {
    assert!(n >= 2 && n % 2 == 0, "rv order must be a positive even integer");
    if f1 >= 0.0 && f2 >= 0.0 {
        harmonic(f1, f2, n)
    } else if f1 < 0.0 && f2 < 0.0 {
        -pnorm(f1, f2, n)
    } else {
        f1.min(f2)
    }
}

#[inline]
pub fn rv_subtract(f1: f64, f2: f64, n: u32) -> f64 {
    rv_intersect(f1, -f2, n)
}

#[inline]
pub fn union_max(f1: f64, f2: f64) -> f64 {
    f1.max(f2)
}

#[inline]
pub fn intersect_min(f1: f64, f2: f64) -> f64 {
    f1.min(f2)
}
