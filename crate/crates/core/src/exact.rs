//! Exact scalar arithmetic: arbitrary-precision integers and rationals.
//!
//! Everything downstream (Gram matrices, Gram-Schmidt data, enumeration
//! bounds, discriminant forms) is computed over `Int`/`Rat`. No floating
//! point is used anywhere in the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand for a small integer constant.
pub fn int(v: i64) -> Int {
    Int::from(v)
}

/// Shorthand for a rational constant `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(int(p), int(q))
}

/// Rational from an integer.
pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Floor of a rational as an integer.
pub fn floor_rat(r: &Rat) -> Int {
    r.floor().to_integer()
}

/// Ceiling of a rational as an integer.
pub fn ceil_rat(r: &Rat) -> Int {
    r.ceil().to_integer()
}

/// Nearest integer to `r`; ties are rounded towards even, so the result is
/// independent of evaluation order (used by LLL size reduction).
pub fn round_half_even(r: &Rat) -> Int {
    let fl = floor_rat(r);
    let frac = r - rat_int(&fl);
    let half = rat(1, 2);
    if frac < half {
        fl
    } else if frac > half {
        fl + Int::one()
    } else if fl.is_even() {
        fl
    } else {
        fl + Int::one()
    }
}

/// Parse a rational from `"p"` or `"p/q"` notation.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((p, q)) => {
            let p = p.trim().parse::<BigInt>().ok()?;
            let q = q.trim().parse::<BigInt>().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rat::new(p, q))
            }
        }
    }
}

/// Canonical `"p/q"` (or `"p"` when integral) rendering.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// All integers `m` with `(m + c)^2 <= r`, returned as an inclusive range.
/// `None` when the range is empty (in particular whenever `r < 0`).
///
/// This is the exact replacement for `floor(±sqrt(r) - c)` used by the
/// Fincke-Pohst recursion; the initial guess comes from an integer square
/// root and is then corrected by exact comparisons.
pub fn shifted_square_range(c: &Rat, r: &Rat) -> Option<(Int, Int)> {
    if r.is_negative() {
        return None;
    }
    let inside = |m: &Int| -> bool {
        let t = rat_int(m) + c;
        &t * &t <= *r
    };
    // sqrt(p/q) = sqrt(p*q)/q with p, q >= 0, so the seed below is within
    // 1/q <= 1 of the exact square root and at most one correction step is
    // ever needed on each side.
    let pq = r.numer() * r.denom();
    let s = isqrt_floor(&pq);
    let approx_sqrt = Rat::new(s, r.denom().clone());

    // hi = max { m : (m + c)^2 <= r } is floor(sqrt(r) - c), which lies in
    // { seed, seed + 1 } whenever the range is nonempty.
    let seed_hi = floor_rat(&(&approx_sqrt - c));
    let hi = if inside(&(&seed_hi + Int::one())) {
        &seed_hi + Int::one()
    } else if inside(&seed_hi) {
        seed_hi
    } else {
        return None;
    };
    // lo = ceil(-sqrt(r) - c) lies in { seed - 1, seed } when nonempty.
    let seed_lo = ceil_rat(&(-&approx_sqrt - c));
    let lo = if inside(&(&seed_lo - Int::one())) {
        &seed_lo - Int::one()
    } else {
        debug_assert!(inside(&seed_lo));
        seed_lo
    };
    if lo > hi {
        None
    } else {
        Some((lo, hi))
    }
}

/// Floor of the integer square root; panics on negative input.
pub fn isqrt_floor(n: &Int) -> Int {
    assert!(!n.is_negative(), "isqrt of negative integer");
    num_integer::Roots::sqrt(n)
}

/// Least common multiple of the denominators of a rational slice; `1` for
/// an empty slice.
pub fn common_denominator(values: &[Rat]) -> Int {
    values.iter().fold(Int::one(), |acc, v| acc.lcm(v.denom()))
}

/// Euclidean remainder of `r` modulo a positive rational: the unique
/// representative in `[0, modulus)`.
pub fn rat_mod(r: &Rat, modulus: &Rat) -> Rat {
    assert!(modulus.is_positive(), "rat_mod needs a positive modulus");
    let q = floor_rat(&(r / modulus));
    r - modulus * rat_int(&q)
}
