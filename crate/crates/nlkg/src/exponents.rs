//! Closed-form exponent calculus and wave-admissibility predicates, in exact
//! rational arithmetic.
//!
//! Everything here is pure bookkeeping on the nonlinearity exponent `p` and
//! the regularity `s`: the critical index `s_c = 3/2 - 2/(p-1)`, the scattering
//! threshold `s_p` (two branch formulas meeting at `p = 4`), the interpolation
//! weights `theta_1..theta_3`, and the admissible-pair conditions for mixed
//! `L_t^q L_x^r` norms. Branch agreement at `p = 4` and the Hoelder identities
//! are rational identities, so the tests assert exact equality rather than
//! tolerances.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational from a decimal or fraction string: `"11/12"`, `"0.95"`, `"4"`.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = || Error::OutOfRange {
        what: "rational literal",
        value: text.to_string(),
    };
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let sign = if whole.trim_start().starts_with('-') { -1 } else { 1 };
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = BigRational::from_integer(whole.clone()).abs()
            + BigRational::new(digits, scale);
        return Ok(if sign < 0 { -magnitude } else { magnitude });
    }
    let n: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Exact rational image of a finite float.
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_f64(x).ok_or(Error::OutOfRange {
        what: "finite float",
        value: x.to_string(),
    })
}

/// The closed-form exponents attached to a `(p, s)` pair.
#[derive(Clone, Debug)]
pub struct ExponentReport {
    pub p: BigRational,
    pub s: BigRational,
    /// Critical regularity `3/2 - 2/(p-1)`.
    pub s_c: BigRational,
    /// Scattering threshold from the branch that applies to `p`.
    pub s_threshold: BigRational,
    /// `1 - (5-p)(p-3) / (2(p-1)(p-2))`, the `3 < p <= 4` branch.
    pub s_threshold_low: BigRational,
    /// `1 - (5-p)^2 / (2(p-1)(6-p))`, the `4 <= p < 5` branch.
    pub s_threshold_high: BigRational,
    pub theta1: BigRational,
    pub theta2: BigRational,
    pub theta3: BigRational,
    /// `1/(s(p-1))`.
    pub theta: BigRational,
}

fn s_threshold_low(p: &BigRational) -> BigRational {
    let five = int(5);
    let three = int(3);
    let num = (&five - p) * (p - &three);
    let den = int(2) * (p - int(1)) * (p - int(2));
    int(1) - num / den
}

fn s_threshold_high(p: &BigRational) -> BigRational {
    let five_minus = int(5) - p;
    let num = &five_minus * &five_minus;
    let den = int(2) * (p - int(1)) * (int(6) - p);
    int(1) - num / den
}

fn thetas_low(p: &BigRational, s: &BigRational) -> (BigRational, BigRational, BigRational) {
    let den_s = s * (p - int(1)) * (p - int(2));
    let t1 = (int(2) * s - int(1)) * (int(4) - p) / den_s.clone();
    let t2 = (p + int(2)) * (p - int(3)) / ((p - int(1)) * (p - int(2)));
    let t3 = (int(4) - p) / den_s;
    (t1, t2, t3)
}

fn thetas_high(p: &BigRational, s: &BigRational) -> (BigRational, BigRational, BigRational) {
    let den_s = s * (p - int(1)) * (int(6) - p);
    let t1 = (int(4) * s - int(1)) * (p - int(4)) / den_s.clone();
    let t2 = (p + int(2)) * (int(5) - p) / ((int(6) - p) * (p - int(1)));
    let t3 = (p - int(4)) / den_s;
    (t1, t2, t3)
}

/// Evaluate every exponent. Requires `3 < p < 5`, `0 < s < 1`, and each
/// `theta_i` to land in `[0, 1]` (which pins the admissible `s` range).
pub fn exponent_report(p: &BigRational, s: &BigRational) -> Result<ExponentReport> {
    if *p <= int(3) || *p >= int(5) {
        return Err(Error::OutOfRange {
            what: "p (open interval (3, 5))",
            value: p.to_string(),
        });
    }
    if *s <= int(0) || *s >= int(1) {
        return Err(Error::OutOfRange {
            what: "s (open interval (0, 1))",
            value: s.to_string(),
        });
    }
    let low = *p <= int(4);
    let s_threshold_lo = s_threshold_low(p);
    let s_threshold_hi = s_threshold_high(p);
    let (theta1, theta2, theta3) = if low {
        thetas_low(p, s)
    } else {
        thetas_high(p, s)
    };
    for (name, t) in [("theta1", &theta1), ("theta2", &theta2), ("theta3", &theta3)] {
        if *t < int(0) || *t > int(1) {
            return Err(Error::OutOfRange {
                what: match name {
                    "theta1" => "theta1 (requires s in the admissible range)",
                    "theta2" => "theta2 (requires s in the admissible range)",
                    _ => "theta3 (requires s in the admissible range)",
                },
                value: t.to_string(),
            });
        }
    }
    Ok(ExponentReport {
        p: p.clone(),
        s: s.clone(),
        s_c: rat(3, 2) - int(2) / (p - int(1)),
        s_threshold: if low {
            s_threshold_lo.clone()
        } else {
            s_threshold_hi.clone()
        },
        s_threshold_low: s_threshold_lo,
        s_threshold_high: s_threshold_hi,
        theta1,
        theta2,
        theta3,
        theta: int(1) / (s * (p - int(1))),
    })
}

/// Float convenience wrapper around [`exponent_report`].
pub fn exponent_report_f64(p: f64, s: f64) -> Result<ExponentReport> {
    exponent_report(&rational_from_f64(p)?, &rational_from_f64(s)?)
}

/// `s_c(p)` as a float, for runtime parameter validation.
pub fn critical_regularity(p: f64) -> f64 {
    1.5 - 2.0 / (p - 1.0)
}

/// `s_p` (the applicable threshold branch) as a float.
pub fn scattering_threshold(p: f64) -> f64 {
    if p <= 4.0 {
        1.0 - (5.0 - p) * (p - 3.0) / (2.0 * (p - 1.0) * (p - 2.0))
    } else {
        1.0 - (5.0 - p) * (5.0 - p) / (2.0 * (p - 1.0) * (6.0 - p))
    }
}

/// A time exponent `q in (2, inf]`; `r` stays an ordinary rational.
#[derive(Clone, Debug, PartialEq)]
pub enum TimeExponent {
    Finite(BigRational),
    Infinity,
}

impl TimeExponent {
    pub fn from_f64(q: f64) -> Result<Self> {
        if q.is_infinite() && q > 0.0 {
            Ok(TimeExponent::Infinity)
        } else {
            Ok(TimeExponent::Finite(rational_from_f64(q)?))
        }
    }

    fn reciprocal(&self) -> BigRational {
        match self {
            TimeExponent::Infinity => BigRational::zero(),
            TimeExponent::Finite(q) => BigRational::one() / q,
        }
    }
}

/// Wave admissibility in dimension `d`: membership of `(q, r)` in the
/// admissible set, the cone condition `1/q + (d-1)/(2r) <= (d-1)/4`, and the
/// endpoint exclusion for `d >= 3`. Returns the scaling level
/// `m = d/2 - 1/q - d/r` alongside the verdict.
pub fn wave_admissible_exact(
    q: &TimeExponent,
    r: &BigRational,
    d: u32,
) -> (bool, BigRational) {
    let d_rat = int(d as i64);
    let inv_q = q.reciprocal();
    let inv_r = BigRational::one() / r;
    let m = &d_rat / int(2) - &inv_q - &d_rat * &inv_r;

    let q_in_range = match q {
        TimeExponent::Infinity => true,
        TimeExponent::Finite(q) => *q > int(2),
    };
    let r_in_range = *r >= int(2);
    let cone = &inv_q + (&d_rat - int(1)) / int(2) * &inv_r <= (&d_rat - int(1)) / int(4);
    let mut ok = q_in_range && r_in_range && cone;
    if d > 3 {
        let endpoint_r = int(2) * (&d_rat - int(1)) / (&d_rat - int(3));
        if *q == TimeExponent::Finite(int(2)) && *r == endpoint_r {
            ok = false;
        }
    }
    (ok, m)
}

/// Float wrapper: `(admissible, m)`.
pub fn is_wave_admissible(q: f64, r: f64, d: u32) -> (bool, f64) {
    let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
    let df = d as f64;
    let m = df / 2.0 - inv_q - df / r;
    let Ok(qe) = TimeExponent::from_f64(q) else {
        return (false, m);
    };
    let Ok(re) = rational_from_f64(r) else {
        return (false, m);
    };
    if r.is_infinite() || !r.is_finite() {
        return (false, m);
    }
    let (ok, m_exact) = wave_admissible_exact(&qe, &re, d);
    (ok, m_exact.to_f64().unwrap_or(m))
}

/// Dual-pair predicate for the inhomogeneous estimate: `(qt, rt)` must be the
/// Hoelder conjugates of an admissible-range `(q, r)` and satisfy the scaling
/// relation `1/qt + d/rt - 2 = 1/q + d/r`.
pub fn dual_inhomogeneous_exact(
    q_dual: &TimeExponent,
    r_dual: &BigRational,
    q: &TimeExponent,
    r: &BigRational,
    d: u32,
) -> bool {
    let q_in_range = match q {
        TimeExponent::Infinity => true,
        TimeExponent::Finite(q) => *q > int(2),
    };
    if !q_in_range || *r < int(2) {
        return false;
    }
    let one = BigRational::one();
    let duality = q_dual.reciprocal() + q.reciprocal() == one
        && BigRational::one() / r_dual + BigRational::one() / r == one;
    let d_rat = int(d as i64);
    let scaling = q_dual.reciprocal() + &d_rat / r_dual - int(2)
        == q.reciprocal() + &d_rat / r;
    duality && scaling
}

/// Float wrapper with a 1e-12 comparison tolerance.
pub fn is_dual_inhomogeneous(q_dual: f64, r_dual: f64, q: f64, r: f64, d: u32) -> bool {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if !(q > 2.0 || q.is_infinite()) || r < 2.0 || !r.is_finite() {
        return false;
    }
    let df = d as f64;
    let duality =
        (inv(q_dual) + inv(q) - 1.0).abs() <= 1e-12 && (inv(r_dual) + inv(r) - 1.0).abs() <= 1e-12;
    let scaling =
        (inv(q_dual) + df * inv(r_dual) - 2.0 - (inv(q) + df * inv(r))).abs() <= 1e-12;
    duality && scaling
}

/// Hoelder conjugates of `(q, r)`.
pub fn dual_pair(q: f64, r: f64) -> (f64, f64) {
    let conj = |x: f64| {
        if x.is_infinite() {
            1.0
        } else {
            x / (x - 1.0)
        }
    };
    (conj(q), conj(r))
}
