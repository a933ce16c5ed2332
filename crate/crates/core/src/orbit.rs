//! Exact rational dynamics: p-adic valuations, Weil heights, a
//! terminating pre-periodicity decision, and height diagnostics for
//! orbits and iterate resultants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::modp::Prime;
use crate::poly::{iterate_resultant, ln_big, IntPoly};

/// p-adic valuation of a nonzero rational: v_p(num) - v_p(den).
pub fn vp(x: &BigRational, p: Prime) -> Result<i64> {
    if x.is_zero() {
        return Err(Error::Invalid(
            "the valuation of 0 is +infinity".into(),
        ));
    }
    Ok(vp_int(x.numer(), p) - vp_int(x.denom(), p))
}

/// p-adic valuation of a nonzero integer.
pub fn vp_int(n: &BigInt, p: Prime) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p.get());
    let mut v = 0i64;
    let mut n = n.abs();
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// Weil logarithmic height max(log |num|, log |den|), with h(0) = 0.
pub fn weil_height(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    ln_big(x.numer()).max(ln_big(x.denom()))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum EscapeReason {
    /// |x| >= max(1, (2 + sum |f_i|)/|f_d|) forces |f(x)| >= 2|x| forever.
    RadiusRule,
    /// Some prime q has v_q(x) < -v_q(f_d), so v_q decreases forever.
    DenominatorRule,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum PreperiodicCertificate {
    Cycle { enter: u32, length: u32 },
    Escape { reason: EscapeReason, at: u32 },
}

/// The escape radius (2 + sum of |f_i| over i < d) / |f_d|.
pub fn escape_radius(f: &IntPoly) -> BigRational {
    let d = f.deg0();
    let mut sum = BigInt::from(2);
    for (i, c) in f.coeffs().iter().enumerate() {
        if i < d {
            sum += c.abs();
        }
    }
    BigRational::new(sum, f.leading().expect("nonzero").abs())
}

/// Terminating decision of whether x0 is pre-periodic under f (deg >= 2).
///
/// Iterates exactly, stopping on (a) a repeated value (pre-periodic), (b)
/// the radius rule, or (c) the denominator rule. When neither escape rule
/// ever fires the orbit lies in a finite set, so a repeat must occur.
pub fn is_preperiodic(f: &IntPoly, x0: &BigRational) -> Result<(bool, PreperiodicCertificate)> {
    if f.degree().unwrap_or(0) < 2 {
        return Err(Error::Invalid("pre-periodicity needs deg f >= 2".into()));
    }
    let radius = escape_radius(f).max(BigRational::one());
    let fd = f.leading().unwrap().abs();
    let mut seen: HashMap<BigRational, u32> = HashMap::new();
    let mut x = x0.clone();
    let mut n = 0u32;
    loop {
        if let Some(&enter) = seen.get(&x) {
            return Ok((
                true,
                PreperiodicCertificate::Cycle {
                    enter,
                    length: n - enter,
                },
            ));
        }
        if x.abs() >= radius {
            return Ok((
                false,
                PreperiodicCertificate::Escape {
                    reason: EscapeReason::RadiusRule,
                    at: n,
                },
            ));
        }
        if !x.denom().is_one() && !fd.is_multiple_of(x.denom()) {
            return Ok((
                false,
                PreperiodicCertificate::Escape {
                    reason: EscapeReason::DenominatorRule,
                    at: n,
                },
            ));
        }
        seen.insert(x.clone(), n);
        x = f.eval_rational(&x);
        n += 1;
    }
}

/// Exact orbit value with height and normalized height ratio.
#[derive(Clone, Debug)]
pub struct HeightReport {
    pub n: u32,
    pub value: BigRational,
    pub height: f64,
    /// height / d^n; converges for escaping orbits.
    pub ratio: f64,
}

/// Heights of f^(n)(x0) for n = 1..=n_max; d^n_max must stay in `guard`
/// since the values carry O(d^n) digits.
pub fn height_growth_report(
    f: &IntPoly,
    x0: &BigRational,
    n_max: u32,
    guard: u64,
) -> Result<Vec<HeightReport>> {
    let d = f
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::Invalid("need deg f >= 1".into()))?;
    let required = (d as u128).checked_pow(n_max).unwrap_or(u128::MAX);
    if required > guard as u128 {
        return Err(Error::DegreeGuard { required, guard });
    }
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut x = x0.clone();
    let mut dn = 1f64;
    for n in 1..=n_max {
        x = f.eval_rational(&x);
        dn *= d as f64;
        let height = weil_height(&x);
        rows.push(HeightReport {
            n,
            value: x.clone(),
            height,
            ratio: height / dn,
        });
    }
    Ok(rows)
}

/// Height of Res(f^(n), f') with its ratio to d^n.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResHeightRow {
    pub n: u32,
    pub height: f64,
    pub ratio: f64,
}

/// h(Res(f^(n), f')) for n = 1..=n_max, computed through the quotient
/// ring so the iterate is never materialized.
pub fn resultant_height_report(f: &IntPoly, n_max: u32, guard: u64) -> Result<Vec<ResHeightRow>> {
    let d = f
        .degree()
        .filter(|&d| d >= 2)
        .ok_or_else(|| Error::Invalid("resultant heights need deg f >= 2".into()))?;
    let mut rows = Vec::with_capacity(n_max as usize);
    let mut dn = 1f64;
    for n in 1..=n_max {
        dn *= d as f64;
        let res = iterate_resultant(f, n, guard)?;
        if res.is_zero() {
            return Err(Error::ZeroResultant { n });
        }
        let height = ln_big(&res);
        rows.push(ResHeightRow {
            n,
            height,
            ratio: height / dn,
        });
    }
    Ok(rows)
}

/// Natural log of the height bound for S-integer solutions of f(x) = b y^2
/// with deg f = d >= 3 and #S = s, with the non-effective factor
/// instantiated as exp(kappa * h_b):
/// 212 d^4 s log(4ds) + 20 d^3 log Q_S + kappa h_b.
pub fn solution_height_log_bound(
    d: u32,
    s: u32,
    q_s: &BigInt,
    h_b: f64,
    kappa: f64,
) -> Result<f64> {
    if d < 3 || s < 1 {
        return Err(Error::Invalid("bound needs d >= 3 and s >= 1".into()));
    }
    if !q_s.is_positive() {
        return Err(Error::Invalid("Q_S must be positive".into()));
    }
    let df = d as f64;
    let sf = s as f64;
    Ok(212.0 * df.powi(4) * sf * (4.0 * df * sf).ln() + 20.0 * df.powi(3) * ln_big(q_s) + kappa * h_b)
}
