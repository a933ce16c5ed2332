//! The square-sieve experiment: 2-adic decompositions of the resultant
//! sequence f_d * Res(f^(n), f'), congruence-class pigeonholing, the
//! square sum S over a dyadic prime interval with the density bound
//! 16 S / t^2, square-product scans, and character sums over
//! almost-primes and primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp::{jacobi, jacobi_u64};
use crate::orbit::is_preperiodic;
use crate::poly::{detect_shape, iterate_resultant, IntPoly};
use crate::scan::{primes_vec, scan_density};
use crate::stability::StabilityOptions;

/// Exact 2-adic decomposition f_d * Res(f^(n), f') = 2^nu * u with u odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UNuPair {
    pub n: u32,
    pub u: BigInt,
    pub nu: u32,
}

pub fn u_nu_decompose(f: &IntPoly, n: u32, guard: u64) -> Result<UNuPair> {
    if n < 2 {
        return Err(Error::Invalid("decomposition starts at n = 2".into()));
    }
    let fd = f
        .leading()
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?
        .clone();
    let w = fd * iterate_resultant(f, n, guard)?;
    if w.is_zero() {
        return Err(Error::ZeroResultant { n });
    }
    let nu = w.trailing_zeros().expect("nonzero") as u32;
    Ok(UNuPair { n, u: &w >> nu, nu })
}

/// A congruence class (u mod 4, nu mod 2) used by the pigeonhole step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceClass {
    pub u_mod4: u8,
    pub nu_mod2: u8,
}

fn class_of(pair: &UNuPair) -> CongruenceClass {
    CongruenceClass {
        u_mod4: pair.u.mod_floor(&BigInt::from(4)).to_u8().expect("< 4"),
        nu_mod2: (pair.nu % 2) as u8,
    }
}

/// Pigeonholes the pairs by (u mod 4, nu mod 2) and returns the largest
/// class with its sorted index set (ties: the class of the smallest index).
/// The returned set has size >= ceil(len / 4).
pub fn select_congruent_subset(pairs: &[UNuPair]) -> Result<(CongruenceClass, Vec<u32>)> {
    if pairs.is_empty() {
        return Err(Error::Invalid("no decompositions to pigeonhole".into()));
    }
    let mut classes: Vec<(CongruenceClass, Vec<u32>)> = Vec::new();
    for pair in pairs {
        debug_assert!(pair.u.is_odd());
        let c = class_of(pair);
        match classes.iter_mut().find(|(k, _)| *k == c) {
            Some((_, v)) => v.push(pair.n),
            None => classes.push((c, vec![pair.n])),
        }
    }
    for (_, v) in classes.iter_mut() {
        v.sort_unstable();
    }
    // Largest class; ties broken by the smallest contained index.
    classes.sort_by_key(|(_, v)| (std::cmp::Reverse(v.len()), v[0]));
    let (class, ns) = classes.swap_remove(0);
    Ok((class, ns))
}

/// Evaluates the sign (-1)^((u_r+u_s-2)/2 * (m-1)/2 + (nu_r+nu_s)(m^2-1)/8)
/// and returns whether it is +1. Requires r and s to lie in one
/// congruence class (then the sign is provably always +1).
pub fn parity_identity_check(r: &UNuPair, s: &UNuPair, m: &BigInt) -> Result<bool> {
    if m.is_even() {
        return Err(Error::Invalid("m must be odd".into()));
    }
    if class_of(r) != class_of(s) {
        return Err(Error::Invalid(
            "pairs come from different congruence classes".into(),
        ));
    }
    let u_sum = &r.u + &s.u - BigInt::from(2);
    let e1 = (&u_sum / BigInt::from(2)) * ((m - BigInt::from(1)) / BigInt::from(2));
    let e2 = BigInt::from(r.nu + s.nu) * ((m * m - BigInt::from(1)) / BigInt::from(8));
    Ok((e1 + e2).is_even())
}

/// S = sum over primes p in [Q, 2Q] of |sum_{n in ns} (w_n / p)|^2 where
/// w_n = f_d * Res(f^(n), f'); primes dividing some w_n contribute a zero
/// symbol rather than being skipped.
pub fn sieve_sum_s(f: &IntPoly, q: u64, ns: &[u32], guard: u64) -> Result<BigInt> {
    if q < 3 {
        return Err(Error::Invalid("sieve sum needs Q >= 3".into()));
    }
    let fd = f
        .leading()
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?
        .clone();
    let mut ws = Vec::with_capacity(ns.len());
    for &n in ns {
        ws.push(&fd * iterate_resultant(f, n, guard)?);
    }
    let primes = primes_vec(q, 2 * q)?;
    let total: i128 = primes
        .par_iter()
        .map(|&p| {
            let mut inner = 0i64;
            for w in &ws {
                let r = w.mod_floor(&BigInt::from(p)).to_u64().expect("< p");
                if r != 0 {
                    inner += jacobi_u64(r, p) as i64;
                }
            }
            (inner * inner) as i128
        })
        .sum();
    Ok(BigInt::from(total))
}

/// Full square-sieve pipeline report.
#[derive(Clone, Debug, Serialize)]
pub struct SieveReport {
    pub poly: String,
    pub q: u64,
    pub n_min: u32,
    pub t: u32,
    pub class: CongruenceClass,
    pub subset: Vec<u32>,
    /// Exact S as a decimal string.
    pub s: String,
    pub pf: u64,
    pub pf_upper_proxy: bool,
    /// 16 S / t^2 in lowest terms.
    pub bound: String,
    pub bound_holds: bool,
    pub gamma: Option<String>,
    /// True when gamma is pre-periodic (the density hypothesis fails).
    pub gamma_preperiodic: Option<bool>,
}

/// Runs the whole pipeline: decompose n in [n_min, n_min+t], pigeonhole,
/// sum S over the subset, scan P_f(Q), and compare against 16 S / t^2.
pub fn verify_pf_bound(
    f: &IntPoly,
    q: u64,
    n_min: u32,
    t: u32,
    opts: &StabilityOptions,
) -> Result<SieveReport> {
    if n_min < 2 || t < 1 {
        return Err(Error::Invalid("need n_min >= 2 and t >= 1".into()));
    }
    let mut pairs = Vec::new();
    for n in n_min..=n_min + t {
        pairs.push(u_nu_decompose(f, n, opts.degree_guard)?);
    }
    let (class, subset) = select_congruent_subset(&pairs)?;
    let s = sieve_sum_s(f, q, &subset, opts.degree_guard)?;
    let scan = scan_density(f, q, opts, false)?;
    let bound = BigRational::new(BigInt::from(16) * &s, BigInt::from(t as u64 * t as u64));
    let bound_holds = BigRational::from(BigInt::from(scan.pf)) <= bound;
    let (gamma, gamma_preperiodic) = match detect_shape(f) {
        Some(shape) => {
            let (pre, _) = is_preperiodic(f, &shape.gamma)?;
            (Some(shape.gamma.to_string()), Some(pre))
        }
        None => (None, None),
    };
    Ok(SieveReport {
        poly: f.to_string(),
        q,
        n_min,
        t,
        class,
        subset,
        s: s.to_string(),
        pf: scan.pf,
        pf_upper_proxy: scan.pf_upper_proxy,
        bound: bound.to_string(),
        bound_holds,
        gamma,
        gamma_preperiodic,
    })
}

/// Off-diagonal and diagonal square products among u_{n} for n in
/// [n_min, n_min + t].
#[derive(Clone, Debug)]
pub struct SquareScan {
    pub pairs: Vec<UNuPair>,
    /// (n1, n2) with n1 < n2 and u_{n1} u_{n2} a perfect square.
    pub off_diagonal: Vec<(u32, u32)>,
    /// Diagonal indices (always squares).
    pub diagonal: Vec<u32>,
}

fn is_perfect_square(x: &BigInt) -> bool {
    if x.is_negative() {
        return false;
    }
    let r = x.sqrt();
    &(&r * &r) == x
}

/// Exact perfect-square test on all pairwise products u_{n1} u_{n2}.
pub fn square_product_scan(f: &IntPoly, n_min: u32, t: u32, guard: u64) -> Result<SquareScan> {
    if n_min < 2 {
        return Err(Error::Invalid("square scan starts at n = 2".into()));
    }
    let mut pairs = Vec::new();
    for n in n_min..=n_min + t {
        pairs.push(u_nu_decompose(f, n, guard)?);
    }
    let mut off_diagonal = Vec::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            let prod = &pairs[i].u * &pairs[j].u;
            if is_perfect_square(&prod) {
                off_diagonal.push((pairs[i].n, pairs[j].n));
            }
        }
    }
    let diagonal = pairs.iter().map(|p| p.n).collect();
    Ok(SquareScan {
        pairs,
        off_diagonal,
        diagonal,
    })
}

/// Solution of eta^(eta^(-1/2)/4) = 1/t together with the residual and
/// the asymptotic comparison (log t)^(-2).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EtaReport {
    pub t: f64,
    pub eta: f64,
    pub residual: f64,
    pub asymptotic: f64,
}

fn eta_curve(eta: f64) -> f64 {
    // eta^(eta^(-1/2)/4) = exp(ln(eta) / (4 sqrt(eta))), increasing on (0,1)
    (eta.ln() / (4.0 * eta.sqrt())).exp()
}

/// Bisection solve of the defining equation for eta; t > 1 required.
/// The root lies below 1/2 once t exceeds about 1.28.
pub fn eta_for_t(t: f64) -> Result<EtaReport> {
    if !(t > 1.0) || !t.is_finite() {
        return Err(Error::Invalid("eta solve needs t > 1".into()));
    }
    let target = 1.0 / t;
    let mut lo = 1e-300f64;
    let mut hi = 1.0 - 1e-12;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if eta_curve(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < f64::EPSILON * hi {
            break;
        }
    }
    let eta = 0.5 * (lo + hi);
    let residual = (eta_curve(eta) - target).abs();
    if residual >= 1e-12 {
        return Err(Error::Invalid(format!(
            "bisection residual {residual:e} did not reach 1e-12"
        )));
    }
    Ok(EtaReport {
        t,
        eta,
        residual,
        asymptotic: t.ln().powi(-2),
    })
}

/// The integers 1 <= m <= M with no prime divisor p <= M^eta (1 always
/// qualifies), by marking multiples of the small primes segment by segment.
pub fn almost_primes(eta: f64, m: u64) -> Result<Vec<u64>> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Invalid("need 0 < eta < 1".into()));
    }
    if m < 2 {
        return Err(Error::Invalid("need M >= 2".into()));
    }
    let threshold = (m as f64).powf(eta);
    let small: Vec<u64> = primes_vec(2, m)?
        .into_iter()
        .take_while(|&p| (p as f64) <= threshold)
        .collect();
    let mut out = Vec::new();
    const SEG: u64 = 1 << 20;
    let mut lo = 1u64;
    while lo <= m {
        let hi = m.min(lo + SEG - 1);
        let len = (hi - lo + 1) as usize;
        let mut excluded = vec![false; len];
        for &p in &small {
            let mut j = lo.div_ceil(p) * p;
            while j <= hi {
                excluded[(j - lo) as usize] = true;
                j += p;
            }
        }
        for (i, &ex) in excluded.iter().enumerate() {
            if !ex {
                out.push(lo + i as u64);
            }
        }
        lo = hi + 1;
    }
    Ok(out)
}

/// Character sum over the almost-primes P(eta, M).
#[derive(Clone, Debug, Serialize)]
pub struct AlmostPrimeCharSum {
    pub q: String,
    pub eta: f64,
    pub m: u64,
    pub members: u64,
    pub sum: i64,
    /// The cancellation claim needs a non-square modulus.
    pub q_is_square: bool,
}

pub fn charsum_almost_primes(q: &BigInt, eta: f64, m: u64) -> Result<AlmostPrimeCharSum> {
    validate_symbol_modulus(q)?;
    let members = almost_primes(eta, m)?;
    let sum = symbol_sum(q, members.iter().copied());
    Ok(AlmostPrimeCharSum {
        q: q.to_string(),
        eta,
        m,
        members: members.len() as u64,
        sum,
        q_is_square: is_perfect_square(q),
    })
}

/// Character sum over primes with the square-root reference value.
#[derive(Clone, Debug, Serialize)]
pub struct PrimeCharSum {
    pub q: String,
    pub m: u64,
    pub sum: i64,
    /// M^(1/2) log(qM); the conjectural order of the sum.
    pub reference: f64,
    pub ratio: f64,
    pub q_is_square: bool,
}

pub fn charsum_primes(q: &BigInt, m: u64) -> Result<PrimeCharSum> {
    validate_symbol_modulus(q)?;
    let sum = symbol_sum(q, primes_vec(2, m.max(2))?.into_iter().filter(|&p| p <= m));
    let reference = (m as f64).sqrt() * crate::poly::ln_big(&(q * BigInt::from(m))).max(1e-300);
    Ok(PrimeCharSum {
        q: q.to_string(),
        m,
        sum,
        reference,
        ratio: (sum as f64).abs() / reference,
        q_is_square: is_perfect_square(q),
    })
}

fn validate_symbol_modulus(q: &BigInt) -> Result<()> {
    if q.is_even() || q < &BigInt::from(3) {
        return Err(Error::Invalid("symbol modulus must be odd and >= 3".into()));
    }
    Ok(())
}

fn symbol_sum(q: &BigInt, values: impl Iterator<Item = u64>) -> i64 {
    match q.to_u64() {
        Some(qs) => values.map(|v| jacobi_u64(v % qs, qs) as i64).sum(),
        None => values
            .map(|v| jacobi(&BigInt::from(v), q).expect("validated modulus") as i64)
            .sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{parse_poly, DEFAULT_DEGREE_GUARD as G};
    use crate::stability::Policy;

    fn poly(s: &str) -> IntPoly {
        parse_poly(s, G).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let f = poly("x^2+1");
        let d2 = u_nu_decompose(&f, 2, G).unwrap();
        assert_eq!((d2.u, d2.nu), (BigInt::from(1), 5));
        let d3 = u_nu_decompose(&f, 3, G).unwrap();
        assert_eq!((d3.u, d3.nu), (BigInt::from(5), 8));
        let d4 = u_nu_decompose(&f, 4, G).unwrap();
        assert_eq!((d4.u, d4.nu), (BigInt::from(13), 17));
        assert!(u_nu_decompose(&f, 1, G).is_err());
    }

    #[test]
    fn decomposition_is_exact() {
        let f = poly("x^2+1");
        for n in 2..=6 {
            let d = u_nu_decompose(&f, n, G).unwrap();
            let w = f.leading().unwrap() * iterate_resultant(&f, n, G).unwrap();
            assert_eq!(&d.u * (BigInt::from(1) << d.nu), w);
            assert!(d.u.is_odd());
        }
    }

    #[test]
    fn subset_example() {
        let f = poly("x^2+1");
        let pairs: Vec<UNuPair> = (2..=5)
            .map(|n| u_nu_decompose(&f, n, G).unwrap())
            .collect();
        let nus: Vec<u32> = pairs.iter().map(|p| p.nu).collect();
        assert_eq!(nus, vec![5, 8, 17, 32]);
        let (class, ns) = select_congruent_subset(&pairs).unwrap();
        assert_eq!(ns, vec![2, 4]);
        assert_eq!((class.u_mod4, class.nu_mod2), (1, 1));

        let single = select_congruent_subset(&pairs[..1]).unwrap();
        assert_eq!(single.1, vec![2]);
    }

    #[test]
    fn parity_examples() {
        let r = UNuPair {
            n: 2,
            u: BigInt::from(1),
            nu: 5,
        };
        assert!(parity_identity_check(&r, &r, &BigInt::from(7)).unwrap());
        let s = UNuPair {
            n: 4,
            u: BigInt::from(13),
            nu: 17,
        };
        assert!(parity_identity_check(&r, &s, &BigInt::from(9)).unwrap());
        let bad = UNuPair {
            n: 3,
            u: BigInt::from(5),
            nu: 8,
        };
        assert!(parity_identity_check(&r, &bad, &BigInt::from(7)).is_err());
        assert!(parity_identity_check(&r, &s, &BigInt::from(8)).is_err());
    }

    #[test]
    fn sum_examples() {
        let f = poly("x^2+1");
        assert_eq!(sieve_sum_s(&f, 10, &[2, 3], G).unwrap(), BigInt::from(4));
        assert_eq!(sieve_sum_s(&f, 10, &[], G).unwrap(), BigInt::from(0));
        assert_eq!(sieve_sum_s(&f, 10, &[2], G).unwrap(), BigInt::from(4));
        assert!(sieve_sum_s(&f, 2, &[2], G).is_err());
    }

    #[test]
    fn pipeline_report() {
        let f = poly("x^2+1");
        let opts = StabilityOptions {
            policy: Policy::Exact,
            ..Default::default()
        };
        let rep = verify_pf_bound(&f, 10, 2, 3, &opts).unwrap();
        assert_eq!(rep.pf, 0);
        assert!(rep.bound_holds);
        assert_eq!(rep.subset, vec![2, 4]);
        assert_eq!(rep.gamma_preperiodic, Some(false));

        let g = poly("(x-2)^2+2");
        let rep2 = verify_pf_bound(&g, 10, 2, 3, &opts).unwrap();
        assert_eq!(rep2.gamma_preperiodic, Some(true));
        assert!(rep2.bound_holds); // still evaluated mechanically
    }

    #[test]
    fn square_scan_examples() {
        let f = poly("x^2+1");
        let scan = square_product_scan(&f, 2, 6, G).unwrap();
        assert!(scan.off_diagonal.is_empty());
        assert_eq!(scan.diagonal, vec![2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn square_test_sign() {
        assert!(is_perfect_square(&BigInt::from(0)));
        assert!(is_perfect_square(&BigInt::from(49)));
        assert!(!is_perfect_square(&BigInt::from(-49)));
        assert!(!is_perfect_square(&BigInt::from(48)));
    }

    #[test]
    fn eta_solves() {
        let r = eta_for_t(10.0).unwrap();
        assert!(r.residual < 1e-12);
        assert!(r.eta > 0.07 && r.eta < 0.09, "eta = {}", r.eta);
        assert!((eta_curve(r.eta) - 0.1).abs() < 1e-12);

        let r2 = eta_for_t(2.0).unwrap();
        assert!(r2.residual < 1e-12);
        assert!((eta_curve(r2.eta) - 0.5).abs() < 1e-12);

        assert!(eta_for_t(1.0).is_err());
        assert!(eta_for_t(0.5).is_err());
    }

    #[test]
    fn almost_prime_examples() {
        let a = almost_primes(1.0 / 3.0, 30).unwrap();
        assert_eq!(a, vec![1, 5, 7, 11, 13, 17, 19, 23, 25, 29]);
        let b = almost_primes(0.9, 30).unwrap();
        assert_eq!(b, vec![1, 23, 29]);
        assert!(almost_primes(0.0, 30).is_err());
        assert!(almost_primes(0.5, 1).is_err());
    }

    #[test]
    fn charsum_examples() {
        let r = charsum_almost_primes(&BigInt::from(3), 1.0 / 3.0, 30).unwrap();
        assert_eq!(r.sum, 0);
        assert_eq!(r.members, 10);
        assert!(!r.q_is_square);

        let sq = charsum_almost_primes(&BigInt::from(9), 1.0 / 3.0, 30).unwrap();
        assert!(sq.q_is_square);
        // (m/9) is 1 on units: all 10 members are coprime to 3... except 9-divisible
        assert!(sq.sum >= 0);

        let p = charsum_primes(&BigInt::from(3), 100).unwrap();
        assert_eq!(p.sum, -2);
        let p5 = charsum_primes(&BigInt::from(5), 10).unwrap();
        assert_eq!(p5.sum, -3);
        assert!(charsum_primes(&BigInt::from(4), 10).is_err());
    }

    #[test]
    fn charsum_bruteforce_cross_check() {
        // (15, 1/3, 30) against direct enumeration
        let r = charsum_almost_primes(&BigInt::from(15), 1.0 / 3.0, 30).unwrap();
        let direct: i64 = [1u64, 5, 7, 11, 13, 17, 19, 23, 25, 29]
            .iter()
            .map(|&m| jacobi_u64(m % 15, 15) as i64)
            .sum();
        assert_eq!(r.sum, direct);
    }
}
