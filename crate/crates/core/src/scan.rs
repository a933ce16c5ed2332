//! Segmented prime generation and bulk density scans over dyadic
//! intervals, plus the three replication suites for the worked examples
//! (x^2+1, (x-2)^2+2, and (x+2)^3-2).

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::modp::{cubic_residue, Prime};
use crate::poly::IntPoly;
use crate::stability::{
    depth_capped, quadratic_stability, stability_verdict, Policy, StabilityOptions, Verdict,
    VerdictKind, Witness,
};

/// Upper limit for prime enumeration.
pub const MAX_SIEVE_BOUND: u64 = 1 << 48;

const SEGMENT: u64 = 1 << 18;
const CHUNK: u64 = 1 << 14;

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Odd-aware simple sieve for the base primes up to `limit` inclusive.
fn base_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return vec![];
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = vec![2u64];
    let mut i = 3usize;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    let mut k = 3usize;
    while k <= n {
        if !composite[k] {
            out.push(k as u64);
        }
        k += 2;
    }
    out
}

/// Primes in [lo, hi] given base primes covering sqrt(hi).
fn primes_in_segment(lo: u64, hi: u64, base: &[u64]) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return vec![];
    }
    let lo = lo.max(2);
    let len = (hi - lo + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p.saturating_mul(p) > hi {
            break;
        }
        let start = p.max(lo.div_ceil(p)) * p;
        let mut j = start.max(p * p);
        while j <= hi {
            composite[(j - lo) as usize] = true;
            j += p;
        }
    }
    (0..len)
        .filter(|&i| !composite[i])
        .map(|i| lo + i as u64)
        .collect()
}

/// Lazy ascending iterator over the primes in [lo, hi].
pub struct PrimesIter {
    base: Vec<u64>,
    next_lo: u64,
    hi: u64,
    buf: std::vec::IntoIter<u64>,
}

impl Iterator for PrimesIter {
    type Item = Prime;

    fn next(&mut self) -> Option<Prime> {
        loop {
            if let Some(p) = self.buf.next() {
                return Some(Prime::new_unchecked(p));
            }
            if self.next_lo > self.hi {
                return None;
            }
            let seg_hi = self.hi.min(self.next_lo.saturating_add(SEGMENT - 1));
            self.buf = primes_in_segment(self.next_lo, seg_hi, &self.base).into_iter();
            self.next_lo = seg_hi + 1;
        }
    }
}

/// Exactly the primes in [lo, hi], ascending, by segmented sieve.
pub fn primes_in(lo: u64, hi: u64) -> Result<PrimesIter> {
    if lo < 2 || lo > hi || hi > MAX_SIEVE_BOUND {
        return Err(Error::Invalid(format!(
            "prime range must satisfy 2 <= lo <= hi <= 2^48, got [{lo}, {hi}]"
        )));
    }
    Ok(PrimesIter {
        base: base_primes(isqrt_u64(hi)),
        next_lo: lo,
        hi,
        buf: Vec::new().into_iter(),
    })
}

/// Materialized primes in [lo, hi].
pub fn primes_vec(lo: u64, hi: u64) -> Result<Vec<u64>> {
    Ok(primes_in(lo, hi)?.map(Prime::get).collect())
}

/// Number of primes in [lo, hi].
pub fn prime_count(lo: u64, hi: u64) -> Result<u64> {
    Ok(primes_in(lo, hi)?.count() as u64)
}

/// One prime's verdict inside a scan.
#[derive(Clone, Debug, Serialize)]
pub struct PerPrimeVerdict {
    pub p: u64,
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
}

/// Aggregated scan over the primes of a dyadic interval [Q, 2Q].
#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub poly: String,
    pub q: u64,
    pub policy: Policy,
    pub depth: u32,
    pub primes: u64,
    pub stable: u64,
    pub not_stable: u64,
    pub passes_filter: u64,
    pub unknown: u64,
    pub degenerate: u64,
    /// Stable count for the exact quadratic path; otherwise the count of
    /// verdicts consistent with stability (PassesFilter + Unknown).
    pub pf: u64,
    /// True when pf is only an upper proxy for the true density count.
    pub pf_upper_proxy: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_prime: Option<Vec<PerPrimeVerdict>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

#[derive(Default, Clone)]
struct Counts {
    stable: u64,
    not_stable: u64,
    passes_filter: u64,
    unknown: u64,
    degenerate: u64,
}

impl Counts {
    fn add(&mut self, v: &Verdict) {
        match v.kind {
            VerdictKind::Stable => self.stable += 1,
            VerdictKind::NotStable => self.not_stable += 1,
            VerdictKind::PassesFilter => self.passes_filter += 1,
            VerdictKind::Unknown => self.unknown += 1,
            VerdictKind::Degenerate => self.degenerate += 1,
        }
    }

    fn merge(&mut self, o: &Counts) {
        self.stable += o.stable;
        self.not_stable += o.not_stable;
        self.passes_filter += o.passes_filter;
        self.unknown += o.unknown;
        self.degenerate += o.degenerate;
    }

    fn total(&self) -> u64 {
        self.stable + self.not_stable + self.passes_filter + self.unknown + self.degenerate
    }
}

/// Applies the stability verdict to every prime in [Q, 2Q].
///
/// Work is split into fixed chunks of 2^14 consecutive integers merged in
/// chunk order, so the report is identical for any worker count.
pub fn scan_density(
    f: &IntPoly,
    q: u64,
    opts: &StabilityOptions,
    per_prime: bool,
) -> Result<ScanReport> {
    if q < 2 {
        return Err(Error::Invalid("scan needs Q >= 2".into()));
    }
    let hi = q
        .checked_mul(2)
        .filter(|&h| h <= MAX_SIEVE_BOUND)
        .ok_or_else(|| Error::Invalid("2Q exceeds the sieve bound".into()))?;
    let started = Instant::now();
    let d = f
        .degree()
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    let base = base_primes(isqrt_u64(hi));

    let mut chunk_bounds = Vec::new();
    let mut lo = q;
    while lo <= hi {
        let chunk_hi = hi.min(lo + (CHUNK - 1));
        chunk_bounds.push((lo, chunk_hi));
        lo = chunk_hi + 1;
    }

    let results: Vec<Result<(Counts, Vec<PerPrimeVerdict>)>> = chunk_bounds
        .par_iter()
        .map(|&(lo, hi)| {
            let mut counts = Counts::default();
            let mut list = Vec::new();
            for p in primes_in_segment(lo, hi, &base) {
                let v = stability_verdict(f, Prime::new_unchecked(p), opts)?;
                counts.add(&v);
                if per_prime {
                    list.push(PerPrimeVerdict {
                        p,
                        kind: v.kind,
                        witness: v.witness,
                    });
                }
            }
            Ok((counts, list))
        })
        .collect();

    let mut counts = Counts::default();
    let mut list = Vec::new();
    for r in results {
        let (c, l) = r?;
        counts.merge(&c);
        list.extend(l);
    }

    let exact_path = opts.policy == Policy::Exact || (opts.policy == Policy::Auto && d == 2);
    let (pf, proxy) = if exact_path {
        (counts.stable, false)
    } else {
        (counts.passes_filter + counts.unknown, true)
    };
    Ok(ScanReport {
        poly: f.to_string(),
        q,
        policy: opts.policy,
        depth: opts.depth.unwrap_or_else(|| crate::stability::default_depth(d)),
        primes: counts.total(),
        stable: counts.stable,
        not_stable: counts.not_stable,
        passes_filter: counts.passes_filter,
        unknown: counts.unknown,
        degenerate: counts.degenerate,
        pf,
        pf_upper_proxy: proxy,
        per_prime: if per_prime { Some(list) } else { None },
        wall_ms: Some(started.elapsed().as_millis() as u64),
    })
}

/// One row of a density series.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesRow {
    pub q: u64,
    pub primes: u64,
    pub stable: u64,
    pub ratio: f64,
}

/// P_f(Q) rows for an ascending list of Q values.
pub fn density_series(f: &IntPoly, qs: &[u64], opts: &StabilityOptions) -> Result<Vec<SeriesRow>> {
    if qs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Invalid("Q values must be ascending".into()));
    }
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let rep = scan_density(f, q, opts, false)?;
        rows.push(SeriesRow {
            q,
            primes: rep.primes,
            stable: rep.pf,
            ratio: rep.pf as f64 / rep.primes.max(1) as f64,
        });
    }
    Ok(rows)
}

/// Exact quadratic stability of x^2+1 for all odd p <= qmax; returns the
/// stable primes other than 3 (expected empty).
pub fn replicate_jones(qmax: u64) -> Result<Vec<u64>> {
    if qmax < 3 {
        return Err(Error::Invalid("need qmax >= 3".into()));
    }
    let f = IntPoly::from_i64s(&[1, 0, 1]);
    let primes = primes_vec(3, qmax)?;
    let mut stable: Vec<u64> = primes
        .par_iter()
        .filter_map(|&p| {
            let v = quadratic_stability(&f, Prime::new_unchecked(p)).expect("deg 2");
            (v.kind == VerdictKind::Stable).then_some(p)
        })
        .collect();
    stable.sort_unstable();
    Ok(stable.into_iter().filter(|&p| p != 3).collect())
}

/// Result of the arithmetic-progression replication for (x-2)^2+2.
#[derive(Clone, Debug, Serialize)]
pub struct ProgressionReport {
    /// Primes = 5 mod 8 that were not Stable (expected empty).
    pub failures: Vec<u64>,
    /// Stable primes outside the progression (informative).
    pub other_stable: Vec<u64>,
    pub checked: u64,
}

/// Verifies that (x-2)^2+2 is Stable at every prime p = 5 mod 8 up to qmax.
pub fn replicate_progression(qmax: u64) -> Result<ProgressionReport> {
    if qmax < 5 {
        return Err(Error::Invalid("need qmax >= 5".into()));
    }
    let f = IntPoly::from_i64s(&[6, -4, 1]);
    let primes = primes_vec(3, qmax)?;
    let results: Vec<(u64, bool)> = primes
        .par_iter()
        .map(|&p| {
            let v = quadratic_stability(&f, Prime::new_unchecked(p)).expect("deg 2");
            (p, v.kind == VerdictKind::Stable)
        })
        .collect();
    let mut failures = Vec::new();
    let mut other_stable = Vec::new();
    for (p, stable) in &results {
        if p % 8 == 5 && !stable {
            failures.push(*p);
        }
        if p % 8 != 5 && *stable {
            other_stable.push(*p);
        }
    }
    Ok(ProgressionReport {
        failures,
        other_stable,
        checked: results.len() as u64,
    })
}

/// Result of the cubic replication for (x+2)^3-2.
#[derive(Clone, Debug, Serialize)]
pub struct CubicReport {
    pub qualifying: u64,
    /// Qualifying primes refuted by the depth-capped test (expected empty).
    pub contradictions: Vec<u64>,
    pub depth: u32,
}

/// For every prime p <= qmax with p = 4,7 mod 9 and 2 a cubic non-residue,
/// the depth-capped test on (x+2)^3-2 must not return NotStable.
pub fn replicate_cubic(qmax: u64, depth: u32) -> Result<CubicReport> {
    if qmax < 7 {
        return Err(Error::Invalid("need qmax >= 7".into()));
    }
    let guard = 3u128.checked_pow(depth).unwrap_or(u128::MAX);
    if guard > crate::poly::DEFAULT_DEGREE_GUARD as u128 {
        return Err(Error::DegreeGuard {
            required: guard,
            guard: crate::poly::DEFAULT_DEGREE_GUARD,
        });
    }
    let f = IntPoly::from_i64s(&[6, 12, 6, 1]);
    let two = BigInt::from(2);
    let qualifying: Vec<u64> = primes_vec(5, qmax)?
        .into_iter()
        .filter(|&p| {
            (p % 9 == 4 || p % 9 == 7)
                && !cubic_residue(&two, Prime::new_unchecked(p)).expect("p odd, p != 2")
        })
        .collect();
    let mut contradictions: Vec<u64> = qualifying
        .par_iter()
        .filter_map(|&p| {
            let v = depth_capped(
                &f,
                Prime::new_unchecked(p),
                depth,
                crate::poly::DEFAULT_DEGREE_GUARD,
            )
            .expect("within guard");
            (v.kind == VerdictKind::NotStable).then_some(p)
        })
        .collect();
    contradictions.sort_unstable();
    Ok(CubicReport {
        qualifying: qualifying.len() as u64,
        contradictions,
        depth,
    })
}
