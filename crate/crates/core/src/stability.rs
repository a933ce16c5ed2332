//! Per-prime stability verdicts.
//!
//! For quadratics the decision is exact: the discriminant must be a
//! nonsquare mod p and the Legendre symbols of f_d * f^(n)(gamma) must be
//! -1 for every n >= 2, where gamma is the critical point. The infinite
//! family of conditions is discharged over the tail + cycle closure of
//! the orbit of gamma mod p. For even-degree polynomials whose derivative
//! has the shape c * h^2 * (aX + b) the same symbol test is a necessary
//! filter; everything else falls back to depth-capped Rabin tests on the
//! iterates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modp::{
    factor_small, invmod, is_irreducible, jacobi_u64, mulmod, orbit_mod, orbit_params_u64,
    powmod_u64, reduce_mod, resultant_mod, ExtField, ModPoly, OrbitRecord, Prime,
};
use crate::poly::{discriminant, detect_shape, IntPoly, ShapeData, DEFAULT_DEGREE_GUARD};

/// Largest degree a depth-capped Rabin test materializes by default.
/// Schoolbook modular arithmetic makes this the interactive frontier;
/// an explicit depth may push further, up to the degree guard.
pub const DEPTH_DEGREE_CAP: u64 = 1 << 10;

/// Decision policy for [`stability_verdict`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Auto,
    Exact,
    Filter,
    Rabin,
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Policy::Auto),
            "exact" => Ok(Policy::Exact),
            "filter" => Ok(Policy::Filter),
            "rabin" => Ok(Policy::Rabin),
            other => Err(Error::Invalid(format!("unknown policy {other:?}"))),
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Policy::Auto => "auto",
            Policy::Exact => "exact",
            Policy::Filter => "filter",
            Policy::Rabin => "rabin",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum VerdictKind {
    Stable,
    NotStable,
    PassesFilter,
    Unknown,
    Degenerate,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum WitnessReason {
    /// The n-th iterate is reducible mod p.
    ReducibleAt,
    /// A required nonsquare had symbol +1.
    SymbolNotMinusOne,
    /// A required nonsquare vanished mod p (zero is a square).
    SymbolZero,
    /// Disc(f) is a square (or zero) mod p.
    DiscSquare,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct Witness {
    pub n: u32,
    pub reason: WitnessReason,
}

/// Symbol record along the orbit closure of gamma mod p.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitCertificate {
    pub p: u64,
    pub gamma_mod_p: u64,
    pub tail_len: u32,
    pub cycle_len: u32,
    pub disc_symbol: i8,
    /// (n, symbol of f_d * f^(n)(gamma) mod p) for n over the closure.
    pub symbols: Vec<(u32, i8)>,
}

/// Outcome of a stability decision for one prime.
#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub witness: Option<Witness>,
    pub depth_checked: u32,
    pub certificate: Option<OrbitCertificate>,
}

impl Verdict {
    fn degenerate() -> Self {
        Verdict {
            kind: VerdictKind::Degenerate,
            witness: None,
            depth_checked: 0,
            certificate: None,
        }
    }

    fn not_stable(n: u32, reason: WitnessReason) -> Self {
        Verdict {
            kind: VerdictKind::NotStable,
            witness: Some(Witness { n, reason }),
            depth_checked: 0,
            certificate: None,
        }
    }
}

/// Options shared by the verdict dispatcher and the scan drivers.
#[derive(Clone, Copy, Debug)]
pub struct StabilityOptions {
    pub policy: Policy,
    /// Rabin depth; None picks the largest n with d^n <= 2^14.
    pub depth: Option<u32>,
    pub seed: u64,
    pub degree_guard: u64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions {
            policy: Policy::Auto,
            depth: None,
            seed: 0,
            degree_guard: DEFAULT_DEGREE_GUARD,
        }
    }
}

/// Largest n >= 1 with d^n <= [`DEPTH_DEGREE_CAP`].
pub fn default_depth(d: usize) -> u32 {
    let d = d.max(2) as u64;
    let mut n = 1u32;
    let mut pow = d;
    while pow.saturating_mul(d) <= DEPTH_DEGREE_CAP {
        pow *= d;
        n += 1;
    }
    n
}

/// Reduces a rational mod p; None when p divides the denominator.
pub fn rational_mod_p(x: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = x.denom().mod_floor(&pb).to_u64().unwrap();
    if den == 0 {
        return None;
    }
    let num = x.numer().mod_floor(&pb).to_u64().unwrap();
    Some(mulmod(num, invmod(den, p), p))
}

struct GammaWalk {
    tail: u64,
    cycle: u64,
    symbols: Vec<(u32, i8)>,
    violation: Option<(u32, i8)>,
}

/// Symbols of f_d * f^(n)(gamma) mod p for n over the orbit closure,
/// stopping at the first symbol that is not -1.
fn gamma_orbit_symbols(fp: &ModPoly, fd_mod: u64, gm: u64) -> GammaWalk {
    let p = fp.modulus_value();
    let step = |x: u64| fp.eval(x);
    let (tail, cycle) = orbit_params_u64(step, gm);
    let n_end = tail.max(2) + cycle - 1;
    let mut symbols = Vec::new();
    let mut violation = None;
    let mut x = gm;
    for n in 1..=n_end {
        x = step(x);
        if n < 2 {
            continue;
        }
        let v = mulmod(fd_mod, x, p);
        let s = if v == 0 { 0 } else { jacobi_u64(v, p) } as i8;
        symbols.push((n as u32, s));
        if s != -1 {
            violation = Some((n as u32, s));
            break;
        }
    }
    GammaWalk {
        tail,
        cycle,
        symbols,
        violation,
    }
}

/// Exact stability decision for a quadratic: Stable iff Disc(f) is a
/// nonsquare mod p and every adjusted critical-orbit symbol is -1.
pub fn quadratic_stability(f: &IntPoly, p: Prime) -> Result<Verdict> {
    if f.degree() != Some(2) {
        return Err(Error::Invalid("quadratic_stability needs deg f = 2".into()));
    }
    let pp = p.get();
    if !p.is_odd() {
        return Ok(Verdict::degenerate());
    }
    let pb = BigInt::from(pp);
    let fd_mod = f.leading().unwrap().mod_floor(&pb).to_u64().unwrap();
    if fd_mod == 0 {
        return Ok(Verdict::degenerate());
    }
    let disc = discriminant(f)?;
    let disc_res = rational_mod_p(&disc, pp).expect("p odd and p does not divide lc");
    let disc_sym = if disc_res == 0 {
        0
    } else {
        jacobi_u64(disc_res, pp)
    } as i8;
    if disc_sym != -1 {
        return Ok(Verdict::not_stable(1, WitnessReason::DiscSquare));
    }
    // gamma = -f1 / (2 f2), invertible since p is odd and p does not divide f2.
    let f1 = f.coeff(1).mod_floor(&pb).to_u64().unwrap();
    let two_f2 = mulmod(2 % pp, fd_mod, pp);
    let gm = mulmod((pp - f1) % pp, invmod(two_f2, pp), pp);
    let fp = reduce_mod(f, p).poly;
    let walk = gamma_orbit_symbols(&fp, fd_mod, gm);
    if let Some((n, s)) = walk.violation {
        let reason = if s == 0 {
            WitnessReason::SymbolZero
        } else {
            WitnessReason::SymbolNotMinusOne
        };
        return Ok(Verdict::not_stable(n, reason));
    }
    Ok(Verdict {
        kind: VerdictKind::Stable,
        witness: None,
        depth_checked: 0,
        certificate: Some(OrbitCertificate {
            p: pp,
            gamma_mod_p: gm,
            tail_len: walk.tail as u32,
            cycle_len: walk.cycle as u32,
            disc_symbol: disc_sym,
            symbols: walk.symbols,
        }),
    })
}

fn divides_mod(p: u64, v: &BigInt) -> bool {
    v.mod_floor(&BigInt::from(p)).is_zero()
}

/// Earliest n >= 2 at which the orbit value is zero, accounting for
/// recurrence of cycle positions.
fn first_zero_at(rec: &OrbitRecord, zero_pos: usize) -> Option<u64> {
    let rho = rec.tail_len as u64;
    let lam = rec.cycle_len as u64;
    let j = zero_pos as u64;
    if j >= rho {
        let mut n = j;
        while n < 2 {
            n += lam;
        }
        Some(n)
    } else if j >= 2 {
        Some(j)
    } else {
        None
    }
}

/// Earliest n >= 2 with f^(n)(beta) = 0 mod p across all roots beta of h
/// (in their extension fields); None when no squared critical value ever
/// vanishes.
fn squared_part_zero_n(
    f: &IntPoly,
    shape: &ShapeData,
    p: Prime,
    seed: u64,
) -> Result<Option<u64>> {
    if shape.h.degree().unwrap_or(0) < 1 {
        return Ok(None);
    }
    let hp = reduce_mod(&shape.h, p).poly;
    let fp = reduce_mod(f, p).poly;
    let mut best: Option<u64> = None;
    for (m, _) in factor_small(&hp, seed)? {
        let field = if m.deg0() == 1 {
            ExtField::prime_field(p)
        } else {
            ExtField::new(p, m.clone())?
        };
        let beta = if m.deg0() == 1 {
            // root of a linear factor: -m0 / m1
            let pp = p.get();
            let b = mulmod((pp - m.coeff(0)) % pp, invmod(m.coeff(1), pp), pp);
            ModPoly::constant(p, b)
        } else {
            field.generator_root()
        };
        let rec = orbit_mod(&fp, beta, &field);
        if let Some(pos) = rec.points.iter().position(|x| x.is_zero()) {
            if let Some(n) = first_zero_at(&rec, pos) {
                best = Some(best.map_or(n, |b| b.min(n)));
            }
        }
    }
    Ok(best)
}

/// Necessary-condition filter for shaped polynomials of even degree >= 4.
///
/// Evaluates the Legendre symbol of f_d^k * Res(f^(n), f') for all n >= 2
/// through the critical-orbit reduction: the squared critical values
/// contribute a square unless one vanishes mod p, which is detected by
/// orbiting every root of h in its extension field. Never returns Stable.
pub fn shaped_filter(f: &IntPoly, shape: &ShapeData, p: Prime, seed: u64) -> Result<Verdict> {
    let d = f.degree().unwrap_or(0);
    if d < 4 || d % 2 != 0 {
        return Err(Error::Invalid(
            "shaped_filter needs even deg f >= 4".into(),
        ));
    }
    let pp = p.get();
    if !p.is_odd() {
        return Ok(Verdict::degenerate());
    }
    let fd = f.leading().unwrap();
    let degenerate = divides_mod(pp, fd)
        || divides_mod(pp, &shape.a)
        || divides_mod(pp, shape.h.leading().unwrap_or(&BigInt::from(1)))
        || divides_mod(pp, shape.c.numer())
        || divides_mod(pp, shape.c.denom())
        || pp <= d as u64;
    if degenerate {
        return Ok(Verdict::degenerate());
    }

    let disc = discriminant(f)?;
    let disc_sym = match rational_mod_p(&disc, pp) {
        Some(0) | None => 0,
        Some(r) => jacobi_u64(r, pp),
    } as i8;
    if disc_sym != -1 {
        return Ok(Verdict::not_stable(1, WitnessReason::DiscSquare));
    }

    let zero_n = squared_part_zero_n(f, shape, p, seed)?;
    let pb = BigInt::from(pp);
    let fd_mod = fd.mod_floor(&pb).to_u64().unwrap();
    let gm = rational_mod_p(&shape.gamma, pp).expect("p does not divide a");
    let fp = reduce_mod(f, p).poly;
    let walk = gamma_orbit_symbols(&fp, fd_mod, gm);

    let gamma_violation = walk.violation.map(|(n, s)| {
        (
            n as u64,
            if s == 0 {
                WitnessReason::SymbolZero
            } else {
                WitnessReason::SymbolNotMinusOne
            },
        )
    });
    let verdict = match (zero_n, gamma_violation) {
        (Some(z), Some((g, reason))) => {
            if z <= g {
                Some((z, WitnessReason::SymbolZero))
            } else {
                Some((g, reason))
            }
        }
        (Some(z), None) => Some((z, WitnessReason::SymbolZero)),
        (None, Some((g, reason))) => Some((g, reason)),
        (None, None) => None,
    };
    if let Some((n, reason)) = verdict {
        return Ok(Verdict::not_stable(n as u32, reason));
    }
    Ok(Verdict {
        kind: VerdictKind::PassesFilter,
        witness: None,
        depth_checked: 0,
        certificate: Some(OrbitCertificate {
            p: pp,
            gamma_mod_p: gm,
            tail_len: walk.tail as u32,
            cycle_len: walk.cycle as u32,
            disc_symbol: disc_sym,
            symbols: walk.symbols,
        }),
    })
}

/// Symbol of f_d^k * Res(f^(n), f') mod p via the shape shortcut for one
/// n, honestly reproducing zeros from vanishing squared critical values.
/// Test support for cross-checking against [`resultant_symbol_report`].
pub fn shaped_symbol_at(
    f: &IntPoly,
    shape: &ShapeData,
    p: Prime,
    n: u32,
    seed: u64,
) -> Result<i8> {
    let pp = p.get();
    let fp = reduce_mod(f, p).poly;
    // any squared critical value zero at step n?
    let hp = reduce_mod(&shape.h, p).poly;
    if hp.degree().unwrap_or(0) >= 1 {
        for (m, _) in factor_small(&hp, seed)? {
            let field = if m.deg0() == 1 {
                ExtField::prime_field(p)
            } else {
                ExtField::new(p, m.clone())?
            };
            let beta = if m.deg0() == 1 {
                let b = mulmod((pp - m.coeff(0)) % pp, invmod(m.coeff(1), pp), pp);
                ModPoly::constant(p, b)
            } else {
                field.generator_root()
            };
            let mut x = beta;
            for _ in 0..n {
                x = field.eval_poly(&fp, &x);
            }
            if x.is_zero() {
                return Ok(0);
            }
        }
    }
    let pb = BigInt::from(pp);
    let fd_mod = f.leading().unwrap().mod_floor(&pb).to_u64().unwrap();
    let gm = rational_mod_p(&shape.gamma, pp)
        .ok_or_else(|| Error::Invalid("degenerate prime for shape".into()))?;
    let mut x = gm;
    for _ in 0..n {
        x = fp.eval(x);
    }
    let v = mulmod(fd_mod, x, pp);
    Ok(if v == 0 { 0 } else { jacobi_u64(v, pp) as i8 })
}

/// One row of the direct resultant-symbol table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SymbolRow {
    pub n: u32,
    /// 1 for even degree (nonsquare branch), 2 for odd (square branch).
    pub branch: u8,
    pub value_mod_p: u64,
    pub symbol: i8,
}

/// Legendre symbols of the parity-branch resultant quantities, computed
/// directly on materialized iterates mod p (no shape shortcut):
/// even d: f_d^k * Res(f^(n), f'); odd d: (-1)^((d-1)/2) f_d^((n-1)k+1)
/// * Res(f^(n), f'), for 2 <= n <= n_max.
pub fn resultant_symbol_report(
    f: &IntPoly,
    p: Prime,
    n_max: u32,
    guard: u64,
) -> Result<Vec<SymbolRow>> {
    let d = f
        .degree()
        .filter(|&d| d >= 2)
        .ok_or_else(|| Error::Invalid("need deg f >= 2".into()))?;
    if !p.is_odd() {
        return Err(Error::Invalid("resultant symbols need odd p".into()));
    }
    let pp = p.get();
    let red = reduce_mod(f, p);
    let dred = reduce_mod(&f.derivative(), p);
    if red.degree_dropped || dred.degree_dropped {
        return Err(Error::Invalid(format!(
            "degenerate prime {p}: degree drops in f or f'"
        )));
    }
    let fp = red.poly;
    let dfp = dred.poly;
    let k = f.derivative().deg0() as u64;
    let branch: u8 = if d % 2 == 0 { 1 } else { 2 };
    let fd_mod = fp.leading();
    let mut rows = Vec::new();
    if n_max < 2 {
        return Ok(rows);
    }
    let mut iter = fp.clone();
    for n in 2..=n_max {
        let required = (d as u128).checked_pow(n).unwrap_or(u128::MAX);
        if required > guard as u128 {
            return Err(Error::DegreeGuard { required, guard });
        }
        iter = fp.compose(&iter);
        let res = resultant_mod(&iter, &dfp);
        let value = if branch == 1 {
            mulmod(powmod_u64(fd_mod, k, pp), res, pp)
        } else {
            let e = (n as u64 - 1) * k + 1;
            let mut v = mulmod(powmod_u64(fd_mod, e, pp), res, pp);
            if ((d - 1) / 2) % 2 == 1 {
                v = (pp - v) % pp;
            }
            v
        };
        let symbol = if value == 0 {
            0
        } else {
            jacobi_u64(value, pp)
        } as i8;
        rows.push(SymbolRow {
            n,
            branch,
            value_mod_p: value,
            symbol,
        });
    }
    Ok(rows)
}

/// Rabin-tests the reductions of f^(n) for n = 1..n_max.
pub fn depth_capped(f: &IntPoly, p: Prime, n_max: u32, guard: u64) -> Result<Verdict> {
    let red = reduce_mod(f, p);
    let fp = red.poly;
    let d = match fp.degree() {
        None | Some(0) => return Ok(Verdict::degenerate()),
        Some(d) => d,
    };
    let mut iter = fp.clone();
    for n in 1..=n_max {
        let required = (d as u128).checked_pow(n).unwrap_or(u128::MAX);
        if required > guard as u128 {
            return Err(Error::DegreeGuard { required, guard });
        }
        if n > 1 {
            iter = fp.compose(&iter);
        }
        if !is_irreducible(&iter) {
            return Ok(Verdict {
                kind: VerdictKind::NotStable,
                witness: Some(Witness {
                    n,
                    reason: WitnessReason::ReducibleAt,
                }),
                depth_checked: n,
                certificate: None,
            });
        }
    }
    Ok(Verdict {
        kind: VerdictKind::Unknown,
        witness: None,
        depth_checked: n_max,
        certificate: None,
    })
}

/// Dispatcher: exact for quadratics, shape filter with a Rabin tie-break
/// for shaped even degrees, depth-capped Rabin otherwise. NotStable from
/// any sub-method wins; Stable only ever comes from the quadratic path.
pub fn stability_verdict(f: &IntPoly, p: Prime, opts: &StabilityOptions) -> Result<Verdict> {
    let d = f
        .degree()
        .ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    let depth = opts.depth.unwrap_or_else(|| default_depth(d));
    match opts.policy {
        Policy::Exact => {
            if d != 2 {
                return Err(Error::Invalid(format!(
                    "policy exact needs deg f = 2, got {d}"
                )));
            }
            quadratic_stability(f, p)
        }
        Policy::Filter => {
            let shape = detect_shape(f).ok_or_else(|| {
                Error::Invalid("policy filter needs a shaped derivative".into())
            })?;
            if d < 4 || d % 2 != 0 {
                return Err(Error::Invalid(format!(
                    "policy filter needs even deg f >= 4, got {d}"
                )));
            }
            shaped_filter(f, &shape, p, opts.seed)
        }
        Policy::Rabin => depth_capped(f, p, depth, opts.degree_guard),
        Policy::Auto => {
            if d == 2 {
                let v = quadratic_stability(f, p)?;
                if v.kind == VerdictKind::Degenerate {
                    return depth_capped(f, p, depth, opts.degree_guard);
                }
                return Ok(v);
            }
            if d >= 4 && d % 2 == 0 {
                if let Some(shape) = detect_shape(f) {
                    let v = shaped_filter(f, &shape, p, opts.seed)?;
                    match v.kind {
                        VerdictKind::Degenerate => {
                            return depth_capped(f, p, depth, opts.degree_guard)
                        }
                        VerdictKind::NotStable => return Ok(v),
                        _ => {
                            let r = depth_capped(f, p, depth, opts.degree_guard)?;
                            if r.kind == VerdictKind::NotStable {
                                return Ok(r);
                            }
                            let mut out = v;
                            out.depth_checked = r.depth_checked;
                            return Ok(out);
                        }
                    }
                }
            }
            depth_capped(f, p, depth, opts.degree_guard)
        }
    }
}
