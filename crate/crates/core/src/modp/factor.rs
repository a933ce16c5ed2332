//! Full factorization over F_p for small degrees: squarefree split,
//! distinct-degree, then equal-degree Cantor-Zassenhaus with seeded
//! randomness (trace splitting for p = 2).

use num_bigint::BigUint;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ModPoly, Prime};
use crate::error::{Error, Result};

const MAX_FACTOR_DEGREE: usize = 64;

/// Factors a nonzero polynomial of degree <= 64 into monic irreducibles
/// with multiplicities. The product of the factors equals the monic part
/// of the input. Randomized splitting is seeded deterministically from
/// `seed` and the input, so results do not depend on call order.
pub fn factor_small(f: &ModPoly, seed: u64) -> Result<Vec<(ModPoly, u32)>> {
    let deg = match f.degree() {
        None => return Err(Error::Invalid("cannot factor the zero polynomial".into())),
        Some(d) => d,
    };
    if deg > MAX_FACTOR_DEGREE {
        return Err(Error::Invalid(format!(
            "factor_small caps at degree {MAX_FACTOR_DEGREE}, got {deg}"
        )));
    }
    if deg == 0 {
        return Ok(vec![]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, f));
    let mut out: Vec<(ModPoly, u32)> = Vec::new();
    for (g, mult) in squarefree_split(&f.monic()) {
        for (h, k) in distinct_degree(&g) {
            for irr in equal_degree(&h, k, &mut rng) {
                merge(&mut out, irr, mult);
            }
        }
    }
    out.sort_by(|a, b| (a.0.deg0(), a.0.coeffs()).cmp(&(b.0.deg0(), b.0.coeffs())));
    Ok(out)
}

fn merge(out: &mut Vec<(ModPoly, u32)>, f: ModPoly, mult: u32) {
    for (g, m) in out.iter_mut() {
        if *g == f {
            *m += mult;
            return;
        }
    }
    out.push((f, mult));
}

fn mix_seed(seed: u64, f: &ModPoly) -> u64 {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    h = splitmix(h ^ f.modulus_value());
    for &c in f.coeffs() {
        h = splitmix(h ^ c);
    }
    h
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Monic squarefree decomposition over F_p, handling the p-th power case
/// f = g(x^p) (over the prime field, coefficients are their own p-th roots).
fn squarefree_split(f: &ModPoly) -> Vec<(ModPoly, u32)> {
    let p = f.prime();
    let pv = f.modulus_value();
    if f.is_constant() {
        return vec![];
    }
    let df = f.derivative();
    if df.is_zero() {
        // f(x) = g(x^p); recurse on g with multiplicity scaled by p.
        let mut g_coeffs = Vec::new();
        let mut i = 0usize;
        while i <= f.deg0() {
            g_coeffs.push(f.coeff(i));
            i += pv as usize;
        }
        let g = ModPoly::new(p, g_coeffs);
        return squarefree_split(&g)
            .into_iter()
            .map(|(h, m)| (h, m * pv as u32))
            .collect();
    }
    let mut out = Vec::new();
    let mut c = f.gcd(&df);
    let mut w = f.div_rem(&c).0;
    let mut i = 1u32;
    while !w.is_constant() {
        let y = w.gcd(&c);
        let fac = w.div_rem(&y).0;
        if !fac.is_constant() {
            out.push((fac.monic(), i));
        }
        w = y.clone();
        c = c.div_rem(&y).0;
        i += 1;
    }
    if !c.is_constant() {
        // Remaining part is a p-th power.
        for (h, m) in squarefree_split(&c) {
            out.push((h, m * pv as u32));
        }
    }
    out
}

/// Splits a monic squarefree polynomial into products of irreducibles of
/// equal degree: returns (product, degree) pairs.
fn distinct_degree(f: &ModPoly) -> Vec<(ModPoly, usize)> {
    let p = f.prime();
    let pv = f.modulus_value();
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = ModPoly::x(p);
    let mut frob = x.clone();
    let mut k = 0usize;
    while rest.deg0() >= 1 {
        k += 1;
        if 2 * k > rest.deg0() {
            // Remainder is irreducible of its own degree.
            out.push((rest.clone(), rest.deg0()));
            break;
        }
        frob = frob.powmod(pv, &rest);
        let g = rest.gcd(&frob.sub(&x));
        if !g.is_constant() {
            out.push((g.clone(), k));
            rest = rest.div_rem(&g).0;
            frob = frob.rem(&rest);
        }
    }
    out
}

/// Cantor-Zassenhaus equal-degree splitting of a monic product of
/// distinct irreducibles of degree k.
fn equal_degree(f: &ModPoly, k: usize, rng: &mut ChaCha8Rng) -> Vec<ModPoly> {
    if f.deg0() == k {
        return vec![f.monic()];
    }
    let p = f.prime();
    let pv = f.modulus_value();
    let split = loop {
        let r = random_poly(p, f.deg0(), rng);
        if r.is_constant() {
            continue;
        }
        let g = f.gcd(&r);
        if !g.is_constant() && g.deg0() < f.deg0() {
            break g; // lucky split by a shared factor
        }
        let candidate = if pv == 2 {
            // Trace map over F_2: r + r^2 + r^4 + ... (k terms)
            let mut acc = ModPoly::zero(p);
            let mut t = r.rem(f);
            for _ in 0..k {
                acc = acc.add(&t);
                t = t.mul(&t).rem(f);
            }
            acc
        } else {
            // r^((p^k - 1)/2) - 1 splits the roots by quadratic character.
            let exp = (BigUint::from(pv).pow(k as u32) - BigUint::one()) / BigUint::from(2u32);
            let one = ModPoly::constant(p, 1);
            r.powmod_big(&exp, f).sub(&one)
        };
        if candidate.is_zero() {
            continue;
        }
        let g = f.gcd(&candidate);
        if !g.is_constant() && g.deg0() < f.deg0() {
            break g;
        }
    };
    let other = f.div_rem(&split).0;
    let mut out = equal_degree(&split, k, rng);
    out.extend(equal_degree(&other, k, rng));
    out
}

fn random_poly(p: Prime, max_deg: usize, rng: &mut ChaCha8Rng) -> ModPoly {
    let len = rng.gen_range(1..=max_deg.max(1));
    let pv = p.get();
    let coeffs = (0..=len).map(|_| rng.gen_range(0..pv)).collect();
    ModPoly::new(p, coeffs)
}

/// Recombines a factorization into the monic product (test support).
#[cfg(test)]
pub(crate) fn product_of(factors: &[(ModPoly, u32)], p: Prime) -> ModPoly {
    let mut acc = ModPoly::constant(p, 1);
    for (f, m) in factors {
        for _ in 0..*m {
            acc = acc.mul(f);
        }
    }
    acc
}
