//! Independent oracles shared by the integration suites. Everything here
//! recomputes results by a different route than the library (determinant
//! instead of remainder sequences, trial division instead of Rabin,
//! bounded brute force instead of exact rules).

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use std::collections::HashSet;

use dynirr_core::modp::ModPoly;
use dynirr_core::poly::IntPoly;

/// Exact determinant by Bareiss fraction-free elimination.
pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// Resultant as the Sylvester determinant.
pub fn sylvester_resultant(a: &IntPoly, b: &IntPoly) -> BigInt {
    let d = a.degree().expect("nonzero a");
    let e = b.degree().expect("nonzero b");
    if d + e == 0 {
        return BigInt::one();
    }
    let n = d + e;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..e {
        for j in 0..=d {
            m[i][i + j] = a.coeff(d - j);
        }
    }
    for i in 0..d {
        for j in 0..=e {
            m[e + i][i + j] = b.coeff(e - j);
        }
    }
    bareiss_det(m)
}

/// Bounded brute-force pre-periodicity: iterate up to 5000 steps, declare
/// escape once numerator or denominator passes 10^6.
pub fn brute_force_preperiodic(f: &IntPoly, x0: &BigRational) -> bool {
    let cap = BigInt::from(1_000_000u64);
    let mut seen: HashSet<BigRational> = HashSet::new();
    let mut x = x0.clone();
    for _ in 0..5000 {
        if x.numer().abs() > cap || x.denom().abs() > cap {
            return false;
        }
        if !seen.insert(x.clone()) {
            return true;
        }
        x = f.eval_rational(&x);
    }
    false
}

/// Irreducibility by trial division with every monic polynomial of degree
/// up to deg/2. Only sensible for tiny p and degree.
pub fn exhaustive_irreducible(f: &ModPoly) -> bool {
    let n = match f.degree() {
        None | Some(0) => return false,
        Some(1) => return true,
        Some(n) => n,
    };
    let p = f.modulus_value();
    for k in 1..=n / 2 {
        let mut coeffs = vec![0u64; k + 1];
        coeffs[k] = 1;
        'candidates: loop {
            let div = ModPoly::new(f.prime(), coeffs.clone());
            if f.rem(&div).is_zero() {
                return false;
            }
            for i in 0..k {
                coeffs[i] += 1;
                if coeffs[i] < p {
                    continue 'candidates;
                }
                coeffs[i] = 0;
            }
            break;
        }
    }
    true
}

/// Plain sieve of Eratosthenes prime count on [2, n].
pub fn simple_prime_count(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut count = 0u64;
    for i in 2..=n {
        if !composite[i] {
            count += 1;
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    count
}

/// Random integer polynomial with degree drawn from the range and
/// |coeffs| <= bound.
pub fn random_poly(
    rng: &mut impl Rng,
    degrees: std::ops::RangeInclusive<usize>,
    bound: i64,
) -> IntPoly {
    let degree = rng.gen_range(degrees);
    loop {
        let mut cs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-bound..=bound)).collect();
        if cs[degree] == 0 {
            cs[degree] = 1;
        }
        let p = IntPoly::from_i64s(&cs);
        if p.degree() == Some(degree) {
            return p;
        }
    }
}

pub fn random_rational(rng: &mut impl Rng, bound: i64) -> BigRational {
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
