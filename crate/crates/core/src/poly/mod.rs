//! Exact polynomial arithmetic over Z and Q.
//!
//! `IntPoly` is a dense integer polynomial with arbitrary-precision
//! coefficients stored in ascending order. Everything here is exact:
//! iteration and composition, subresultant resultants, Yun squarefree
//! decomposition, and detection of derivatives of the shape
//! `c * h(X)^2 * (aX + b)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

use crate::error::{Error, Result};

mod parse;
pub use parse::{parse_poly, parse_rational};

/// Default cap on the degree of any materialized polynomial.
pub const DEFAULT_DEGREE_GUARD: u64 = 1 << 20;

/// Natural log of |x|; returns negative infinity for zero.
///
/// Works for integers far beyond f64 range by splitting off the bit length.
pub fn ln_big(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 52 {
        return mag.to_f64().expect("fits f64").ln();
    }
    let top: BigInt = (x.abs()) >> (bits - 52);
    let m = top.to_f64().expect("52 bits fit f64");
    m.ln() + (bits - 52) as f64 * std::f64::consts::LN_2
}

/// Dense integer polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds a polynomial from ascending coefficients, trimming trailing zeros.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial X.
    pub fn x() -> Self {
        IntPoly {
            coeffs: vec![BigInt::zero(), BigInt::one()],
        }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of X^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree treating the zero polynomial as degree 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn neg(&self) -> Self {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn mul_scalar(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(BigInt::one());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::new(out)
    }

    /// Composition self(g) by Horner over Z.
    pub fn compose(&self, g: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(g);
            acc = acc.add(&Self::constant(c.clone()));
        }
        acc
    }

    /// n-th iterate under self-composition; the 0-th iterate is X.
    ///
    /// The resulting degree d^n must stay within `guard`.
    pub fn iterate(&self, n: u32, guard: u64) -> Result<Self> {
        let d = self.deg0() as u128;
        let required = checked_pow_u128(d.max(1), n);
        match required {
            Some(r) if r <= guard as u128 => {}
            other => {
                return Err(Error::DegreeGuard {
                    required: other.unwrap_or(u128::MAX),
                    guard,
                })
            }
        }
        let mut acc = Self::x();
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        Ok(acc)
    }

    /// Exact Horner evaluation at an integer point.
    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact Horner evaluation at a rational point, reduced.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from(c.clone());
        }
        acc
    }

    /// Positive gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    /// Divides out the content and normalizes the leading coefficient to be positive.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut g = self.content();
        if self.leading().unwrap().is_negative() {
            g = -g;
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    pub fn to_q(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .map(|c| BigRational::from(c.clone()))
                .collect(),
        )
    }

    /// Canonical ascending coefficient list, e.g. `coeffs:6,-4,1`.
    pub fn coeffs_string(&self) -> String {
        if self.is_zero() {
            return "coeffs:0".into();
        }
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        format!("coeffs:{}", body.join(","))
    }
}

impl fmt::Display for IntPoly {
    /// Human-readable expression in the input grammar (descending powers).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            if i == 0 {
                write!(f, "{}", mag)?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag)?;
                }
                if i == 1 {
                    write!(f, "x")?;
                } else {
                    write!(f, "x^{}", i)?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self.coeffs_string())
    }
}

fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Dense polynomial over Q, ascending coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, Zero::is_zero) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        QPoly {
            coeffs: vec![BigRational::zero(), BigRational::one()],
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs
            .get(i)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn mul_scalar(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Exact Euclidean division; divisor must be nonzero.
    pub fn div_rem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.deg0();
        let lead_inv = div.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd || (dd == 0 && !rem.is_empty() && !quot.is_empty()) {
            if rem.len() < dd + 1 {
                break;
            }
            let k = rem.len() - 1 - dd;
            let q = rem.last().unwrap() * &lead_inv;
            if !q.is_zero() {
                for (j, c) in div.coeffs.iter().enumerate() {
                    let t = &q * c;
                    rem[k + j] -= t;
                }
            }
            if k < quot.len() {
                quot[k] = q;
            }
            // Leading term is now exactly zero.
            rem.pop();
            while rem.last().map_or(false, Zero::is_zero) {
                rem.pop();
            }
            if rem.len() <= dd {
                break;
            }
        }
        (Self::new(quot), Self::new(rem))
    }

    pub fn rem(&self, div: &Self) -> Self {
        self.div_rem(div).1
    }

    /// Exact division; panics if the division leaves a remainder.
    pub fn div_exact(&self, div: &Self) -> Self {
        let (q, r) = self.div_rem(div);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.mul_scalar(&l.recip()),
        }
    }

    /// Writes self = c * prim with prim a primitive integer polynomial
    /// having positive leading coefficient. Zero maps to (0, 0).
    pub fn primitive_int(&self) -> (BigRational, IntPoly) {
        if self.is_zero() {
            return (BigRational::zero(), IntPoly::zero());
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let as_int = IntPoly::new(ints);
        let prim = as_int.primitive();
        let mut cont = as_int.content();
        if as_int.leading().unwrap().is_negative() {
            cont = -cont;
        }
        (BigRational::new(cont, den), prim)
    }
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "QPoly[{}]", body.join(","))
    }
}

/// Monic gcd over Q by the Euclidean algorithm.
pub fn gcd_q(a: &QPoly, b: &QPoly) -> QPoly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

/// Resultant over Q by the Euclidean algorithm with leading-coefficient
/// bookkeeping. Intended for small degrees; exact.
pub fn resultant_q(a: &QPoly, b: &QPoly) -> BigRational {
    if a.is_zero() || b.is_zero() {
        return BigRational::zero();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = BigRational::one();
    let mut neg = false;
    loop {
        let da = a.deg0();
        let db = b.deg0();
        if db == 0 {
            let lb = b.coeff(0);
            return sign_apply(acc * rat_pow(&lb, da as i64), neg);
        }
        let r = a.rem(&b);
        if r.is_zero() {
            return BigRational::zero();
        }
        let dr = r.deg0();
        if (da * db) % 2 == 1 {
            neg = !neg;
        }
        acc *= rat_pow(b.leading().unwrap(), (da - dr) as i64);
        a = b;
        b = r;
    }
}

fn sign_apply(x: BigRational, neg: bool) -> BigRational {
    if neg {
        -x
    } else {
        x
    }
}

fn rat_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp == 0 {
        return BigRational::one();
    }
    let mag = base.pow(exp.unsigned_abs() as u32 as i32);
    if exp < 0 {
        mag.recip()
    } else {
        mag
    }
}

fn int_pow_rat(base: &BigInt, exp: i64) -> BigRational {
    rat_pow(&BigRational::from(base.clone()), exp)
}

/// Pseudo-remainder: lc(B)^(deg A - deg B + 1) * A = Q*B + R with deg R < deg B.
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let db = b.deg0();
    let lb = b.leading().expect("nonzero divisor").clone();
    let mut r = a.coeffs.clone();
    // One lc(B) scaling per elimination step; top up to the full
    // lc(B)^(delta+1) afterwards so degree gaps keep the exact definition.
    let mut scale_left = (a.deg0() - db) as i64 + 1;
    while r.len() > db {
        let lead = r.last().unwrap().clone();
        let k = r.len() - 1 - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        scale_left -= 1;
        for (j, bc) in b.coeffs.iter().enumerate() {
            r[k + j] -= &lead * bc;
        }
        while r.last().map_or(false, Zero::is_zero) {
            r.pop();
        }
    }
    let mut out = IntPoly::new(r);
    for _ in 0..scale_left {
        out = out.mul_scalar(&lb);
    }
    out
}

/// Resultant of two integer polynomials by the subresultant polynomial
/// remainder sequence: remainders stay integral with controlled growth,
/// with an exact rational correction factor accumulated on the side.
pub fn resultant_int(a: &IntPoly, b: &IntPoly) -> BigInt {
    if a.is_zero() || b.is_zero() {
        return BigInt::zero();
    }
    let (mut a, mut b, mut neg) = if a.deg0() >= b.deg0() {
        (a.clone(), b.clone(), false)
    } else {
        ((*b).clone(), a.clone(), (a.deg0() * b.deg0()) % 2 == 1)
    };
    if a.deg0() == 0 {
        // Two nonzero constants.
        return BigInt::one();
    }
    let mut factor = BigRational::one();
    let mut g = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.deg0();
        let db = b.deg0();
        if db == 0 {
            let res = factor * int_pow_rat(&b.coeff(0), da as i64);
            let res = sign_apply(res, neg);
            debug_assert!(res.is_integer(), "resultant must be an integer");
            return res.to_integer();
        }
        let delta = (da - db) as i64;
        let r = pseudo_rem(&a, &b);
        if r.is_zero() {
            return BigInt::zero();
        }
        let dr = r.deg0() as i64;
        let lb = b.leading().unwrap().clone();
        // Res(A,B) = (-1)^(dA*dB) lc(B)^(dA - dR - (delta+1) dB) Res(B, R)
        if (da * db) % 2 == 1 {
            neg = !neg;
        }
        factor *= int_pow_rat(&lb, da as i64 - dr - (delta + 1) * db as i64);
        // Subresultant scaling R -> R / (g h^delta); Res(B,R) picks up divisor^dB.
        let divisor = &g * pow_big(&h, delta as u32);
        let reduced = IntPoly::new(r.coeffs.iter().map(|c| c / &divisor).collect());
        factor *= int_pow_rat(&divisor, db as i64);
        a = b;
        b = reduced;
        g = lb;
        h = if delta == 0 {
            h
        } else {
            // h^(1-delta) g^delta, an exact integer division for delta > 1
            let num = pow_big(&g, delta as u32);
            let den = pow_big(&h, (delta - 1) as u32);
            &num / &den
        };
    }
}

fn pow_big(x: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= x;
    }
    acc
}

/// Remainder of the n-th iterate of `f` modulo `m`, computed inside the
/// quotient ring Q[X]/(m) without materializing f^(n).
///
/// The result is the exact remainder in Q[X]; clear denominators with
/// [`QPoly::primitive_int`] when a scaled integer form is wanted.
pub fn iterate_mod(f: &IntPoly, n: u32, m: &IntPoly) -> Result<QPoly> {
    if m.deg0() < 1 || m.is_zero() {
        return Err(Error::Invalid("modulus must be nonconstant".into()));
    }
    let mq = m.to_q();
    let fq = f.to_q();
    let mut acc = QPoly::x().rem(&mq);
    for _ in 0..n {
        acc = compose_mod_q(&fq, &acc, &mq);
    }
    Ok(acc)
}

fn compose_mod_q(f: &QPoly, x: &QPoly, m: &QPoly) -> QPoly {
    let mut acc = QPoly::zero();
    for c in f.coeffs.iter().rev() {
        acc = acc.mul(x).rem(m);
        acc = acc.add(&QPoly::constant(c.clone()));
    }
    acc.rem(m)
}

/// Res(f^(n), f') for n >= 1 without materializing the iterate: reduce
/// f^(n) modulo f' in the quotient ring, then finish on the small pair.
///
/// d^n must stay within `guard` (it appears as an exponent of the
/// leading coefficient, so the output has O(d^n) digits).
pub fn iterate_resultant(f: &IntPoly, n: u32, guard: u64) -> Result<BigInt> {
    let d = f.degree().ok_or_else(|| Error::Invalid("zero polynomial".into()))?;
    if d < 2 {
        return Err(Error::Invalid(
            "iterate resultant needs deg f >= 2 (nonconstant derivative)".into(),
        ));
    }
    let big_d = checked_pow_u128(d as u128, n);
    let big_d = match big_d {
        Some(v) if v <= guard as u128 => v,
        other => {
            return Err(Error::DegreeGuard {
                required: other.unwrap_or(u128::MAX),
                guard,
            })
        }
    };
    let fp = f.derivative();
    let k = fp.deg0();
    let r = iterate_mod(f, n, &fp)?;
    if r.is_zero() {
        return Ok(BigInt::zero());
    }
    // Res(F, G) = (-1)^(deg F * deg G) lc(G)^(deg F - deg R) Res(G, R)
    let lc = fp.leading().unwrap().clone();
    let exp = big_d - r.deg0() as u128;
    let lc_pow = rat_pow(
        &BigRational::from(lc),
        i64::try_from(exp).map_err(|_| Error::DegreeGuard {
            required: exp,
            guard,
        })?,
    );
    let tail = resultant_q(&fp.to_q(), &r);
    let mut res = lc_pow * tail;
    if (big_d % 2 == 1) && (k % 2 == 1) {
        res = -res;
    }
    debug_assert!(res.is_integer());
    Ok(res.to_integer())
}

/// Yun's squarefree decomposition over Q, scaled back to primitive
/// integer factors: f = content * prod factor_i^mult_i.
pub fn squarefree_decomposition(f: &IntPoly) -> Result<(BigRational, Vec<(IntPoly, u32)>)> {
    if f.degree().unwrap_or(0) < 1 {
        return Err(Error::Invalid(
            "squarefree decomposition needs a nonconstant polynomial".into(),
        ));
    }
    let fq = f.to_q();
    let dfq = fq.derivative();
    let mut factors: Vec<(IntPoly, u32)> = Vec::new();

    let a0 = gcd_q(&fq, &dfq);
    let mut b = fq.div_exact(&a0);
    let c0 = dfq.div_exact(&a0);
    let mut d = c0.sub(&b.derivative());
    let mut i = 1u32;
    while !b.is_constant() {
        let a = gcd_q(&b, &d);
        if !a.is_constant() {
            let (_, prim) = a.primitive_int();
            factors.push((prim, i));
        }
        let b_next = b.div_exact(&a);
        let c_next = d.div_exact(&a);
        d = c_next.sub(&b_next.derivative());
        b = b_next;
        i += 1;
    }

    // Exact content: divide f by the reassembled product.
    let mut prod = QPoly::constant(BigRational::one());
    for (fac, m) in &factors {
        let mut fq = fac.to_q();
        let mut acc = QPoly::constant(BigRational::one());
        let mut e = *m;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&fq);
            }
            e >>= 1;
            if e > 0 {
                fq = fq.mul(&fq);
            }
        }
        prod = prod.mul(&acc);
    }
    let content_poly = f.to_q().div_exact(&prod);
    debug_assert!(content_poly.is_constant());
    Ok((content_poly.coeff(0), factors))
}

/// Exact data of a derivative of the shape f' = c * h(X)^2 * (aX + b).
#[derive(Clone, Debug)]
pub struct ShapeData {
    /// Constant factor making the identity exact in Q[X].
    pub c: BigRational,
    /// Primitive squared part.
    pub h: IntPoly,
    pub a: BigInt,
    pub b: BigInt,
    /// The distinguished simple critical point -b/a, in lowest terms.
    pub gamma: BigRational,
}

impl ShapeData {
    /// Checks the defining identity c * h^2 * (aX+b) == f' exactly.
    pub fn verify(&self, f: &IntPoly) -> bool {
        let lin = QPoly::new(vec![
            BigRational::from(self.b.clone()),
            BigRational::from(self.a.clone()),
        ]);
        let h2 = self.h.to_q().mul(&self.h.to_q());
        let rebuilt = h2.mul(&lin).mul_scalar(&self.c);
        rebuilt == f.derivative().to_q()
    }

    /// Integral witnesses (g, a', b') with f' = g(X)^2 (a'X + b'), g in Z[X].
    ///
    /// For integer input polynomials c is an integer, so folding it into the
    /// linear factor always works; returns None only for fractional c.
    pub fn integral_form(&self) -> Option<(IntPoly, BigInt, BigInt)> {
        if !self.c.is_integer() {
            return None;
        }
        let c = self.c.to_integer();
        Some((self.h.clone(), &c * &self.a, &c * &self.b))
    }
}

/// Detects whether f' factors over Q as c * h(X)^2 * (aX + b).
///
/// Returns None when deg f < 2 or the odd-multiplicity part of f' is not
/// linear. Absence of the shape is not an error.
pub fn detect_shape(f: &IntPoly) -> Option<ShapeData> {
    if f.degree().unwrap_or(0) < 2 {
        return None;
    }
    let df = f.derivative();
    let (content, factors) = squarefree_decomposition(&df).ok()?;
    let mut odd = IntPoly::constant(BigInt::one());
    let mut h = IntPoly::constant(BigInt::one());
    for (fac, m) in &factors {
        if m % 2 == 1 {
            odd = odd.mul(fac);
        }
        h = h.mul(&fac.pow(m / 2));
    }
    if odd.degree() != Some(1) {
        return None;
    }
    let a = odd.coeff(1);
    let b = odd.coeff(0);
    let gamma = BigRational::new(-&b, a.clone());
    let shape = ShapeData {
        c: content,
        h,
        a,
        b,
        gamma,
    };
    debug_assert!(shape.verify(f));
    Some(shape)
}

/// Discriminant (-1)^(d(d-1)/2) * Res(f, f') / lc(f), for deg f >= 2.
pub fn discriminant(f: &IntPoly) -> Result<BigRational> {
    let d = f.degree().unwrap_or(0);
    if d < 2 {
        return Err(Error::Invalid("discriminant needs deg f >= 2".into()));
    }
    let res = resultant_int(f, &f.derivative());
    let lead = f.leading().unwrap().clone();
    let mut out = BigRational::new(res, lead);
    if (d * (d - 1) / 2) % 2 == 1 {
        out = -out;
    }
    Ok(out)
}
