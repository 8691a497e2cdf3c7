//! Finite fields GF(p^s) with trace and additive characters.
//!
//! Elements are indices in `0..q`. In an extension field the index of
//! `c_0 + c_1 x + ... + c_{s-1} x^{s-1}` is `c_0 + c_1 p + ... + c_{s-1} p^{s-1}`.
//! Multiplication uses exp/log tables over the lowest monic irreducible
//! polynomial, ordered by the integer value of its lower coefficients.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Field element index.
pub type Elem = u16;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Field descriptor written as `p^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct FieldSpec {
    pub p: u32,
    pub s: u32,
}

impl FieldSpec {
    pub fn new(p: u32, s: u32) -> Self {
        FieldSpec { p, s }
    }

    /// Field order, `None` on overflow.
    pub fn order(&self) -> Option<u32> {
        self.p.checked_pow(self.s)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.s)
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::BadFieldSpec(text.to_string());
        let (p, s) = match text.trim().split_once('^') {
            Some((p, s)) => (p.trim(), s.trim()),
            None => (text.trim(), "1"),
        };
        let p: u32 = p.parse().map_err(|_| bad())?;
        let s: u32 = s.parse().map_err(|_| bad())?;
        if s == 0 {
            return Err(bad());
        }
        Ok(FieldSpec { p, s })
    }
}

impl TryFrom<String> for FieldSpec {
    type Error = Error;
    fn try_from(text: String) -> Result<Self> {
        text.parse()
    }
}

impl From<FieldSpec> for String {
    fn from(spec: FieldSpec) -> String {
        spec.to_string()
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The finite field GF(p^s).
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    s: u32,
    q: u32,
    /// Monic modulus, constant term first. Empty for prime fields.
    modulus: Vec<u32>,
    generator: Elem,
    /// `exp[i] = g^i`, stored twice over so that `log a + log b` needs no reduction.
    exp: Vec<Elem>,
    log: Vec<u32>,
    trace: Vec<u16>,
    neg: Vec<Elem>,
    add_table: Option<Vec<Elem>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.s)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.s == other.s
    }
}

impl Eq for FiniteField {}

fn digits(mut a: u32, p: u32, s: usize) -> Vec<u32> {
    let mut d = vec![0; s];
    for slot in d.iter_mut() {
        *slot = a % p;
        a /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` (both constant term first).
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let off = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                r[off + i] = (r[off + i] + (p - lead) * c % p) % p;
            }
        }
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let mut r = poly_rem(&prod, m, p);
    r.resize(m.len() - 1, 0);
    r
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let s = m.len() - 1;
    for d in 1..=s / 2 {
        for low in 0..p.pow(d as u32) {
            let mut f = digits(low, p, d);
            f.push(1);
            if poly_rem(m, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// Builds GF(p^s).
    pub fn new(p: u32, s: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 {
            return Err(Error::BadFieldSpec(format!("{p}^0")));
        }
        let q = match p.checked_pow(s) {
            Some(q) if q <= MAX_ORDER => q,
            _ => return Err(Error::FieldTooLarge { p, s }),
        };
        let su = s as usize;
        let modulus = if s == 1 {
            Vec::new()
        } else {
            (0..q)
                .map(|low| {
                    let mut m = digits(low, p, su);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .expect("an irreducible polynomial exists in every degree")
        };

        let mul_slow = |a: u32, b: u32| -> u32 {
            if s == 1 {
                a * b % p
            } else {
                undigits(&poly_mulmod(&digits(a, p, su), &digits(b, p, su), &modulus, p), p)
            }
        };

        // smallest element of multiplicative order q - 1
        let mut generator = 0u32;
        let mut powers = Vec::with_capacity((q - 1) as usize);
        for g in 1..q {
            powers.clear();
            let mut x = 1u32;
            loop {
                powers.push(x);
                x = mul_slow(x, g);
                if x == 1 {
                    break;
                }
            }
            if powers.len() == (q - 1) as usize {
                generator = g;
                break;
            }
        }

        let order = (q - 1) as usize;
        let mut exp = vec![0 as Elem; 2 * order];
        let mut log = vec![0u32; q as usize];
        for (i, &x) in powers.iter().enumerate() {
            exp[i] = x as Elem;
            exp[i + order] = x as Elem;
            log[x as usize] = i as u32;
        }

        let neg: Vec<Elem> = (0..q)
            .map(|a| undigits(&digits(a, p, su).iter().map(|&c| (p - c) % p).collect::<Vec<_>>(), p) as Elem)
            .collect();

        let add_table = if s > 1 && p != 2 && q <= 256 {
            let mut t = vec![0 as Elem; (q * q) as usize];
            for a in 0..q {
                let da = digits(a, p, su);
                for b in 0..q {
                    let db = digits(b, p, su);
                    let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                    t[(a * q + b) as usize] = undigits(&sum, p) as Elem;
                }
            }
            Some(t)
        } else {
            None
        };

        let mut field = FiniteField {
            p,
            s,
            q,
            modulus,
            generator: generator as Elem,
            exp,
            log,
            trace: Vec::new(),
            neg,
            add_table,
        };
        let trace = (0..q)
            .map(|a| {
                let mut acc = 0 as Elem;
                let mut frob = a as Elem;
                for _ in 0..s {
                    acc = field.add(acc, frob);
                    frob = field.pow(frob, p as u64);
                }
                debug_assert!((acc as u32) < p, "trace leaves the prime subfield");
                acc
            })
            .collect();
        field.trace = trace;
        Ok(field)
    }

    pub fn from_spec(spec: FieldSpec) -> Result<Self> {
        Self::new(spec.p, spec.s)
    }

    /// Builds the field of order `q`, which must be a prime power.
    pub fn of_order(q: u32) -> Result<Self> {
        for p in 2..=q {
            if q.is_multiple_of(p) {
                let mut s = 0;
                let mut r = q;
                while r.is_multiple_of(p) {
                    r /= p;
                    s += 1;
                }
                if r != 1 {
                    return Err(Error::BadFieldSpec(q.to_string()));
                }
                return Self::new(p, s);
            }
        }
        Err(Error::BadFieldSpec(q.to_string()))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, s: self.s }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.s
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Monic modulus, constant term first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The primitive element used for the exp/log tables.
    pub fn generator(&self) -> Elem {
        self.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.s == 1
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.q
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.s == 1 {
            let t = a as u32 + b as u32;
            (if t >= self.p { t - self.p } else { t }) as Elem
        } else if self.p == 2 {
            a ^ b
        } else if let Some(t) = &self.add_table {
            t[a as usize * self.q as usize + b as usize]
        } else {
            let su = self.s as usize;
            let da = digits(a as u32, self.p, su);
            let db = digits(b as u32, self.p, su);
            let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
            undigits(&sum, self.p) as Elem
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.s == 1 {
            return (a as u32 * b as u32 % self.p) as Elem;
        }
        self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let order = (self.q - 1) as u64;
        self.exp[((self.log[a as usize] as u64 * (e % order)) % order) as usize]
    }

    /// Discrete logarithm base [`generator`](Self::generator).
    pub fn log(&self, a: Elem) -> Option<u32> {
        (a != 0).then(|| self.log[a as usize])
    }

    /// `g^i` for the table generator.
    pub fn exp(&self, i: u32) -> Elem {
        self.exp[(i % (self.q - 1)) as usize]
    }

    /// Field trace into the prime subfield, as an integer in `0..p`.
    #[inline]
    pub fn trace(&self, a: Elem) -> u32 {
        self.trace[a as usize] as u32
    }

    /// Embeds an integer of the prime subfield.
    pub fn from_prime(&self, a: u32) -> Elem {
        (a % self.p) as Elem
    }

    /// Exponent `k` such that the character value is `exp(2πi k / p)`.
    #[inline]
    pub fn character_exponent(&self, y: Elem, x: Elem) -> u32 {
        self.trace(self.mul(x, y))
    }

    pub fn character<T: Real>(&self, y: Elem, x: Elem) -> Complex<T> {
        root_of_unity(self.character_exponent(y, x), self.p)
    }

    /// Exponent of χ_y(x) for vectors, accumulated mod p.
    pub fn vector_character_exponent(&self, y: &[Elem], x: &[Elem]) -> u32 {
        debug_assert_eq!(y.len(), x.len());
        y.iter()
            .zip(x)
            .fold(0, |acc, (&a, &b)| (acc + self.character_exponent(a, b)) % self.p)
    }

    pub fn vector_character<T: Real>(&self, y: &[Elem], x: &[Elem]) -> Complex<T> {
        root_of_unity(self.vector_character_exponent(y, x), self.p)
    }

    /// The p-th roots of unity, indexed by exponent.
    pub fn roots_of_unity<T: Real>(&self) -> Vec<Complex<T>> {
        (0..self.p).map(|k| root_of_unity(k, self.p)).collect()
    }

    /// `Σ x_i y_i`.
    pub fn dot(&self, x: &[Elem], y: &[Elem]) -> Elem {
        debug_assert_eq!(x.len(), y.len());
        x.iter().zip(y).fold(0, |acc, (&a, &b)| self.add(acc, self.mul(a, b)))
    }

    /// `dst += f * src`.
    pub fn axpy(&self, dst: &mut [Elem], f: Elem, src: &[Elem]) {
        crate::codes::kernels::axpy(self, dst, f, src);
    }

    pub fn add_vec(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.add(a, b)).collect()
    }

    pub fn sub_vec(&self, x: &[Elem], y: &[Elem]) -> Vec<Elem> {
        x.iter().zip(y).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    pub fn neg_vec(&self, x: &[Elem]) -> Vec<Elem> {
        x.iter().map(|&a| self.neg(a)).collect()
    }

    pub fn check_element(&self, a: u32) -> Result<Elem> {
        if a < self.q {
            Ok(a as Elem)
        } else {
            Err(Error::InvalidElement(a))
        }
    }
}

/// `exp(2πi k / p)`, exact at k = 0 and at the binary sign.
pub fn root_of_unity<T: Real>(k: u32, p: u32) -> Complex<T> {
    let k = k % p;
    if k == 0 {
        return Complex::new(T::one(), T::zero());
    }
    if 2 * k == p {
        return Complex::new(-T::one(), T::zero());
    }
    let angle = T::TAU() * T::lit(k as f64) / T::lit(p as f64);
    Complex::new(angle.cos(), angle.sin())
}

/// Vector over F_q held as element indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldVector(pub Vec<Elem>);

impl FieldVector {
    pub fn zeros(n: usize) -> Self {
        FieldVector(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        weight(&self.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn as_slice(&self) -> &[Elem] {
        &self.0
    }

    /// Coordinates listed in `j`, in that order.
    pub fn restrict(&self, j: &[usize]) -> FieldVector {
        FieldVector(j.iter().map(|&i| self.0[i]).collect())
    }

    /// Places `values` at positions `j` of a length-`n` zero vector.
    pub fn embed(values: &[Elem], j: &[usize], n: usize) -> FieldVector {
        let mut v = vec![0; n];
        for (&i, &a) in j.iter().zip(values) {
            v[i] = a;
        }
        FieldVector(v)
    }

    /// Little-endian base-q index, as used by dense states.
    pub fn index(&self, q: u32) -> usize {
        self.0.iter().rev().fold(0usize, |acc, &a| acc * q as usize + a as usize)
    }

    pub fn from_index(mut index: usize, q: u32, n: usize) -> Self {
        let mut v = vec![0; n];
        for slot in v.iter_mut() {
            *slot = (index % q as usize) as Elem;
            index /= q as usize;
        }
        FieldVector(v)
    }
}

impl From<Vec<Elem>> for FieldVector {
    fn from(v: Vec<Elem>) -> Self {
        FieldVector(v)
    }
}

/// Number of nonzero coordinates.
pub fn weight(x: &[Elem]) -> usize {
    x.iter().filter(|&&a| a != 0).count()
}
