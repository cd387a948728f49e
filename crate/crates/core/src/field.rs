//! Prime fields and their extensions.
//!
//! Every field is `F_p[ξ]/(m(ξ))` for a single monic irreducible `m` of degree `k`
//! over the prime field; `k = 1` is the prime field itself. Coefficients are held
//! in Montgomery form as little-endian `u64` limbs, so an element of `F_{p^k}` is
//! `k * n` limbs where `n` is the limb count of `p`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigUint, RandBigInt};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use smallvec::SmallVec;
use thiserror::Error;

use crate::poly::Poly;

pub const MAX_EXTENSION_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(BigUint),
    #[error("characteristic must exceed 3")]
    PrimeTooSmall,
    #[error("extension degree {0} outside 1..={MAX_EXTENSION_DEGREE}")]
    BadDegree(usize),
    #[error("field context mismatch")]
    ContextMismatch,
}

type Limbs = SmallVec<[u64; 4]>;

/// A field element. Meaningful only together with the [`Field`] that produced it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Elem(Limbs);

impl Elem {
    /// Zero is the all-zero limb vector in every field.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Elem{:?}", self.0.as_slice())
    }
}

/// Arithmetic modulo an odd prime on `n`-limb Montgomery residues.
#[derive(Debug)]
struct PrimeArith {
    p: BigUint,
    n: usize,
    limbs: Vec<u64>,
    pinv: u64,
    r2: Vec<u64>,
    one: Vec<u64>,
}

fn to_limbs(x: &BigUint, n: usize) -> Vec<u64> {
    let mut v = x.to_u64_digits();
    v.resize(n, 0);
    v
}

fn from_limbs(l: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(l.len() * 2);
    for &w in l {
        digits.push(w as u32);
        digits.push((w >> 32) as u32);
    }
    BigUint::new(digits)
}

impl PrimeArith {
    fn new(p: &BigUint) -> Self {
        let n = ((p.bits() + 1) as usize).div_ceil(64);
        let limbs = to_limbs(p, n);
        // Newton iteration for p^{-1} mod 2^64
        let p0 = limbs[0];
        let mut inv: u64 = 1;
        for _ in 0..7 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p0.wrapping_mul(inv)));
        }
        let r = BigUint::one() << (64 * n);
        let one = to_limbs(&(&r % p), n);
        let r2 = to_limbs(&((&r * &r) % p), n);
        PrimeArith { p: p.clone(), n, limbs, pinv: inv.wrapping_neg(), r2, one }
    }

    #[inline]
    fn mul1(&self, a: u64, b: u64) -> u64 {
        let p = self.limbs[0];
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.pinv);
        let u = ((t + m as u128 * p as u128) >> 64) as u64;
        if u >= p {
            u - p
        } else {
            u
        }
    }

    #[inline]
    fn add1(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.limbs[0] {
            s - self.limbs[0]
        } else {
            s
        }
    }

    #[inline]
    fn sub1(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.limbs[0] - b
        }
    }

    fn geq_p(&self, a: &[u64]) -> bool {
        for i in (0..self.n).rev() {
            match a[i].cmp(&self.limbs[i]) {
                Ordering::Greater => return true,
                Ordering::Less => return false,
                Ordering::Equal => {}
            }
        }
        true
    }

    fn sub_p_in_place(&self, a: &mut [u64]) {
        let mut borrow = 0u64;
        for i in 0..self.n {
            let (d1, b1) = a[i].overflowing_sub(self.limbs[i]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            a[i] = d2;
            borrow = (b1 || b2) as u64;
        }
    }

    fn add(&self, out: &mut [u64], a: &[u64], b: &[u64]) {
        if self.n == 1 {
            out[0] = self.add1(a[0], b[0]);
            return;
        }
        let mut carry = 0u64;
        for i in 0..self.n {
            let (s1, c1) = a[i].overflowing_add(b[i]);
            let (s2, c2) = s1.overflowing_add(carry);
            out[i] = s2;
            carry = (c1 || c2) as u64;
        }
        if carry != 0 || self.geq_p(out) {
            self.sub_p_in_place(out);
        }
    }

    fn sub(&self, out: &mut [u64], a: &[u64], b: &[u64]) {
        if self.n == 1 {
            out[0] = self.sub1(a[0], b[0]);
            return;
        }
        let mut borrow = 0u64;
        for i in 0..self.n {
            let (d1, b1) = a[i].overflowing_sub(b[i]);
            let (d2, b2) = d1.overflowing_sub(borrow);
            out[i] = d2;
            borrow = (b1 || b2) as u64;
        }
        if borrow != 0 {
            let mut carry = 0u64;
            for i in 0..self.n {
                let (s1, c1) = out[i].overflowing_add(self.limbs[i]);
                let (s2, c2) = s1.overflowing_add(carry);
                out[i] = s2;
                carry = (c1 || c2) as u64;
            }
        }
    }

    fn mul(&self, out: &mut [u64], a: &[u64], b: &[u64]) {
        if self.n == 1 {
            out[0] = self.mul1(a[0], b[0]);
            return;
        }
        // CIOS Montgomery multiplication
        let n = self.n;
        let mut t: SmallVec<[u64; 12]> = SmallVec::from_elem(0, n + 2);
        for &bi in b.iter().take(n) {
            let mut c: u128 = 0;
            for j in 0..n {
                let s = t[j] as u128 + a[j] as u128 * bi as u128 + c;
                t[j] = s as u64;
                c = s >> 64;
            }
            let s = t[n] as u128 + c;
            t[n] = s as u64;
            t[n + 1] = (s >> 64) as u64;
            let m = t[0].wrapping_mul(self.pinv);
            let s = t[0] as u128 + m as u128 * self.limbs[0] as u128;
            let mut c = s >> 64;
            for j in 1..n {
                let s = t[j] as u128 + m as u128 * self.limbs[j] as u128 + c;
                t[j - 1] = s as u64;
                c = s >> 64;
            }
            let s = t[n] as u128 + c;
            t[n - 1] = s as u64;
            t[n] = t[n + 1] + (s >> 64) as u64;
        }
        out[..n].copy_from_slice(&t[..n]);
        if t[n] != 0 || self.geq_p(out) {
            self.sub_p_in_place(out);
        }
    }

    fn to_mont(&self, x: &BigUint) -> Vec<u64> {
        let r = to_limbs(&(x % &self.p), self.n);
        let mut out = vec![0; self.n];
        self.mul(&mut out, &r, &self.r2);
        out
    }

    fn from_mont(&self, a: &[u64]) -> BigUint {
        let mut unit = vec![0; self.n];
        unit[0] = 1;
        let mut out = vec![0; self.n];
        self.mul(&mut out, a, &unit);
        from_limbs(&out)
    }

    fn from_mont_u64(&self, a: u64) -> u64 {
        self.mul1(a, 1)
    }
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    let (mut r0, mut r1) = (p as i128, a as i128);
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(p as i128) as u64
}

struct Inner {
    arith: PrimeArith,
    k: usize,
    /// Low coefficients of the monic modulus, Montgomery form, `k * n` limbs.
    modulus: Limbs,
    modulus_plain: Vec<BigUint>,
    order: BigUint,
    /// `ξ^{i p}` for `i < k`.
    frob: OnceLock<Vec<Elem>>,
    /// Tonelli–Shanks data: (s, t, z^t) with `order - 1 = 2^s t`.
    ts: OnceLock<(u32, BigUint, Elem)>,
    embeddings: Mutex<HashMap<usize, Arc<Embedding>>>,
    prime: OnceLock<Field>,
}

/// Handle to a finite field `F_{p^k}`. Cheap to clone; shared immutably.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{{{}^{}}}", self.0.arith.p, self.0.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.k == other.0.k && self.0.arith.p == other.0.arith.p)
    }
}
impl Eq for Field {}

static REGISTRY: OnceLock<Mutex<HashMap<(BigUint, usize), Field>>> = OnceLock::new();

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Miller–Rabin with the first twelve prime bases (deterministic below 3.3e24)
/// plus extra fixed bases beyond that.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for &sp in &SMALL_PRIMES {
        let sp = BigUint::from(sp);
        if *n == sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    let extra: &[u64] = if n.bits() > 80 { &[41, 43, 47, 53, 59, 61, 67, 71] } else { &[] };
    'bases: for &a in SMALL_PRIMES.iter().chain(extra) {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

impl Field {
    /// The prime field `F_p`.
    pub fn prime(p: &BigUint) -> Result<Field, FieldError> {
        Self::extension(p, 1)
    }

    pub fn prime_u64(p: u64) -> Result<Field, FieldError> {
        Self::prime(&BigUint::from(p))
    }

    /// The field of order `p^k` with its deterministic modulus. Results are cached,
    /// so repeated calls return the same context.
    pub fn extension(p: &BigUint, k: usize) -> Result<Field, FieldError> {
        if *p <= BigUint::from(3u32) {
            if *p == BigUint::from(2u32) || *p == BigUint::from(3u32) {
                return Err(FieldError::PrimeTooSmall);
            }
            return Err(FieldError::NonPrime(p.clone()));
        }
        if !is_probable_prime(p) {
            return Err(FieldError::NonPrime(p.clone()));
        }
        if k == 0 || k > MAX_EXTENSION_DEGREE {
            return Err(FieldError::BadDegree(k));
        }
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = reg.lock().unwrap().get(&(p.clone(), k)) {
            return Ok(f.clone());
        }
        let field = if k == 1 {
            Self::build(p, vec![BigUint::zero()], 1)
        } else {
            let base = Self::prime(p)?;
            let m = find_modulus(&base, k);
            Self::build(p, m, k)
        };
        let mut guard = reg.lock().unwrap();
        Ok(guard.entry((p.clone(), k)).or_insert(field).clone())
    }

    /// Extension of the same characteristic with degree `k`.
    pub fn with_degree(&self, k: usize) -> Result<Field, FieldError> {
        Self::extension(self.p(), k)
    }

    /// The prime subfield.
    pub fn prime_field(&self) -> Field {
        if self.0.k == 1 {
            return self.clone();
        }
        self.0.prime.get_or_init(|| self.with_degree(1).expect("prime field exists")).clone()
    }

    fn build(p: &BigUint, modulus_plain: Vec<BigUint>, k: usize) -> Field {
        let arith = PrimeArith::new(p);
        let mut modulus = Limbs::new();
        for c in &modulus_plain {
            modulus.extend(arith.to_mont(c));
        }
        let order = p.pow(k as u32);
        Field(Arc::new(Inner {
            arith,
            k,
            modulus,
            modulus_plain,
            order,
            frob: OnceLock::new(),
            ts: OnceLock::new(),
            embeddings: Mutex::new(HashMap::new()),
            prime: OnceLock::new(),
        }))
    }

    pub fn p(&self) -> &BigUint {
        &self.0.arith.p
    }

    /// `p` as a `u64`, when it fits.
    pub fn p_u64(&self) -> Option<u64> {
        self.0.arith.p.to_u64()
    }

    pub fn degree(&self) -> usize {
        self.0.k
    }

    pub fn order(&self) -> &BigUint {
        &self.0.order
    }

    /// Coefficients `m_0..m_{k-1}` of the monic defining polynomial (leading 1 omitted).
    pub fn modulus(&self) -> &[BigUint] {
        &self.0.modulus_plain
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    #[inline]
    fn n(&self) -> usize {
        self.0.arith.n
    }

    #[inline]
    fn width(&self) -> usize {
        self.0.arith.n * self.0.k
    }

    pub fn zero(&self) -> Elem {
        Elem(SmallVec::from_elem(0, self.width()))
    }

    pub fn one(&self) -> Elem {
        let mut v = self.zero();
        v.0[..self.n()].copy_from_slice(&self.0.arith.one);
        v
    }

    /// The generator `ξ` of the polynomial basis (equal to `0`'s successor only when `k = 1`).
    pub fn gen(&self) -> Elem {
        if self.0.k == 1 {
            // the defining polynomial is x, so ξ = 0
            return self.zero();
        }
        let mut v = self.zero();
        let n = self.n();
        v.0[n..2 * n].copy_from_slice(&self.0.arith.one);
        v
    }

    pub fn from_biguint(&self, x: &BigUint) -> Elem {
        let mut v = self.zero();
        let c = self.0.arith.to_mont(x);
        v.0[..self.n()].copy_from_slice(&c);
        v
    }

    pub fn from_u64(&self, x: u64) -> Elem {
        self.from_biguint(&BigUint::from(x))
    }

    pub fn from_i64(&self, x: i64) -> Elem {
        let e = self.from_u64(x.unsigned_abs());
        if x < 0 {
            self.neg(&e)
        } else {
            e
        }
    }

    /// Element with the given polynomial-basis coordinates (shorter lists are zero-padded).
    pub fn from_coeffs(&self, coeffs: &[BigUint]) -> Result<Elem, FieldError> {
        if coeffs.len() > self.0.k {
            return Err(FieldError::ContextMismatch);
        }
        let mut v = self.zero();
        let n = self.n();
        for (i, c) in coeffs.iter().enumerate() {
            let m = self.0.arith.to_mont(c);
            v.0[i * n..(i + 1) * n].copy_from_slice(&m);
        }
        Ok(v)
    }

    /// Polynomial-basis coordinates as integers in `[0, p)`.
    pub fn to_coeffs(&self, a: &Elem) -> Vec<BigUint> {
        let n = self.n();
        (0..self.0.k).map(|i| self.0.arith.from_mont(&a.0[i * n..(i + 1) * n])).collect()
    }

    /// The integer value of an element of the prime subfield, or `None` if `a` is not in it.
    pub fn to_prime(&self, a: &Elem) -> Option<BigUint> {
        let n = self.n();
        if a.0[n..].iter().any(|&w| w != 0) {
            return None;
        }
        Some(self.0.arith.from_mont(&a.0[..n]))
    }

    /// Canonical integer encoding `Σ c_i p^i`.
    pub fn encode(&self, a: &Elem) -> BigUint {
        let mut acc = BigUint::zero();
        for c in self.to_coeffs(a).into_iter().rev() {
            acc = acc * self.p() + c;
        }
        acc
    }

    /// Compare canonical encodings without materializing them.
    pub fn cmp_encoding(&self, a: &Elem, b: &Elem) -> Ordering {
        let n = self.n();
        for i in (0..self.0.k).rev() {
            let (x, y) = (&a.0[i * n..(i + 1) * n], &b.0[i * n..(i + 1) * n]);
            if x == y {
                continue;
            }
            let ord = if n == 1 {
                self.0.arith.from_mont_u64(x[0]).cmp(&self.0.arith.from_mont_u64(y[0]))
            } else {
                self.0.arith.from_mont(x).cmp(&self.0.arith.from_mont(y))
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.0.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = self.zero();
        let n = self.n();
        if n == 1 {
            for i in 0..self.0.k {
                out.0[i] = self.0.arith.add1(a.0[i], b.0[i]);
            }
        } else {
            for i in 0..self.0.k {
                let r = i * n..(i + 1) * n;
                self.0.arith.add(&mut out.0[r.clone()], &a.0[r.clone()], &b.0[r]);
            }
        }
        out
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = self.zero();
        let n = self.n();
        if n == 1 {
            for i in 0..self.0.k {
                out.0[i] = self.0.arith.sub1(a.0[i], b.0[i]);
            }
        } else {
            for i in 0..self.0.k {
                let r = i * n..(i + 1) * n;
                self.0.arith.sub(&mut out.0[r.clone()], &a.0[r.clone()], &b.0[r]);
            }
        }
        out
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        self.sub(&self.zero(), a)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        let k = self.0.k;
        let n = self.n();
        let ar = &self.0.arith;
        if k == 1 {
            let mut out = self.zero();
            ar.mul(&mut out.0, &a.0, &b.0);
            return out;
        }
        if n == 1 {
            let p = ar.limbs[0];
            // schoolbook product, then reduce by the modulus
            let mut prod: SmallVec<[u64; 64]> = SmallVec::from_elem(0, 2 * k - 1);
            for i in 0..k {
                if a.0[i] == 0 {
                    continue;
                }
                for j in 0..k {
                    let t = ar.mul1(a.0[i], b.0[j]);
                    let s = prod[i + j] + t;
                    prod[i + j] = if s >= p { s - p } else { s };
                }
            }
            for i in (k..2 * k - 1).rev() {
                let c = prod[i];
                if c == 0 {
                    continue;
                }
                for j in 0..k {
                    let t = ar.mul1(c, self.0.modulus[j]);
                    prod[i - k + j] = ar.sub1(prod[i - k + j], t);
                }
            }
            let mut out = self.zero();
            out.0.copy_from_slice(&prod[..k]);
            return out;
        }
        let mut prod: Vec<u64> = vec![0; (2 * k - 1) * n];
        let mut t = vec![0u64; n];
        let mut s = vec![0u64; n];
        for i in 0..k {
            for j in 0..k {
                ar.mul(&mut t, &a.0[i * n..(i + 1) * n], &b.0[j * n..(j + 1) * n]);
                let r = (i + j) * n..(i + j + 1) * n;
                ar.add(&mut s, &prod[r.clone()], &t);
                prod[r].copy_from_slice(&s);
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c: Vec<u64> = prod[i * n..(i + 1) * n].to_vec();
            for j in 0..k {
                ar.mul(&mut t, &c, &self.0.modulus[j * n..(j + 1) * n]);
                let r = (i - k + j) * n..(i - k + j + 1) * n;
                ar.sub(&mut s, &prod[r.clone()], &t);
                prod[r].copy_from_slice(&s);
            }
        }
        Elem(SmallVec::from_slice(&prod[..k * n]))
    }

    pub fn sqr(&self, a: &Elem) -> Elem {
        self.mul(a, a)
    }

    /// Multiply by an element of the prime subfield given as the coefficient block of `c`.
    pub fn scale_u64(&self, a: &Elem, c: u64) -> Elem {
        self.mul(a, &self.from_u64(c))
    }

    pub fn pow(&self, a: &Elem, e: &BigUint) -> Elem {
        let mut r = self.one();
        for i in (0..e.bits()).rev() {
            r = self.sqr(&r);
            if e.bit(i) {
                r = self.mul(&r, a);
            }
        }
        r
    }

    pub fn pow_u64(&self, a: &Elem, e: u64) -> Elem {
        let mut r = self.one();
        for i in (0..64 - e.leading_zeros()).rev() {
            r = self.sqr(&r);
            if (e >> i) & 1 == 1 {
                r = self.mul(&r, a);
            }
        }
        r
    }

    fn prime_inv(&self, c: &[u64]) -> Limbs {
        let ar = &self.0.arith;
        if ar.n == 1 {
            let p = ar.limbs[0];
            let v = ar.from_mont_u64(c[0]);
            let iv = inv_mod_u64(v, p);
            // to Montgomery: iv * R = mul1(iv, R^2)
            return SmallVec::from_slice(&[ar.mul1(iv, ar.r2[0])]);
        }
        let v = ar.from_mont(c);
        let iv = v.modinv(&ar.p).expect("nonzero residue is invertible");
        SmallVec::from_vec(ar.to_mont(&iv))
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return None;
        }
        if self.0.k == 1 {
            return Some(Elem(self.prime_inv(&a.0)));
        }
        // extended Euclid in F_p[x] against the modulus
        let fp = self.prime_field();
        let m = self.modulus_poly(&fp);
        let av = self.as_prime_poly(a);
        let (g, s, _) = Poly::xgcd(&fp, &av, &m);
        let ginv = fp.inv(&g.lc(&fp)).expect("gcd is a nonzero constant");
        let s = s.scale(&fp, &ginv);
        let mut out = self.zero();
        let n = self.n();
        for (i, c) in s.coeffs().iter().enumerate() {
            out.0[i * n..(i + 1) * n].copy_from_slice(&c.0);
        }
        Some(out)
    }

    /// The defining polynomial as a polynomial over the prime field.
    pub fn modulus_poly(&self, fp: &Field) -> Poly {
        let mut c: Vec<Elem> = self.0.modulus_plain.iter().map(|x| fp.from_biguint(x)).collect();
        c.push(fp.one());
        Poly::new(c)
    }

    /// View an element as a polynomial in `ξ` over the prime field.
    pub fn as_prime_poly(&self, a: &Elem) -> Poly {
        let n = self.n();
        let c = (0..self.0.k).map(|i| Elem(SmallVec::from_slice(&a.0[i * n..(i + 1) * n]))).collect();
        Poly::new(c)
    }

    /// Lift an element of the prime field into this field.
    pub fn lift_prime(&self, fp: &Field, a: &Elem) -> Elem {
        debug_assert!(fp.is_prime_field() && fp.p() == self.p());
        let mut v = self.zero();
        v.0[..self.n()].copy_from_slice(&a.0);
        v
    }

    /// Project an element lying in the prime subfield down to the prime field.
    pub fn to_prime_elem(&self, fp: &Field, a: &Elem) -> Option<Elem> {
        let n = self.n();
        if a.0[n..].iter().any(|&w| w != 0) {
            return None;
        }
        let _ = fp;
        Some(Elem(SmallVec::from_slice(&a.0[..n])))
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        self.inv(b).map(|ib| self.mul(a, &ib))
    }

    fn frob_table(&self) -> &Vec<Elem> {
        self.0.frob.get_or_init(|| {
            let x = self.gen();
            let xp = self.pow(&x, self.p());
            let mut out = Vec::with_capacity(self.0.k);
            let mut acc = self.one();
            for _ in 0..self.0.k {
                out.push(acc.clone());
                acc = self.mul(&acc, &xp);
            }
            out
        })
    }

    /// `a^p`.
    pub fn frob_p(&self, a: &Elem) -> Elem {
        if self.0.k == 1 {
            return a.clone();
        }
        let table = self.frob_table();
        let n = self.n();
        let mut out = self.zero();
        let mut coef = self.zero();
        for (i, t) in table.iter().enumerate() {
            let blk = &a.0[i * n..(i + 1) * n];
            if blk.iter().all(|&w| w == 0) {
                continue;
            }
            coef.0[..n].copy_from_slice(blk);
            out = self.add(&out, &self.mul(&coef, t));
        }
        out
    }

    /// `a^(p^j)`.
    pub fn frob_pow(&self, a: &Elem, j: usize) -> Elem {
        let mut r = a.clone();
        for _ in 0..j % self.0.k {
            r = self.frob_p(&r);
        }
        r
    }

    /// `a^q` where `q` is the order of a subfield; fails if `q` is not `p^j` with `j | k`.
    pub fn frobenius(&self, a: &Elem, base_order: &BigUint) -> Result<Elem, FieldError> {
        let mut j = 0usize;
        let mut q = BigUint::one();
        while q < *base_order {
            q *= self.p();
            j += 1;
        }
        if q != *base_order || j == 0 || !self.0.k.is_multiple_of(j) {
            return Err(FieldError::ContextMismatch);
        }
        Ok(self.frob_pow(a, j))
    }

    /// Euler's criterion; zero counts as a square.
    pub fn is_square(&self, a: &Elem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        if self.0.k > 1 {
            // a is a square iff its norm to F_p is
            let mut norm = a.clone();
            let mut c = a.clone();
            for _ in 1..self.0.k {
                c = self.frob_p(&c);
                norm = self.mul(&norm, &c);
            }
            let fp = self.prime_field();
            let nv = self.to_prime_elem(&fp, &norm).expect("norm lies in the prime field");
            return fp.is_square(&nv);
        }
        let e = (self.order() - 1u32) >> 1;
        self.is_one(&self.pow(a, &e))
    }

    fn ts_data(&self) -> &(u32, BigUint, Elem) {
        self.0.ts.get_or_init(|| {
            let qm1 = self.order() - 1u32;
            let s = qm1.trailing_zeros().unwrap() as u32;
            let t = &qm1 >> s;
            let z = small_elements(self)
                .find(|e| !self.is_zero(e) && !self.is_square(e))
                .expect("non-residue exists");
            let zt = self.pow(&z, &t);
            (s, t, zt)
        })
    }

    /// Square root with the smaller canonical encoding of `±r`, or `None` for non-residues.
    pub fn sqrt(&self, a: &Elem) -> Option<Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let (s, t, zt) = self.ts_data();
        // Tonelli–Shanks
        let mut m = *s;
        let mut c = zt.clone();
        let mut x = self.pow(a, &((t + 1u32) >> 1));
        let mut b = self.pow(a, t);
        while !self.is_one(&b) {
            let mut i = 0;
            let mut bb = b.clone();
            while !self.is_one(&bb) {
                bb = self.sqr(&bb);
                i += 1;
            }
            let mut d = c.clone();
            for _ in 0..(m - i - 1) {
                d = self.sqr(&d);
            }
            x = self.mul(&x, &d);
            c = self.sqr(&d);
            b = self.mul(&b, &c);
            m = i;
        }
        debug_assert_eq!(self.sqr(&x), *a);
        let nx = self.neg(&x);
        Some(if self.cmp_encoding(&nx, &x) == Ordering::Less { nx } else { x })
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        let mut v = self.zero();
        let n = self.n();
        let ar = &self.0.arith;
        for i in 0..self.0.k {
            if n == 1 {
                let x = rng.gen_range(0..ar.limbs[0]);
                v.0[i] = ar.mul1(x, ar.r2[0]);
            } else {
                let x = rng.gen_biguint_below(&ar.p);
                v.0[i * n..(i + 1) * n].copy_from_slice(&ar.to_mont(&x));
            }
        }
        v
    }

    /// Element whose encoding is `idx` (for `idx < order`).
    pub fn from_index(&self, mut idx: u64) -> Elem {
        let mut v = self.zero();
        let Some(p) = self.p_u64() else {
            // every u64 index is below a multi-word prime
            let fp = self.prime_field();
            return self.lift_prime(&fp, &fp.from_u64(idx));
        };
        let ar = &self.0.arith;
        for i in 0..self.0.k {
            let c = idx % p;
            idx /= p;
            if ar.n == 1 {
                v.0[i] = ar.mul1(c, ar.r2[0]);
            } else {
                let m = ar.to_mont(&BigUint::from(c));
                v.0[i * ar.n..(i + 1) * ar.n].copy_from_slice(&m);
            }
        }
        v
    }

    /// Render an element: a decimal for prime-field values, else a coefficient list.
    pub fn format(&self, a: &Elem) -> String {
        let c = self.to_coeffs(a);
        if self.0.k == 1 {
            c[0].to_string()
        } else {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(","))
        }
    }

    /// The embedding of this field into `target`, built from the canonical root of this
    /// field's modulus in `target` and cached on `self`.
    pub fn embedding(&self, target: &Field) -> Result<Arc<Embedding>, FieldError> {
        if self.p() != target.p() || !target.degree().is_multiple_of(self.degree()) {
            return Err(FieldError::ContextMismatch);
        }
        let kt = target.degree();
        if let Some(e) = self.0.embeddings.lock().unwrap().get(&kt) {
            return Ok(e.clone());
        }
        let e = Arc::new(Embedding::new(self, target));
        self.0.embeddings.lock().unwrap().insert(kt, e.clone());
        Ok(e)
    }
}

/// Elements with small coordinates, enumerated shell by shell: shell `B` holds the
/// coordinate vectors with maximum entry exactly `B`.
fn small_elements(field: &Field) -> impl Iterator<Item = Elem> + '_ {
    let k = field.degree();
    (0u64..).flat_map(move |b| shell(k, b)).map(move |digits| {
        let c: Vec<BigUint> = digits.iter().map(|&d| BigUint::from(d)).collect();
        field.from_coeffs(&c).unwrap()
    })
}

/// All length-`k` vectors over `0..=b` whose maximum is `b`, in increasing order of
/// `Σ d_i (b+1)^i`.
fn shell(k: usize, b: u64) -> impl Iterator<Item = Vec<u64>> {
    let base = b + 1;
    let total = base.checked_pow(k as u32).unwrap_or(u64::MAX);
    (0..total).filter_map(move |mut idx| {
        let mut d = Vec::with_capacity(k);
        for _ in 0..k {
            d.push(idx % base);
            idx /= base;
        }
        (d.iter().copied().max() == Some(b)).then_some(d)
    })
}

/// Smallest (in shell order) monic irreducible of degree `k` over `fp`, as its low
/// coefficients `m_0..m_{k-1}`.
fn find_modulus(fp: &Field, k: usize) -> Vec<BigUint> {
    for b in 1u64.. {
        for digits in shell(k, b) {
            if digits[0] == 0 {
                continue;
            }
            let mut c: Vec<Elem> = digits.iter().map(|&d| fp.from_u64(d)).collect();
            c.push(fp.one());
            let f = Poly::new(c);
            if crate::poly::is_irreducible(fp, &f) {
                return digits.into_iter().map(BigUint::from).collect();
            }
        }
    }
    unreachable!()
}

/// A field embedding `F_{p^a} → F_{p^b}` with a left inverse on its image.
pub struct Embedding {
    source: Field,
    target: Field,
    /// Images of `ξ^i`, `i < a`.
    images: Vec<Elem>,
    /// Target-coordinate rows used for the left inverse, and that square system's inverse.
    pivots: Vec<usize>,
    inverse: Vec<Vec<Elem>>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding({:?} -> {:?})", self.source, self.target)
    }
}

impl Embedding {
    fn new(source: &Field, target: &Field) -> Self {
        let a = source.degree();
        let images: Vec<Elem> = if a == 1 {
            vec![target.one()]
        } else {
            let m = source.modulus_poly(&source.prime_field()).lift(target);
            let mut roots = crate::poly::roots(target, &m);
            roots.sort_by(|x, y| target.cmp_encoding(x, y));
            let r = roots.into_iter().next().expect("modulus splits in an extension of multiple degree");
            let mut out = Vec::with_capacity(a);
            let mut acc = target.one();
            for _ in 0..a {
                out.push(acc.clone());
                acc = target.mul(&acc, &r);
            }
            out
        };
        // left inverse: choose `a` independent target coordinates
        let fp = source.prime_field();
        let b = target.degree();
        let cols: Vec<Vec<Elem>> = images
            .iter()
            .map(|e| target.to_coeffs(e).iter().map(|c| fp.from_biguint(c)).collect())
            .collect();
        // matrix rows = target coordinates (b), columns = source basis (a)
        let mat: Vec<Vec<Elem>> = (0..b).map(|r| (0..a).map(|c| cols[c][r].clone()).collect()).collect();
        let mut pivots = Vec::new();
        let mut chosen: Vec<Vec<Elem>> = Vec::new();
        for (r, row) in mat.iter().enumerate() {
            let mut trial = chosen.clone();
            trial.push(row.clone());
            if crate::linalg::rank(&fp, &trial) == trial.len() {
                chosen = trial;
                pivots.push(r);
                if pivots.len() == a {
                    break;
                }
            }
        }
        let inverse = crate::linalg::inverse(&fp, &chosen).expect("embedding matrix has full rank");
        Embedding { source: source.clone(), target: target.clone(), images, pivots, inverse }
    }

    pub fn source(&self) -> &Field {
        &self.source
    }

    pub fn target(&self) -> &Field {
        &self.target
    }

    pub fn apply(&self, x: &Elem) -> Elem {
        let s = &self.source;
        let t = &self.target;
        if s.degree() == 1 {
            return t.lift_prime(s, x);
        }
        let n = s.n();
        let mut out = t.zero();
        let mut c = t.zero();
        for (i, img) in self.images.iter().enumerate() {
            let blk = &x.0[i * n..(i + 1) * n];
            if blk.iter().all(|&w| w == 0) {
                continue;
            }
            c.0[..n].copy_from_slice(blk);
            out = t.add(&out, &t.mul(&c, img));
        }
        out
    }

    /// The preimage of `y`, if `y` lies in the image.
    pub fn preimage(&self, y: &Elem) -> Option<Elem> {
        let s = &self.source;
        let t = &self.target;
        let fp = s.prime_field();
        let yc = t.to_coeffs(y);
        let rhs: Vec<Elem> = self.pivots.iter().map(|&r| fp.from_biguint(&yc[r])).collect();
        let mut x = s.zero();
        let n = s.n();
        for (i, row) in self.inverse.iter().enumerate() {
            let mut acc = fp.zero();
            for (m, v) in row.iter().zip(&rhs) {
                acc = fp.add(&acc, &fp.mul(m, v));
            }
            x.0[i * n..(i + 1) * n].copy_from_slice(&acc.0);
        }
        (self.apply(&x) == *y).then_some(x)
    }
}
