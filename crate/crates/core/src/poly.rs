//! Univariate polynomials over a [`Field`], factorization, exact square roots,
//! bivariate reduction modulo a monic cubic, and binary forms.

use std::cmp::Ordering;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Elem, Embedding, Field};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("divisor is not a monic cubic in x")]
    NotMonicCubic,
}

/// Dense polynomial, ascending coefficients, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<Elem>,
}

impl Poly {
    pub fn new(mut c: Vec<Elem>) -> Poly {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn zero() -> Poly {
        Poly { c: Vec::new() }
    }

    pub fn one(f: &Field) -> Poly {
        Poly { c: vec![f.one()] }
    }

    pub fn constant(a: Elem) -> Poly {
        Poly::new(vec![a])
    }

    pub fn x(f: &Field) -> Poly {
        Poly { c: vec![f.zero(), f.one()] }
    }

    /// `x - a`.
    pub fn linear(f: &Field, a: &Elem) -> Poly {
        Poly { c: vec![f.neg(a), f.one()] }
    }

    pub fn monomial(f: &Field, a: Elem, d: usize) -> Poly {
        let mut c = vec![f.zero(); d];
        c.push(a);
        Poly::new(c)
    }

    pub fn from_i64s(f: &Field, c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| f.from_i64(x)).collect())
    }

    pub fn from_roots(f: &Field, roots: &[Elem]) -> Poly {
        roots.iter().fold(Poly::one(f), |acc, r| acc.mul(f, &Poly::linear(f, r)))
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<Elem> {
        self.c
    }

    pub fn coeff(&self, f: &Field, i: usize) -> Elem {
        self.c.get(i).cloned().unwrap_or_else(|| f.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with `-1` for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lc(&self, f: &Field) -> Elem {
        self.c.last().cloned().unwrap_or_else(|| f.zero())
    }

    pub fn is_monic(&self, f: &Field) -> bool {
        self.c.last().is_some_and(|x| f.is_one(x))
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn eval(&self, f: &Field, x: &Elem) -> Elem {
        let mut acc = f.zero();
        for a in self.c.iter().rev() {
            acc = f.add(&f.mul(&acc, x), a);
        }
        acc
    }

    pub fn add(&self, f: &Field, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = f.zero();
        Poly::new((0..n).map(|i| f.add(self.c.get(i).unwrap_or(&z), o.c.get(i).unwrap_or(&z))).collect())
    }

    pub fn sub(&self, f: &Field, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let z = f.zero();
        Poly::new((0..n).map(|i| f.sub(self.c.get(i).unwrap_or(&z), o.c.get(i).unwrap_or(&z))).collect())
    }

    pub fn neg(&self, f: &Field) -> Poly {
        Poly { c: self.c.iter().map(|a| f.neg(a)).collect() }
    }

    pub fn scale(&self, f: &Field, s: &Elem) -> Poly {
        Poly::new(self.c.iter().map(|a| f.mul(a, s)).collect())
    }

    pub fn mul(&self, f: &Field, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn sqr(&self, f: &Field) -> Poly {
        self.mul(f, self)
    }

    pub fn pow(&self, f: &Field, e: u32) -> Poly {
        let mut r = Poly::one(f);
        for _ in 0..e {
            r = r.mul(f, self);
        }
        r
    }

    /// Multiply by `x^d`.
    pub fn shift(&self, f: &Field, d: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![f.zero(); d];
        c.extend(self.c.iter().cloned());
        Poly { c }
    }

    pub fn divrem(&self, f: &Field, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.c.len() - 1;
        if self.c.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let lc = d.c.last().unwrap();
        let inv = if f.is_one(lc) { lc.clone() } else { f.inv(lc).unwrap() };
        let mut r = self.c.clone();
        let mut q = vec![f.zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            if r[i].is_zero() {
                continue;
            }
            let c = if f.is_one(&inv) { r[i].clone() } else { f.mul(&r[i], &inv) };
            for (j, dj) in d.c.iter().enumerate() {
                let t = f.mul(&c, dj);
                r[i - dd + j] = f.sub(&r[i - dd + j], &t);
            }
            q[i - dd] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, f: &Field, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn div_exact(&self, f: &Field, d: &Poly) -> Option<Poly> {
        let (q, r) = self.divrem(f, d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self, f: &Field) -> Poly {
        match self.c.last() {
            None => Poly::zero(),
            Some(l) => self.scale(f, &f.inv(l).unwrap()),
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(f: &Field, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// `(g, s, t)` with `g = s a + t b` and `g` monic.
    pub fn xgcd(f: &Field, a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(f, &r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(f, &q.mul(f, &s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(f, &q.mul(f, &t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(&r0.lc(f)).unwrap();
        (r0.scale(f, &inv), s0.scale(f, &inv), t0.scale(f, &inv))
    }

    pub fn derivative(&self, f: &Field) -> Poly {
        Poly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| f.mul(a, &f.from_u64(i as u64))).collect())
    }

    pub fn mulmod(&self, f: &Field, o: &Poly, m: &Poly) -> Poly {
        self.mul(f, o).rem(f, m)
    }

    pub fn powmod(&self, f: &Field, e: &BigUint, m: &Poly) -> Poly {
        let base = self.rem(f, m);
        let mut r = Poly::one(f).rem(f, m);
        for i in (0..e.bits()).rev() {
            r = r.mulmod(f, &r, m);
            if e.bit(i) {
                r = r.mulmod(f, &base, m);
            }
        }
        r
    }

    /// `self(b) mod m` by Horner's rule.
    pub fn compose_mod(&self, f: &Field, b: &Poly, m: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mulmod(f, b, m).add(f, &Poly::constant(a.clone()));
        }
        acc.rem(f, m)
    }

    /// `self(b)`.
    pub fn compose(&self, f: &Field, b: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(f, b).add(f, &Poly::constant(a.clone()));
        }
        acc
    }

    /// Move a polynomial over the prime field into an extension.
    pub fn lift(&self, target: &Field) -> Poly {
        let fp = target.prime_field();
        Poly { c: self.c.iter().map(|a| target.lift_prime(&fp, a)).collect() }
    }

    pub fn embed(&self, e: &Embedding) -> Poly {
        Poly { c: self.c.iter().map(|a| e.apply(a)).collect() }
    }

    /// Coefficientwise preimage under an embedding.
    pub fn descend(&self, e: &Embedding) -> Option<Poly> {
        self.c.iter().map(|a| e.preimage(a)).collect::<Option<Vec<_>>>().map(Poly::new)
    }

    /// Apply the `p`-power Frobenius to every coefficient.
    pub fn frob(&self, f: &Field) -> Poly {
        Poly { c: self.c.iter().map(|a| f.frob_p(a)).collect() }
    }

    pub fn cmp_canonical(&self, f: &Field, o: &Poly) -> Ordering {
        self.c.len().cmp(&o.c.len()).then_with(|| {
            for (a, b) in self.c.iter().zip(&o.c).rev() {
                let ord = f.cmp_encoding(a, b);
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            Ordering::Equal
        })
    }

    pub fn format(&self, f: &Field) -> Vec<String> {
        self.c.iter().map(|a| f.format(a)).collect()
    }
}

fn factor_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x7269_676f_6e61_6c00)
}

pub fn is_squarefree(f: &Field, a: &Poly) -> Result<bool, PolyError> {
    if a.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(Poly::gcd(f, a, &a.derivative(f)).is_constant())
}

/// `x^(p^i) mod a` for `i = 0..=k`, `k` the degree of `f` over its prime field.
fn frobenius_powers(f: &Field, a: &Poly) -> Vec<Poly> {
    let x = Poly::x(f).rem(f, a);
    let xp = x.powmod(f, f.p(), a);
    let mut out = vec![x, xp.clone()];
    for _ in 1..f.degree() {
        // (Σ c_j x^j)^p = Σ c_j^p (x^p)^j
        let next = out.last().unwrap().frob(f).compose_mod(f, &xp, a);
        out.push(next);
    }
    out
}

/// `x^q mod a` with `q = |f|`.
fn x_pow_order(f: &Field, a: &Poly) -> Poly {
    frobenius_powers(f, a).pop().unwrap()
}

/// `r^((q-1)/2) mod a` as `(Π_i r^(p^i))^((p-1)/2)`.
fn pow_half_order(f: &Field, r: &Poly, a: &Poly, table: &[Poly]) -> Poly {
    let mut norm = r.rem(f, a);
    let mut conj = r.clone();
    for t in table.iter().take(f.degree()).skip(1) {
        conj = conj.frob(f);
        norm = norm.mulmod(f, &conj.compose_mod(f, t, a), a);
    }
    norm.powmod(f, &((f.p() - 1u32) >> 1), a)
}

/// `p`-th root of a polynomial whose derivative vanishes.
fn pth_root(f: &Field, a: &Poly) -> Poly {
    let p = f.p_u64().expect("characteristic below degree bound only occurs for word-sized p") as usize;
    let k = f.degree();
    let c = a.c.iter().step_by(p).map(|x| f.frob_pow(x, k - 1)).collect();
    Poly::new(c)
}

/// Squarefree decomposition of a monic polynomial: `a = Π g_i^{m_i}`.
pub fn squarefree_decomposition(f: &Field, a: &Poly) -> Vec<(Poly, u32)> {
    let a = a.monic(f);
    let mut out = Vec::new();
    if a.is_constant() {
        return out;
    }
    let d = a.derivative(f);
    if d.is_zero() {
        for (g, m) in squarefree_decomposition(f, &pth_root(f, &a)) {
            out.push((g, m * f.p_u64().unwrap() as u32));
        }
        return out;
    }
    let mut c = Poly::gcd(f, &a, &d);
    let mut w = a.div_exact(f, &c).unwrap();
    let mut i = 1;
    while !w.is_constant() {
        let y = Poly::gcd(f, &w, &c);
        let z = w.div_exact(f, &y).unwrap();
        if !z.is_constant() {
            out.push((z, i));
        }
        i += 1;
        c = c.div_exact(f, &y).unwrap();
        w = y;
    }
    if !c.is_constant() {
        for (g, m) in squarefree_decomposition(f, &pth_root(f, &c)) {
            out.push((g, m * f.p_u64().unwrap() as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(f: &Field, a: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = a.monic(f);
    let x = Poly::x(f);
    let xq = x_pow_order(f, &rest);
    let mut h = xq.clone();
    let mut d = 1;
    while rest.deg() >= 2 * d as isize {
        let g = Poly::gcd(f, &h.sub(f, &x), &rest);
        if !g.is_constant() {
            rest = rest.div_exact(f, &g).unwrap();
            h = h.rem(f, &rest);
            out.push((g, d));
        }
        d += 1;
        if rest.deg() < 2 * d as isize {
            break;
        }
        let xq_r = xq.rem(f, &rest);
        h = h.compose_mod(f, &xq_r, &rest);
    }
    if !rest.is_constant() {
        let dd = rest.degree().unwrap();
        out.push((rest, dd));
    }
    out
}

/// Split a monic squarefree product of degree-`d` irreducibles.
pub fn equal_degree<R: Rng>(f: &Field, a: &Poly, d: usize, rng: &mut R) -> Vec<Poly> {
    let n = a.degree().unwrap_or(0);
    if n <= d {
        return vec![a.monic(f)];
    }
    let table = frobenius_powers(f, a);
    let xq = table.last().unwrap().clone();
    loop {
        let r = Poly::new((0..n).map(|_| f.random(rng)).collect());
        if r.is_constant() {
            continue;
        }
        // trace to the residue fields' F_q, then a quadratic character
        let mut t = r.clone();
        let mut conj = r.clone();
        for _ in 1..d {
            conj = conj.compose_mod(f, &xq, a);
            t = t.add(f, &conj);
        }
        let b = pow_half_order(f, &t, a, &table).sub(f, &Poly::one(f));
        let g = Poly::gcd(f, &b, a);
        if !g.is_constant() && g.deg() < a.deg() {
            let h = a.div_exact(f, &g).unwrap();
            let mut out = equal_degree(f, &g, d, rng);
            out.extend(equal_degree(f, &h, d, rng));
            return out;
        }
    }
}

/// A factorization `lc · Π g_i^{m_i}` with monic irreducible `g_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elem,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn product(&self, f: &Field) -> Poly {
        let mut acc = Poly::constant(self.unit.clone());
        for (g, m) in &self.factors {
            acc = acc.mul(f, &g.pow(f, *m));
        }
        acc
    }

    /// Degrees of the irreducible factors with multiplicity, descending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .factors
            .iter()
            .flat_map(|(g, m)| std::iter::repeat_n(g.degree().unwrap(), *m as usize))
            .collect();
        d.sort_unstable_by(|a, b| b.cmp(a));
        d
    }
}

/// Complete factorization into monic irreducibles, sorted by degree then coefficients.
pub fn factorize(f: &Field, a: &Poly) -> Result<Factorization, PolyError> {
    if a.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut rng = factor_rng();
    let mut factors = Vec::new();
    for (g, m) in squarefree_decomposition(f, a) {
        for (h, d) in distinct_degree(f, &g) {
            for irr in equal_degree(f, &h, d, &mut rng) {
                factors.push((irr, m));
            }
        }
    }
    factors.sort_by(|(a, _), (b, _)| a.cmp_canonical(f, b));
    Ok(Factorization { unit: a.lc(f), factors })
}

/// Distinct roots in `f`, sorted by canonical encoding.
pub fn roots(f: &Field, a: &Poly) -> Vec<Elem> {
    if a.is_zero() || a.is_constant() {
        return Vec::new();
    }
    let a = a.monic(f);
    let x = Poly::x(f);
    let xq = x_pow_order(f, &a);
    let g = Poly::gcd(f, &xq.sub(f, &x), &a);
    if g.is_constant() {
        return Vec::new();
    }
    let mut rng = factor_rng();
    let mut out: Vec<Elem> = equal_degree(f, &g, 1, &mut rng)
        .into_iter()
        .map(|l| f.neg(&l.coeffs()[0]))
        .collect();
    out.sort_by(|u, v| f.cmp_encoding(u, v));
    out
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Rabin's irreducibility test.
pub fn is_irreducible(f: &Field, a: &Poly) -> bool {
    let Some(n) = a.degree() else { return false };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let a = a.monic(f);
    let x = Poly::x(f);
    let xq = x_pow_order(f, &a);
    // h[i] = x^{q^i} mod a
    let mut h = vec![x.clone(), xq.clone()];
    for i in 2..=n {
        let next = h[i - 1].compose_mod(f, &xq, &a);
        h.push(next);
    }
    if h[n] != x.rem(f, &a) {
        return false;
    }
    prime_divisors(n).into_iter().all(|r| Poly::gcd(f, &h[n / r].sub(f, &x), &a).is_constant())
}

/// `s = α r²` with `α = lc(s)` and `r` monic, or `None` if `s/α` is not a square.
pub fn exact_square_root(f: &Field, s: &Poly) -> Result<Option<(Elem, Poly)>, PolyError> {
    let Some(n) = s.degree() else { return Err(PolyError::ZeroPolynomial) };
    let alpha = s.lc(f);
    if n % 2 == 1 {
        return Ok(None);
    }
    let u = s.monic(f);
    let m = n / 2;
    // coefficients of r from the top down: r_m = 1 and the x^{2m-i} coefficient of r² fixes r_{m-i}
    let mut r = vec![f.zero(); m + 1];
    r[m] = f.one();
    let half = f.inv(&f.from_u64(2)).unwrap();
    for i in 1..=m {
        let mut acc = u.coeff(f, n - i);
        for j in 1..i {
            acc = f.sub(&acc, &f.mul(&r[m - j], &r[m - i + j]));
        }
        r[m - i] = f.mul(&acc, &half);
    }
    let r = Poly::new(r);
    Ok((r.sqr(f) == u).then_some((alpha, r)))
}

/// Polynomial in `x` with coefficients in `F[t]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    pub c: Vec<Poly>,
}

impl BiPoly {
    pub fn deg_x(&self) -> isize {
        self.c.len() as isize - 1
    }

    /// Specialize `t = t0`, giving a polynomial in `x`.
    pub fn at_t(&self, f: &Field, t0: &Elem) -> Poly {
        Poly::new(self.c.iter().map(|g| g.eval(f, t0)).collect())
    }

    /// Specialize `t = t0` after moving the coefficients into `target`.
    pub fn at_t_in(&self, target: &Field, t0: &Elem) -> Poly {
        let fp = target.prime_field();
        Poly::new(
            self.c
                .iter()
                .map(|g| {
                    let lifted = Poly::new(g.coeffs().iter().map(|a| target.lift_prime(&fp, a)).collect());
                    lifted.eval(target, t0)
                })
                .collect(),
        )
    }
}

/// `(f0, f1, f2)` with `F ≡ f0 + f1 x + f2 x² (mod G)` in `F[t][x]`.
pub fn reduce_mod_cubic(f: &Field, big_f: &Poly, g: &BiPoly) -> Result<(Poly, Poly, Poly), PolyError> {
    if g.c.len() != 4 || g.c[3] != Poly::one(f) {
        return Err(PolyError::NotMonicCubic);
    }
    let mut c: Vec<Poly> = big_f.coeffs().iter().map(|a| Poly::constant(a.clone())).collect();
    for i in (3..c.len()).rev() {
        let lead = std::mem::take(&mut c[i]);
        if lead.is_zero() {
            continue;
        }
        for j in 0..3 {
            c[i - 3 + j] = c[i - 3 + j].sub(f, &lead.mul(f, &g.c[j]));
        }
    }
    c.resize(3, Poly::zero());
    Ok((c[0].clone(), c[1].clone(), c[2].clone()))
}

/// Change of coordinate `x = (a x' + b) / (c x' + d)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mobius {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
    pub d: Elem,
}

impl Mobius {
    pub fn identity(f: &Field) -> Mobius {
        Mobius { a: f.one(), b: f.zero(), c: f.zero(), d: f.one() }
    }

    pub fn is_identity(&self, f: &Field) -> bool {
        let _ = f;
        self.b.is_zero() && self.c.is_zero() && self.a == self.d && !self.a.is_zero()
    }

    pub fn det(&self, f: &Field) -> Elem {
        f.sub(&f.mul(&self.a, &self.d), &f.mul(&self.b, &self.c))
    }

    /// The transform with `x' = μ⁻¹(x)`.
    pub fn inverse(&self, f: &Field) -> Mobius {
        Mobius { a: self.d.clone(), b: f.neg(&self.b), c: f.neg(&self.c), d: self.a.clone() }
    }

    /// `μ ∘ ν`: first apply `ν` to the new coordinate, then `μ`.
    pub fn compose(&self, f: &Field, nu: &Mobius) -> Mobius {
        let m = |x: &Elem, y: &Elem, z: &Elem, w: &Elem| f.add(&f.mul(x, y), &f.mul(z, w));
        Mobius {
            a: m(&self.a, &nu.a, &self.b, &nu.c),
            b: m(&self.a, &nu.b, &self.b, &nu.d),
            c: m(&self.c, &nu.a, &self.d, &nu.c),
            d: m(&self.c, &nu.b, &self.d, &nu.d),
        }
    }

    /// `μ(x')` or `None` at the pole.
    pub fn apply(&self, f: &Field, x: &Elem) -> Option<Elem> {
        let den = f.add(&f.mul(&self.c, x), &self.d);
        f.div(&f.add(&f.mul(&self.a, x), &self.b), &den)
    }

    /// `c x' + d`.
    pub fn denominator(&self, f: &Field, x: &Elem) -> Elem {
        f.add(&f.mul(&self.c, x), &self.d)
    }

    pub fn num_poly(&self) -> Poly {
        Poly::new(vec![self.b.clone(), self.a.clone()])
    }

    pub fn den_poly(&self) -> Poly {
        Poly::new(vec![self.d.clone(), self.c.clone()])
    }

    pub fn embed(&self, e: &Embedding) -> Mobius {
        Mobius { a: e.apply(&self.a), b: e.apply(&self.b), c: e.apply(&self.c), d: e.apply(&self.d) }
    }

    pub fn lift(&self, target: &Field) -> Mobius {
        let fp = target.prime_field();
        let l = |x: &Elem| target.lift_prime(&fp, x);
        Mobius { a: l(&self.a), b: l(&self.b), c: l(&self.c), d: l(&self.d) }
    }

    /// `(c x + d)^n · P(μ(x))` for `deg P ≤ n`.
    pub fn pull_poly(&self, f: &Field, p: &Poly, n: usize) -> Poly {
        let num = self.num_poly();
        let den = self.den_poly();
        let mut acc = Poly::zero();
        for (i, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let term = num.pow(f, i as u32).mul(f, &den.pow(f, (n - i) as u32)).scale(f, a);
            acc = acc.add(f, &term);
        }
        acc
    }
}

/// Binary form of degree `d`: `c[i]` is the coefficient of `u^i v^(d-i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    pub c: Vec<Elem>,
}

impl Form {
    /// Homogenize `p` to degree `d ≥ deg p`.
    pub fn from_poly(f: &Field, p: &Poly, d: usize) -> Form {
        let mut c = p.coeffs().to_vec();
        c.resize(d + 1, f.zero());
        Form { c }
    }

    pub fn degree(&self) -> usize {
        self.c.len() - 1
    }

    /// Dehomogenize at `v = 1`.
    pub fn affine(&self) -> Poly {
        Poly::new(self.c.clone())
    }

    /// Power of `v` dividing the form.
    pub fn v_multiplicity(&self) -> usize {
        self.c.iter().rev().take_while(|x| x.is_zero()).count()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, f: &Field, o: &Form) -> Form {
        let d = self.degree() + o.degree();
        let mut c = vec![f.zero(); d + 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = f.add(&c[i + j], &f.mul(a, b));
            }
        }
        Form { c }
    }

    pub fn scale(&self, f: &Field, s: &Elem) -> Form {
        Form { c: self.c.iter().map(|x| f.mul(x, s)).collect() }
    }

    pub fn eval(&self, f: &Field, u: &Elem, v: &Elem) -> Elem {
        let d = self.degree();
        let mut acc = f.zero();
        for (i, a) in self.c.iter().enumerate() {
            let t = f.mul(&f.mul(a, &f.pow_u64(u, i as u64)), &f.pow_u64(v, (d - i) as u64));
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// `F'(u, v) = F(a u + b v, c u + d v)`.
    pub fn transform(&self, f: &Field, m: &Mobius) -> Form {
        let d = self.degree();
        Form::from_poly(f, &m.pull_poly(f, &self.affine(), d), d)
    }

    pub fn embed(&self, e: &Embedding) -> Form {
        Form { c: self.c.iter().map(|x| e.apply(x)).collect() }
    }

    pub fn lift(&self, target: &Field) -> Form {
        let fp = target.prime_field();
        Form { c: self.c.iter().map(|x| target.lift_prime(&fp, x)).collect() }
    }

    /// Squarefree as a binary form: the affine part is squarefree and `v` divides at most once.
    pub fn is_squarefree(&self, f: &Field) -> bool {
        !self.is_zero()
            && self.v_multiplicity() <= 1
            && is_squarefree(f, &self.affine()).unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f37() -> Field {
        Field::prime_u64(37).unwrap()
    }

    /// The curve polynomial of the worked example over F_37.
    pub(crate) fn example_f(f: &Field) -> Poly {
        Poly::from_i64s(f, &[2, 29, 12, 33, 20, 15, 28, 1])
    }

    #[test]
    fn factor_small_cases() {
        let f = f37();
        let fac = factorize(&f, &Poly::from_i64s(&f, &[-1, 0, 1])).unwrap();
        assert_eq!(fac.factors, vec![(Poly::from_i64s(&f, &[1, 1]), 1), (Poly::from_i64s(&f, &[-1, 1]), 1)]);
        let f7 = Field::prime_u64(7).unwrap();
        assert!(is_irreducible(&f7, &Poly::from_i64s(&f7, &[1, 0, 1])));
        assert_eq!(factorize(&f, &Poly::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn example_factor_pattern() {
        let f = f37();
        let fac = factorize(&f, &example_f(&f)).unwrap();
        assert_eq!(fac.degrees(), vec![6, 1]);
        // linear factor x - 17 (sympy oracle)
        assert_eq!(fac.factors[0].0, Poly::from_i64s(&f, &[-17, 1]));
        assert!(is_squarefree(&f, &example_f(&f)).unwrap());
        assert!(!is_squarefree(&f, &Poly::from_i64s(&f, &[0, 0, 1])).unwrap());
        assert!(is_squarefree(&f, &Poly::from_i64s(&f, &[2, -3, 1])).unwrap());
    }

    #[test]
    fn squarefree_in_small_characteristic() {
        let f5 = Field::prime_u64(5).unwrap();
        // (x^5 + 2)^2 (x + 1)^3 has vanishing-derivative components
        let a = Poly::from_i64s(&f5, &[2, 0, 0, 0, 0, 1]);
        let b = Poly::from_i64s(&f5, &[1, 1]);
        let p = a.sqr(&f5).mul(&f5, &b.pow(&f5, 3));
        let fac = factorize(&f5, &p).unwrap();
        assert_eq!(fac.product(&f5), p);
        for (g, _) in &fac.factors {
            assert!(is_irreducible(&f5, g));
        }
    }

    #[test]
    fn reduce_mod_cubic_cases() {
        let f = f37();
        let t = Poly::x(&f);
        let g = BiPoly { c: vec![t.neg(&f), Poly::zero(), Poly::zero(), Poly::one(&f)] };
        let (f0, f1, f2) = reduce_mod_cubic(&f, &Poly::x(&f), &g).unwrap();
        assert_eq!((f0, f1, f2), (Poly::zero(), Poly::one(&f), Poly::zero()));
        let x3 = Poly::monomial(&f, f.one(), 3);
        let (f0, f1, f2) = reduce_mod_cubic(&f, &x3, &g).unwrap();
        assert_eq!((f0, f1.is_zero(), f2.is_zero()), (t.clone(), true, true));
        let bad = BiPoly { c: vec![t.clone(), Poly::one(&f)] };
        assert_eq!(reduce_mod_cubic(&f, &x3, &bad), Err(PolyError::NotMonicCubic));
    }

    #[test]
    fn exact_square_root_cases() {
        let f = f37();
        let s = Poly::from_i64s(&f, &[0, 0, 4]);
        assert_eq!(exact_square_root(&f, &s).unwrap(), Some((f.from_u64(4), Poly::x(&f))));
        assert_eq!(exact_square_root(&f, &Poly::from_i64s(&f, &[1, 0, 1])).unwrap(), None);
        // s(t) of the worked example: 64 s = (35t^3 + 8t^2 + 33t + 3)^2
        let s = Poly::from_i64s(&f, &[-12, -5, 1, 15, -8, 18, 7]);
        let (alpha, r) = exact_square_root(&f, &s).unwrap().unwrap();
        assert_eq!(alpha, f.from_u64(7));
        let d1 = Poly::from_i64s(&f, &[3, 33, 8, 35]);
        assert_eq!(d1.sqr(&f), s.scale(&f, &f.from_u64(64)));
        assert_eq!(r.scale(&f, &f.from_u64(35)), d1);
    }

    #[test]
    fn mobius_pull_matches_pointwise() {
        let f = f37();
        let m = Mobius { a: f.from_u64(3), b: f.from_u64(1), c: f.from_u64(1), d: f.from_u64(5) };
        let p = example_f(&f);
        let pulled = m.pull_poly(&f, &p, 8);
        for x in 0..37u64 {
            let xe = f.from_u64(x);
            if let Some(mx) = m.apply(&f, &xe) {
                let den = m.denominator(&f, &xe);
                let expect = f.mul(&f.pow_u64(&den, 8), &p.eval(&f, &mx));
                assert_eq!(pulled.eval(&f, &xe), expect);
            }
        }
        let inv = m.inverse(&f);
        let y = m.apply(&f, &f.from_u64(2)).unwrap();
        assert_eq!(inv.apply(&f, &y), Some(f.from_u64(2)));
    }

    proptest! {
        #[test]
        fn factorization_round_trip(coeffs in proptest::collection::vec(0u64..101, 2..10), k in 1usize..3) {
            let f = Field::extension(&BigUint::from(101u32), k).unwrap();
            let fp = f.prime_field();
            let a = Poly::new(coeffs.iter().map(|&c| fp.from_u64(c)).collect()).lift(&f);
            prop_assume!(!a.is_zero());
            let fac = factorize(&f, &a).unwrap();
            prop_assert_eq!(fac.product(&f), a);
            for (g, _) in &fac.factors {
                prop_assert!(g.is_monic(&f));
                prop_assert!(is_irreducible(&f, g));
            }
        }

        #[test]
        fn square_root_of_square(coeffs in proptest::collection::vec(0u64..1009, 1..8), alpha in 1u64..1009) {
            let f = Field::prime_u64(1009).unwrap();
            let mut c: Vec<Elem> = coeffs.iter().map(|&x| f.from_u64(x)).collect();
            c.push(f.one());
            let r = Poly::new(c);
            let s = r.sqr(&f).scale(&f, &f.from_u64(alpha));
            prop_assert_eq!(exact_square_root(&f, &s).unwrap(), Some((f.from_u64(alpha), r)));
        }

        #[test]
        fn reduction_congruence(coeffs in proptest::collection::vec(0u64..101, 1..9), g in proptest::collection::vec(0u64..101, 6)) {
            let f = Field::prime_u64(101).unwrap();
            let big_f = Poly::new(coeffs.iter().map(|&x| f.from_u64(x)).collect());
            let gp = |a: u64, b: u64| Poly::new(vec![f.from_u64(a), f.from_u64(b)]);
            let bg = BiPoly { c: vec![gp(g[0], g[1]), gp(g[2], g[3]), gp(g[4], g[5]), Poly::one(&f)] };
            let (f0, f1, f2) = reduce_mod_cubic(&f, &big_f, &bg).unwrap();
            // check at a handful of t values by exact division of univariate specializations
            for t0 in [0u64, 1, 7, 50] {
                let t0 = f.from_u64(t0);
                let gx = bg.at_t(&f, &t0);
                let rem = Poly::new(vec![f0.eval(&f, &t0), f1.eval(&f, &t0), f2.eval(&f, &t0)]);
                prop_assert!(big_f.sub(&f, &rem).rem(&f, &gx).is_zero());
            }
            prop_assert!(f0.deg() <= 5 && f1.deg() <= 5 && f2.deg() <= 5);
        }
    }
}
