//! Genus-3 hyperelliptic curves `y² = F(x)`, odd-degree models, Mumford classes
//! with Cantor's algorithm, point counting and L-polynomials.

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::field::{Elem, Embedding, Field};
use crate::poly::{factorize, is_squarefree, roots, Form, Mobius, Poly};

pub const GENUS: usize = 3;
/// Default enumeration guard for point counting.
pub const COUNT_LIMIT: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("curve polynomial must have degree 7 or 8, got {0}")]
    BadDegree(isize),
    #[error("curve polynomial is not squarefree")]
    NotSquarefree,
    #[error("no rational Weierstrass point over this field")]
    NoRationalWeierstrassPoint,
    #[error("divisor classes belong to different models")]
    ModelMismatch,
    #[error("field of order {0} too large to enumerate")]
    TooLarge(BigUint),
    #[error("form is not a squarefree factor of the curve")]
    NotAFactor,
    #[error("point is not on the curve")]
    NotOnCurve,
}

/// `H: y² = F(x)` with `deg F ∈ {7, 8}` squarefree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HCurve {
    field: Field,
    f: Poly,
}

impl HCurve {
    pub fn new(field: &Field, f: Poly) -> Result<HCurve, CurveError> {
        let d = f.deg();
        if d != 7 && d != 8 {
            return Err(CurveError::BadDegree(d));
        }
        if !is_squarefree(field, &f).unwrap_or(false) {
            return Err(CurveError::NotSquarefree);
        }
        Ok(HCurve { field: field.clone(), f })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree().unwrap()
    }

    /// `F̃(u, v) = v⁸ F(u/v)`.
    pub fn form(&self) -> Form {
        Form::from_poly(&self.field, &self.f, 8)
    }

    /// `c·F`; a quadratic twist when `c` is a non-square.
    pub fn twist(&self, c: &Elem) -> HCurve {
        HCurve { field: self.field.clone(), f: self.f.scale(&self.field, c) }
    }

    /// Coordinate change `x = μ(x')`, `y' = y (c x' + d)^4`.
    pub fn transform(&self, m: &Mobius) -> Result<HCurve, CurveError> {
        HCurve::new(&self.field, m.pull_poly(&self.field, &self.f, 8))
    }

    /// The same curve over an extension of its field.
    pub fn embed(&self, e: &Embedding) -> HCurve {
        HCurve { field: e.target().clone(), f: self.f.embed(e) }
    }

    pub fn base_change(&self, target: &Field) -> HCurve {
        let e = self.field.embedding(target).expect("target extends the base field");
        self.embed(&e)
    }

    pub fn contains(&self, x: &Elem, y: &Elem) -> bool {
        self.field.sqr(y) == self.f.eval(&self.field, x)
    }

    /// Degrees of the irreducible factors of `F̃`, counting `v` for degree 7, descending.
    pub fn factor_pattern(&self) -> Vec<usize> {
        let mut d = factorize(&self.field, &self.f).unwrap().degrees();
        if self.degree() == 7 {
            d.push(1);
        }
        d
    }

    /// Affine Weierstrass `x`-coordinates in the curve's field.
    pub fn weierstrass_x(&self) -> Vec<Elem> {
        roots(&self.field, &self.f)
    }

    /// Odd-degree model with a rational Weierstrass point at infinity.
    pub fn to_odd_model(&self) -> Result<OddModel, CurveError> {
        let f = &self.field;
        if self.degree() == 7 {
            return Ok(OddModel { curve: self.clone(), chart: Mobius::identity(f) });
        }
        let r = self.weierstrass_x().into_iter().next().ok_or(CurveError::NoRationalWeierstrassPoint)?;
        // x = r + 1/x'
        let chart = Mobius { a: r, b: f.one(), c: f.one(), d: f.zero() };
        let curve = self.transform(&chart)?;
        debug_assert_eq!(curve.degree(), 7);
        Ok(OddModel { curve, chart })
    }
}

/// Mumford pair `(a, b)` with `a` monic, `deg b < deg a`, `b² ≡ F (mod a)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub a: Poly,
    pub b: Poly,
}

/// A degree-7 model of a curve together with the chart `x_src = chart(x_odd)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddModel {
    pub curve: HCurve,
    pub chart: Mobius,
}

impl OddModel {
    pub fn field(&self) -> &Field {
        self.curve.field()
    }

    pub fn f(&self) -> &Poly {
        self.curve.f()
    }

    pub fn embed(&self, e: &Embedding) -> OddModel {
        OddModel { curve: self.curve.embed(e), chart: self.chart.embed(e) }
    }

    /// Odd-model coordinates of an affine source point; `None` if it lands at infinity.
    pub fn point_from_source(&self, x: &Elem, y: &Elem) -> Option<(Elem, Elem)> {
        let f = self.field();
        let inv = self.chart.inverse(f);
        let xo = inv.apply(f, x)?;
        let s = f.pow_u64(&self.chart.denominator(f, &xo), 4);
        Some((xo, f.mul(y, &s)))
    }

    /// Source coordinates of an affine odd-model point; `None` at the chart's pole.
    pub fn point_to_source(&self, x: &Elem, y: &Elem) -> Option<(Elem, Elem)> {
        let f = self.field();
        let xs = self.chart.apply(f, x)?;
        let s = f.pow_u64(&self.chart.denominator(f, x), 4);
        Some((xs, f.div(y, &s)?))
    }

    pub fn identity(&self) -> DivisorClass {
        DivisorClass { a: Poly::one(self.field()), b: Poly::zero() }
    }

    pub fn is_identity(&self, d: &DivisorClass) -> bool {
        d.a.is_constant()
    }

    /// Class of `P − ∞` for an affine point of the model.
    pub fn point(&self, x: &Elem, y: &Elem) -> Result<DivisorClass, CurveError> {
        let f = self.field();
        if !self.curve.contains(x, y) {
            return Err(CurveError::NotOnCurve);
        }
        Ok(DivisorClass { a: Poly::linear(f, x), b: Poly::constant(y.clone()) })
    }

    /// `Σ (P_i) − Σ (Q_j)` from source-curve points (equal counts, so the infinite parts cancel).
    pub fn divisor_from_source_points(
        &self,
        plus: &[(Elem, Elem)],
        minus: &[(Elem, Elem)],
    ) -> Result<DivisorClass, CurveError> {
        let mut acc = self.identity();
        for (pts, sign) in [(plus, 1), (minus, -1)] {
            for (x, y) in pts {
                if !self.curve_source_contains(x, y) {
                    return Err(CurveError::NotOnCurve);
                }
                let d = match self.point_from_source(x, y) {
                    Some((xo, yo)) => self.point(&xo, &yo)?,
                    // the Weierstrass point moved to infinity
                    None => self.identity(),
                };
                let d = if sign < 0 { self.neg(&d) } else { d };
                acc = self.add(&acc, &d);
            }
        }
        Ok(acc)
    }

    fn curve_source_contains(&self, x: &Elem, y: &Elem) -> bool {
        let f = self.field();
        let src = self.chart.inverse(f).pull_poly(f, self.f(), 8);
        // the source polynomial up to the scalar det(chart)^8
        let det8 = f.pow_u64(&self.chart.det(f), 8);
        f.mul(&f.sqr(y), &det8) == src.eval(f, x)
    }

    pub fn is_valid(&self, d: &DivisorClass) -> bool {
        let f = self.field();
        d.a.is_monic(f)
            && d.a.deg() <= GENUS as isize
            && d.b.deg() < d.a.deg()
            && d.b.sqr(f).sub(f, self.f()).rem(f, &d.a).is_zero()
    }

    pub fn neg(&self, d: &DivisorClass) -> DivisorClass {
        DivisorClass { a: d.a.clone(), b: d.b.neg(self.field()) }
    }

    /// Cantor composition followed by reduction.
    pub fn add(&self, d1: &DivisorClass, d2: &DivisorClass) -> DivisorClass {
        let f = self.field();
        let (d0, e1, e2) = Poly::xgcd(f, &d1.a, &d2.a);
        let (d, c1, c2) = Poly::xgcd(f, &d0, &d1.b.add(f, &d2.b));
        let s1 = c1.mul(f, &e1);
        let s2 = c1.mul(f, &e2);
        let s3 = c2;
        let a = d1.a.mul(f, &d2.a).div_exact(f, &d.sqr(f)).unwrap();
        let num = s1
            .mul(f, &d1.a)
            .mul(f, &d2.b)
            .add(f, &s2.mul(f, &d2.a).mul(f, &d1.b))
            .add(f, &s3.mul(f, &d1.b.mul(f, &d2.b).add(f, self.f())));
        let b = num.div_exact(f, &d).unwrap().rem(f, &a);
        self.reduce(a, b)
    }

    fn reduce(&self, mut a: Poly, mut b: Poly) -> DivisorClass {
        let f = self.field();
        while a.deg() > GENUS as isize {
            let a2 = self.f().sub(f, &b.sqr(f)).div_exact(f, &a).unwrap();
            b = b.neg(f).rem(f, &a2);
            a = a2;
        }
        let a = a.monic(f);
        let b = b.rem(f, &a);
        DivisorClass { a, b }
    }

    pub fn double(&self, d: &DivisorClass) -> DivisorClass {
        self.add(d, d)
    }

    pub fn mul(&self, d: &DivisorClass, n: &BigInt) -> DivisorClass {
        let base = if n.sign() == Sign::Minus { self.neg(d) } else { d.clone() };
        let e = n.abs().to_biguint().unwrap();
        let mut acc = self.identity();
        for i in (0..e.bits()).rev() {
            acc = self.double(&acc);
            if e.bit(i) {
                acc = self.add(&acc, &base);
            }
        }
        acc
    }

    pub fn mul_i64(&self, d: &DivisorClass, n: i64) -> DivisorClass {
        self.mul(d, &BigInt::from(n))
    }

    /// Coefficientwise Frobenius `(a, b) ↦ (a^σ, b^σ)`; the model must be defined over the prime field.
    pub fn frobenius(&self, d: &DivisorClass) -> DivisorClass {
        let f = self.field();
        DivisorClass { a: d.a.frob(f), b: d.b.frob(f) }
    }

    /// Class of `(W') − (W'')` for the Weierstrass pair cut out by a quadratic form in source coordinates.
    pub fn two_torsion_from_pair(&self, q: &Form) -> Result<DivisorClass, CurveError> {
        let f = self.field();
        if q.degree() != 2 {
            return Err(CurveError::NotAFactor);
        }
        let (c0, c1, c2) = (&q.c[0], &q.c[1], &q.c[2]);
        let disc = f.sub(&f.sqr(c1), &f.mul(&f.from_u64(4), &f.mul(c0, c2)));
        if disc.is_zero() {
            return Err(CurveError::NotAFactor);
        }
        let qt = q.transform(f, &self.chart);
        let a = if !qt.c[2].is_zero() {
            qt.affine().monic(f)
        } else {
            // v'·(b' u' + c' v'): one of the pair is the point at infinity of the odd model
            if qt.c[1].is_zero() {
                return Err(CurveError::NotAFactor);
            }
            qt.affine().monic(f)
        };
        if !self.f().rem(f, &a).is_zero() {
            return Err(CurveError::NotAFactor);
        }
        Ok(DivisorClass { a, b: Poly::zero() })
    }

    /// Sum of three random points minus `3∞`.
    pub fn random_class<R: Rng + ?Sized>(&self, rng: &mut R) -> DivisorClass {
        let f = self.field();
        let mut acc = self.identity();
        for _ in 0..GENUS {
            loop {
                let x = f.random(rng);
                let v = self.f().eval(f, &x);
                if let Some(y) = f.sqrt(&v) {
                    let y = if rng.gen::<bool>() { f.neg(&y) } else { y };
                    acc = self.add(&acc, &DivisorClass { a: Poly::linear(f, &x), b: Poly::constant(y) });
                    break;
                }
            }
        }
        acc
    }

    /// The affine points in the support, over `target`.
    pub fn support_points(&self, d: &DivisorClass, target: &Field) -> Vec<(Elem, Elem)> {
        let e = self.field().embedding(target).expect("target extends the model field");
        let a = d.a.embed(&e);
        let b = d.b.embed(&e);
        roots(target, &a).into_iter().map(|x| {
            let y = b.eval(target, &x);
            (x, y)
        }).collect()
    }
}

/// `#H(F_{p^k})` by enumerating `x` with a quadratic-character test.
pub fn count_points(h: &HCurve, k: usize) -> Result<u64, CurveError> {
    let base = h.field();
    let ext = base.with_degree(base.degree() * k).map_err(|_| CurveError::TooLarge(base.order().pow(k as u32)))?;
    let order = ext.order().clone();
    let n = match order.to_u64() {
        Some(n) if n <= COUNT_LIMIT => n,
        _ => return Err(CurveError::TooLarge(order)),
    };
    let hc = h.base_change(&ext);
    let chunk = 4096u64;
    let affine: u64 = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut s = 0u64;
            for idx in c * chunk..((c + 1) * chunk).min(n) {
                let x = ext.from_index(idx);
                let v = hc.f().eval(&ext, &x);
                if v.is_zero() {
                    s += 1;
                } else if ext.is_square(&v) {
                    s += 2;
                }
            }
            s
        })
        .sum();
    let infinity = if h.degree() == 7 {
        1
    } else if ext.is_square(&hc.f().lc(&ext)) {
        2
    } else {
        0
    };
    Ok(affine + infinity)
}

/// `L(T) = 1 + a1 T + … + a6 T⁶` from the counts over the first three extensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub q: BigInt,
    pub coeffs: Vec<BigInt>,
}

impl LPolynomial {
    pub fn from_counts(q: &BigInt, counts: [u64; 3]) -> LPolynomial {
        // power sums of the Frobenius eigenvalues: S_k = q^k + 1 - N_k
        let s: Vec<BigInt> =
            (1..=3).map(|k| q.pow(k as u32) + 1 - BigInt::from(counts[k - 1])).collect();
        // Newton: k e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} S_i
        let mut e = vec![BigInt::from(1)];
        for k in 1..=3usize {
            let mut acc = BigInt::zero();
            for i in 1..=k {
                let term = &e[k - i] * &s[i - 1];
                if i % 2 == 1 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            e.push(acc / BigInt::from(k));
        }
        let a1 = -&e[1];
        let a2 = e[2].clone();
        let a3 = -&e[3];
        let coeffs = vec![BigInt::from(1), a1.clone(), a2.clone(), a3, q * &a2, q * q * &a1, q.pow(3)];
        LPolynomial { q: q.clone(), coeffs }
    }

    pub fn eval(&self, t: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * t + c)
    }

    /// `#Jac(F_q) = L(1)`.
    pub fn jacobian_order(&self) -> BigInt {
        self.eval(&BigInt::from(1))
    }
}

pub fn l_polynomial(h: &HCurve) -> Result<LPolynomial, CurveError> {
    let counts = [count_points(h, 1)?, count_points(h, 2)?, count_points(h, 3)?];
    Ok(LPolynomial::from_counts(&BigInt::from(h.field().order().clone()), counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example() -> HCurve {
        let f = Field::prime_u64(37).unwrap();
        HCurve::new(&f, Poly::from_i64s(&f, &[2, 29, 12, 33, 20, 15, 28, 1])).unwrap()
    }

    fn pt(h: &HCurve, x: i64, y: i64) -> (Elem, Elem) {
        (h.field().from_i64(x), h.field().from_i64(y))
    }

    #[test]
    fn curve_validation() {
        let f = Field::prime_u64(37).unwrap();
        assert_eq!(HCurve::new(&f, Poly::from_i64s(&f, &[1, 0, 1])), Err(CurveError::BadDegree(2)));
        let sq = Poly::from_i64s(&f, &[1, 1]).pow(&f, 2).mul(&f, &Poly::from_i64s(&f, &[1, 2, 3, 4, 5, 1]));
        assert_eq!(HCurve::new(&f, sq), Err(CurveError::NotSquarefree));
    }

    #[test]
    fn example_counts_and_l_polynomial() {
        let h = example();
        assert_eq!(count_points(&h, 1).unwrap(), 42);
        let l = l_polynomial(&h).unwrap();
        let q = BigInt::from(37);
        let expect: Vec<BigInt> = vec![
            BigInt::from(1),
            BigInt::from(4),
            BigInt::from(-6),
            BigInt::from(-240),
            BigInt::from(-6) * &q,
            BigInt::from(4) * &q * &q,
            q.pow(3),
        ];
        assert_eq!(l.coeffs, expect);
        assert_eq!(l.jacobian_order(), BigInt::from(55666));
    }

    #[test]
    fn example_dlp_relation() {
        let h = example();
        let m = h.to_odd_model().unwrap();
        assert!(m.chart.is_identity(h.field()));
        let d = m.divisor_from_source_points(&[pt(&h, 10, 28)], &[pt(&h, 14, 6)]).unwrap();
        let d2 = m.divisor_from_source_points(&[pt(&h, 19, 28)], &[pt(&h, 36, 13)]).unwrap();
        assert_eq!(m.mul_i64(&d, 22359), d2);
        assert!(m.is_identity(&m.mul_i64(&d, 55666)));
        assert!(m.is_identity(&m.add(&d, &m.neg(&d))));
    }

    #[test]
    fn random_class_deterministic_and_killed_by_group_order() {
        let h = example();
        let m = h.to_odd_model().unwrap();
        let a = m.random_class(&mut ChaCha8Rng::seed_from_u64(9));
        let b = m.random_class(&mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
        assert!(a.a.deg() <= 3 && m.is_valid(&a));
        assert!(m.is_identity(&m.mul_i64(&a, 55666)));
    }

    #[test]
    fn odd_model_of_even_degree_curve() {
        let f = Field::prime_u64(101).unwrap();
        // root at x = 0 (u/v = 0)
        let poly = Poly::from_i64s(&f, &[0, 3, 1, 4, 1, 5, 9, 2, 6]);
        let h = HCurve::new(&f, poly).unwrap();
        let m = h.to_odd_model().unwrap();
        assert_eq!(m.curve.degree(), 7);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = f.random(&mut rng);
            if let Some(y) = f.sqrt(&h.f().eval(&f, &x)) {
                if let Some((xo, yo)) = m.point_from_source(&x, &y) {
                    assert!(m.curve.contains(&xo, &yo));
                    assert_eq!(m.point_to_source(&xo, &yo), Some((x, y)));
                }
            }
        }
        // an irreducible octic has no rational Weierstrass point
        let irr = (1u64..)
            .map(|c| Poly::new((0..9).map(|i| f.from_u64(if i == 8 { 1 } else { (c * (i + 3) * (i + 7)) % 101 })).collect()))
            .find(|p| crate::poly::is_irreducible(&f, p))
            .unwrap();
        let h = HCurve::new(&f, irr).unwrap();
        assert_eq!(h.to_odd_model(), Err(CurveError::NoRationalWeierstrassPoint));
    }

    #[test]
    fn two_torsion_pairs() {
        let h = example();
        let f = h.field();
        let m = h.to_odd_model().unwrap();
        // the pair {∞, 17}: v·(u − 17v)
        let q = Form { c: vec![f.from_i64(-17), f.one(), f.zero()] };
        let t = m.two_torsion_from_pair(&q).unwrap();
        assert!(m.is_identity(&m.double(&t)));
        assert!(!m.is_identity(&t));
        let bad = Form { c: vec![f.one(), f.from_u64(2), f.one()] };
        assert_eq!(m.two_torsion_from_pair(&bad), Err(CurveError::NotAFactor));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn group_laws(seed in any::<u64>()) {
            let f = Field::prime_u64(1009).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let poly = loop {
                let mut c: Vec<Elem> = (0..7).map(|_| f.random(&mut rng)).collect();
                c.push(f.one());
                let p = Poly::new(c);
                if is_squarefree(&f, &p).unwrap() { break p; }
            };
            let h = HCurve::new(&f, poly).unwrap();
            let m = h.to_odd_model().unwrap();
            let (a, b, c) = (m.random_class(&mut rng), m.random_class(&mut rng), m.random_class(&mut rng));
            prop_assert_eq!(m.add(&a, &b), m.add(&b, &a));
            prop_assert_eq!(m.add(&m.add(&a, &b), &c), m.add(&a, &m.add(&b, &c)));
            prop_assert!(m.is_identity(&m.add(&a, &m.neg(&a))));
            prop_assert_eq!(m.add(&a, &m.identity()), a.clone());
            prop_assert_eq!(m.mul_i64(&a, 5), m.add(&m.mul_i64(&a, 2), &m.mul_i64(&a, 3)));
            prop_assert!(m.is_valid(&m.add(&a, &b)));
        }

        #[test]
        fn twist_sheet_identity(seed in any::<u64>()) {
            let f = Field::prime_u64(101).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let poly = loop {
                let p = Poly::new((0..9).map(|_| f.random(&mut rng)).collect());
                if p.deg() >= 7 && is_squarefree(&f, &p).unwrap() { break p; }
            };
            let h = HCurve::new(&f, poly).unwrap();
            let tw = h.twist(&f.from_u64(2));
            let n = count_points(&h, 1).unwrap() + count_points(&tw, 1).unwrap();
            prop_assert_eq!(n, 2 * 101 + 2);
            // |a1| = |N1 - q - 1| ≤ 6 √q
            let a1 = count_points(&h, 1).unwrap() as i64 - 102;
            prop_assert!(a1.abs() <= 61);
        }
    }
}
