//! Evaluation of the isogeny `φ = (π_X)_* ∘ (π_H)^*` on divisor classes, the reverse
//! composition back to `Jac(H)`, and point counts on `X` over the unramified locus.
//!
//! Divisors on `X` are kept as integer combinations of Galois orbits: each term is a point
//! over its field of definition standing for the sum of its conjugates.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::construction::Construction;
use crate::field::{Elem, Field, MAX_EXTENSION_DEGREE};
use crate::hyperelliptic::{CurveError, DivisorClass, HCurve, OddModel};
use crate::poly::{factorize, roots, Mobius, Poly};

pub const SHUFFLE_ATTEMPTS: usize = 16;
pub const COUNT_LIMIT: u64 = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsogenyError {
    #[error("fiber over a ramified or excluded value of t")]
    RamifiedFiber,
    #[error("no representative with good support after {0} attempts")]
    BadSupport(usize),
    #[error("the isogeny is not defined over the base field")]
    NotRational,
    #[error("working field of degree {0} is too large")]
    TooLarge(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// `(t, b00, b01, b02, b11, b12, b22)` over `field`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XPoint {
    pub field: Field,
    pub t: Elem,
    pub b: [Elem; 6],
}

impl XPoint {
    fn coords(&self) -> impl Iterator<Item = &Elem> {
        std::iter::once(&self.t).chain(self.b.iter())
    }

    fn map(&self, field: &Field, g: impl Fn(&Elem) -> Elem) -> XPoint {
        XPoint { field: field.clone(), t: g(&self.t), b: std::array::from_fn(|i| g(&self.b[i])) }
    }

    fn cmp_encoding(&self, o: &XPoint) -> Ordering {
        let f = &self.field;
        self.coords().zip(o.coords()).map(|(a, b)| f.cmp_encoding(a, b)).find(|c| c.is_ne()).unwrap_or(Ordering::Equal)
    }

    /// Smallest subfield containing the coordinates, with the point moved there.
    pub fn descend(&self) -> XPoint {
        let k = self.field.degree();
        let fp = self.field.prime_field();
        for m in (1..=k).filter(|m| k.is_multiple_of(*m)) {
            if self.coords().all(|a| self.field.frob_pow(a, m) == *a) {
                let small = fp.with_degree(m).unwrap();
                let e = small.embedding(&self.field).unwrap();
                return self.map(&small, |a| e.preimage(a).unwrap());
            }
        }
        unreachable!("the full field always works")
    }

    /// Orbit representative with the smallest encoding; `self` must already be descended.
    pub fn canonical(&self) -> XPoint {
        let f = &self.field;
        let mut best = self.clone();
        let mut cur = self.clone();
        for _ in 1..f.degree() {
            cur = cur.map(f, |a| f.frob_p(a));
            if cur.cmp_encoding(&best).is_lt() {
                best = cur.clone();
            }
        }
        best
    }

    pub fn embed(&self, target: &Field) -> XPoint {
        let e = self.field.embedding(target).unwrap();
        self.map(target, |a| e.apply(a))
    }

    /// Size of the Galois orbit, for a descended point.
    pub fn orbit_size(&self) -> usize {
        self.field.degree()
    }

    pub fn b_array(&self) -> &[Elem; 6] {
        &self.b
    }
}

/// `Σ weight · (Galois orbit of point)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct XDivisor {
    pub terms: Vec<(XPoint, i64)>,
}

impl XDivisor {
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(p, w)| w * p.orbit_size() as i64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, p: XPoint, w: i64) {
        if w == 0 {
            return;
        }
        let p = p.canonical();
        if let Some(entry) = self.terms.iter_mut().find(|(q, _)| *q == p) {
            entry.1 += w;
        } else {
            self.terms.push((p, w));
        }
        self.terms.retain(|(_, w)| *w != 0);
    }

    pub fn add_scaled(&mut self, o: &XDivisor, s: i64) {
        for (p, w) in &o.terms {
            self.push(p.clone(), w * s);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundTrip {
    Plus2,
    Minus2,
    /// `[2]D = [−2]D`, both match.
    Both,
    Mismatch,
}

impl RoundTrip {
    pub fn sign(&self) -> Option<i8> {
        match self {
            RoundTrip::Plus2 => Some(1),
            RoundTrip::Minus2 => Some(-1),
            _ => None,
        }
    }
}

/// Per-class outcomes and the sign they agree on.
#[derive(Clone, Debug)]
pub struct RoundTripReport {
    pub outcomes: Vec<RoundTrip>,
    pub consensus: Option<i8>,
}

impl RoundTripReport {
    pub fn from_outcomes(outcomes: Vec<RoundTrip>) -> RoundTripReport {
        let mut signs = outcomes.iter().filter(|o| **o != RoundTrip::Both).map(|o| o.sign());
        let consensus = match signs.next() {
            None => None,
            Some(first) => first.filter(|_| signs.all(|s| s == first)),
        };
        RoundTripReport { outcomes, consensus }
    }
}

/// The four points of `X` over a value of `t`, in the field where they all live.
struct RawFiber {
    field: Field,
    points: Vec<XPoint>,
}

/// Evaluator tied to an original curve, its odd model and a rational construction on a
/// working model `x_original = chart(x_working)`.
pub struct Isogeny {
    pub original: HCurve,
    pub home: OddModel,
    pub construction: Construction,
    chart: Mobius,
    /// `x_working = nu(x_odd)`.
    nu: Mobius,
    /// `λ⁻⁴` where `chart ∘ nu = λ · home.chart`.
    y_scale: Elem,
}

impl Isogeny {
    pub fn new(original: &HCurve, construction: Construction) -> Result<Isogeny, IsogenyError> {
        if !construction.rational() {
            return Err(IsogenyError::NotRational);
        }
        let f = original.field().clone();
        let home = original.to_odd_model()?;
        let chart = construction.setup.as_ref().map_or_else(|| Mobius::identity(&f), |s| s.chart.clone());
        let nu = chart.inverse(&f).compose(&f, &home.chart);
        let lambda = chart.det(&f);
        let y_scale = f.inv(&f.pow_u64(&lambda, 4)).unwrap();
        Ok(Isogeny { original: original.clone(), home, construction, chart, nu, y_scale })
    }

    pub fn field(&self) -> &Field {
        self.original.field()
    }

    fn working(&self) -> &HCurve {
        &self.construction.fibration.curve
    }

    fn ext(&self, k: usize) -> Result<Field, IsogenyError> {
        if k > MAX_EXTENSION_DEGREE {
            return Err(IsogenyError::TooLarge(k));
        }
        Ok(self.field().with_degree(k).unwrap())
    }

    fn raw_fiber(&self, k: &Field, t0: &Elem) -> Result<RawFiber, IsogenyError> {
        if !self.construction.is_unramified(k, t0) {
            return Err(IsogenyError::RamifiedFiber);
        }
        let g0 = self.construction.fibration.big_g.at_t_in(k, t0);
        let fac = factorize(k, &g0).expect("nonzero cubic");
        let l = fac.factors.iter().fold(1usize, |acc, (h, _)| acc.lcm(&(h.deg() as usize)));
        let m1 = self.ext(k.degree() * l)?;
        let e1 = k.embedding(&m1).unwrap();
        let xs = roots(&m1, &g0.embed(&e1));
        debug_assert_eq!(xs.len(), 3);
        let fw = self.working().f();
        let vals: Vec<Elem> = xs.iter().map(|x| fw.lift(&m1).eval(&m1, x)).collect();
        let (m, xs, vals) = if vals.iter().all(|v| m1.is_square(v)) {
            (m1, xs, vals)
        } else {
            let m2 = self.ext(2 * m1.degree())?;
            let e2 = m1.embedding(&m2).unwrap();
            (m2.clone(), xs.iter().map(|x| e2.apply(x)).collect(), vals.iter().map(|v| e2.apply(v)).collect())
        };
        let y: Vec<Elem> = vals.iter().map(|v| m.sqrt(v).unwrap()).collect();
        let x = [xs[0].clone(), xs[1].clone(), xs[2].clone()];
        let t_m = k.embedding(&m).unwrap().apply(t0);
        let mut points = Vec::with_capacity(4);
        for signs in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            let ys = [
                y[0].clone(),
                if signs[0] < 0 { m.neg(&y[1]) } else { y[1].clone() },
                if signs[1] < 0 { m.neg(&y[2]) } else { y[2].clone() },
            ];
            let b = interpolate(&m, &x, &ys);
            points.push(XPoint { field: m.clone(), t: t_m.clone(), b: square_map(&m, &b) });
        }
        Ok(RawFiber { field: m, points })
    }

    /// All points of `X` over `t0 ∈ k` with coordinates in `k`.
    pub fn fiber_points(&self, k: &Field, t0: &Elem) -> Result<Vec<XPoint>, IsogenyError> {
        let raw = self.raw_fiber(k, t0)?;
        Ok(raw
            .points
            .iter()
            .map(|p| p.descend())
            .filter(|p| k.degree().is_multiple_of(p.field.degree()))
            .map(|p| p.embed(k))
            .collect())
    }

    /// `Σ_{t0 ∈ F_{p^k}, unramified} #fiber(t0)`.
    pub fn count_x_open(&self, k: usize) -> Result<u64, IsogenyError> {
        let kf = self.ext(k)?;
        let size = kf.order().to_u64().filter(|&n| n <= COUNT_LIMIT).ok_or(IsogenyError::TooLarge(k))?;
        (0..size)
            .into_par_iter()
            .map(|i| match self.fiber_points(&kf, &kf.from_index(i)) {
                Ok(v) => Ok(v.len() as u64),
                Err(IsogenyError::RamifiedFiber) => Ok(0),
                Err(e) => Err(e),
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))
    }

    /// Count of the Frobenius-stable ways to split the six points of `H` above `t0` into two
    /// triples exchanged by the hyperelliptic involution, found from the points themselves.
    pub fn pair_partition_count(&self, k: &Field, t0: &Elem) -> Result<usize, IsogenyError> {
        if !self.construction.is_unramified(k, t0) {
            return Err(IsogenyError::RamifiedFiber);
        }
        let map = &self.construction.fibration.map;
        let cubic = map.n_poly().lift(k).sub(k, &map.d_poly().lift(k).scale(k, t0));
        let fw = self.working().f();
        for j in 1..=6 {
            let m = self.ext(k.degree() * j)?;
            let e = k.embedding(&m).unwrap();
            let xs = roots(&m, &cubic.embed(&e));
            if xs.len() < 3 {
                continue;
            }
            let Some(ys) = xs.iter().map(|x| m.sqrt(&fw.lift(&m).eval(&m, x))).collect::<Option<Vec<_>>>() else {
                continue;
            };
            // point (i, s) is (x_i, ±y_i); a triple picks one sign per x
            let points: Vec<(Elem, Elem)> = (0..6)
                .map(|n| (xs[n / 2].clone(), if n % 2 == 0 { ys[n / 2].clone() } else { m.neg(&ys[n / 2]) }))
                .collect();
            let sigma: Vec<usize> = points
                .iter()
                .map(|(x, y)| {
                    let img = (m.frob_pow(x, k.degree()), m.frob_pow(y, k.degree()));
                    points.iter().position(|q| *q == img).expect("Frobenius permutes the fiber")
                })
                .collect();
            let triples: Vec<[usize; 3]> =
                (0..8).map(|b| [b & 1, 2 + ((b >> 1) & 1), 4 + ((b >> 2) & 1)]).collect();
            let involution = |t: &[usize; 3]| t.map(|n| n ^ 1);
            let normalize = |mut t: [usize; 3]| {
                t.sort_unstable();
                t
            };
            let count = triples
                .iter()
                .filter(|t| t[0] == 0)
                .filter(|t| {
                    let img = normalize(t.map(|n| sigma[n]));
                    img == normalize(**t) || img == normalize(involution(t))
                })
                .count();
            return Ok(count);
        }
        Err(IsogenyError::TooLarge(6 * k.degree()))
    }

    /// Working-model coordinates of an affine home-model point over `k`.
    fn home_to_working(&self, k: &Field, x: &Elem, y: &Elem) -> Option<(Elem, Elem)> {
        let home = self.home.embed(&self.field().embedding(k).unwrap());
        let (x0, y0) = home.point_to_source(x, y)?;
        self.source_to_working(k, &x0, &y0)
    }

    fn source_to_working(&self, k: &Field, x0: &Elem, y0: &Elem) -> Option<(Elem, Elem)> {
        let chart = self.chart.lift(k);
        let xw = chart.inverse(k).apply(k, x0)?;
        let yw = k.mul(y0, &k.pow_u64(&chart.denominator(k, &xw), 4));
        Some((xw, yw))
    }

    /// Image of the Galois orbit of a working-model point `(x, y)` over `k`.
    pub fn phi_on_working_point(&self, k: &Field, x: &Elem, y: &Elem) -> Result<XDivisor, IsogenyError> {
        let fib = &self.construction.fibration;
        let bad = IsogenyError::BadSupport(1);
        let den = fib.map.d_poly().lift(k).eval(k, x);
        if den.is_zero() || self.working().f().lift(k).eval(k, x).is_zero() {
            return Err(bad);
        }
        let t0 = k.div(&fib.map.n_poly().lift(k).eval(k, x), &den).unwrap();
        let raw = match self.raw_fiber(k, &t0) {
            Err(IsogenyError::RamifiedFiber) => return Err(bad),
            r => r?,
        };
        let m = &raw.field;
        let e = k.embedding(m).unwrap();
        let (xm, ym) = (e.apply(x), e.apply(y));
        let mut hits = Vec::new();
        for q in &raw.points {
            let rho = self.construction.correspondence.rho(m, &q.t, &q.b[5]).ok_or(bad.clone())?;
            let rhs = m.add(&m.mul(&m.add(&m.mul(&q.b[5], &xm), &q.b[4]), &xm), &q.b[2]);
            if m.mul(&ym, &rho) == rhs {
                hits.push(q.descend());
            }
        }
        if hits.len() != 2 {
            return Err(bad);
        }
        let d = k.degree();
        let mut out = XDivisor::default();
        let (m1, m2) = (hits[0].orbit_size(), hits[1].orbit_size());
        if d.is_multiple_of(m1) && d.is_multiple_of(m2) {
            out.push(hits[0].clone(), (d / m1) as i64);
            out.push(hits[1].clone(), (d / m2) as i64);
        } else {
            // the two images are exchanged by the d-th power of Frobenius
            out.push(hits[0].clone(), (2 * d / m1) as i64);
        }
        Ok(out)
    }

    /// Image of an effective Mumford divisor on the home model.
    fn phi_on_effective(&self, d: &DivisorClass) -> Result<XDivisor, IsogenyError> {
        let f = self.field();
        let mut out = XDivisor::default();
        if d.a.is_constant() {
            return Ok(out);
        }
        let fac = factorize(f, &d.a).expect("nonzero");
        for (h, mult) in &fac.factors {
            let k = self.ext(h.deg() as usize)?;
            let e = f.embedding(&k).unwrap();
            let theta = roots(&k, &h.embed(&e)).into_iter().next().expect("root in the splitting field");
            let yo = d.b.embed(&e).eval(&k, &theta);
            let (xw, yw) = self.home_to_working(&k, &theta, &yo).ok_or(IsogenyError::BadSupport(1))?;
            let img = self.phi_on_working_point(&k, &xw, &yw)?;
            out.add_scaled(&img, *mult as i64);
        }
        Ok(out)
    }

    /// `φ(D)` through a representative `(D + E) − E` with both parts of good support.
    /// `Σ φ(P) − Σ φ(Q)` for affine points of the original curve over the base field.
    pub fn phi_on_source_points(&self, plus: &[(Elem, Elem)], minus: &[(Elem, Elem)]) -> Result<XDivisor, IsogenyError> {
        let f = self.field();
        let mut out = XDivisor::default();
        for (pts, s) in [(plus, 1), (minus, -1)] {
            for (x, y) in pts {
                if !self.original.contains(x, y) {
                    return Err(IsogenyError::BadSupport(0));
                }
                let (xw, yw) = self.source_to_working(f, x, y).ok_or(IsogenyError::BadSupport(1))?;
                out.add_scaled(&self.phi_on_working_point(f, &xw, &yw)?, s);
            }
        }
        Ok(out)
    }

    pub fn phi_on_class<R: Rng + ?Sized>(&self, d: &DivisorClass, rng: &mut R) -> Result<XDivisor, IsogenyError> {
        if self.home.is_identity(d) {
            return Ok(XDivisor::default());
        }
        for _ in 0..SHUFFLE_ATTEMPTS {
            let e = self.home.random_class(rng);
            let de = self.home.add(d, &e);
            if de.a.deg() != e.a.deg() {
                continue;
            }
            let (Ok(plus), Ok(minus)) = (self.phi_on_effective(&de), self.phi_on_effective(&e)) else { continue };
            let mut out = plus;
            out.add_scaled(&minus, -1);
            return Ok(out);
        }
        Err(IsogenyError::BadSupport(SHUFFLE_ATTEMPTS))
    }

    /// Class of the three points of `R` over `q`, on the home model over `q`'s field.
    fn pullback_class(&self, q: &XPoint) -> Result<DivisorClass, IsogenyError> {
        let k = &q.field;
        let rho = self.construction.correspondence.rho(k, &q.t, &q.b[5]).ok_or(IsogenyError::BadSupport(1))?;
        let aw = self.construction.fibration.big_g.at_t_in(k, &q.t);
        let bw = Poly::new(vec![q.b[2].clone(), q.b[4].clone(), q.b[5].clone()]).scale(k, &k.inv(&rho).unwrap());
        let nu = self.nu.lift(k);
        let a = nu.pull_poly(k, &aw, 3);
        if a.is_zero() {
            return Err(IsogenyError::BadSupport(1));
        }
        let a = a.monic(k);
        let scale = k.lift_prime(&self.field().prime_field(), &self.y_scale);
        let b = nu.pull_poly(k, &bw, 4).scale(k, &scale).rem(k, &a);
        Ok(DivisorClass { a, b })
    }

    /// `(π_H)_* (π_X)^*` of a degree-0 divisor on `X`.
    pub fn reverse_on_xdivisor(&self, dx: &XDivisor) -> Result<DivisorClass, IsogenyError> {
        let f = self.field();
        let mut acc = self.home.identity();
        for (q, w) in &dx.terms {
            let k = &q.field;
            let e = f.embedding(k).unwrap();
            let home_k = self.home.embed(&e);
            let c = self.pullback_class(q)?;
            debug_assert!(home_k.is_valid(&c));
            let mut tr = home_k.identity();
            let mut cur = c;
            for _ in 0..k.degree() {
                tr = home_k.add(&tr, &cur);
                cur = home_k.frobenius(&cur);
            }
            let down = DivisorClass {
                a: tr.a.descend(&e).expect("trace is rational"),
                b: tr.b.descend(&e).expect("trace is rational"),
            };
            acc = self.home.add(&acc, &self.home.mul_i64(&down, *w));
        }
        Ok(acc)
    }

    pub fn roundtrip<R: Rng + ?Sized>(&self, d: &DivisorClass, rng: &mut R) -> Result<RoundTrip, IsogenyError> {
        let back = self.reverse_on_xdivisor(&self.phi_on_class(d, rng)?)?;
        let plus = back == self.home.mul_i64(d, 2);
        let minus = back == self.home.mul_i64(d, -2);
        Ok(match (plus, minus) {
            (true, true) => RoundTrip::Both,
            (true, false) => RoundTrip::Plus2,
            (false, true) => RoundTrip::Minus2,
            _ => RoundTrip::Mismatch,
        })
    }

    pub fn roundtrip_many<R: Rng + ?Sized>(
        &self,
        classes: &[DivisorClass],
        rng: &mut R,
    ) -> Result<RoundTripReport, IsogenyError> {
        let outcomes = classes.iter().map(|d| self.roundtrip(d, rng)).collect::<Result<Vec<_>, _>>()?;
        Ok(RoundTripReport::from_outcomes(outcomes))
    }

    /// A random class of odd order: a random class times the 2-part of the group order.
    pub fn random_odd_class<R: Rng + ?Sized>(&self, group_order: &BigUint, rng: &mut R) -> DivisorClass {
        let mut two = 1u64;
        let mut n = group_order.clone();
        while n.is_even() && n > BigUint::from(0u32) {
            n >>= 1;
            two <<= 1;
        }
        let c = self.home.random_class(rng);
        self.home.mul_i64(&c, two as i64)
    }
}

/// `b(x) = b0 + b1 x + b2 x²` through `(x_i, y_i)`.
pub fn interpolate(k: &Field, x: &[Elem; 3], y: &[Elem; 3]) -> [Elem; 3] {
    let mut b = [k.zero(), k.zero(), k.zero()];
    for i in 0..3 {
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        let den = k.mul(&k.sub(&x[i], &x[j]), &k.sub(&x[i], &x[l]));
        let c = k.div(&y[i], &den).expect("distinct roots");
        b[2] = k.add(&b[2], &c);
        b[1] = k.sub(&b[1], &k.mul(&c, &k.add(&x[j], &x[l])));
        b[0] = k.add(&b[0], &k.mul(&c, &k.mul(&x[j], &x[l])));
    }
    b
}

/// `(b0², b0 b1, b0 b2, b1², b1 b2, b2²)`.
pub fn square_map(k: &Field, b: &[Elem; 3]) -> [Elem; 6] {
    [
        k.sqr(&b[0]),
        k.mul(&b[0], &b[1]),
        k.mul(&b[0], &b[2]),
        k.sqr(&b[1]),
        k.mul(&b[1], &b[2]),
        k.sqr(&b[2]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{construct, construct_with_map};
    use crate::tractable::enumerate_tractable;
    use crate::trigonal::TrigonalMap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn example() -> HCurve {
        let f = Field::prime_u64(37).unwrap();
        HCurve::new(&f, Poly::from_i64s(&f, &[2, 29, 12, 33, 20, 15, 28, 1])).unwrap()
    }

    fn reference_isogeny() -> Isogeny {
        let h = example();
        let g = TrigonalMap::from_i64(h.field(), 16, 22, 32, 18);
        Isogeny::new(&h, construct_with_map(&h, &g, 1).unwrap()).unwrap()
    }

    #[test]
    fn fibers_lie_on_x() {
        let iso = reference_isogeny();
        let f = iso.field().clone();
        let x = &iso.construction.x;
        let mut seen = 0;
        for t in 0..37 {
            let t0 = f.from_u64(t);
            let Ok(pts) = iso.fiber_points(&f, &t0) else { continue };
            assert!([0, 1, 2, 4].contains(&pts.len()));
            for q in &pts {
                assert!(x.contains(&f, &q.t, &q.b));
                let res = iso.construction.plane.residual(&iso.construction.fibration, &f, &q.t, &q.b[5]);
                assert!(res.is_zero());
                let rho = iso.construction.correspondence.rho(&f, &q.t, &q.b[5]).unwrap();
                assert_eq!(f.sqr(&rho), q.b[5]);
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn fiber_sizes_match_pair_partitions() {
        let iso = reference_isogeny();
        let f = iso.field().clone();
        let k2 = f.with_degree(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut checked = 0;
        for k in [&f, &k2] {
            for _ in 0..40 {
                let t0 = k.random(&mut rng);
                let Ok(pts) = iso.fiber_points(k, &t0) else { continue };
                assert_eq!(pts.len(), iso.pair_partition_count(k, &t0).unwrap());
                checked += 1;
            }
        }
        assert!(checked > 40);
    }

    #[test]
    fn point_image_has_degree_two() {
        let iso = reference_isogeny();
        let f = iso.field().clone();
        let mut done = 0;
        for x in 0..37u64 {
            let x = f.from_u64(x);
            let v = iso.original.f().eval(&f, &x);
            let Some(y) = f.sqrt(&v) else { continue };
            if y.is_zero() {
                continue;
            }
            let (Ok(a), Ok(b)) = (iso.phi_on_working_point(&f, &x, &y), iso.phi_on_working_point(&f, &x, &f.neg(&y)))
            else {
                continue;
            };
            assert_eq!(a.degree(), 2);
            assert!(a.terms.iter().all(|(_, w)| *w > 0));
            // together the images of P and ι(P) fill the fiber
            let mut both = a.clone();
            both.add_scaled(&b, 1);
            assert_eq!(both.degree(), 4);
            assert!(both.terms.iter().all(|(_, w)| *w == 1 || both.degree() == 4));
            done += 1;
        }
        assert!(done > 3);
    }

    #[test]
    fn example_roundtrip_is_plus_or_minus_two() {
        let iso = reference_isogeny();
        let f = iso.field().clone();
        let pt = |x: i64, y: i64| (f.from_i64(x), f.from_i64(y));
        let d = iso.home.divisor_from_source_points(&[pt(10, 28)], &[pt(14, 6)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let first = iso.roundtrip(&d, &mut rng).unwrap();
        assert_eq!(first, RoundTrip::Plus2);
        let classes: Vec<_> = (0..10).map(|_| iso.home.random_class(&mut rng)).collect();
        let rep = iso.roundtrip_many(&classes, &mut rng).unwrap();
        assert_eq!(rep.consensus, first.sign());
        assert_eq!(iso.reverse_on_xdivisor(&XDivisor::default()).unwrap(), iso.home.identity());
    }

    #[test]
    fn enumerated_map_roundtrip() {
        let h = example();
        let s = &enumerate_tractable(&h)[0];
        let iso = Isogeny::new(&h, construct(&h, s, -1).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let classes: Vec<_> = (0..6).map(|_| iso.home.random_class(&mut rng)).collect();
        let rep = iso.roundtrip_many(&classes, &mut rng).unwrap();
        assert!(rep.consensus.is_some(), "{:?}", rep.outcomes);
    }
}
