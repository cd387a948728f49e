//! Rational tractable subgroups: Galois-stable partitions of the eight Weierstrass
//! points into pairs, enumerated orbit by orbit, plus the counting table and the
//! limiting expectation over factor patterns.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{Elem, Embedding, Field};
use crate::hyperelliptic::{CurveError, DivisorClass, HCurve, OddModel};
use crate::poly::{factorize, roots, Form, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TractableError {
    #[error("splitting field degree {0} exceeds 15")]
    TooLarge(usize),
    #[error("not a partition of 8")]
    NotAPartitionOf8,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// `a u² + b uv + c v²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: Elem,
    pub b: Elem,
    pub c: Elem,
}

/// A root of a binary form in `P¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProjRoot {
    Finite(Elem),
    Infinity,
}

impl QuadForm {
    /// Monic in `u`, or `uv + c v²` when `a = 0`.
    pub fn normalize(&self, f: &Field) -> QuadForm {
        let s = if !self.a.is_zero() {
            f.inv(&self.a).unwrap()
        } else {
            f.inv(&self.b).expect("nonzero form")
        };
        QuadForm { a: f.mul(&self.a, &s), b: f.mul(&self.b, &s), c: f.mul(&self.c, &s) }
    }

    /// `(x - r1)(x - r2)` or `v (u - r v)` for roots `r`, `∞`.
    pub fn from_roots(f: &Field, r1: &ProjRoot, r2: &ProjRoot) -> QuadForm {
        match (r1, r2) {
            (ProjRoot::Finite(x), ProjRoot::Finite(y)) => {
                QuadForm { a: f.one(), b: f.neg(&f.add(x, y)), c: f.mul(x, y) }
            }
            (ProjRoot::Finite(x), ProjRoot::Infinity) | (ProjRoot::Infinity, ProjRoot::Finite(x)) => {
                QuadForm { a: f.zero(), b: f.one(), c: f.neg(x) }
            }
            _ => panic!("a pair cannot contain infinity twice"),
        }
    }

    pub fn from_form(f: &Field, form: &Form) -> QuadForm {
        let _ = f;
        assert_eq!(form.degree(), 2);
        QuadForm { a: form.c[2].clone(), b: form.c[1].clone(), c: form.c[0].clone() }
    }

    pub fn to_form(&self) -> Form {
        Form { c: vec![self.c.clone(), self.b.clone(), self.a.clone()] }
    }

    pub fn disc(&self, f: &Field) -> Elem {
        f.sub(&f.sqr(&self.b), &f.mul(&f.from_u64(4), &f.mul(&self.a, &self.c)))
    }

    pub fn embed(&self, e: &Embedding) -> QuadForm {
        QuadForm { a: e.apply(&self.a), b: e.apply(&self.b), c: e.apply(&self.c) }
    }

    pub fn frob(&self, f: &Field) -> QuadForm {
        QuadForm { a: f.frob_p(&self.a), b: f.frob_p(&self.b), c: f.frob_p(&self.c) }
    }

    /// The two roots in `f`, when they lie there.
    pub fn roots(&self, f: &Field) -> Option<(ProjRoot, ProjRoot)> {
        if self.a.is_zero() {
            let x = f.neg(&f.div(&self.c, &self.b)?);
            return Some((ProjRoot::Finite(x), ProjRoot::Infinity));
        }
        let p = Poly::new(vec![self.c.clone(), self.b.clone(), self.a.clone()]);
        let r = roots(f, &p);
        match r.len() {
            2 => Some((ProjRoot::Finite(r[0].clone()), ProjRoot::Finite(r[1].clone()))),
            _ => None,
        }
    }

    pub fn cmp_canonical(&self, f: &Field, o: &QuadForm) -> Ordering {
        // forms with a = 0 sort last
        (self.a.is_zero())
            .cmp(&o.a.is_zero())
            .then_with(|| f.cmp_encoding(&self.a, &o.a))
            .then_with(|| f.cmp_encoding(&self.b, &o.b))
            .then_with(|| f.cmp_encoding(&self.c, &o.c))
    }

    pub fn format(&self, f: &Field) -> [String; 3] {
        [f.format(&self.a), f.format(&self.b), f.format(&self.c)]
    }
}

/// Four pairwise coprime quadratic forms with product `F̃` up to a scalar, over `field`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TractableSubgroup {
    pub field: Field,
    pub quadratics: Vec<QuadForm>,
}

impl TractableSubgroup {
    pub fn new(field: &Field, qs: Vec<QuadForm>) -> TractableSubgroup {
        let mut quadratics: Vec<QuadForm> = qs.iter().map(|q| q.normalize(field)).collect();
        quadratics.sort_by(|x, y| x.cmp_canonical(field, y));
        TractableSubgroup { field: field.clone(), quadratics }
    }

    pub fn embed(&self, target: &Field) -> TractableSubgroup {
        let e = self.field.embedding(target).expect("target contains the subgroup field");
        TractableSubgroup::new(target, self.quadratics.iter().map(|q| q.embed(&e)).collect())
    }

    pub fn product(&self) -> Form {
        let f = &self.field;
        self.quadratics.iter().skip(1).fold(self.quadratics[0].to_form(), |acc, q| acc.mul(f, &q.to_form()))
    }

    /// The set of quadratics is fixed by the `p`-power Frobenius.
    pub fn is_rational(&self) -> bool {
        let f = &self.field;
        let img = TractableSubgroup::new(f, self.quadratics.iter().map(|q| q.frob(f)).collect());
        img.quadratics == self.quadratics
    }

    /// Product equals `F̃` up to a nonzero scalar of the prime field.
    pub fn matches_curve(&self, h: &HCurve) -> bool {
        let f = &self.field;
        let target = h.form().lift(f);
        let prod = self.product();
        let Some(i) = target.c.iter().position(|c| !c.is_zero()) else { return false };
        if prod.c[i].is_zero() {
            return false;
        }
        let s = f.div(&target.c[i], &prod.c[i]).unwrap();
        prod.scale(f, &s) == target && f.to_prime(&s).is_some()
    }

    /// Whether the pairwise products have no common root.
    pub fn pairwise_coprime(&self) -> bool {
        let f = &self.field;
        self.quadratics.iter().all(|q| !q.disc(f).is_zero()) && self.product().is_squarefree(f)
    }
}

/// A Galois orbit of Weierstrass points: an irreducible factor of `F`, or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Orbit {
    Affine(Poly),
    Infinity,
}

impl Orbit {
    fn degree(&self) -> usize {
        match self {
            Orbit::Affine(p) => p.degree().unwrap(),
            Orbit::Infinity => 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    /// The orbit of size `2m` paired with itself by `σ^m`.
    Even(usize),
    /// Two orbits of equal size `m`, `σ^l θ ↔ σ^(l+s) η`.
    Paired(usize, usize, usize),
}

fn orbits_of(h: &HCurve) -> Vec<Orbit> {
    let fac = factorize(h.field(), h.f()).unwrap();
    let mut out: Vec<Orbit> = fac.factors.into_iter().map(|(g, _)| Orbit::Affine(g)).collect();
    if h.degree() == 7 {
        out.push(Orbit::Infinity);
    }
    out
}

fn pairings(orbits: &[Orbit], remaining: &[usize], acc: &mut Vec<Piece>, out: &mut Vec<Vec<Piece>>) {
    let Some((&i, rest)) = remaining.split_first() else {
        out.push(acc.clone());
        return;
    };
    let d = orbits[i].degree();
    if d.is_multiple_of(2) {
        acc.push(Piece::Even(i));
        pairings(orbits, rest, acc, out);
        acc.pop();
    }
    for (pos, &j) in rest.iter().enumerate() {
        if orbits[j].degree() != d {
            continue;
        }
        let others: Vec<usize> = rest.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, &x)| x).collect();
        for s in 0..d {
            acc.push(Piece::Paired(i, j, s));
            pairings(orbits, &others, acc, out);
            acc.pop();
        }
    }
}

fn piece_degree(orbits: &[Orbit], p: &Piece) -> usize {
    match *p {
        Piece::Even(i) => orbits[i].degree() / 2,
        Piece::Paired(i, _, _) => orbits[i].degree(),
    }
}

/// Per-orbit data shared by every matching: a root of each orbit and the quadratic factors of
/// each even orbit, over the piece field.
struct OrbitCache<'a> {
    fp: &'a Field,
    orbits: &'a [Orbit],
    roots: Vec<Option<ProjRoot>>,
    halves: Vec<Option<Vec<QuadForm>>>,
}

impl<'a> OrbitCache<'a> {
    fn new(fp: &'a Field, orbits: &'a [Orbit]) -> OrbitCache<'a> {
        OrbitCache { fp, orbits, roots: vec![None; orbits.len()], halves: vec![None; orbits.len()] }
    }

    fn root(&mut self, i: usize, k: &Field) -> ProjRoot {
        if self.roots[i].is_none() {
            self.roots[i] = Some(match &self.orbits[i] {
                Orbit::Infinity => ProjRoot::Infinity,
                Orbit::Affine(g) => ProjRoot::Finite(roots(k, &g.lift(k)).into_iter().next().unwrap()),
            });
        }
        self.roots[i].clone().unwrap()
    }

    fn halves(&mut self, i: usize, k: &Field) -> Vec<QuadForm> {
        if self.halves[i].is_none() {
            let Orbit::Affine(g) = &self.orbits[i] else { unreachable!("infinity orbit has odd size") };
            let qs = if k.degree() == 1 {
                vec![QuadForm::from_form(self.fp, &Form::from_poly(self.fp, g, 2))]
            } else {
                let fac = factorize(k, &g.lift(k)).unwrap();
                fac.factors.iter().map(|(q, _)| QuadForm::from_form(k, &Form::from_poly(k, q, 2))).collect()
            };
            self.halves[i] = Some(qs);
        }
        self.halves[i].clone().unwrap()
    }

    /// Quadratics of one piece over `F_{p^m}`, `m` the piece degree.
    fn materialize(&mut self, piece: &Piece) -> (Field, Vec<QuadForm>) {
        let m = piece_degree(self.orbits, piece);
        let k = self.fp.with_degree(m).unwrap();
        match *piece {
            Piece::Even(i) => {
                let qs = self.halves(i, &k);
                (k, qs)
            }
            Piece::Paired(i, j, s) => {
                let (theta, eta) = (self.root(i, &k), self.root(j, &k));
                let conj = |r: &ProjRoot, e: usize| match r {
                    ProjRoot::Finite(x) => ProjRoot::Finite(k.frob_pow(x, e)),
                    ProjRoot::Infinity => ProjRoot::Infinity,
                };
                let qs = (0..m).map(|l| QuadForm::from_roots(&k, &conj(&theta, l), &conj(&eta, l + s))).collect();
                (k, qs)
            }
        }
    }
}

/// All rational tractable subgroups of `h`, each over the smallest field holding its quadratics'
/// coefficients among the piece fields.
pub fn enumerate_tractable(h: &HCurve) -> Vec<TractableSubgroup> {
    let fp = h.field();
    assert!(fp.is_prime_field(), "tractable subgroups are enumerated over prime fields");
    let orbits = orbits_of(h);
    // odd-size orbits can only be paired with another orbit of the same size
    for m in (1..=8).step_by(2) {
        if orbits.iter().filter(|o| o.degree() == m).count() % 2 == 1 {
            return Vec::new();
        }
    }
    let mut all = Vec::new();
    let idx: Vec<usize> = (0..orbits.len()).collect();
    pairings(&orbits, &idx, &mut Vec::new(), &mut all);
    let mut cache = OrbitCache::new(fp, &orbits);
    all.iter()
        .map(|pieces| {
            let kdeg = pieces.iter().map(|p| piece_degree(&orbits, p)).fold(1, |a, b| a.lcm(&b));
            let kf = fp.with_degree(kdeg).unwrap();
            let mut qs = Vec::with_capacity(4);
            for p in pieces {
                let (pf, pq) = cache.materialize(p);
                if pf.degree() == kf.degree() {
                    qs.extend(pq);
                } else {
                    let e = pf.embedding(&kf).unwrap();
                    qs.extend(pq.iter().map(|q| q.embed(&e)));
                }
            }
            TractableSubgroup::new(&kf, qs)
        })
        .collect()
}

/// Splitting field degree of `F̃`.
pub fn splitting_degree(h: &HCurve) -> usize {
    h.factor_pattern().into_iter().fold(1, |a, b| a.lcm(&b))
}

/// All 105 pair partitions of eight labels.
pub fn all_matchings() -> Vec<[(usize, usize); 4]> {
    fn rec(left: &mut Vec<usize>, acc: &mut Vec<(usize, usize)>, out: &mut Vec<[(usize, usize); 4]>) {
        if left.is_empty() {
            out.push([acc[0], acc[1], acc[2], acc[3]]);
            return;
        }
        let a = left.remove(0);
        for i in 0..left.len() {
            let b = left.remove(i);
            acc.push((a, b));
            rec(left, acc, out);
            acc.pop();
            left.insert(i, b);
        }
        left.insert(0, a);
    }
    let mut out = Vec::new();
    rec(&mut (0..8).collect(), &mut Vec::new(), &mut out);
    out
}

/// Independent oracle: every Galois-stable pair partition of the Weierstrass points over the
/// splitting field.
pub fn brute_force_tractable(h: &HCurve) -> Result<Vec<TractableSubgroup>, TractableError> {
    let l = splitting_degree(h);
    if l > 15 {
        return Err(TractableError::TooLarge(l));
    }
    let fl = h.field().with_degree(l).unwrap();
    let mut pts: Vec<ProjRoot> = roots(&fl, &h.f().lift(&fl)).into_iter().map(ProjRoot::Finite).collect();
    if h.degree() == 7 {
        pts.push(ProjRoot::Infinity);
    }
    assert_eq!(pts.len(), 8);
    let sigma: Vec<usize> = pts
        .iter()
        .map(|r| match r {
            ProjRoot::Infinity => pts.iter().position(|x| *x == ProjRoot::Infinity).unwrap(),
            ProjRoot::Finite(x) => {
                let y = ProjRoot::Finite(fl.frob_p(x));
                pts.iter().position(|z| *z == y).unwrap()
            }
        })
        .collect();
    let mut out = Vec::new();
    for m in all_matchings() {
        let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
        let pairs: Vec<(usize, usize)> = m.iter().map(|&p| norm(p)).collect();
        let stable = pairs.iter().all(|&(a, b)| pairs.contains(&norm((sigma[a], sigma[b]))));
        if stable {
            let qs = pairs.iter().map(|&(a, b)| QuadForm::from_roots(&fl, &pts[a], &pts[b])).collect();
            out.push(TractableSubgroup::new(&fl, qs));
        }
    }
    Ok(out)
}

/// Sorted canonical listing of subgroups over a common field, for set comparison.
pub fn canonical_set(subgroups: &[TractableSubgroup], target: &Field) -> Vec<Vec<QuadForm>> {
    let mut v: Vec<Vec<QuadForm>> = subgroups.iter().map(|s| s.embed(target).quadratics).collect();
    v.sort_by(|x, y| {
        for (a, b) in x.iter().zip(y) {
            let o = a.cmp_canonical(target, b);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    });
    v
}

fn validate_partition(t: &[usize]) -> Result<Vec<usize>, TractableError> {
    if t.iter().sum::<usize>() != 8 || t.contains(&0) {
        return Err(TractableError::NotAPartitionOf8);
    }
    let mut v = t.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    Ok(v)
}

/// Number of rational tractable subgroups for a factor pattern of `F̃`.
pub fn count_for_pattern(t: &[usize]) -> Result<u64, TractableError> {
    let v = validate_partition(t)?;
    let table: &[(&[usize], u64)] = &[
        (&[8], 1),
        (&[6, 2], 1),
        (&[6, 1, 1], 1),
        (&[4, 2, 1, 1], 1),
        (&[4, 2, 2], 3),
        (&[4, 1, 1, 1, 1], 3),
        (&[3, 3, 2], 3),
        (&[3, 3, 1, 1], 3),
        (&[4, 4], 5),
        (&[2, 2, 2, 1, 1], 7),
        (&[2, 2, 1, 1, 1, 1], 9),
        (&[2, 1, 1, 1, 1, 1, 1], 15),
        (&[2, 2, 2, 2], 25),
        (&[1, 1, 1, 1, 1, 1, 1, 1], 105),
    ];
    Ok(table.iter().find(|(p, _)| *p == v.as_slice()).map_or(0, |(_, n)| *n))
}

/// All partitions of `n`, parts descending.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, max: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=max.min(n)).rev() {
            acc.push(part);
            rec(n - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Limiting density of a factor pattern: `1 / Π ν(n)! n^ν(n)`.
pub fn pattern_weight(t: &[usize]) -> BigRational {
    let mut denom = BigInt::one();
    for n in 1..=8usize {
        let nu = t.iter().filter(|&&x| x == n).count();
        for i in 1..=nu {
            denom *= BigInt::from(i) * BigInt::from(n);
        }
    }
    BigRational::new(BigInt::one(), denom)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectationResult {
    pub value: BigRational,
    pub decimal: String,
}

/// Render a nonnegative rational with `places` decimals, rounding half up.
pub fn to_decimal(x: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10).pow(places as u32);
    let scaled = x * BigRational::from_integer(scale.clone()) + BigRational::new(BigInt::one(), BigInt::from(2));
    let n = scaled.floor().to_integer();
    let (int, frac) = n.div_rem(&scale);
    format!("{int}.{:0>width$}", frac.to_string(), width = places)
}

/// `Σ_T (1 − (1 − p)^{s(T)}) · weight(T)` over the partitions of 8.
pub fn expectation(success_prob: &BigRational) -> ExpectationResult {
    let fail = BigRational::one() - success_prob;
    let mut value = BigRational::zero();
    for t in partitions(8) {
        let s = count_for_pattern(&t).unwrap();
        let mut pw = BigRational::one();
        for _ in 0..s {
            pw *= &fail;
        }
        value += (BigRational::one() - pw) * pattern_weight(&t);
    }
    let decimal = to_decimal(&value, 4);
    ExpectationResult { value, decimal }
}

/// The eight classes of a subgroup on an odd model over a field containing its quadratics
/// and a Weierstrass point.
#[derive(Clone, Debug)]
pub struct SubgroupElements {
    pub model: OddModel,
    pub generators: Vec<DivisorClass>,
    pub elements: Vec<DivisorClass>,
}

/// Smallest extension of the subgroup field over which `h` has a rational Weierstrass point.
pub fn weierstrass_field(h: &HCurve, base: &Field) -> Field {
    if h.degree() == 7 {
        return base.clone();
    }
    let dmin = factorize(h.field(), h.f()).unwrap().factors.iter().map(|(g, _)| g.degree().unwrap()).min().unwrap();
    base.with_degree(base.degree().lcm(&dmin)).unwrap()
}

pub fn subgroup_elements(s: &TractableSubgroup, h: &HCurve) -> Result<SubgroupElements, TractableError> {
    let work = weierstrass_field(h, &s.field);
    let model = h.base_change(&work).to_odd_model()?;
    let e = s.field.embedding(&work).unwrap();
    let generators = s
        .quadratics
        .iter()
        .map(|q| model.two_torsion_from_pair(&q.embed(&e).to_form()))
        .collect::<Result<Vec<_>, _>>()?;
    let mut elements = Vec::with_capacity(8);
    for mask in 0..8u32 {
        let mut acc = model.identity();
        for (i, g) in generators.iter().take(3).enumerate() {
            if mask >> i & 1 == 1 {
                acc = model.add(&acc, g);
            }
        }
        elements.push(acc);
    }
    Ok(SubgroupElements { model, generators, elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn example() -> HCurve {
        let f = Field::prime_u64(37).unwrap();
        HCurve::new(&f, Poly::from_i64s(&f, &[2, 29, 12, 33, 20, 15, 28, 1])).unwrap()
    }

    #[test]
    fn matchings_count() {
        assert_eq!(all_matchings().len(), 105);
        assert_eq!(partitions(8).len(), 22);
    }

    #[test]
    fn example_has_one_subgroup() {
        let h = example();
        let subs = enumerate_tractable(&h);
        assert_eq!(subs.len(), 1);
        let s = &subs[0];
        assert_eq!(s.field.degree(), 3);
        let f = &s.field;
        let last = s.quadratics.last().unwrap();
        assert_eq!(*last, QuadForm { a: f.zero(), b: f.one(), c: f.from_u64(20) });
        assert!(s.is_rational() && s.matches_curve(&h) && s.pairwise_coprime());
        // the other three are Frobenius conjugates
        let q0 = &s.quadratics[0];
        let conj: Vec<QuadForm> = (0..3).map(|j| {
            let mut q = q0.clone();
            for _ in 0..j { q = q.frob(f); }
            q
        }).collect();
        for q in &s.quadratics[..3] {
            assert!(conj.contains(q));
        }
        let bf = brute_force_tractable(&h).unwrap();
        let l = bf[0].field.clone();
        assert_eq!(canonical_set(&subs, &l), canonical_set(&bf, &l));
    }

    #[test]
    fn pattern_table() {
        assert_eq!(count_for_pattern(&[2, 2, 2, 2]).unwrap(), 25);
        assert_eq!(count_for_pattern(&[8]).unwrap(), 1);
        assert_eq!(count_for_pattern(&[7, 1]).unwrap(), 0);
        assert_eq!(count_for_pattern(&[1, 6, 1]).unwrap(), 1);
        assert_eq!(count_for_pattern(&[5, 2]), Err(TractableError::NotAPartitionOf8));
    }

    #[test]
    fn expectation_values() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert_eq!(expectation(&q(1, 4)).decimal, "0.1857");
        assert_eq!(expectation(&q(1, 2)).decimal, "0.3113");
        assert!(expectation(&q(0, 1)).value.is_zero());
        let total: BigRational = partitions(8).iter().map(|t| pattern_weight(t)).sum();
        assert!(total.is_one());
        let supported: BigRational = partitions(8)
            .iter()
            .filter(|t| count_for_pattern(t).unwrap() > 0)
            .map(|t| pattern_weight(t))
            .sum();
        assert_eq!(expectation(&q(1, 1)).value, supported);
        let mut prev = BigRational::zero();
        for n in 1..=10 {
            let v = expectation(&q(n, 10)).value;
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn subgroup_elements_of_example() {
        let h = example();
        let s = &enumerate_tractable(&h)[0];
        let se = subgroup_elements(s, &h).unwrap();
        assert_eq!(se.elements.len(), 8);
        let m = &se.model;
        for e in &se.elements {
            assert!(m.is_identity(&m.double(e)));
        }
        let sum = se.generators.iter().fold(m.identity(), |a, g| m.add(&a, g));
        assert!(m.is_identity(&sum));
        for i in 0..4 {
            for j in i + 1..4 {
                assert_ne!(se.generators[i], se.generators[j]);
            }
        }
        let distinct: std::collections::HashSet<_> = se.elements.iter().cloned().collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn fully_split_curve_has_105() {
        let f = Field::prime(&BigUint::from(1009u32)).unwrap();
        let roots: Vec<Elem> = (1..=8).map(|i| f.from_u64(i * 3)).collect();
        let h = HCurve::new(&f, Poly::from_roots(&f, &roots)).unwrap();
        assert_eq!(enumerate_tractable(&h).len(), 105);
        assert_eq!(brute_force_tractable(&h).unwrap().len(), 105);
    }
}
