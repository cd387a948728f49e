//! Trigonal maps for tractable subgroups via lines in `P³`: the four chords of the
//! twisted cubic through the Weierstrass pairs, their common transversals, and the
//! projection away from a transversal.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::field::{Elem, Field};
use crate::hyperelliptic::{CurveError, HCurve};
use crate::linalg::{kernel, rref, Matrix};
use crate::poly::{Mobius, Poly};
use crate::tractable::{ProjRoot, QuadForm, TractableSubgroup};

pub const MOBIUS_RETRIES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrigonalError {
    #[error("quadratic form has a repeated root")]
    DegeneratePair,
    #[error("kernel of the transversal system has dimension {0}, expected 2")]
    DegenerateConfiguration(usize),
    #[error("no echelon form of the required shape after {0} coordinate changes")]
    Degenerate(usize),
    #[error("kernel basis is not defined over the prime field")]
    NotPrimeRational,
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Homogeneous coordinates `(v0 : … : v5)` on the Plücker quadric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PluckerPoint(pub [Elem; 6]);

impl PluckerPoint {
    /// `v0 v3 + v1 v4 + v2 v5`.
    pub fn quadric(&self, f: &Field) -> Elem {
        let v = &self.0;
        (0..3).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&v[i], &v[i + 3])))
    }
}

/// The chord through the images of the two roots of `a u² + b uv + c v²`.
pub fn plucker_of_pair(f: &Field, q: &QuadForm) -> Result<PluckerPoint, TrigonalError> {
    if q.disc(f).is_zero() || (q.a.is_zero() && q.b.is_zero()) {
        return Err(TrigonalError::DegeneratePair);
    }
    let (a, b, c) = (&q.a, &q.b, &q.c);
    let ac = f.mul(a, c);
    Ok(PluckerPoint([
        f.sqr(c),
        f.neg(&f.mul(c, b)),
        f.sub(&f.sqr(b), &ac),
        f.sqr(a),
        f.mul(a, b),
        ac,
    ]))
}

/// Rows `(a², ab, ac, c², −cb, b²−ac)`: the hyperplanes of lines meeting each chord.
pub fn build_m(s: &TractableSubgroup) -> Result<Matrix, TrigonalError> {
    let f = &s.field;
    s.quadratics
        .iter()
        .map(|q| {
            let v = plucker_of_pair(f, q)?.0;
            Ok((0..6).map(|j| v[(j + 3) % 6].clone()).collect())
        })
        .collect()
}

/// An `F_p` basis of `ker M`. The reduced echelon form of a Frobenius-stable row space is
/// Frobenius-fixed, so its entries already lie in the prime field.
pub fn kernel_basis(s: &TractableSubgroup) -> Result<(Matrix, Vec<Elem>, Vec<Elem>), TrigonalError> {
    let f = &s.field;
    let m = build_m(s)?;
    let ker = kernel(f, &m, 6);
    if ker.len() != 2 {
        return Err(TrigonalError::DegenerateConfiguration(ker.len()));
    }
    let fp = f.prime_field();
    let down = |v: &Vec<Elem>| -> Result<Vec<Elem>, TrigonalError> {
        v.iter().map(|x| f.to_prime_elem(&fp, x).ok_or(TrigonalError::NotPrimeRational)).collect()
    };
    Ok((m.clone(), down(&ker[0])?, down(&ker[1])?))
}

fn pairing(f: &Field, x: &[Elem], y: &[Elem]) -> Elem {
    (0..6).fold(f.zero(), |acc, i| f.add(&acc, &f.mul(&x[i], &y[(i + 3) % 6])))
}

/// `(Σ α_i β_{i+3})² − (Σ α_i α_{i+3})(Σ β_i β_{i+3})`.
pub fn rationality_discriminant(f: &Field, alpha: &[Elem], beta: &[Elem]) -> Elem {
    let a = pairing(f, alpha, alpha);
    let b = pairing(f, beta, beta);
    let c = pairing(f, alpha, beta);
    f.sub(&f.sqr(&c), &f.mul(&a, &b))
}

/// `M_γ` of the line with Plücker coordinates `γ`.
pub fn line_matrix(f: &Field, g: &[Elem]) -> Matrix {
    let z = f.zero();
    let n = |x: &Elem| f.neg(x);
    vec![
        vec![z.clone(), n(&g[3]), n(&g[4]), n(&g[5])],
        vec![g[3].clone(), z.clone(), n(&g[2]), g[1].clone()],
        vec![g[4].clone(), g[2].clone(), z.clone(), n(&g[0])],
        vec![g[5].clone(), n(&g[1]), g[0].clone(), z],
    ]
}

/// `x ↦ (x³ + n1 x + n0) / (x² + d1 x + d0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigonalMap {
    pub field: Field,
    pub n1: Elem,
    pub n0: Elem,
    pub d1: Elem,
    pub d0: Elem,
}

impl TrigonalMap {
    pub fn from_i64(f: &Field, n1: i64, n0: i64, d1: i64, d0: i64) -> TrigonalMap {
        TrigonalMap { field: f.clone(), n1: f.from_i64(n1), n0: f.from_i64(n0), d1: f.from_i64(d1), d0: f.from_i64(d0) }
    }

    pub fn n_poly(&self) -> Poly {
        let f = &self.field;
        Poly::new(vec![self.n0.clone(), self.n1.clone(), f.zero(), f.one()])
    }

    pub fn d_poly(&self) -> Poly {
        let f = &self.field;
        Poly::new(vec![self.d0.clone(), self.d1.clone(), f.one()])
    }

    /// Plücker coordinates of the line `u0 + n1 u2 + n0 u3 = u1 + d1 u2 + d0 u3 = 0`.
    pub fn line(&self) -> PluckerPoint {
        let f = &self.field;
        PluckerPoint([
            f.sub(&f.mul(&self.n1, &self.d0), &f.mul(&self.n0, &self.d1)),
            self.n0.clone(),
            f.neg(&self.n1),
            f.one(),
            self.d1.clone(),
            self.d0.clone(),
        ])
    }

    /// Value at `x` over an extension `k` of the map's field; `None` is the point at infinity.
    pub fn eval_in(&self, k: &Field, x: &ProjRoot) -> Option<Elem> {
        let x = match x {
            ProjRoot::Infinity => return None,
            ProjRoot::Finite(x) => x,
        };
        let n = self.n_poly().lift(k).eval(k, x);
        let d = self.d_poly().lift(k).eval(k, x);
        k.div(&n, &d)
    }
}

/// Intermediate data of a successful derivation.
#[derive(Clone, Debug)]
pub struct TrigonalDerivation {
    pub m: Matrix,
    pub alpha: Vec<Elem>,
    pub beta: Vec<Elem>,
    pub discriminant: Elem,
    pub lambda: Elem,
    pub other_lambda: Option<Elem>,
    /// `λ` is a repeated root: the two transversals coincide.
    pub double_root: bool,
    pub line: PluckerPoint,
}

/// A rational trigonal map on a working model `curve = original ∘ chart`.
#[derive(Clone, Debug)]
pub struct TrigonalSetup {
    pub curve: HCurve,
    pub subgroup: TractableSubgroup,
    /// `x_original = chart(x_working)`.
    pub chart: Mobius,
    pub map: TrigonalMap,
    pub derivation: TrigonalDerivation,
    /// Map from the second transversal, when it is rational and distinct.
    pub alternate: Option<TrigonalMap>,
}

#[derive(Clone, Debug)]
pub enum TrigonalOutcome {
    Map(Box<TrigonalSetup>),
    NotRational { discriminant: Elem },
}

impl TrigonalOutcome {
    pub fn setup(&self) -> Option<&TrigonalSetup> {
        match self {
            TrigonalOutcome::Map(s) => Some(s),
            TrigonalOutcome::NotRational { .. } => None,
        }
    }
}

enum Attempt {
    Done(TrigonalMap, TrigonalDerivation, Option<TrigonalMap>),
    NotRational(Elem),
    Retry,
}

/// Echelon-normalize `M_γ` to rows `(1,0,n1,n0)`, `(0,1,d1,d0)`.
fn map_from_line(fp: &Field, gamma: &[Elem]) -> Option<TrigonalMap> {
    let (r, pivots) = rref(fp, &line_matrix(fp, gamma));
    if pivots != [0, 1] {
        return None;
    }
    let g = TrigonalMap {
        field: fp.clone(),
        n1: r[0][2].clone(),
        n0: r[0][3].clone(),
        d1: r[1][2].clone(),
        d0: r[1][3].clone(),
    };
    Poly::gcd(fp, &g.n_poly(), &g.d_poly()).is_constant().then_some(g)
}

fn attempt(s: &TractableSubgroup) -> Result<Attempt, TrigonalError> {
    let fp = s.field.prime_field();
    let (m, mut alpha, mut beta) = kernel_basis(s)?;
    let f = &fp;
    let disc = rationality_discriminant(f, &alpha, &beta);
    let mut a = pairing(f, &alpha, &alpha);
    let mut b = pairing(f, &beta, &beta);
    let c = pairing(f, &alpha, &beta);
    if b.is_zero() && c.is_zero() {
        if a.is_zero() {
            // every line of the pencil is a transversal
            return Err(TrigonalError::DegenerateConfiguration(2));
        }
        std::mem::swap(&mut alpha, &mut beta);
        std::mem::swap(&mut a, &mut b);
    }
    // (b/2) λ² + c λ + a/2 = 0
    let (lambda, other, double_root) = if b.is_zero() {
        (f.neg(&f.div(&a, &f.add(&c, &c)).unwrap()), None, false)
    } else {
        let Some(sq) = f.sqrt(&disc) else { return Ok(Attempt::NotRational(disc)) };
        let l1 = f.div(&f.sub(&sq, &c), &b).unwrap();
        let l2 = f.div(&f.sub(&f.neg(&sq), &c), &b).unwrap();
        if l1 == l2 {
            (l1, None, true)
        } else if f.cmp_encoding(&l1, &l2).is_lt() {
            (l1, Some(l2), false)
        } else {
            (l2, Some(l1), false)
        }
    };
    let gamma_of = |l: &Elem| -> Vec<Elem> { (0..6).map(|i| f.add(&alpha[i], &f.mul(l, &beta[i]))).collect() };
    let gamma = gamma_of(&lambda);
    let Some(map) = map_from_line(f, &gamma) else { return Ok(Attempt::Retry) };
    let alternate = other.as_ref().and_then(|l| map_from_line(f, &gamma_of(l)));
    let line = PluckerPoint([
        gamma[0].clone(),
        gamma[1].clone(),
        gamma[2].clone(),
        gamma[3].clone(),
        gamma[4].clone(),
        gamma[5].clone(),
    ]);
    let der = TrigonalDerivation { m, alpha, beta, discriminant: disc, lambda, other_lambda: other, double_root, line };
    Ok(Attempt::Done(map, der, alternate))
}

/// Transform a subgroup by `x = μ(x')` over its field.
pub fn transform_subgroup(s: &TractableSubgroup, mu: &Mobius) -> TractableSubgroup {
    let f = &s.field;
    let m = mu.lift(f);
    TractableSubgroup::new(f, s.quadratics.iter().map(|q| QuadForm::from_form(f, &q.to_form().transform(f, &m))).collect())
}

fn random_mobius<R: Rng>(fp: &Field, rng: &mut R) -> Mobius {
    loop {
        let m = Mobius { a: fp.random(rng), b: fp.random(rng), c: fp.random(rng), d: fp.random(rng) };
        if !m.det(fp).is_zero() {
            return m;
        }
    }
}

/// Rational trigonal map for `s` on `h`, with bounded coordinate-change retries.
pub fn trigonal_map_for(h: &HCurve, s: &TractableSubgroup) -> Result<TrigonalOutcome, TrigonalError> {
    trigonal_map_with_rng(h, s, &mut ChaCha8Rng::seed_from_u64(0x7472_6967))
}

pub fn trigonal_map_with_rng<R: Rng>(
    h: &HCurve,
    s: &TractableSubgroup,
    rng: &mut R,
) -> Result<TrigonalOutcome, TrigonalError> {
    let fp = h.field().clone();
    let mut chart = Mobius::identity(&fp);
    let mut curve = h.clone();
    let mut sub = s.clone();
    for _ in 0..=MOBIUS_RETRIES {
        match attempt(&sub)? {
            Attempt::NotRational(d) => return Ok(TrigonalOutcome::NotRational { discriminant: d }),
            Attempt::Done(map, derivation, alternate) => {
                return Ok(TrigonalOutcome::Map(Box::new(TrigonalSetup {
                    curve,
                    subgroup: sub,
                    chart,
                    map,
                    derivation,
                    alternate,
                })));
            }
            Attempt::Retry => {
                let mu = random_mobius(&fp, rng);
                chart = chart.compose(&fp, &mu);
                curve = h.transform(&chart)?;
                sub = transform_subgroup(s, &chart);
            }
        }
    }
    Err(TrigonalError::Degenerate(MOBIUS_RETRIES))
}

/// Checks `g(x') = g(x'')` in `P¹` for the two roots of every quadratic of `s`.
pub fn verify_trigonal(g: &TrigonalMap, s: &TractableSubgroup) -> bool {
    let k = &s.field;
    let ext = k.with_degree(2 * k.degree()).unwrap();
    let e = k.embedding(&ext).unwrap();
    s.quadratics.iter().all(|q| {
        let Some((r1, r2)) = q.embed(&e).roots(&ext) else { return false };
        g.eval_in(&ext, &r1) == g.eval_in(&ext, &r2)
    })
}
