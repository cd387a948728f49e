//! The explicit trigonal construction: the cubic fibration `G(t,x) = N(x) − t D(x)`,
//! the reduction of `F` modulo `G`, the curve `X` over the unramified locus and the
//! correspondence with `H`.

use thiserror::Error;

use crate::field::{Elem, Field};
use crate::hyperelliptic::HCurve;
use crate::poly::{exact_square_root, reduce_mod_cubic, BiPoly, Poly, PolyError};
use crate::tractable::TractableSubgroup;
use crate::trigonal::{trigonal_map_for, TrigonalError, TrigonalMap, TrigonalOutcome, TrigonalSetup};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("s(t) is not a constant times a square")]
    SquareRootObstruction,
    #[error("F is not congruent to f0 + f1 x + f2 x^2 modulo G")]
    CongruenceFailed,
    #[error("the subgroup has no rational trigonal map")]
    NotRational,
    #[error("the isogeny is defined only over the quadratic extension")]
    IsogenyNotRational,
    /// A δ-polynomial vanishes identically; `double_root` records whether the trigonal line
    /// came from a double root of the λ-quadratic.
    #[error("degenerate δ-polynomials (double λ root: {double_root})")]
    DegenerateDeltas { double_root: bool },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Trigonal(#[from] TrigonalError),
}

/// `G(t,x)`, the remainders `f_i(t)` of `F` and the square `s = α r²`.
#[derive(Clone, Debug)]
pub struct TrigonalFibration {
    pub field: Field,
    pub curve: HCurve,
    pub map: TrigonalMap,
    /// `[g0, g1, g2]`.
    pub g: [Poly; 3],
    pub big_g: BiPoly,
    /// `[f0, f1, f2]`.
    pub f: [Poly; 3],
    pub s: Poly,
    pub alpha: Elem,
    pub r: Poly,
}

/// Sum of products of polynomials with small integer coefficients.
fn poly_sum(fp: &Field, terms: &[(i64, Vec<&Poly>)]) -> Poly {
    terms.iter().fold(Poly::zero(), |acc, (c, fs)| {
        let prod = fs.iter().fold(Poly::one(fp), |p, q| p.mul(fp, q));
        acc.add(fp, &prod.scale(fp, &fp.from_i64(*c)))
    })
}

pub fn build_fibration(g: &TrigonalMap, h: &HCurve) -> Result<TrigonalFibration, ConstructionError> {
    let fp = h.field().clone();
    let f = &fp;
    let lin = |c0: &Elem, c1: &Elem| Poly::new(vec![c0.clone(), f.neg(c1)]);
    let g0 = lin(&g.n0, &g.d0);
    let g1 = lin(&g.n1, &g.d1);
    let g2 = Poly::new(vec![f.zero(), f.from_i64(-1)]);
    let big_g = BiPoly { c: vec![g0.clone(), g1.clone(), g2.clone(), Poly::one(f)] };
    let (f0, f1, f2) = reduce_mod_cubic(f, h.f(), &big_g)?;
    check_congruence(f, h.f(), &big_g, [&f0, &f1, &f2])?;
    let s = poly_sum(
        f,
        &[
            (1, vec![&f0, &f0, &f0]),
            (-1, vec![&f0, &f0, &f1, &g2]),
            (-2, vec![&f0, &f0, &f2, &g1]),
            (1, vec![&f0, &f0, &f2, &g2, &g2]),
            (1, vec![&f0, &f1, &f1, &g1]),
            (3, vec![&f0, &f1, &f2, &g0]),
            (-1, vec![&f0, &f1, &f2, &g1, &g2]),
            (-2, vec![&f0, &f2, &f2, &g0, &g2]),
            (1, vec![&f0, &f2, &f2, &g1, &g1]),
            (-1, vec![&f1, &f1, &f1, &g0]),
            (1, vec![&f1, &f1, &f2, &g0, &g2]),
            (-1, vec![&f1, &f2, &f2, &g0, &g1]),
            (1, vec![&f2, &f2, &f2, &g0, &g0]),
        ],
    );
    let (alpha, r) = exact_square_root(f, &s)?.ok_or(ConstructionError::SquareRootObstruction)?;
    Ok(TrigonalFibration {
        field: fp.clone(),
        curve: h.clone(),
        map: g.clone(),
        g: [g0, g1, g2],
        big_g,
        f: [f0, f1, f2],
        s,
        alpha,
        r,
    })
}

/// The remainder of `F − (f0 + f1 x + f2 x²)` modulo the monic `G` has bounded degree in `t`,
/// so vanishing at enough specializations proves it is zero.
fn check_congruence(fp: &Field, big_f: &Poly, g: &BiPoly, fs: [&Poly; 3]) -> Result<(), ConstructionError> {
    let bound = fs.iter().map(|p| p.deg().max(0) as usize).max().unwrap() + big_f.deg().max(0) as usize + 2;
    let mut k = 1;
    let p = fp.p();
    while num_traits::pow(p.clone(), k) <= bound.into() {
        k += 1;
    }
    let ext = fp.with_degree(k).map_err(|_| ConstructionError::CongruenceFailed)?;
    let f_ext = big_f.lift(&ext);
    for i in 0..bound as u64 {
        let t0 = ext.from_index(i);
        let gt = g.at_t_in(&ext, &t0);
        let rem: Vec<Elem> = fs.iter().map(|q| q.lift(&ext).eval(&ext, &t0)).collect();
        let diff = f_ext.sub(&ext, &Poly::new(rem));
        if !diff.rem(&ext, &gt).is_zero() {
            return Err(ConstructionError::CongruenceFailed);
        }
    }
    Ok(())
}

/// The isogeny is rational exactly when `lc(s)` is a square.
pub fn isogeny_is_rational(fib: &TrigonalFibration) -> bool {
    fib.field.is_square(&fib.alpha)
}

pub const B_NAMES: [&str; 6] = ["b00", "b01", "b02", "b11", "b12", "b22"];

/// `constant + Σ terms[i] · b_i` over `(b00, b01, b02, b11, b12, b22)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearB {
    pub constant: Poly,
    pub terms: [Poly; 6],
}

impl LinearB {
    pub fn eval(&self, k: &Field, t: &Elem, b: &[Elem; 6]) -> Elem {
        let ev = |p: &Poly| p.lift(k).eval(k, t);
        self.terms.iter().zip(b).fold(ev(&self.constant), |acc, (c, bi)| k.add(&acc, &k.mul(&ev(c), bi)))
    }
}

/// The three linear equations of `X` over `U` and the rank-one quadrics.
#[derive(Clone, Debug)]
pub struct CurveXModel {
    pub field: Field,
    pub c: [LinearB; 3],
}

/// `b01² − b00 b11`, `b01 b02 − b00 b12`, `b02² − b00 b22`, `b02 b11 − b01 b12`,
/// `b02 b12 − b01 b22`, `b12² − b11 b22` as index quadruples `(i, j, k, l)` for `b_i b_j − b_k b_l`.
pub const QUADRICS: [(usize, usize, usize, usize); 6] =
    [(1, 1, 0, 3), (1, 2, 0, 4), (2, 2, 0, 5), (2, 3, 1, 4), (2, 4, 1, 5), (4, 4, 3, 5)];

pub fn build_x(fib: &TrigonalFibration) -> CurveXModel {
    let f = &fib.field;
    let [g0, g1, g2] = &fib.g;
    let [f0, f1, f2] = &fib.f;
    let two = |p: &Poly| p.scale(f, &f.from_i64(2));
    let z = Poly::zero;
    let one = Poly::one(f);
    let c0 = LinearB {
        constant: f0.neg(f),
        terms: [one.clone(), z(), z(), z(), two(g0).neg(f), g2.mul(f, g0)],
    };
    let c1 = LinearB {
        constant: f1.neg(f),
        terms: [z(), two(&one), z(), z(), two(g1).neg(f), g2.mul(f, g1).sub(f, g0)],
    };
    let c2 = LinearB {
        constant: f2.neg(f),
        terms: [z(), z(), two(&one), one.clone(), two(g2).neg(f), g2.sqr(f).sub(f, g1)],
    };
    CurveXModel { field: f.clone(), c: [c0, c1, c2] }
}

impl CurveXModel {
    /// Every linear equation and every quadric vanishes.
    pub fn contains(&self, k: &Field, t: &Elem, b: &[Elem; 6]) -> bool {
        self.c.iter().all(|c| c.eval(k, t, b).is_zero())
            && QUADRICS
                .iter()
                .all(|&(i, j, m, n)| k.mul(&b[i], &b[j]) == k.mul(&b[m], &b[n]))
    }
}

/// `(δ4 b22² + δ2 b22 + δ0)² = δ1² b22` with `δ1 = 8 √α r`.
#[derive(Clone, Debug)]
pub struct PlaneQuarticModel {
    pub field: Field,
    pub delta4: Poly,
    pub delta2: Poly,
    pub delta0: Poly,
    /// Field of definition of `δ1`: the base field, or its quadratic extension.
    pub delta1_field: Field,
    pub delta1: Poly,
    pub rational: bool,
}

pub fn build_plane_model(fib: &TrigonalFibration) -> PlaneQuarticModel {
    let f = &fib.field;
    let [g0, g1, g2] = &fib.g;
    let [f0, f1, f2] = &fib.f;
    let delta4 = poly_sum(
        f,
        &[
            (-27, vec![g0, g0]),
            (18, vec![g0, g1, g2]),
            (-4, vec![g0, g2, g2, g2]),
            (-4, vec![g1, g1, g1]),
            (1, vec![g1, g1, g2, g2]),
        ],
    );
    let delta2 = poly_sum(
        f,
        &[
            (12, vec![f0, g1]),
            (-4, vec![f0, g2, g2]),
            (-18, vec![f1, g0]),
            (2, vec![f1, g1, g2]),
            (12, vec![f2, g0, g2]),
            (-4, vec![f2, g1, g1]),
        ],
    );
    let delta0 = poly_sum(f, &[(1, vec![f1, f1]), (-4, vec![f0, f2])]);
    let rational = isogeny_is_rational(fib);
    let delta1_field = if rational { f.clone() } else { f.with_degree(2).expect("quadratic extension") };
    let k = &delta1_field;
    let sqrt_alpha = k.sqrt(&k.lift_prime(f, &fib.alpha)).expect("square in the quadratic extension");
    let delta1 = fib.r.lift(k).scale(k, &k.mul(&k.from_u64(8), &sqrt_alpha));
    PlaneQuarticModel { field: f.clone(), delta4, delta2, delta0, delta1_field, delta1, rational }
}

impl PlaneQuarticModel {
    /// `δ1² = 64 s`, over the base field.
    pub fn delta1_squared(&self, fib: &TrigonalFibration) -> Poly {
        fib.s.scale(&self.field, &self.field.from_u64(64))
    }

    /// `(δ4 b² + δ2 b + δ0)² − δ1² b` at `(t, b22)`.
    pub fn residual(&self, fib: &TrigonalFibration, k: &Field, t: &Elem, b22: &Elem) -> Elem {
        let ev = |p: &Poly| p.lift(k).eval(k, t);
        let q = k.add(&k.mul(&k.add(&k.mul(&ev(&self.delta4), b22), &ev(&self.delta2)), b22), &ev(&self.delta0));
        k.sub(&k.sqr(&q), &k.mul(&ev(&self.delta1_squared(fib)), b22))
    }
}

/// `R = V(G, y − (b02 + b12 x + b22 x²)/ρ)` with `ρ = sign·(δ4 b22² + δ2 b22 + δ0)/δ1`.
#[derive(Clone, Debug)]
pub struct CorrespondenceR {
    pub plane: PlaneQuarticModel,
    pub sign: i8,
}

pub fn build_correspondence(plane: &PlaneQuarticModel, sign: i8) -> CorrespondenceR {
    assert!(sign == 1 || sign == -1);
    CorrespondenceR { plane: plane.clone(), sign }
}

impl CorrespondenceR {
    /// `ρ` at `(t, b22)` over `k`, which must contain the field of `δ1`. `None` where `δ1(t) = 0`.
    pub fn rho(&self, k: &Field, t: &Elem, b22: &Elem) -> Option<Elem> {
        let pl = &self.plane;
        let ev = |p: &Poly| p.lift(k).eval(k, t);
        let q = k.add(&k.mul(&k.add(&k.mul(&ev(&pl.delta4), b22), &ev(&pl.delta2)), b22), &ev(&pl.delta0));
        let d1 = if pl.rational {
            ev(&pl.delta1)
        } else {
            let e = pl.delta1_field.embedding(k).ok()?;
            pl.delta1.embed(&e).eval(k, t)
        };
        let r = k.div(&q, &d1)?;
        Some(if self.sign < 0 { k.neg(&r) } else { r })
    }
}

/// `δ0 · disc_x G · r`: its zeros are the excluded values of `t` (`δ4` is the discriminant of `G`).
pub fn excluded_locus(fib: &TrigonalFibration, plane: &PlaneQuarticModel) -> Poly {
    let f = &fib.field;
    plane.delta0.mul(f, &plane.delta4).mul(f, &fib.r)
}

/// Every object of the construction for one `(H, S, g)`.
#[derive(Clone, Debug)]
pub struct Construction {
    pub setup: Option<TrigonalSetup>,
    pub fibration: TrigonalFibration,
    pub x: CurveXModel,
    pub plane: PlaneQuarticModel,
    pub correspondence: CorrespondenceR,
    pub excluded: Poly,
}

impl Construction {
    pub fn rational(&self) -> bool {
        self.plane.rational
    }

    /// `t0` avoids the excluded locus.
    pub fn is_unramified(&self, k: &Field, t0: &Elem) -> bool {
        !self.excluded.lift(k).eval(k, t0).is_zero()
    }
}

/// Runs the construction with a given trigonal map on `h` itself.
pub fn construct_with_map(h: &HCurve, g: &TrigonalMap, sign: i8) -> Result<Construction, ConstructionError> {
    let fibration = build_fibration(g, h)?;
    let x = build_x(&fibration);
    let plane = build_plane_model(&fibration);
    if plane.delta4.is_zero() || plane.delta0.is_zero() || plane.delta1.is_zero() {
        return Err(ConstructionError::DegenerateDeltas { double_root: false });
    }
    let correspondence = build_correspondence(&plane, sign);
    let excluded = excluded_locus(&fibration, &plane);
    Ok(Construction { setup: None, fibration, x, plane, correspondence, excluded })
}

/// Trigonal map for `s`, then the construction on the working model it returns.
pub fn construct(h: &HCurve, s: &TractableSubgroup, sign: i8) -> Result<Construction, ConstructionError> {
    let setup = match trigonal_map_for(h, s)? {
        TrigonalOutcome::Map(setup) => *setup,
        TrigonalOutcome::NotRational { .. } => return Err(ConstructionError::NotRational),
    };
    let mut c = construct_with_map(&setup.curve, &setup.map, sign).map_err(|e| match e {
        ConstructionError::DegenerateDeltas { .. } => {
            ConstructionError::DegenerateDeltas { double_root: setup.derivation.double_root }
        }
        e => e,
    })?;
    c.setup = Some(setup);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tractable::enumerate_tractable;

    fn example() -> (Field, HCurve) {
        let f = Field::prime_u64(37).unwrap();
        let h = HCurve::new(&f, Poly::from_i64s(&f, &[2, 29, 12, 33, 20, 15, 28, 1])).unwrap();
        (f, h)
    }

    #[test]
    fn example_fibration() {
        let (f, h) = example();
        let g = TrigonalMap::from_i64(&f, 16, 22, 32, 18);
        let c = construct_with_map(&h, &g, 1).unwrap();
        let fib = &c.fibration;
        assert_eq!(fib.big_g.c[1], Poly::from_i64s(&f, &[16, -32]));
        assert_eq!(fib.big_g.c[0], Poly::from_i64s(&f, &[22, -18]));
        assert_eq!(fib.g[2], Poly::from_i64s(&f, &[0, -1]));
        assert_eq!(fib.s, Poly::from_i64s(&f, &[-12, -5, 1, 15, -8, 18, 7]));
        assert!(isogeny_is_rational(fib));
        assert_eq!(c.plane.delta1, Poly::from_i64s(&f, &[3, 33, 8, 35]));
        assert_eq!(c.plane.delta4, Poly::from_i64s(&f, &[0, 21, 13, 36, 27]));
        assert_eq!(c.plane.delta0, fib.f[1].sqr(&f).sub(&f, &fib.f[0].mul(&f, &fib.f[2]).scale(&f, &f.from_u64(4))));
        let c0 = &c.x.c[0];
        assert_eq!(c0.terms[5], Poly::from_i64s(&f, &[0, 15, 18]));
        assert_eq!(c0.terms[4], Poly::from_i64s(&f, &[30, 36]));
        assert_eq!(c0.constant, Poly::from_i64s(&f, &[30, 1, 7, 12, 10, 19]));
    }

    #[test]
    fn enumerated_subgroup_constructs() {
        let (_, h) = example();
        let s = &enumerate_tractable(&h)[0];
        let c = construct(&h, s, 1).unwrap();
        assert!(c.rational());
        let ds = c.plane.delta1.sqr(&c.plane.field);
        assert_eq!(ds, c.plane.delta1_squared(&c.fibration));
    }

    #[test]
    fn twist_flips_rationality() {
        let (f, h) = example();
        let g = TrigonalMap::from_i64(&f, 16, 22, 32, 18);
        let nonsq = (2..37).map(|i| f.from_u64(i)).find(|c| !f.is_square(c)).unwrap();
        let tw = h.twist(&nonsq);
        let c = construct_with_map(&tw, &g, 1).unwrap();
        assert!(!c.rational());
        assert_eq!(c.plane.delta1_field.degree(), 2);
        // δ1² = 64 s still holds over the extension
        let k = &c.plane.delta1_field;
        assert_eq!(c.plane.delta1.sqr(k), c.plane.delta1_squared(&c.fibration).lift(k));
    }
}
