//! JSON input and report types, and the command logic behind the CLI.
//!
//! Field elements travel as decimal strings. Extension elements are coefficient arrays
//! tagged with `(p, k)`; the modulus is recomputed on load, never sent.

use std::collections::BTreeMap;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::{construct, Construction, LinearB, B_NAMES, QUADRICS};
use crate::field::{Elem, Field};
use crate::hyperelliptic::{l_polynomial, DivisorClass, HCurve};
use crate::isogeny::{Isogeny, RoundTrip, XDivisor};
use crate::poly::Poly;
use crate::survey::{random_prime, run_survey, Depth, SurveyConfig, SurveyStats};
use crate::tractable::{enumerate_tractable, expectation, to_decimal, TractableSubgroup};
use crate::trigonal::{kernel_basis, rationality_discriminant, trigonal_map_for, TrigonalOutcome};

/// Failure of a command: bad input (`Parse`) or a mathematical obstruction (`Math`).
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{code}: {message}")]
pub struct CommandError {
    pub kind: ErrorKind,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorKind {
    Parse,
    Math,
}

impl CommandError {
    pub fn parse(code: &str, message: impl ToString) -> CommandError {
        CommandError { kind: ErrorKind::Parse, code: code.into(), message: message.to_string() }
    }

    pub fn math(code: &str, message: impl ToString) -> CommandError {
        CommandError { kind: ErrorKind::Math, code: code.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Parse => 2,
            ErrorKind::Math => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

fn math_err<E: std::fmt::Debug + std::fmt::Display>(e: E) -> CommandError {
    let dbg = format!("{e:?}");
    let code = dbg.split(['(', ' ', '{']).next().unwrap_or("Error").to_string();
    CommandError::math(&code, e)
}

/// `{"p": "<decimal>", "f": ["a0", ..., "a8"]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInput {
    pub p: String,
    pub f: Vec<String>,
}

fn parse_int(s: &str) -> Result<BigInt, CommandError> {
    BigInt::from_str(s.trim()).map_err(|_| CommandError::parse("BadInteger", format!("not a decimal integer: {s:?}")))
}

fn parse_elem(f: &Field, s: &str) -> Result<Elem, CommandError> {
    let n = parse_int(s)?;
    let p = BigInt::from(f.p().clone());
    let r = ((n % &p) + &p) % &p;
    Ok(f.from_biguint(&r.to_biguint().unwrap()))
}

impl CurveInput {
    pub fn from_json(text: &str) -> Result<CurveInput, CommandError> {
        serde_json::from_str(text).map_err(|e| CommandError::parse("BadJson", e))
    }

    pub fn field(&self) -> Result<Field, CommandError> {
        let p = BigUint::from_str(self.p.trim())
            .map_err(|_| CommandError::parse("BadInteger", format!("not a prime: {:?}", self.p)))?;
        Field::prime(&p).map_err(|e| CommandError::parse("BadField", e))
    }

    pub fn curve(&self) -> Result<HCurve, CommandError> {
        let f = self.field()?;
        if self.f.len() > 9 {
            return Err(CommandError::parse("BadDegree", "at most nine coefficients"));
        }
        let c = self.f.iter().map(|s| parse_elem(&f, s)).collect::<Result<Vec<_>, _>>()?;
        HCurve::new(&f, Poly::new(c)).map_err(|e| CommandError::parse("BadCurve", e))
    }

    pub fn from_curve(h: &HCurve) -> CurveInput {
        let f = h.field();
        let mut c = h.f().coeffs().iter().map(|a| f.format(a)).collect::<Vec<_>>();
        c.resize(9, "0".into());
        CurveInput { p: f.p().to_string(), f: c }
    }
}

/// `Σ (P) − Σ (Q)` over source-curve points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorInput {
    pub points_plus: Vec<[String; 2]>,
    pub points_minus: Vec<[String; 2]>,
}

impl DivisorInput {
    pub fn from_json(text: &str) -> Result<DivisorInput, CommandError> {
        let d: DivisorInput = serde_json::from_str(text).map_err(|e| CommandError::parse("BadJson", e))?;
        if d.points_plus.len() != d.points_minus.len() {
            return Err(CommandError::parse("BadDivisor", "points_plus and points_minus must have equal length"));
        }
        Ok(d)
    }

    pub fn points(&self, f: &Field) -> Result<(Vec<(Elem, Elem)>, Vec<(Elem, Elem)>), CommandError> {
        let conv = |v: &Vec<[String; 2]>| {
            v.iter().map(|[x, y]| Ok((parse_elem(f, x)?, parse_elem(f, y)?))).collect::<Result<Vec<_>, CommandError>>()
        };
        Ok((conv(&self.points_plus)?, conv(&self.points_minus)?))
    }
}

/// An element of `F_{p^k}` as its coefficients in the deterministic power basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtElem {
    pub p: String,
    pub k: usize,
    pub coeffs: Vec<String>,
}

impl ExtElem {
    pub fn new(f: &Field, a: &Elem) -> ExtElem {
        ExtElem { p: f.p().to_string(), k: f.degree(), coeffs: f.to_coeffs(a).iter().map(|c| c.to_string()).collect() }
    }

    pub fn parse(&self) -> Result<(Field, Elem), CommandError> {
        let p = BigUint::from_str(&self.p).map_err(|_| CommandError::parse("BadInteger", &self.p))?;
        let f = Field::extension(&p, self.k).map_err(|e| CommandError::parse("BadField", e))?;
        let c = self
            .coeffs
            .iter()
            .map(|s| BigUint::from_str(s).map_err(|_| CommandError::parse("BadInteger", s)))
            .collect::<Result<Vec<_>, _>>()?;
        let a = f.from_coeffs(&c).map_err(|e| CommandError::parse("BadField", e))?;
        Ok((f, a))
    }
}

fn poly_strings(f: &Field, p: &Poly) -> Vec<String> {
    p.coeffs().iter().map(|a| f.format(a)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupJson {
    pub field_degree: usize,
    /// `[a, b, c]` of `a u² + b uv + c v²`.
    pub quadratics: Vec<[ExtElem; 3]>,
}

impl SubgroupJson {
    pub fn new(s: &TractableSubgroup) -> SubgroupJson {
        let f = &s.field;
        SubgroupJson {
            field_degree: f.degree(),
            quadratics: s
                .quadratics
                .iter()
                .map(|q| [ExtElem::new(f, &q.a), ExtElem::new(f, &q.b), ExtElem::new(f, &q.c)])
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupAnalysis {
    pub index: usize,
    pub subgroup: SubgroupJson,
    pub discriminant: String,
    pub trigonal_rational: bool,
    pub isogeny_rational: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub curve: CurveInput,
    pub pattern: Vec<usize>,
    pub num_tractable: usize,
    pub subgroups: Vec<SubgroupAnalysis>,
}

pub fn analyze(input: &CurveInput) -> Result<AnalyzeReport, CommandError> {
    let h = input.curve()?;
    let f = h.field();
    let subgroups = enumerate_tractable(&h)
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let discriminant = kernel_basis(s)
                .map(|(_, a, b)| f.format(&rationality_discriminant(f, &a, &b)))
                .unwrap_or_default();
            let mut out = SubgroupAnalysis {
                index,
                subgroup: SubgroupJson::new(s),
                discriminant,
                trigonal_rational: false,
                isogeny_rational: None,
                error: None,
            };
            match trigonal_map_for(&h, s) {
                Ok(TrigonalOutcome::Map(setup)) => {
                    out.trigonal_rational = true;
                    match crate::construction::build_fibration(&setup.map, &setup.curve) {
                        Ok(fib) => out.isogeny_rational = Some(crate::construction::isogeny_is_rational(&fib)),
                        Err(e) => out.error = Some(e.to_string()),
                    }
                }
                Ok(TrigonalOutcome::NotRational { .. }) => {}
                Err(e) => out.error = Some(e.to_string()),
            }
            out
        })
        .collect::<Vec<_>>();
    Ok(AnalyzeReport { curve: CurveInput::from_curve(&h), pattern: h.factor_pattern(), num_tractable: subgroups.len(), subgroups })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrigonalMapJson {
    pub n1: String,
    pub n0: String,
    pub d1: String,
    pub d0: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearBJson {
    pub constant: Vec<String>,
    /// Coefficients of `b00, b01, b02, b11, b12, b22`, each a polynomial in `t`.
    pub terms: BTreeMap<String, Vec<String>>,
}

impl LinearBJson {
    fn new(f: &Field, l: &LinearB) -> LinearBJson {
        LinearBJson {
            constant: poly_strings(f, &l.constant),
            terms: B_NAMES.iter().zip(&l.terms).map(|(n, p)| (n.to_string(), poly_strings(f, p))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub l_polynomial: Option<Vec<String>>,
    pub jacobian_order: Option<String>,
    pub roundtrip_outcomes: Vec<String>,
    pub consensus_sign: Option<i8>,
}

/// Everything about one isogeny. Polynomials are ascending coefficient lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyReport {
    pub curve: CurveInput,
    pub subgroup_index: usize,
    pub subgroup: SubgroupJson,
    /// `[a, b, c, d]` with `x = (a x' + b)/(c x' + d)` from the working model to the input.
    pub chart: [String; 4],
    pub working_curve: Vec<String>,
    pub trigonal_map: TrigonalMapJson,
    /// `g0, g1, g2` as polynomials in `t`; `G = x³ + g2 x² + g1 x + g0`.
    pub g: [Vec<String>; 3],
    pub f: [Vec<String>; 3],
    pub s: Vec<String>,
    pub alpha: String,
    pub delta0: Vec<String>,
    pub delta2: Vec<String>,
    pub delta4: Vec<String>,
    pub delta1: Vec<ExtElem>,
    pub x_model: Vec<LinearBJson>,
    pub quadrics: Vec<String>,
    pub sign: i8,
    pub trigonal_rational: bool,
    pub isogeny_rational: bool,
    pub verification: Option<VerificationSummary>,
}

fn select_subgroup(h: &HCurve, index: usize) -> Result<TractableSubgroup, CommandError> {
    let all = enumerate_tractable(h);
    if all.is_empty() {
        return Err(CommandError::math("NoTractableSubgroup", "the curve has no rational tractable subgroup"));
    }
    all.get(index).cloned().ok_or_else(|| {
        CommandError::parse("BadSubgroupIndex", format!("index {index} out of range 0..{}", all.len()))
    })
}

fn build(h: &HCurve, index: usize, sign: i8) -> Result<(TractableSubgroup, Construction), CommandError> {
    let s = select_subgroup(h, index)?;
    let c = construct(h, &s, sign).map_err(math_err)?;
    Ok((s, c))
}

pub fn isogeny_report(input: &CurveInput, index: usize, sign: i8) -> Result<IsogenyReport, CommandError> {
    let h = input.curve()?;
    let (s, c) = build(&h, index, sign)?;
    Ok(report_for(&h, index, &s, &c))
}

pub fn report_for(h: &HCurve, index: usize, s: &TractableSubgroup, c: &Construction) -> IsogenyReport {
    let f = h.field();
    let fib = &c.fibration;
    let setup = c.setup.as_ref();
    let chart = setup.map(|s| s.chart.clone()).unwrap_or_else(|| crate::poly::Mobius::identity(f));
    let k1 = &c.plane.delta1_field;
    IsogenyReport {
        curve: CurveInput::from_curve(h),
        subgroup_index: index,
        subgroup: SubgroupJson::new(s),
        chart: [f.format(&chart.a), f.format(&chart.b), f.format(&chart.c), f.format(&chart.d)],
        working_curve: poly_strings(f, fib.curve.f()),
        trigonal_map: TrigonalMapJson {
            n1: f.format(&fib.map.n1),
            n0: f.format(&fib.map.n0),
            d1: f.format(&fib.map.d1),
            d0: f.format(&fib.map.d0),
        },
        g: [poly_strings(f, &fib.g[0]), poly_strings(f, &fib.g[1]), poly_strings(f, &fib.g[2])],
        f: [poly_strings(f, &fib.f[0]), poly_strings(f, &fib.f[1]), poly_strings(f, &fib.f[2])],
        s: poly_strings(f, &fib.s),
        alpha: f.format(&fib.alpha),
        delta0: poly_strings(f, &c.plane.delta0),
        delta2: poly_strings(f, &c.plane.delta2),
        delta4: poly_strings(f, &c.plane.delta4),
        delta1: c.plane.delta1.coeffs().iter().map(|a| ExtElem::new(k1, a)).collect(),
        x_model: c.x.c.iter().map(|l| LinearBJson::new(f, l)).collect(),
        quadrics: QUADRICS
            .iter()
            .map(|&(i, j, m, n)| format!("{}*{} - {}*{}", B_NAMES[i], B_NAMES[j], B_NAMES[m], B_NAMES[n]))
            .collect(),
        sign: c.correspondence.sign,
        trigonal_rational: true,
        isogeny_rational: c.rational(),
        verification: None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XPointTerm {
    pub weight: i64,
    pub field_degree: usize,
    pub t: ExtElem,
    pub b: BTreeMap<String, ExtElem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapReport {
    pub curve: CurveInput,
    pub subgroup_index: usize,
    pub divisor: DivisorInput,
    /// Each term stands for `weight` times the sum of the Galois conjugates of its point.
    pub terms: Vec<XPointTerm>,
    pub degree: i64,
}

pub fn xdivisor_terms(d: &XDivisor) -> Vec<XPointTerm> {
    d.terms
        .iter()
        .map(|(q, w)| XPointTerm {
            weight: *w,
            field_degree: q.field.degree(),
            t: ExtElem::new(&q.field, &q.t),
            b: B_NAMES.iter().zip(&q.b).map(|(n, a)| (n.to_string(), ExtElem::new(&q.field, a))).collect(),
        })
        .collect()
}

fn isogeny_for(h: &HCurve, index: usize, sign: i8) -> Result<Isogeny, CommandError> {
    let (_, c) = build(h, index, sign)?;
    Isogeny::new(h, c).map_err(math_err)
}

pub fn map_report(input: &CurveInput, divisor: &DivisorInput, index: usize, seed: u64) -> Result<MapReport, CommandError> {
    let h = input.curve()?;
    let iso = isogeny_for(&h, index, 1)?;
    let (plus, minus) = divisor.points(h.field())?;
    let d = iso.home.divisor_from_source_points(&plus, &minus).map_err(|e| CommandError::parse("BadDivisor", e))?;
    // points over ramified fibres go through a shifted representative of the class
    let img = match iso.phi_on_source_points(&plus, &minus) {
        Ok(img) => img,
        Err(_) => iso.phi_on_class(&d, &mut ChaCha8Rng::seed_from_u64(seed)).map_err(math_err)?,
    };
    Ok(MapReport {
        curve: CurveInput::from_curve(&h),
        subgroup_index: index,
        divisor: divisor.clone(),
        degree: img.degree(),
        terms: xdivisor_terms(&img),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCheck {
    pub checked: usize,
    pub agreed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub curve: CurveInput,
    pub subgroup_index: usize,
    pub summary: VerificationSummary,
    pub fiber_checks: FiberCheck,
}

fn outcome_label(o: &RoundTrip) -> String {
    match o {
        RoundTrip::Plus2 => "+2",
        RoundTrip::Minus2 => "-2",
        RoundTrip::Both => "+-2",
        RoundTrip::Mismatch => "mismatch",
    }
    .to_string()
}

pub fn verify_report(input: &CurveInput, index: usize, trials: usize, ext: usize, seed: u64) -> Result<VerifyReport, CommandError> {
    let h = input.curve()?;
    let iso = isogeny_for(&h, index, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lpoly = l_polynomial(&h).ok();
    let classes: Vec<DivisorClass> = (0..trials)
        .map(|_| match &lpoly {
            Some(l) => iso.random_odd_class(&l.jacobian_order().to_biguint().unwrap(), &mut rng),
            None => iso.home.random_class(&mut rng),
        })
        .collect();
    let rep = iso.roundtrip_many(&classes, &mut rng).map_err(math_err)?;
    let k = h.field().with_degree(ext).map_err(|e| CommandError::parse("BadField", e))?;
    let mut fc = FiberCheck { checked: 0, agreed: 0 };
    for _ in 0..32 {
        let t0 = k.random(&mut rng);
        let (Ok(pts), Ok(n)) = (iso.fiber_points(&k, &t0), iso.pair_partition_count(&k, &t0)) else { continue };
        fc.checked += 1;
        fc.agreed += usize::from(pts.len() == n);
    }
    Ok(VerifyReport {
        curve: CurveInput::from_curve(&h),
        subgroup_index: index,
        summary: VerificationSummary {
            l_polynomial: lpoly.as_ref().map(|l| l.coeffs.iter().map(|c| c.to_string()).collect()),
            jacobian_order: lpoly.as_ref().map(|l| l.jacobian_order().to_string()),
            roundtrip_outcomes: rep.outcomes.iter().map(outcome_label).collect(),
            consensus_sign: rep.consensus,
        },
        fiber_checks: fc,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionJson {
    pub name: String,
    pub count: u64,
    pub total: u64,
    pub decimal: String,
    pub three_sigma: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyRow {
    pub subgroups: usize,
    pub trigonal_rational: usize,
    pub isogeny_rational: usize,
    pub curves: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub p: String,
    pub samples: u64,
    pub seed: u64,
    pub depth: String,
    pub fractions: Vec<FractionJson>,
    pub patterns: BTreeMap<String, u64>,
    pub contingency: Vec<ContingencyRow>,
    pub errors: u64,
}

impl SurveyReport {
    pub fn new(cfg: &SurveyConfig, stats: &SurveyStats) -> SurveyReport {
        SurveyReport {
            p: cfg.p.to_string(),
            samples: cfg.samples,
            seed: cfg.seed,
            depth: format!("{:?}", cfg.depth).to_lowercase(),
            fractions: stats
                .fractions()
                .iter()
                .map(|fr| FractionJson {
                    name: fr.name.to_string(),
                    count: fr.count,
                    total: fr.total,
                    decimal: fr.decimal(),
                    three_sigma: format!("{:.4}", fr.three_sigma()),
                })
                .collect(),
            patterns: stats.patterns.clone(),
            contingency: stats
                .contingency
                .iter()
                .map(|(&(n, t, i), &c)| ContingencyRow { subgroups: n, trigonal_rational: t, isogeny_rational: i, curves: c })
                .collect(),
            errors: stats.errors,
        }
    }
}

pub fn survey_report(cfg: &SurveyConfig, csv: Option<&mut dyn std::io::Write>) -> Result<SurveyReport, CommandError> {
    let stats = run_survey(cfg, csv).map_err(|e| CommandError::math("Io", e))?;
    Ok(SurveyReport::new(cfg, &stats))
}

/// Survey prime from `--prime` or `--prime-bits`; the latter draws a random prime under `seed`.
pub fn survey_prime(prime: Option<&str>, bits: Option<u64>, seed: u64) -> Result<BigUint, CommandError> {
    match (prime, bits) {
        (Some(s), None) => {
            let p = BigUint::from_str(s.trim()).map_err(|_| CommandError::parse("BadInteger", format!("not a prime: {s:?}")))?;
            Field::prime(&p).map_err(|e| CommandError::parse("BadField", e))?;
            Ok(p)
        }
        (None, Some(b)) if (4..=4096).contains(&b) => Ok(random_prime(b, &mut ChaCha8Rng::seed_from_u64(seed))),
        (None, Some(b)) => Err(CommandError::parse("BadPrimeBits", format!("bit length {b} outside 4..=4096"))),
        (None, None) => Ok(BigUint::from(crate::survey::DESK_PRIME)),
        (Some(_), Some(_)) => Err(CommandError::parse("BadArguments", "give --prime or --prime-bits, not both")),
    }
}

pub fn parse_sign(s: &str) -> Result<i8, CommandError> {
    match s.trim() {
        "+" | "+1" | "1" | "plus" => Ok(1),
        "-" | "-1" | "minus" => Ok(-1),
        _ => Err(CommandError::parse("BadSign", format!("sign must be + or -, got {s:?}"))),
    }
}

pub fn parse_depth(s: &str) -> Result<Depth, CommandError> {
    s.parse().map_err(|e: String| CommandError::parse("BadDepth", e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub success_prob: String,
    pub value: String,
    pub decimal: String,
}

/// `a/b`, an integer, or a terminating decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational, CommandError> {
    let bad = || CommandError::parse("BadRational", format!("not a rational number: {s:?}"));
    let s = s.trim();
    let r = if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (parse_int(a).map_err(|_| bad())?, parse_int(b).map_err(|_| bad())?);
        if b.is_zero() {
            return Err(bad());
        }
        BigRational::new(a, b)
    } else if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let num = parse_int(&digits).map_err(|_| bad())?;
        BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32))
    } else {
        BigRational::from_integer(parse_int(s).map_err(|_| bad())?)
    };
    if r.is_negative() || r > BigRational::one() {
        return Err(CommandError::parse("BadRational", "probability must lie in [0, 1]"));
    }
    Ok(r)
}

pub fn expectation_report(prob: &BigRational) -> ExpectationReport {
    let e = expectation(prob);
    ExpectationReport { success_prob: prob.to_string(), value: e.value.to_string(), decimal: to_decimal(&e.value, 4) }
}
