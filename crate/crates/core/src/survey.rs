//! Monte Carlo survey over random genus-3 hyperelliptic curves: how often tractable
//! subgroups exist, how often their trigonal maps and isogenies are rational.

use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::construction::{build_fibration, isogeny_is_rational};
use crate::field::{is_probable_prime, Field};
use crate::hyperelliptic::HCurve;
use crate::poly::{Form, Poly};
use crate::tractable::{enumerate_tractable, to_decimal};
use crate::trigonal::{trigonal_map_for, TrigonalOutcome};

/// The prime used for desk-scale runs.
pub const DESK_PRIME: u64 = 1_073_741_789;

pub const CSV_HEADER: &str = "trial,pattern,num_tractable,num_trig_rational,num_isog_rational,success";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Subgroups,
    Trigonal,
    Full,
}

impl std::str::FromStr for Depth {
    type Err = String;
    fn from_str(s: &str) -> Result<Depth, String> {
        match s {
            "subgroups" => Ok(Depth::Subgroups),
            "trigonal" => Ok(Depth::Trigonal),
            "full" => Ok(Depth::Full),
            _ => Err(format!("unknown depth {s:?}; expected subgroups, trigonal or full")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SurveyConfig {
    pub p: BigUint,
    pub samples: u64,
    pub seed: u64,
    pub depth: Depth,
}

/// Per-subgroup outcome; `isogeny_rational` is `None` when not computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupRecord {
    pub trigonal_rational: bool,
    pub isogeny_rational: Option<bool>,
    pub error: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CurveRecord {
    pub trial: u64,
    pub coeffs: Vec<String>,
    pub pattern: Vec<usize>,
    pub subgroups: Vec<SubgroupRecord>,
}

impl CurveRecord {
    pub fn num_trig_rational(&self) -> usize {
        self.subgroups.iter().filter(|s| s.trigonal_rational).count()
    }

    pub fn num_isog_rational(&self) -> usize {
        self.subgroups.iter().filter(|s| s.isogeny_rational == Some(true)).count()
    }

    pub fn success(&self) -> bool {
        self.subgroups.iter().any(|s| s.trigonal_rational && s.isogeny_rational == Some(true))
    }

    pub fn pattern_label(&self) -> String {
        pattern_label(&self.pattern)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.trial,
            self.pattern_label(),
            self.subgroups.len(),
            self.num_trig_rational(),
            self.num_isog_rational(),
            u8::from(self.success())
        )
    }
}

pub fn pattern_label(pattern: &[usize]) -> String {
    pattern.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("-")
}

/// Aggregate counts; merging is associative and commutative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SurveyStats {
    pub curves: u64,
    pub curves_with_subgroup: u64,
    pub subgroups: u64,
    pub trigonal_rational: u64,
    pub isogeny_rational: u64,
    pub successes: u64,
    pub errors: u64,
    pub patterns: BTreeMap<String, u64>,
    /// `(#S, #trigonal rational, #isogeny rational) → curves`, for `#S ∈ {3, 5, 7}`.
    pub contingency: BTreeMap<(usize, usize, usize), u64>,
}

impl SurveyStats {
    pub fn record(&mut self, r: &CurveRecord) {
        self.curves += 1;
        let n = r.subgroups.len();
        if n > 0 {
            self.curves_with_subgroup += 1;
        }
        self.subgroups += n as u64;
        self.trigonal_rational += r.num_trig_rational() as u64;
        self.isogeny_rational += r.num_isog_rational() as u64;
        self.successes += u64::from(r.success());
        self.errors += r.subgroups.iter().filter(|s| s.error.is_some()).count() as u64;
        *self.patterns.entry(r.pattern_label()).or_default() += 1;
        if [3, 5, 7].contains(&n) {
            *self.contingency.entry((n, r.num_trig_rational(), r.num_isog_rational())).or_default() += 1;
        }
    }

    pub fn merge(mut self, o: SurveyStats) -> SurveyStats {
        self.curves += o.curves;
        self.curves_with_subgroup += o.curves_with_subgroup;
        self.subgroups += o.subgroups;
        self.trigonal_rational += o.trigonal_rational;
        self.isogeny_rational += o.isogeny_rational;
        self.successes += o.successes;
        self.errors += o.errors;
        for (k, v) in o.patterns {
            *self.patterns.entry(k).or_default() += v;
        }
        for (k, v) in o.contingency {
            *self.contingency.entry(k).or_default() += v;
        }
        self
    }

    /// The four headline fractions as `(numerator, denominator)`.
    pub fn fractions(&self) -> [Fraction; 4] {
        [
            Fraction::new("curves_with_subgroup", self.curves_with_subgroup, self.curves),
            Fraction::new("trigonal_rational_per_subgroup", self.trigonal_rational, self.subgroups),
            Fraction::new("isogeny_rational_per_trigonal", self.isogeny_rational, self.trigonal_rational),
            Fraction::new("success", self.successes, self.curves),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fraction {
    pub name: &'static str,
    pub count: u64,
    pub total: u64,
}

impl Fraction {
    fn new(name: &'static str, count: u64, total: u64) -> Fraction {
        Fraction { name, count, total }
    }

    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count as f64 / self.total as f64
        }
    }

    pub fn exact(&self) -> Option<BigRational> {
        (self.total > 0).then(|| BigRational::new(self.count.into(), self.total.into()))
    }

    pub fn decimal(&self) -> String {
        self.exact().map_or_else(|| "nan".to_string(), |x| to_decimal(&x, 4))
    }

    /// Three binomial standard deviations.
    pub fn three_sigma(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let v = self.value();
        3.0 * (v * (1.0 - v) / self.total as f64).sqrt()
    }
}

/// Uniform squarefree binary octic, with the number of rejected draws.
pub fn random_curve_counting<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> (HCurve, u64) {
    let mut rejected = 0;
    loop {
        let c: Vec<_> = (0..9).map(|_| f.random(rng)).collect();
        let form = Form { c: c.clone() };
        if !form.is_zero() && form.is_squarefree(f) {
            if let Ok(h) = HCurve::new(f, Poly::new(c)) {
                return (h, rejected);
            }
        }
        rejected += 1;
    }
}

pub fn random_curve<R: Rng + ?Sized>(f: &Field, rng: &mut R) -> HCurve {
    random_curve_counting(f, rng).0
}

/// A random prime with exactly `bits` bits.
pub fn random_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> BigUint {
    assert!(bits >= 3);
    let lo = BigUint::one() << (bits - 1);
    let hi = BigUint::one() << bits;
    loop {
        let c = rng.gen_biguint_range(&lo, &hi) | BigUint::one();
        if c >= BigUint::from(5u32) && is_probable_prime(&c) {
            return c;
        }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn run_trial(f: &Field, seed: u64, trial: u64, depth: Depth) -> CurveRecord {
    let mut rng = trial_rng(seed, trial);
    let h = random_curve(f, &mut rng);
    let subgroups = if depth == Depth::Subgroups {
        enumerate_tractable(&h)
            .iter()
            .map(|_| SubgroupRecord { trigonal_rational: false, isogeny_rational: None, error: None })
            .collect()
    } else {
        enumerate_tractable(&h).iter().map(|s| classify_subgroup(&h, s, depth)).collect()
    };
    CurveRecord {
        trial,
        coeffs: h.f().coeffs().iter().map(|a| f.format(a)).collect(),
        pattern: h.factor_pattern(),
        subgroups,
    }
}

fn classify_subgroup(h: &HCurve, s: &crate::tractable::TractableSubgroup, depth: Depth) -> SubgroupRecord {
    let fail = |e: String| SubgroupRecord { trigonal_rational: false, isogeny_rational: None, error: Some(e) };
    let setup = match trigonal_map_for(h, s) {
        Ok(TrigonalOutcome::Map(setup)) => setup,
        Ok(TrigonalOutcome::NotRational { .. }) => {
            return SubgroupRecord { trigonal_rational: false, isogeny_rational: None, error: None }
        }
        Err(e) => return fail(e.to_string()),
    };
    if depth == Depth::Trigonal {
        return SubgroupRecord { trigonal_rational: true, isogeny_rational: None, error: None };
    }
    match build_fibration(&setup.map, &setup.curve) {
        Ok(fib) => SubgroupRecord { trigonal_rational: true, isogeny_rational: Some(isogeny_is_rational(&fib)), error: None },
        Err(e) => SubgroupRecord { trigonal_rational: true, isogeny_rational: None, error: Some(e.to_string()) },
    }
}

/// Worker count from `TRIGONAL_THREADS`, defaulting to the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("TRIGONAL_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs every trial, streaming CSV rows in trial order to `csv` when given.
pub fn run_survey(cfg: &SurveyConfig, csv: Option<&mut dyn Write>) -> std::io::Result<SurveyStats> {
    let f = Field::prime(&cfg.p).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(std::io::Error::other)?;
    let mut stats = SurveyStats::default();
    let mut csv = csv;
    if let Some(w) = csv.as_deref_mut() {
        writeln!(w, "{CSV_HEADER}")?;
    }
    const CHUNK: u64 = 4096;
    let mut start = 0;
    while start < cfg.samples {
        let end = (start + CHUNK).min(cfg.samples);
        let records: Vec<CurveRecord> =
            pool.install(|| (start..end).into_par_iter().map(|i| run_trial(&f, cfg.seed, i, cfg.depth)).collect());
        for r in &records {
            stats.record(r);
            if let Some(w) = csv.as_deref_mut() {
                writeln!(w, "{}", r.csv_row())?;
            }
        }
        start = end;
    }
    Ok(stats)
}

/// Expected pattern frequency as a float, for histogram comparison.
pub fn pattern_frequency(pattern: &[usize]) -> f64 {
    let w = crate::tractable::pattern_weight(pattern);
    w.numer().to_f64().unwrap() / w.denom().to_f64().unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_curve() {
        let f = Field::prime_u64(101).unwrap();
        let a = random_curve(&f, &mut trial_rng(3, 7));
        let b = random_curve(&f, &mut trial_rng(3, 7));
        assert_eq!(a.f(), b.f());
        assert!(a.form().is_squarefree(&f));
        let c = random_curve(&f, &mut trial_rng(3, 8));
        assert_ne!(a.f(), c.f());
    }

    #[test]
    fn merge_is_order_independent() {
        let f = Field::prime_u64(101).unwrap();
        let recs: Vec<_> = (0..40).map(|i| run_trial(&f, 1, i, Depth::Full)).collect();
        let mut a = SurveyStats::default();
        recs.iter().for_each(|r| a.record(r));
        let mut b1 = SurveyStats::default();
        let mut b2 = SurveyStats::default();
        recs.iter().rev().enumerate().for_each(|(i, r)| if i % 2 == 0 { b1.record(r) } else { b2.record(r) });
        assert_eq!(a, b2.merge(b1));
        for r in &recs {
            assert_eq!(r.subgroups.len() as u64, crate::tractable::count_for_pattern(&r.pattern).unwrap());
        }
    }

    #[test]
    fn csv_rows() {
        let f = Field::prime_u64(101).unwrap();
        let cfg = SurveyConfig { p: BigUint::from(101u32), samples: 5, seed: 9, depth: Depth::Full };
        let mut buf = Vec::new();
        run_survey(&cfg, Some(&mut buf)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[1], run_trial(&f, 9, 0, Depth::Full).csv_row());
        assert_eq!(pattern_label(&[6, 1, 1]), "6-1-1");
    }

    #[test]
    fn random_prime_has_requested_size() {
        let p = random_prime(30, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(p.bits(), 30);
        assert!(is_probable_prime(&p));
    }
}
