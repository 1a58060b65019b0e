//! Seeded numerical checks of the trace, compact-closed and functor laws.
//!
//! Each law runs `instances` independent instances. Instance `i` draws its
//! generator from a seed derived from `(seed, law, i)`, so any instance can be
//! replayed alone; instance 0 takes every dimension at its lower bound.
//! A report records the largest violation (max-norm of an operator
//! difference) and the instance seed that produced it.

mod dqt;
mod int0;
mod iso;
mod sample;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::trace::scalar_star;
use sample::Sampler;

/// Groups of laws selectable in a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LawSet {
    TraceAxioms,
    Dagger,
    KitEquivalence,
    KleeneEquivalence,
    TensorCompat,
    Int0Laws,
    FunctorF,
    ConwayCounterexample,
}

impl LawSet {
    pub const ALL: [LawSet; 8] = [
        LawSet::TraceAxioms,
        LawSet::Dagger,
        LawSet::KitEquivalence,
        LawSet::KleeneEquivalence,
        LawSet::TensorCompat,
        LawSet::Int0Laws,
        LawSet::FunctorF,
        LawSet::ConwayCounterexample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawSet::TraceAxioms => "trace-axioms",
            LawSet::Dagger => "dagger",
            LawSet::KitEquivalence => "kit-equivalence",
            LawSet::KleeneEquivalence => "kleene-equivalence",
            LawSet::TensorCompat => "tensor-compat",
            LawSet::Int0Laws => "int0-laws",
            LawSet::FunctorF => "functor-F",
            LawSet::ConwayCounterexample => "conway-counterexample",
        }
    }
}

impl fmt::Display for LawSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LawSet::ALL
            .into_iter()
            .find(|set| set.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown law set '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    pub instances: usize,
    pub max_dim: usize,
    pub tolerance: f64,
    pub laws: Vec<LawSet>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: 20_100_517,
            instances: 200,
            max_dim: 6,
            tolerance: 1e-8,
            laws: LawSet::ALL.to_vec(),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::Invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    fn includes(&self, set: LawSet) -> bool {
        self.laws.contains(&set)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LawReport {
    pub law: String,
    pub instances_run: usize,
    pub max_violation: f64,
    pub pass: bool,
    pub worst_seed: u64,
}

impl fmt::Display for LawReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "law={} instances={} max_violation={:.16e} pass={} worst_seed={}",
            self.law, self.instances_run, self.max_violation, self.pass, self.worst_seed
        )
    }
}

impl FromStr for LawReport {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut law = None;
        let mut instances = None;
        let mut violation = None;
        let mut pass = None;
        let mut seed = None;
        let bad = |what: &str| Error::Invalid(format!("report field {what} in '{line}'"));
        for field in line.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| bad(field))?;
            match key {
                "law" => law = Some(value.to_string()),
                "instances" => instances = Some(value.parse().map_err(|_| bad(key))?),
                "max_violation" => violation = Some(value.parse().map_err(|_| bad(key))?),
                "pass" => pass = Some(value.parse().map_err(|_| bad(key))?),
                "worst_seed" => seed = Some(value.parse().map_err(|_| bad(key))?),
                _ => return Err(bad(key)),
            }
        }
        Ok(LawReport {
            law: law.ok_or_else(|| bad("law"))?,
            instances_run: instances.ok_or_else(|| bad("instances"))?,
            max_violation: violation.ok_or_else(|| bad("max_violation"))?,
            pass: pass.ok_or_else(|| bad("pass"))?,
            worst_seed: seed.ok_or_else(|| bad("worst_seed"))?,
        })
    }
}

/// Reports of a whole run, one line per law.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub reports: Vec<LawReport>,
}

impl SuiteReport {
    /// True when every law passes. The Conway report fails by design and is
    /// not counted.
    pub fn all_pass(&self) -> bool {
        self.reports
            .iter()
            .filter(|r| r.law != CONWAY)
            .all(|r| r.pass)
    }

    pub fn get(&self, law: &str) -> Option<&LawReport> {
        self.reports.iter().find(|r| r.law == law)
    }

    /// Parses one report per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let reports = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(Self { reports })
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.reports {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

type Eval = fn(&mut Sampler) -> Result<f64>;

struct Law {
    id: &'static str,
    set: LawSet,
    eval: Eval,
    /// Cap on sampled dimensions, below `max_dim`.
    cap: Option<usize>,
    /// Own acceptance bound, used when looser than the configured tolerance.
    tolerance: Option<f64>,
}

const fn law(id: &'static str, set: LawSet, eval: Eval) -> Law {
    Law {
        id,
        set,
        eval,
        cap: None,
        tolerance: None,
    }
}

const fn capped(id: &'static str, set: LawSet, eval: Eval, cap: usize) -> Law {
    Law {
        id,
        set,
        eval,
        cap: Some(cap),
        tolerance: None,
    }
}

/// Automaton-level dimension cap.
const DQT_CAP: usize = 3;
/// State-space cap for Int₀ carriers; ranks stay at `DQT_CAP`.
const INT_STATE_CAP: usize = 2;

const TRACE_LAWS: &[Law] = &[
    law("schur-isometry", LawSet::TraceAxioms, iso::schur_isometry),
    law("naturality", LawSet::TraceAxioms, iso::naturality),
    law("sliding", LawSet::TraceAxioms, iso::sliding),
    law("vanishing-unit", LawSet::TraceAxioms, iso::vanishing_unit),
    law("vanishing-sum", LawSet::TraceAxioms, iso::vanishing_sum),
    law("vanishing-kernel", LawSet::TraceAxioms, iso::vanishing_kernel),
    law("superposing", LawSet::TraceAxioms, iso::superposing),
    law("yanking", LawSet::TraceAxioms, iso::yanking),
];

const DQT_LAWS: &[Law] = &[
    capped("dqt-naturality", LawSet::TraceAxioms, dqt::naturality, DQT_CAP),
    capped("dqt-sliding", LawSet::TraceAxioms, dqt::sliding, DQT_CAP),
    capped("dqt-vanishing-unit", LawSet::TraceAxioms, dqt::vanishing_unit, DQT_CAP),
    capped("dqt-vanishing-sum", LawSet::TraceAxioms, dqt::vanishing_sum, DQT_CAP),
    capped("dqt-superposing", LawSet::TraceAxioms, dqt::superposing, DQT_CAP),
    capped("dqt-yanking", LawSet::TraceAxioms, dqt::yanking, DQT_CAP),
    capped("dqt-isometry", LawSet::TraceAxioms, dqt::isometry, DQT_CAP),
    capped("dqt-tensor-compat", LawSet::TensorCompat, dqt::tensor_compat, DQT_CAP),
    capped("dqt-dagger-trace", LawSet::Dagger, dqt::dagger_trace, DQT_CAP),
];

const EQUIVALENCE_LAWS: &[Law] = &[
    Law {
        id: "kleene-schur",
        set: LawSet::KleeneEquivalence,
        eval: iso::kleene_schur,
        cap: None,
        tolerance: Some(1e-6),
    },
    law("kit-schur", LawSet::KitEquivalence, iso::kit_schur),
    law("kit-kernel", LawSet::KitEquivalence, iso::kit_kernel),
    law("tensor-compat", LawSet::TensorCompat, iso::tensor_compat),
    law("dagger-trace", LawSet::Dagger, iso::dagger_trace),
];

const INT0_LAWS: &[Law] = &[
    capped("int0-units", LawSet::Int0Laws, int0::unit_laws, DQT_CAP),
    capped("int0-associativity", LawSet::Int0Laws, int0::associativity, INT_STATE_CAP),
    capped("int0-bifunctoriality", LawSet::Int0Laws, int0::bifunctoriality, INT_STATE_CAP),
    capped("int0-triangles", LawSet::Int0Laws, int0::triangles, DQT_CAP),
    capped("int0-complete-symmetry", LawSet::Int0Laws, int0::complete_symmetry, INT_STATE_CAP),
    capped("int0-dagger-compact", LawSet::Int0Laws, int0::dagger_compact, DQT_CAP),
    capped("int0-dagger", LawSet::Int0Laws, int0::dagger_laws, INT_STATE_CAP),
    capped("functor-identity", LawSet::FunctorF, int0::functor_identity, DQT_CAP),
    capped("functor-composition", LawSet::FunctorF, int0::functor_composition, INT_STATE_CAP),
    capped("functor-dagger", LawSet::FunctorF, int0::functor_dagger, INT_STATE_CAP),
    capped("functor-trace", LawSet::FunctorF, int0::functor_trace, INT_STATE_CAP),
    capped("functor-tensor", LawSet::FunctorF, int0::functor_tensor, INT_STATE_CAP),
    capped("functor-injective", LawSet::FunctorF, int0::functor_injective, DQT_CAP),
];

/// Identifier of the Conway report.
pub const CONWAY: &str = "conway-counterexample";

fn all_laws() -> impl Iterator<Item = &'static Law> {
    TRACE_LAWS
        .iter()
        .chain(DQT_LAWS)
        .chain(EQUIVALENCE_LAWS)
        .chain(INT0_LAWS)
}

/// Identifiers of every randomized law, in run order.
pub fn law_ids() -> Vec<&'static str> {
    all_laws().map(|l| l.id).collect()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn label_hash(id: &str) -> u64 {
    // FNV-1a
    id.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Generator seed of instance `i` of `law` in a run seeded with `seed`.
pub fn instance_seed(seed: u64, law: &str, i: usize) -> u64 {
    splitmix(splitmix(seed ^ label_hash(law)) ^ splitmix(i as u64))
}

fn dims_for(law: &Law, cfg: &CheckConfig) -> usize {
    law.cap.map_or(cfg.max_dim, |c| cfg.max_dim.min(c))
}

fn evaluate(law: &Law, seed: u64, edge: bool, max_dim: usize) -> f64 {
    let mut sampler = Sampler::new(seed, edge, max_dim);
    match (law.eval)(&mut sampler) {
        Ok(v) if v.is_nan() => f64::INFINITY,
        Ok(v) => v,
        Err(_) => f64::INFINITY,
    }
}

fn run_law(law: &Law, cfg: &CheckConfig) -> LawReport {
    let max_dim = dims_for(law, cfg);
    let tol = law.tolerance.map_or(cfg.tolerance, |t| t.max(cfg.tolerance));
    let mut worst = 0.0f64;
    let mut worst_seed = if cfg.instances > 0 {
        instance_seed(cfg.seed, law.id, 0)
    } else {
        0
    };
    for i in 0..cfg.instances {
        let seed = instance_seed(cfg.seed, law.id, i);
        let v = evaluate(law, seed, i == 0, max_dim);
        if v > worst {
            worst = v;
            worst_seed = seed;
        }
    }
    LawReport {
        law: law.id.to_string(),
        instances_run: cfg.instances,
        max_violation: worst,
        pass: worst <= tol,
        worst_seed,
    }
}

fn run_group(laws: &[Law], cfg: &CheckConfig) -> Vec<LawReport> {
    laws.iter()
        .filter(|l| cfg.includes(l.set))
        .map(|l| run_law(l, cfg))
        .collect()
}

/// Trace axioms on isometries under the Schur feedback.
pub fn check_trace_axioms(cfg: &CheckConfig) -> Vec<LawReport> {
    run_group(TRACE_LAWS, cfg)
}

/// Trace axioms of `(DQT, ⊞)`, isometry preservation, and the automaton-level
/// tensor and dagger compatibilities.
pub fn check_dqt_axioms(cfg: &CheckConfig) -> Vec<LawReport> {
    run_group(DQT_LAWS, cfg)
}

/// Kleene, kernel-image, tensor and dagger compatibilities of the Schur
/// feedback.
pub fn check_equivalences(cfg: &CheckConfig) -> Vec<LawReport> {
    run_group(EQUIVALENCE_LAWS, cfg)
}

/// Category, compact-closure, complete-symmetry and dagger laws of Int₀, and
/// functoriality of `F`.
pub fn check_int0_laws(cfg: &CheckConfig) -> Vec<LawReport> {
    run_group(INT0_LAWS, cfg)
}

/// Both sides of the two Conway identities at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConwayCase {
    pub a: Complex64,
    pub b: Complex64,
    /// `(ab)*`
    pub product_lhs: Complex64,
    /// `a(ba)*b + 1`
    pub product_rhs: Complex64,
    /// `(a + b)*`
    pub sum_lhs: Complex64,
    /// `(a*b)*a*`
    pub sum_rhs: Complex64,
}

impl ConwayCase {
    pub fn at(a: Complex64, b: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            a,
            b,
            product_lhs: scalar_star(a * b),
            product_rhs: a * scalar_star(b * a) * b + one,
            sum_lhs: scalar_star(a + b),
            sum_rhs: scalar_star(scalar_star(a) * b) * scalar_star(a),
        }
    }

    pub fn violation(&self) -> f64 {
        (self.product_lhs - self.product_rhs)
            .norm()
            .max((self.sum_lhs - self.sum_rhs).norm())
    }
}

/// The points used by [`conway_counterexample`]: `a = b = 1`, `0` and `0.5`.
pub fn conway_cases() -> Vec<ConwayCase> {
    [1.0, 0.0, 0.5]
        .into_iter()
        .map(|x| ConwayCase::at(Complex64::new(x, 0.0), Complex64::new(x, 0.0)))
        .collect()
}

/// The Conway identities fail for the star `c* = (1 − c)⁺`; the report fails
/// by design. Its `worst_seed` is the index of the worst case.
pub fn conway_counterexample() -> LawReport {
    let cases = conway_cases();
    let (idx, worst) = cases
        .iter()
        .enumerate()
        .map(|(i, c)| (i, c.violation()))
        .fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    LawReport {
        law: CONWAY.to_string(),
        instances_run: cases.len(),
        max_violation: worst,
        pass: false,
        worst_seed: idx as u64,
    }
}

/// Runs every selected law in a fixed order.
pub fn run_suite(cfg: &CheckConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut reports = check_trace_axioms(cfg);
    reports.extend(check_dqt_axioms(cfg));
    reports.extend(check_equivalences(cfg));
    reports.extend(check_int0_laws(cfg));
    if cfg.includes(LawSet::ConwayCounterexample) {
        reports.push(conway_counterexample());
    }
    Ok(SuiteReport { reports })
}

/// Violation of the single instance of `law` generated by `instance_seed`.
///
/// The zero-dimension instance is recognised by its seed, so replaying any
/// `worst_seed` of a run with the same `cfg.seed` and `cfg.max_dim`
/// reproduces its violation exactly.
pub fn replay(cfg: &CheckConfig, law: &str, seed: u64) -> Result<f64> {
    if law == CONWAY {
        let cases = conway_cases();
        return cases
            .get(seed as usize)
            .map(ConwayCase::violation)
            .ok_or_else(|| Error::Invalid(format!("no Conway case {seed}")));
    }
    let entry = all_laws()
        .find(|l| l.id == law)
        .ok_or_else(|| Error::Invalid(format!("unknown law '{law}'")))?;
    let edge = seed == instance_seed(cfg.seed, law, 0);
    Ok(evaluate(entry, seed, edge, dims_for(entry, cfg)))
}
