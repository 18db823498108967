//! The verification battery: every invariant of the library evaluated over
//! a list of phase spaces and all of their subgroups, plus comparisons
//! against the embedded worked examples.
//!
//! Checks are named (see [`REGISTRY`]) and grouped into cases keyed by
//! `(group, multiplier, subgroup)`. Reports contain no timing so that a
//! fixed seed gives byte-identical JSON.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{
    gelfand_spectrum, intertwiner, span_basis, subgroup_commutant, tensor_commutant, GelfandTransform,
};
use crate::canonical::{all_trivializations, CovariantSpace};
use crate::error::{Error, Result};
use crate::fixtures::{Fixtures, GroupFixtures};
use crate::group::{enumerate_subgroups, generated_subgroup, quotient, FiniteAbelianGroup, Subgroup};
use crate::linalg::{frobenius, operator_norm, CMatrix, Tol};
use crate::phase_space::{
    enumerate_lagrangians, is_lagrangian, is_phase_space, sigma_complement, validate_multiplier, Convention,
    Multiplier, PhaseSpace,
};
use crate::pretty::{discrepancy, Discrepancy, ParamForm};
use crate::torus::TorusExponent;
use crate::weyl::ProjectiveRep;

pub const SCHEMA_VERSION: u32 = 1;

/// Residual ceiling for every numeric check.
pub const RESIDUAL_LIMIT: f64 = 1e-9;

/// Random commutant elements drawn per Lagrangian case.
pub const DEFAULT_SAMPLES: usize = 20;

pub struct CheckSpec {
    pub name: &'static str,
    pub invariant: &'static str,
}

const fn spec(name: &'static str, invariant: &'static str) -> CheckSpec {
    CheckSpec { name, invariant }
}

/// Every check the battery can emit, with the invariant it tests.
pub const REGISTRY: &[CheckSpec] = &[
    spec(
        "group.order_exponent",
        "|G| is the product of the cyclic orders and the exponent their lcm",
    ),
    spec(
        "group.element_indexing",
        "element indices follow lexicographic order and invert element_at",
    ),
    spec("group.character_homomorphism", "χ(x+y) = χ(x)χ(y) and χ_0 = 1, exactly"),
    spec(
        "group.torus_arithmetic",
        "circle values are associative with exact inverses",
    ),
    spec(
        "group.subgroups_closed",
        "enumerated subgroups are closed, generated by their generators, of order dividing |G|",
    ),
    spec(
        "group.quotient_partition",
        "cosets partition the group, are constant on x+H, and have lex-minimal representatives",
    ),
    spec(
        "phase.multiplier_valid",
        "normalisation and the cocycle identity hold everywhere",
    ),
    spec("phase.sigma_alternating", "σ(x,x) = 1 and σ(x,y)σ(y,x) = 1"),
    spec("phase.sigma_bicharacter", "σ is a character in each argument"),
    spec("phase.nondegenerate", "x ↦ σ(·,x) is injective"),
    spec("phase.complement_antitone", "H ⊆ K implies K^σ ⊆ H^σ"),
    spec("phase.double_complement", "H^σσ = H"),
    spec("phase.lagrangian_symmetric", "m is symmetric on a Lagrangian subgroup"),
    spec(
        "phase.convention_agreement",
        "both standard conventions give the same σ-kernels, complements and Lagrangians",
    ),
    spec("weyl.projective_relation", "U_x U_y = m(x,y) U_(x+y), exactly"),
    spec("weyl.identity_at_zero", "U_0 = I"),
    spec("weyl.adjoint_relation", "U_x* = conj(m(x,-x)) U_(-x)"),
    spec("weyl.translation_action_composition", "α_z α_w = α_(z+w), exactly"),
    spec(
        "weyl.generalized_permutation",
        "U_x is monomial and unitary with root-of-unity entries of order dividing exp(G)",
    ),
    spec(
        "weyl.irreducible",
        "the commutant of the reference representation is one-dimensional",
    ),
    spec(
        "weyl.tensor_projective_relation",
        "U_x ⊗ I_k follows the same multiplier exactly",
    ),
    spec(
        "canonical.alpha_coboundary",
        "α(0) = 1 and m(h,h') = α(h+h')/(α(h)α(h')) on H",
    ),
    spec("canonical.phi_on_representatives", "Φ = 1 on coset representatives"),
    spec(
        "canonical.phi_functional_equation",
        "Φ(x+h) α(h) m(h,x) = Φ(x) for all x and h",
    ),
    spec(
        "canonical.covariance_consistency",
        "extending over h then h' equals extending over h+h'",
    ),
    spec("canonical.dimension", "dim L²(Ξ//H) = |Ξ/H| = |H| ≥ 1"),
    spec("canonical.a_phi_unitary", "A_Φ is unitary"),
    spec(
        "canonical.transported_h_invariance",
        "t ↦ Φ(t+x)/Φ(t)·m(t,x) is H-invariant",
    ),
    spec(
        "canonical.transported_action_closed_form",
        "the closed-form transported action equals A_Φ* U_x A_Φ",
    ),
    spec(
        "canonical.diagonal_h_action",
        "U_h acts on L²(Ξ/H) as multiplication by (1/α(h))σ(t+H,h)",
    ),
    spec(
        "canonical.projective_relation",
        "the representation on L²(Ξ//H) follows the multiplier exactly",
    ),
    spec("canonical.irreducible", "the representation on L²(Ξ//H) is irreducible"),
    spec("canonical.multiplication_norm", "‖M_f‖ = max|f|"),
    spec(
        "algebra.closure",
        "commutant bases are independent and closed under products and adjoints",
    ),
    spec(
        "algebra.commutant_dimension",
        "dim of the commutant of H is |Ξ|/|H| = |H^σ|",
    ),
    spec("algebra.span_theorem", "the commutant of H equals span{U_x : x ∈ H^σ}"),
    spec(
        "algebra.commutativity_criterion",
        "the commutant of H is commutative iff H^σ ⊆ H",
    ),
    spec(
        "algebra.maximal_abelian",
        "the commutant of H is maximal abelian iff H is Lagrangian",
    ),
    spec("algebra.spectrum_size", "the Gelfand spectrum has |Ξ/H| points"),
    spec(
        "algebra.spectrum_labels",
        "spectral projectors transform to distinct coset indicators",
    ),
    spec("algebra.character_multiplicative", "χ(AB) = χ(A)χ(B)"),
    spec("algebra.character_star", "χ(A*) = conj χ(A)"),
    spec(
        "algebra.transform_multiplicative",
        "the transform of AB is the product of transforms",
    ),
    spec(
        "algebra.transform_star",
        "the transform of A* is the conjugate transform",
    ),
    spec("algebra.transform_isometric", "‖A‖ = max|f|"),
    spec("algebra.transform_round_trip", "A → f → A reproduces A"),
    spec("algebra.translation_covariance", "α_z(A) transforms to f(· + z)"),
    spec(
        "algebra.c1_collapse",
        "‖α_z(A) − A‖ is finite and α_z(A) stays in the commutant for every z",
    ),
    spec(
        "algebra.intertwiner_dimension",
        "the reference and canonical representations intertwine in exactly one dimension",
    ),
    spec(
        "algebra.intertwiner_alpha_independence",
        "a second α gives a one-dimensional intertwiner space and a coset-shifted transform",
    ),
    spec(
        "algebra.tensor_dimension",
        "the commutant of U_h ⊗ I_k has dimension |Ξ/H|·k²",
    ),
    spec(
        "algebra.tensor_block_diagonal",
        "transported tensor commutant elements are block diagonal",
    ),
    spec(
        "algebra.tensor_round_trip",
        "rebuilding M_F from its blocks reproduces the operator",
    ),
    spec(
        "fixture.weyl_matrices",
        "printed Weyl matrices equal the computed ones exactly",
    ),
    spec(
        "fixture.lagrangians",
        "printed Lagrangian lists equal the enumerated ones",
    ),
    spec(
        "fixture.algebra_forms",
        "printed commutant forms equal the computed ones exactly",
    ),
    spec(
        "fixture.printed_forms_report",
        "printed forms not used as ground truth, compared and reported",
    ),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Reported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Fixture,
    Invariant,
    Degeneracy,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureKind>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub group: String,
    pub multiplier: String,
    pub subgroup: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra_form: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<NamedDiscrepancy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedDiscrepancy {
    pub subgroup: String,
    #[serde(flatten)]
    pub report: Discrepancy,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub reported: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub seed: u64,
    pub samples: usize,
    pub tensor_k: Vec<usize>,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn checks(&self) -> impl Iterator<Item = (&CaseReport, &Check)> {
        self.cases.iter().flat_map(|c| c.checks.iter().map(move |k| (c, k)))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&CaseReport, &Check)> {
        self.checks().filter(|(_, k)| k.status == Status::Fail)
    }

    /// 0 when everything passed; otherwise 4 for invariant failures, 5 for
    /// exhausted degeneracy retries, 3 for fixture mismatches, in that
    /// order of precedence.
    pub fn exit_code(&self) -> i32 {
        let kinds: BTreeSet<FailureKind> = self.failures().filter_map(|(_, k)| k.failure).collect();
        if kinds.contains(&FailureKind::Invariant) {
            4
        } else if kinds.contains(&FailureKind::Degeneracy) {
            5
        } else if kinds.contains(&FailureKind::Fixture) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// One line per case plus failures and totals.
    pub fn text_summary(&self) -> String {
        let mut out = String::new();
        for case in &self.cases {
            let pass = case.checks.iter().filter(|c| c.status == Status::Pass).count();
            let fail = case.checks.iter().filter(|c| c.status == Status::Fail).count();
            let _ = write!(
                out,
                "{} [{}] {}: {pass} passed",
                case.group, case.multiplier, case.subgroup
            );
            if fail > 0 {
                let _ = write!(out, ", {fail} FAILED");
            }
            if let Some(form) = &case.algebra_form {
                let _ = write!(out, "  algebra {form}");
            }
            out.push('\n');
            for c in case.checks.iter().filter(|c| c.status == Status::Fail) {
                let _ = writeln!(
                    out,
                    "  FAIL {} expected={} actual={} residual={}",
                    c.name,
                    c.expected.as_deref().unwrap_or("-"),
                    c.actual.as_deref().unwrap_or("-"),
                    c.residual.map_or("-".to_string(), |r| format!("{r:.3e}"))
                );
            }
            for d in &case.discrepancies {
                let same = if d.report.same_algebra {
                    "same algebra"
                } else {
                    "different algebra"
                };
                let _ = writeln!(out, "  printed {} {} ({same})", d.subgroup, d.report.printed);
                let _ = writeln!(out, "  computed {} {}", d.subgroup, d.report.computed);
                for f in &d.report.fixes {
                    let _ = writeln!(
                        out,
                        "  fix {} entry ({},{}): {} -> {}",
                        d.subgroup, f.row, f.col, f.printed, f.corrected
                    );
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} cases, {} checks: {} passed, {} failed, {} reported",
            s.cases, s.checks, s.passed, s.failed, s.reported
        );
        out
    }
}

/// Which multiplier to put on `G × Ĝ`.
#[derive(Clone, Debug)]
pub enum MultiplierChoice {
    Standard(Convention),
    Table(Multiplier),
}

impl MultiplierChoice {
    pub fn label(&self) -> String {
        match self {
            MultiplierChoice::Standard(c) => c.label().to_string(),
            MultiplierChoice::Table(_) => "file".to_string(),
        }
    }

    pub fn build(&self, g: &FiniteAbelianGroup) -> Result<PhaseSpace> {
        match self {
            MultiplierChoice::Standard(c) => PhaseSpace::standard(g, *c),
            MultiplierChoice::Table(m) => PhaseSpace::new(g, m.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub spaces: Vec<(FiniteAbelianGroup, MultiplierChoice)>,
    pub seed: u64,
    pub samples: usize,
    pub tensor_k: Vec<usize>,
    pub fixtures: Fixtures,
}

pub fn battery_groups() -> Vec<FiniteAbelianGroup> {
    [&[2][..], &[3], &[4], &[5], &[2, 2], &[6]]
        .iter()
        .map(|o| FiniteAbelianGroup::new(o.to_vec()).expect("positive orders"))
        .collect()
}

impl VerifyConfig {
    /// Every group under both standard conventions.
    pub fn for_groups(groups: Vec<FiniteAbelianGroup>, seed: u64) -> Self {
        let spaces = groups
            .into_iter()
            .flat_map(|g| {
                [Convention::Standard, Convention::Conjugate]
                    .into_iter()
                    .map(move |c| (g.clone(), MultiplierChoice::Standard(c)))
            })
            .collect();
        VerifyConfig {
            spaces,
            seed,
            samples: DEFAULT_SAMPLES,
            tensor_k: vec![2],
            fixtures: Fixtures::embedded(),
        }
    }

    pub fn battery(seed: u64) -> Self {
        Self::for_groups(battery_groups(), seed)
    }
}

/// FNV-1a, to derive stable per-case seeds.
fn case_seed(seed: u64, key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in key.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

struct Checks {
    list: Vec<Check>,
}

impl Checks {
    fn new() -> Self {
        Checks { list: Vec::new() }
    }

    fn kind_for(name: &str) -> FailureKind {
        if name.starts_with("fixture.") {
            FailureKind::Fixture
        } else {
            FailureKind::Invariant
        }
    }

    fn push(&mut self, name: &str, ok: bool, residual: Option<f64>, expected: Option<String>, actual: Option<String>) {
        debug_assert!(REGISTRY.iter().any(|s| s.name == name), "unregistered check {name}");
        self.list.push(Check {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            residual,
            expected,
            actual,
            failure: (!ok).then(|| Self::kind_for(name)),
        });
    }

    fn exact(&mut self, name: &str, ok: bool) {
        self.push(name, ok, None, None, None);
    }

    fn equal<T: PartialEq + ToString>(&mut self, name: &str, expected: T, actual: T) {
        let ok = expected == actual;
        self.push(name, ok, None, Some(expected.to_string()), Some(actual.to_string()));
    }

    fn residual(&mut self, name: &str, r: f64) {
        self.push(name, r.is_finite() && r < RESIDUAL_LIMIT, Some(r), None, None);
    }

    fn error(&mut self, name: &str, e: &Error) {
        let kind = match e {
            Error::Degeneracy(_) => FailureKind::Degeneracy,
            _ => Self::kind_for(name),
        };
        self.list.push(Check {
            name: name.to_string(),
            status: Status::Fail,
            residual: None,
            expected: None,
            actual: Some(e.to_string()),
            failure: Some(kind),
        });
    }

    fn reported(&mut self, name: &str, actual: String) {
        self.list.push(Check {
            name: name.to_string(),
            status: Status::Reported,
            residual: None,
            expected: None,
            actual: Some(actual),
            failure: None,
        });
    }
}

fn tol() -> Tol<f64> {
    Tol::standard()
}

/// The representation the commutants live on: Schrödinger for standard
/// multipliers, otherwise the canonical one on the first Lagrangian.
pub fn reference_rep(ps: &PhaseSpace) -> Result<ProjectiveRep<'_>> {
    if ps.convention().is_some() {
        return ProjectiveRep::schrodinger(ps);
    }
    let lags = enumerate_lagrangians(ps)?;
    let h = lags
        .first()
        .ok_or_else(|| Error::InvariantViolation("no Lagrangian subgroup".into()))?;
    CovariantSpace::new(ps, h)?.representation()
}

pub fn run(config: &VerifyConfig) -> VerificationReport {
    let mut cases = Vec::new();
    for (g, choice) in &config.spaces {
        run_space(config, g, choice, &mut cases);
    }
    let mut summary = Summary {
        cases: cases.len(),
        ..Summary::default()
    };
    for c in cases.iter().flat_map(|c: &CaseReport| &c.checks) {
        summary.checks += 1;
        match c.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Reported => summary.reported += 1,
        }
    }
    VerificationReport {
        schema: SCHEMA_VERSION,
        seed: config.seed,
        samples: config.samples,
        tensor_k: config.tensor_k.clone(),
        cases,
        summary,
    }
}

fn new_case(config: &VerifyConfig, g: &FiniteAbelianGroup, choice: &MultiplierChoice, subgroup: String) -> CaseReport {
    let key = format!("{g}|{}|{subgroup}", choice.label());
    CaseReport {
        group: g.to_string(),
        multiplier: choice.label(),
        seed: case_seed(config.seed, &key),
        subgroup,
        checks: Vec::new(),
        algebra_form: None,
        discrepancies: Vec::new(),
    }
}

fn run_space(config: &VerifyConfig, g: &FiniteAbelianGroup, choice: &MultiplierChoice, out: &mut Vec<CaseReport>) {
    let mut case = new_case(config, g, choice, "*".into());
    let mut checks = Checks::new();
    let ps = match choice.build(g) {
        Ok(ps) => ps,
        Err(e) => {
            checks.error("phase.multiplier_valid", &e);
            case.checks = checks.list;
            out.push(case);
            return;
        }
    };
    let subgroups = match enumerate_subgroups(ps.xi(), None) {
        Ok(s) => s,
        Err(e) => {
            checks.error("group.subgroups_closed", &e);
            case.checks = checks.list;
            out.push(case);
            return;
        }
    };
    group_checks(&ps, &subgroups, &mut checks);
    phase_checks(&ps, &subgroups, &mut checks);
    let rep = match reference_rep(&ps) {
        Ok(r) => r,
        Err(e) => {
            checks.error("weyl.projective_relation", &e);
            case.checks = checks.list;
            out.push(case);
            return;
        }
    };
    weyl_checks(config, &ps, &rep, &mut checks);
    if ps.convention() == Some(Convention::Standard) && g.rank() == 1 {
        if let Some(fx) = config.fixtures.for_order(g.orders()[0]) {
            fixture_checks(fx, &ps, &rep, &mut checks, &mut case.discrepancies);
        }
    }
    case.checks = checks.list;
    out.push(case);

    for h in &subgroups {
        let mut case = new_case(config, g, choice, h.to_string());
        let mut checks = Checks::new();
        let mut rng = ChaCha8Rng::seed_from_u64(case.seed);
        subgroup_checks(&ps, &rep, h, &mut checks);
        if matches!(is_lagrangian(&ps, h), Ok(true)) {
            case.algebra_form = Some(
                ParamForm::from_algebra(&subgroup_commutant::<f64>(&rep, h, tol()), ps.modulus(), tol()).to_string(),
            );
            lagrangian_checks(config, &ps, &rep, h, case.seed, &mut rng, &mut checks);
        }
        case.checks = checks.list;
        out.push(case);
    }
}

fn group_checks(ps: &PhaseSpace, subgroups: &[Subgroup], checks: &mut Checks) {
    let xi = ps.xi();
    let elems: Vec<_> = xi.elements().collect();
    let max_order = elems.iter().map(|x| xi.element_order(x)).max().unwrap_or(1);
    checks.exact(
        "group.order_exponent",
        elems.len() as u64 == xi.orders().iter().product::<u64>() && max_order == xi.exponent(),
    );
    checks.exact(
        "group.element_indexing",
        elems.windows(2).all(|w| w[0] < w[1])
            && elems
                .iter()
                .enumerate()
                .all(|(i, x)| xi.index_of(x) == i && xi.element_at(i) == *x),
    );
    let chars: Vec<_> = xi.characters().collect();
    let zero = xi.zero();
    let hom = chars.iter().all(|chi| {
        elems.iter().all(|x| {
            elems
                .iter()
                .all(|y| xi.character_eval(chi, &xi.add(x, y)) == xi.character_eval(chi, x) * xi.character_eval(chi, y))
        })
    }) && elems.iter().all(|x| {
        xi.character_eval(
            &crate::group::Character {
                coords: zero.coords.clone(),
            },
            x,
        )
        .is_one()
    });
    checks.exact("group.character_homomorphism", hom);

    let values: BTreeSet<TorusExponent> = ps.multiplier().table().iter().copied().collect();
    let values: Vec<_> = values.into_iter().collect();
    let torus = values.iter().all(|&a| {
        (a * (TorusExponent::ONE / a)).is_one()
            && a * a.conj() == TorusExponent::ONE
            && values
                .iter()
                .all(|&b| values.iter().all(|&c| (a * b) * c == a * (b * c)))
    });
    checks.exact("group.torus_arithmetic", torus);

    let n = xi.order();
    let closed = subgroups.iter().all(|h| {
        let set = h.indices();
        set.contains(&0)
            && set
                .iter()
                .all(|&a| set.iter().all(|&b| h.contains_index(ps.add(a, b))) && h.contains_index(ps.neg(a)))
            && generated_subgroup(xi, h.generators()).is_ok_and(|s| s.same_elements(h))
            && n.is_multiple_of(h.order())
    });
    let distinct = subgroups
        .iter()
        .map(|h| h.indices().to_vec())
        .collect::<BTreeSet<_>>()
        .len()
        == subgroups.len();
    checks.exact("group.subgroups_closed", closed && distinct);
}

fn phase_checks(ps: &PhaseSpace, subgroups: &[Subgroup], checks: &mut Checks) {
    let n = ps.order();
    checks.exact(
        "phase.multiplier_valid",
        validate_multiplier(ps.multiplier()).is_valid(),
    );
    checks.exact(
        "phase.sigma_alternating",
        (0..n).all(|x| ps.sigma(x, x).is_one() && (0..n).all(|y| (ps.sigma(x, y) * ps.sigma(y, x)).is_one())),
    );
    let bichar = (0..n).all(|x| {
        (0..n).all(|y| {
            (0..n).all(|z| {
                ps.sigma(ps.add(x, y), z) == ps.sigma(x, z) * ps.sigma(y, z)
                    && ps.sigma(z, ps.add(x, y)) == ps.sigma(z, x) * ps.sigma(z, y)
            })
        })
    });
    checks.exact("phase.sigma_bicharacter", bichar);
    checks.exact("phase.nondegenerate", is_phase_space(ps.multiplier()));

    let complements: Vec<Option<Subgroup>> = subgroups.iter().map(|h| sigma_complement(ps, h).ok()).collect();
    let antitone = subgroups.iter().zip(&complements).all(|(h, hc)| {
        subgroups.iter().zip(&complements).all(|(k, kc)| match (hc, kc) {
            (Some(hc), Some(kc)) => !h.is_subset_of(k) || kc.is_subset_of(hc),
            _ => false,
        })
    });
    checks.exact("phase.complement_antitone", antitone);

    if let Some(c) = ps.convention() {
        let other = match c {
            Convention::Standard => Convention::Conjugate,
            Convention::Conjugate => Convention::Standard,
        };
        let agree = PhaseSpace::standard(ps.base(), other).is_ok_and(|qs| {
            let kernels = (0..n).all(|x| (0..n).all(|y| ps.sigma(x, y).is_one() == qs.sigma(x, y).is_one()));
            let comps = subgroups
                .iter()
                .zip(&complements)
                .all(|(h, hc)| matches!((sigma_complement(&qs, h), hc), (Ok(a), Some(b)) if a.same_elements(b)));
            let lags = match (enumerate_lagrangians(ps), enumerate_lagrangians(&qs)) {
                (Ok(a), Ok(b)) => a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x.same_elements(y)),
                _ => false,
            };
            kernels && comps && lags
        });
        checks.exact("phase.convention_agreement", agree);
    }
}

fn weyl_checks(config: &VerifyConfig, ps: &PhaseSpace, rep: &ProjectiveRep<'_>, checks: &mut Checks) {
    let n = ps.order();
    match rep.derive_multiplier() {
        Ok(m) => checks.exact("weyl.projective_relation", m.table() == ps.multiplier().table()),
        Err(e) => checks.error("weyl.projective_relation", &e),
    }
    checks.exact("weyl.identity_at_zero", rep.get(0).is_identity());
    checks.exact(
        "weyl.adjoint_relation",
        (0..n).all(|x| rep.get(x).adjoint() == rep.get(ps.neg(x)).scale(ps.m(x, ps.neg(x)).conj())),
    );
    let probes: Vec<usize> = (0..n).step_by((n / 6).max(1)).collect();
    let compose = (0..n).all(|z| {
        (0..n).all(|w| {
            probes.iter().all(|&y| {
                let a = rep.get(y);
                rep.translation_action_exact(z, &rep.translation_action_exact(w, a))
                    == rep.translation_action_exact(ps.add(z, w), a)
            })
        })
    });
    checks.exact("weyl.translation_action_composition", compose);
    let exp = ps.base().exponent();
    let monomial = rep.matrices().iter().all(|u| {
        u.mul(&u.adjoint()).is_identity()
            && (ps.convention().is_none() || (0..u.dim()).all(|c| exp.is_multiple_of(u.column(c).1.modulus())))
    });
    checks.exact("weyl.generalized_permutation", monomial);
    checks.exact("weyl.irreducible", rep.is_irreducible());
    for &k in &config.tensor_k {
        match rep.tensor_identity(k) {
            Ok(t) => checks.exact(
                "weyl.tensor_projective_relation",
                t.derive_multiplier()
                    .is_ok_and(|m| m.table() == ps.multiplier().table()),
            ),
            Err(e) => checks.error("weyl.tensor_projective_relation", &e),
        }
    }
}

fn subgroup_checks(ps: &PhaseSpace, rep: &ProjectiveRep<'_>, h: &Subgroup, checks: &mut Checks) {
    let n = ps.order();
    match quotient(ps.xi(), h) {
        Ok(q) => {
            let constant = (0..n).all(|x| h.indices().iter().all(|&y| q.coset(x) == q.coset(ps.add(x, y))));
            let lex_min = (0..q.len()).all(|c| (0..n).filter(|&x| q.coset(x) == c).min() == Some(q.rep_index(c)));
            let sizes = q.len() * h.order() == n && (0..q.len()).all(|c| q.coset(q.rep_index(c)) == c);
            checks.exact("group.quotient_partition", constant && lex_min && sizes);
        }
        Err(e) => checks.error("group.quotient_partition", &e),
    }
    let hs = match sigma_complement(ps, h) {
        Ok(s) => s,
        Err(e) => {
            checks.error("phase.double_complement", &e);
            return;
        }
    };
    checks.exact(
        "phase.double_complement",
        sigma_complement(ps, &hs).is_ok_and(|x| x.same_elements(h)),
    );

    let comm = subgroup_commutant::<f64>(rep, h, tol());
    let closure = comm.closure_residual();
    let gram = (0..comm.dimension())
        .flat_map(|i| (0..comm.dimension()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let ip: Complex<f64> = comm.basis()[i]
                .iter()
                .zip(comm.basis()[j].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            (ip - if i == j {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            })
            .norm()
        })
        .fold(0.0, f64::max);
    checks.residual("algebra.closure", closure.max(gram));
    let expected = n / h.order();
    checks.equal(
        "algebra.commutant_dimension",
        format!("{expected}/{expected}"),
        format!("{}/{}", comm.dimension(), hs.order()),
    );
    let span = span_basis::<f64>(rep, &hs, tol());
    let r = comm.mutual_residual(&span);
    if span.dimension() == comm.dimension() {
        checks.residual("algebra.span_theorem", r);
    } else {
        checks.push(
            "algebra.span_theorem",
            false,
            Some(r),
            Some(comm.dimension().to_string()),
            Some(span.dimension().to_string()),
        );
    }
    let commutative = comm.is_commutative(tol());
    checks.equal("algebra.commutativity_criterion", hs.is_subset_of(h), commutative);
    checks.equal(
        "algebra.maximal_abelian",
        hs.same_elements(h),
        comm.is_maximal_abelian(tol()),
    );
}

fn max_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn lagrangian_checks(
    config: &VerifyConfig,
    ps: &PhaseSpace,
    rep: &ProjectiveRep<'_>,
    h: &Subgroup,
    seed: u64,
    rng: &mut ChaCha8Rng,
    checks: &mut Checks,
) {
    let hs = h.indices();
    checks.exact(
        "phase.lagrangian_symmetric",
        hs.iter().all(|&a| hs.iter().all(|&b| ps.m(a, b) == ps.m(b, a))),
    );

    let cs = match CovariantSpace::new(ps, h) {
        Ok(cs) => cs,
        Err(e) => {
            checks.error("canonical.alpha_coboundary", &e);
            return;
        }
    };
    let n = ps.order();
    let q = cs.quotient();
    checks.exact("canonical.alpha_coboundary", cs.alpha().verify(ps));
    checks.exact(
        "canonical.phi_on_representatives",
        (0..q.len()).all(|c| cs.phi().get(q.rep_index(c)).is_one()),
    );
    checks.exact(
        "canonical.phi_functional_equation",
        cs.phi().satisfies_functional_equation(ps, h, cs.alpha()),
    );
    checks.exact("canonical.covariance_consistency", cs.covariance_is_consistent());
    checks.equal(
        "canonical.dimension",
        format!("{}/{}", n / h.order(), h.order()),
        format!("{}/{}", cs.dim(), cs.dim()),
    );
    checks.exact("canonical.a_phi_unitary", cs.a_phi_is_unitary());
    let transported: Vec<_> = (0..n).map(|x| cs.transported_action(x)).collect();
    checks.exact(
        "canonical.transported_h_invariance",
        transported.iter().all(|t| t.is_ok()),
    );
    checks.exact(
        "canonical.transported_action_closed_form",
        transported.iter().enumerate().all(|(x, t)| {
            t.as_ref()
                .is_ok_and(|t| *t == cs.conjugated_by_a_phi(x) && *t == cs.weyl_matrix(x))
        }),
    );
    checks.exact(
        "canonical.diagonal_h_action",
        hs.iter().all(|&y| {
            transported[y]
                .as_ref()
                .is_ok_and(|t| t.diagonal_entries() == Some(&cs.diagonal_h_action(y)[..]))
        }),
    );
    let canonical = match cs.representation() {
        Ok(r) => {
            checks.exact("canonical.projective_relation", true);
            r
        }
        Err(e) => {
            checks.error("canonical.projective_relation", &e);
            return;
        }
    };
    checks.exact("canonical.irreducible", canonical.is_irreducible());
    let mut worst = 0.0f64;
    for _ in 0..config.samples {
        let f: Vec<Complex<f64>> = (0..cs.dim())
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.clone()));
        let sup = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max((operator_norm(&m) - sup).abs());
    }
    checks.residual("canonical.multiplication_norm", worst);

    let alg = subgroup_commutant::<f64>(rep, h, tol());
    let transform = match intertwiner::<f64>(rep, &canonical, tol()) {
        Ok(v) => {
            checks.equal("algebra.intertwiner_dimension", 1, v.dimension);
            GelfandTransform::new(rep.clone(), cs.clone(), tol())
        }
        Err(e) => {
            checks.error("algebra.intertwiner_dimension", &e);
            Err(e)
        }
    };
    let transform = match transform {
        Ok(t) => t,
        Err(e) => {
            checks.error("algebra.transform_round_trip", &e);
            return;
        }
    };

    match gelfand_spectrum(&alg, seed, tol()) {
        Ok(mut g) => {
            let mults_one = g.points.iter().all(|p| p.multiplicity() == 1);
            checks.equal(
                "algebra.spectrum_size",
                format!("{} simple", cs.dim()),
                format!("{} {}", g.len(), if mults_one { "simple" } else { "degenerate" }),
            );
            match g.label(&transform, tol()) {
                Ok(()) => {
                    let labels: BTreeSet<usize> = g.points.iter().filter_map(|p| p.coset).collect();
                    checks.exact(
                        "algebra.spectrum_labels",
                        labels.len() == g.len() && labels.len() == cs.dim(),
                    );
                }
                Err(e) => checks.error("algebra.spectrum_labels", &e),
            }
            let (mut mult, mut star) = (0.0f64, 0.0f64);
            for _ in 0..config.samples {
                let a = alg.random_element(rng);
                let b = alg.random_element(rng);
                let ab = &a * &b;
                let a_star = a.adjoint();
                for p in &g.points {
                    mult = mult.max((p.eval(&ab) - p.eval(&a) * p.eval(&b)).norm());
                    star = star.max((p.eval(&a_star) - p.eval(&a).conj()).norm());
                }
            }
            checks.residual("algebra.character_multiplicative", mult);
            checks.residual("algebra.character_star", star);
        }
        Err(e) => {
            checks.error("algebra.spectrum_size", &e);
        }
    }

    let mut worst = [0.0f64; 6];
    let mut failure: Option<Error> = None;
    for _ in 0..config.samples {
        let a = alg.random_element(rng);
        let b = alg.random_element(rng);
        let step = || -> Result<[f64; 6]> {
            let fa = transform.transform(&a)?;
            let fb = transform.transform(&b)?;
            let fab = transform.transform(&(&a * &b))?;
            let prod: Vec<_> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
            let fs = transform.transform(&a.adjoint())?;
            let conj: Vec<_> = fa.iter().map(|z| z.conj()).collect();
            let sup = fa.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let round = frobenius(&(transform.inverse(&fa) - &a));
            let (mut cov, mut c1) = (0.0f64, 0.0f64);
            for z in 0..n {
                let az = rep.translation_action(z, &a);
                let moved = frobenius(&(&az - &a));
                let comm = transform.commutation_residual(&az, 1);
                c1 = c1.max(if moved.is_finite() { comm } else { f64::INFINITY });
                let fz = transform.transform(&az)?;
                let shift = transform.shift(z);
                let shifted: Vec<_> = shift.iter().map(|&c| fa[c]).collect();
                cov = cov.max(max_diff(&fz, &shifted));
            }
            Ok([
                max_diff(&fab, &prod),
                max_diff(&fs, &conj),
                (operator_norm(&a) - sup).abs(),
                round,
                cov,
                c1,
            ])
        };
        match step() {
            Ok(r) => {
                for (w, v) in worst.iter_mut().zip(r) {
                    *w = w.max(v);
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let names = [
        "algebra.transform_multiplicative",
        "algebra.transform_star",
        "algebra.transform_isometric",
        "algebra.transform_round_trip",
        "algebra.translation_covariance",
        "algebra.c1_collapse",
    ];
    for (name, r) in names.iter().zip(worst) {
        match &failure {
            Some(e) => checks.error(name, e),
            None => checks.residual(name, r),
        }
    }

    alpha_independence(ps, rep, h, &transform, &alg, rng, checks);

    for &k in &config.tensor_k {
        match tensor_commutant::<f64>(rep, k, h, tol()) {
            Ok(t) => {
                checks.equal("algebra.tensor_dimension", cs.dim() * k * k, t.dimension());
                let (mut off, mut round) = (0.0f64, 0.0f64);
                let mut err = None;
                for _ in 0..config.samples {
                    let a = t.random_element(rng);
                    match transform.transform_blocks(&a, k) {
                        Ok((blocks, o)) => {
                            off = off.max(o);
                            round = round.max(frobenius(&(transform.inverse_blocks(&blocks) - &a)));
                        }
                        Err(e) => {
                            err = Some(e);
                            break;
                        }
                    }
                }
                match err {
                    Some(e) => {
                        checks.error("algebra.tensor_block_diagonal", &e);
                        checks.error("algebra.tensor_round_trip", &e);
                    }
                    None => {
                        checks.residual("algebra.tensor_block_diagonal", off);
                        checks.residual("algebra.tensor_round_trip", round);
                    }
                }
            }
            Err(e) => checks.error("algebra.tensor_dimension", &e),
        }
    }
}

/// Rebuilds the canonical space with the second trivialisation in sorted
/// order and checks that only the coset labelling moves.
fn alpha_independence(
    ps: &PhaseSpace,
    rep: &ProjectiveRep<'_>,
    h: &Subgroup,
    base: &GelfandTransform<'_, f64>,
    alg: &crate::algebra::OperatorAlgebra<f64>,
    rng: &mut ChaCha8Rng,
    checks: &mut Checks,
) {
    const NAME: &str = "algebra.intertwiner_alpha_independence";
    let result = (|| -> Result<bool> {
        let alphas = all_trivializations(ps, h)?;
        let Some(alt) = alphas.get(1).cloned() else {
            // |H| = 1: there is only one choice
            return Ok(true);
        };
        let cs = CovariantSpace::with_alpha(ps, h, alt)?;
        let other = cs.representation()?;
        if intertwiner::<f64>(rep, &other, tol())?.dimension != 1 {
            return Ok(false);
        }
        let t = GelfandTransform::new(rep.clone(), cs, tol())?;
        let a = alg.random_element(rng);
        let (f0, f1) = (base.transform(&a)?, t.transform(&a)?);
        Ok((0..ps.order()).any(|z| {
            let s = base.shift(z);
            let shifted: Vec<_> = s.iter().map(|&c| f0[c]).collect();
            max_diff(&f1, &shifted) < RESIDUAL_LIMIT
        }))
    })();
    match result {
        Ok(ok) => checks.exact(NAME, ok),
        Err(e) => checks.error(NAME, &e),
    }
}

fn fixture_subgroup(ps: &PhaseSpace, elements: &[[i64; 2]]) -> Result<Subgroup> {
    let idx = elements
        .iter()
        .map(|e| ps.xi().element(e).map(|x| ps.xi().index_of(&x)))
        .collect::<Result<Vec<_>>>()?;
    Subgroup::from_indices(ps.xi(), idx)
}

fn fixture_checks(
    fx: &GroupFixtures,
    ps: &PhaseSpace,
    rep: &ProjectiveRep<'_>,
    checks: &mut Checks,
    discrepancies: &mut Vec<NamedDiscrepancy>,
) {
    let weyl = fx
        .weyl
        .iter()
        .try_fold(Vec::new(), |mut bad, w| -> Result<Vec<String>> {
            let printed: ParamForm = w.matrix.parse()?;
            let entries = printed
                .exact_constants()
                .ok_or_else(|| Error::Input(format!("fixture {:?} is not a constant matrix", w.matrix)))?;
            let x = ps.xi().index_of(&ps.xi().element(&w.element)?);
            let u = rep.get(x);
            let d = u.dim();
            let same = entries.len() == d
                && entries
                    .iter()
                    .enumerate()
                    .all(|(r, row)| row.len() == d && row.iter().enumerate().all(|(c, e)| *e == u.entry(r, c)));
            if !same {
                bad.push(format!("{:?}", w.element));
            }
            Ok(bad)
        });
    match weyl {
        Ok(bad) => checks.push(
            "fixture.weyl_matrices",
            bad.is_empty(),
            None,
            Some(format!("{} printed matrices", fx.weyl.len())),
            Some(if bad.is_empty() {
                "all equal".into()
            } else {
                format!("mismatch at {}", bad.join(" "))
            }),
        ),
        Err(e) => checks.error("fixture.weyl_matrices", &e),
    }

    let lags = enumerate_lagrangians(ps).and_then(|found| {
        let printed = fx
            .lagrangians
            .iter()
            .map(|s| fixture_subgroup(ps, &s.elements).map(|h| h.indices().to_vec()))
            .collect::<Result<BTreeSet<_>>>()?;
        let found: BTreeSet<_> = found.iter().map(|h| h.indices().to_vec()).collect();
        Ok((
            printed.len(),
            found.len(),
            printed == found && printed.len() == fx.lagrangians.len(),
        ))
    });
    match lags {
        Ok((p, f, ok)) => checks.push(
            "fixture.lagrangians",
            ok,
            None,
            Some(p.to_string()),
            Some(f.to_string()),
        ),
        Err(e) => checks.error("fixture.lagrangians", &e),
    }

    let forms = fx
        .forms
        .iter()
        .try_fold(Vec::new(), |mut bad, f| -> Result<Vec<String>> {
            let h = fixture_subgroup(
                ps,
                &fx.lagrangian(&f.subgroup)
                    .ok_or_else(|| Error::Input(f.subgroup.clone()))?
                    .elements,
            )?;
            let computed = ParamForm::from_algebra(&subgroup_commutant::<f64>(rep, &h, tol()), ps.modulus(), tol());
            let printed: ParamForm = f.form.parse()?;
            if computed != printed {
                bad.push(format!("{}: printed {printed}, computed {computed}", f.subgroup));
            }
            Ok(bad)
        });
    match forms {
        Ok(bad) => checks.push(
            "fixture.algebra_forms",
            bad.is_empty(),
            None,
            Some(format!("{} printed forms", fx.forms.len())),
            Some(if bad.is_empty() {
                "all equal".into()
            } else {
                bad.join("; ")
            }),
        ),
        Err(e) => checks.error("fixture.algebra_forms", &e),
    }

    for f in &fx.printed_only {
        let result = (|| -> Result<Discrepancy> {
            let lag = fx
                .lagrangian(&f.subgroup)
                .ok_or_else(|| Error::Input(f.subgroup.clone()))?;
            let h = fixture_subgroup(ps, &lag.elements)?;
            let printed: ParamForm = f.form.parse()?;
            Ok(discrepancy(
                &printed,
                &subgroup_commutant(rep, &h, tol()),
                ps.modulus(),
                tol(),
            ))
        })();
        match result {
            Ok(d) => {
                let summary = if d.same_algebra {
                    format!("{}: printed form spans the computed algebra", f.subgroup)
                } else {
                    let fixes: Vec<String> = d
                        .fixes
                        .iter()
                        .map(|x| format!("({},{}) {} -> {}", x.row, x.col, x.printed, x.corrected))
                        .collect();
                    format!(
                        "{}: printed form differs; single-entry fixes: {}",
                        f.subgroup,
                        if fixes.is_empty() {
                            "none".into()
                        } else {
                            fixes.join(", ")
                        }
                    )
                };
                checks.reported("fixture.printed_forms_report", summary);
                discrepancies.push(NamedDiscrepancy {
                    subgroup: f.subgroup.clone(),
                    report: d,
                });
            }
            Err(e) => checks.error("fixture.printed_forms_report", &e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let names: BTreeSet<_> = REGISTRY.iter().map(|s| s.name).collect();
        assert_eq!(names.len(), REGISTRY.len());
    }

    #[test]
    fn every_registered_check_is_emitted() {
        let groups = ["2", "3", "2x2"].iter().map(|g| g.parse().unwrap()).collect();
        let mut config = VerifyConfig::for_groups(groups, 1);
        config.samples = 2;
        let report = run(&config);
        let emitted: BTreeSet<&str> = report.checks().map(|(_, k)| k.name.as_str()).collect();
        let missing: Vec<_> = REGISTRY
            .iter()
            .map(|s| s.name)
            .filter(|n| !emitted.contains(n))
            .collect();
        assert!(missing.is_empty(), "never emitted: {missing:?}");
        assert!(emitted.iter().all(|n| REGISTRY.iter().any(|s| s.name == *n)));
    }

    #[test]
    fn case_seeds_are_stable_and_distinct() {
        assert_eq!(case_seed(7, "Z2|standard|*"), case_seed(7, "Z2|standard|*"));
        assert_ne!(case_seed(7, "Z2|standard|*"), case_seed(8, "Z2|standard|*"));
        assert_ne!(case_seed(7, "Z2|standard|*"), case_seed(7, "Z3|standard|*"));
    }

    #[test]
    fn small_run_passes() {
        let mut config = VerifyConfig::for_groups(vec![FiniteAbelianGroup::cyclic(2).unwrap()], 7);
        config.samples = 3;
        let report = run(&config);
        let failures: Vec<_> = report
            .failures()
            .map(|(c, k)| format!("{} {} {}", c.subgroup, k.name, k.actual.clone().unwrap_or_default()))
            .collect();
        assert!(failures.is_empty(), "{failures:#?}");
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn corrupted_fixture_is_a_fixture_failure() {
        let mut config = VerifyConfig::for_groups(vec![FiniteAbelianGroup::cyclic(2).unwrap()], 7);
        config.samples = 2;
        config.fixtures.groups[0].weyl[3].matrix = "[[0,1],[1,0]]".into();
        let report = run(&config);
        assert_eq!(report.exit_code(), 3);
        let names: Vec<_> = report.failures().map(|(_, k)| k.name.as_str()).collect();
        assert_eq!(names, vec!["fixture.weyl_matrices"]);
    }
}
