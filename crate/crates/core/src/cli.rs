//! Command implementations behind the `lagrange-weyl` binary. Each command
//! returns a serialisable report; the binary chooses text or JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::algebra::{gelfand_spectrum, subgroup_commutant, GelfandTransform};
use crate::canonical::CovariantSpace;
use crate::error::{Error, Result};
use crate::group::{generated_subgroup, quotient, FiniteAbelianGroup, GroupElement, Subgroup};
use crate::linalg::Tol;
use crate::phase_space::{
    enumerate_lagrangians, is_lagrangian, is_phase_space, sigma_complement, validate_multiplier, Convention,
    Multiplier, PhaseSpace, Violation,
};
use crate::pretty::{linear_form, ParamForm};
use crate::torus::TorusExponent;
use crate::verify::{reference_rep, MultiplierChoice};
use crate::weyl::ExactMatrixJson;

pub const SCHEMA_VERSION: u32 = 1;

/// Exit status for an error raised outside the verification battery.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Precondition(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::Degeneracy(_) => 5,
        _ => 4,
    }
}

/// Parses `standard`, `standard-conj` or `file:<path>`.
pub fn parse_multiplier(spec: &str, group: &FiniteAbelianGroup) -> Result<MultiplierChoice> {
    match spec {
        "standard" => Ok(MultiplierChoice::Standard(Convention::Standard)),
        "standard-conj" => Ok(MultiplierChoice::Standard(Convention::Conjugate)),
        _ => match spec.strip_prefix("file:") {
            Some(path) => Ok(MultiplierChoice::Table(Multiplier::load(
                &group.product(group),
                Path::new(path),
            )?)),
            None => Err(Error::Input(format!(
                "unknown multiplier {spec:?}; expected standard, standard-conj or file:<path>"
            ))),
        },
    }
}

fn raw_multiplier(group: &FiniteAbelianGroup, choice: &MultiplierChoice) -> Multiplier {
    match choice {
        MultiplierChoice::Standard(c) => Multiplier::standard(group, *c),
        MultiplierChoice::Table(m) => m.clone(),
    }
}

#[derive(Serialize)]
pub struct DescribeReport {
    pub schema: u32,
    pub group: String,
    pub phase_space: String,
    pub order: usize,
    pub multiplier: String,
    pub violations: Vec<Violation>,
    pub is_phase_space: bool,
}

impl DescribeReport {
    pub fn text(&self) -> String {
        let validation = if self.violations.is_empty() {
            "normalised 2-cocycle".to_string()
        } else {
            format!("{} violations, first {:?}", self.violations.len(), self.violations[0])
        };
        format!(
            "Ξ = {}\norder: {}\nmultiplier: {}\nvalidation: {validation}\nphase space: {}\n",
            self.phase_space,
            self.order,
            self.multiplier,
            if self.is_phase_space { "yes" } else { "no" }
        )
    }
}

pub fn describe(group: &FiniteAbelianGroup, choice: &MultiplierChoice) -> Result<DescribeReport> {
    let m = raw_multiplier(group, choice);
    let xi = group.product(group);
    if m.group() != &xi {
        return Err(Error::Input(format!(
            "multiplier is defined on {}, expected {xi}",
            m.group()
        )));
    }
    let report = validate_multiplier(&m);
    let valid = report.is_valid();
    Ok(DescribeReport {
        schema: SCHEMA_VERSION,
        group: group.to_string(),
        phase_space: format!("{group} × dual({group})"),
        order: xi.order(),
        multiplier: choice.label(),
        violations: report.violations,
        is_phase_space: valid && is_phase_space(&m),
    })
}

#[derive(Serialize)]
pub struct SubgroupEntry {
    pub index: usize,
    pub generators: Vec<GroupElement>,
    pub elements: Vec<GroupElement>,
    pub quotient_size: usize,
}

#[derive(Serialize)]
pub struct LagrangianReport {
    pub schema: u32,
    pub group: String,
    pub multiplier: String,
    pub lagrangians: Vec<SubgroupEntry>,
}

impl LagrangianReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "{} Lagrangian subgroups of {} [{}]\n",
            self.lagrangians.len(),
            self.group,
            self.multiplier
        );
        for l in &self.lagrangians {
            let gens: Vec<_> = l.generators.iter().map(|g| g.to_string()).collect();
            let elems: Vec<_> = l.elements.iter().map(|g| g.to_string()).collect();
            let _ = writeln!(
                out,
                "[{}] generators {}  elements {{{}}}  |Ξ/H| = {}",
                l.index,
                gens.join(" "),
                elems.join(", "),
                l.quotient_size
            );
        }
        out
    }
}

fn entry(ps: &PhaseSpace, index: usize, h: &Subgroup) -> SubgroupEntry {
    SubgroupEntry {
        index,
        generators: h.generators().to_vec(),
        elements: h.elements().to_vec(),
        quotient_size: ps.order() / h.order(),
    }
}

pub fn lagrangians(group: &FiniteAbelianGroup, choice: &MultiplierChoice) -> Result<LagrangianReport> {
    let ps = choice.build(group)?;
    let list = enumerate_lagrangians(&ps)?;
    Ok(LagrangianReport {
        schema: SCHEMA_VERSION,
        group: group.to_string(),
        multiplier: choice.label(),
        lagrangians: list.iter().enumerate().map(|(i, h)| entry(&ps, i, h)).collect(),
    })
}

/// A subgroup selector: an index into the Lagrangian listing, or explicit
/// generators such as `"1,0;0,1"` (coordinates in `Ξ`, one generator per
/// `;`).
pub fn select_subgroup(ps: &PhaseSpace, selector: &str) -> Result<Subgroup> {
    let selector = selector.trim();
    if let Ok(i) = selector.parse::<usize>() {
        let list = enumerate_lagrangians(ps)?;
        let n = list.len();
        return list.into_iter().nth(i).ok_or_else(|| {
            Error::Input(format!(
                "subgroup index {i} out of range: there are {n} Lagrangian subgroups"
            ))
        });
    }
    let gens = selector
        .split(';')
        .map(|g| {
            let coords = g
                .split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Input(format!("subgroup selector {selector:?}: bad generator {g:?}")))?;
            ps.xi().element(&coords)
        })
        .collect::<Result<Vec<_>>>()?;
    generated_subgroup(ps.xi(), &gens)
}

#[derive(Serialize)]
pub struct SpectrumEntry {
    /// Character value as a linear form in the parameters of `form`.
    pub value: String,
    pub multiplicity: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coset: Option<GroupElement>,
}

#[derive(Serialize)]
pub struct AlgebraReport {
    pub schema: u32,
    pub group: String,
    pub multiplier: String,
    pub subgroup: SubgroupEntry,
    pub lagrangian: bool,
    pub dimension: usize,
    pub commutative: bool,
    pub maximal_abelian: bool,
    /// The commutant is spanned by `U_x` for `x` in the σ-complement.
    pub basis: Vec<BasisEntry>,
    pub form: ParamForm,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Vec<SpectrumEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<BTreeMap<usize, TorusExponent>>,
}

#[derive(Serialize)]
pub struct BasisEntry {
    pub element: GroupElement,
    pub matrix: ExactMatrixJson,
}

impl AlgebraReport {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let elems: Vec<_> = self.subgroup.elements.iter().map(|g| g.to_string()).collect();
        let _ = writeln!(out, "{} [{}] H = {{{}}}", self.group, self.multiplier, elems.join(", "));
        let _ = writeln!(out, "lagrangian: {}", self.lagrangian);
        let basis: Vec<_> = self.basis.iter().map(|b| format!("U{}", b.element)).collect();
        let _ = writeln!(
            out,
            "commutant: dimension {}, spanned by {}",
            self.dimension,
            basis.join(" ")
        );
        let _ = writeln!(out, "commutative: {}", self.commutative);
        let _ = writeln!(out, "maximal abelian: {}", self.maximal_abelian);
        let _ = writeln!(out, "form: {}", self.form);
        if let Some(points) = &self.spectrum {
            let _ = writeln!(out, "spectrum ({} points):", points.len());
            for p in points {
                let label = p.coset.as_ref().map_or(String::new(), |c| format!("  coset {c}+H"));
                let _ = writeln!(out, "  {}{label}", p.value);
            }
        }
        if let Some(phi) = &self.phi {
            let _ = writeln!(out, "phi: {}", serde_json::to_string(phi).unwrap_or_default());
        }
        out
    }
}

pub fn algebra(
    group: &FiniteAbelianGroup,
    choice: &MultiplierChoice,
    selector: &str,
    seed: u64,
    dump_phi: bool,
) -> Result<AlgebraReport> {
    let tol = Tol::<f64>::standard();
    let ps = choice.build(group)?;
    let h = select_subgroup(&ps, selector)?;
    let rep = reference_rep(&ps)?;
    let lag = is_lagrangian(&ps, &h)?;
    let alg = subgroup_commutant::<f64>(&rep, &h, tol);
    let form = ParamForm::from_algebra(&alg, ps.modulus(), tol);
    let commutative = alg.is_commutative(tol);
    let hs = sigma_complement(&ps, &h)?;
    let basis = hs
        .indices()
        .iter()
        .zip(hs.elements())
        .map(|(&x, e)| BasisEntry {
            element: e.clone(),
            matrix: rep.get(x).into(),
        })
        .collect();

    let spectrum = if commutative {
        let mut data = gelfand_spectrum(&alg, seed, tol)?;
        let space = if lag { Some(CovariantSpace::new(&ps, &h)?) } else { None };
        if let Some(cs) = &space {
            let transform = GelfandTransform::new(rep.clone(), cs.clone(), tol)?;
            data.label(&transform, tol)?;
        }
        let q = quotient(ps.xi(), &h)?;
        let params: Vec<_> = (0..form.param_count()).map(|p| form.param_matrix(p)).collect();
        let mut points: Vec<_> = data.points.iter().collect();
        points.sort_by_key(|p| p.coset);
        Some(
            points
                .into_iter()
                .map(|p| SpectrumEntry {
                    value: linear_form(&params.iter().map(|m| p.eval(m)).collect::<Vec<_>>(), ps.modulus()),
                    multiplicity: p.multiplicity(),
                    coset: p.coset.map(|c| ps.xi().element_at(q.rep_index(c))),
                })
                .collect(),
        )
    } else {
        None
    };
    let phi = if dump_phi {
        if !lag {
            return Err(Error::Input("--dump-phi needs a Lagrangian subgroup".into()));
        }
        let cs = CovariantSpace::new(&ps, &h)?;
        Some(cs.phi().values().iter().copied().enumerate().collect())
    } else {
        None
    };
    Ok(AlgebraReport {
        schema: SCHEMA_VERSION,
        group: group.to_string(),
        multiplier: choice.label(),
        subgroup: entry(&ps, 0, &h),
        lagrangian: lag,
        dimension: alg.dimension(),
        commutative,
        maximal_abelian: alg.is_maximal_abelian(tol),
        basis,
        form,
        spectrum,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n).unwrap()
    }

    const STD: MultiplierChoice = MultiplierChoice::Standard(Convention::Standard);

    #[test]
    fn describe_z3() {
        let r = describe(&z(3), &STD).unwrap();
        assert_eq!(r.order, 9);
        assert!(r.is_phase_space);
        assert!(r.text().contains("phase space: yes"));
    }

    #[test]
    fn selector_by_generators() {
        let ps = PhaseSpace::standard(&z(2), Convention::Standard).unwrap();
        let h = select_subgroup(&ps, "1,1").unwrap();
        assert_eq!(h.order(), 2);
        assert!(select_subgroup(&ps, "7").is_err());
        assert!(select_subgroup(&ps, "1,x").is_err());
    }

    #[test]
    fn z2_circulant_spectrum() {
        let ps = PhaseSpace::standard(&z(2), Convention::Standard).unwrap();
        let h = select_subgroup(&ps, "1,0").unwrap();
        let i = enumerate_lagrangians(&ps)
            .unwrap()
            .iter()
            .position(|l| l.same_elements(&h))
            .unwrap();
        let r = algebra(&z(2), &STD, &i.to_string(), 0, true).unwrap();
        assert_eq!(r.form.to_string(), "[[a,b],[b,a]]");
        let mut values: Vec<_> = r.spectrum.unwrap().into_iter().map(|p| p.value).collect();
        values.sort();
        assert_eq!(values, vec!["a+b", "a-b"]);
        assert_eq!(r.phi.unwrap().len(), 4);
    }

    #[test]
    fn non_commutative_subgroup_has_no_spectrum() {
        let r = algebra(&z(2), &STD, "0,0", 0, false).unwrap();
        assert_eq!(r.dimension, 4);
        assert!(!r.commutative);
        assert!(r.spectrum.is_none());
    }
}
