//! Multipliers on `Ξ = G × Ĝ`, the commutator bicharacter `σ`, the
//! phase-space condition and Lagrangian subgroups.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups, FiniteAbelianGroup, GroupElement, Subgroup};
use crate::torus::TorusExponent;

/// Sign convention for the standard multiplier on `G × Ĝ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `m((x,φ),(y,ψ)) = φ(y)`; the printed Weyl matrices compose with this one.
    Standard,
    /// `m((x,φ),(y,ψ)) = conj(φ(y))`.
    Conjugate,
}

impl Convention {
    pub fn label(self) -> &'static str {
        match self {
            Convention::Standard => "standard",
            Convention::Conjugate => "standard-conj",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MultiplierKind {
    Standard(Convention),
    Custom,
}

/// A fully materialised table `m(x, y)` over `Ξ × Ξ`, indexed by element
/// indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplier {
    xi: FiniteAbelianGroup,
    table: Vec<TorusExponent>,
    kind: MultiplierKind,
}

impl Multiplier {
    pub fn standard(base: &FiniteAbelianGroup, convention: Convention) -> Self {
        let xi = base.product(base);
        let k = base.rank();
        let n = xi.order();
        let mut table = Vec::with_capacity(n * n);
        for x in xi.elements() {
            let phi = crate::group::Character {
                coords: x.coords[k..].to_vec(),
            };
            for y in xi.elements() {
                let b = GroupElement {
                    coords: y.coords[..k].to_vec(),
                };
                let v = base.character_eval(&phi, &b);
                table.push(match convention {
                    Convention::Standard => v,
                    Convention::Conjugate => v.conj(),
                });
            }
        }
        Multiplier {
            xi,
            table,
            kind: MultiplierKind::Standard(convention),
        }
    }

    pub fn trivial(xi: &FiniteAbelianGroup) -> Self {
        let n = xi.order();
        Multiplier {
            xi: xi.clone(),
            table: vec![TorusExponent::ONE; n * n],
            kind: MultiplierKind::Custom,
        }
    }

    pub fn from_table(xi: &FiniteAbelianGroup, table: Vec<TorusExponent>) -> Result<Self> {
        let n = xi.order();
        if table.len() != n * n {
            return Err(Error::Input(format!(
                "multiplier table has {} entries, expected {}",
                table.len(),
                n * n
            )));
        }
        Ok(Multiplier {
            xi: xi.clone(),
            table,
            kind: MultiplierKind::Custom,
        })
    }

    /// Reads the JSON triple list `[[x, y, [k, M]], ...]`; unlisted pairs are 1.
    pub fn from_triples(xi: &FiniteAbelianGroup, triples: &[MultiplierEntry]) -> Result<Self> {
        let n = xi.order();
        let mut table = vec![TorusExponent::ONE; n * n];
        for (pos, &MultiplierEntry(x, y, v)) in triples.iter().enumerate() {
            if x >= n || y >= n {
                return Err(Error::Input(format!(
                    "multiplier entry {pos}: index out of range for |Ξ| = {n}"
                )));
            }
            table[x * n + y] = v;
        }
        Ok(Multiplier {
            xi: xi.clone(),
            table,
            kind: MultiplierKind::Custom,
        })
    }

    pub fn load(xi: &FiniteAbelianGroup, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let triples: Vec<MultiplierEntry> = serde_json::from_str(&text)
            .map_err(|e| Error::Input(format!("invalid multiplier file {}: {e}", path.display())))?;
        Self::from_triples(xi, &triples)
    }

    /// Non-trivial entries as triples.
    pub fn to_triples(&self) -> Vec<MultiplierEntry> {
        let n = self.xi.order();
        self.table
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_one())
            .map(|(i, &v)| MultiplierEntry(i / n, i % n, v))
            .collect()
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.xi
    }

    pub fn kind(&self) -> MultiplierKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> TorusExponent {
        self.table[x * self.xi.order() + y]
    }

    pub fn eval(&self, x: &GroupElement, y: &GroupElement) -> TorusExponent {
        self.get(self.xi.index_of(x), self.xi.index_of(y))
    }

    pub fn table(&self) -> &[TorusExponent] {
        &self.table
    }

    /// Overwrites one entry; the result is a custom multiplier.
    pub fn with_entry(mut self, x: usize, y: usize, value: TorusExponent) -> Self {
        let n = self.xi.order();
        self.table[x * n + y] = value;
        self.kind = MultiplierKind::Custom;
        self
    }

    /// Least common multiple of all entry orders.
    pub fn modulus(&self) -> u64 {
        use num_integer::Integer;
        self.table.iter().fold(1, |acc, v| acc.lcm(&v.modulus()))
    }
}

/// One line of a multiplier file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplierEntry(pub usize, pub usize, pub TorusExponent);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    Normalization { x: usize, y: usize },
    Cocycle { x: usize, y: usize, z: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of normalisation and the cocycle identity
/// `m(x+y,z) m(x,y) = m(x,y+z) m(y,z)` over all of `Ξ³`.
pub fn validate_multiplier(m: &Multiplier) -> ValidationReport {
    let xi = m.group();
    let n = xi.order();
    let add = xi.addition_table();
    let zero = 0;
    let mut violations = Vec::new();
    for x in 0..n {
        if !m.get(x, zero).is_one() {
            violations.push(Violation::Normalization { x, y: zero });
        }
        if x != zero && !m.get(zero, x).is_one() {
            violations.push(Violation::Normalization { x: zero, y: x });
        }
    }
    for x in 0..n {
        for y in 0..n {
            let xy = add[x * n + y];
            let mxy = m.get(x, y);
            for z in 0..n {
                let lhs = m.get(xy, z) * mxy;
                let rhs = m.get(x, add[y * n + z]) * m.get(y, z);
                if lhs != rhs {
                    violations.push(Violation::Cocycle { x, y, z });
                }
            }
        }
    }
    ValidationReport { violations }
}

fn sigma_table(m: &Multiplier) -> Vec<TorusExponent> {
    let n = m.group().order();
    let mut sigma = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            sigma.push(m.get(x, y) / m.get(y, x));
        }
    }
    sigma
}

fn sigma_kernel(sigma: &[TorusExponent], n: usize) -> Vec<usize> {
    (0..n).filter(|&x| (0..n).all(|y| sigma[y * n + x].is_one())).collect()
}

/// Whether `x ↦ σ(·, x)` is injective (hence bijective onto the dual).
pub fn is_phase_space(m: &Multiplier) -> bool {
    let n = m.group().order();
    sigma_kernel(&sigma_table(m), n) == vec![0]
}

/// A validated phase space `Ξ = G × Ĝ` (or a custom multiplier on a group
/// of that shape).
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    base: FiniteAbelianGroup,
    xi: FiniteAbelianGroup,
    multiplier: Multiplier,
    sigma: Vec<TorusExponent>,
    add: Vec<usize>,
    neg: Vec<usize>,
    modulus: u64,
}

impl PhaseSpace {
    pub fn new(base: &FiniteAbelianGroup, multiplier: Multiplier) -> Result<Self> {
        let xi = base.product(base);
        if multiplier.group() != &xi {
            return Err(Error::Input(format!(
                "multiplier is defined on {}, expected {xi}",
                multiplier.group()
            )));
        }
        let report = validate_multiplier(&multiplier);
        if !report.is_valid() {
            return Err(Error::Input(format!(
                "multiplier fails validation ({} violations, first {:?})",
                report.violations.len(),
                report.violations[0]
            )));
        }
        let sigma = sigma_table(&multiplier);
        let n = xi.order();
        if sigma_kernel(&sigma, n) != vec![0] {
            return Err(Error::Input(
                "multiplier does not define a phase space: σ is degenerate".into(),
            ));
        }
        use num_integer::Integer;
        let modulus = multiplier.modulus().lcm(&xi.exponent());
        Ok(PhaseSpace {
            add: xi.addition_table(),
            neg: xi.negation_table(),
            base: base.clone(),
            xi,
            multiplier,
            sigma,
            modulus,
        })
    }

    pub fn standard(base: &FiniteAbelianGroup, convention: Convention) -> Result<Self> {
        Self::new(base, Multiplier::standard(base, convention))
    }

    /// The configuration group `G`.
    pub fn base(&self) -> &FiniteAbelianGroup {
        &self.base
    }

    pub fn xi(&self) -> &FiniteAbelianGroup {
        &self.xi
    }

    pub fn order(&self) -> usize {
        self.xi.order()
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }

    pub fn convention(&self) -> Option<Convention> {
        match self.multiplier.kind() {
            MultiplierKind::Standard(c) => Some(c),
            MultiplierKind::Custom => None,
        }
    }

    /// Common denominator for every circle-valued quantity of the space.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn m(&self, x: usize, y: usize) -> TorusExponent {
        self.multiplier.get(x, y)
    }

    #[inline]
    pub fn sigma(&self, x: usize, y: usize) -> TorusExponent {
        self.sigma[x * self.order() + y]
    }

    #[inline]
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x * self.order() + y]
    }

    #[inline]
    pub fn neg(&self, x: usize) -> usize {
        self.neg[x]
    }

    #[inline]
    pub fn sub(&self, x: usize, y: usize) -> usize {
        self.add(x, self.neg[y])
    }

    /// Splits an element of `Ξ` into its `G` and `Ĝ` parts.
    pub fn split(&self, x: usize) -> (GroupElement, GroupElement) {
        let e = self.xi.element_at(x);
        let k = self.base.rank();
        (
            GroupElement {
                coords: e.coords[..k].to_vec(),
            },
            GroupElement {
                coords: e.coords[k..].to_vec(),
            },
        )
    }

    pub fn join(&self, g: &GroupElement, chi: &GroupElement) -> usize {
        let mut coords = g.coords.clone();
        coords.extend_from_slice(&chi.coords);
        self.xi.index_of(&GroupElement { coords })
    }
}

/// `H^σ = { z : σ(z, w) = 1 for all w ∈ H }`.
pub fn sigma_complement(ps: &PhaseSpace, h: &Subgroup) -> Result<Subgroup> {
    if h.parent() != ps.xi() {
        return Err(Error::Input("subgroup is not a subgroup of Ξ".into()));
    }
    let members: Vec<usize> = (0..ps.order())
        .filter(|&z| h.indices().iter().all(|&w| ps.sigma(z, w).is_one()))
        .collect();
    Subgroup::from_indices(ps.xi(), members)
}

pub fn is_lagrangian(ps: &PhaseSpace, h: &Subgroup) -> Result<bool> {
    Ok(sigma_complement(ps, h)?.same_elements(h))
}

pub fn is_isotropic(ps: &PhaseSpace, h: &Subgroup) -> bool {
    h.indices()
        .iter()
        .all(|&a| h.indices().iter().all(|&b| ps.sigma(a, b).is_one()))
}

/// All Lagrangian subgroups, in subgroup enumeration order.
pub fn enumerate_lagrangians(ps: &PhaseSpace) -> Result<Vec<Subgroup>> {
    let n = ps.order();
    let root = (n as f64).sqrt().round() as usize;
    if root * root != n {
        return Err(Error::InvariantViolation(format!("|Ξ| = {n} is not a square")));
    }
    let mut out = Vec::new();
    for h in enumerate_subgroups(ps.xi(), Some(root))? {
        if is_lagrangian(ps, &h)? {
            if h.order() * h.order() != n {
                return Err(Error::InvariantViolation("Lagrangian with |H|² ≠ |Ξ|".into()));
            }
            out.push(h);
        }
    }
    Ok(out)
}
