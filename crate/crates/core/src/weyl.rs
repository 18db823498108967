//! Exact Weyl operators on `ℓ²(G)` and projective representations built
//! from them.

use std::fmt;

use nalgebra::{ComplexField, DMatrix, RealField};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Tol};
use crate::phase_space::{Convention, Multiplier, PhaseSpace};
use crate::torus::TorusExponent;

/// A unitary with exactly one nonzero entry per row and column, each a root
/// of unity. Column `c` is sent to `phases[c] · e_{rows[c]}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactUnitary {
    rows: Vec<usize>,
    phases: Vec<TorusExponent>,
}

impl ExactUnitary {
    pub fn identity(dim: usize) -> Self {
        ExactUnitary {
            rows: (0..dim).collect(),
            phases: vec![TorusExponent::ONE; dim],
        }
    }

    /// From the image of each basis vector; fails unless `rows` is a
    /// permutation.
    pub fn from_columns(rows: Vec<usize>, phases: Vec<TorusExponent>) -> Result<Self> {
        let dim = rows.len();
        if phases.len() != dim {
            return Err(Error::Input("row and phase lists differ in length".into()));
        }
        let mut seen = vec![false; dim];
        for &r in &rows {
            if r >= dim || std::mem::replace(&mut seen[r], true) {
                return Err(Error::Input("not a generalized permutation".into()));
            }
        }
        Ok(ExactUnitary { rows, phases })
    }

    pub fn diagonal(phases: Vec<TorusExponent>) -> Self {
        ExactUnitary {
            rows: (0..phases.len()).collect(),
            phases,
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> Option<TorusExponent> {
        (self.rows[col] == row).then_some(self.phases[col])
    }

    /// `(row, phase)` of column `col`.
    pub fn column(&self, col: usize) -> (usize, TorusExponent) {
        (self.rows[col], self.phases[col])
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(c, &r)| c == r)
    }

    pub fn diagonal_entries(&self) -> Option<&[TorusExponent]> {
        self.is_diagonal().then_some(&self.phases[..])
    }

    pub fn is_identity(&self) -> bool {
        self.is_diagonal() && self.phases.iter().all(|p| p.is_one())
    }

    pub fn mul(&self, rhs: &ExactUnitary) -> ExactUnitary {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch");
        let (rows, phases) = rhs
            .rows
            .iter()
            .zip(&rhs.phases)
            .map(|(&mid, &p)| (self.rows[mid], self.phases[mid] * p))
            .unzip();
        ExactUnitary { rows, phases }
    }

    pub fn adjoint(&self) -> ExactUnitary {
        let dim = self.dim();
        let mut rows = vec![0; dim];
        let mut phases = vec![TorusExponent::ONE; dim];
        for (c, (&r, &p)) in self.rows.iter().zip(&self.phases).enumerate() {
            rows[r] = c;
            phases[r] = p.conj();
        }
        ExactUnitary { rows, phases }
    }

    pub fn scale(&self, s: TorusExponent) -> ExactUnitary {
        ExactUnitary {
            rows: self.rows.clone(),
            phases: self.phases.iter().map(|&p| p * s).collect(),
        }
    }

    /// `c` with `self = c · other`, if one exists.
    pub fn ratio_to(&self, other: &ExactUnitary) -> Option<TorusExponent> {
        if self.rows != other.rows || self.dim() == 0 {
            return None;
        }
        let c = self.phases[0] / other.phases[0];
        self.phases
            .iter()
            .zip(&other.phases)
            .all(|(&a, &b)| a / b == c)
            .then_some(c)
    }

    /// `self ⊗ I_k`, basis `(n, j) ↦ n·k + j`.
    pub fn kron_identity(&self, k: usize) -> ExactUnitary {
        let mut rows = Vec::with_capacity(self.dim() * k);
        let mut phases = Vec::with_capacity(self.dim() * k);
        for (&r, &p) in self.rows.iter().zip(&self.phases) {
            for j in 0..k {
                rows.push(r * k + j);
                phases.push(p);
            }
        }
        ExactUnitary { rows, phases }
    }

    pub fn direct_sum(&self, other: &ExactUnitary) -> ExactUnitary {
        let d = self.dim();
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().map(|r| r + d));
        let mut phases = self.phases.clone();
        phases.extend_from_slice(&other.phases);
        ExactUnitary { rows, phases }
    }

    /// `self · a · self*`, exact.
    pub fn conjugate(&self, a: &ExactUnitary) -> ExactUnitary {
        self.mul(a).mul(&self.adjoint())
    }

    pub fn to_dense<R: RealField + Copy>(&self) -> CMatrix<R> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (c, (&r, &p)) in self.rows.iter().zip(&self.phases).enumerate() {
            m[(r, c)] = p.to_complex();
        }
        m
    }

    /// Recovers an exact monomial matrix from a numeric one.
    pub fn snap<R: RealField + Copy>(m: &CMatrix<R>, modulus: u64, tol: R) -> Option<ExactUnitary> {
        let d = m.nrows();
        let mut rows = Vec::with_capacity(d);
        let mut phases = Vec::with_capacity(d);
        for c in 0..d {
            let mut found = None;
            for r in 0..d {
                let z = m[(r, c)];
                if z.modulus() > tol {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((r, TorusExponent::snap(z, modulus, tol)?));
                }
            }
            let (r, p) = found?;
            rows.push(r);
            phases.push(p);
        }
        Self::from_columns(rows, phases).ok()
    }

    pub fn sparse_entries(&self) -> Vec<SparseEntry> {
        let mut out: Vec<_> = self
            .rows
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(col, (&row, &p))| SparseEntry(row, col, p.numerator(), p.modulus()))
            .collect();
        out.sort();
        out
    }
}

impl fmt::Debug for ExactUnitary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim();
        let rows: Vec<String> = (0..d)
            .map(|r| {
                let cells: Vec<String> = (0..d)
                    .map(|c| self.entry(r, c).map_or_else(|| "0".to_string(), |p| p.to_string()))
                    .collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `(row, col, numerator, modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SparseEntry(pub usize, pub usize, pub u64, pub u64);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMatrixJson {
    pub dim: usize,
    pub entries: Vec<SparseEntry>,
}

impl From<&ExactUnitary> for ExactMatrixJson {
    fn from(u: &ExactUnitary) -> Self {
        ExactMatrixJson {
            dim: u.dim(),
            entries: u.sparse_entries(),
        }
    }
}

impl TryFrom<&ExactMatrixJson> for ExactUnitary {
    type Error = Error;

    fn try_from(j: &ExactMatrixJson) -> Result<Self> {
        let mut rows = vec![usize::MAX; j.dim];
        let mut phases = vec![TorusExponent::ONE; j.dim];
        if j.entries.len() != j.dim {
            return Err(Error::Input("expected one entry per column".into()));
        }
        for &SparseEntry(r, c, k, m) in &j.entries {
            if c >= j.dim || rows[c] != usize::MAX {
                return Err(Error::Input(format!("bad column {c}")));
            }
            rows[c] = r;
            phases[c] = TorusExponent::new(k as i64, m)?;
        }
        ExactUnitary::from_columns(rows, phases)
    }
}

/// `U_{(j,φ)}` on `ℓ²(G)`: column `n` goes to row `n + j` with phase
/// `φ(n)` (or its conjugate under [`Convention::Conjugate`]), i.e.
/// `(U a)(n) = φ(n − j) a(n − j)`.
pub fn weyl_matrix(ps: &PhaseSpace, x: usize) -> Result<ExactUnitary> {
    let conv = ps
        .convention()
        .ok_or_else(|| Error::Precondition("Weyl matrices need a standard multiplier".into()))?;
    let g = ps.base();
    let (shift, chi) = ps.split(x);
    let chi = crate::group::Character { coords: chi.coords };
    let mut rows = Vec::with_capacity(g.order());
    let mut phases = Vec::with_capacity(g.order());
    for n in g.elements() {
        rows.push(g.index_of(&g.add(&n, &shift)));
        let v = g.character_eval(&chi, &n);
        phases.push(match conv {
            Convention::Standard => v,
            Convention::Conjugate => v.conj(),
        });
    }
    ExactUnitary::from_columns(rows, phases)
}

/// A family `x ↦ U_x` over all of `Ξ` with `U_x U_y = m(x,y) U_{x+y}`
/// checked exactly at construction.
#[derive(Clone, Debug)]
pub struct ProjectiveRep<'a> {
    ps: &'a PhaseSpace,
    matrices: Vec<ExactUnitary>,
}

impl<'a> ProjectiveRep<'a> {
    pub fn new(ps: &'a PhaseSpace, matrices: Vec<ExactUnitary>) -> Result<Self> {
        let rep = Self::unchecked(ps, matrices)?;
        if !rep.matrices[0].is_identity() {
            return Err(Error::RepresentationInconsistency("U_0 is not the identity".into()));
        }
        let derived = rep.derive_multiplier()?;
        if derived.table() != ps.multiplier().table() {
            return Err(Error::RepresentationInconsistency(
                "products do not follow the declared multiplier".into(),
            ));
        }
        Ok(rep)
    }

    fn unchecked(ps: &'a PhaseSpace, matrices: Vec<ExactUnitary>) -> Result<Self> {
        if matrices.len() != ps.order() {
            return Err(Error::Input(format!(
                "need {} matrices, got {}",
                ps.order(),
                matrices.len()
            )));
        }
        let d = matrices[0].dim();
        if matrices.iter().any(|u| u.dim() != d) {
            return Err(Error::Input("matrices of different dimensions".into()));
        }
        Ok(ProjectiveRep { ps, matrices })
    }

    /// The representation on `ℓ²(G)` by translations and modulations.
    pub fn schrodinger(ps: &'a PhaseSpace) -> Result<Self> {
        let mats = (0..ps.order())
            .map(|x| weyl_matrix(ps, x))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ps, mats)
    }

    pub fn phase_space(&self) -> &'a PhaseSpace {
        self.ps
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn get(&self, x: usize) -> &ExactUnitary {
        &self.matrices[x]
    }

    pub fn matrices(&self) -> &[ExactUnitary] {
        &self.matrices
    }

    pub fn direct_sum(&self, other: &ProjectiveRep<'a>) -> Result<Self> {
        let mats = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.direct_sum(b))
            .collect();
        Self::new(self.ps, mats)
    }

    /// `x ↦ U_x ⊗ I_k`.
    pub fn tensor_identity(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Input("multiplicity must be at least 1".into()));
        }
        Self::new(self.ps, self.matrices.iter().map(|u| u.kron_identity(k)).collect())
    }

    /// Reads off the scalar `c` in `U_x U_y = c U_{x+y}` for every pair.
    pub fn derive_multiplier(&self) -> Result<Multiplier> {
        let n = self.ps.order();
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let prod = self.matrices[x].mul(&self.matrices[y]);
                let c = prod.ratio_to(&self.matrices[self.ps.add(x, y)]).ok_or_else(|| {
                    Error::RepresentationInconsistency(format!("U_{x} U_{y} is not a scalar multiple of U_(x+y)"))
                })?;
                table.push(c);
            }
        }
        Multiplier::from_table(self.ps.xi(), table)
    }

    /// `α_z(A) = U_z A U_z*`.
    pub fn translation_action<R: RealField + Copy>(&self, z: usize, a: &CMatrix<R>) -> CMatrix<R> {
        let u = self.matrices[z].to_dense::<R>();
        &u * a * u.adjoint()
    }

    pub fn translation_action_exact(&self, z: usize, a: &ExactUnitary) -> ExactUnitary {
        self.matrices[z].conjugate(a)
    }

    pub fn dense<R: RealField + Copy>(&self) -> Vec<CMatrix<R>> {
        self.matrices.iter().map(|u| u.to_dense()).collect()
    }

    /// Irreducible iff the commutant of all `U_x` is one-dimensional.
    pub fn is_irreducible(&self) -> bool {
        crate::algebra::commutant_basis::<f64>(&self.dense(), self.dim(), Tol::standard()).dimension() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteAbelianGroup;

    fn space(n: &[u64]) -> PhaseSpace {
        PhaseSpace::standard(&FiniteAbelianGroup::new(n.to_vec()).unwrap(), Convention::Standard).unwrap()
    }

    fn idx(ps: &PhaseSpace, c: &[i64]) -> usize {
        ps.xi().index_of(&ps.xi().element(c).unwrap())
    }

    #[test]
    fn printed_examples() {
        let ps3 = space(&[3]);
        let u = weyl_matrix(&ps3, idx(&ps3, &[1, 0])).unwrap();
        assert_eq!(format!("{u:?}"), "[[0,0,1],[1,0,0],[0,1,0]]");

        let ps2 = space(&[2]);
        let u = weyl_matrix(&ps2, idx(&ps2, &[1, 1])).unwrap();
        assert_eq!(format!("{u:?}"), "[[0,-1],[1,0]]");
        assert!(weyl_matrix(&ps2, 0).unwrap().is_identity());
    }

    #[test]
    fn derived_multiplier_matches_declared() {
        for n in [&[2][..], &[3], &[2, 2]] {
            let ps = space(n);
            let rep = ProjectiveRep::schrodinger(&ps).unwrap();
            assert_eq!(rep.derive_multiplier().unwrap().table(), ps.multiplier().table());
        }
        let ps = space(&[2]);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let x = idx(&ps, &[1, 1]);
        assert_eq!(rep.derive_multiplier().unwrap().get(x, x), TorusExponent::root(1, 2));
    }

    #[test]
    fn inconsistent_family_is_rejected() {
        let ps = space(&[2]);
        let mut mats: Vec<_> = (0..4).map(|x| weyl_matrix(&ps, x).unwrap()).collect();
        mats[3] = mats[3].scale(TorusExponent::root(1, 4));
        assert!(matches!(
            ProjectiveRep::new(&ps, mats.clone()),
            Err(Error::RepresentationInconsistency(_))
        ));
        mats[3] = weyl_matrix(&ps, 3).unwrap();
        mats[1] = ExactUnitary::identity(2);
        assert!(ProjectiveRep::new(&ps, mats).is_err());
    }

    #[test]
    fn adjoint_relation_and_structure() {
        let ps = space(&[4]);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        for x in 0..ps.order() {
            let u = rep.get(x);
            assert!(u.mul(&u.adjoint()).is_identity());
            let rhs = rep.get(ps.neg(x)).scale(ps.m(x, ps.neg(x)).conj());
            assert_eq!(u.adjoint(), rhs);
            for c in 0..u.dim() {
                assert_eq!(4 % u.column(c).1.modulus(), 0);
            }
        }
    }

    #[test]
    fn translation_action_examples() {
        let ps = space(&[2]);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            num_complex::Complex::new(2.0, 0.0),
            num_complex::Complex::new(5.0, 1.0),
        ]));
        assert_eq!(rep.translation_action(0, &a), a);
        let swapped = rep.translation_action(idx(&ps, &[1, 0]), &a);
        assert_eq!(swapped[(0, 0)], a[(1, 1)]);
        assert_eq!(swapped[(1, 1)], a[(0, 0)]);
        let id = CMatrix::<f64>::identity(2, 2);
        assert_eq!(rep.translation_action(3, &id), id);
    }

    #[test]
    fn translation_action_composes_exactly() {
        let ps = space(&[3]);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let a = rep.get(5).clone();
        for z in 0..9 {
            for w in 0..9 {
                let lhs = rep.translation_action_exact(z, &rep.translation_action_exact(w, &a));
                assert_eq!(lhs, rep.translation_action_exact(ps.add(z, w), &a));
            }
        }
    }

    #[test]
    fn irreducibility_examples() {
        let ps = space(&[2]);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        assert!(rep.is_irreducible());
        assert!(!rep.direct_sum(&rep).unwrap().is_irreducible());
        let trivial = space(&[1]);
        assert!(ProjectiveRep::schrodinger(&trivial).unwrap().is_irreducible());
    }

    #[test]
    fn json_round_trip() {
        let ps = space(&[3]);
        let u = weyl_matrix(&ps, 5).unwrap();
        let j = ExactMatrixJson::from(&u);
        let back = ExactUnitary::try_from(&j).unwrap();
        assert_eq!(back, u);
        let snapped = ExactUnitary::snap(&u.to_dense::<f64>(), 3, 1e-9).unwrap();
        assert_eq!(snapped, u);
    }
}
