//! The representation of a phase space on `H`-covariant functions, for a
//! Lagrangian subgroup `H`.
//!
//! A covariant function is determined by its values on the coset
//! representatives, so `L²(Ξ//H)` is handled in those coordinates: basis
//! vector `b_c` is the covariant function supported on coset `c` with
//! `b_c(γ(c)) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{quotient, QuotientData, Subgroup};
use crate::modular::solve_congruences;
use crate::phase_space::{is_isotropic, is_lagrangian, PhaseSpace};
use crate::torus::TorusExponent;
use crate::weyl::{ExactUnitary, ProjectiveRep};

/// A trivialisation `m(h,h') = α(h+h') / (α(h) α(h'))` on `H`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlphaMap {
    #[serde(skip)]
    subgroup_indices: Vec<usize>,
    /// Values aligned with the sorted elements of `H`.
    values: Vec<TorusExponent>,
    modulus: u64,
}

impl AlphaMap {
    /// `α(h)` for `h` given by its index in `Ξ`.
    pub fn get(&self, h: usize) -> TorusExponent {
        let pos = self.subgroup_indices.binary_search(&h).expect("element of H");
        self.values[pos]
    }

    pub fn values(&self) -> &[TorusExponent] {
        &self.values
    }

    /// Denominator the solve was carried out over.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Exact check of normalisation and the coboundary identity.
    pub fn verify(&self, ps: &PhaseSpace) -> bool {
        let hs = &self.subgroup_indices;
        self.get(0).is_one()
            && hs.iter().all(|&a| {
                hs.iter()
                    .all(|&b| ps.m(a, b) == self.get(ps.add(a, b)) / (self.get(a) * self.get(b)))
            })
    }

    fn times(&self, chi: &[TorusExponent]) -> AlphaMap {
        AlphaMap {
            subgroup_indices: self.subgroup_indices.clone(),
            values: self.values.iter().zip(chi).map(|(&a, &c)| a * c).collect(),
            modulus: self.modulus,
        }
    }
}

fn require_isotropic(ps: &PhaseSpace, h: &Subgroup) -> Result<()> {
    if h.parent() != ps.xi() {
        return Err(Error::Input("subgroup is not a subgroup of Ξ".into()));
    }
    if !is_isotropic(ps, h) {
        return Err(Error::NotIsotropic);
    }
    Ok(())
}

/// One trivialisation, by solving the exponent system
/// `a(h+h') − a(h) − a(h') ≡ e(h,h') (mod M')` for `M' = M, 2M, …,
/// M·exp(H)`.
fn particular_solution(ps: &PhaseSpace, h: &Subgroup) -> Result<AlphaMap> {
    let hs = h.indices();
    let pos = |x: usize| hs.binary_search(&x).expect("closed subgroup");
    let base = ps.modulus();
    for k in 1..=h.exponent() {
        let modulus = base * k;
        let mut a = Vec::with_capacity(hs.len() * hs.len() + 1);
        let mut b = Vec::with_capacity(hs.len() * hs.len() + 1);
        let mut zero_row = vec![0i64; hs.len()];
        zero_row[pos(0)] = 1;
        a.push(zero_row);
        b.push(0);
        for &x in hs {
            for &y in hs {
                let mut row = vec![0i64; hs.len()];
                row[pos(ps.add(x, y))] += 1;
                row[pos(x)] -= 1;
                row[pos(y)] -= 1;
                let rhs = ps
                    .m(x, y)
                    .numerator_over(modulus)
                    .expect("modulus is a multiple of the table's");
                a.push(row);
                b.push(rhs as i64);
            }
        }
        if let Some(sol) = solve_congruences(&a, &b, modulus) {
            let alpha = AlphaMap {
                subgroup_indices: hs.to_vec(),
                values: sol.iter().map(|&v| TorusExponent::root(v, modulus)).collect(),
                modulus,
            };
            if !alpha.verify(ps) {
                return Err(Error::InvariantViolation(
                    "congruence solution fails the coboundary identity".into(),
                ));
            }
            return Ok(alpha);
        }
    }
    Err(Error::InvariantViolation(
        "no trivialisation found at the maximal modulus".into(),
    ))
}

/// Every trivialisation on `H`, sorted lexicographically by value vector.
///
/// Two trivialisations differ by a character of `H`, and every character of
/// `H` is the restriction of a character of `Ξ`, so there are exactly `|H|`.
pub fn all_trivializations(ps: &PhaseSpace, h: &Subgroup) -> Result<Vec<AlphaMap>> {
    require_isotropic(ps, h)?;
    let alpha = particular_solution(ps, h)?;
    let xi = ps.xi();
    let mut chars: Vec<Vec<TorusExponent>> = xi
        .characters()
        .map(|chi| h.elements().iter().map(|x| xi.character_eval(&chi, x)).collect())
        .collect();
    chars.sort();
    chars.dedup();
    if chars.len() != h.order() {
        return Err(Error::InvariantViolation(
            "character count of H differs from |H|".into(),
        ));
    }
    let mut all: Vec<AlphaMap> = chars.iter().map(|chi| alpha.times(chi)).collect();
    all.sort_by(|a, b| a.values.cmp(&b.values));
    Ok(all)
}

/// The lexicographically least trivialisation on an isotropic `H`.
pub fn trivialize_on_subgroup(ps: &PhaseSpace, h: &Subgroup) -> Result<AlphaMap> {
    Ok(all_trivializations(ps, h)?.swap_remove(0))
}

/// `Φ(x) = conj(α(x − γ(x+H)) · m(x − γ(x+H), γ(x+H)))` over all of `Ξ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiMap {
    values: Vec<TorusExponent>,
}

impl PhiMap {
    pub fn get(&self, x: usize) -> TorusExponent {
        self.values[x]
    }

    pub fn values(&self) -> &[TorusExponent] {
        &self.values
    }

    /// `Φ(x+h) · α(h) · m(h,x) = Φ(x)` for all `x ∈ Ξ`, `h ∈ H`.
    pub fn satisfies_functional_equation(&self, ps: &PhaseSpace, h: &Subgroup, alpha: &AlphaMap) -> bool {
        (0..ps.order()).all(|x| {
            h.indices()
                .iter()
                .all(|&y| self.values[ps.add(x, y)] * alpha.get(y) * ps.m(y, x) == self.values[x])
        })
    }
}

pub fn phi_map(ps: &PhaseSpace, h: &Subgroup, alpha: &AlphaMap, q: &QuotientData) -> Result<PhiMap> {
    let values = (0..ps.order())
        .map(|x| {
            let g = q.rep_index(q.coset(x));
            let d = ps.sub(x, g);
            (alpha.get(d) * ps.m(d, g)).conj()
        })
        .collect();
    let phi = PhiMap { values };
    if !phi.satisfies_functional_equation(ps, h, alpha) {
        return Err(Error::InvariantViolation("Φ fails its functional equation".into()));
    }
    Ok(phi)
}

/// `L²(Ξ//H)` in coset-representative coordinates.
#[derive(Clone, Debug)]
pub struct CovariantSpace<'a> {
    ps: &'a PhaseSpace,
    subgroup: Subgroup,
    alpha: AlphaMap,
    quotient: QuotientData,
    phi: PhiMap,
}

impl<'a> CovariantSpace<'a> {
    /// Uses the lexicographically least trivialisation.
    pub fn new(ps: &'a PhaseSpace, h: &Subgroup) -> Result<Self> {
        if !is_lagrangian(ps, h)? {
            return Err(Error::Precondition("subgroup is not Lagrangian".into()));
        }
        let alpha = trivialize_on_subgroup(ps, h)?;
        Self::with_alpha(ps, h, alpha)
    }

    pub fn with_alpha(ps: &'a PhaseSpace, h: &Subgroup, alpha: AlphaMap) -> Result<Self> {
        if !is_lagrangian(ps, h)? {
            return Err(Error::Precondition("subgroup is not Lagrangian".into()));
        }
        if !alpha.verify(ps) || alpha.subgroup_indices != h.indices() {
            return Err(Error::Precondition("α is not a trivialisation on this subgroup".into()));
        }
        let quotient = quotient(ps.xi(), h)?;
        let phi = phi_map(ps, h, &alpha, &quotient)?;
        Ok(CovariantSpace {
            ps,
            subgroup: h.clone(),
            alpha,
            quotient,
            phi,
        })
    }

    pub fn phase_space(&self) -> &'a PhaseSpace {
        self.ps
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn alpha(&self) -> &AlphaMap {
        &self.alpha
    }

    pub fn quotient(&self) -> &QuotientData {
        &self.quotient
    }

    pub fn phi(&self) -> &PhiMap {
        &self.phi
    }

    pub fn dim(&self) -> usize {
        self.quotient.len()
    }

    /// Writes `x` as `γ(c) + h`.
    fn decompose(&self, x: usize) -> (usize, usize) {
        let c = self.quotient.coset(x);
        (c, self.ps.sub(x, self.quotient.rep_index(c)))
    }

    /// Covariant extension factor: `f(γ(c)+h) = conj(α(h) m(h, γ(c))) f(γ(c))`.
    fn extension(&self, c: usize, h: usize) -> TorusExponent {
        (self.alpha.get(h) * self.ps.m(h, self.quotient.rep_index(c))).conj()
    }

    /// Values of `b_c` on all of `Ξ` (`None` off the coset).
    pub fn basis_function(&self, c: usize) -> Vec<Option<TorusExponent>> {
        (0..self.ps.order())
            .map(|x| {
                let (cx, h) = self.decompose(x);
                (cx == c).then(|| self.extension(c, h))
            })
            .collect()
    }

    /// Extending over `h` then `h'` agrees with extending over `h + h'`
    /// from every point of `Ξ`.
    pub fn covariance_is_consistent(&self) -> bool {
        let ps = self.ps;
        let step = |x: usize, h: usize| (self.alpha.get(h) * ps.m(h, x)).conj();
        let hs = self.subgroup.indices();
        (0..ps.order()).all(|x| {
            hs.iter().all(|&h| {
                hs.iter()
                    .all(|&k| step(ps.add(x, h), k) * step(x, h) == step(x, ps.add(h, k)))
            })
        })
    }

    /// Matrix of `U_x f(t) = m(t,x) f(t+x)` in the basis `b_c`, reducing
    /// `γ(c') + x` to its representative with the covariance rule.
    pub fn weyl_matrix(&self, x: usize) -> ExactUnitary {
        let d = self.dim();
        let mut rows = vec![0; d];
        let mut phases = vec![TorusExponent::ONE; d];
        for row in 0..d {
            let t = self.quotient.rep_index(row);
            let (c, h) = self.decompose(self.ps.add(t, x));
            rows[c] = row;
            phases[c] = self.ps.m(t, x) * self.extension(c, h);
        }
        ExactUnitary::from_columns(rows, phases).expect("translation permutes cosets")
    }

    /// The full representation `x ↦ U_x` on `L²(Ξ//H)`.
    pub fn representation(&self) -> Result<ProjectiveRep<'a>> {
        ProjectiveRep::new(self.ps, (0..self.ps.order()).map(|x| self.weyl_matrix(x)).collect())
    }

    /// `A_Φ` in these coordinates: `diag(Φ(γ(c)))`.
    pub fn a_phi(&self) -> ExactUnitary {
        ExactUnitary::diagonal(
            (0..self.dim())
                .map(|c| self.phi.get(self.quotient.rep_index(c)))
                .collect(),
        )
    }

    /// `A_Φ` is unitary from `L²(Ξ/H)` onto `L²(Ξ//H)`: it sends the
    /// indicator of each coset to a unimodular covariant function, and
    /// `conj(Φ)·f` is `H`-invariant for every covariant `f`, so `A_Φ A_Φ*`
    /// fixes each `b_c`.
    pub fn a_phi_is_unitary(&self) -> bool {
        let ps = self.ps;
        (0..self.dim()).all(|c| {
            let b = self.basis_function(c);
            (0..ps.order()).all(|x| match b[x] {
                // A_Φ* b_c at the coset of x, evaluated through x
                Some(v) => (self.phi.get(x).conj() * v) == (self.phi.get(self.quotient.rep_index(c)).conj()),
                None => self.quotient.coset(x) != c,
            })
        }) && self.a_phi().mul(&self.a_phi().adjoint()).is_identity()
    }

    /// Closed form of `A_Φ* U_x A_Φ` on `L²(Ξ/H)`:
    /// `f(t+H) ↦ Φ(t+x)/Φ(t) · m(t,x) · f(t+x+H)`. Evaluates the
    /// coefficient at every `t` and fails unless it is constant on cosets.
    pub fn transported_action(&self, x: usize) -> Result<ExactUnitary> {
        let ps = self.ps;
        let d = self.dim();
        let mut rows = vec![usize::MAX; d];
        let mut phases = vec![TorusExponent::ONE; d];
        for t in 0..ps.order() {
            let row = self.quotient.coset(t);
            let tx = ps.add(t, x);
            let col = self.quotient.coset(tx);
            let coef = self.phi.get(tx) / self.phi.get(t) * ps.m(t, x);
            if rows[col] == usize::MAX {
                rows[col] = row;
                phases[col] = coef;
            } else if rows[col] != row || phases[col] != coef {
                return Err(Error::InvariantViolation(format!(
                    "transported coefficient for x = {x} is not H-invariant"
                )));
            }
        }
        ExactUnitary::from_columns(rows, phases)
    }

    /// `A_Φ* · U_x · A_Φ` computed by exact matrix products.
    pub fn conjugated_by_a_phi(&self, x: usize) -> ExactUnitary {
        let a = self.a_phi();
        a.adjoint().mul(&self.weyl_matrix(x)).mul(&a)
    }

    /// `(1/α(h)) σ(t+H, h)` for each coset, `h ∈ H`.
    pub fn diagonal_h_action(&self, h: usize) -> Vec<TorusExponent> {
        (0..self.dim())
            .map(|c| self.alpha.get(h).conj() * self.ps.sigma(self.quotient.rep_index(c), h))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{generated_subgroup, FiniteAbelianGroup};
    use crate::phase_space::{enumerate_lagrangians, Convention};

    fn space(n: &[u64], c: Convention) -> PhaseSpace {
        PhaseSpace::standard(&FiniteAbelianGroup::new(n.to_vec()).unwrap(), c).unwrap()
    }

    fn sub(ps: &PhaseSpace, gens: &[&[i64]]) -> Subgroup {
        let gens: Vec<_> = gens.iter().map(|c| ps.xi().element(c).unwrap()).collect();
        generated_subgroup(ps.xi(), &gens).unwrap()
    }

    fn idx(ps: &PhaseSpace, c: &[i64]) -> usize {
        ps.xi().index_of(&ps.xi().element(c).unwrap())
    }

    /// Independent oracle: try every tuple of `M'`-th roots, escalating
    /// `M'` exactly as the solver does, and keep the least valid one.
    fn brute_force_alpha(ps: &PhaseSpace, h: &Subgroup) -> Option<Vec<TorusExponent>> {
        let hs = h.indices();
        for k in 1..=h.exponent() {
            let modulus = ps.modulus() * k;
            let free = hs.len() - 1;
            let total = (modulus as usize).pow(free as u32);
            let mut best: Option<Vec<TorusExponent>> = None;
            for code in 0..total {
                let mut c = code;
                let mut vals = vec![TorusExponent::ONE];
                for _ in 0..free {
                    vals.push(TorusExponent::root((c % modulus as usize) as u64, modulus));
                    c /= modulus as usize;
                }
                let at = |x: usize| vals[hs.binary_search(&x).unwrap()];
                let ok = hs
                    .iter()
                    .all(|&a| hs.iter().all(|&b| ps.m(a, b) == at(ps.add(a, b)) / (at(a) * at(b))));
                if ok && best.as_ref().is_none_or(|b| vals < *b) {
                    best = Some(vals);
                }
            }
            if best.is_some() {
                return best;
            }
        }
        None
    }

    #[test]
    fn alpha_examples() {
        let ps = space(&[2], Convention::Standard);
        let h1 = sub(&ps, &[&[1, 0]]);
        assert!(trivialize_on_subgroup(&ps, &h1)
            .unwrap()
            .values()
            .iter()
            .all(|v| v.is_one()));

        let h3 = sub(&ps, &[&[1, 1]]);
        let alpha = trivialize_on_subgroup(&ps, &h3).unwrap();
        assert_eq!(alpha.get(idx(&ps, &[1, 1])), TorusExponent::root(1, 4));
        assert_eq!(alpha.modulus(), 4);

        let ps3 = space(&[3], Convention::Standard);
        let h2 = sub(&ps3, &[&[0, 1]]);
        assert!(trivialize_on_subgroup(&ps3, &h2)
            .unwrap()
            .values()
            .iter()
            .all(|v| v.is_one()));
    }

    #[test]
    fn alpha_rejects_non_isotropic() {
        let ps = space(&[2], Convention::Standard);
        let all = sub(&ps, &[&[1, 0], &[0, 1]]);
        assert!(matches!(trivialize_on_subgroup(&ps, &all), Err(Error::NotIsotropic)));
    }

    #[test]
    fn alpha_matches_brute_force() {
        for (orders, conv) in [
            (&[2][..], Convention::Standard),
            (&[2], Convention::Conjugate),
            (&[3], Convention::Standard),
            (&[4], Convention::Standard),
            (&[4], Convention::Conjugate),
            (&[2, 2], Convention::Standard),
        ] {
            let ps = space(orders, conv);
            for h in enumerate_lagrangians(&ps).unwrap() {
                let solved = trivialize_on_subgroup(&ps, &h).unwrap();
                assert!(solved.verify(&ps));
                assert_eq!(Some(solved.values().to_vec()), brute_force_alpha(&ps, &h), "{h}");
            }
        }
    }

    #[test]
    fn isotropic_non_lagrangian_subgroups_trivialize() {
        let ps = space(&[4], Convention::Standard);
        let h = sub(&ps, &[&[2, 0]]);
        let all = all_trivializations(&ps, &h).unwrap();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|a| a.verify(&ps)));
    }

    #[test]
    fn phi_examples() {
        let ps = space(&[2], Convention::Standard);
        let h2 = sub(&ps, &[&[0, 1]]);
        let cs = CovariantSpace::new(&ps, &h2).unwrap();
        assert_eq!(
            cs.quotient().coset_reps,
            vec![ps.xi().element(&[0, 0]).unwrap(), ps.xi().element(&[1, 0]).unwrap()]
        );
        assert_eq!(cs.phi().get(idx(&ps, &[1, 1])), TorusExponent::root(1, 2));
        for c in 0..cs.dim() {
            assert!(cs.phi().get(cs.quotient().rep_index(c)).is_one());
        }
    }

    #[test]
    fn canonical_matrices() {
        let ps = space(&[2], Convention::Standard);
        let h2 = sub(&ps, &[&[0, 1]]);
        let cs = CovariantSpace::new(&ps, &h2).unwrap();
        assert!(cs.weyl_matrix(0).is_identity());
        let u = cs.weyl_matrix(idx(&ps, &[0, 1]));
        assert_eq!(
            u.diagonal_entries().unwrap(),
            &[TorusExponent::ONE, TorusExponent::root(1, 2)]
        );
        assert_eq!(cs.diagonal_h_action(idx(&ps, &[0, 1])), u.diagonal_entries().unwrap());
    }

    #[test]
    fn machinery_holds_for_every_lagrangian() {
        for (orders, conv) in [
            (&[2][..], Convention::Standard),
            (&[3], Convention::Standard),
            (&[3], Convention::Conjugate),
            (&[4], Convention::Standard),
            (&[2, 2], Convention::Standard),
        ] {
            let ps = space(orders, conv);
            for h in enumerate_lagrangians(&ps).unwrap() {
                let cs = CovariantSpace::new(&ps, &h).unwrap();
                assert_eq!(cs.dim(), h.order());
                assert!(cs.covariance_is_consistent());
                assert!(cs.a_phi_is_unitary());
                let rep = cs.representation().unwrap();
                for x in 0..ps.order() {
                    let closed = cs.transported_action(x).unwrap();
                    assert_eq!(closed, cs.conjugated_by_a_phi(x));
                    assert_eq!(closed, rep.get(x).clone());
                }
                for &hh in h.indices() {
                    assert_eq!(
                        cs.transported_action(hh).unwrap().diagonal_entries().unwrap(),
                        &cs.diagonal_h_action(hh)[..]
                    );
                }
                assert!(rep.is_irreducible());
            }
        }
    }

    #[test]
    fn non_lagrangian_is_rejected() {
        let ps = space(&[4], Convention::Standard);
        let h = sub(&ps, &[&[2, 0]]);
        assert!(matches!(CovariantSpace::new(&ps, &h), Err(Error::Precondition(_))));
    }

    #[test]
    fn every_alpha_choice_builds_a_representation() {
        let ps = space(&[3], Convention::Standard);
        for h in enumerate_lagrangians(&ps).unwrap() {
            let all = all_trivializations(&ps, &h).unwrap();
            assert_eq!(all.len(), 3);
            for alpha in all {
                let cs = CovariantSpace::with_alpha(&ps, &h, alpha).unwrap();
                cs.representation().unwrap();
            }
        }
    }
}
