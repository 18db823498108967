//! Operator algebras attached to projective representations: commutants,
//! spans of Weyl operators, Gelfand spectra and the transform onto
//! functions on `Ξ/H`, intertwiners, and the `ℓ²(G) ⊗ C^k` extension.

use nalgebra::{ComplexField, DMatrix, RealField};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::CovariantSpace;
use crate::error::{Error, Result};
use crate::group::Subgroup;
use crate::linalg::{
    frobenius, hermitian_eigen, kron, nullspace, off_diagonal, projection_residual, unvectorize, vectorize, CMatrix,
    CVector, Tol,
};
use crate::weyl::ProjectiveRep;

/// Retries of the generic-element draw before giving up.
pub const MAX_SPECTRUM_ATTEMPTS: u64 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Commutant,
    Span,
    Full,
}

/// A subspace of `d × d` matrices with a basis that is orthonormal under
/// the trace inner product.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra<R: RealField + Copy> {
    dim: usize,
    basis: Vec<CMatrix<R>>,
    provenance: Provenance,
}

fn zero<R: RealField + Copy>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

fn real<R: RealField + Copy>(v: f64) -> R {
    nalgebra::convert(v)
}

fn identity<R: RealField + Copy>(d: usize) -> CMatrix<R> {
    CMatrix::identity(d, d)
}

impl<R: RealField + Copy> OperatorAlgebra<R> {
    fn from_vectors(dim: usize, vectors: Vec<CVector<R>>, provenance: Provenance) -> Self {
        let basis = vectors.iter().map(|v| unvectorize(v, dim, dim)).collect();
        OperatorAlgebra { dim, basis, provenance }
    }

    /// All `d × d` matrices.
    pub fn full(dim: usize) -> Self {
        let mut basis = Vec::with_capacity(dim * dim);
        for c in 0..dim {
            for r in 0..dim {
                let mut m = CMatrix::zeros(dim, dim);
                m[(r, c)] = Complex::new(R::one(), R::zero());
                basis.push(m);
            }
        }
        OperatorAlgebra {
            dim,
            basis,
            provenance: Provenance::Full,
        }
    }

    /// Size of the matrices.
    pub fn matrix_dim(&self) -> usize {
        self.dim
    }

    /// Dimension as a vector space.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix<R>] {
        &self.basis
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    fn vectors(&self) -> Vec<CVector<R>> {
        self.basis.iter().map(vectorize).collect()
    }

    /// Distance from `a` to the algebra in Frobenius norm.
    pub fn residual(&self, a: &CMatrix<R>) -> R {
        projection_residual(&self.vectors(), &vectorize(a))
    }

    /// Orthogonal projection of `a` onto the algebra.
    pub fn project(&self, a: &CMatrix<R>) -> CMatrix<R> {
        let v = vectorize(a);
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            let coef = vectorize(b).dotc(&v);
            out += b * coef;
        }
        out
    }

    /// Largest distance of a basis element of either algebra from the other.
    pub fn mutual_residual(&self, other: &OperatorAlgebra<R>) -> R {
        let one = self.basis.iter().map(|b| other.residual(b));
        let two = other.basis.iter().map(|b| self.residual(b));
        one.chain(two).fold(R::zero(), |m, r| m.max(r))
    }

    /// Largest `‖B_i B_j − B_j B_i‖` over basis pairs.
    pub fn commutator_residual(&self) -> R {
        let mut worst = R::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(frobenius(&(a * b - b * a)));
            }
        }
        worst
    }

    pub fn is_commutative(&self, tol: Tol<R>) -> bool {
        self.commutator_residual() < tol.residual
    }

    /// Largest distance of a product or adjoint of basis elements from the
    /// span.
    pub fn closure_residual(&self) -> R {
        let vectors = self.vectors();
        let mut worst = R::zero();
        for a in &self.basis {
            worst = worst.max(projection_residual(&vectors, &vectorize(&a.adjoint())));
            for b in &self.basis {
                worst = worst.max(projection_residual(&vectors, &vectorize(&(a * b))));
            }
        }
        worst
    }

    pub fn adjoint_residual(&self) -> R {
        let vectors = self.vectors();
        self.basis
            .iter()
            .map(|a| projection_residual(&vectors, &vectorize(&a.adjoint())))
            .fold(R::zero(), |m, r| m.max(r))
    }

    /// The commutant of the algebra itself.
    pub fn commutant(&self, tol: Tol<R>) -> OperatorAlgebra<R> {
        commutant_basis(&self.basis, self.dim, tol)
    }

    /// Commutative and equal to its own commutant.
    pub fn is_maximal_abelian(&self, tol: Tol<R>) -> bool {
        if !self.is_commutative(tol) {
            return false;
        }
        let c = self.commutant(tol);
        c.dimension() == self.dimension() && c.mutual_residual(self) < tol.residual
    }

    /// `Σ c_i B_i` with independent uniform coefficients in the unit square.
    pub fn random_element(&self, rng: &mut impl Rng) -> CMatrix<R> {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            let coef = Complex::new(
                real::<R>(rng.random_range(-1.0..1.0)),
                real(rng.random_range(-1.0..1.0)),
            );
            out += b * coef;
        }
        out
    }
}

/// Stacks `A ↦ U A − A U` for every `U` (column-major vectorisation).
fn commutation_system<R: RealField + Copy>(unitaries: &[CMatrix<R>], dim: usize) -> CMatrix<R> {
    let n = dim * dim;
    let id = identity::<R>(dim);
    let mut system = CMatrix::zeros(n * unitaries.len(), n);
    for (k, u) in unitaries.iter().enumerate() {
        let block = kron(&id, u) - kron(&u.transpose(), &id);
        system.view_mut((k * n, 0), (n, n)).copy_from(&block);
    }
    system
}

/// Orthonormal basis of `{ A : U A = A U for every U in unitaries }`.
pub fn commutant_basis<R: RealField + Copy>(unitaries: &[CMatrix<R>], dim: usize, tol: Tol<R>) -> OperatorAlgebra<R> {
    if unitaries.is_empty() {
        let mut full = OperatorAlgebra::full(dim);
        full.provenance = Provenance::Commutant;
        return full;
    }
    let system = commutation_system(unitaries, dim);
    OperatorAlgebra::from_vectors(dim, nullspace(&system, tol), Provenance::Commutant)
}

/// Commutant of `{U_h : h ∈ H}`, using the generators of `H`.
pub fn subgroup_commutant<R: RealField + Copy>(
    rep: &ProjectiveRep<'_>,
    h: &Subgroup,
    tol: Tol<R>,
) -> OperatorAlgebra<R> {
    let xi = rep.phase_space().xi();
    let gens: Vec<CMatrix<R>> = h
        .generators()
        .iter()
        .map(|g| rep.get(xi.index_of(g)).to_dense())
        .collect();
    commutant_basis(&gens, rep.dim(), tol)
}

/// Orthonormal basis of `span{U_x : x ∈ S}`.
pub fn span_basis<R: RealField + Copy>(rep: &ProjectiveRep<'_>, s: &Subgroup, tol: Tol<R>) -> OperatorAlgebra<R> {
    let vectors: Vec<CVector<R>> = s
        .indices()
        .iter()
        .map(|&x| vectorize(&rep.get(x).to_dense::<R>()))
        .collect();
    OperatorAlgebra::from_vectors(rep.dim(), crate::linalg::span(&vectors, tol), Provenance::Span)
}

/// A character of a commutative algebra: the joint eigenvalue on one
/// common eigenspace.
#[derive(Clone, Debug)]
pub struct SpectrumPoint<R: RealField + Copy> {
    /// Eigenvalue of each basis element.
    pub values: Vec<Complex<R>>,
    /// Orthogonal projector onto the joint eigenspace.
    pub projector: CMatrix<R>,
    /// Coset of `Ξ/H` the point corresponds to, once labelled.
    pub coset: Option<usize>,
}

impl<R: RealField + Copy> SpectrumPoint<R> {
    /// `χ(A) = tr(P A) / tr(P)`.
    pub fn eval(&self, a: &CMatrix<R>) -> Complex<R> {
        (&self.projector * a).trace() / self.projector.trace()
    }

    pub fn multiplicity(&self) -> usize {
        let t = self.projector.trace().re;
        num_traits::ToPrimitive::to_f64(&nalgebra::try_convert::<R, f64>(t).unwrap_or(0.0))
            .map_or(0, |v| v.round() as usize)
    }
}

#[derive(Clone, Debug)]
pub struct GelfandData<R: RealField + Copy> {
    pub points: Vec<SpectrumPoint<R>>,
    /// Seed of the draw that succeeded.
    pub seed: u64,
    pub attempts: u64,
}

impl<R: RealField + Copy> GelfandData<R> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Attaches coset labels by transforming each spectral projector,
    /// which must come out as the indicator of a single coset.
    pub fn label(&mut self, transform: &GelfandTransform<'_, R>, tol: Tol<R>) -> Result<()> {
        for p in &mut self.points {
            let f = transform.transform(&p.projector)?;
            let (best, _) =
                f.iter().enumerate().fold(
                    (0, R::zero()),
                    |acc, (i, z)| if z.modulus() > acc.1 { (i, z.modulus()) } else { acc },
                );
            let clean = f.iter().enumerate().all(|(i, z)| {
                let target = if i == best {
                    Complex::new(R::one(), R::zero())
                } else {
                    zero()
                };
                (z - target).modulus() < tol.residual
            });
            if !clean {
                return Err(Error::TheoremViolation(
                    "a spectral projector is not a coset indicator".into(),
                ));
            }
            p.coset = Some(best);
        }
        Ok(())
    }
}

fn cmp_complex<R: RealField + Copy>(a: &Complex<R>, b: &Complex<R>, eps: R) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    let by = |x: R, y: R| {
        if (x - y).abs() <= eps {
            Ordering::Equal
        } else if x < y {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    };
    by(a.re, b.re).then_with(|| by(a.im, b.im))
}

fn cmp_values<R: RealField + Copy>(a: &[Complex<R>], b: &[Complex<R>], eps: R) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| cmp_complex(x, y, eps))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Splits `frame` (orthonormal columns) into blocks on which every matrix
/// in `mats` acts as a scalar.
fn refine<R: RealField + Copy>(
    mats: &[CMatrix<R>],
    frame: CMatrix<R>,
    rng: &mut ChaCha8Rng,
    tol: Tol<R>,
    depth: usize,
) -> Option<Vec<CMatrix<R>>> {
    let k = frame.ncols();
    let compressed: Vec<CMatrix<R>> = mats.iter().map(|m| frame.adjoint() * m * &frame).collect();
    let scalar = compressed.iter().all(|c| {
        let mean = c.trace() / Complex::new(real::<R>(k as f64), R::zero());
        frobenius(&(c - identity::<R>(k) * mean)) < tol.residual
    });
    if scalar {
        return Some(vec![frame]);
    }
    if depth == 0 || k == 1 {
        return None;
    }
    let mut generic = CMatrix::zeros(k, k);
    for c in &compressed {
        let h = (c + c.adjoint()) * Complex::new(real::<R>(0.5), R::zero());
        let s = (c - c.adjoint()) * Complex::new(R::zero(), real::<R>(-0.5));
        generic += h * Complex::new(real::<R>(rng.random_range(-1.0..1.0)), R::zero());
        generic += s * Complex::new(real::<R>(rng.random_range(-1.0..1.0)), R::zero());
    }
    let (values, vectors) = hermitian_eigen(&generic);
    let spread = values.iter().fold(R::zero(), |m, v| m.max(v.abs())).max(R::one());
    let gap = spread * real::<R>(1e-6);
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > gap {
            let sub = &frame * vectors.columns(start, i - start);
            if i - start == k {
                // no split: the draw was degenerate on this block
                return None;
            }
            blocks.extend(refine(mats, sub, rng, tol, depth - 1)?);
            start = i;
        }
    }
    Some(blocks)
}

/// Joint eigenspaces of a commutative `*`-closed algebra, found by
/// diagonalising random self-adjoint elements and refining blocks until
/// every basis element is scalar on each.
pub fn gelfand_spectrum<R: RealField + Copy>(
    alg: &OperatorAlgebra<R>,
    seed: u64,
    tol: Tol<R>,
) -> Result<GelfandData<R>> {
    if !alg.is_commutative(tol) {
        return Err(Error::Precondition("algebra is not commutative".into()));
    }
    if alg.adjoint_residual() >= tol.residual {
        return Err(Error::Precondition("algebra is not closed under adjoints".into()));
    }
    let d = alg.matrix_dim();
    let mut last = String::new();
    for attempt in 0..MAX_SPECTRUM_ATTEMPTS {
        let s = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let Some(blocks) = refine(alg.basis(), identity::<R>(d), &mut rng, tol, 8) else {
            last = format!("seed {s}: blocks did not separate");
            continue;
        };
        let frame_residual = blocks
            .iter()
            .flat_map(|q| alg.basis().iter().map(move |b| off_block(q, b)))
            .fold(R::zero(), |m: R, r| m.max(r));
        if frame_residual >= tol.residual {
            last = format!("seed {s}: off-block residual {frame_residual}");
            continue;
        }
        let mut points: Vec<SpectrumPoint<R>> = blocks
            .into_iter()
            .map(|q| {
                let projector = &q * q.adjoint();
                let tr = projector.trace();
                let values = alg.basis().iter().map(|b| (&projector * b).trace() / tr).collect();
                SpectrumPoint {
                    values,
                    projector,
                    coset: None,
                }
            })
            .collect();
        let eps = real::<R>(1e-7);
        points.sort_by(|a, b| cmp_values(&a.values, &b.values, eps));
        let mut merged: Vec<SpectrumPoint<R>> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(q) if cmp_values(&q.values, &p.values, eps).is_eq() => q.projector += p.projector,
                _ => merged.push(p),
            }
        }
        return Ok(GelfandData {
            points: merged,
            seed: s,
            attempts: attempt + 1,
        });
    }
    Err(Error::Degeneracy(format!(
        "no joint diagonal form after {MAX_SPECTRUM_ATTEMPTS} draws ({last})"
    )))
}

/// `‖B − P B P − (I−P) B (I−P)‖` for `P` the projector onto the columns
/// of `q`.
fn off_block<R: RealField + Copy>(q: &CMatrix<R>, b: &CMatrix<R>) -> R {
    let p = q * q.adjoint();
    let comp = identity::<R>(p.nrows()) - &p;
    frobenius(&(b - &p * b * &p - &comp * b * &comp))
}

/// The solution space of `V U_x = U'_x V` for all `x`.
#[derive(Clone, Debug)]
pub struct Intertwiner<R: RealField + Copy> {
    pub dimension: usize,
    /// Present when the space is one-dimensional: the unitary solution
    /// whose first nonzero entry (column-major) is positive real.
    pub unitary: Option<CMatrix<R>>,
}

pub fn intertwiner<R: RealField + Copy>(
    rep1: &ProjectiveRep<'_>,
    rep2: &ProjectiveRep<'_>,
    tol: Tol<R>,
) -> Result<Intertwiner<R>> {
    if rep1.phase_space().multiplier().table() != rep2.phase_space().multiplier().table() {
        return Err(Error::Precondition(
            "representations carry different multipliers".into(),
        ));
    }
    let (d1, d2) = (rep1.dim(), rep2.dim());
    if d1 != d2 {
        return Err(Error::Precondition("representations have different dimensions".into()));
    }
    let n = d1 * d2;
    let count = rep1.matrices().len();
    let id1 = identity::<R>(d1);
    let id2 = identity::<R>(d2);
    let mut system = CMatrix::zeros(n * count, n);
    for x in 0..count {
        let u = rep1.get(x).to_dense::<R>();
        let v = rep2.get(x).to_dense::<R>();
        let block = kron(&u.transpose(), &id2) - kron(&id1, &v);
        system.view_mut((x * n, 0), (n, n)).copy_from(&block);
    }
    let solutions = nullspace(&system, tol);
    match solutions.len() {
        0 => Err(Error::Inequivalent),
        1 => {
            let mut v = unvectorize(&solutions[0], d2, d1);
            let scale = real::<R>(d1 as f64).sqrt() / frobenius(&v);
            v *= Complex::new(scale, R::zero());
            if let Some(z) = v.iter().find(|z| z.modulus() > tol.residual).copied() {
                v *= z.conj() / Complex::new(z.modulus(), R::zero());
            }
            let unitarity = frobenius(&(v.adjoint() * &v - identity::<R>(d1)));
            if unitarity >= tol.residual {
                return Err(Error::InvariantViolation(format!(
                    "one-dimensional intertwiner space is not spanned by a unitary (residual {unitarity})"
                )));
            }
            Ok(Intertwiner {
                dimension: 1,
                unitary: Some(v),
            })
        }
        k => Ok(Intertwiner {
            dimension: k,
            unitary: None,
        }),
    }
}

/// Commutant of `{U_h ⊗ I_k : h ∈ H}`.
pub fn tensor_commutant<R: RealField + Copy>(
    rep: &ProjectiveRep<'_>,
    k: usize,
    h: &Subgroup,
    tol: Tol<R>,
) -> Result<OperatorAlgebra<R>> {
    let t = rep.tensor_identity(k)?;
    Ok(subgroup_commutant(&t, h, tol))
}

/// Transport of commutant elements of a reference representation onto
/// multiplication operators on `L²(Ξ/H)`: along the intertwiner into
/// `L²(Ξ//H)`, then along `A_Φ*`.
#[derive(Clone, Debug)]
pub struct GelfandTransform<'a, R: RealField + Copy> {
    reference: ProjectiveRep<'a>,
    space: CovariantSpace<'a>,
    /// `A_Φ* V`.
    w: CMatrix<R>,
    tol: Tol<R>,
}

impl<'a, R: RealField + Copy> GelfandTransform<'a, R> {
    pub fn new(reference: ProjectiveRep<'a>, space: CovariantSpace<'a>, tol: Tol<R>) -> Result<Self> {
        let canonical = space.representation()?;
        let v = intertwiner::<R>(&reference, &canonical, tol)?
            .unitary
            .ok_or_else(|| Error::TheoremViolation("intertwiner is not unique up to scale".into()))?;
        let w = space.a_phi().adjoint().to_dense::<R>() * v;
        Ok(GelfandTransform {
            reference,
            space,
            w,
            tol,
        })
    }

    pub fn space(&self) -> &CovariantSpace<'a> {
        &self.space
    }

    pub fn reference(&self) -> &ProjectiveRep<'a> {
        &self.reference
    }

    /// `A_Φ* V`, from the reference space to `L²(Ξ/H)`.
    pub fn unitary(&self) -> &CMatrix<R> {
        &self.w
    }

    /// Largest `‖U_h A − A U_h‖` over generators of `H`.
    pub fn commutation_residual(&self, a: &CMatrix<R>, k: usize) -> R {
        let xi = self.space.phase_space().xi();
        self.space
            .subgroup()
            .generators()
            .iter()
            .map(|g| {
                let u = kron(&self.reference.get(xi.index_of(g)).to_dense::<R>(), &identity::<R>(k));
                frobenius(&(&u * a - a * &u))
            })
            .fold(R::zero(), |m, r| m.max(r))
    }

    fn transport(&self, a: &CMatrix<R>, k: usize) -> CMatrix<R> {
        let w = kron(&self.w, &identity::<R>(k));
        &w * a * w.adjoint()
    }

    fn transport_back(&self, b: &CMatrix<R>, k: usize) -> CMatrix<R> {
        let w = kron(&self.w, &identity::<R>(k));
        w.adjoint() * b * &w
    }

    /// The function `f` on `Ξ/H` with `A ↦ M_f`.
    pub fn transform(&self, a: &CMatrix<R>) -> Result<Vec<Complex<R>>> {
        let r = self.commutation_residual(a, 1);
        if r >= self.tol.residual {
            return Err(Error::Precondition(format!(
                "operator is not in the commutant (residual {r})"
            )));
        }
        let b = self.transport(a, 1);
        let off = off_diagonal(&b);
        if off >= self.tol.residual {
            return Err(Error::TheoremViolation(format!(
                "transported operator is not diagonal (residual {off})"
            )));
        }
        Ok(b.diagonal().iter().copied().collect())
    }

    /// `M_f` carried back to the reference space.
    pub fn inverse(&self, f: &[Complex<R>]) -> CMatrix<R> {
        let m = DMatrix::from_diagonal(&CVector::from_column_slice(f));
        self.transport_back(&m, 1)
    }

    /// Blocks `F(c)` with `A ⊗`-transported to `M_F`, plus the largest
    /// off-block entry.
    pub fn transform_blocks(&self, a: &CMatrix<R>, k: usize) -> Result<(Vec<CMatrix<R>>, R)> {
        let r = self.commutation_residual(a, k);
        if r >= self.tol.residual {
            return Err(Error::Precondition(format!(
                "operator is not in the commutant (residual {r})"
            )));
        }
        let b = self.transport(a, k);
        let n = self.space.dim();
        let mut off = R::zero();
        for i in 0..n * k {
            for j in 0..n * k {
                if i / k != j / k {
                    off = off.max(b[(i, j)].modulus());
                }
            }
        }
        let blocks = (0..n).map(|c| b.view((c * k, c * k), (k, k)).into_owned()).collect();
        Ok((blocks, off))
    }

    pub fn inverse_blocks(&self, blocks: &[CMatrix<R>]) -> CMatrix<R> {
        let k = blocks.first().map_or(0, |b| b.nrows());
        let n = blocks.len();
        let mut m = CMatrix::zeros(n * k, n * k);
        for (c, blk) in blocks.iter().enumerate() {
            m.view_mut((c * k, c * k), (k, k)).copy_from(blk);
        }
        self.transport_back(&m, k)
    }

    /// `c ↦ coset of γ(c) + z`.
    pub fn shift(&self, z: usize) -> Vec<usize> {
        let q = self.space.quotient();
        let ps = self.space.phase_space();
        (0..q.len()).map(|c| q.coset(ps.add(q.rep_index(c), z))).collect()
    }
}

/// `span{vectors}` as an algebra of `dim × dim` matrices, without closure.
pub fn subspace<R: RealField + Copy>(dim: usize, mats: &[CMatrix<R>], tol: Tol<R>) -> OperatorAlgebra<R> {
    let vectors: Vec<CVector<R>> = mats.iter().map(vectorize).collect();
    OperatorAlgebra::from_vectors(dim, crate::linalg::span(&vectors, tol), Provenance::Span)
}
