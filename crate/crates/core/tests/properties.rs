use num_complex::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lagrange_weyl::algebra::{span_basis, subgroup_commutant, tensor_commutant, GelfandTransform};
use lagrange_weyl::canonical::CovariantSpace;
use lagrange_weyl::group::enumerate_subgroups;
use lagrange_weyl::linalg::{frobenius, operator_norm, CMatrix, Tol};
use lagrange_weyl::phase_space::{enumerate_lagrangians, sigma_complement};
use lagrange_weyl::{Convention, FiniteAbelianGroup, PhaseSpace, ProjectiveRep, Subgroup};

const SHAPES: &[&[u64]] = &[&[2], &[3], &[4], &[5], &[6], &[7], &[8], &[2, 2], &[2, 4]];
const TOL: f64 = 1e-9;

fn tol() -> Tol<f64> {
    Tol::standard()
}

/// A phase space and a source of raw indices to reduce into it.
fn space() -> impl Strategy<Value = (PhaseSpace, Vec<usize>)> {
    (
        0..SHAPES.len(),
        any::<bool>(),
        proptest::collection::vec(any::<usize>(), 8),
    )
        .prop_map(|(s, conj, picks)| {
            let c = if conj {
                Convention::Conjugate
            } else {
                Convention::Standard
            };
            let g = FiniteAbelianGroup::new(SHAPES[s].to_vec()).unwrap();
            (PhaseSpace::standard(&g, c).unwrap(), picks)
        })
}

fn pick_subgroup(ps: &PhaseSpace, pick: usize) -> Subgroup {
    let all = enumerate_subgroups(ps.xi(), None).unwrap();
    all[pick % all.len()].clone()
}

fn pick_lagrangian(ps: &PhaseSpace, pick: usize) -> Subgroup {
    let all = enumerate_lagrangians(ps).unwrap();
    all[pick % all.len()].clone()
}

fn other(c: Convention) -> Convention {
    match c {
        Convention::Standard => Convention::Conjugate,
        Convention::Conjugate => Convention::Standard,
    }
}

fn max_diff(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sigma_is_an_alternating_bicharacter((ps, p) in space()) {
        let n = ps.order();
        let (x, y, z) = (p[0] % n, p[1] % n, p[2] % n);
        prop_assert!(ps.sigma(x, x).is_one());
        prop_assert!((ps.sigma(x, y) * ps.sigma(y, x)).is_one());
        prop_assert_eq!(ps.sigma(ps.add(x, y), z), ps.sigma(x, z) * ps.sigma(y, z));
    }

    #[test]
    fn complement_is_antitone_and_involutive((ps, p) in space()) {
        let h = pick_subgroup(&ps, p[0]);
        let k = pick_subgroup(&ps, p[1]);
        let hs = sigma_complement(&ps, &h).unwrap();
        let ks = sigma_complement(&ps, &k).unwrap();
        if h.is_subset_of(&k) {
            prop_assert!(ks.is_subset_of(&hs));
        }
        prop_assert!(sigma_complement(&ps, &hs).unwrap().same_elements(&h));
    }

    #[test]
    fn lagrangians_are_symmetric_and_convention_free((ps, p) in space()) {
        let h = pick_lagrangian(&ps, p[0]);
        for &a in h.indices() {
            for &b in h.indices() {
                prop_assert_eq!(ps.m(a, b), ps.m(b, a));
            }
        }
        let qs = PhaseSpace::standard(ps.base(), other(ps.convention().unwrap())).unwrap();
        let k = pick_subgroup(&ps, p[1]);
        prop_assert!(sigma_complement(&ps, &k).unwrap().same_elements(&sigma_complement(&qs, &k).unwrap()));
        let a: Vec<_> = enumerate_lagrangians(&ps).unwrap().iter().map(|s| s.indices().to_vec()).collect();
        let b: Vec<_> = enumerate_lagrangians(&qs).unwrap().iter().map(|s| s.indices().to_vec()).collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn weyl_relations_hold_exactly((ps, p) in space()) {
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let n = ps.order();
        let (x, y, z, w) = (p[0] % n, p[1] % n, p[2] % n, p[3] % n);
        prop_assert_eq!(rep.get(x).mul(rep.get(y)), rep.get(ps.add(x, y)).scale(ps.m(x, y)));
        prop_assert_eq!(rep.get(x).adjoint(), rep.get(ps.neg(x)).scale(ps.m(x, ps.neg(x)).conj()));
        let a = rep.get(y);
        prop_assert_eq!(
            rep.translation_action_exact(z, &rep.translation_action_exact(w, a)),
            rep.translation_action_exact(ps.add(z, w), a)
        );
        let exp = ps.base().exponent();
        for c in 0..rep.dim() {
            let (_, phase) = rep.get(x).column(c);
            prop_assert_eq!(exp % phase.modulus(), 0);
        }
    }

    #[test]
    fn canonical_space_invariants((ps, p) in space()) {
        let h = pick_lagrangian(&ps, p[0]);
        let cs = CovariantSpace::new(&ps, &h).unwrap();
        prop_assert!(cs.dim() >= 1);
        prop_assert_eq!(cs.dim() * h.order(), ps.order());
        prop_assert!(cs.covariance_is_consistent());
        prop_assert!(cs.a_phi_is_unitary());
        let x = p[1] % ps.order();
        prop_assert_eq!(cs.transported_action(x).unwrap(), cs.conjugated_by_a_phi(x));

        let mut rng = ChaCha8Rng::seed_from_u64(p[2] as u64);
        let f: Vec<Complex<f64>> = (0..cs.dim())
            .map(|_| Complex::new(rand::Rng::random_range(&mut rng, -1.0..1.0), rand::Rng::random_range(&mut rng, -1.0..1.0)))
            .collect();
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(f.clone()));
        let sup = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((operator_norm(&m) - sup).abs() < TOL);
    }

    #[test]
    fn commutant_is_the_span_of_the_complement((ps, p) in space()) {
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let h = pick_subgroup(&ps, p[0]);
        let hs = sigma_complement(&ps, &h).unwrap();
        let comm = subgroup_commutant::<f64>(&rep, &h, tol());
        let span = span_basis::<f64>(&rep, &hs, tol());
        prop_assert_eq!(comm.dimension(), ps.order() / h.order());
        prop_assert_eq!(span.dimension(), comm.dimension());
        prop_assert!(comm.mutual_residual(&span) < TOL);
        prop_assert_eq!(comm.is_commutative(tol()), hs.is_subset_of(&h));
    }

    #[test]
    fn transform_is_a_covariant_star_isomorphism((ps, p) in space()) {
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let h = pick_lagrangian(&ps, p[0]);
        let alg = subgroup_commutant::<f64>(&rep, &h, tol());
        let t = GelfandTransform::new(rep.clone(), CovariantSpace::new(&ps, &h).unwrap(), tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p[1] as u64);
        let a = alg.random_element(&mut rng);
        let b = alg.random_element(&mut rng);
        let fa = t.transform(&a).unwrap();
        let fb = t.transform(&b).unwrap();
        let prod: Vec<_> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
        prop_assert!(max_diff(&t.transform(&(&a * &b)).unwrap(), &prod) < TOL);
        let conj: Vec<_> = fa.iter().map(|z| z.conj()).collect();
        prop_assert!(max_diff(&t.transform(&a.adjoint()).unwrap(), &conj) < TOL);

        let z = p[2] % ps.order();
        let moved = rep.translation_action(z, &a);
        prop_assert!(frobenius(&(&moved - &a)).is_finite());
        let shifted: Vec<_> = t.shift(z).iter().map(|&c| fa[c]).collect();
        prop_assert!(max_diff(&t.transform(&moved).unwrap(), &shifted) < TOL);
    }

    #[test]
    fn tensor_blocks_round_trip((ps, p) in space()) {
        prop_assume!(ps.order() <= 16);
        let rep = ProjectiveRep::schrodinger(&ps).unwrap();
        let h = pick_lagrangian(&ps, p[0]);
        let k = 2;
        let alg = tensor_commutant::<f64>(&rep, k, &h, tol()).unwrap();
        let t = GelfandTransform::new(rep.clone(), CovariantSpace::new(&ps, &h).unwrap(), tol()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(p[1] as u64);
        let a = alg.random_element(&mut rng);
        let (blocks, off) = t.transform_blocks(&a, k).unwrap();
        prop_assert!(off < TOL);
        prop_assert!(frobenius(&(t.inverse_blocks(&blocks) - &a)) < TOL);
    }
}
