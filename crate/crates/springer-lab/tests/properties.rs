use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use springer_lab::linalg::jordan_type;
use springer_lab::orbit::{random_sp_element, sp_nilpotent_fingerprint, stratum_representative};
use springer_lab::theta::{membership, FormContext, Membership};
use springer_lab::{FiniteField, Gf16, Gf4, Mat};

fn gf16() -> impl Strategy<Value = Gf16> {
    (0u32..16).prop_map(Gf16::from_bits)
}

fn mat4(entries: Vec<u32>) -> Mat<Gf4> {
    Mat::from_vec(4, 4, entries.into_iter().map(Gf4::from_bits).collect())
}

proptest! {
    #[test]
    fn field_axioms(a in gf16(), b in gf16(), c in gf16()) {
        prop_assert_eq!(a + a, Gf16::from_bits(0));
        prop_assert_eq!((a + b) * c, a * c + b * c);
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!((a + b).frobenius(), a.frobenius() + b.frobenius());
        match a.try_inv() {
            Some(inv) => prop_assert_eq!(a * inv, Gf16::from_bits(1)),
            None => prop_assert_eq!(a.bits(), 0),
        }
        if a.bits() != 0 {
            prop_assert_eq!(a.pow(15), Gf16::from_bits(1));
        }
    }

    #[test]
    fn rank_nullity(entries in prop::collection::vec(0u32..4, 16)) {
        let m = mat4(entries);
        prop_assert_eq!(m.rank() + m.kernel().dim(), 4);
        prop_assert_eq!(m.transpose().rank(), m.rank());
        match m.inverse() {
            Some(inv) => prop_assert_eq!(&m * &inv, Mat::identity(4)),
            None => prop_assert!(m.rank() < 4),
        }
    }

    #[test]
    fn jordan_type_of_strict_upper_triangular(entries in prop::collection::vec(0u32..4, 6)) {
        let mut it = entries.into_iter();
        let x = Mat::<Gf4>::from_fn(4, 4, |i, j| {
            if i < j { Gf4::from_bits(it.next().unwrap()) } else { Gf4::from_bits(0) }
        });
        let t = jordan_type(&x).unwrap();
        prop_assert_eq!(t.size(), 4);
        prop_assert_eq!(t.parts()[0] as u64, (1..=4).find(|&k| x.pow(k).is_zero()).unwrap());
    }

    #[test]
    fn fingerprint_survives_sp_conjugation(seed in any::<u64>(), which in 0usize..9) {
        let ctx = FormContext::symplectic(2);
        let lambdas = springer_lab::combinatorics::enumerate_multipartitions(2, 3);
        let lam = &lambdas[which];
        let triple = [lam.components[0].clone(), lam.components[1].clone(), lam.components[2].clone()];
        let (x, _, _) = stratum_representative::<Gf4>(&triple, &ctx).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_sp_element::<Gf4, _>(2, &mut rng, 24);
        prop_assert!(membership(&g, &ctx, Membership::Sp).unwrap());
        let y = x.conjugate(&g, &g.inverse().unwrap());
        prop_assert_eq!(
            sp_nilpotent_fingerprint(&x, &ctx).unwrap(),
            sp_nilpotent_fingerprint(&y, &ctx).unwrap()
        );
    }
}
