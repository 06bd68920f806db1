use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use twistlat::cocycle::{
    cocycle_from_pairing, group_elements, image_mod_n, pairing_of_cocycle, verify_cocycle_table,
    AlternatingForm, BilinearCocycle,
};
use twistlat::decomposition::{
    decompose_principal_chain, verify_decomposition, InvariantFactorChain,
};
use twistlat::hodge::{
    build_j_alpha, is_symplectic_isomorphism, pi_tilde, untwisted_j, BField, ComplexStructure,
};
use twistlat::isogeny::{extend_isogeny, verify_conformal_symplectic};
use twistlat::json::JsonInt;
use twistlat::kuga_satake::exterior_kernel_oracle;
use twistlat::linalg::{
    binomial, cokernel_of, column_hermite_form, exterior_power, is_perfect_square,
    smith_normal_form, FiniteAbelianGroup, IntMatrix, RatMatrix,
};
use twistlat::sampling::{
    random_b_field, random_complex_structure, random_nonsingular, random_unimodular, seeded_rng,
};
use twistlat::witness::{run_witness_pipeline, NPolicy};

fn matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-bound..=bound, rows * cols).prop_map(move |v| {
        IntMatrix::new(rows, cols, v.into_iter().map(BigInt::from).collect()).unwrap()
    })
}

fn any_matrix(max_dim: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| matrix(r, c, bound))
}

fn square_matrix(
    dims: std::ops::RangeInclusive<usize>,
    bound: i64,
) -> impl Strategy<Value = IntMatrix> {
    dims.prop_flat_map(move |d| matrix(d, d, bound))
}

fn squarefree_part(mut x: u64) -> u64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= x {
        while x.is_multiple_of(p * p) {
            x /= p * p;
        }
        if x.is_multiple_of(p) {
            out *= p;
            x /= p;
        }
        p += 1;
    }
    out * x
}

/// A principal chain built from step values by scaling the top entry.
fn principal_chain(
    genus: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = InvariantFactorChain> {
    genus
        .prop_flat_map(|g| prop::collection::vec(1u64..=3, 2 * g))
        .prop_map(|steps| {
            let mut a: Vec<u64> = steps
                .iter()
                .scan(1u64, |acc, d| {
                    *acc *= d;
                    Some(*acc)
                })
                .collect();
            let s = squarefree_part(a.iter().product());
            *a.last_mut().unwrap() *= s;
            InvariantFactorChain::new(a.into_iter().map(BigInt::from).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn smith_form_is_a_certified_chain(a in any_matrix(6, 100)) {
        let s = smith_normal_form(&a);
        prop_assert_eq!(&(&s.u * &a) * &s.v, s.d.clone());
        prop_assert!(s.u.is_unimodular() && s.v.is_unimodular());
        for i in 0..s.d.rows() {
            for j in 0..s.d.cols() {
                if i != j {
                    prop_assert!(s.d[(i, j)].is_zero());
                }
            }
        }
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            }
        }
    }

    #[test]
    fn cokernel_is_unimodular_invariant(a in square_matrix(1..=5, 20), seed in any::<u64>()) {
        prop_assume!(!a.determinant().unwrap().is_zero());
        let mut rng = seeded_rng(seed);
        let u = random_unimodular(&mut rng, a.rows(), 12);
        let v = random_unimodular(&mut rng, a.rows(), 12);
        let g = cokernel_of(&a).unwrap();
        prop_assert_eq!(g.order(), a.determinant().unwrap().abs());
        prop_assert_eq!(cokernel_of(&(&(&u * &a) * &v)).unwrap(), g);
    }

    #[test]
    fn hermite_form_depends_only_on_the_lattice(a in square_matrix(1..=5, 20), seed in any::<u64>()) {
        prop_assume!(!a.determinant().unwrap().is_zero());
        let u = random_unimodular(&mut seeded_rng(seed), a.rows(), 15);
        let h = column_hermite_form(&a).unwrap();
        prop_assert_eq!(column_hermite_form(&(&a * &u)).unwrap(), h.clone());
        for i in 0..h.rows() {
            prop_assert!(h[(i, i)].is_positive());
            for j in 0..h.cols() {
                if j > i {
                    prop_assert!(h[(i, j)].is_zero());
                } else if j < i {
                    prop_assert!(!h[(i, j)].is_negative() && h[(i, j)] < h[(i, i)]);
                }
            }
        }
    }

    #[test]
    fn sylvester_franke(a in square_matrix(3..=5, 3)) {
        let r = a.rows();
        let det = a.determinant().unwrap().abs();
        for k in 1..=r {
            let e: u32 = (&binomial(r - 1, k - 1)).try_into().unwrap();
            prop_assert_eq!(exterior_power(&a, k).unwrap().determinant().unwrap().abs(), det.pow(e));
        }
    }

    #[test]
    fn perfect_squares_match_float_oracle(x in 0u64..2_000_000_000_000) {
        let root = (x as f64).sqrt() as u64;
        let naive = (root.saturating_sub(1)..=root + 1).any(|r| r * r == x);
        prop_assert_eq!(is_perfect_square(&BigInt::from(x)).unwrap(), naive);
        let y = BigInt::from(x);
        prop_assert!(is_perfect_square(&(&y * &y)).unwrap());
    }

    #[test]
    fn pairing_rule_matches_torsion_counts(
        orders in prop::collection::vec(1u64..=8, 1..=6)
            .prop_filter("small group", |o| o.iter().product::<u64>() <= 4096)
    ) {
        let g = FiniteAbelianGroup::from_cyclic_orders(
            &orders.iter().map(|&o| BigInt::from(o)).collect::<Vec<_>>(),
        ).unwrap();
        // brute-force count of elements killed by m
        let killed = |m: u64| -> u64 {
            let mut count = 1;
            for &o in &orders {
                count *= (0..o).filter(|x| (x * m).is_multiple_of(o)).count() as u64;
            }
            count
        };
        for m in 1..=8u64 {
            prop_assert_eq!(g.torsion_count(&BigInt::from(m)), BigInt::from(killed(m)));
        }
        // G = H + H iff every rank r_j = log_p |G[p^j]| / |G[p^(j-1)]| is even
        let mut paired = true;
        for p in [2u64, 3, 5, 7] {
            let mut prev = 1;
            let mut q = p;
            while q <= 8 {
                let cur = killed(q);
                let mut ratio = cur / prev;
                let mut rank = 0;
                while ratio > 1 {
                    ratio /= p;
                    rank += 1;
                }
                paired &= rank % 2 == 0;
                prev = cur;
                q *= p;
            }
        }
        prop_assert_eq!(g.is_spectrally_paired(), paired);
    }

    #[test]
    fn cocycle_round_trip(n in 1i64..=12, k in 1usize..=4, seed in any::<u64>()) {
        let nb = BigInt::from(n);
        let mut rng = seeded_rng(seed);
        let e = twistlat::sampling::random_antisymmetric(&mut rng, k, 20);
        let form = AlternatingForm::new(&e, &nb).unwrap();
        prop_assert_eq!(pairing_of_cocycle(&cocycle_from_pairing(&form)), form);

        let beta = random_nonsingular(&mut rng, k, 20);
        let c = BilinearCocycle::new(&beta, &nb).unwrap();
        let p = pairing_of_cocycle(&c);
        prop_assert_eq!(pairing_of_cocycle(&cocycle_from_pairing(&p)), p);
    }

    #[test]
    fn bilinear_tables_are_cocycles(m in 1usize..=4, k in 1usize..=2, entries in prop::collection::vec(0i64..4, 4)) {
        let n = BigInt::from(m as i64);
        let beta = IntMatrix::new(k, k, entries[..k * k].iter().map(|&x| BigInt::from(x)).collect()).unwrap();
        let table = BilinearCocycle::new(&beta, &n).unwrap().table(m).unwrap();
        prop_assert!(verify_cocycle_table(&n, m, k, &table).unwrap());
    }

    #[test]
    fn image_matches_enumeration(n in 1i64..=8, k in 1usize..=3, entries in prop::collection::vec(0i64..8, 9)) {
        let nb = BigInt::from(n);
        let a = IntMatrix::new(k, k, entries[..k * k].iter().map(|&x| BigInt::from(x)).collect()).unwrap();
        let image = image_mod_n(&a, &nb).unwrap();
        let points: BTreeSet<Vec<BigInt>> = group_elements(n as usize, k)
            .into_iter()
            .map(|u| {
                let u: Vec<BigInt> = u.into_iter().map(BigInt::from).collect();
                a.mul_vec(&u).iter().map(|x| x.mod_floor(&nb)).collect()
            })
            .collect();
        prop_assert_eq!(image.order(), BigInt::from(points.len()));
        for m in (1..=n).filter(|m| n % m == 0) {
            let mb = BigInt::from(m);
            let killed = points
                .iter()
                .filter(|p| p.iter().all(|x| (x * &mb).mod_floor(&nb).is_zero()))
                .count();
            prop_assert_eq!(image.torsion_count(&mb), BigInt::from(killed));
        }
    }

    #[test]
    fn decompositions_verify(chain in principal_chain(2..=4)) {
        let cert = decompose_principal_chain(&chain, None).unwrap();
        prop_assert!(verify_decomposition(&cert).is_valid());
        for f in &cert.factors {
            prop_assert!(cokernel_of(f).unwrap().is_spectrally_paired());
        }
    }

    #[test]
    fn witnesses_hold(chain in principal_chain(2..=3), lcm in any::<bool>()) {
        let policy = if lcm { NPolicy::Lcm } else { NPolicy::Exponent };
        let rep = run_witness_pipeline(&chain, policy, None).unwrap();
        prop_assert!(rep.all_verdicts_true());
    }

    #[test]
    fn extended_isogenies_are_conformal(pairs in prop::collection::vec(1i64..=6, 1..=2), seed in any::<u64>()) {
        let diag: Vec<i64> = pairs.iter().flat_map(|&b| [b, b]).collect();
        let f = IntMatrix::diag_i64(&diag);
        let mut rng = seeded_rng(seed);
        let u = random_unimodular(&mut rng, f.rows(), 10);
        let v = random_unimodular(&mut rng, f.rows(), 10);
        let f = &(&u * &f) * &v;
        let n = cokernel_of(&f).unwrap().exponent();
        let phi = extend_isogeny(&f, &n).unwrap();
        prop_assert!(verify_conformal_symplectic(&phi));
        prop_assert_eq!(phi.degree(), n.pow(4 * pairs.len() as u32));
    }

    #[test]
    fn twisted_structures(g in 1usize..=2, n in 1i64..=5, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let cs = random_complex_structure(&mut rng, g);
        let b = random_b_field(&mut rng, g, &BigInt::from(n), 4).unwrap();
        let ja = build_j_alpha(&cs, &b).unwrap();
        prop_assert_eq!(ja.matrix() * ja.matrix(), -&RatMatrix::identity(4 * g));
        let m = pi_tilde(&b).to_rational();
        prop_assert_eq!(&m * &untwisted_j(&cs), ja.matrix() * &m);
    }

    #[test]
    fn symplectic_isomorphisms_compose(g in 1usize..=2, seed in any::<u64>()) {
        // blockdiag(P, P^-T) carries (J, B) to (P J P^-1, P^-T B P^-1)
        fn transport(cs: &ComplexStructure, b: &BField, p: &IntMatrix) -> (ComplexStructure, BField, IntMatrix) {
            let p_inv = p.unimodular_inverse().unwrap();
            let (pq, piq) = (p.to_rational(), p_inv.to_rational());
            let j = &(&pq * cs.matrix()) * &piq;
            let bb = &(&piq.transpose() * b.matrix()) * &piq;
            let psi = IntMatrix::block_diagonal(p, &p_inv.transpose());
            (ComplexStructure::new(j).unwrap(), BField::new(bb, b.n()).unwrap(), psi)
        }
        let mut rng = seeded_rng(seed);
        let cs0 = random_complex_structure(&mut rng, g);
        let b0 = random_b_field(&mut rng, g, &BigInt::from(3), 2).unwrap();
        let p1 = random_unimodular(&mut rng, 2 * g, 8);
        let p2 = random_unimodular(&mut rng, 2 * g, 8);
        let (cs1, b1, psi1) = transport(&cs0, &b0, &p1);
        let (cs2, b2, psi2) = transport(&cs1, &b1, &p2);
        let x0 = build_j_alpha(&cs0, &b0).unwrap();
        let x1 = build_j_alpha(&cs1, &b1).unwrap();
        let x2 = build_j_alpha(&cs2, &b2).unwrap();
        prop_assert!(is_symplectic_isomorphism(&IntMatrix::identity(4 * g), &x0, &x0));
        prop_assert!(is_symplectic_isomorphism(&psi1, &x0, &x1));
        prop_assert!(is_symplectic_isomorphism(&psi2, &x1, &x2));
        prop_assert!(is_symplectic_isomorphism(&(&psi2 * &psi1), &x0, &x2));
    }

    #[test]
    fn kuga_satake_totals(r in 2usize..=5, seed in any::<u64>()) {
        let a = random_nonsingular(&mut seeded_rng(seed), r, 3);
        let rep = exterior_kernel_oracle(&a).unwrap();
        prop_assert!(rep.totals_agree());
        prop_assert!(rep.grades_consistent());
        if r >= 3 {
            prop_assert!(rep.closed_form_is_square());
        }
    }

    #[test]
    fn json_integers_round_trip(x in any::<i128>()) {
        let v = JsonInt(BigInt::from(x));
        let text = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<JsonInt>(&text).unwrap(), v);
    }
}

#[test]
fn rational_b_fields_need_integral_multiple() {
    let b = RatMatrix::from_rows(vec![
        vec![
            BigRational::zero(),
            BigRational::new(BigInt::one(), BigInt::from(3)),
        ],
        vec![
            BigRational::new(BigInt::from(-1), BigInt::from(3)),
            BigRational::zero(),
        ],
    ])
    .unwrap();
    assert!(BField::new(b.clone(), &BigInt::from(2)).is_err());
    assert!(BField::new(b, &BigInt::from(6)).is_ok());
}
