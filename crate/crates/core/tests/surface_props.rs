use num_bigint::BigInt;
use proptest::prelude::*;

use qtorus::cochain::{class_of, coboundary, cup_evaluate, holonomies, triangulate, TwistedCochain};
use qtorus::forms::SymmetricForm;
use qtorus::frac::fractions_up_to;
use qtorus::lattice::IntMatrix;
use qtorus::surface::{build_complex, twisted_cohomology, LatticeLocalSystem};
use qtorus::Frac1;

fn elementary(rank: usize, i: usize, j: usize, k: i64) -> IntMatrix {
    let mut e = IntMatrix::identity(rank);
    e[(i, j)] = BigInt::from(k);
    e
}

fn arb_unimodular(rank: usize) -> impl Strategy<Value = IntMatrix> {
    proptest::collection::vec((0..rank, 1..rank.max(2), -2i64..=2), 0..4).prop_map(move |ops| {
        ops.into_iter().fold(IntMatrix::identity(rank), |p, (i, d, k)| {
            if rank < 2 {
                return p;
            }
            &p * &elementary(rank, i, (i + d) % rank, k)
        })
    })
}

/// Commuting pairs on every handle, so the surface relation holds.
fn arb_system() -> impl Strategy<Value = LatticeLocalSystem> {
    (0usize..=2, 1usize..=2).prop_flat_map(|(genus, rank)| {
        proptest::collection::vec((arb_unimodular(rank), -1i32..=2, -1i32..=2, any::<bool>()), genus).prop_map(
            move |handles| {
                let mut mats = Vec::new();
                for (m, p, q, flip) in handles {
                    let pow = |k: i32| {
                        let base = if k < 0 { m.inverse_unimodular().unwrap() } else { m.clone() };
                        (0..k.unsigned_abs()).fold(IntMatrix::identity(rank), |acc, _| &acc * &base)
                    };
                    mats.push(pow(p));
                    let b = pow(q);
                    mats.push(if flip { -&b } else { b });
                }
                LatticeLocalSystem::new(genus, rank, mats).unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differentials_compose_to_zero(rho in arb_system()) {
        let c = build_complex(&rho).unwrap();
        prop_assert!((&c.d1 * &c.d0).is_zero());
    }

    #[test]
    fn euler_characteristic(rho in arb_system()) {
        let coh = twisted_cohomology(&rho).unwrap();
        prop_assert_eq!(coh.euler_characteristic(), (2 - 2 * rho.genus() as i64) * rho.rank() as i64);
    }

    #[test]
    fn conjugation_preserves_cohomology(rho in arb_system(), p in arb_unimodular(2)) {
        let p = if rho.rank() == 2 { p } else { IntMatrix::from_i64(1, 1, &[-1]) };
        let a = twisted_cohomology(&rho).unwrap();
        let b = twisted_cohomology(&rho.conjugate(&p).unwrap()).unwrap();
        prop_assert_eq!((a.h0, a.h1, a.h2), (b.h0, b.h1, b.h2));
    }

    #[test]
    fn cup_is_antisymmetric_and_ignores_coboundaries(
        rho in arb_system().prop_filter("positive genus", |r| r.genus() > 0),
        zeta_index in 0usize..12,
        shift in proptest::collection::vec(-3i64..=3, 4),
    ) {
        let t = triangulate(rho.genus()).unwrap();
        let coh = twisted_cohomology(&rho).unwrap();
        let r = rho.rank();
        let zeta = fractions_up_to(6)[zeta_index];
        let p = SymmetricForm {
            rank: r,
            entries: (0..r).map(|i| (0..r).map(|j| if i == j { zeta } else { Frac1::ZERO }).collect()).collect(),
        };
        // Only forms the monodromy preserves make the cup product well defined.
        let invariant = rho.monodromy().iter().all(|m| {
            let basis: Vec<Vec<BigInt>> = IntMatrix::identity(r).columns();
            basis.iter().all(|x| basis.iter().all(|y| {
                p.eval_big(&m.mul_vec(x), &m.mul_vec(y)).unwrap() == p.eval_big(x, y).unwrap()
            }))
        });
        prop_assume!(invariant);
        let gens = coh.h1_presentation.generators();
        prop_assume!(!gens.is_empty());
        let lifts: Vec<TwistedCochain> = gens.iter().map(|v| class_of(v, &t, &rho).unwrap()).collect();
        for (v, c) in gens.iter().zip(&lifts) {
            prop_assert_eq!(&holonomies(c, &t), v);
        }
        let mut zero = TwistedCochain::zero(0, r, &t);
        for (k, value) in zero.values.iter_mut().enumerate() {
            *value = (0..r).map(|i| BigInt::from(shift[(k * r + i) % shift.len()])).collect();
        }
        let db = coboundary(&zero, &t, &rho).unwrap();
        for x in &lifts {
            for y in &lifts {
                let xy = cup_evaluate(x, y, &p, &t, &rho).unwrap();
                prop_assert_eq!(xy, -cup_evaluate(y, x, &p, &t, &rho).unwrap());
                prop_assert_eq!(cup_evaluate(&x.add(&db).unwrap(), y, &p, &t, &rho).unwrap(), xy);
            }
        }
    }
}
