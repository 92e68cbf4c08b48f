use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use qtorus::forms::{BilinearData, SymmetricForm};
use qtorus::frac::fractions_up_to;
use qtorus::global::{
    block_report, bunt_report, commutator_pairing, commutator_pairing_oracle, heisenberg_block, pi2_character,
    ComponentSelection, LevelInput, PairingContext,
};
use qtorus::lattice::IntMatrix;
use qtorus::surface::{twisted_cohomology, LatticeLocalSystem};
use qtorus::Frac1;

/// Monodromy by `±1` per generator; every level is invariant under it.
fn arb_sign_system() -> impl Strategy<Value = LatticeLocalSystem> {
    (1usize..=2, 1usize..=2).prop_flat_map(|(genus, rank)| {
        proptest::collection::vec(any::<bool>(), 2 * genus).prop_map(move |signs| {
            let mats = signs
                .into_iter()
                .map(|s| if s { -&IntMatrix::identity(rank) } else { IntMatrix::identity(rank) })
                .collect();
            LatticeLocalSystem::new(genus, rank, mats).unwrap()
        })
    })
}

fn arb_level(rank: usize) -> impl Strategy<Value = BilinearData> {
    let zetas = fractions_up_to(6);
    (proptest::collection::vec(-3i64..=3, rank * rank), 0..zetas.len())
        .prop_map(move |(c, z)| BilinearData::new(IntMatrix::from_i64(rank, rank, &c), zetas[z]).unwrap())
}

fn arb_input() -> impl Strategy<Value = LevelInput> {
    arb_sign_system().prop_flat_map(|rho| {
        arb_level(rho.rank()).prop_map(move |b| LevelInput::new(b, rho.clone()).unwrap())
    })
}

fn add_forms(a: &SymmetricForm, b: &SymmetricForm) -> SymmetricForm {
    SymmetricForm {
        rank: a.rank,
        entries: a.entries.iter().zip(&b.entries).map(|(x, y)| x.iter().zip(y).map(|(p, q)| *p + *q).collect()).collect(),
    }
}

/// Order of `Z^m / rad(omega)` by walking `(Z/N)^m`.
fn quotient_order_by_enumeration(omega: &[Vec<Frac1>]) -> u64 {
    let m = omega.len();
    let n = omega.iter().flatten().fold(1u64, |acc, x| num_integer::lcm(acc, x.den()));
    let total = n.pow(m as u32);
    let mut radical = 0u64;
    for code in 0..total {
        let x: Vec<i64> = (0..m).map(|i| ((code / n.pow(i as u32)) % n) as i64).collect();
        let kills = (0..m).all(|j| (0..m).map(|i| omega[i][j].scale(x[i])).sum::<Frac1>().is_zero());
        if kills {
            radical += 1;
        }
    }
    total / radical
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn omega_is_antisymmetric(input in arb_input()) {
        let w = commutator_pairing(&input).unwrap();
        for i in 0..w.values.len() {
            prop_assert!(w.values[i][i].is_zero());
            for j in 0..w.values.len() {
                prop_assert_eq!(w.values[i][j], -w.values[j][i]);
            }
        }
        if input.quadratic().is_linear() {
            prop_assert!(w.is_zero());
        }
    }

    #[test]
    fn omega_is_additive_in_the_level(rho in arb_sign_system(), seed in any::<u64>()) {
        let r = rho.rank();
        let zetas = fractions_up_to(6);
        let form = |s: u64| {
            let c: Vec<i64> = (0..r * r).map(|k| ((s >> (3 * k)) % 7) as i64 - 3).collect();
            let zeta = zetas[(s >> 40) as usize % zetas.len()];
            LevelInput::new(BilinearData::new(IntMatrix::from_i64(r, r, &c), zeta).unwrap(), rho.clone())
                .unwrap()
                .symmetric()
        };
        let (a, b) = (form(seed), form(seed.rotate_left(17)));
        let ctx = PairingContext::new(&rho).unwrap();
        let (wa, wb) = (ctx.pairing(&a).unwrap(), ctx.pairing(&b).unwrap());
        let wab = ctx.pairing(&add_forms(&a, &b)).unwrap();
        for i in 0..wab.values.len() {
            for j in 0..wab.values.len() {
                prop_assert_eq!(wab.values[i][j], wa.values[i][j] + wb.values[i][j]);
            }
        }
    }

    #[test]
    fn closed_form_matches_cochain_oracle(input in arb_input()) {
        let closed = commutator_pairing(&input).unwrap();
        let oracle = commutator_pairing_oracle(&input).unwrap();
        prop_assert_eq!(closed.values, oracle.values);
    }

    #[test]
    fn block_dim_squares_to_quotient_order(input in arb_input()) {
        let w = commutator_pairing(&input).unwrap().free_block();
        prop_assume!(!w.iter().flatten().all(|x| x.is_zero()));
        let n = w.iter().flatten().fold(1u64, |acc, x| num_integer::lcm(acc, x.den()));
        prop_assume!(n.checked_pow(w.len() as u32).is_some_and(|t| t <= 20_000));
        let (_, dim) = heisenberg_block(&w).unwrap();
        let dim = dim.to_u64().unwrap();
        prop_assert_eq!(dim * dim, quotient_order_by_enumeration(&w));
    }

    #[test]
    fn pi2_character_is_class_function(input in arb_input(), shifts in proptest::collection::vec(-4i64..=4, 10)) {
        let r = input.rho.rank();
        let d: Vec<BigInt> = (0..r).map(|i| BigInt::from(shifts[i])).collect();
        let chi = pi2_character(&input, &d).unwrap();
        let id = IntMatrix::identity(r);
        for (k, m) in input.rho.monodromy().iter().enumerate() {
            let w: Vec<BigInt> = (0..r).map(|i| BigInt::from(shifts[(k + i) % shifts.len()])).collect();
            let moved: Vec<BigInt> = d.iter().zip((m - &id).mul_vec(&w)).map(|(a, s)| a + s).collect();
            prop_assert_eq!(&pi2_character(&input, &moved).unwrap(), &chi);
        }
    }

    #[test]
    fn bunt_blocks_match_block_report(input in arb_input()) {
        let coh = twisted_cohomology(&input.rho).unwrap();
        let selection = if coh.h2.free_rank == 0 {
            ComponentSelection::Range { bound: 0 }
        } else {
            ComponentSelection::Range { bound: 1 }
        };
        let report = bunt_report(&input, &selection).unwrap();
        prop_assert!(report.identification_holds);
        prop_assert_eq!(&report.pi0_bun_t, &coh.h2);
        prop_assert_eq!(&report.pi1_bun_t_degree_zero, &coh.h1);
        prop_assert_eq!(&report.pi2_bun_t_degree_zero, &coh.h0);
        prop_assert_eq!(report.blocks, block_report(&input, &selection).unwrap());
    }
}

#[test]
fn zero_component_has_trivial_character() {
    let rho = LatticeLocalSystem::trivial(1, 2);
    let b = BilinearData::new(IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]), Frac1::new(1, 3)).unwrap();
    let input = LevelInput::new(b, rho).unwrap();
    let chi = pi2_character(&input, &[BigInt::zero(), BigInt::zero()]).unwrap();
    assert!(chi.iter().all(|x| x.is_zero()));
}
