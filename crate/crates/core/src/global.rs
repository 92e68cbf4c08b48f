//! Global invariants: the section space `Gamma_c(Sigma, B^2 Lambda)` and the
//! gerbe on it induced by a level.
//!
//! The section space is a 2-type with `pi_n = H^{2-n}(Sigma, Lambda)`. Over it the
//! level induces a gerbe whose loop holonomy obstruction is the antisymmetric
//! pairing `omega(x, y) = <b(x cup y), [Sigma]>` on `H^1`, and whose restriction
//! to `pi_2` of the component `d` is the character `lambda -> b(lambda, d)`.
//! Each component then carries a block whose dimension is the square root of
//! the order of the finite Heisenberg quotient of `pi_1` by the radical of `omega`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{class_of, cup_evaluate, triangulate};
use crate::error::{Error, Result};
use crate::forms::{quad_from_bilinear, BilinearData, QuadraticForm, SymmetricForm};
use crate::frac::Frac1;
use crate::lattice::{serialize_bigint_vec, smith_normal_form, FgAbGroup, IntMatrix};
use crate::surface::{split_cocycle, twisted_cohomology, LatticeLocalSystem, TwistedCohomology};

/// Most blocks a single report will enumerate.
pub const MAX_COMPONENTS: u128 = 100_000;

/// A level on a lattice local system, given through its bilinear splitting.
#[derive(Clone, Debug)]
pub struct LevelInput {
    pub bilinear: BilinearData,
    pub rho: LatticeLocalSystem,
    quadratic: QuadraticForm,
}

impl LevelInput {
    /// Checks that the level has the rank of the local system and is monodromy-invariant.
    pub fn new(bilinear: BilinearData, rho: LatticeLocalSystem) -> Result<Self> {
        if bilinear.rank() != rho.rank() {
            return Err(Error::DimensionMismatch {
                expected: rho.rank(),
                found: bilinear.rank(),
            });
        }
        let quadratic = quad_from_bilinear(&bilinear)?;
        if let Some(index) = quadratic.first_non_invariant(rho.monodromy())? {
            return Err(Error::NotInvariant { index });
        }
        Ok(LevelInput {
            bilinear,
            rho,
            quadratic,
        })
    }

    pub fn quadratic(&self) -> &QuadraticForm {
        &self.quadratic
    }

    pub fn symmetric(&self) -> SymmetricForm {
        self.quadratic.polarize()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SectionSpaceInvariants {
    pub pi0: FgAbGroup,
    pub pi1: FgAbGroup,
    pub pi2: FgAbGroup,
}

pub fn section_space(rho: &LatticeLocalSystem) -> Result<SectionSpaceInvariants> {
    let coh = twisted_cohomology(rho)?;
    Ok(SectionSpaceInvariants {
        pi0: coh.h2,
        pi1: coh.h1,
        pi2: coh.h0,
    })
}

/// The commutator pairing on chosen generators of `H^1` (free generators first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorPairing {
    /// Cocycle vectors (values on `a_1, b_1, ...`) representing the generators.
    pub generators: Vec<Vec<BigInt>>,
    pub free_count: usize,
    pub values: Vec<Vec<Frac1>>,
}

impl CommutatorPairing {
    pub fn free_block(&self) -> Vec<Vec<Frac1>> {
        self.values[..self.free_count]
            .iter()
            .map(|row| row[..self.free_count].to_vec())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|x| x.is_zero())
    }
}

/// The two sides of the bar chain for one cocycle `f`: for each relator letter
/// `x_k`, the sign `eps_k`, `f(h_k)` and `rho(h_k) f(x_k)`.
///
/// The fundamental class of the one-relator presentation is the bar chain
/// `sum_k eps_k [h_k | x_k]`, where the relator is read letter by letter and
/// `h_k` is the prefix ending just before a positive letter `x_k` (eps = +1) or
/// just after a negative letter `x_k^-1` (eps = -1).
struct BarSides {
    signs: Vec<i64>,
    left: Vec<Vec<BigInt>>,
    right: Vec<Vec<BigInt>>,
}

fn bar_sides(rho: &LatticeLocalSystem, f: &[BigInt]) -> BarSides {
    let r = rho.rank();
    let fv = split_cocycle(rho, f);
    let word = &rho.group().relator;
    let mut rho_prefix = IntMatrix::identity(r);
    let mut f_prefix = vec![BigInt::zero(); r];
    let mut sides = BarSides {
        signs: Vec::with_capacity(word.len()),
        left: Vec::with_capacity(word.len()),
        right: Vec::with_capacity(word.len()),
    };
    for &letter in word {
        let x = letter.generator;
        let m = rho.letter_matrix(letter);
        let mut record = |rho_prefix: &IntMatrix, f_prefix: &Vec<BigInt>, sign: i64| {
            sides.signs.push(sign);
            sides.left.push(f_prefix.clone());
            sides.right.push(rho_prefix.mul_vec(&fv[x]));
        };
        if !letter.inverse {
            record(&rho_prefix, &f_prefix, 1);
        }
        let delta: Vec<BigInt> = if letter.inverse {
            m.mul_vec(&fv[x]).into_iter().map(|v| -v).collect()
        } else {
            fv[x].clone()
        };
        let moved = rho_prefix.mul_vec(&delta);
        f_prefix.iter_mut().zip(moved).for_each(|(a, b)| *a += b);
        rho_prefix = &rho_prefix * m;
        if letter.inverse {
            record(&rho_prefix, &f_prefix, -1);
        }
    }
    sides
}

/// `sum_k eps_k f(h_k) (x) rho(h_k) g(x_k)` as an integer `r x r` matrix.
fn contraction(f: &BarSides, g: &BarSides, r: usize) -> IntMatrix {
    let mut c = IntMatrix::zeros(r, r);
    for ((sign, u), v) in f.signs.iter().zip(&f.left).zip(&g.right) {
        for (s, us) in u.iter().enumerate() {
            if us.is_zero() {
                continue;
            }
            for (t, vt) in v.iter().enumerate() {
                c[(s, t)] += us * vt * sign;
            }
        }
    }
    c
}

fn contract_form(p: &SymmetricForm, c: &IntMatrix) -> Frac1 {
    let mut acc = Frac1::ZERO;
    for (s, row) in p.entries.iter().enumerate() {
        for (t, b) in row.iter().enumerate() {
            acc += b.scale_big(&c[(s, t)]);
        }
    }
    acc
}

/// `<p(f cup g), [Sigma]>` from the presentation.
///
/// With the bar-complex cup product `(f cup g)[h | x] = f(h) (x) h.g(x)` the
/// evaluation on the fundamental class is a closed sum over the relator,
/// normalized so that `<a^* cup b^*, [T^2]> = +1`.
pub fn cup_on_presentation(
    rho: &LatticeLocalSystem,
    f: &[BigInt],
    g: &[BigInt],
    p: &SymmetricForm,
) -> Result<Frac1> {
    let r = rho.rank();
    if p.rank != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: p.rank,
        });
    }
    let c = contraction(&bar_sides(rho, f), &bar_sides(rho, g), r);
    Ok(contract_form(p, &c))
}

fn h1_generators(coh: &TwistedCohomology) -> (Vec<Vec<BigInt>>, usize) {
    (
        coh.h1_presentation.generators(),
        coh.h1_presentation.free_gens.len(),
    )
}

/// `omega(x_i, x_j) = <b(x_i cup x_j), [Sigma]>`, evaluated from the presentation.
pub fn commutator_pairing(input: &LevelInput) -> Result<CommutatorPairing> {
    PairingContext::new(&input.rho)?.pairing(&input.symmetric())
}

/// The `H^1` generators of one local system with their cup products contracted
/// down to integer `r x r` matrices, so that the pairing for any level is a
/// linear function of its Gram matrix.
#[derive(Clone, Debug)]
pub struct PairingContext {
    rank: usize,
    generators: Vec<Vec<BigInt>>,
    free_count: usize,
    contractions: Vec<Vec<IntMatrix>>,
}

impl PairingContext {
    pub fn new(rho: &LatticeLocalSystem) -> Result<Self> {
        Ok(Self::from_cohomology(rho, &twisted_cohomology(rho)?))
    }

    fn from_cohomology(rho: &LatticeLocalSystem, coh: &TwistedCohomology) -> Self {
        let (generators, free_count) = h1_generators(coh);
        let r = rho.rank();
        let sides: Vec<BarSides> = generators.iter().map(|f| bar_sides(rho, f)).collect();
        let contractions = sides
            .iter()
            .map(|f| sides.iter().map(|g| contraction(f, g, r)).collect())
            .collect();
        PairingContext {
            rank: r,
            generators,
            free_count,
            contractions,
        }
    }

    /// The pairing induced by a symmetric form `b`. The caller is responsible for
    /// `b` being monodromy-invariant; [`commutator_pairing`] checks this through
    /// [`LevelInput`].
    pub fn pairing(&self, b: &SymmetricForm) -> Result<CommutatorPairing> {
        if b.rank != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: b.rank,
            });
        }
        let values = self
            .contractions
            .iter()
            .map(|row| row.iter().map(|c| contract_form(b, c)).collect())
            .collect();
        let omega = CommutatorPairing {
            generators: self.generators.clone(),
            free_count: self.free_count,
            values,
        };
        check_antisymmetric(&omega)?;
        Ok(omega)
    }
}

fn check_antisymmetric(omega: &CommutatorPairing) -> Result<()> {
    let n = omega.values.len();
    for i in 0..n {
        for j in 0..n {
            if omega.values[i][j] != -omega.values[j][i] {
                return Err(Error::InvariantViolation(format!(
                    "commutator pairing not antisymmetric at ({i}, {j})"
                )));
            }
        }
        if i < omega.free_count && !omega.values[i][i].is_zero() {
            return Err(Error::InvariantViolation(format!(
                "commutator pairing has nonzero diagonal at free generator {i}"
            )));
        }
    }
    Ok(())
}

/// The same pairing, computed by lifting each generator to a simplicial cocycle
/// and evaluating the cochain-level cup product on the triangulated surface.
pub fn commutator_pairing_oracle(input: &LevelInput) -> Result<CommutatorPairing> {
    let coh = twisted_cohomology(&input.rho)?;
    let (generators, free_count) = h1_generators(&coh);
    if generators.is_empty() {
        return Ok(CommutatorPairing {
            generators,
            free_count,
            values: Vec::new(),
        });
    }
    let t = triangulate(input.rho.genus())?;
    let b = input.symmetric();
    let lifts = generators
        .iter()
        .map(|v| class_of(v, &t, &input.rho))
        .collect::<Result<Vec<_>>>()?;
    let values = lifts
        .iter()
        .map(|x| {
            lifts
                .iter()
                .map(|y| cup_evaluate(x, y, &b, &t, &input.rho))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CommutatorPairing {
        generators,
        free_count,
        values,
    })
}

/// Fails with `InvariantViolation` unless the closed form and the cochain oracle agree.
pub fn verify_pairing_against_oracle(input: &LevelInput) -> Result<CommutatorPairing> {
    let closed = commutator_pairing(input)?;
    let oracle = commutator_pairing_oracle(input)?;
    if closed != oracle {
        return Err(Error::InvariantViolation(
            "commutator pairing disagrees with the cochain-level cup product".into(),
        ));
    }
    Ok(closed)
}

/// `chi_d(lambda) = b(lambda, d)` on the free generators of `H^0`.
pub fn pi2_character(input: &LevelInput, d: &[BigInt]) -> Result<Vec<Frac1>> {
    let coh = twisted_cohomology(&input.rho)?;
    pi2_character_with(input, &coh, d)
}

fn pi2_character_with(input: &LevelInput, coh: &TwistedCohomology, d: &[BigInt]) -> Result<Vec<Frac1>> {
    let r = input.rho.rank();
    if d.len() != r {
        return Err(Error::BadComponent {
            expected: r,
            found: d.len(),
        });
    }
    let b = input.symmetric();
    let basis = coh.h0_basis.columns();
    let chi = basis
        .iter()
        .map(|lambda| b.eval_big(lambda, d))
        .collect::<Result<Vec<_>>>()?;

    // d and d + (rho(x) - 1) w represent the same coinvariant class.
    let id = IntMatrix::identity(r);
    for m in input.rho.monodromy() {
        let shift = m - &id;
        for w in IntMatrix::identity(r).columns() {
            let moved: Vec<BigInt> = d.iter().zip(shift.mul_vec(&w)).map(|(a, s)| a + s).collect();
            for (lambda, expected) in basis.iter().zip(&chi) {
                if b.eval_big(lambda, &moved)? != *expected {
                    return Err(Error::InvariantViolation(
                        "pi_2 character depends on the component representative".into(),
                    ));
                }
            }
        }
    }
    Ok(chi)
}

/// Radical rank and block dimension of an antisymmetric Q/Z-valued pairing on `Z^m`.
///
/// With `N` the common denominator and `A = N omega` the integer lift, the map
/// `x -> A x mod N` has image of order `prod_i N / gcd(N, d_i)` over the Smith
/// diagonal `d_i` (padded with zeros to length `m`); this is the order of the
/// quotient by the radical. The radical rank counts the `d_i` divisible by `N`.
pub fn heisenberg_block(omega: &[Vec<Frac1>]) -> Result<(usize, BigInt)> {
    let m = omega.len();
    let n: u64 = omega
        .iter()
        .flatten()
        .fold(1u64, |acc, x| acc.lcm(&x.den()));
    let big_n = BigInt::from(n);
    let mut a = IntMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let x = omega[i][j];
            a[(i, j)] = BigInt::from(x.num()) * BigInt::from(n / x.den());
        }
    }
    let diag = smith_normal_form(&a).diagonal();
    let mut order = BigInt::one();
    let mut radical_rank = m - diag.len();
    for d in &diag {
        let g = d.gcd(&big_n);
        if g == big_n {
            radical_rank += 1;
        }
        order *= &big_n / g;
    }
    let root = order.sqrt();
    if &root * &root != order {
        return Err(Error::InvariantViolation(format!(
            "Heisenberg quotient order {order} is not a perfect square"
        )));
    }
    Ok((radical_rank, root))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GerbeBlock {
    /// Representative in `Lambda` of the component's class in `H^2`.
    #[serde(serialize_with = "serialize_bigint_vec")]
    pub component: Vec<BigInt>,
    pub omega: Vec<Vec<Frac1>>,
    pub pi2_character: Vec<Frac1>,
    pub radical_rank: usize,
    #[serde(serialize_with = "crate::global::serialize_bigint")]
    pub block_dim: BigInt,
}

pub(crate) fn serialize_bigint<S: serde::Serializer>(
    x: &BigInt,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    crate::lattice::BigIntJson(x).serialize(s)
}

/// Which components of the section space to report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentSelection {
    /// Caller-supplied representatives in `Lambda`.
    Explicit(Vec<Vec<BigInt>>),
    /// All torsion classes of `H^2`, with free coordinates in `[-bound, bound]`.
    Range { bound: u32 },
}

/// Representatives of the selected classes in `H^2`.
pub fn enumerate_components(
    coh: &TwistedCohomology,
    selection: &ComponentSelection,
) -> Result<Vec<Vec<BigInt>>> {
    let r = coh.h2_presentation.free_gens.first().map_or_else(
        || coh.h2_presentation.torsion_gens.first().map_or(0, Vec::len),
        Vec::len,
    );
    match selection {
        ComponentSelection::Explicit(reps) => Ok(reps.clone()),
        ComponentSelection::Range { bound } => {
            let p = &coh.h2_presentation;
            let mut ranges: Vec<(Vec<BigInt>, Vec<BigInt>)> = Vec::new();
            let free_span: Vec<BigInt> = (-(*bound as i64)..=*bound as i64).map(BigInt::from).collect();
            for g in &p.free_gens {
                ranges.push((g.clone(), free_span.clone()));
            }
            for (g, t) in p.torsion_gens.iter().zip(&p.group.torsion) {
                let t = t.to_i64().ok_or(Error::TooManyComponents(u128::MAX))?;
                ranges.push((g.clone(), (0..t).map(BigInt::from).collect()));
            }
            let total = ranges
                .iter()
                .try_fold(1u128, |acc, (_, c)| acc.checked_mul(c.len() as u128))
                .unwrap_or(u128::MAX);
            if total > MAX_COMPONENTS {
                return Err(Error::TooManyComponents(total));
            }
            let rank = if r == 0 { coh.h0_basis.rows() } else { r };
            let mut out = vec![vec![BigInt::zero(); rank]];
            for (g, coeffs) in &ranges {
                out = out
                    .into_iter()
                    .flat_map(|v| {
                        coeffs.iter().map(move |c| {
                            v.iter().zip(g).map(|(a, x)| a + c * x).collect::<Vec<_>>()
                        })
                    })
                    .collect();
            }
            Ok(out)
        }
    }
}

/// One block per selected component. Components are processed in parallel; the
/// output order follows the selection.
pub fn block_report(input: &LevelInput, components: &ComponentSelection) -> Result<Vec<GerbeBlock>> {
    let coh = twisted_cohomology(&input.rho)?;
    let omega = PairingContext::from_cohomology(&input.rho, &coh).pairing(&input.symmetric())?;
    let (radical_rank, block_dim) = if omega.free_block().iter().flatten().all(|x| x.is_zero()) {
        (omega.free_count, BigInt::one())
    } else {
        heisenberg_block(&omega.free_block())?
    };
    let reps = enumerate_components(&coh, components)?;
    reps.par_iter()
        .map(|d| {
            Ok(GerbeBlock {
                component: d.clone(),
                omega: omega.values.clone(),
                pi2_character: pi2_character_with(input, &coh, d)?,
                radical_rank,
                block_dim: block_dim.clone(),
            })
        })
        .collect()
}

/// Section-space invariants and blocks, labelled as invariants of the moduli of
/// T-bundles: components by first Chern class in `H^2`, and the degree-0
/// component's homotopy groups `H^1`, `H^0` in degrees 1 and 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BunTReport {
    pub pi0_bun_t: FgAbGroup,
    pub pi1_bun_t_degree_zero: FgAbGroup,
    pub pi2_bun_t_degree_zero: FgAbGroup,
    pub component_label: String,
    pub identification_holds: bool,
    pub blocks: Vec<GerbeBlock>,
}

pub fn bunt_report(input: &LevelInput, components: &ComponentSelection) -> Result<BunTReport> {
    let coh = twisted_cohomology(&input.rho)?;
    let section = section_space(&input.rho)?;
    let holds = section.pi0 == coh.h2 && section.pi1 == coh.h1 && section.pi2 == coh.h0;
    if !holds {
        return Err(Error::InvariantViolation(
            "section space and Bun_T invariants disagree".into(),
        ));
    }
    Ok(BunTReport {
        pi0_bun_t: coh.h2.clone(),
        pi1_bun_t_degree_zero: coh.h1.clone(),
        pi2_bun_t_degree_zero: coh.h0.clone(),
        component_label: "first Chern class in H^2(Sigma, Lambda)".into(),
        identification_holds: holds,
        blocks: block_report(input, components)?,
    })
}
