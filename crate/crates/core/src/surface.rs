//! Surface groups, lattice local systems, and twisted cohomology via Fox calculus.
//!
//! The closed genus-g surface is modeled by its one-relator presentation (one
//! 0-cell, 2g 1-cells, one 2-cell). Since the surface is aspherical, the
//! cohomology of this complex with coefficients in a monodromy representation is
//! the sheaf cohomology of the corresponding local system.
//!
//! Conventions: cochains are crossed homomorphisms `f(uv) = f(u) + rho(u) f(v)`,
//! `d0 m = (rho(x_j) m - m)_j`, and `d1 f = sum_j (dR/dx_j) f(x_j)`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{
    cokernel, cokernel_presentation, kernel_basis, subquotient_presentation, FgAbGroup, IntMatrix,
    QuotientPresentation,
};

/// A generator or its inverse. Generators are numbered `a_1 = 0, b_1 = 1, a_2 = 2, ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter {
            generator,
            inverse: false,
        }
    }

    pub fn neg(generator: usize) -> Self {
        Letter {
            generator,
            inverse: true,
        }
    }
}

/// `"a1"`, `"b1"`, `"a2"`, ...
pub fn generator_label(index: usize) -> String {
    let kind = if index % 2 == 0 { 'a' } else { 'b' };
    format!("{kind}{}", index / 2 + 1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceGroup {
    pub genus: usize,
    /// `a_1 b_1 a_1^-1 b_1^-1 ... a_g b_g a_g^-1 b_g^-1`
    pub relator: Vec<Letter>,
}

impl SurfaceGroup {
    pub fn new(genus: usize) -> Self {
        let relator = (0..genus)
            .flat_map(|i| {
                let (a, b) = (2 * i, 2 * i + 1);
                [Letter::pos(a), Letter::pos(b), Letter::neg(a), Letter::neg(b)]
            })
            .collect();
        SurfaceGroup { genus, relator }
    }

    pub fn generator_count(&self) -> usize {
        2 * self.genus
    }
}

/// Monodromy representation of the surface group on `Z^rank`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeLocalSystem {
    rank: usize,
    group: SurfaceGroup,
    monodromy: Vec<IntMatrix>,
    inverses: Vec<IntMatrix>,
}

impl LatticeLocalSystem {
    /// Validates unimodularity of every matrix and the surface relation.
    pub fn new(genus: usize, rank: usize, monodromy: Vec<IntMatrix>) -> Result<Self> {
        if monodromy.len() != 2 * genus {
            return Err(Error::WrongMonodromyCount {
                genus,
                expected: 2 * genus,
                found: monodromy.len(),
            });
        }
        let mut inverses = Vec::with_capacity(monodromy.len());
        for (index, m) in monodromy.iter().enumerate() {
            if !m.is_square() || m.rows() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: if m.rows() != rank { m.rows() } else { m.cols() },
                });
            }
            inverses.push(m.inverse_unimodular().ok_or(Error::NonUnimodular { index })?);
        }
        let sys = LatticeLocalSystem {
            rank,
            group: SurfaceGroup::new(genus),
            monodromy,
            inverses,
        };
        if sys.word_matrix(&sys.group.relator) != IntMatrix::identity(rank) {
            return Err(Error::RelationViolated);
        }
        Ok(sys)
    }

    pub fn trivial(genus: usize, rank: usize) -> Self {
        Self::new(genus, rank, vec![IntMatrix::identity(rank); 2 * genus])
            .expect("trivial monodromy is valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn genus(&self) -> usize {
        self.group.genus
    }

    pub fn group(&self) -> &SurfaceGroup {
        &self.group
    }

    pub fn monodromy(&self) -> &[IntMatrix] {
        &self.monodromy
    }

    pub fn is_trivial(&self) -> bool {
        self.monodromy.iter().all(|m| *m == IntMatrix::identity(self.rank))
    }

    pub fn letter_matrix(&self, l: Letter) -> &IntMatrix {
        if l.inverse {
            &self.inverses[l.generator]
        } else {
            &self.monodromy[l.generator]
        }
    }

    /// `rho(w)` for a word `w`.
    pub fn word_matrix(&self, word: &[Letter]) -> IntMatrix {
        word.iter()
            .fold(IntMatrix::identity(self.rank), |acc, &l| &acc * self.letter_matrix(l))
    }

    /// The dual system `rho(x)^{-T}`.
    pub fn dual(&self) -> Self {
        let monodromy = self.inverses.iter().map(IntMatrix::transpose).collect();
        Self::new(self.genus(), self.rank, monodromy).expect("dual of a valid system is valid")
    }

    /// `P rho(x) P^{-1}` for unimodular `P`.
    pub fn conjugate(&self, p: &IntMatrix) -> Result<Self> {
        let p_inv = p
            .inverse_unimodular()
            .ok_or(Error::NonUnimodular { index: 0 })?;
        let monodromy = self.monodromy.iter().map(|m| &(p * m) * &p_inv).collect();
        Self::new(self.genus(), self.rank, monodromy)
    }
}

/// Fox derivative `d(word)/d(x_gen)` evaluated through `rho`.
pub fn fox_derivative(word: &[Letter], gen: usize, rho: &LatticeLocalSystem) -> Result<IntMatrix> {
    let n = rho.group.generator_count();
    if gen >= n {
        return Err(Error::BadGeneratorIndex {
            index: gen,
            genus: rho.genus(),
        });
    }
    if let Some(l) = word.iter().find(|l| l.generator >= n) {
        return Err(Error::BadGeneratorIndex {
            index: l.generator,
            genus: rho.genus(),
        });
    }
    let r = rho.rank();
    let mut prefix = IntMatrix::identity(r);
    let mut acc = IntMatrix::zeros(r, r);
    for &l in word {
        if l.generator == gen {
            // d(x)/dx = 1, d(x^-1)/dx = -x^-1
            acc = if l.inverse {
                &acc - &(&prefix * rho.letter_matrix(l))
            } else {
                &acc + &prefix
            };
        }
        prefix = &prefix * rho.letter_matrix(l);
    }
    Ok(acc)
}

/// `Z^r --d0--> Z^{2g r} --d1--> Z^r`.
#[derive(Clone, Debug)]
pub struct CochainComplexSurface {
    pub d0: IntMatrix,
    pub d1: IntMatrix,
}

pub fn build_complex(rho: &LatticeLocalSystem) -> Result<CochainComplexSurface> {
    let r = rho.rank();
    if rho.word_matrix(&rho.group.relator) != IntMatrix::identity(r) {
        return Err(Error::RelationViolated);
    }
    let id = IntMatrix::identity(r);
    let mut d0 = IntMatrix::zeros(0, r);
    let mut d1 = IntMatrix::zeros(r, 0);
    for j in 0..rho.group.generator_count() {
        d0 = d0.vstack(&(&rho.monodromy[j] - &id));
        d1 = d1.hstack(&fox_derivative(&rho.group.relator, j, rho)?);
    }
    if !(&d1 * &d0).is_zero() {
        return Err(Error::InvariantViolation("d1 * d0 != 0".into()));
    }
    Ok(CochainComplexSurface { d0, d1 })
}

/// `H^0`, `H^1`, `H^2` together with explicit representatives.
#[derive(Clone, Debug)]
pub struct TwistedCohomology {
    pub h0: FgAbGroup,
    pub h1: FgAbGroup,
    pub h2: FgAbGroup,
    /// Columns form a basis of the invariant sublattice.
    pub h0_basis: IntMatrix,
    /// Generators as cocycle vectors in `Z^{2g r}` (values on `a_1, b_1, ...`).
    pub h1_presentation: QuotientPresentation,
    /// Generators as vectors in `Z^r` representing coinvariant classes.
    pub h2_presentation: QuotientPresentation,
    pub complex: CochainComplexSurface,
}

impl TwistedCohomology {
    pub fn euler_characteristic(&self) -> i64 {
        self.h0.free_rank as i64 - self.h1.free_rank as i64 + self.h2.free_rank as i64
    }
}

pub fn twisted_cohomology(rho: &LatticeLocalSystem) -> Result<TwistedCohomology> {
    let complex = build_complex(rho)?;
    let h0_basis = kernel_basis(&complex.d0);
    let z1 = kernel_basis(&complex.d1);
    let h1_presentation = subquotient_presentation(&z1, &complex.d0)?;
    let h2_presentation = cokernel_presentation(&complex.d1);
    Ok(TwistedCohomology {
        h0: FgAbGroup::free(h0_basis.cols()),
        h1: h1_presentation.group.clone(),
        h2: h2_presentation.group.clone(),
        h0_basis,
        h1_presentation,
        h2_presentation,
        complex,
    })
}

/// Cross-checks `H^0` against the invariant sublattice and `H^2` against the
/// coinvariant quotient, computed directly from the monodromy matrices.
pub fn invariants_coinvariants_check(rho: &LatticeLocalSystem) -> Result<bool> {
    let coh = twisted_cohomology(rho)?;
    let r = rho.rank();
    let id = IntMatrix::identity(r);
    let shifts: Vec<IntMatrix> = rho.monodromy().iter().map(|m| m - &id).collect();

    let mut stacked = IntMatrix::zeros(0, r);
    let mut side_by_side = IntMatrix::zeros(r, 0);
    for s in &shifts {
        stacked = stacked.vstack(s);
        side_by_side = side_by_side.hstack(s);
    }
    let invariants = FgAbGroup::free(kernel_basis(&stacked).cols());
    let coinvariants = cokernel(&side_by_side);
    Ok(invariants == coh.h0 && coinvariants == coh.h2)
}

/// Evaluates a crossed homomorphism, given by its values on generators, on a word.
pub fn crossed_hom_on_word(
    rho: &LatticeLocalSystem,
    values: &[Vec<BigInt>],
    word: &[Letter],
) -> Vec<BigInt> {
    let r = rho.rank();
    let mut prefix = IntMatrix::identity(r);
    let mut acc = vec![BigInt::from(0); r];
    for &l in word {
        let step = if l.inverse {
            // f(x^-1) = -rho(x)^-1 f(x)
            let v = rho.letter_matrix(l).mul_vec(&values[l.generator]);
            v.into_iter().map(|x| -x).collect()
        } else {
            values[l.generator].clone()
        };
        let moved = prefix.mul_vec(&step);
        acc.iter_mut().zip(moved).for_each(|(a, m)| *a += m);
        prefix = &prefix * rho.letter_matrix(l);
    }
    acc
}

/// Splits a cocycle vector in `Z^{2g r}` into per-generator values.
pub fn split_cocycle(rho: &LatticeLocalSystem, v: &[BigInt]) -> Vec<Vec<BigInt>> {
    v.chunks(rho.rank().max(1))
        .take(rho.group.generator_count())
        .map(<[BigInt]>::to_vec)
        .collect()
}

/// Input record for a local system: `{genus, rank, monodromy?}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceSummary {
    pub genus: usize,
    pub rank: usize,
    pub monodromy: Vec<IntMatrix>,
}

impl From<&LatticeLocalSystem> for SurfaceSummary {
    fn from(rho: &LatticeLocalSystem) -> Self {
        SurfaceSummary {
            genus: rho.genus(),
            rank: rho.rank(),
            monodromy: rho.monodromy.clone(),
        }
    }
}
