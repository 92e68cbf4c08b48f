//! Q/Z-valued quadratic and symmetric bilinear forms on lattices.
//!
//! A level is classified up to isomorphism by its quadratic form `Q`; the
//! polarization `b(x, y) = Q(x + y) - Q(x) - Q(y)` measures its failure to be
//! linear, and vanishes exactly for levels that lift to commutative ones.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frac::Frac1;
use crate::lattice::IntMatrix;

/// An integer matrix `c` together with a value `zeta`; the form `(x, y) -> zeta * x^T c y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BilinearData {
    pub c: IntMatrix,
    pub zeta: Frac1,
}

impl BilinearData {
    pub fn new(c: IntMatrix, zeta: Frac1) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NonSquareMatrix {
                rows: c.rows(),
                cols: c.cols(),
            });
        }
        Ok(BilinearData { c, zeta })
    }

    pub fn rank(&self) -> usize {
        self.c.rows()
    }
}

/// Q/Z-valued quadratic form, stored by its values on basis vectors and the
/// polarization on pairs of distinct basis vectors.
///
/// A Q/Z-valued quadratic form need not be half of a bilinear form, so `diag`
/// is kept separately from `offdiag`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticForm {
    rank: usize,
    /// `diag[i] = Q(e_i)`
    diag: Vec<Frac1>,
    /// `b(e_i, e_j)` for `i < j`, row-major over the strict upper triangle.
    offdiag: Vec<Frac1>,
}

fn upper_index(rank: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < rank);
    i * rank - i * (i + 1) / 2 + (j - i - 1)
}

impl QuadraticForm {
    pub fn new(rank: usize, diag: Vec<Frac1>, offdiag: Vec<Frac1>) -> Result<Self> {
        if diag.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: diag.len(),
            });
        }
        let pairs = rank * rank.saturating_sub(1) / 2;
        if offdiag.len() != pairs {
            return Err(Error::DimensionMismatch {
                expected: pairs,
                found: offdiag.len(),
            });
        }
        Ok(QuadraticForm {
            rank,
            diag,
            offdiag,
        })
    }

    pub fn zero(rank: usize) -> Self {
        QuadraticForm {
            rank,
            diag: vec![Frac1::ZERO; rank],
            offdiag: vec![Frac1::ZERO; rank * rank.saturating_sub(1) / 2],
        }
    }

    /// Builds `Q` from a symmetric matrix of off-diagonal polarization values (the
    /// diagonal of `pairs` is ignored) and the basis values `diag`.
    pub fn from_parts(diag: Vec<Frac1>, pairs: &[Vec<Frac1>]) -> Result<Self> {
        let rank = diag.len();
        let mut offdiag = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                offdiag.push(pairs[i][j]);
            }
        }
        Self::new(rank, diag, offdiag)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn diag(&self) -> &[Frac1] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[Frac1] {
        &self.offdiag
    }

    /// `b(e_i, e_j)` for `i != j`, or `2 Q(e_i)` on the diagonal.
    pub fn pair(&self, i: usize, j: usize) -> Frac1 {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => self.diag[i].scale(2),
            std::cmp::Ordering::Less => self.offdiag[upper_index(self.rank, i, j)],
            std::cmp::Ordering::Greater => self.offdiag[upper_index(self.rank, j, i)],
        }
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: n,
            });
        }
        Ok(())
    }

    /// `Q(sum x_i e_i) = sum x_i^2 Q(e_i) + sum_{i<j} x_i x_j b(e_i, e_j)`.
    pub fn evaluate(&self, gamma: &[i64]) -> Result<Frac1> {
        self.check_len(gamma.len())?;
        let mut acc = Frac1::ZERO;
        for i in 0..self.rank {
            let xi = gamma[i] as i128;
            acc += scale_i128(self.diag[i], xi * xi);
            for j in i + 1..self.rank {
                acc += scale_i128(self.pair(i, j), xi * gamma[j] as i128);
            }
        }
        Ok(acc)
    }

    pub fn evaluate_big(&self, gamma: &[BigInt]) -> Result<Frac1> {
        self.check_len(gamma.len())?;
        let mut acc = Frac1::ZERO;
        for i in 0..self.rank {
            acc += self.diag[i].scale_big(&(&gamma[i] * &gamma[i]));
            for j in i + 1..self.rank {
                acc += self.pair(i, j).scale_big(&(&gamma[i] * &gamma[j]));
            }
        }
        Ok(acc)
    }

    pub fn polarize(&self) -> SymmetricForm {
        let entries = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.pair(i, j)).collect())
            .collect();
        SymmetricForm {
            rank: self.rank,
            entries,
        }
    }

    /// True iff the polarization vanishes identically.
    pub fn is_linear(&self) -> bool {
        self.diag.iter().all(|q| q.scale(2).is_zero()) && self.offdiag.iter().all(|b| b.is_zero())
    }

    /// A level lifts to a commutative one exactly when its symmetric form vanishes.
    pub fn is_e_infinity_liftable(&self) -> bool {
        self.is_linear()
    }

    /// Pointwise sum of two forms of the same rank (addition of levels).
    pub fn checked_add(&self, other: &QuadraticForm) -> Result<QuadraticForm> {
        other.check_len(self.rank)?;
        Ok(QuadraticForm {
            rank: self.rank,
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| *a + *b).collect(),
            offdiag: self
                .offdiag
                .iter()
                .zip(&other.offdiag)
                .map(|(a, b)| *a + *b)
                .collect(),
        })
    }

    /// Index of the first matrix in `mats` under which `Q` is not invariant.
    ///
    /// Testing basis vectors and pairwise sums suffices: `Q` is determined by
    /// those values through the polarization identity.
    pub fn first_non_invariant(&self, mats: &[IntMatrix]) -> Result<Option<usize>> {
        for (idx, a) in mats.iter().enumerate() {
            if !a.is_square() || a.rows() != self.rank {
                return Err(Error::DimensionMismatch {
                    expected: self.rank,
                    found: a.rows(),
                });
            }
            if !a.is_unimodular() {
                return Err(Error::NonInvertibleMonodromy { index: idx });
            }
            let cols = a.columns();
            for i in 0..self.rank {
                if self.evaluate_big(&cols[i])? != self.diag[i] {
                    return Ok(Some(idx));
                }
                for j in i + 1..self.rank {
                    let image: Vec<BigInt> =
                        cols[i].iter().zip(&cols[j]).map(|(x, y)| x + y).collect();
                    let expected = self.diag[i] + self.diag[j] + self.pair(i, j);
                    if self.evaluate_big(&image)? != expected {
                        return Ok(Some(idx));
                    }
                }
            }
        }
        Ok(None)
    }
}

fn scale_i128(f: Frac1, k: i128) -> Frac1 {
    let k = k.rem_euclid(f.den() as i128);
    Frac1::new(k * f.num() as i128, f.den())
}

impl fmt::Debug for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(diag={:?}, offdiag={:?})", self.diag, self.offdiag)
    }
}

/// Symmetric Q/Z-valued bilinear form given by its Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymmetricForm {
    pub rank: usize,
    pub entries: Vec<Vec<Frac1>>,
}

impl SymmetricForm {
    pub fn zero(rank: usize) -> Self {
        SymmetricForm {
            rank,
            entries: vec![vec![Frac1::ZERO; rank]; rank],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_zero())
    }

    pub fn eval(&self, x: &[i64], y: &[i64]) -> Result<Frac1> {
        let x: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let y: Vec<BigInt> = y.iter().map(|&v| BigInt::from(v)).collect();
        self.eval_big(&x, &y)
    }

    pub fn eval_big(&self, x: &[BigInt], y: &[BigInt]) -> Result<Frac1> {
        for n in [x.len(), y.len()] {
            if n != self.rank {
                return Err(Error::DimensionMismatch {
                    expected: self.rank,
                    found: n,
                });
            }
        }
        let mut acc = Frac1::ZERO;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += self.entries[i][j].scale_big(&(xi * yj));
            }
        }
        Ok(acc)
    }
}

/// `Q(x) = zeta * x^T c x`.
pub fn quad_from_bilinear(data: &BilinearData) -> Result<QuadraticForm> {
    let c = &data.c;
    if !c.is_square() {
        return Err(Error::NonSquareMatrix {
            rows: c.rows(),
            cols: c.cols(),
        });
    }
    let r = c.rows();
    let diag = (0..r).map(|i| data.zeta.scale_big(&c[(i, i)])).collect();
    let mut offdiag = Vec::with_capacity(r * r.saturating_sub(1) / 2);
    for i in 0..r {
        for j in i + 1..r {
            offdiag.push(data.zeta.scale_big(&(&c[(i, j)] + &c[(j, i)])));
        }
    }
    QuadraticForm::new(r, diag, offdiag)
}

/// Automorphism layer of a level: `Hom(Lambda, Q/Z)`, which is `(Q/Z)^rank`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi2Layer {
    pub description: String,
    pub copies_of_q_mod_z: usize,
}

/// Homotopy-type classification of a level: its isomorphism class is `Q`, its
/// automorphisms are `(Q/Z)^rank`, and it is commutative iff `b = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelClassReport {
    pub quadratic_form: QuadraticForm,
    pub symmetric_form: SymmetricForm,
    pub pi2_layer: Pi2Layer,
    pub e_infinity: bool,
}

pub fn level_classify(q: &QuadraticForm) -> LevelClassReport {
    LevelClassReport {
        quadratic_form: q.clone(),
        symmetric_form: q.polarize(),
        pi2_layer: Pi2Layer {
            description: format!("Hom(Lambda, Q/Z) = (Q/Z)^{}", q.rank()),
            copies_of_q_mod_z: q.rank(),
        },
        e_infinity: q.is_linear(),
    }
}

/// True iff `Q(A x) = Q(x)` for every `A` in `mats`.
pub fn invariance_check(q: &QuadraticForm, mats: &[IntMatrix]) -> Result<bool> {
    Ok(q.first_non_invariant(mats)?.is_none())
}
