//! The fiber category as computable data.
//!
//! Every simple object is one-dimensional and indexed by a lattice vector, so the
//! braided and ribbon structure reduces to phases in Q/Z: a braiding `c(l, m)`,
//! its double `c(l, m) + c(m, l)`, and the twist `theta(l)`. The associator is
//! taken to be trivial.

use std::collections::BTreeMap;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::frac::Frac1;

/// A braiding phase on lattice-graded one-dimensional simples.
pub trait BraidingPhase {
    fn rank(&self) -> usize;

    /// The scalar by which the braiding `V^l (x) V^m -> V^m (x) V^l` acts.
    fn phase(&self, lambda: &[i64], mu: &[i64]) -> Result<Frac1>;
}

/// A quadratic form together with a bilinear refinement `beta` of its polarization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BraidedData {
    quadratic: QuadraticForm,
    beta: Vec<Vec<Frac1>>,
}

impl BraidedData {
    /// Validates `beta[i][i] = Q(e_i)` and `beta[i][j] + beta[j][i] = b(e_i, e_j)`.
    pub fn new(quadratic: QuadraticForm, beta: Vec<Vec<Frac1>>) -> Result<Self> {
        let r = quadratic.rank();
        if beta.len() != r || beta.iter().any(|row| row.len() != r) {
            return Err(Error::InvalidRefinement(format!("beta must be {r}x{r}")));
        }
        for i in 0..r {
            if beta[i][i] != quadratic.diag()[i] {
                return Err(Error::InvalidRefinement(format!(
                    "beta[{i}][{i}] = {} but Q(e_{i}) = {}",
                    beta[i][i],
                    quadratic.diag()[i]
                )));
            }
            for j in i + 1..r {
                if beta[i][j] + beta[j][i] != quadratic.pair(i, j) {
                    return Err(Error::InvalidRefinement(format!(
                        "beta[{i}][{j}] + beta[{j}][{i}] differs from b(e_{i}, e_{j})"
                    )));
                }
            }
        }
        Ok(BraidedData { quadratic, beta })
    }

    pub fn quadratic(&self) -> &QuadraticForm {
        &self.quadratic
    }

    pub fn beta(&self) -> &[Vec<Frac1>] {
        &self.beta
    }

    /// Shifts `beta` by `zeta * a` for an antisymmetric integer matrix `a` with zero
    /// diagonal. The result is again a refinement of the same form.
    pub fn perturbed(&self, a: &[Vec<i64>], zeta: Frac1) -> Result<Self> {
        let r = self.rank();
        let mut beta = self.beta.clone();
        for i in 0..r {
            for j in 0..r {
                if a[i][j] != -a[j][i] {
                    return Err(Error::InvalidRefinement(
                        "perturbation must be antisymmetric".into(),
                    ));
                }
                beta[i][j] += zeta.scale(a[i][j]);
            }
        }
        BraidedData::new(self.quadratic.clone(), beta)
    }

    fn check(&self, v: &[i64]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `c(l1, l2) + c(l2, l1)`.
    pub fn double_braiding(&self, l1: &[i64], l2: &[i64]) -> Result<Frac1> {
        Ok(self.phase(l1, l2)? + self.phase(l2, l1)?)
    }

    /// The ribbon twist on `V^lambda`, computed as the self-braiding `c(lambda, lambda)`.
    pub fn twist(&self, lambda: &[i64]) -> Result<Frac1> {
        self.phase(lambda, lambda)
    }

    /// Balancing axiom: `theta(l1 + l2) - theta(l1) - theta(l2)` is the double braiding.
    pub fn balancing_check(&self, l1: &[i64], l2: &[i64]) -> Result<bool> {
        self.check(l1)?;
        self.check(l2)?;
        let sum: Vec<i64> = l1.iter().zip(l2).map(|(a, b)| a + b).collect();
        let lhs = self.twist(&sum)? - self.twist(l1)? - self.twist(l2)?;
        Ok(lhs == self.double_braiding(l1, l2)?)
    }
}

impl BraidingPhase for BraidedData {
    fn rank(&self) -> usize {
        self.quadratic.rank()
    }

    fn phase(&self, lambda: &[i64], mu: &[i64]) -> Result<Frac1> {
        self.check(lambda)?;
        self.check(mu)?;
        let mut acc = Frac1::ZERO;
        for (i, &li) in lambda.iter().enumerate() {
            if li == 0 {
                continue;
            }
            for (j, &mj) in mu.iter().enumerate() {
                acc += self.beta[i][j].scale(li.wrapping_mul(mj));
            }
        }
        Ok(acc)
    }
}

/// Upper-triangular refinement: `beta[i][i] = Q(e_i)`, `beta[i][j] = b(e_i, e_j)` for
/// `i < j`, zero below the diagonal.
pub fn standard_refinement(q: &QuadraticForm) -> BraidedData {
    let r = q.rank();
    let mut beta = vec![vec![Frac1::ZERO; r]; r];
    for i in 0..r {
        beta[i][i] = q.diag()[i];
        for j in i + 1..r {
            beta[i][j] = q.pair(i, j);
        }
    }
    BraidedData {
        quadratic: q.clone(),
        beta,
    }
}

pub fn braiding_phase(b: &BraidedData, lambda: &[i64], mu: &[i64]) -> Result<Frac1> {
    b.phase(lambda, mu)
}

/// Hexagon axioms for a pointed category with trivial associator: the braiding
/// phase is additive in each argument.
pub fn hexagon_check<B: BraidingPhase + ?Sized>(
    b: &B,
    l1: &[i64],
    l2: &[i64],
    l3: &[i64],
) -> Result<bool> {
    let add = |x: &[i64], y: &[i64]| -> Vec<i64> { x.iter().zip(y).map(|(a, c)| a + c).collect() };
    let left = b.phase(&add(l1, l2), l3)? == b.phase(l1, l3)? + b.phase(l2, l3)?;
    let right = b.phase(l1, &add(l2, l3))? == b.phase(l1, l2)? + b.phase(l1, l3)?;
    Ok(left && right)
}

/// A finitely supported lattice-graded object: grade -> multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedObject {
    rank: usize,
    support: BTreeMap<Vec<i64>, u64>,
}

#[derive(Serialize, Deserialize)]
struct GradedEntry {
    lambda: Vec<i64>,
    mult: u64,
}

impl GradedObject {
    pub fn new(rank: usize, entries: impl IntoIterator<Item = (Vec<i64>, u64)>) -> Result<Self> {
        let mut support = BTreeMap::new();
        for (lambda, mult) in entries {
            if lambda.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: lambda.len(),
                });
            }
            if mult == 0 {
                continue;
            }
            let slot: &mut u64 = support.entry(lambda).or_default();
            *slot = slot.checked_add(mult).ok_or(Error::MultiplicityOverflow)?;
        }
        Ok(GradedObject { rank, support })
    }

    /// The monoidal unit: multiplicity one in degree zero.
    pub fn unit(rank: usize) -> Self {
        GradedObject {
            rank,
            support: BTreeMap::from([(vec![0; rank], 1)]),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn multiplicity(&self, lambda: &[i64]) -> u64 {
        self.support.get(lambda).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Vec<i64>, u64)> {
        self.support.iter().map(|(k, &v)| (k, v))
    }

    /// Reads the `[{lambda, mult}, ...]` list form.
    pub fn from_json(rank: usize, value: &serde_json::Value) -> Result<Self> {
        let entries: Vec<GradedEntry> = serde_json::from_value(value.clone())
            .map_err(|e| Error::ShapeMismatch(format!("graded object: {e}")))?;
        Self::new(rank, entries.into_iter().map(|e| (e.lambda, e.mult)))
    }
}

impl Serialize for GradedObject {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.support.len()))?;
        for (lambda, &mult) in &self.support {
            seq.serialize_element(&GradedEntry {
                lambda: lambda.clone(),
                mult,
            })?;
        }
        seq.end()
    }
}

/// Tensor product: convolution of supports.
pub fn fuse(v: &GradedObject, w: &GradedObject) -> Result<GradedObject> {
    if v.rank != w.rank {
        return Err(Error::DimensionMismatch {
            expected: v.rank,
            found: w.rank,
        });
    }
    let mut support: BTreeMap<Vec<i64>, u64> = BTreeMap::new();
    for (mu, &a) in &v.support {
        for (nu, &b) in &w.support {
            let lambda: Vec<i64> = mu.iter().zip(nu).map(|(x, y)| x + y).collect();
            let m = a.checked_mul(b).ok_or(Error::MultiplicityOverflow)?;
            let slot = support.entry(lambda).or_default();
            *slot = slot.checked_add(m).ok_or(Error::MultiplicityOverflow)?;
        }
    }
    Ok(GradedObject {
        rank: v.rank,
        support,
    })
}
