//! Exact integer linear algebra.
//!
//! Dense matrices over arbitrary-precision integers, the Smith normal form with
//! transformation matrices, and finitely generated abelian groups in
//! invariant-factor form. Every cohomology and quotient computation in the crate
//! goes through [`smith_normal_form`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row-major entries. Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        IntMatrix { rows, cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Builds a matrix from a list of equal-length rows. An empty list gives a 0x0 matrix.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| BigInt::from(x)));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    /// Rows as `i64`, or `None` if some entry does not fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut m = Self::zeros(self.rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Rows `r0..r1`, all columns.
    pub fn row_block(&self, r0: usize, r1: usize) -> Self {
        IntMatrix {
            rows: r1 - r0,
            cols: self.cols,
            data: self.data[r0 * self.cols..r1 * self.cols].to_vec(),
        }
    }

    /// Columns `c0..c1`, all rows.
    pub fn col_block(&self, c0: usize, c1: usize) -> Self {
        let mut m = Self::zeros(self.rows, c1 - c0);
        for i in 0..self.rows {
            for j in c0..c1 {
                m[(i, j - c0)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Inverse of a unimodular matrix, `None` if the matrix is not square or `|det| != 1`.
    pub fn inverse_unimodular(&self) -> Option<IntMatrix> {
        if !self.is_square() {
            return None;
        }
        let snf = smith_normal_form(self);
        if snf.diagonal().iter().any(|d| !d.is_one()) || snf.rank() != self.rows {
            return None;
        }
        // U A V = I  =>  A^{-1} = V U
        Some(&snf.v * &snf.u)
    }

    /// `|det|`, via the Smith diagonal. Requires a square matrix.
    pub fn abs_det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NonSquareMatrix {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let snf = smith_normal_form(self);
        if snf.rank() < self.rows {
            return Ok(BigInt::zero());
        }
        Ok(snf.diagonal().iter().product())
    }

    pub fn is_unimodular(&self) -> bool {
        matches!(self.abs_det(), Ok(d) if d.is_one())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.data[src * self.cols + j] * k;
            self.data[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.data[i * self.cols + src] * k;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[r * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, c: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + c];
            *x = -std::mem::take(x);
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;
    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;
    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &IntMatrix {
    type Output = IntMatrix;
    fn neg(self) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix({}x{})[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    /// Serialized as a list of rows.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<BigIntJson>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(BigIntJson).collect())
            .collect();
        rows.serialize(serializer)
    }
}

/// Serializes a `BigInt` as a JSON number when it fits in `i64`, otherwise as a decimal string.
pub(crate) struct BigIntJson<'a>(pub &'a BigInt);

impl Serialize for BigIntJson<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(x) => serializer.serialize_i64(x),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}

pub(crate) fn serialize_bigint_vec<S: Serializer>(
    v: &[BigInt],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(BigIntJson).collect::<Vec<_>>().serialize(serializer)
}

/// Smith normal form `U * A * V = D`.
///
/// `u_inv` is carried along so that quotient generators (columns of `U^{-1}`)
/// are available without a second decomposition.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    /// The `min(rows, cols)` diagonal entries of `D`, including trailing zeros.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with unimodular transforms.
///
/// Pivots are chosen by minimal absolute value. Works for any shape, including
/// empty matrices.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    // Row operations are mirrored on `u` (left) and inversely on `u_inv` (right);
    // column operations on `v`.
    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = min_abs_entry(&d, t) else {
                return SnfResult { u, u_inv, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d[(t, t)].clone();
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&pivot);
                let neg_q = -&q;
                d.add_row_multiple(i, t, &neg_q);
                u.add_row_multiple(i, t, &neg_q);
                u_inv.add_col_multiple(t, i, &q);
                dirty |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&pivot);
                let neg_q = -&q;
                d.add_col_multiple(j, t, &neg_q);
                v.add_col_multiple(j, t, &neg_q);
                dirty |= !d[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Pivot row and column are clear; enforce the divisibility chain.
            let bad_row = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot))
            });
            match bad_row {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                    u_inv.add_col_multiple(i, t, &-one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }
    SnfResult { u, u_inv, d, v }
}

fn min_abs_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().map_or(true, |(_, _, b)| ax < *b) {
                let done = ax.is_one();
                best = Some((i, j, ax));
                if done {
                    return best.map(|(i, j, _)| (i, j));
                }
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Finitely generated abelian group `Z^free_rank + Z/t_1 + ... + Z/t_k` with `t_1 | t_2 | ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn trivial() -> Self {
        FgAbGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    /// Canonicalizes arbitrary cyclic factors into invariant-factor form.
    pub fn from_cyclic_factors(free_rank: usize, factors: &[BigInt]) -> Self {
        let n = factors.len();
        let mut diag = IntMatrix::zeros(n, n);
        for (i, f) in factors.iter().enumerate() {
            diag[(i, i)] = f.clone();
        }
        let mut g = cokernel(&diag);
        g.free_rank += free_rank;
        g
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            k => parts.push(format!("Z^{k}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z/{t}")));
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for FgAbGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let torsion: Vec<BigIntJson> = self.torsion.iter().map(BigIntJson).collect();
        let mut s = serializer.serialize_struct("FgAbGroup", 2)?;
        s.serialize_field("free_rank", &self.free_rank)?;
        s.serialize_field("torsion", &torsion)?;
        s.end()
    }
}

/// `Z^rows / image(A)`.
pub fn cokernel(a: &IntMatrix) -> FgAbGroup {
    quotient_from_snf(a.rows(), &smith_normal_form(a)).group
}

/// Columns form a saturated Z-basis of `ker(A)`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.col_block(r, a.cols())
}

/// A quotient group together with explicit generators in ambient coordinates.
///
/// Free generators come first, then torsion generators, one per invariant factor
/// (so `torsion_gens[i]` has order `group.torsion[i]`).
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub group: FgAbGroup,
    pub free_gens: Vec<Vec<BigInt>>,
    pub torsion_gens: Vec<Vec<BigInt>>,
}

impl QuotientPresentation {
    /// All generators, free first.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        self.free_gens
            .iter()
            .chain(&self.torsion_gens)
            .cloned()
            .collect()
    }
}

/// `Z^rows / image(A)` with generators.
pub fn cokernel_presentation(a: &IntMatrix) -> QuotientPresentation {
    quotient_from_snf(a.rows(), &smith_normal_form(a))
}

fn quotient_from_snf(rows: usize, snf: &SnfResult) -> QuotientPresentation {
    // Z^rows / im(A) = U^{-1} (Z^rows / im D); generators are columns of U^{-1}.
    let diag = snf.diagonal();
    let mut torsion = Vec::new();
    let mut torsion_gens = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if !d.is_zero() && !d.is_one() {
            torsion.push(d.clone());
            torsion_gens.push(snf.u_inv.column(i));
        }
    }
    let rank = snf.rank();
    let free_gens = (rank..rows).map(|i| snf.u_inv.column(i)).collect::<Vec<_>>();
    QuotientPresentation {
        group: FgAbGroup {
            free_rank: rows - rank,
            torsion,
        },
        free_gens,
        torsion_gens,
    }
}

/// `span(ker_basis) / span(img_gens)` where both are given as column matrices in `Z^n`.
pub fn subquotient(ker_basis: &IntMatrix, img_gens: &IntMatrix) -> Result<FgAbGroup> {
    subquotient_presentation(ker_basis, img_gens).map(|p| p.group)
}

/// Like [`subquotient`], with generators expressed in ambient `Z^n` coordinates.
pub fn subquotient_presentation(
    ker_basis: &IntMatrix,
    img_gens: &IntMatrix,
) -> Result<QuotientPresentation> {
    let coords = solve_in_basis(ker_basis, img_gens)?;
    let inner = cokernel_presentation(&coords);
    let lift = |g: &Vec<BigInt>| ker_basis.mul_vec(g);
    Ok(QuotientPresentation {
        group: inner.group,
        free_gens: inner.free_gens.iter().map(lift).collect(),
        torsion_gens: inner.torsion_gens.iter().map(lift).collect(),
    })
}

/// Solves `K X = B` over Z for `K` with independent columns.
fn solve_in_basis(k: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if k.rows() != b.rows() {
        return Err(Error::DimensionMismatch {
            expected: k.rows(),
            found: b.rows(),
        });
    }
    let snf = smith_normal_form(k);
    if snf.rank() != k.cols() {
        return Err(Error::InvariantViolation(
            "kernel basis columns are linearly dependent".into(),
        ));
    }
    // D (V^{-1} X) = U B
    let ub = &snf.u * b;
    let diag = snf.diagonal();
    let mut y = IntMatrix::zeros(k.cols(), b.cols());
    for i in 0..k.rows() {
        for j in 0..b.cols() {
            let rhs = &ub[(i, j)];
            if i < k.cols() {
                let (q, r) = rhs.div_rem(&diag[i]);
                if !r.is_zero() {
                    return Err(Error::ImageNotInKernel);
                }
                y[(i, j)] = q;
            } else if !rhs.is_zero() {
                return Err(Error::ImageNotInKernel);
            }
        }
    }
    Ok(&snf.v * &y)
}
