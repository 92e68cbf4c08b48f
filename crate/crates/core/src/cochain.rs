//! Simplicial model of the closed surface with twisted cochains and cup products.
//!
//! The 4g-gon is coned from an interior vertex, giving a Delta-complex with two
//! vertices (center and the common corner), 2g boundary loops, 4g radial edges
//! and 4g triangles. Cochains take values in the coordinates of the polygon: a
//! simplex that reaches the polygon through a group element `h` has its value
//! transported by `rho(h)`. This is an equivariant-cochain model on the universal
//! cover, so the coboundary and the Alexander-Whitney cup product are the
//! untwisted formulas applied to transported values.
//!
//! This module is deliberately independent of the closed-form pairing in
//! [`crate::global`]; it serves as the oracle for it.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::SymmetricForm;
use crate::frac::Frac1;
use crate::lattice::IntMatrix;
use crate::surface::{LatticeLocalSystem, Letter, SurfaceGroup};

pub const CENTER: usize = 0;
pub const CORNER: usize = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// The loop labelled by a generator, oriented along it.
    Boundary { generator: usize },
    /// From the center to polygon corner `k`.
    Radial { corner: usize },
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub kind: EdgeKind,
    pub tail: usize,
    pub head: usize,
    pub tail_transport: Vec<Letter>,
    pub head_transport: Vec<Letter>,
}

/// An ordered triangle `(v0, v1, v2)`. Faces are indexed `[front, long, back]`,
/// i.e. the edges `v0v1`, `v0v2`, `v1v2`.
#[derive(Clone, Debug)]
pub struct Face {
    pub vertices: [usize; 3],
    pub vertex_transport: [Vec<Letter>; 3],
    pub edges: [usize; 3],
    pub edge_transport: [Vec<Letter>; 3],
    /// +1 if the vertex order agrees with the polygon's boundary orientation.
    pub sign: i64,
}

#[derive(Clone, Debug)]
pub struct TriangulatedSurface {
    genus: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
    orientation_sign: i64,
}

impl TriangulatedSurface {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn vertex_count(&self) -> usize {
        2
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// Global sign applied to fundamental-class evaluations, fixed so that
    /// `<alpha_a cup alpha_b, [T^2]> = +1` for integer coefficients.
    pub fn orientation_sign(&self) -> i64 {
        self.orientation_sign
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    pub fn boundary_edge(&self, generator: usize) -> usize {
        generator
    }

    fn radial_edge(&self, corner: usize) -> usize {
        2 * self.genus + corner % (4 * self.genus)
    }

    fn cells(&self, degree: u8) -> usize {
        match degree {
            0 => self.vertex_count(),
            1 => self.edges.len(),
            _ => self.faces.len(),
        }
    }

    /// Every edge lies on exactly two triangles, the signed faces form a cycle,
    /// and every vertex link is a single circle.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvariantViolation(format!("triangulation: {m}")));
        if self.euler_characteristic() != 2 - 2 * self.genus as i64 {
            return fail("Euler characteristic");
        }
        let mut incidence = vec![0usize; self.edges.len()];
        let mut cycle = vec![0i64; self.edges.len()];
        for f in &self.faces {
            for (pos, &e) in f.edges.iter().enumerate() {
                incidence[e] += 1;
                let boundary_sign = if pos == 1 { -1 } else { 1 };
                cycle[e] += f.sign * boundary_sign;
            }
            let ends = [(0, 1), (0, 2), (1, 2)];
            for (pos, &(a, b)) in ends.iter().enumerate() {
                let e = &self.edges[f.edges[pos]];
                if e.tail != f.vertices[a] || e.head != f.vertices[b] {
                    return fail("face vertices disagree with edge endpoints");
                }
            }
        }
        if incidence.iter().any(|&n| n != 2) {
            return fail("edge not shared by exactly two triangles");
        }
        if cycle.iter().any(|&c| c != 0) {
            return fail("signed triangles do not form a cycle");
        }
        for v in [CENTER, CORNER] {
            if !self.link_is_circle(v) {
                return fail("vertex link is not a circle");
            }
        }
        Ok(())
    }

    fn link_is_circle(&self, v: usize) -> bool {
        // Link vertices are edge ends at `v`; each triangle corner at `v` joins two.
        let end_id = |e: usize, head: bool| 2 * e + head as usize;
        let n = 2 * self.edges.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut present = vec![false; n];
        for (e, edge) in self.edges.iter().enumerate() {
            present[end_id(e, false)] = edge.tail == v;
            present[end_id(e, true)] = edge.head == v;
        }
        for f in &self.faces {
            let [front, long, back] = f.edges;
            let corners = [
                (end_id(front, false), end_id(long, false)),
                (end_id(front, true), end_id(back, false)),
                (end_id(long, true), end_id(back, true)),
            ];
            for (pos, (x, y)) in corners.into_iter().enumerate() {
                if f.vertices[pos] == v {
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
        }
        let nodes: Vec<usize> = (0..n).filter(|&i| present[i]).collect();
        if nodes.is_empty() || nodes.iter().any(|&i| adj[i].len() != 2) {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![nodes[0]];
        seen[nodes[0]] = true;
        let mut count = 0;
        while let Some(x) = stack.pop() {
            count += 1;
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        count == nodes.len()
    }
}

/// Cone of the 4g-gon with the standard side identifications.
pub fn triangulate(genus: usize) -> Result<TriangulatedSurface> {
    let mut t = raw_triangulation(genus)?;
    t.orientation_sign = reference_orientation_sign();
    t.validate()?;
    Ok(t)
}

fn raw_triangulation(genus: usize) -> Result<TriangulatedSurface> {
    if genus == 0 {
        return Err(Error::UnsupportedGenus(0));
    }
    let group = SurfaceGroup::new(genus);
    let word = &group.relator;
    let n = word.len();
    let prefix = |k: usize| word[..k].to_vec();

    let mut edges = Vec::with_capacity(6 * genus);
    for g in 0..2 * genus {
        edges.push(Edge {
            kind: EdgeKind::Boundary { generator: g },
            tail: CORNER,
            head: CORNER,
            tail_transport: vec![],
            head_transport: vec![Letter::pos(g)],
        });
    }
    for k in 0..n {
        edges.push(Edge {
            kind: EdgeKind::Radial { corner: k },
            tail: CENTER,
            head: CORNER,
            tail_transport: vec![],
            head_transport: prefix(k),
        });
    }

    let radial = |k: usize| 2 * genus + k % n;
    let mut faces = Vec::with_capacity(n);
    for (k, letter) in word.iter().enumerate() {
        let x = letter.generator;
        let face = if !letter.inverse {
            // side k runs from corner k to corner k+1 along x
            Face {
                vertices: [CENTER, CORNER, CORNER],
                vertex_transport: [vec![], prefix(k), prefix(k + 1)],
                edges: [radial(k), radial(k + 1), x],
                edge_transport: [vec![], vec![], prefix(k)],
                sign: 1,
            }
        } else {
            // side k runs from corner k+1 to corner k along x
            Face {
                vertices: [CENTER, CORNER, CORNER],
                vertex_transport: [vec![], prefix(k + 1), prefix(k)],
                edges: [radial(k + 1), radial(k), x],
                edge_transport: [vec![], vec![], prefix(k + 1)],
                sign: -1,
            }
        };
        faces.push(face);
    }
    Ok(TriangulatedSurface {
        genus,
        edges,
        faces,
        orientation_sign: 1,
    })
}

/// Sign making `<alpha_a cup alpha_b, [T^2]> = +1` with integer coefficients.
fn reference_orientation_sign() -> i64 {
    static SIGN: OnceLock<i64> = OnceLock::new();
    *SIGN.get_or_init(|| {
        let t = raw_triangulation(1).expect("genus 1");
        let rho = LatticeLocalSystem::trivial(1, 1);
        let one = |g: usize| -> Vec<BigInt> {
            (0..2).map(|j| BigInt::from((j == g) as i64)).collect()
        };
        let a = class_of(&one(0), &t, &rho).expect("cocycle");
        let b = class_of(&one(1), &t, &rho).expect("cocycle");
        let raw = cup_integral(&a, &b, &IntMatrix::identity(1), &t, &rho)
            .expect("shapes agree")
            .to_i64()
            .expect("small");
        assert!(raw == 1 || raw == -1, "torus intersection number must be +-1");
        raw
    })
}

/// A cochain of degree 0, 1 or 2 with values in `Z^rank`, one value per cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedCochain {
    pub degree: u8,
    pub rank: usize,
    pub values: Vec<Vec<BigInt>>,
}

impl TwistedCochain {
    pub fn zero(degree: u8, rank: usize, t: &TriangulatedSurface) -> Self {
        TwistedCochain {
            degree,
            rank,
            values: vec![vec![BigInt::zero(); rank]; t.cells(degree)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(Zero::is_zero)
    }

    pub fn add(&self, other: &TwistedCochain) -> Result<TwistedCochain> {
        if self.degree != other.degree || self.values.len() != other.values.len() {
            return Err(Error::ShapeMismatch("cochains of different shape".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();
        Ok(TwistedCochain {
            degree: self.degree,
            rank: self.rank,
            values,
        })
    }

    fn check_shape(&self, t: &TriangulatedSurface, rho: &LatticeLocalSystem) -> Result<()> {
        if self.degree > 2 {
            return Err(Error::ShapeMismatch(format!("degree {}", self.degree)));
        }
        if self.rank != rho.rank() || self.values.iter().any(|v| v.len() != self.rank) {
            return Err(Error::ShapeMismatch("coefficient rank".into()));
        }
        if self.values.len() != t.cells(self.degree) || t.genus() != rho.genus() {
            return Err(Error::ShapeMismatch("cell count".into()));
        }
        Ok(())
    }
}

fn transport(rho: &LatticeLocalSystem, word: &[Letter], v: &[BigInt]) -> Vec<BigInt> {
    if word.is_empty() {
        return v.to_vec();
    }
    rho.word_matrix(word).mul_vec(v)
}

fn sub_assign(a: &mut [BigInt], b: &[BigInt]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x -= y);
}

fn add_assign(a: &mut [BigInt], b: &[BigInt]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
}

/// Twisted coboundary. Degree-2 cochains map to the (empty) degree-3 cochain.
pub fn coboundary(
    c: &TwistedCochain,
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
) -> Result<TwistedCochain> {
    c.check_shape(t, rho)?;
    let values = match c.degree {
        0 => t
            .edges
            .iter()
            .map(|e| {
                let mut v = transport(rho, &e.head_transport, &c.values[e.head]);
                sub_assign(&mut v, &transport(rho, &e.tail_transport, &c.values[e.tail]));
                v
            })
            .collect(),
        1 => t
            .faces
            .iter()
            .map(|f| {
                let lifted = |pos: usize| transport(rho, &f.edge_transport[pos], &c.values[f.edges[pos]]);
                let mut v = lifted(2);
                sub_assign(&mut v, &lifted(1));
                add_assign(&mut v, &lifted(0));
                v
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(TwistedCochain {
        degree: c.degree + 1,
        rank: c.rank,
        values,
    })
}

pub fn cocycle_check(
    c: &TwistedCochain,
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
) -> Result<bool> {
    Ok(coboundary(c, t, rho)?.is_zero())
}

/// Alexander-Whitney: `sum_faces sign * pair(c1(v0 v1), c2(v1 v2))`, times the orientation sign.
fn cup_sum<T, P>(
    c1: &TwistedCochain,
    c2: &TwistedCochain,
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
    pair: P,
) -> Result<Vec<(i64, T)>>
where
    P: Fn(&[BigInt], &[BigInt]) -> Result<T>,
{
    for c in [c1, c2] {
        c.check_shape(t, rho)?;
        if c.degree != 1 {
            return Err(Error::ShapeMismatch("cup product needs 1-cochains".into()));
        }
        if !cocycle_check(c, t, rho)? {
            return Err(Error::NotACocycle);
        }
    }
    t.faces
        .iter()
        .map(|f| {
            let front = transport(rho, &f.edge_transport[0], &c1.values[f.edges[0]]);
            let back = transport(rho, &f.edge_transport[2], &c2.values[f.edges[2]]);
            Ok((f.sign * t.orientation_sign, pair(&front, &back)?))
        })
        .collect()
}

/// `<p(c1 cup c2), [Sigma]>` in Q/Z.
pub fn cup_evaluate(
    c1: &TwistedCochain,
    c2: &TwistedCochain,
    p: &SymmetricForm,
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
) -> Result<Frac1> {
    let terms = cup_sum(c1, c2, t, rho, |x, y| p.eval_big(x, y))?;
    Ok(terms.into_iter().map(|(s, v)| v.scale(s)).sum())
}

/// `<p(c1 cup c2), [Sigma]>` for an integer pairing matrix `p`.
pub fn cup_integral(
    c1: &TwistedCochain,
    c2: &TwistedCochain,
    p: &IntMatrix,
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
) -> Result<BigInt> {
    let terms = cup_sum(c1, c2, t, rho, |x, y| {
        let py = p.mul_vec(y);
        Ok(x.iter().zip(&py).map(|(a, b)| a * b).sum::<BigInt>())
    })?;
    Ok(terms.into_iter().map(|(s, v)| v * s).sum())
}

/// A simplicial 1-cocycle whose value on each boundary loop is the corresponding
/// block of `h1_vector` (values on `a_1, b_1, ...`, each of length `rank`).
pub fn class_of(
    h1_vector: &[BigInt],
    t: &TriangulatedSurface,
    rho: &LatticeLocalSystem,
) -> Result<TwistedCochain> {
    let r = rho.rank();
    let gens = 2 * t.genus;
    if h1_vector.len() != gens * r || rho.genus() != t.genus {
        return Err(Error::DimensionMismatch {
            expected: gens * r,
            found: h1_vector.len(),
        });
    }
    let mut c = TwistedCochain::zero(1, r, t);
    for g in 0..gens {
        c.values[t.boundary_edge(g)] = h1_vector[g * r..(g + 1) * r].to_vec();
    }
    // Walk around the polygon, solving each triangle's cocycle equation
    // back - long + front = 0 for the radial edge at the next corner.
    let n = t.faces.len();
    for k in 0..n {
        let f = &t.faces[k];
        let back = transport(rho, &f.edge_transport[2], &c.values[f.edges[2]]);
        let next = t.radial_edge(k + 1);
        let mut solved;
        if f.edges[1] == next {
            // positive side: long = front + back
            solved = c.values[f.edges[0]].clone();
            add_assign(&mut solved, &back);
        } else {
            // negative side: front = long - back
            solved = c.values[f.edges[1]].clone();
            sub_assign(&mut solved, &back);
        }
        if k + 1 == n {
            if solved != c.values[next] {
                return Err(Error::NotInKernel);
            }
        } else {
            c.values[next] = solved;
        }
    }
    debug_assert!(cocycle_check(&c, t, rho).unwrap_or(false));
    Ok(c)
}

/// Values of a 1-cochain on the boundary loops, concatenated in generator order.
pub fn holonomies(c: &TwistedCochain, t: &TriangulatedSurface) -> Vec<BigInt> {
    (0..2 * t.genus)
        .flat_map(|g| c.values[t.boundary_edge(g)].clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::fractions_up_to;
    use crate::surface::{build_complex, twisted_cohomology};
    use num_traits::One;

    fn unit(len: usize, i: usize) -> Vec<BigInt> {
        (0..len).map(|j| BigInt::from((i == j) as i64)).collect()
    }

    fn scaled_identity(rank: usize, f: Frac1) -> SymmetricForm {
        let mut p = SymmetricForm::zero(rank);
        for i in 0..rank {
            p.entries[i][i] = f;
        }
        p
    }

    #[test]
    fn triangulation_counts() {
        assert!(matches!(triangulate(0), Err(Error::UnsupportedGenus(0))));
        for g in 1..=3 {
            let t = triangulate(g).unwrap();
            assert_eq!(t.euler_characteristic(), 2 - 2 * g as i64);
            assert_eq!(t.faces().len(), 4 * g);
        }
        assert_eq!(triangulate(1).unwrap().orientation_sign().abs(), 1);
    }

    #[test]
    fn cocycle_examples() {
        let t = triangulate(1).unwrap();
        let rho = LatticeLocalSystem::trivial(1, 1);
        assert!(cocycle_check(&TwistedCochain::zero(1, 1, &t), &t, &rho).unwrap());
        let constant = TwistedCochain {
            degree: 0,
            rank: 1,
            values: vec![vec![BigInt::one()]; 2],
        };
        assert!(cocycle_check(&constant, &t, &rho).unwrap());
        let a = class_of(&unit(2, 0), &t, &rho).unwrap();
        assert!(cocycle_check(&a, &t, &rho).unwrap());
        // perturbing one radial edge breaks the cocycle condition
        let mut broken = a.clone();
        broken.values[2][0] += 1;
        assert!(!cocycle_check(&broken, &t, &rho).unwrap());
        assert_eq!(
            cup_evaluate(&broken, &a, &scaled_identity(1, Frac1::new(1, 2)), &t, &rho),
            Err(Error::NotACocycle)
        );
    }

    #[test]
    fn torus_intersection_form() {
        let t = triangulate(1).unwrap();
        let rho = LatticeLocalSystem::trivial(1, 1);
        let a = class_of(&unit(2, 0), &t, &rho).unwrap();
        let b = class_of(&unit(2, 1), &t, &rho).unwrap();
        for n in 1..=6u64 {
            let p = scaled_identity(1, Frac1::new(1, n));
            assert_eq!(cup_evaluate(&a, &b, &p, &t, &rho).unwrap(), Frac1::new(1, n));
            assert_eq!(cup_evaluate(&b, &a, &p, &t, &rho).unwrap(), Frac1::new(-1, n));
            assert_eq!(cup_evaluate(&a, &a, &p, &t, &rho).unwrap(), Frac1::ZERO);
        }
        let zero = TwistedCochain::zero(1, 1, &t);
        let p = scaled_identity(1, Frac1::new(1, 5));
        assert_eq!(cup_evaluate(&a, &zero, &p, &t, &rho).unwrap(), Frac1::ZERO);
    }

    #[test]
    fn genus_two_is_symplectic() {
        let t = triangulate(2).unwrap();
        let rho = LatticeLocalSystem::trivial(2, 1);
        let classes: Vec<_> = (0..4)
            .map(|i| class_of(&unit(4, i), &t, &rho).unwrap())
            .collect();
        let id = IntMatrix::identity(1);
        for i in 0..4 {
            for j in 0..4 {
                let v = cup_integral(&classes[i], &classes[j], &id, &t, &rho).unwrap();
                let expected = match (i / 2 == j / 2, i % 2, j % 2) {
                    (true, 0, 1) => 1,
                    (true, 1, 0) => -1,
                    _ => 0,
                };
                assert_eq!(v, BigInt::from(expected), "({i}, {j})");
            }
        }
    }

    #[test]
    fn class_of_round_trip_and_kernel_check() {
        let t = triangulate(1).unwrap();
        let rho = LatticeLocalSystem::new(
            1,
            1,
            vec![IntMatrix::from_i64(1, 1, &[1]), IntMatrix::from_i64(1, 1, &[-1])],
        )
        .unwrap();
        // d1 = (2, 0): (1, 0) is not a cocycle, (0, 1) is
        assert_eq!(class_of(&unit(2, 0), &t, &rho), Err(Error::NotInKernel));
        let c = class_of(&unit(2, 1), &t, &rho).unwrap();
        assert_eq!(holonomies(&c, &t), unit(2, 1));
        let zero = class_of(&[BigInt::zero(), BigInt::zero()], &t, &rho).unwrap();
        assert!(zero.is_zero());

        for g in 1..=2 {
            for r in 1..=2 {
                let rho = LatticeLocalSystem::trivial(g, r);
                let t = triangulate(g).unwrap();
                for v in (0..2 * g * r).map(|i| unit(2 * g * r, i)) {
                    let c = class_of(&v, &t, &rho).unwrap();
                    assert_eq!(holonomies(&c, &t), v);
                }
            }
        }
    }

    fn unipotent_g1() -> LatticeLocalSystem {
        LatticeLocalSystem::new(
            1,
            2,
            vec![IntMatrix::from_i64(2, 2, &[1, 1, 0, 1]), IntMatrix::identity(2)],
        )
        .unwrap()
    }

    #[test]
    fn coboundaries_pair_to_zero() {
        // p(x, y) = x2 y2 / 6 is invariant under e1 -> e1, e2 -> e1 + e2.
        let rho = unipotent_g1();
        let t = triangulate(1).unwrap();
        let mut p = SymmetricForm::zero(2);
        p.entries[1][1] = Frac1::new(1, 6);
        let coh = twisted_cohomology(&rho).unwrap();
        let gens = coh.h1_presentation.generators();
        let d0 = build_complex(&rho).unwrap().d0;
        for x in &gens {
            for y in &gens {
                let cx = class_of(x, &t, &rho).unwrap();
                let cy = class_of(y, &t, &rho).unwrap();
                let base = cup_evaluate(&cx, &cy, &p, &t, &rho).unwrap();
                let anti = cup_evaluate(&cy, &cx, &p, &t, &rho).unwrap();
                assert_eq!(base, -anti);
                for h in [[1i64, 0], [0, 1], [3, -2]] {
                    let h0 = TwistedCochain {
                        degree: 0,
                        rank: 2,
                        values: vec![
                            vec![BigInt::from(h[1]), BigInt::from(h[0])],
                            vec![BigInt::from(h[0]), BigInt::from(h[1])],
                        ],
                    };
                    let dh = coboundary(&h0, &t, &rho).unwrap();
                    let shifted = cx.add(&dh).unwrap();
                    assert!(cocycle_check(&shifted, &t, &rho).unwrap());
                    assert_eq!(cup_evaluate(&shifted, &cy, &p, &t, &rho).unwrap(), base);
                    // the boundary-loop part of dh is d0 applied to the corner value
                    let hv: Vec<BigInt> = h0.values[CORNER].clone();
                    assert_eq!(holonomies(&dh, &t), d0.mul_vec(&hv));
                }
            }
        }
    }

    #[test]
    fn cup_is_bilinear_on_basis_classes() {
        for g in 1..=2 {
            for r in 1..=2 {
                let rho = LatticeLocalSystem::trivial(g, r);
                let t = triangulate(g).unwrap();
                let n = 2 * g * r;
                let classes: Vec<_> = (0..n).map(|i| class_of(&unit(n, i), &t, &rho).unwrap()).collect();
                for zeta in fractions_up_to(6) {
                    let p = scaled_identity(r, zeta);
                    for i in 0..n {
                        for j in 0..n {
                            let sum = classes[i].add(&classes[j]).unwrap();
                            for k in 0..n {
                                let lhs = cup_evaluate(&sum, &classes[k], &p, &t, &rho).unwrap();
                                let rhs = cup_evaluate(&classes[i], &classes[k], &p, &t, &rho).unwrap()
                                    + cup_evaluate(&classes[j], &classes[k], &p, &t, &rho).unwrap();
                                assert_eq!(lhs, rhs);
                                let lhs = cup_evaluate(&classes[k], &sum, &p, &t, &rho).unwrap();
                                let rhs = cup_evaluate(&classes[k], &classes[i], &p, &t, &rho).unwrap()
                                    + cup_evaluate(&classes[k], &classes[j], &p, &t, &rho).unwrap();
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
    }
}
