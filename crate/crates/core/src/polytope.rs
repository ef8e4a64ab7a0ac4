//! Newton polytope geometry under the minimum (inner normal) convention.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::lattice::{gcd_normalize, IntVector};
use crate::lp::LinearSystem;

/// A finite, nonempty set of exponent vectors, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SupportSet {
    points: Vec<Vec<i64>>,
}

impl SupportSet {
    /// Panics on an empty point list or ragged dimensions.
    pub fn new(mut points: Vec<Vec<i64>>) -> Self {
        assert!(!points.is_empty(), "support sets are nonempty");
        let n = points[0].len();
        assert!(points.iter().all(|p| p.len() == n), "ragged support");
        points.sort();
        points.dedup();
        SupportSet { points }
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).is_ok()
    }
}

fn dot_big(a: &[i64], v: &IntVector) -> BigInt {
    a.iter().zip(&v.0).map(|(&x, y)| BigInt::from(x) * y).sum()
}

fn dot_rational(a: &[i64], v: &[BigRational]) -> BigRational {
    a.iter()
        .zip(v)
        .map(|(&x, y)| y * BigRational::from_integer(BigInt::from(x)))
        .sum()
}

/// `p(v) = min_{a ∈ A} ⟨a, v⟩`.
pub fn support_function(a: &SupportSet, v: &IntVector) -> BigInt {
    a.points
        .iter()
        .map(|p| dot_big(p, v))
        .min()
        .expect("nonempty support")
}

/// The points of `A` attaining `p(v)`.
pub fn face(a: &SupportSet, v: &IntVector) -> SupportSet {
    let m = support_function(a, v);
    SupportSet::new(a.points.iter().filter(|p| dot_big(p, v) == m).cloned().collect())
}

/// Face for a rational direction.
pub fn face_rational(a: &SupportSet, v: &[BigRational]) -> SupportSet {
    let vals: Vec<BigRational> = a.points.iter().map(|p| dot_rational(p, v)).collect();
    let m = vals.iter().min().expect("nonempty support").clone();
    SupportSet::new(
        a.points
            .iter()
            .zip(&vals)
            .filter(|(_, x)| **x == m)
            .map(|(p, _)| p.clone())
            .collect(),
    )
}

/// An edge of `conv(A)` with its inner normal cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeEdge {
    /// Endpoints, the smaller one (lexicographically) first.
    pub endpoints: (Vec<i64>, Vec<i64>),
    /// Primitive direction of `endpoints.1 - endpoints.0`.
    pub direction: Vec<i64>,
    /// Points of `A` lying on the closed segment (endpoints included).
    pub on_edge: Vec<Vec<i64>>,
    /// Rows `g` of the normal cone description `⟨g, v⟩ ≥ 0`, one for every
    /// point of `A` off the segment (`g = p - endpoints.0`).
    pub cone_rows: Vec<Vec<i64>>,
    /// A direction whose face is exactly `on_edge`.
    pub witness: Vec<BigRational>,
}

impl PolytopeEdge {
    /// Closed normal cone `{v : ⟨b - a, v⟩ = 0, ⟨p - a, v⟩ ≥ 0}` as a
    /// linear system over `v`.
    pub fn cone_system(&self) -> LinearSystem {
        let mut s = LinearSystem::new(self.direction.len());
        self.add_cone_to(&mut s);
        s
    }

    pub fn add_cone_to(&self, s: &mut LinearSystem) {
        s.eq(self.direction.clone(), 0);
        for g in &self.cone_rows {
            s.ge(g.clone(), 0);
        }
    }

    /// Whether `v` lies in the closed normal cone.
    pub fn cone_contains(&self, v: &[BigRational]) -> bool {
        dot_rational(&self.direction, v).is_zero()
            && self.cone_rows.iter().all(|g| dot_rational(g, v) >= BigRational::zero())
    }
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Position of `p` relative to the line through `a` and `b`: `None` when off
/// the line, otherwise the parameter `t` (as a fraction num/den, den > 0)
/// with `p = a + t (b - a)`.
fn line_parameter(a: &[i64], b: &[i64], p: &[i64]) -> Option<(i64, i64)> {
    let d = sub(b, a);
    let w = sub(p, a);
    let k = d.iter().position(|&x| x != 0)?;
    let (num, den) = (w[k], d[k]);
    // w * den == d * num componentwise
    if w.iter().zip(&d).all(|(&wi, &di)| wi * den == di * num) {
        if den < 0 {
            Some((-num, -den))
        } else {
            Some((num, den))
        }
    } else {
        None
    }
}

/// Decides whether `a`, `b` are the endpoints of an edge of `conv(A)`,
/// returning the edge with an exact normal-cone witness.
pub fn edge_between(set: &SupportSet, a: &[i64], b: &[i64]) -> Option<PolytopeEdge> {
    if a == b {
        return None;
    }
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let mut on_edge = Vec::new();
    let mut off = Vec::new();
    for p in &set.points {
        match line_parameter(a, b, p) {
            Some((num, den)) if num >= 0 && num <= den => on_edge.push(p.clone()),
            // collinear beyond an endpoint: (a, b) are not the endpoints
            Some(_) => return None,
            None => off.push(p.clone()),
        }
    }
    let diff = sub(b, a);
    let g = IntVector::from_i64s(&diff);
    let direction = gcd_normalize(&g).ok()?.to_i64s()?;
    let cone_rows: Vec<Vec<i64>> = off.iter().map(|p| sub(p, a)).collect();
    let mut sys = LinearSystem::new(a.len());
    sys.eq(direction.clone(), 0);
    for r in &cone_rows {
        sys.ge(r.clone(), 1);
    }
    let witness = sys.feasible_point()?;
    Some(PolytopeEdge {
        endpoints: (a.to_vec(), b.to_vec()),
        direction,
        on_edge,
        cone_rows,
        witness,
    })
}

/// All edges of `conv(A)`, in lexicographic order of their endpoints.
///
/// Every pair of points is tested with an exact LP; a point polytope has no
/// edges.
pub fn edges(set: &SupportSet) -> Vec<PolytopeEdge> {
    let pts = &set.points;
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if let Some(e) = edge_between(set, &pts[i], &pts[j]) {
                out.push(e);
            }
        }
    }
    out
}

/// A face of `conv(A)` with at least two points, together with its
/// relatively open normal cone
/// `{v : ⟨a - a₀, v⟩ = 0 for a in the face, ⟨p - a₀, v⟩ > 0 otherwise}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolytopeFace {
    /// Points of `A` on the face, sorted.
    pub points: Vec<Vec<i64>>,
    /// Rows `a - a₀` for the face points after the first.
    pub equalities: Vec<Vec<i64>>,
    /// Rows `p - a₀` for the points off the face.
    pub strict_rows: Vec<Vec<i64>>,
    /// A direction whose face is exactly `points`.
    pub witness: Vec<BigRational>,
}

impl PolytopeFace {
    /// Adds the open normal cone, homogenized: strict rows become `≥ 1`.
    pub fn add_open_cone_to(&self, s: &mut LinearSystem) {
        for e in &self.equalities {
            s.eq(e.clone(), 0);
        }
        for g in &self.strict_rows {
            s.ge(g.clone(), 1);
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn face_from_subset(set: &SupportSet, inside: &[usize]) -> Option<PolytopeFace> {
    let pts = &set.points;
    let a0 = &pts[inside[0]];
    let equalities: Vec<Vec<i64>> = inside[1..].iter().map(|&i| sub(&pts[i], a0)).collect();
    let strict_rows: Vec<Vec<i64>> = (0..pts.len())
        .filter(|i| !inside.contains(i))
        .map(|i| sub(&pts[i], a0))
        .collect();
    let mut sys = LinearSystem::new(set.dim());
    for e in &equalities {
        sys.eq(e.clone(), 0);
    }
    for g in &strict_rows {
        sys.ge(g.clone(), 1);
    }
    let witness = sys.feasible_point()?;
    Some(PolytopeFace {
        points: inside.iter().map(|&i| pts[i].clone()).collect(),
        equalities,
        strict_rows,
        witness,
    })
}

/// Smallest face of `conv(A)` containing the points `inside` (indices).
fn closure(set: &SupportSet, inside: &[usize]) -> Vec<usize> {
    let pts = &set.points;
    let a0 = &pts[inside[0]];
    let mut base = LinearSystem::new(set.dim());
    for &i in &inside[1..] {
        base.eq(sub(&pts[i], a0), 0);
    }
    for p in pts {
        base.ge(sub(p, a0), 0);
    }
    (0..pts.len())
        .filter(|q| {
            inside.contains(q) || {
                let mut s = base.clone();
                s.ge(sub(&pts[*q], a0), 1);
                !s.is_feasible()
            }
        })
        .collect()
}

const SUBSET_LIMIT: usize = 12;

/// All faces of `conv(A)` holding at least two points of `A`, sorted by
/// their point lists.
///
/// Small sets test every subset with one LP; larger ones grow faces upward
/// from the vertices by taking closures.
pub fn faces(set: &SupportSet) -> Vec<PolytopeFace> {
    if set.len() <= SUBSET_LIMIT {
        faces_by_subsets(set)
    } else {
        faces_by_closure(set)
    }
}

pub(crate) fn faces_by_subsets(set: &SupportSet) -> Vec<PolytopeFace> {
    let m = set.len();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << m) {
        if mask.count_ones() < 2 {
            continue;
        }
        let inside: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        if let Some(f) = face_from_subset(set, &inside) {
            out.push(f);
        }
    }
    out.sort_by(|a, b| a.points.cmp(&b.points));
    out
}

pub(crate) fn faces_by_closure(set: &SupportSet) -> Vec<PolytopeFace> {
    use std::collections::BTreeSet;
    let m = set.len();
    let vertices: Vec<usize> = (0..m).filter(|&i| closure(set, &[i]) == vec![i]).collect();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier: Vec<Vec<usize>> = vertices.iter().map(|&i| vec![i]).collect();
    while let Some(f) = frontier.pop() {
        for &p in &vertices {
            if f.contains(&p) {
                continue;
            }
            let mut g = f.clone();
            g.push(p);
            g.sort();
            let c = closure(set, &g);
            if seen.insert(c.clone()) {
                frontier.push(c);
            }
        }
    }
    let mut out: Vec<PolytopeFace> = seen
        .iter()
        .map(|inside| face_from_subset(set, inside).expect("closures are faces"))
        .collect();
    out.sort_by(|a, b| a.points.cmp(&b.points));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[&[i64]]) -> SupportSet {
        SupportSet::new(pts.iter().map(|p| p.to_vec()).collect())
    }

    fn iv(v: &[i64]) -> IntVector {
        IntVector::from_i64s(v)
    }

    fn square() -> SupportSet {
        set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    #[test]
    fn support_function_examples() {
        let a = set(&[&[1, 2, 1], &[2, 3, 1]]);
        assert_eq!(support_function(&a, &iv(&[4, -4, -1])), BigInt::from(-5));
        assert_eq!(face(&a, &iv(&[4, -4, -1])).len(), 2);
        assert_eq!(support_function(&set(&[&[0, 0]]), &iv(&[3, -7])), BigInt::from(0));
        assert_eq!(support_function(&square(), &iv(&[1, 1])), BigInt::from(0));
    }

    #[test]
    fn face_examples() {
        // first cyclic-4 equation, direction (1,-1,1,-1)
        let f1 = set(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        let f = face(&f1, &iv(&[1, -1, 1, -1]));
        assert_eq!(f, set(&[&[0, 1, 0, 0], &[0, 0, 0, 1]]));
        assert_eq!(face(&square(), &iv(&[1, 1])), set(&[&[0, 0]]));
        assert_eq!(face(&square(), &iv(&[0, 1])), set(&[&[0, 0], &[1, 0]]));
    }

    #[test]
    fn edge_counts() {
        assert_eq!(edges(&set(&[&[0, 0], &[3, 1]])).len(), 1);
        assert_eq!(edges(&square()).len(), 4);
        assert!(edges(&set(&[&[2, 2]])).is_empty());
    }

    #[test]
    fn collinear_points() {
        let a = set(&[&[0, 0], &[1, 1], &[2, 2], &[0, 2]]);
        let es = edges(&a);
        // triangle (0,0),(2,2),(0,2) with (1,1) on an edge
        assert_eq!(es.len(), 3);
        let diag = es.iter().find(|e| e.endpoints == (vec![0, 0], vec![2, 2])).unwrap();
        assert_eq!(diag.on_edge.len(), 3);
        assert_eq!(diag.direction, vec![1, 1]);
    }

    #[test]
    fn cyclic4_second_equation_edges() {
        // x1x2 + x2x3 + x3x4 + x4x1
        let f2 = set(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 1]]);
        let es = edges(&f2);
        // a square in 4-space: the two diagonals are not edges
        assert_eq!(es.len(), 4);
        assert!(es.iter().any(|e| e.direction == vec![-1, 0, 1, 0] || e.direction == vec![1, 0, -1, 0]));
        for e in &es {
            assert_eq!(face_rational(&f2, &e.witness).points(), e.on_edge.as_slice());
        }
    }

    #[test]
    fn faces_of_square_and_simplex() {
        let fs = faces(&square());
        // four edges and the square itself
        assert_eq!(fs.len(), 5);
        let simplex = set(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
        assert_eq!(faces(&simplex).len(), 11);
        for f in faces(&simplex) {
            assert_eq!(face_rational(&simplex, &f.witness).points(), f.points.as_slice());
        }
    }

    #[test]
    fn face_enumerations_agree() {
        let a = set(&[&[0, 0, 0], &[2, 0, 0], &[0, 2, 0], &[0, 0, 2], &[1, 1, 0], &[1, 0, 1], &[2, 2, 2], &[1, 1, 1]]);
        assert_eq!(faces_by_subsets(&a), faces_by_closure(&a));
    }

    #[test]
    fn homogeneity_of_support_function() {
        let a = set(&[&[0, 1, 3], &[2, -1, 0], &[1, 1, 1]]);
        let v = iv(&[2, -3, 1]);
        let p = support_function(&a, &v);
        for k in 1..5i64 {
            let kv = IntVector(v.0.iter().map(|e| e * k).collect());
            assert_eq!(support_function(&a, &kv), p.clone() * k);
        }
    }
}
