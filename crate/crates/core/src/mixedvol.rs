//! Mixed volumes: a recursive oracle over faces and the lifting method with
//! mixed cells, including the slack lifting whose zero-slack cell normals are
//! tropisms.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lattice::{
    det, gcd_normalize, kernel_basis, primitive_from_rationals, unimodular_with_first_column, IntMatrix, IntVector,
};
use crate::lp::LinearSystem;
use crate::polytope::{edges, face, support_function, SupportSet};
use crate::{Error, Result};

/// Random lifting values are drawn from `[0, LIFT_RANGE)`.
pub const LIFT_RANGE: i64 = 1 << 16;

/// How many reseeds `mixed_volume` tries after a degenerate lifting.
pub const MAX_RESEEDS: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiftKind {
    /// `a ↦ (a, ω(a))` with random integer `ω`.
    Random,
    /// `a ↦ (r_a, a₂, …, a_n)` lifted by `a₁`, with random slack `r_a`.
    Tau,
}

/// A support whose points (in lifted coordinates) carry lifting values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedSupport {
    pub base: SupportSet,
    /// Coordinates of each base point in the lifted space (same order as
    /// `base.points()`); equal to the base point for random liftings.
    pub points: Vec<Vec<i64>>,
    pub lift_values: Vec<i64>,
    pub kind: LiftKind,
}

impl LiftedSupport {
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

pub fn lift_random(a: &SupportSet, rng: &mut impl Rng) -> LiftedSupport {
    LiftedSupport {
        base: a.clone(),
        points: a.points().to_vec(),
        lift_values: a.points().iter().map(|_| rng.gen_range(0..LIFT_RANGE)).collect(),
        kind: LiftKind::Random,
    }
}

/// Lifts every support with values from one generator seeded by `seed`.
pub fn lift_random_tuple(supports: &[SupportSet], seed: u64) -> Vec<LiftedSupport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    supports.iter().map(|a| lift_random(a, &mut rng)).collect()
}

pub fn lift_tau_with(a: &SupportSet, rng: &mut impl Rng) -> LiftedSupport {
    let mut points = Vec::with_capacity(a.len());
    let mut lift_values = Vec::with_capacity(a.len());
    for p in a.points() {
        let mut q = p.clone();
        q[0] = rng.gen_range(0..LIFT_RANGE);
        points.push(q);
        lift_values.push(p[0]);
    }
    LiftedSupport { base: a.clone(), points, lift_values, kind: LiftKind::Tau }
}

pub fn lift_tau(a: &SupportSet, seed: u64) -> LiftedSupport {
    lift_tau_with(a, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn lift_tau_tuple(supports: &[SupportSet], seed: u64) -> Vec<LiftedSupport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    supports.iter().map(|a| lift_tau_with(a, &mut rng)).collect()
}

/// A lower-hull cell spanned by one edge of every lifted support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedCell {
    /// For every support, the indices of the two spanning points.
    pub edges: Vec<(usize, usize)>,
    /// `v` such that `(v, 1)` is the inner normal of the cell.
    pub inner_normal: Vec<BigRational>,
    /// `|det|` of the edge directions (in lifted coordinates).
    pub volume: BigInt,
}

#[derive(Clone, Debug, Default)]
pub struct CellOptions {
    /// Restrict the search to normals with zero first coordinate (the slack
    /// component under the τ lifting).
    pub first_coordinate_zero: bool,
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Constraints saying that `(v, 1)` attains its minimum over `l` at points
/// `i` and `j`.
fn pair_constraints(l: &LiftedSupport, i: usize, j: usize, sys: &mut LinearSystem) {
    let (a, wa) = (&l.points[i], l.lift_values[i]);
    let (b, wb) = (&l.points[j], l.lift_values[j]);
    sys.eq(sub(b, a), wa - wb);
    for (k, p) in l.points.iter().enumerate() {
        if k != i && k != j {
            sys.ge(sub(p, a), wa - l.lift_values[k]);
        }
    }
}

/// Pairs that span a lower edge (or lie on a common lower face) of `l`.
fn lower_pairs(l: &LiftedSupport, base: &LinearSystem) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let mut s = base.clone();
            pair_constraints(l, i, j, &mut s);
            if s.is_feasible() {
                out.push((i, j));
            }
        }
    }
    out
}

/// All mixed cells of the lifted tuple, by depth-first intersection of
/// lower-edge conditions with exact LP pruning.
///
/// For random liftings a tie on the lower hull (a cell touching a third
/// point, or dependent edges) is reported as [`Error::DegenerateLifting`]. For
/// the τ lifting ties are expected and such candidates are skipped.
pub fn mixed_cells(lifted: &[LiftedSupport]) -> Result<Vec<MixedCell>> {
    mixed_cells_with(lifted, &CellOptions::default())
}

pub fn mixed_cells_with(lifted: &[LiftedSupport], opts: &CellOptions) -> Result<Vec<MixedCell>> {
    let n = lifted.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if lifted.iter().any(|l| l.dim() != n) {
        return Err(Error::DimensionMismatch(format!("{n} supports in {}-space", lifted[0].dim())));
    }
    let mut root = LinearSystem::new(n);
    if opts.first_coordinate_zero {
        let mut e = vec![0; n];
        e[0] = 1;
        root.eq(e, 0);
    }
    let pairs: Vec<Vec<(usize, usize)>> = lifted.iter().map(|l| lower_pairs(l, &root)).collect();
    let mut cells = Vec::new();
    let mut chosen = Vec::with_capacity(n);
    descend(lifted, &pairs, &root, &mut chosen, &mut cells)?;
    Ok(cells)
}

fn descend(
    lifted: &[LiftedSupport],
    pairs: &[Vec<(usize, usize)>],
    sys: &LinearSystem,
    chosen: &mut Vec<(usize, usize)>,
    cells: &mut Vec<MixedCell>,
) -> Result<()> {
    let k = chosen.len();
    if k == lifted.len() {
        if let Some(c) = leaf_cell(lifted, chosen)? {
            cells.push(c);
        }
        return Ok(());
    }
    for &(i, j) in &pairs[k] {
        let mut s = sys.clone();
        pair_constraints(&lifted[k], i, j, &mut s);
        if s.is_feasible() {
            chosen.push((i, j));
            descend(lifted, pairs, &s, chosen, cells)?;
            chosen.pop();
        }
    }
    Ok(())
}

fn leaf_cell(lifted: &[LiftedSupport], chosen: &[(usize, usize)]) -> Result<Option<MixedCell>> {
    let tau = lifted.iter().any(|l| l.kind == LiftKind::Tau);
    let rows: Vec<Vec<i64>> = lifted
        .iter()
        .zip(chosen)
        .map(|(l, &(i, j))| sub(&l.points[j], &l.points[i]))
        .collect();
    let d = det(&IntMatrix::from_rows(&rows)?)?;
    if d.is_zero() {
        return if tau { Ok(None) } else { Err(Error::DegenerateLifting) };
    }
    let mut eqs = LinearSystem::new(lifted.len());
    for (l, &(i, j)) in lifted.iter().zip(chosen) {
        eqs.eq(sub(&l.points[j], &l.points[i]), l.lift_values[i] - l.lift_values[j]);
    }
    let v = eqs.feasible_point().expect("nonsingular system");
    if !tau {
        // every other point must lie strictly above the cell
        for (l, &(i, j)) in lifted.iter().zip(chosen) {
            let at = |k: usize| -> BigRational {
                let p = &l.points[k];
                p.iter()
                    .zip(&v)
                    .map(|(&x, y)| y * BigRational::from_integer(x.into()))
                    .sum::<BigRational>()
                    + BigRational::from_integer(l.lift_values[k].into())
            };
            let m = at(i);
            if (0..l.len()).any(|k| k != i && k != j && at(k) == m) {
                return Err(Error::DegenerateLifting);
            }
        }
    }
    Ok(Some(MixedCell { edges: chosen.to_vec(), inner_normal: v, volume: d.abs() }))
}

/// Mixed volume by the lifting method, reseeding (`seed + 1`, …) after a
/// degenerate lifting.
pub fn mixed_volume(supports: &[SupportSet], seed: u64) -> Result<BigInt> {
    if supports.iter().any(|a| a.len() < 2) {
        return Ok(BigInt::zero());
    }
    for attempt in 0..=MAX_RESEEDS {
        let lifted = lift_random_tuple(supports, seed.wrapping_add(attempt));
        match mixed_cells(&lifted) {
            Ok(cells) => return Ok(cells.iter().map(|c| &c.volume).sum()),
            Err(Error::DegenerateLifting) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::DegenerateLifting)
}

/// Normals `(0, w)` of τ-lifted cells give tropisms `(1, w)`; returns them
/// primitive, deduplicated and sorted.
pub fn tropisms_from_cells(cells: &[MixedCell]) -> Vec<IntVector> {
    let mut out = BTreeSet::new();
    for c in cells {
        if !c.inner_normal[0].is_zero() {
            continue;
        }
        let mut w = c.inner_normal.clone();
        w[0] = BigRational::from_integer(1.into());
        if let Ok(v) = primitive_from_rationals(&w) {
            out.insert(v.0);
        }
    }
    out.into_iter().map(IntVector).collect()
}

/// Tropisms of a square system through the τ lifting, optionally with the
/// zero-slack constraint inside every feasibility test.
pub fn tau_tropisms(supports: &[SupportSet], seed: u64, constrained: bool) -> Result<Vec<IntVector>> {
    let lifted = lift_tau_tuple(supports, seed);
    let cells = mixed_cells_with(&lifted, &CellOptions { first_coordinate_zero: constrained })?;
    Ok(tropisms_from_cells(&cells))
}

/// Mixed volume from the recursion
/// `V_n(P₁,…,P_n) = -Σ_v p₁(v) V_{n-1}(∂_v P₂,…,∂_v P_n)` over primitive
/// inner facet normals `v` of `P₂+…+P_n`, with faces projected to the
/// lattice `v^⊥`; the base case is the length of a segment.
pub fn mixed_volume_recursive(supports: &[SupportSet]) -> Result<BigInt> {
    let n = supports.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if supports.iter().any(|a| a.dim() != n) {
        return Err(Error::DimensionMismatch(format!("{n} supports in {}-space", supports[0].dim())));
    }
    if supports.iter().any(|a| a.len() < 2) {
        return Ok(BigInt::zero());
    }
    if n == 1 {
        let xs: Vec<i64> = supports[0].points().iter().map(|p| p[0]).collect();
        return Ok(BigInt::from(xs.iter().max().unwrap() - xs.iter().min().unwrap()));
    }
    let mut total = BigInt::zero();
    for v in facet_normal_candidates(&supports[1..], n)? {
        let faces: Vec<SupportSet> = supports[1..].iter().map(|a| face(a, &v)).collect();
        let m = unimodular_with_first_column(&v)?;
        let projected: Vec<SupportSet> = faces
            .iter()
            .map(|f| {
                let pts = f
                    .points()
                    .iter()
                    .map(|p| {
                        let q = m.vec_mul(&IntVector::from_i64s(p))?;
                        q.to_i64s().map(|q| q[1..].to_vec()).ok_or(Error::ExponentOverflow)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(SupportSet::new(pts))
            })
            .collect::<Result<_>>()?;
        let inner = mixed_volume_recursive(&projected)?;
        if !inner.is_zero() {
            total -= support_function(&supports[0], &v) * inner;
        }
    }
    Ok(total)
}

/// Primitive normals to `n - 1` independent edge directions of the given
/// polytopes, in both orientations: a superset of the facet normals of their
/// Minkowski sum.
fn facet_normal_candidates(polys: &[SupportSet], n: usize) -> Result<Vec<IntVector>> {
    let mut dirs: BTreeSet<Vec<i64>> = BTreeSet::new();
    for a in polys {
        for e in edges(a) {
            let d = gcd_normalize(&IntVector::from_i64s(&e.direction))?;
            dirs.insert(crate::lattice::sign_normalize_first(&d)?.to_i64s().ok_or(Error::ExponentOverflow)?);
        }
    }
    let dirs: Vec<Vec<i64>> = dirs.into_iter().collect();
    let mut out = BTreeSet::new();
    let mut pick = Vec::with_capacity(n - 1);
    choose(&dirs, 0, n - 1, &mut pick, &mut |rows| {
        if let Ok(m) = IntMatrix::from_rows(rows) {
            let k = kernel_basis(&m);
            if k.len() == 1 {
                out.insert(k[0].0.clone());
                out.insert(k[0].neg().0);
            }
        }
    });
    Ok(out.into_iter().map(IntVector).collect())
}

fn choose(items: &[Vec<i64>], start: usize, k: usize, pick: &mut Vec<Vec<i64>>, f: &mut impl FnMut(&[Vec<i64>])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - pick.len() {
            break;
        }
        pick.push(items[i].clone());
        choose(items, i + 1, k, pick, f);
        pick.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pts: &[&[i64]]) -> SupportSet {
        SupportSet::new(pts.iter().map(|p| p.to_vec()).collect())
    }

    fn simplex(n: usize) -> SupportSet {
        let mut pts = vec![vec![0; n]];
        for i in 0..n {
            let mut e = vec![0; n];
            e[i] = 1;
            pts.push(e);
        }
        SupportSet::new(pts)
    }

    fn square() -> SupportSet {
        set(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])
    }

    #[test]
    fn recursive_examples() {
        for n in 1..=4 {
            let ps = vec![simplex(n); n];
            assert_eq!(mixed_volume_recursive(&ps).unwrap(), BigInt::from(1), "n = {n}");
        }
        assert_eq!(mixed_volume_recursive(&[square(), square()]).unwrap(), BigInt::from(2));
        let segs = [set(&[&[0, 0], &[1, 0]]), set(&[&[0, 0], &[0, 1]])];
        assert_eq!(mixed_volume_recursive(&segs).unwrap(), BigInt::from(1));
        // dense quadrics: Bezout number
        let quad = set(&[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]]);
        assert_eq!(mixed_volume_recursive(&[quad.clone(), quad]).unwrap(), BigInt::from(4));
    }

    #[test]
    fn cells_of_two_segments() {
        let segs = [set(&[&[0, 0], &[1, 0]]), set(&[&[0, 0], &[0, 1]])];
        let cells = mixed_cells(&lift_random_tuple(&segs, 7)).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].volume, BigInt::from(1));
    }

    #[test]
    fn lifting_matches_recursion() {
        let quad = set(&[&[0, 0], &[1, 0], &[0, 1], &[2, 0], &[1, 1], &[0, 2]]);
        let tri = set(&[&[0, 0], &[3, 1], &[1, 2]]);
        for ps in [vec![square(), square()], vec![quad.clone(), tri.clone()], vec![tri.clone(), quad]] {
            assert_eq!(mixed_volume(&ps, 0xC0FFEE).unwrap(), mixed_volume_recursive(&ps).unwrap());
        }
        for n in 1..=4 {
            assert_eq!(mixed_volume(&vec![simplex(n); n], 1).unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn tau_lift_coordinates() {
        let a = set(&[&[1, 2, 1], &[0, 0, 0]]);
        let l = lift_tau(&a, 3);
        assert_eq!(l.points[1][1..], [2, 1]);
        assert_eq!(l.lift_values, vec![0, 1]);
        assert_eq!(l.points[0][1..], [0, 0]);
        assert!((0..LIFT_RANGE).contains(&l.points[0][0]));
    }

    #[test]
    fn cyclic4_tau_tropism() {
        let cyc: Vec<SupportSet> = vec![
            set(&[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]),
            set(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 1]]),
            set(&[&[1, 1, 1, 0], &[0, 1, 1, 1], &[1, 0, 1, 1], &[1, 1, 0, 1]]),
            set(&[&[1, 1, 1, 1], &[0, 0, 0, 0]]),
        ];
        let want = vec![IntVector::from_i64s(&[1, -1, 1, -1])];
        assert_eq!(tau_tropisms(&cyc, 0xC0FFEE, false).unwrap(), want);
        assert_eq!(tau_tropisms(&cyc, 0xC0FFEE, true).unwrap(), want);
    }
}
