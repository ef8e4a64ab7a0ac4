//! Pretropisms of a system and initial form systems.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;

use crate::lattice::{kernel_basis, IntMatrix, IntVector};
use crate::lp::LinearSystem;
use crate::polynomial::{LaurentPoly, LaurentSystem};
use crate::polytope::{face, faces, PolytopeFace, SupportSet};
use crate::{Error, Result};

/// A primitive direction with, for every polynomial, the face of its Newton
/// polytope it selects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tropism {
    pub v: IntVector,
    pub faces: Vec<SupportSet>,
    pub orbit: Option<usize>,
}

impl Tropism {
    pub fn from_direction(supports: &[SupportSet], v: IntVector) -> Tropism {
        let faces = supports.iter().map(|a| face(a, &v)).collect();
        Tropism { v, faces, orbit: None }
    }
}

/// The terms of `f` on the face selected by `v`, and the minimal value
/// `min ⟨a, v⟩`.
pub fn initial_form(f: &LaurentPoly, v: &IntVector) -> (LaurentPoly, BigInt) {
    let val = |e: &[i64]| -> BigInt { e.iter().zip(&v.0).map(|(&a, b)| BigInt::from(a) * b).sum() };
    let m = f.terms().map(|(e, _)| val(e)).min().unwrap_or_default();
    (f.filter_terms(|e| val(e) == m), m)
}

pub fn initial_form_system(s: &LaurentSystem, v: &IntVector) -> LaurentSystem {
    s.map(|f| Ok(initial_form(f, v).0)).expect("same shape")
}

/// Options for [`enumerate_pretropisms_with`].
#[derive(Clone, Debug)]
pub struct EnumerationOptions {
    /// Keep only rays with positive first coordinate.
    pub positive_first: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { positive_first: true }
    }
}

/// All rays of the intersection of the normal fans restricted to directions
/// whose face has at least two points in every polytope, with positive first
/// coordinate, in increasing lexicographic order.
pub fn enumerate_pretropisms(s: &LaurentSystem) -> Result<Vec<Tropism>> {
    enumerate_pretropisms_with(s, &EnumerationOptions::default())
}

pub fn enumerate_pretropisms_with(s: &LaurentSystem, opts: &EnumerationOptions) -> Result<Vec<Tropism>> {
    let supports = s.supports();
    let rays = pretropism_rays(&supports, opts)?;
    Ok(rays
        .into_iter()
        .map(|v| Tropism::from_direction(&supports, IntVector::from_i64s(&v)))
        .collect())
}

/// Processing order: polytopes with fewest faces first.
fn processing_order(face_lists: &[Vec<PolytopeFace>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..face_lists.len()).collect();
    order.sort_by_key(|&i| (face_lists[i].len(), i));
    order
}

/// A relatively open cone `{B·u : R·u > 0}` where the columns of `B` span
/// its linear hull.
#[derive(Clone, Debug)]
struct Cell {
    basis: Vec<Vec<i64>>,
    rows: Vec<Vec<i64>>,
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter()
        .zip(b)
        .try_fold(0i64, |s, (x, y)| s.checked_add(x.checked_mul(*y)?))
        .expect("cone coordinates overflow i64")
}

fn in_basis(g: &[i64], basis: &[Vec<i64>]) -> Vec<i64> {
    basis.iter().map(|b| dot(g, b)).collect()
}

fn primitive_row(r: &[i64]) -> Option<Vec<i64>> {
    let g = r.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    if g == 0 {
        None
    } else {
        Some(r.iter().map(|x| x / g).collect())
    }
}

impl Cell {
    fn root(n: usize, positive_first: bool) -> Cell {
        let basis: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        let rows = if positive_first { vec![basis[0].clone()] } else { Vec::new() };
        Cell { basis, rows }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Intersection with the open normal cone of `f`, if nonempty.
    fn meet(&self, f: &PolytopeFace) -> Option<Cell> {
        let d = self.dim();
        let eqs: Vec<Vec<i64>> = f
            .equalities
            .iter()
            .map(|e| in_basis(e, &self.basis))
            .filter(|r| r.iter().any(|&x| x != 0))
            .collect();
        let (basis, mut rows) = if eqs.is_empty() {
            (self.basis.clone(), self.rows.clone())
        } else {
            let m = IntMatrix::from_rows(&eqs).ok()?;
            let k: Vec<Vec<i64>> = kernel_basis(&m)
                .iter()
                .map(|v| v.to_i64s().expect("cone coordinates overflow i64"))
                .collect();
            if k.is_empty() {
                return None;
            }
            let basis: Vec<Vec<i64>> = k
                .iter()
                .map(|kv| {
                    (0..self.basis[0].len())
                        .map(|i| (0..d).map(|j| kv[j] * self.basis[j][i]).sum::<i64>())
                        .collect()
                })
                .collect();
            let rows = self.rows.iter().map(|r| in_basis(r, &k)).collect();
            (basis, rows)
        };
        rows.extend(f.strict_rows.iter().map(|g| in_basis(g, &basis)));
        let mut rows: Vec<Vec<i64>> = rows.iter().map(|r| primitive_row(r)).collect::<Option<_>>()?;
        rows.sort();
        rows.dedup();
        let set: BTreeSet<&Vec<i64>> = rows.iter().collect();
        if rows.iter().any(|r| set.contains(&r.iter().map(|x| -x).collect::<Vec<_>>())) {
            return None;
        }
        let cell = Cell { basis, rows };
        if cell.dim() == 1 || cell.is_open_nonempty() {
            Some(cell)
        } else {
            None
        }
    }

    fn is_open_nonempty(&self) -> bool {
        let mut sys = LinearSystem::new(self.dim());
        for r in &self.rows {
            sys.ge(r.clone(), 1);
        }
        sys.is_feasible()
    }

    /// The rays of a one-dimensional cell.
    fn rays(&self) -> Vec<Vec<i64>> {
        let b = primitive_row(&self.basis[0]).expect("basis vectors are nonzero");
        let neg: Vec<i64> = b.iter().map(|x| -x).collect();
        match self.rows.first().map(|r| r[0].signum()) {
            Some(1) => vec![b],
            Some(_) => vec![neg],
            None => vec![b, neg],
        }
    }
}

/// Depth-first refinement of relatively open cones. Every direction has
/// exactly one face per polytope, so the leaves partition the prevariety and
/// no cell is visited twice; the one-dimensional leaves are the rays.
pub fn pretropism_rays(supports: &[SupportSet], opts: &EnumerationOptions) -> Result<Vec<Vec<i64>>> {
    let n = supports.first().map(SupportSet::dim).ok_or(Error::EmptyInput)?;
    if supports.iter().any(|a| a.len() < 2) {
        return Err(Error::MonomialEquation);
    }
    let face_lists: Vec<Vec<PolytopeFace>> = supports.iter().map(faces).collect();
    let order = processing_order(&face_lists);
    let mut found = BTreeSet::new();
    refine(&Cell::root(n, opts.positive_first), 0, &order, &face_lists, &mut found);
    Ok(found.into_iter().collect())
}

fn refine(
    cell: &Cell,
    depth: usize,
    order: &[usize],
    face_lists: &[Vec<PolytopeFace>],
    found: &mut BTreeSet<Vec<i64>>,
) {
    if depth == order.len() {
        if cell.dim() == 1 {
            found.extend(cell.rays());
        }
        return;
    }
    for f in &face_lists[order[depth]] {
        if let Some(next) = cell.meet(f) {
            refine(&next, depth + 1, order, face_lists, found);
        }
    }
}

pub fn check_permutation(p: &[usize], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::InvalidPermutation(format!("length {} for {} variables", p.len(), n)));
    }
    let mut seen = vec![false; n];
    for &i in p {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation(format!("{p:?} is not a bijection")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Applies the variable permutation `x_i -> x_{p[i]}` to a direction.
pub fn permute_vector(v: &[i64], p: &[usize]) -> Vec<i64> {
    let mut w = vec![0; v.len()];
    for (i, &x) in v.iter().enumerate() {
        w[p[i]] = x;
    }
    w
}

/// Partitions `ts` into orbits of the group generated by `generators`,
/// acting by coordinate permutation. Orbits are closed in the whole group,
/// so two members connected only through directions outside `ts` still
/// share an orbit. Returns index lists in order of first member.
pub fn group_orbits(ts: &[Vec<i64>], generators: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let n = ts.first().map_or(0, Vec::len);
    for g in generators {
        check_permutation(g, n)?;
    }
    let index: BTreeMap<&Vec<i64>, usize> = ts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut label = vec![usize::MAX; ts.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..ts.len() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        let mut seen: HashSet<Vec<i64>> = HashSet::new();
        let mut queue = VecDeque::from([ts[start].clone()]);
        seen.insert(ts[start].clone());
        while let Some(v) = queue.pop_front() {
            if let Some(&i) = index.get(&v) {
                if label[i] == usize::MAX {
                    label[i] = id;
                    members.push(i);
                }
            }
            for g in generators {
                let w = permute_vector(&v, g);
                if seen.insert(w.clone()) {
                    queue.push_back(w);
                }
            }
        }
        members.sort();
        orbits.push(members);
    }
    Ok(orbits)
}

/// Generator of the cyclic shift `x_i -> x_{i+1}` on `n` variables.
pub fn cyclic_generator(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}
