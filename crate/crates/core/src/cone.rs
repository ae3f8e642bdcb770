//! Facet inequalities of finitely generated convex cones.
//!
//! Facets of `cone(G)` are the extreme rays of the polar cone
//! `{h : g . h >= 0 for all g in G}`. The polar is built by the double
//! description method: start from the simplicial cone of the first
//! lexicographically independent generators and insert the remaining
//! generators one at a time, combining adjacent ray pairs across each new
//! hyperplane. Adjacency is decided by the rank of the common active set.
//!
//! Everything is computed in coordinates of an orthonormal basis of the
//! generator span, so cones that are not full-dimensional in the ambient space
//! are handled by working inside their span.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};

use crate::error::ConeError;
use crate::fragment::RealVector;
use crate::linalg::{rank, span_basis};

/// Rays closer than this (max-abs, unit norm) are merged.
const RAY_MERGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct ConeFacets {
    /// One unit-norm facet normal per row, in span coordinates.
    pub normals: DMatrix<f64>,
    pub generator_span_dim: usize,
    /// Orthonormal span basis in ambient coordinates (`d x generator_span_dim`).
    pub basis: DMatrix<f64>,
}

impl ConeFacets {
    pub fn n_facets(&self) -> usize {
        self.normals.nrows()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.normals
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn to_span_coords(&self, v: &RealVector) -> DVector<f64> {
        self.basis.tr_mul(&v.to_dvector())
    }

    /// `H v` for `v` in span coordinates.
    pub fn evaluate(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.normals * coords
    }

    /// Membership for an ambient vector: it has to lie in the generator span
    /// and satisfy every facet inequality.
    pub fn contains_ambient(&self, v: &RealVector, tol: f64) -> bool {
        let c = self.to_span_coords(v);
        let back = &self.basis * &c;
        if (back - v.to_dvector()).amax() > tol * v.norm().max(1.0) {
            return false;
        }
        cone_contains(self, c.as_slice(), tol)
    }
}

/// `true` iff `H v >= -tol` entrywise, `v` in span coordinates.
pub fn cone_contains(h: &ConeFacets, v: &[f64], tol: f64) -> bool {
    let v = DVector::from_column_slice(v);
    h.evaluate(&v).iter().all(|&x| x >= -tol)
}

struct Prepared {
    basis: DMatrix<f64>,
    /// Unit-norm, deduplicated generator coordinates.
    coords: Vec<DVector<f64>>,
}

fn prepare(generators: &[RealVector], tol: f64) -> Result<Prepared, ConeError> {
    let Some(first) = generators.first() else {
        return Err(ConeError::Degenerate);
    };
    let d = first.len();
    for g in generators {
        if g.len() != d {
            return Err(ConeError::DimensionMismatch {
                expected: d,
                found: g.len(),
            });
        }
    }
    let nonzero: Vec<DVector<f64>> = generators
        .iter()
        .filter(|g| g.norm() > tol)
        .map(|g| g.to_dvector())
        .collect();
    if nonzero.is_empty() {
        return Err(ConeError::Degenerate);
    }
    let basis = span_basis(&nonzero, d, tol);
    let mut coords: Vec<DVector<f64>> = Vec::new();
    for g in &nonzero {
        let c = basis.tr_mul(g);
        let c = &c / c.norm();
        if !coords.iter().any(|x| (x - &c).amax() <= tol) {
            coords.push(c);
        }
    }
    Ok(Prepared { basis, coords })
}

/// Facet normals of the cone generated by `generators`.
///
/// Zero generators are ignored and duplicates merged. A cone containing a line
/// has fewer facets than its span dimension requires; the whole span has none.
pub fn enumerate_facets(generators: &[RealVector], tol: f64) -> Result<ConeFacets, ConeError> {
    let prep = prepare(generators, tol)?;
    let k = prep.basis.ncols();
    let rays = double_description(&prep.coords, k, tol)?;
    Ok(ConeFacets {
        normals: canonical_rows(rays, k),
        generator_span_dim: k,
        basis: prep.basis,
    })
}

/// Reference facet enumeration for cones whose span is three-dimensional:
/// every signed, normalized cross product of a generator pair that leaves all
/// generators on its nonnegative side.
pub fn enumerate_facets_bruteforce_3d(
    generators: &[RealVector],
    tol: f64,
) -> Result<ConeFacets, ConeError> {
    let prep = prepare(generators, tol)?;
    let k = prep.basis.ncols();
    if k != 3 {
        return Err(ConeError::SpanDimension {
            expected: 3,
            found: k,
        });
    }
    let g = &prep.coords;
    let mut rays = Vec::new();
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let n = g[i].cross(&g[j]);
            let norm = n.norm();
            if norm <= tol {
                continue;
            }
            let n = n / norm;
            for sign in [1.0, -1.0] {
                let cand = &n * sign;
                if g.iter().all(|x| x.dot(&cand) >= -tol) {
                    rays.push(cand);
                }
            }
        }
    }
    Ok(ConeFacets {
        normals: canonical_rows(rays, 3),
        generator_span_dim: 3,
        basis: prep.basis,
    })
}

fn double_description(gens: &[DVector<f64>], k: usize, tol: f64) -> Result<Vec<DVector<f64>>, ConeError> {
    // lexicographically first independent subset
    let mut chosen: Vec<usize> = Vec::with_capacity(k);
    for i in 0..gens.len() {
        if chosen.len() == k {
            break;
        }
        let mut trial: Vec<DVector<f64>> = chosen.iter().map(|&j| gens[j].clone()).collect();
        trial.push(gens[i].clone());
        if rank(&trial, k, tol) == trial.len() {
            chosen.push(i);
        }
    }
    if chosen.len() < k {
        return Err(ConeError::IllConditioned { tol });
    }

    let b = DMatrix::from_fn(k, k, |r, c| gens[chosen[r]][c]);
    let Some(inv) = b.try_inverse() else {
        return Err(ConeError::IllConditioned { tol });
    };
    let mut rays: Vec<DVector<f64>> = (0..k)
        .map(|c| {
            let col = inv.column(c).into_owned();
            let n = col.norm();
            col / n
        })
        .collect();
    let mut processed = chosen.clone();

    for i in 0..gens.len() {
        if chosen.contains(&i) {
            continue;
        }
        let g = &gens[i];
        let vals: Vec<f64> = rays.iter().map(|r| g.dot(r)).collect();
        if vals.iter().all(|&v| v >= -tol) {
            processed.push(i);
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] > tol).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j] < -tol).collect();
        let mut next: Vec<DVector<f64>> = (0..rays.len())
            .filter(|&j| vals[j] >= -tol)
            .map(|j| rays[j].clone())
            .collect();
        if k >= 2 {
            for &p in &pos {
                for &n in &neg {
                    if !adjacent(&rays[p], &rays[n], gens, &processed, k, tol) {
                        continue;
                    }
                    let ray = &rays[n] * vals[p] - &rays[p] * vals[n];
                    let norm = ray.norm();
                    if norm > tol {
                        next.push(ray / norm);
                    }
                }
            }
        }
        rays = next;
        processed.push(i);
    }
    Ok(rays)
}

fn adjacent(
    a: &DVector<f64>,
    b: &DVector<f64>,
    gens: &[DVector<f64>],
    processed: &[usize],
    k: usize,
    tol: f64,
) -> bool {
    let common: Vec<DVector<f64>> = processed
        .iter()
        .filter(|&&j| gens[j].dot(a).abs() <= tol && gens[j].dot(b).abs() <= tol)
        .map(|&j| gens[j].clone())
        .collect();
    if common.len() < k - 2 {
        return false;
    }
    rank(&common, k, tol) == k - 2
}

/// Unit-norm rows, near-duplicates merged, sorted lexicographically.
fn canonical_rows(rays: Vec<DVector<f64>>, k: usize) -> DMatrix<f64> {
    let mut rows: Vec<DVector<f64>> = Vec::new();
    for r in rays {
        let r = &r / r.norm();
        if !rows.iter().any(|x| (x - &r).amax() <= RAY_MERGE_TOL) {
            rows.push(r);
        }
    }
    rows.sort_by(|a, b| lex_cmp(a.as_slice(), b.as_slice()));
    DMatrix::from_fn(rows.len(), k, |i, j| rows[i][j])
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > RAY_MERGE_TOL {
            return x.total_cmp(y);
        }
    }
    Ordering::Equal
}
