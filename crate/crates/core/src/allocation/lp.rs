//! The face-mass linear program
//!
//! ```text
//! maximize   Σ_I (|I| − 1) p_I
//! subject to p_I ≥ 0,   Σ_{I ∋ i} p_I ≤ cap_i   (i = 1..n)
//! ```
//!
//! and its dual `minimize Σ_i cap_i r_i` over `r ≥ 0`, `Σ_{i∈I} r_i ≥ |I| − 1`.
//!
//! The primal is solved with a dense tableau simplex (every right-hand side
//! is non-negative, so the slack basis is a feasible start). Ties between
//! optimal vertices are broken by a second pass that maximizes `Σ_I p_I`
//! over the optimal face, and Bland's rule makes every pivot deterministic.

use alloc::vec;
use alloc::vec::Vec;

use super::faces::{enumerate_faces, FaceSet};
use super::FaceAllocation;
use crate::error::{Error, Result};
use crate::math::{self, EPS};

/// Largest dimension accepted by [`lp_max_weighted_mass`].
pub const MAX_LP_DIMENSION: usize = 12;

/// Largest dimension for which [`DualPolytope`] enumerates vertices.
pub const MAX_DUAL_DIMENSION: usize = 5;

const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    /// `Σ_I (|I| − 1) p_I` at the returned maximizer.
    pub value: f64,
    pub allocation: FaceAllocation,
}

/// Maximize the weighted face mass under the axis capacities `caps`.
pub fn lp_max_weighted_mass(caps: &[f64]) -> Result<LpSolution> {
    let n = caps.len();
    if n > MAX_LP_DIMENSION {
        return Err(Error::Capacity { n, max: MAX_LP_DIMENSION });
    }
    for &c in caps {
        if !math::is_probability(c) {
            return Err(Error::Domain { what: "cap", value: c });
        }
    }
    let faces = enumerate_faces(n)?;
    let masses = if faces.is_empty() { Vec::new() } else { solve_face_lp(n, &faces, caps)? };
    let allocation = FaceAllocation::from_parts(n, faces, masses, caps.to_vec());
    Ok(LpSolution { value: allocation.weighted_mass(), allocation })
}

fn solve_face_lp(n: usize, faces: &[FaceSet], caps: &[f64]) -> Result<Vec<f64>> {
    let k = faces.len();
    let mut a = vec![0.0; n * k];
    for (j, f) in faces.iter().enumerate() {
        for i in f.indices() {
            a[i * k + j] = 1.0;
        }
    }
    let weight: Vec<f64> = faces.iter().map(|f| f.len() as f64 - 1.0).collect();
    let count = vec![1.0; k];
    let mut x = Tableau::new(n, k, &a, caps, &weight, &count).solve()?;
    // pivots can leave round-off dust of either sign
    for v in x.iter_mut() {
        if v.abs() < 1e-12 {
            *v = 0.0;
        }
    }
    Ok(x)
}

/// Dense simplex tableau for `max c·x, A x ≤ b, x ≥ 0` with `b ≥ 0` and a
/// secondary objective used for tie-breaking.
struct Tableau {
    rows: usize,
    /// Structural variables followed by one slack per row.
    cols: usize,
    structural: usize,
    /// Row-major `rows × (cols + 1)`; the last column is the right-hand side.
    body: Vec<f64>,
    basis: Vec<usize>,
    /// Reduced costs for the primary and secondary objectives.
    reduced: [Vec<f64>; 2],
}

impl Tableau {
    fn new(rows: usize, structural: usize, a: &[f64], b: &[f64], c1: &[f64], c2: &[f64]) -> Self {
        let cols = structural + rows;
        let width = cols + 1;
        let mut body = vec![0.0; rows * width];
        for i in 0..rows {
            body[i * width..i * width + structural]
                .copy_from_slice(&a[i * structural..(i + 1) * structural]);
            body[i * width + structural + i] = 1.0;
            body[i * width + cols] = b[i];
        }
        let pad = |c: &[f64]| {
            let mut r = c.to_vec();
            r.resize(cols, 0.0);
            r
        };
        Self {
            rows,
            cols,
            structural,
            body,
            basis: (structural..cols).collect(),
            reduced: [pad(c1), pad(c2)],
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn solve(mut self) -> Result<Vec<f64>> {
        let all = vec![true; self.cols];
        self.optimize(0, &all)?;
        // Stay on the optimal face of the primary objective: columns with a
        // strictly negative reduced cost would lower it if they entered.
        let allowed: Vec<bool> = self.reduced[0].iter().map(|&d| d >= -PIVOT_TOL).collect();
        self.optimize(1, &allowed)?;
        let w = self.width();
        let mut x = vec![0.0; self.structural];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.structural {
                x[bv] = self.body[i * w + self.cols];
            }
        }
        Ok(x)
    }

    fn optimize(&mut self, objective: usize, allowed: &[bool]) -> Result<()> {
        for _ in 0..MAX_PIVOTS {
            // Bland's rule: lowest-index improving column
            let entering =
                (0..self.cols).find(|&j| allowed[j] && self.reduced[objective][j] > PIVOT_TOL);
            let Some(col) = entering else {
                return Ok(());
            };
            let w = self.width();
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let aij = self.body[i * w + col];
                if aij > PIVOT_TOL {
                    let ratio = self.body[i * w + self.cols] / aij;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best - PIVOT_TOL
                                || (ratio <= best + PIVOT_TOL && self.basis[i] < self.basis[r])
                            {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            // Capacities bound every structural column, so the LP is never unbounded.
            let (row, _) = leave.ok_or(Error::LpIterationLimit(0))?;
            self.pivot(row, col);
        }
        Err(Error::LpIterationLimit(MAX_PIVOTS))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.body[row * w + col];
        for v in &mut self.body[row * w..(row + 1) * w] {
            *v /= p;
        }
        let pivot_row: Vec<f64> = self.body[row * w..(row + 1) * w].to_vec();
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let f = self.body[i * w + col];
            if f != 0.0 {
                for (v, pr) in self.body[i * w..(i + 1) * w].iter_mut().zip(&pivot_row) {
                    *v -= f * pr;
                }
            }
        }
        for red in self.reduced.iter_mut() {
            let f = red[col];
            if f != 0.0 {
                for (v, pr) in red.iter_mut().zip(&pivot_row[..self.cols]) {
                    *v -= f * pr;
                }
            }
        }
        self.basis[row] = col;
    }
}

/// Closed-form LP optimum `min{ (n−2)/(n−1) Σ cap_i, Σ cap_i − max_i cap_i }`.
pub fn closed_form_optimum(caps: &[f64]) -> f64 {
    math::face_capacity_bound(caps)
}

/// Vertex set of the dual feasible region
/// `{ r ≥ 0 : Σ_{i∈I} r_i ≥ |I| − 1 for all faces I }`.
///
/// The region does not depend on the capacities, so the vertices are
/// enumerated once and the dual optimum for any `caps ≥ 0` is the minimum
/// of `caps · r` over them.
#[derive(Debug, Clone)]
pub struct DualPolytope {
    n: usize,
    vertices: Vec<Vec<f64>>,
}

impl DualPolytope {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Shape { expected: 3, found: n });
        }
        if n > MAX_DUAL_DIMENSION {
            return Err(Error::Capacity { n, max: MAX_DUAL_DIMENSION });
        }
        // Each constraint as (normal, rhs): first r_i ≥ 0, then the face rows.
        let mut normals: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                (e, 0.0)
            })
            .collect();
        for f in enumerate_faces(n)? {
            let mut e = vec![0.0; n];
            for i in f.indices() {
                e[i] = 1.0;
            }
            normals.push((e, f.len() as f64 - 1.0));
        }
        let mut vertices: Vec<Vec<f64>> = Vec::new();
        let m = normals.len();
        let mut comb: Vec<usize> = (0..n).collect();
        loop {
            if let Some(r) = solve_square(&comb.iter().map(|&c| &normals[c]).collect::<Vec<_>>()) {
                let feasible = normals.iter().all(|(e, rhs)| {
                    e.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() >= rhs - 1e-9
                });
                let fresh =
                    !vertices.iter().any(|v| v.iter().zip(&r).all(|(a, b)| (a - b).abs() < 1e-9));
                if feasible && fresh {
                    vertices.push(r);
                }
            }
            let mut pos = n;
            while pos > 0 && comb[pos - 1] == m - n + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            comb[pos - 1] += 1;
            for j in pos..n {
                comb[j] = comb[j - 1] + 1;
            }
        }
        Ok(Self { n, vertices })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// `min_r caps · r` over the vertices, with the minimizing vertex.
    pub fn minimize(&self, caps: &[f64]) -> Result<(f64, &[f64])> {
        if caps.len() != self.n {
            return Err(Error::Shape { expected: self.n, found: caps.len() });
        }
        let mut best = (f64::INFINITY, self.vertices[0].as_slice());
        for v in &self.vertices {
            let val: f64 = v.iter().zip(caps).map(|(a, b)| a * b).sum();
            if val < best.0 {
                best = (val, v.as_slice());
            }
        }
        Ok(best)
    }

    /// The vertices named as the only relevant ones: `((n−2)/(n−1), …)` and
    /// the permutations of `(1, …, 1, 0)`.
    pub fn claimed_relevant_vertices(n: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![(n as f64 - 2.0) / (n as f64 - 1.0); n]];
        for k in 0..n {
            let mut v = vec![1.0; n];
            v[k] = 0.0;
            out.push(v);
        }
        out
    }
}

/// Solve the square system given by the selected constraint rows, or `None`
/// when it is singular.
fn solve_square(rows: &[&(Vec<f64>, f64)]) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|(e, rhs)| {
            let mut r = e.clone();
            r.push(*rhs);
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs()))?;
        if m[piv][c].abs() < EPS {
            return None;
        }
        m.swap(c, piv);
        for r in 0..n {
            if r != c {
                let f = m[r][c] / m[c][c];
                if f != 0.0 {
                    for k in c..=n {
                        m[r][k] -= f * m[c][k];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}
