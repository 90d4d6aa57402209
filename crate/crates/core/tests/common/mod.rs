//! Brute-force reference computations. Nothing here calls the closed forms
//! under test.
#![allow(dead_code)]

use mgl::bundle::{CMatrix, HermitianBundle};
use mgl::section::Section;
use mgl::WeightedGraph;
use num_complex::Complex64;

/// `½ Σ_{x,y} b(x,y) |u(x) − Φ_{x,y} u(y)|² + Σ_x ⟨W(x) u(x), u(x)⟩` by direct
/// double sum over ordered vertex pairs.
pub fn magnetic_energy(bundle: &HermitianBundle, u: &Section) -> f64 {
    let g = bundle.graph();
    let d = bundle.rank();
    let mut sum = 0.0;
    for x in 0..g.n() {
        for y in 0..g.n() {
            let b = g.weight(x, y);
            if b == 0.0 {
                continue;
            }
            let phi = bundle.connection(x, y).expect("edge has a connection");
            let uy = nalgebra::DVector::from_column_slice(u.block(y));
            let t = &phi * uy;
            let diff: f64 = (0..d).map(|k| (u.block(x)[k] - t[k]).norm_sqr()).sum();
            sum += 0.5 * b * diff;
        }
        let ux = nalgebra::DVector::from_column_slice(u.block(x));
        sum += (ux.adjoint() * bundle.endo(x) * &ux)[(0, 0)].re;
    }
    sum
}

/// `½ Σ b(x,y) |u(x) − u(y)|² + Σ c(x) |u(x)|²`.
pub fn scalar_energy(g: &WeightedGraph, u: &[Complex64]) -> f64 {
    let mut sum = 0.0;
    for x in 0..g.n() {
        for y in 0..g.n() {
            sum += 0.5 * g.weight(x, y) * (u[x] - u[y]).norm_sqr();
        }
        sum += g.killing()[x] * u[x].norm_sqr();
    }
    sum
}

/// Componentwise clamp at zero.
pub fn clamp(g: &[f64]) -> Vec<f64> {
    g.iter().map(|&x| if x < 0.0 { 0.0 } else { x }).collect()
}

/// Projection of `(f1, g)` onto `{(u, v) : |u(x)| ≤ v(x)}`.
///
/// The problem splits by vertex. For fixed `v ≥ 0` the best `u` is `f1(x)`
/// pulled into the ball of radius `v`, leaving the scalar problem
/// `min_{v ≥ 0} (v − g)² + ((|f1| − v)⁺)²`, solved by projected gradient.
pub fn project_c_oracle(f1: &Section, g: &[f64]) -> (Section, Vec<f64>) {
    let mut u = f1.clone();
    let mut v_out = Vec::with_capacity(g.len());
    for (x, &gx) in g.iter().enumerate() {
        let s = f1.block(x).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut v = gx.max(0.0);
        for _ in 0..10_000 {
            let grad = 2.0 * (v - gx) - 2.0 * (s - v).max(0.0);
            let next = (v - 0.25 * grad).max(0.0);
            let done = (next - v).abs() <= 1e-12;
            v = next;
            if done {
                break;
            }
        }
        if s > v {
            for z in u.block_mut(x) {
                *z *= v / s;
            }
        }
        v_out.push(v);
    }
    (u, v_out)
}

/// All-pairs shortest path lengths by enumerating every simple path.
/// `None` marks disconnected pairs.
pub fn enumerate_path_lengths(g: &WeightedGraph, sigma: &[f64]) -> Vec<Vec<Option<f64>>> {
    let n = g.n();
    let mut len = vec![vec![None; n]; n];
    for e in g.edges().iter().zip(sigma) {
        len[e.0.u][e.0.v] = Some(*e.1);
        len[e.0.v][e.0.u] = Some(*e.1);
    }
    let mut best = vec![vec![None; n]; n];
    for s in 0..n {
        let mut visited = vec![false; n];
        visited[s] = true;
        dfs(s, 0.0, &len, &mut visited, &mut best[s]);
    }
    best
}

fn dfs(x: usize, acc: f64, len: &[Vec<Option<f64>>], visited: &mut [bool], best: &mut [Option<f64>]) {
    if best[x].is_none_or(|b| acc < b) {
        best[x] = Some(acc);
    }
    for y in 0..len.len() {
        if let (false, Some(l)) = (visited[y], len[x][y]) {
            visited[y] = true;
            dfs(y, acc + l, len, visited, best);
            visited[y] = false;
        }
    }
}

/// `e^{-tA}` for `A = M^{-1} L`, by scaling and squaring a Taylor series.
pub fn expm_generator(l: &CMatrix, measure: &[f64], t: f64) -> CMatrix {
    let n = l.nrows();
    let d = n / measure.len();
    let mut a = l.clone();
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= -t / measure[i / d];
        }
    }
    let norm = a.iter().map(|z| z.norm()).fold(0.0, f64::max) * n as f64;
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = a * Complex64::new(scale, 0.0);
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..30 {
        term = &term * &a * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `(A + α)^{-1} u` by an LU solve of `(L + α M) x = M u`.
pub fn resolvent_lu(l: &CMatrix, measure: &[f64], alpha: f64, u: &[Complex64]) -> Vec<Complex64> {
    let n = l.nrows();
    let d = n / measure.len();
    let mut k = l.clone();
    let mut rhs = nalgebra::DVector::from_column_slice(u);
    for i in 0..n {
        k[(i, i)] += Complex64::new(alpha * measure[i / d], 0.0);
        rhs[i] *= measure[i / d];
    }
    k.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn as_complex(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}
