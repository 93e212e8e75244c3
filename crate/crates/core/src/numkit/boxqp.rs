//! Box-constrained convex QP: minimize ½xᵀMx − qᵀx subject to lower ≤ x ≤ upper.
//!
//! Projected gradient with a Barzilai–Borwein step length, monotone Armijo
//! backtracking, and an active-set polish that solves the free subsystem
//! exactly once the active set settles. One-sided (infinite) bounds are fine.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, norm_inf, Matrix};
use crate::numkit::solve_spd;

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 5000;

/// A box-constrained quadratic program.
#[derive(Debug, Clone)]
pub struct BoxQp {
    pub m: Matrix,
    pub q: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxQp {
    /// Validates symmetry of the quadratic term and ordering of the bounds.
    pub fn new(m: Matrix, q: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = q.len();
        if m.rows() != n || m.cols() != n || lower.len() != n || upper.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "box qp: M {}x{}, q {}, bounds {}/{}",
                m.rows(),
                m.cols(),
                n,
                lower.len(),
                upper.len()
            )));
        }
        let sym_tol = 1e-10 * (1.0 + norm_inf(m.data()));
        if !m.is_symmetric(sym_tol) {
            return Err(Error::InvalidParam(format!(
                "box qp: M asymmetry {:.3e}",
                m.asymmetry()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidParam("box qp: lower > upper".into()));
        }
        Ok(Self { m, q, lower, upper })
    }

    /// Box with uniform [0, c] bounds (the hinge-loss duals).
    pub fn zero_to_c(m: Matrix, q: Vec<f64>, c: f64) -> Result<Self> {
        let n = q.len();
        Self::new(m, q, vec![0.0; n], vec![c; n])
    }

    fn project(&self, x: &mut [f64]) {
        for ((xi, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *xi = xi.max(l).min(u);
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        let mx = self.m.matvec(x).expect("square");
        0.5 * dot(x, &mx) - dot(&self.q, x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.m.matvec(x).expect("square");
        for (gi, qi) in g.iter_mut().zip(&self.q) {
            *gi -= qi;
        }
        g
    }
}

/// Solver result. `converged` is false when the iteration budget ran out.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn projected_gradient_norm(p: &BoxQp, x: &[f64], g: &[f64]) -> f64 {
    let mut step: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - gi).collect();
    p.project(&mut step);
    let diff: Vec<f64> = x.iter().zip(&step).map(|(xi, si)| xi - si).collect();
    norm2(&diff)
}

/// Exact solve on the free variables with the active ones pinned at their bound.
/// Returns an improved iterate or None when the polish does not help.
fn active_set_polish(p: &BoxQp, x: &[f64], g: &[f64]) -> Option<Vec<f64>> {
    let n = x.len();
    let edge = 1e-10;
    let mut free = Vec::new();
    for i in 0..n {
        let at_lower = x[i] - p.lower[i] <= edge * (1.0 + p.lower[i].abs());
        let at_upper = p.upper[i] - x[i] <= edge * (1.0 + p.upper[i].abs());
        let pinned = (at_lower && g[i] > 0.0) || (at_upper && g[i] < 0.0);
        if !pinned {
            free.push(i);
        }
    }
    if free.is_empty() {
        return None;
    }
    // rhs_F = q_F - M_FA x_A
    let mut rhs = Vec::with_capacity(free.len());
    for &i in &free {
        let mut v = p.q[i];
        for j in 0..n {
            if !free.contains(&j) {
                v -= p.m.get(i, j) * x[j];
            }
        }
        rhs.push(v);
    }
    let mut sub = Matrix::zeros(free.len(), free.len());
    for (a, &i) in free.iter().enumerate() {
        for (b, &j) in free.iter().enumerate() {
            sub.set(a, b, p.m.get(i, j));
        }
    }
    let sol = solve_spd(&sub, &rhs).ok()?;
    let mut candidate = x.to_vec();
    for (a, &i) in free.iter().enumerate() {
        candidate[i] = sol.x[a];
    }
    p.project(&mut candidate);
    if p.objective(&candidate) < p.objective(x) - 1e-16 {
        Some(candidate)
    } else {
        None
    }
}

/// Solves the box QP to a projected-gradient norm of `tol`.
///
/// Returns the best iterate with `converged = false` when `max_iter` runs out;
/// errors out on detectable non-convexity or a diverging iterate.
pub fn solve_box_qp(p: &BoxQp, tol: f64, max_iter: usize) -> Result<QpSolution> {
    if tol <= 0.0 {
        return Err(Error::InvalidParam("box qp: tol must be > 0".into()));
    }
    let n = p.q.len();
    if n == 0 {
        return Ok(QpSolution {
            x: vec![],
            objective: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let diverge_limit = 1e10 * (1.0 + norm_inf(&p.q));

    let mut x = vec![0.0; n];
    p.project(&mut x);
    let mut g = p.gradient(&x);
    let mut f = p.objective(&x);
    let mut step = 1.0 / (1.0 + norm_inf(p.m.data()));
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        if projected_gradient_norm(p, &x, &g) <= tol {
            converged = true;
            break;
        }
        // Barzilai-Borwein step from the previous pair, safeguarded
        if let Some((px, pg)) = &prev {
            let s: Vec<f64> = x.iter().zip(px).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g.iter().zip(pg).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            let ss = dot(&s, &s);
            if sy > 1e-300 {
                step = (ss / sy).clamp(1e-10, 1e10);
            } else if ss > 0.0 {
                // zero curvature along the last move: chase the linear descent
                step = (step * 10.0).min(1e12);
            }
            let curvature = sy / ss.max(1e-300);
            if curvature < -1e-8 {
                return Err(Error::NotConvex(curvature));
            }
        }
        prev = Some((x.clone(), g.clone()));

        // monotone backtracking along the projected arc
        let mut alpha = step;
        let mut accepted = false;
        for _ in 0..60 {
            let mut cand: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
            p.project(&mut cand);
            let fc = p.objective(&cand);
            let d: Vec<f64> = cand.iter().zip(&x).map(|(c, xi)| c - xi).collect();
            let decrease = dot(&g, &d);
            if fc <= f + 1e-4 * decrease || fc < f - 1e-16 {
                x = cand;
                f = fc;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if !accepted {
            // no progress possible at machine precision; polish and stop
            converged = projected_gradient_norm(p, &x, &g) <= tol.max(1e-10);
            break;
        }
        if norm_inf(&x) > diverge_limit {
            return Err(Error::Divergent(norm_inf(&x)));
        }
        g = p.gradient(&x);

        // periodic exact solve on the current active set
        if iterations % 50 == 0 {
            if let Some(better) = active_set_polish(p, &x, &g) {
                x = better;
                f = p.objective(&x);
                g = p.gradient(&x);
                prev = None;
            }
        }
    }

    // final polish: with the active set fixed this is exact for small problems
    for _ in 0..3 {
        match active_set_polish(p, &x, &g) {
            Some(better) => {
                x = better;
                f = p.objective(&x);
                g = p.gradient(&x);
            }
            None => break,
        }
    }
    if projected_gradient_norm(p, &x, &g) <= tol {
        converged = true;
    }

    Ok(QpSolution {
        x,
        objective: f,
        iterations,
        converged,
    })
}
