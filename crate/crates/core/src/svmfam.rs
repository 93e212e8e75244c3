//! The SVM and twin-SVM family: six trainers (linear and Gaussian) plus
//! prediction for the standard and twin decision rules.

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::kernels::{gram, KernelSpec};
use crate::matrix::{norm2, Matrix};
use crate::numkit::{
    solve_box_qp, solve_spd, solve_spd_matrix, BoxQp, DEFAULT_MAX_ITER, DEFAULT_TOL,
    RIDGE_FALLBACK,
};

#[derive(Debug, Clone)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    /// Splits a stacked [w; b] solution, applying an overall sign.
    fn from_stacked(v: &[f64], sign: f64) -> Self {
        let (w, b) = v.split_at(v.len() - 1);
        Hyperplane {
            w: w.iter().map(|x| sign * x).collect(),
            b: sign * b[0],
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        self.w.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() + self.b
    }
}

/// Hyperparameters actually used by the trainer that built the model.
#[derive(Debug, Clone, Default)]
pub struct TwinHyper {
    pub c1: f64,
    pub c2: f64,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub e1: Option<Vec<f64>>,
    pub e2: Option<Vec<f64>>,
    pub tau1: Option<f64>,
    pub tau2: Option<f64>,
}

/// A pair of non-parallel planes; plane 1 belongs to the patient class (+1).
#[derive(Debug, Clone)]
pub struct TwinClassifier {
    pub plane1: Hyperplane,
    pub plane2: Hyperplane,
    pub kernel: KernelSpec,
    /// Training stack C = [X₁; X₂] for kernelized models, empty for linear.
    pub reference: Matrix,
    pub hyper: TwinHyper,
    /// Divide plane responses by ||w|| during prediction (off by default).
    pub normalize: bool,
    /// True when any inner linear solve fell back to the ridge retry.
    pub ridged: bool,
    pub converged: bool,
    #[doc(hidden)]
    pub duals: (Vec<f64>, Vec<f64>),
}

#[derive(Debug, Clone)]
pub struct SvmClassifier {
    pub alpha: Vec<f64>,
    pub points: Matrix,
    pub labels: Vec<i8>,
    pub kernel: KernelSpec,
    pub c: f64,
    pub converged: bool,
}

struct TwinProblem {
    /// H = P = [Z₁ e] over the patient class.
    h: Matrix,
    /// G = Q = [Z₂ e] over the control class.
    g: Matrix,
    reference: Matrix,
}

fn split_classes(ds: &Dataset) -> (Matrix, Matrix) {
    let pos = ds.class_indices(1);
    let neg = ds.class_indices(-1);
    let x1 = ds.x.select_rows(&pos).expect("indices in range");
    let x2 = ds.x.select_rows(&neg).expect("indices in range");
    (x1, x2)
}

fn twin_problem(ds: &Dataset, k: KernelSpec) -> Result<TwinProblem> {
    let (x1, x2) = split_classes(ds);
    if k.is_linear() {
        Ok(TwinProblem {
            h: x1.augment_ones(),
            g: x2.augment_ones(),
            reference: Matrix::zeros(0, 0),
        })
    } else {
        let reference = x1.vstack(&x2)?;
        let z1 = gram(&x1, &reference, k)?;
        let z2 = gram(&x2, &reference, k)?;
        Ok(TwinProblem {
            h: z1.augment_ones(),
            g: z2.augment_ones(),
            reference,
        })
    }
}

fn ridge_or_fallback(c: f64) -> f64 {
    if c > 0.0 {
        c
    } else {
        RIDGE_FALLBACK
    }
}

/// M = other·base⁻¹·otherᵀ, symmetrized against round-off.
fn dual_matrix(base: &Matrix, other: &Matrix) -> Result<(Matrix, bool)> {
    let (y, ridged) = solve_spd_matrix(base, &other.transpose())?;
    let mut m = other.matmul(&y)?;
    for i in 0..m.rows() {
        for j in (i + 1)..m.cols() {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, avg);
            m.set(j, i, avg);
        }
    }
    Ok((m, ridged))
}

fn recover_plane(base: &Matrix, other: &Matrix, dual: &[f64], sign: f64) -> Result<(Hyperplane, bool)> {
    let rhs = other.t_matvec(dual)?;
    let sol = solve_spd(base, &rhs)?;
    Ok((Hyperplane::from_stacked(&sol.x, sign), sol.ridged))
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{name} = {v} must be > 0")))
    }
}

fn require_nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("{name} = {v} must be >= 0")))
    }
}

/// Standard SVM with the bias absorbed into the kernel (K′ = K + 1), so the
/// dual has box constraints only.
pub fn train_svm(ds: &Dataset, c: f64, k: KernelSpec) -> Result<SvmClassifier> {
    require_positive("C", c)?;
    let n = ds.n();
    let km = gram(&ds.x, &ds.x, k)?;
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let yy = f64::from(ds.y[i]) * f64::from(ds.y[j]);
            m.set(i, j, yy * (km.get(i, j) + 1.0));
        }
    }
    let qp = BoxQp::zero_to_c(m, vec![1.0; n], c)?;
    let sol = solve_box_qp(&qp, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    Ok(SvmClassifier {
        alpha: sol.x,
        points: ds.x.clone(),
        labels: ds.y.clone(),
        kernel: k,
        c,
        converged: sol.converged,
    })
}

/// Decision values f(x) = Σ αᵢyᵢ(K(xᵢ,x)+1); sign gives the label, ties → +1.
pub fn predict_svm(model: &SvmClassifier, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    let km = gram(x, &model.points, model.kernel)?;
    let mut labels = Vec::with_capacity(x.rows());
    let mut scores = Vec::with_capacity(x.rows());
    for r in 0..x.rows() {
        let mut f = 0.0;
        for (i, (&a, &y)) in model.alpha.iter().zip(&model.labels).enumerate() {
            f += a * f64::from(y) * (km.get(r, i) + 1.0);
        }
        labels.push(if f >= 0.0 { 1 } else { -1 });
        scores.push(f);
    }
    Ok((labels, scores))
}

/// TWSVM: a box QP per plane with M = G(HᵀH+εI)⁻¹Gᵀ and its mirror.
pub fn train_twsvm(ds: &Dataset, c1: f64, c2: f64, k: KernelSpec) -> Result<TwinClassifier> {
    require_positive("c1", c1)?;
    require_positive("c2", c2)?;
    train_twin_qp(ds, c1, c2, RIDGE_FALLBACK, RIDGE_FALLBACK, None, k)
}

/// TBSVM: TWSVM with the structural-risk ridges c₂I and c₄I.
pub fn train_tbsvm(
    ds: &Dataset,
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    k: KernelSpec,
) -> Result<TwinClassifier> {
    require_positive("c1", c1)?;
    require_nonnegative("c2", c2)?;
    require_positive("c3", c3)?;
    require_nonnegative("c4", c4)?;
    let mut model = train_twin_qp(
        ds,
        c1,
        c3,
        ridge_or_fallback(c2),
        ridge_or_fallback(c4),
        None,
        k,
    )?;
    model.hyper = TwinHyper {
        c1,
        c2,
        c3: Some(c3),
        c4: Some(c4),
        ..TwinHyper::default()
    };
    Ok(model)
}

/// Pin-GTSVM: the pinball duals in the substituted variable s = α−β, bounded
/// below by −τ₂c₁ (resp. −τ₁c₂) with no upper bound.
pub fn train_pingtsvm(
    ds: &Dataset,
    c1: f64,
    c2: f64,
    tau1: f64,
    tau2: f64,
    k: KernelSpec,
) -> Result<TwinClassifier> {
    require_positive("c1", c1)?;
    require_positive("c2", c2)?;
    for (name, tau) in [("tau1", tau1), ("tau2", tau2)] {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::InvalidParam(format!("{name} = {tau} must be in [0,1]")));
        }
    }
    let mut model = train_twin_qp(
        ds,
        c1,
        c2,
        RIDGE_FALLBACK,
        RIDGE_FALLBACK,
        Some((tau1, tau2)),
        k,
    )?;
    model.hyper.tau1 = Some(tau1);
    model.hyper.tau2 = Some(tau2);
    Ok(model)
}

/// Shared QP pipeline for TWSVM, TBSVM, and Pin-GTSVM. `pin` carries
/// (τ₁, τ₂); when absent the boxes are the hinge [0, c].
fn train_twin_qp(
    ds: &Dataset,
    c1: f64,
    c2: f64,
    ridge1: f64,
    ridge2: f64,
    pin: Option<(f64, f64)>,
    k: KernelSpec,
) -> Result<TwinClassifier> {
    let tp = twin_problem(ds, k)?;
    let mut base1 = tp.h.gram_self();
    base1.add_ridge(ridge1);
    let mut base2 = tp.g.gram_self();
    base2.add_ridge(ridge2);

    let (m1, mr1) = dual_matrix(&base1, &tp.g)?;
    let (m2, mr2) = dual_matrix(&base2, &tp.h)?;
    let n1 = m1.rows();
    let n2 = m2.rows();
    let (qp1, qp2) = match pin {
        None => (
            BoxQp::zero_to_c(m1, vec![1.0; n1], c1)?,
            BoxQp::zero_to_c(m2, vec![1.0; n2], c2)?,
        ),
        Some((tau1, tau2)) => (
            BoxQp::new(m1, vec![1.0; n1], vec![-tau2 * c1; n1], vec![f64::INFINITY; n1])?,
            BoxQp::new(m2, vec![1.0; n2], vec![-tau1 * c2; n2], vec![f64::INFINITY; n2])?,
        ),
    };
    let s1 = solve_box_qp(&qp1, DEFAULT_TOL, DEFAULT_MAX_ITER)?;
    let s2 = solve_box_qp(&qp2, DEFAULT_TOL, DEFAULT_MAX_ITER)?;

    let (plane1, pr1) = recover_plane(&base1, &tp.g, &s1.x, -1.0)?;
    let (plane2, pr2) = recover_plane(&base2, &tp.h, &s2.x, 1.0)?;
    Ok(TwinClassifier {
        plane1,
        plane2,
        kernel: k,
        reference: tp.reference,
        hyper: TwinHyper {
            c1,
            c2,
            ..TwinHyper::default()
        },
        normalize: false,
        ridged: mr1 || mr2 || pr1 || pr2,
        converged: s1.converged && s2.converged,
        duals: (s1.x, s2.x),
    })
}

/// LSTSVM: the two closed-form systems solved with `solve_spd`.
pub fn train_lstsvm(ds: &Dataset, c1: f64, c2: f64, k: KernelSpec) -> Result<TwinClassifier> {
    require_positive("c1", c1)?;
    require_positive("c2", c2)?;
    let tp = twin_problem(ds, k)?;
    let h_gram = tp.h.gram_self();
    let g_gram = tp.g.gram_self();

    let mut a1 = g_gram.clone();
    a1.add_scaled(&h_gram, 1.0 / c1)?;
    a1.add_ridge(RIDGE_FALLBACK);
    let rhs1 = tp.g.t_matvec(&vec![1.0; tp.g.rows()])?;
    let sol1 = solve_spd(&a1, &rhs1)?;

    let mut a2 = h_gram;
    a2.add_scaled(&g_gram, 1.0 / c2)?;
    a2.add_ridge(RIDGE_FALLBACK);
    let rhs2 = tp.h.t_matvec(&vec![1.0; tp.h.rows()])?;
    let sol2 = solve_spd(&a2, &rhs2)?;

    Ok(TwinClassifier {
        plane1: Hyperplane::from_stacked(&sol1.x, -1.0),
        plane2: Hyperplane::from_stacked(&sol2.x, 1.0),
        kernel: k,
        reference: tp.reference,
        hyper: TwinHyper {
            c1,
            c2,
            ..TwinHyper::default()
        },
        normalize: false,
        ridged: sol1.ridged || sol2.ridged,
        converged: true,
        duals: (vec![], vec![]),
    })
}

fn broadcast_energy(e: &[f64], len: usize, name: &str) -> Result<Vec<f64>> {
    let out = if e.len() == 1 {
        vec![e[0]; len]
    } else if e.len() == len {
        e.to_vec()
    } else {
        return Err(Error::DimensionMismatch(format!(
            "{name}: {} entries, expected 1 or {len}",
            e.len()
        )));
    };
    if out.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
        return Err(Error::InvalidParam(format!("{name} entries must be in (0,1]")));
    }
    Ok(out)
}

/// RELSTSVM: energy-parameterized least-squares systems (Eqs. 16–17 form).
#[allow(clippy::too_many_arguments)]
pub fn train_relstsvm(
    ds: &Dataset,
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
    e1: &[f64],
    e2: &[f64],
    k: KernelSpec,
) -> Result<TwinClassifier> {
    require_positive("c1", c1)?;
    require_nonnegative("c2", c2)?;
    require_positive("c3", c3)?;
    require_nonnegative("c4", c4)?;
    let tp = twin_problem(ds, k)?;
    let e1 = broadcast_energy(e1, tp.g.rows(), "E1")?;
    let e2 = broadcast_energy(e2, tp.h.rows(), "E2")?;
    let p_gram = tp.h.gram_self();
    let q_gram = tp.g.gram_self();

    let mut a1 = q_gram.clone();
    a1.scale(c1);
    a1.add_scaled(&p_gram, 1.0)?;
    a1.add_ridge(ridge_or_fallback(c2));
    let mut rhs1 = tp.g.t_matvec(&e1)?;
    for v in rhs1.iter_mut() {
        *v *= c1;
    }
    let sol1 = solve_spd(&a1, &rhs1)?;

    let mut a2 = p_gram;
    a2.scale(c3);
    a2.add_scaled(&q_gram, 1.0)?;
    a2.add_ridge(ridge_or_fallback(c4));
    let mut rhs2 = tp.h.t_matvec(&e2)?;
    for v in rhs2.iter_mut() {
        *v *= c3;
    }
    let sol2 = solve_spd(&a2, &rhs2)?;

    Ok(TwinClassifier {
        plane1: Hyperplane::from_stacked(&sol1.x, -1.0),
        plane2: Hyperplane::from_stacked(&sol2.x, 1.0),
        kernel: k,
        reference: tp.reference,
        hyper: TwinHyper {
            c1,
            c2,
            c3: Some(c3),
            c4: Some(c4),
            e1: Some(e1),
            e2: Some(e2),
            ..TwinHyper::default()
        },
        normalize: false,
        ridged: sol1.ridged || sol2.ridged,
        converged: true,
        duals: (vec![], vec![]),
    })
}

/// Twin decision rule: the class whose plane lies closer (unnormalized by
/// default), ties to +1; score |f₂|−|f₁| so larger means more patient-like.
pub fn predict_twin(model: &TwinClassifier, x: &Matrix) -> Result<(Vec<i8>, Vec<f64>)> {
    let z = if model.reference.is_empty() {
        x.clone()
    } else {
        gram(x, &model.reference, model.kernel)?
    };
    if z.cols() != model.plane1.w.len() {
        return Err(Error::DimensionMismatch(format!(
            "predict_twin: {} features vs {} weights",
            z.cols(),
            model.plane1.w.len()
        )));
    }
    let (d1, d2) = if model.normalize {
        (
            norm2(&model.plane1.w).max(f64::MIN_POSITIVE),
            norm2(&model.plane2.w).max(f64::MIN_POSITIVE),
        )
    } else {
        (1.0, 1.0)
    };
    let mut labels = Vec::with_capacity(z.rows());
    let mut scores = Vec::with_capacity(z.rows());
    for r in 0..z.rows() {
        let f1 = (model.plane1.eval(z.row(r)) / d1).abs();
        let f2 = (model.plane2.eval(z.row(r)) / d2).abs();
        labels.push(if f1 <= f2 { 1 } else { -1 });
        scores.push(f2 - f1);
    }
    Ok((labels, scores))
}
