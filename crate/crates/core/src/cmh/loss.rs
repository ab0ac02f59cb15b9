//! The three-term hashing objective and its gradient with respect to the
//! two branches' outputs.
//!
//! Output matrices hold one row per sample and one column per code bit.
//! Over a batch of B samples the objective is
//!
//! ```text
//! J = sum_{i,j} l(p(F_i, G_j), S_ij)
//!   + alpha (|F - Cx|^2 + |G - Cy|^2)
//!   + beta  (|colsum F|^2 + |colsum G|^2)
//! ```
//!
//! with `p(f, g) = (1 + e^-m) / (1 + e^(D(f, g) - m))` and
//! `l(p, s) = -s ln p - (1 - s) ln(1 - p)`.

use super::data::SimilarityMatrix;
use super::matrix::{axpy, Matrix};

/// Lower clamp applied to `p` and `1 - p` before taking logs.
pub const PROB_CLAMP: f64 = 1e-12;

/// Distance fed to the logistic match probability.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    SquaredEuclidean,
    Euclidean,
}

impl Distance {
    pub fn between(self, f: &[f64], g: &[f64]) -> f64 {
        let sq: f64 = f.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum();
        match self {
            Distance::SquaredEuclidean => sq,
            Distance::Euclidean => sq.sqrt(),
        }
    }
}

/// Objective weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ObjectiveParams {
    pub margin: f64,
    pub alpha: f64,
    pub beta: f64,
    pub distance: Distance,
}

/// Match probability for a given distance, clamped to `[PROB_CLAMP, 1]`.
pub fn probability_from_distance(dist: f64, margin: f64) -> f64 {
    let p = (1.0 + (-margin).exp()) / (1.0 + (dist - margin).exp());
    p.clamp(PROB_CLAMP, 1.0)
}

/// Match probability of two feature vectors under squared Euclidean
/// distance. Equals 1 exactly at distance 0.
pub fn match_probability(f: &[f64], g: &[f64], margin: f64) -> f64 {
    probability_from_distance(Distance::SquaredEuclidean.between(f, g), margin)
}

/// Cross-entropy of a match probability against a 0/1 similarity label.
pub fn dbl_loss(p: f64, s: bool) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0);
    if s {
        -p.ln()
    } else {
        -(1.0 - p).max(PROB_CLAMP).ln()
    }
}

/// `d l(p(D), s) / d D`; zero wherever a clamp is active.
fn dbl_loss_slope(dist: f64, margin: f64, s: bool) -> f64 {
    let raw = (1.0 + (-margin).exp()) / (1.0 + (dist - margin).exp());
    let sigmoid = 1.0 / (1.0 + (margin - dist).exp());
    if s {
        if raw < PROB_CLAMP {
            0.0
        } else {
            sigmoid
        }
    } else {
        let p = raw.min(1.0);
        if 1.0 - p < PROB_CLAMP {
            0.0
        } else {
            -p * sigmoid / (1.0 - p)
        }
    }
}

/// `|F - C|^2` (Frobenius).
pub fn quantization_loss(f: &Matrix, c: &Matrix) -> f64 {
    assert_eq!((f.rows(), f.cols()), (c.rows(), c.cols()), "shape mismatch");
    f.as_slice().iter().zip(c.as_slice()).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Squared norm of the per-bit sums over samples.
pub fn balance_loss(f: &Matrix) -> f64 {
    f.column_sums().iter().map(|s| s * s).sum()
}

/// Entry-wise sign with `sign(0) = +1`, as `±1.0`.
pub fn sign_matrix(f: &Matrix) -> Matrix {
    f.map(|v| if v >= 0.0 { 1.0 } else { -1.0 })
}

fn pair_term(f: &Matrix, g: &Matrix, sim: &SimilarityMatrix, params: &ObjectiveParams) -> f64 {
    let mut total = 0.0;
    for i in 0..f.rows() {
        for j in 0..g.rows() {
            let dist = params.distance.between(f.row(i), g.row(j));
            total += dbl_loss(probability_from_distance(dist, params.margin), sim.get(i, j));
        }
    }
    total
}

/// Objective over one batch. `sim` is the batch's B x B similarity.
pub fn total_objective(
    f: &Matrix,
    g: &Matrix,
    cx: &Matrix,
    cy: &Matrix,
    sim: &SimilarityMatrix,
    params: &ObjectiveParams,
) -> f64 {
    assert_eq!(f.rows(), sim.len(), "similarity size");
    assert_eq!(g.rows(), sim.len(), "similarity size");
    pair_term(f, g, sim, params)
        + params.alpha * (quantization_loss(f, cx) + quantization_loss(g, cy))
        + params.beta * (balance_loss(f) + balance_loss(g))
}

/// Objective value with its gradients w.r.t. `F` and `G`, holding the code
/// matrices constant.
pub struct ObjectiveGrad {
    pub value: f64,
    pub grad_f: Matrix,
    pub grad_g: Matrix,
}

pub fn objective_with_grad(
    f: &Matrix,
    g: &Matrix,
    cx: &Matrix,
    cy: &Matrix,
    sim: &SimilarityMatrix,
    params: &ObjectiveParams,
) -> ObjectiveGrad {
    let (n, d) = (f.rows(), f.cols());
    assert_eq!((g.rows(), g.cols()), (n, d), "branch output shapes differ");
    assert_eq!(sim.len(), n, "similarity size");

    let mut grad_f = Matrix::zeros(n, d);
    let mut grad_g = Matrix::zeros(n, d);
    let mut value = 0.0;
    let mut diff = vec![0.0; d];

    for i in 0..n {
        let fi = f.row(i);
        for j in 0..n {
            let gj = g.row(j);
            for ((df, a), b) in diff.iter_mut().zip(fi).zip(gj) {
                *df = a - b;
            }
            let sq: f64 = diff.iter().map(|v| v * v).sum();
            let dist = match params.distance {
                Distance::SquaredEuclidean => sq,
                Distance::Euclidean => sq.sqrt(),
            };
            let s = sim.get(i, j);
            value += dbl_loss(probability_from_distance(dist, params.margin), s);

            let slope = dbl_loss_slope(dist, params.margin, s);
            let scale = match params.distance {
                Distance::SquaredEuclidean => 2.0 * slope,
                Distance::Euclidean if dist > 0.0 => slope / dist,
                Distance::Euclidean => 0.0,
            };
            if scale != 0.0 {
                axpy(scale, &diff, grad_f.row_mut(i));
                axpy(-scale, &diff, grad_g.row_mut(j));
            }
        }
    }

    for (out, (x, c)) in [(&mut grad_f, (f, cx)), (&mut grad_g, (g, cy))] {
        let sums = x.column_sums();
        value += params.alpha * quantization_loss(x, c) + params.beta * sums.iter().map(|s| s * s).sum::<f64>();
        for r in 0..n {
            let row = out.row_mut(r);
            for (k, gr) in row.iter_mut().enumerate() {
                *gr += 2.0 * params.alpha * (x.get(r, k) - c.get(r, k)) + 2.0 * params.beta * sums[k];
            }
        }
    }

    ObjectiveGrad { value, grad_f, grad_g }
}
