//! Exact least-squares twin SVM.
//!
//! With `E = [A e1]` and `F = [B e2]` the two hyperplanes have the closed form
//!
//! ```text
//! (w1, b1) = -(K1/c1 + K2)^{-1} F^T e2        K1 = E^T E
//! (w2, b2) =  (K1 + K2/c2)^{-1} E^T e1        K2 = F^T F
//! ```
//!
//! Both systems are solved through [`solve_symmetric`] with an optional ridge.
//! The quantum pipeline only ever sees normalized versions of these vectors.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{solve_symmetric, RealMatrix};
use crate::quantum::{normalize_real, StateVector};

/// Hyperplanes with a normal shorter than this cannot measure distances.
pub const DEGENERATE_NORMAL: f64 = 1e-12;

/// Training data split by class: rows of `positive` are the `+1` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    positive: RealMatrix,
    negative: RealMatrix,
}

impl Dataset {
    pub fn new(positive: RealMatrix, negative: RealMatrix) -> Result<Self> {
        if positive.ncols() != negative.ncols() {
            return Err(Error::DimensionMismatch { expected: positive.ncols(), found: negative.ncols() });
        }
        Ok(Self { positive, negative })
    }

    pub fn from_rows(positive: &[Vec<f64>], negative: &[Vec<f64>]) -> Result<Self> {
        Self::new(RealMatrix::from_rows(positive)?, RealMatrix::from_rows(negative)?)
    }

    pub fn positive(&self) -> &RealMatrix {
        &self.positive
    }

    pub fn negative(&self) -> &RealMatrix {
        &self.negative
    }

    /// Feature dimension.
    pub fn n(&self) -> usize {
        self.positive.ncols()
    }

    pub fn m1(&self) -> usize {
        self.positive.nrows()
    }

    pub fn m2(&self) -> usize {
        self.negative.nrows()
    }

    pub fn len(&self) -> usize {
        self.m1() + self.m2()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All samples with their labels, positives first.
    pub fn labeled_rows(&self) -> Vec<(Label, Vec<f64>)> {
        let pos = self.positive.rows().into_iter().map(|r| (Label::Positive, r));
        let neg = self.negative.rows().into_iter().map(|r| (Label::Negative, r));
        pos.chain(neg).collect()
    }

    /// Applies `f` to every sample.
    pub fn map_rows(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Result<Self> {
        let pos: Vec<Vec<f64>> = self.positive.rows().iter().map(|r| f(r)).collect();
        let neg: Vec<Vec<f64>> = self.negative.rows().iter().map(|r| f(r)).collect();
        Self::from_rows(&pos, &neg)
    }
}

/// `[M e]`: the matrix with a column of ones appended.
pub fn append_ones(m: &RealMatrix) -> DMatrix<f64> {
    let src = m.as_dmatrix();
    DMatrix::from_fn(src.nrows(), src.ncols() + 1, |i, j| if j < src.ncols() { src[(i, j)] } else { 1.0 })
}

#[derive(Debug, Clone)]
pub struct AugmentedMatrices {
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
    pub k1: DMatrix<f64>,
    pub k2: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
    pub c1: f64,
    pub c2: f64,
}

impl AugmentedMatrices {
    /// `E^T e1`, the column sums of `E`.
    pub fn e_sum(&self) -> DVector<f64> {
        column_sums(&self.e)
    }

    /// `F^T e2`, the column sums of `F`.
    pub fn f_sum(&self) -> DVector<f64> {
        column_sums(&self.f)
    }
}

fn column_sums(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(m.ncols(), m.column_iter().map(|c| c.sum()))
}

pub(crate) fn check_penalties(c1: f64, c2: f64) -> Result<()> {
    if c1 > 0.0 && c2 > 0.0 && c1.is_finite() && c2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPenalty { c1, c2 })
    }
}

pub fn build_augmented(data: &Dataset, c1: f64, c2: f64) -> Result<AugmentedMatrices> {
    check_penalties(c1, c2)?;
    let e = append_ones(&data.positive);
    let f = append_ones(&data.negative);
    let k1 = e.transpose() * &e;
    let k2 = f.transpose() * &f;
    let h1 = k1.scale(1.0 / c1) + &k2;
    let h2 = &k1 + k2.scale(1.0 / c2);
    Ok(AugmentedMatrices { e, f, k1, k2, h1, h2, c1, c2 })
}

/// Hyperplane `w . x + b = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
}

impl Hyperplane {
    pub fn from_augmented(v: &[f64]) -> Self {
        let (w, b) = v.split_at(v.len() - 1);
        Self { w: w.to_vec(), b: b[0] }
    }

    /// `(w, b)` as one vector.
    pub fn augmented(&self) -> Vec<f64> {
        let mut v = self.w.clone();
        v.push(self.b);
        v
    }

    pub fn normal_norm(&self) -> f64 {
        self.w.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.w.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + self.b
    }

    /// Euclidean distance `|w . x + b| / ||w||`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let norm = self.normal_norm();
        if norm <= DEGENERATE_NORMAL {
            return Err(Error::DegenerateHyperplane { norm });
        }
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), found: x.len() });
        }
        Ok(self.evaluate(x).abs() / norm)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { w: self.w.iter().map(|v| v * factor).collect(), b: self.b * factor }
    }

    /// `|w, b>`: the augmented vector normalized and zero-padded.
    pub fn state(&self) -> Result<StateVector> {
        normalize_real(&self.augmented())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plane {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn as_i8(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    /// `+1` when the sample is at least as close to the first hyperplane.
    pub fn from_distances(first: f64, second: f64) -> Self {
        if first <= second {
            Label::Positive
        } else {
            Label::Negative
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalModel {
    pub plane1: Hyperplane,
    pub plane2: Hyperplane,
    pub c1: f64,
    pub c2: f64,
    pub ridge: f64,
}

impl ClassicalModel {
    pub fn plane(&self, which: Plane) -> &Hyperplane {
        match which {
            Plane::First => &self.plane1,
            Plane::Second => &self.plane2,
        }
    }
}

pub fn train_classical(data: &Dataset, c1: f64, c2: f64, ridge: f64) -> Result<ClassicalModel> {
    let aug = build_augmented(data, c1, c2)?;
    let v1 = -solve_symmetric(&aug.h1, &aug.f_sum(), ridge)?;
    let v2 = solve_symmetric(&aug.h2, &aug.e_sum(), ridge)?;
    Ok(ClassicalModel {
        plane1: Hyperplane::from_augmented(v1.as_slice()),
        plane2: Hyperplane::from_augmented(v2.as_slice()),
        c1,
        c2,
        ridge,
    })
}

/// Least-squares objective with the slack variables eliminated.
///
/// For the first plane: `1/2 ||A w + b e1||^2 + c/2 ||B w + b e2 + e2||^2`.
/// For the second: `1/2 ||B w + b e2||^2 + c/2 ||A w + b e1 - e1||^2`.
pub fn objective_value(plane: &Hyperplane, data: &Dataset, c: f64, which: Plane) -> f64 {
    let (own, other, target) = match which {
        Plane::First => (&data.positive, &data.negative, -1.0),
        Plane::Second => (&data.negative, &data.positive, 1.0),
    };
    let fit: f64 = own.rows().iter().map(|r| plane.evaluate(r).powi(2)).sum();
    let slack: f64 = other.rows().iter().map(|r| (plane.evaluate(r) - target).powi(2)).sum();
    0.5 * fit + 0.5 * c * slack
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalPrediction {
    pub label: Label,
    pub d1: f64,
    pub d2: f64,
}

pub fn predict_classical(model: &ClassicalModel, x: &[f64]) -> Result<ClassicalPrediction> {
    let d1 = model.plane1.distance(x)?;
    let d2 = model.plane2.distance(x)?;
    Ok(ClassicalPrediction { label: Label::from_distances(d1, d2), d1, d2 })
}
