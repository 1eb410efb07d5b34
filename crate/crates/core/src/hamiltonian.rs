//! Normalized Hamiltonians built from the reduced density matrices and their
//! first-order Trotter split.
//!
//! `H1^ = (tr K1 / (c1 tr H1)) K1^ + (tr K2 / tr H1) K2^` with
//! `tr H1 = tr K1 / c1 + tr K2`, and symmetrically
//! `H2^ = (tr K1 / tr H2) K1^ + (tr K2 / (c2 tr H2)) K2^` with
//! `tr H2 = tr K1 + tr K2 / c2`. One Trotter step multiplies the exact
//! exponentials of the two weighted terms, `K1^` factor on the left.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classical::{check_penalties, Plane};
use crate::error::{Error, Result};
use crate::numerics::{eigh, operator_norm, CMatrix, EigenDecomposition, HermitianMatrix};
use crate::quantum::DensityMatrix;

/// Errors below this are treated as exact when fitting slopes.
pub const ERROR_FLOOR: f64 = 1e-11;

#[derive(Debug, Clone)]
struct WeightedTerm {
    weight: f64,
    eig: EigenDecomposition,
}

/// Hamiltonian `sum_j w_j T_j` that remembers its terms for Trotterization.
#[derive(Debug, Clone)]
pub struct SplitHamiltonian {
    terms: Vec<WeightedTerm>,
    total: HermitianMatrix,
    total_eig: EigenDecomposition,
}

impl SplitHamiltonian {
    pub fn new(terms: Vec<(f64, HermitianMatrix)>) -> Result<Self> {
        let dim = terms.first().map(|(_, h)| h.dim()).ok_or_else(|| Error::InvalidConfig("no Hamiltonian terms".into()))?;
        let mut total = HermitianMatrix::zeros(dim);
        for (weight, h) in &terms {
            total = total.combine(1.0, h, *weight)?;
        }
        let terms = terms.into_iter().map(|(weight, h)| WeightedTerm { weight, eig: eigh(&h) }).collect();
        let total_eig = eigh(&total);
        Ok(Self { terms, total, total_eig })
    }

    /// A single-term Hamiltonian; its Trotter step is exact.
    pub fn single(h: HermitianMatrix) -> Self {
        Self::new(vec![(1.0, h)]).expect("one term")
    }

    pub fn dim(&self) -> usize {
        self.total.dim()
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.total
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.total_eig
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// `e^{-i H t}`.
    pub fn exact_evolution(&self, t: f64) -> CMatrix {
        self.total_eig.exp_unitary(t)
    }

    /// `prod_j e^{-i w_j T_j dt}`.
    pub fn trotter_step(&self, dt: f64) -> CMatrix {
        let mut product = CMatrix::identity(self.dim(), self.dim());
        for term in &self.terms {
            product *= term.eig.exp_unitary(term.weight * dt);
        }
        product
    }

    pub fn simulate(&self, config: &TrotterConfig) -> CMatrix {
        matrix_power(&self.trotter_step(config.dt()), config.steps as u64)
    }
}

impl From<HermitianMatrix> for SplitHamiltonian {
    fn from(h: HermitianMatrix) -> Self {
        Self::single(h)
    }
}

pub fn matrix_power(u: &CMatrix, mut exponent: u64) -> CMatrix {
    let mut result = CMatrix::identity(u.nrows(), u.ncols());
    let mut base = u.clone();
    while exponent > 0 {
        if exponent & 1 == 1 {
            result = &result * &base;
        }
        exponent >>= 1;
        if exponent > 0 {
            base = &base * &base;
        }
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterConfig {
    pub total_time: f64,
    pub steps: usize,
}

impl TrotterConfig {
    pub fn new(total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::InvalidConfig(format!("total evolution time must be positive, got {total_time}")));
        }
        if steps == 0 {
            return Err(Error::InvalidConfig("Trotter steps must be at least 1".into()));
        }
        Ok(Self { total_time, steps })
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

/// Normalized Hamiltonians for both hyperplane systems.
#[derive(Debug, Clone)]
pub struct HamiltonianPair {
    pub first: SplitHamiltonian,
    pub second: SplitHamiltonian,
    pub tr_k1: f64,
    pub tr_k2: f64,
    pub tr_h1: f64,
    pub tr_h2: f64,
    pub c1: f64,
    pub c2: f64,
}

impl HamiltonianPair {
    pub fn get(&self, which: Plane) -> &SplitHamiltonian {
        match which {
            Plane::First => &self.first,
            Plane::Second => &self.second,
        }
    }

    /// Weights `(a, b)` of `K1^` and `K2^` in the chosen normalized Hamiltonian.
    pub fn weights(&self, which: Plane) -> (f64, f64) {
        match which {
            Plane::First => (self.tr_k1 / (self.c1 * self.tr_h1), self.tr_k2 / self.tr_h1),
            Plane::Second => (self.tr_k1 / self.tr_h2, self.tr_k2 / (self.c2 * self.tr_h2)),
        }
    }
}

pub fn assemble_hamiltonians(
    k1_hat: &DensityMatrix,
    k2_hat: &DensityMatrix,
    tr_k1: f64,
    tr_k2: f64,
    c1: f64,
    c2: f64,
) -> Result<HamiltonianPair> {
    check_penalties(c1, c2)?;
    if !(tr_k1 > 0.0 && tr_k2 > 0.0) {
        return Err(Error::InvalidConfig(format!("traces must be positive (tr K1 = {tr_k1}, tr K2 = {tr_k2})")));
    }
    if k1_hat.dim() != k2_hat.dim() {
        return Err(Error::DimensionMismatch { expected: k1_hat.dim(), found: k2_hat.dim() });
    }
    let tr_h1 = tr_k1 / c1 + tr_k2;
    let tr_h2 = tr_k1 + tr_k2 / c2;
    let k1 = k1_hat.to_hermitian();
    let k2 = k2_hat.to_hermitian();
    let first = SplitHamiltonian::new(vec![(tr_k1 / (c1 * tr_h1), k1.clone()), (tr_k2 / tr_h1, k2.clone())])?;
    let second = SplitHamiltonian::new(vec![(tr_k1 / tr_h2, k1), (tr_k2 / (c2 * tr_h2), k2)])?;
    Ok(HamiltonianPair { first, second, tr_k1, tr_k2, tr_h1, tr_h2, c1, c2 })
}

pub fn trotter_step(pair: &HamiltonianPair, which: Plane, dt: f64) -> CMatrix {
    pair.get(which).trotter_step(dt)
}

pub fn simulate_evolution(pair: &HamiltonianPair, which: Plane, config: &TrotterConfig) -> CMatrix {
    pair.get(which).simulate(config)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterErrorRow {
    pub steps: usize,
    pub dt: f64,
    /// `|| step(dt) - e^{-i H dt} ||`
    pub single_step_error: f64,
    /// `|| step(dt)^T - e^{-i H t0} ||`
    pub total_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterErrorReport {
    pub total_time: f64,
    pub rows: Vec<TrotterErrorRow>,
    /// Least-squares slope of `log(single_step_error)` against `log(dt)`;
    /// `None` when fewer than two errors exceed [`ERROR_FLOOR`] (commuting terms).
    pub single_step_slope: Option<f64>,
}

impl TrotterErrorReport {
    /// `total_error(T) / total_error(2T)` for consecutive rows where the step
    /// count doubles.
    pub fn doubling_ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .filter(|w| w[1].steps == 2 * w[0].steps && w[1].total_error > ERROR_FLOOR)
            .map(|w| w[0].total_error / w[1].total_error)
            .collect()
    }
}

/// Trotter error sweep over `steps_list` at fixed total time.
pub fn trotter_error_report(h: &SplitHamiltonian, total_time: f64, steps_list: &[usize]) -> Result<TrotterErrorReport> {
    if steps_list.is_empty() {
        return Err(Error::InvalidConfig("empty Trotter step list".into()));
    }
    let exact_total = h.exact_evolution(total_time);
    let mut rows = Vec::with_capacity(steps_list.len());
    for &steps in steps_list {
        let config = TrotterConfig::new(total_time, steps)?;
        let dt = config.dt();
        let step = h.trotter_step(dt);
        let single_step_error = operator_norm(&(&step - h.exact_evolution(dt)));
        let total_error = operator_norm(&(matrix_power(&step, steps as u64) - &exact_total));
        rows.push(TrotterErrorRow { steps, dt, single_step_error, total_error });
    }
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.single_step_error > ERROR_FLOOR)
        .map(|r| (r.dt.ln(), r.single_step_error.ln()))
        .collect();
    Ok(TrotterErrorReport { total_time, single_step_slope: fit_slope(&points), rows })
}

/// Ordinary least-squares slope; `None` for fewer than two distinct abscissae.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Trace of a real Gram matrix, `||M||_F^2`.
pub fn gram_trace(m: &DMatrix<f64>) -> f64 {
    m.norm_squared()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::random_cmatrix;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
        let g = random_cmatrix(dim, dim, rng);
        let w = &g * g.adjoint();
        let tr: Complex64 = w.diagonal().iter().sum();
        DensityMatrix::new(w.unscale(tr.re)).unwrap()
    }

    fn diagonal_density(diag: &[f64]) -> DensityMatrix {
        let sum: f64 = diag.iter().sum();
        let v: Vec<f64> = diag.iter().map(|d| d / sum).collect();
        DensityMatrix::new(HermitianMatrix::from_diagonal(&v).into_matrix()).unwrap()
    }

    #[test]
    fn equal_operators_give_the_same_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let rho = random_density(4, &mut rng);
        let pair = assemble_hamiltonians(&rho, &rho, 3.0, 5.0, 1.0, 2.0).unwrap();
        assert!((pair.first.matrix().as_matrix() - rho.entries()).norm() < 1e-12);
        assert!((pair.second.matrix().as_matrix() - rho.entries()).norm() < 1e-12);
    }

    #[test]
    fn huge_penalty_leaves_only_k2() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let k1 = random_density(4, &mut rng);
        let k2 = random_density(4, &mut rng);
        let pair = assemble_hamiltonians(&k1, &k2, 2.0, 3.0, 1e9, 1.0).unwrap();
        assert!((pair.first.matrix().as_matrix() - k2.entries()).norm() < 1e-8);
    }

    #[test]
    fn normalized_hamiltonians_have_unit_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..20 {
            let k1 = random_density(8, &mut rng);
            let k2 = random_density(8, &mut rng);
            let (t1, t2) = (rng.random_range(0.1..50.0), rng.random_range(0.1..50.0));
            let (c1, c2) = (rng.random_range(0.01..10.0), rng.random_range(0.01..10.0));
            let pair = assemble_hamiltonians(&k1, &k2, t1, t2, c1, c2).unwrap();
            assert!((pair.first.matrix().trace() - 1.0).abs() < 1e-12);
            assert!((pair.second.matrix().trace() - 1.0).abs() < 1e-12);
            assert!(pair.first.eigen().min_eigenvalue() > -1e-12);
            let (a, b) = pair.weights(Plane::First);
            assert!((a + b - 1.0).abs() < 1e-12);
        }
        let k = random_density(2, &mut rng);
        assert!(matches!(assemble_hamiltonians(&k, &k, 1.0, 1.0, 0.0, 1.0), Err(Error::InvalidPenalty { .. })));
    }

    #[test]
    fn commuting_terms_have_no_trotter_error() {
        let k1 = diagonal_density(&[1.0, 2.0, 3.0, 4.0]);
        let k2 = diagonal_density(&[4.0, 1.0, 1.0, 2.0]);
        let pair = assemble_hamiltonians(&k1, &k2, 1.0, 2.0, 0.5, 1.0).unwrap();
        for which in [Plane::First, Plane::Second] {
            let h = pair.get(which);
            let step = trotter_step(&pair, which, 0.3);
            assert!(operator_norm(&(step - h.exact_evolution(0.3))) < 1e-12);
            for steps in [1, 3, 10] {
                let cfg = TrotterConfig::new(2.0, steps).unwrap();
                assert!(operator_norm(&(simulate_evolution(&pair, which, &cfg) - h.exact_evolution(2.0))) < 1e-11);
            }
            let report = trotter_error_report(h, 1.0, &[1, 2, 4]).unwrap();
            assert!(report.rows.iter().all(|r| r.total_error < 1e-11));
            assert_eq!(report.single_step_slope, None);
        }
    }

    #[test]
    fn zero_step_is_identity_and_one_step_matches_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let pair = assemble_hamiltonians(&random_density(4, &mut rng), &random_density(4, &mut rng), 1.0, 1.0, 1.0, 1.0).unwrap();
        assert!((trotter_step(&pair, Plane::First, 0.0) - CMatrix::identity(4, 4)).norm() < 1e-14);
        let cfg = TrotterConfig::new(0.7, 1).unwrap();
        assert!((simulate_evolution(&pair, Plane::Second, &cfg) - trotter_step(&pair, Plane::Second, 0.7)).norm() < 1e-14);
        assert!(TrotterConfig::new(1.0, 0).is_err());
        assert!(TrotterConfig::new(-1.0, 2).is_err());
    }

    #[test]
    fn single_step_error_within_commutator_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(65);
        for _ in 0..20 {
            let k1 = random_density(4, &mut rng);
            let k2 = random_density(4, &mut rng);
            let pair = assemble_hamiltonians(&k1, &k2, 2.0, 1.0, 0.8, 1.5).unwrap();
            let (a, b) = pair.weights(Plane::First);
            let x = k1.entries().scale(a);
            let y = k2.entries().scale(b);
            let commutator = operator_norm(&(&x * &y - &y * &x));
            let dt = 0.1;
            let err = operator_norm(&(trotter_step(&pair, Plane::First, dt) - pair.first.exact_evolution(dt)));
            assert!(err <= 0.5 * commutator * dt * dt * (1.0 + 1e-6), "{err} vs {commutator}");
            assert!(crate::numerics::unitarity_deviation(&trotter_step(&pair, Plane::First, dt)) < 1e-10);
        }
    }

    #[test]
    fn error_scaling_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(66);
        for _ in 0..5 {
            let pair = assemble_hamiltonians(&random_density(4, &mut rng), &random_density(4, &mut rng), 1.0, 1.0, 1.0, 1.0).unwrap();
            let report = trotter_error_report(&pair.first, 1.0, &[10, 20, 40, 80, 160, 320, 640, 1000]).unwrap();
            let slope = report.single_step_slope.unwrap();
            assert!((1.8..=2.2).contains(&slope), "slope {slope}");
            for ratio in report.doubling_ratios() {
                assert!((1.7..=2.3).contains(&ratio), "ratio {ratio}");
            }
            let one = trotter_error_report(&pair.first, 1.0, &[1]).unwrap().rows[0].total_error;
            assert!(report.rows.iter().all(|r| r.total_error <= one));
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 3.0 * i as f64 + 1.0)).collect();
        assert!((fit_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(fit_slope(&pts[..1]), None);
    }
}
