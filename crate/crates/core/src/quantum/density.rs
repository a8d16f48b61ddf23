//! Density matrices and two-state discrimination.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<String>,
    matrix: CMatrix,
}

/// Eigen-decomposition of a Hermitian matrix; eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.iter().map(|v| v.abs()).sum()
}

fn max_hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(labels: Vec<String>, matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if matrix.ncols() != d {
            return Err(Error::InvalidDensity(format!("not square: {d}x{}", matrix.ncols())));
        }
        if d != 1 << labels.len() {
            return Err(Error::BadLength {
                len: d,
                qubits: labels.len(),
            });
        }
        let herm = max_hermitian_defect(&matrix);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidDensity(format!("not Hermitian ({herm:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min_ev = hermitian_eigen(&matrix).0[0];
        if min_ev < -PSD_TOL {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(DensityMatrix { labels, matrix })
    }

    pub(crate) fn from_parts_unchecked(labels: Vec<String>, matrix: CMatrix) -> Self {
        DensityMatrix { labels, matrix }
    }

    /// `Σ_k w_k |ψ_k⟩⟨ψ_k|` over states on identical registers.
    pub fn mixture(weighted: &[(f64, &super::StateVector)]) -> Result<Self> {
        let (_, first) = weighted
            .first()
            .ok_or_else(|| Error::InvalidParams("empty mixture".into()))?;
        let order: Vec<&str> = first.labels().iter().map(String::as_str).collect();
        let d = first.dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weighted {
            let s = s.permuted(&order)?;
            m += s.to_density().matrix * Complex64::new(*w, 0.0);
        }
        Self::new(first.labels().to_vec(), m)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.matrix).0
    }

    /// `tr(ρ |ψ⟩⟨ψ|)`.
    pub fn expectation(&self, psi: &super::StateVector) -> Result<f64> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch(psi.dim(), self.dim()));
        }
        let order: Vec<&str> = self.labels.iter().map(String::as_str).collect();
        let psi = psi.permuted(&order)?;
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    /// Reduced state on `keep`.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let q = self.labels.len();
        let bit_of = |l: &str| -> Result<usize> {
            self.labels
                .iter()
                .position(|x| x == l)
                .map(|p| q - 1 - p)
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        };
        let kbits: Vec<usize> = keep.iter().map(|l| bit_of(l)).collect::<Result<_>>()?;
        let rbits: Vec<usize> = self
            .labels
            .iter()
            .filter(|l| !keep.contains(&l.as_str()))
            .map(|l| bit_of(l))
            .collect::<Result<_>>()?;
        let spread = |sub: usize, bits: &[usize]| -> usize {
            let m = bits.len();
            (0..m)
                .filter(|j| (sub >> (m - 1 - j)) & 1 == 1)
                .fold(0, |acc, j| acc | (1 << bits[j]))
        };
        let dk = 1usize << kbits.len();
        let mut out = CMatrix::zeros(dk, dk);
        for r in 0..1usize << rbits.len() {
            let base = spread(r, &rbits);
            for i in 0..dk {
                for j in 0..dk {
                    out[(i, j)] += self.matrix[(base | spread(i, &kbits), base | spread(j, &kbits))];
                }
            }
        }
        DensityMatrix::new(keep.iter().map(|s| s.to_string()).collect(), out)
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if let Some(l) = self.labels.iter().find(|l| other.labels.contains(l)) {
            return Err(Error::OverlappingLabels(vec![l.clone()]));
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Ok(DensityMatrix {
            labels,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }
}

/// `½‖a − b‖₁`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok((0.5 * trace_norm_hermitian(&(&a.matrix - &b.matrix))).clamp(0.0, 1.0))
}

/// Optimal two-outcome measurement for discriminating `rho0` from `rho1`.
#[derive(Debug, Clone)]
pub struct HelstromMeasurement {
    /// Optimal probability of guessing correctly.
    pub success: f64,
    /// Projector onto the positive part of `prior0·ρ0 − prior1·ρ1`; outcome 0.
    pub guess_zero: CMatrix,
    /// Eigenvalues of `prior0·ρ0 − prior1·ρ1`, ascending.
    pub spectrum: Vec<f64>,
}

pub fn helstrom_measurement(rho0: &DensityMatrix, rho1: &DensityMatrix, prior0: f64) -> Result<HelstromMeasurement> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), rho1.dim()));
    }
    if !(0.0..=1.0).contains(&prior0) {
        return Err(Error::InvalidParams(format!("prior {prior0} outside [0, 1]")));
    }
    let gamma = &rho0.matrix * Complex64::new(prior0, 0.0) - &rho1.matrix * Complex64::new(1.0 - prior0, 0.0);
    let (values, vectors) = hermitian_eigen(&gamma);
    let norm: f64 = values.iter().map(|v| v.abs()).sum();
    let d = rho0.dim();
    let mut guess_zero = CMatrix::zeros(d, d);
    for (k, v) in values.iter().enumerate() {
        if *v > 0.0 {
            let col = vectors.column(k);
            guess_zero += col * col.adjoint();
        }
    }
    let lo = prior0.max(1.0 - prior0);
    Ok(HelstromMeasurement {
        success: (0.5 * (1.0 + norm)).clamp(lo, 1.0),
        guess_zero,
        spectrum: values,
    })
}

/// `½(1 + ‖prior0·ρ0 − (1−prior0)·ρ1‖₁)`.
pub fn helstrom_guess_prob(rho0: &DensityMatrix, rho1: &DensityMatrix, prior0: f64) -> Result<f64> {
    Ok(helstrom_measurement(rho0, rho1, prior0)?.success)
}
