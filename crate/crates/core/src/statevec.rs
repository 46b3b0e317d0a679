//! Dense pure-state engine.
//!
//! A [`PureState`] is a complex amplitude vector over an ordered register of
//! labelled subsystems. Amplitude indices are big-endian in register order, so
//! for three qubits labelled `1, 2, 3` the ket `|001⟩` (particle 3 excited)
//! sits at index 1.
//!
//! Operators acting on a subset of the register use the opposite, "first
//! listed varies fastest" local ordering. For a pair `(p, a)` this is
//! `index = level(p) + 2 * level(a)`, i.e. the basis
//! `{|0⟩p|0⟩a, |1⟩p|0⟩a, |0⟩p|1⟩a, |1⟩p|1⟩a}`.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on the L2 norm of a state treated as normalized.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance on `max |UU† − I|` for a matrix accepted as unitary.
pub const UNITARY_TOL: f64 = 1e-12;
/// Branches lighter than this carry no post-measurement state.
pub const NULL_BRANCH_TOL: f64 = 1e-14;
/// Hermiticity tolerance for density matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below this are treated as rounding noise in the concurrence.
pub const EIGEN_WEIGHT_FLOOR: f64 = 1e-14;
/// Most negative eigenvalue tolerated in a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// A pure state over an ordered register of labelled subsystems.
///
/// The state is not required to be normalized. Unnormalized vectors show up
/// as intermediate branch components; measurement and fidelity refuse them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    amplitudes: Vec<C64>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl PureState {
    /// Builds a state from raw amplitudes.
    pub fn from_amplitudes<S: AsRef<str>>(
        labels: &[S],
        dims: &[usize],
        amplitudes: Vec<C64>,
    ) -> Result<Self> {
        if labels.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} labels for {} subsystems",
                labels.len(),
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::Dimension("subsystem of dimension 0".into()));
        }
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(Error::Dimension(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                total
            )));
        }
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Label(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self {
            amplitudes,
            dims: dims.to_vec(),
            labels,
        })
    }

    /// Basis state `|occupation⟩` with explicit labels.
    pub fn basis<S: AsRef<str>>(labels: &[S], dims: &[usize], occupation: &[usize]) -> Result<Self> {
        if occupation.len() != dims.len() {
            return Err(Error::Dimension(format!(
                "{} occupations for {} subsystems",
                occupation.len(),
                dims.len()
            )));
        }
        for (i, (&o, &d)) in occupation.iter().zip(dims).enumerate() {
            if o >= d {
                return Err(Error::Dimension(format!(
                    "level {o} out of range for subsystem {i} of dimension {d}"
                )));
            }
        }
        let total: usize = dims.iter().product();
        let mut amplitudes = vec![ZERO; total];
        amplitudes[big_endian_index(dims, occupation)] = ONE;
        Self::from_amplitudes(labels, dims, amplitudes)
    }

    /// A single qubit with the given label, in `|level⟩`.
    pub fn qubit(label: &str, level: usize) -> Result<Self> {
        Self::basis(&[label], &[2], &[level])
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    /// Register position of `label`.
    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Label(format!("unknown subsystem {label:?}")))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Amplitude of the basis ket with the given per-subsystem levels.
    pub fn amplitude(&self, levels: &[usize]) -> Result<C64> {
        if levels.len() != self.dims.len() || levels.iter().zip(&self.dims).any(|(l, d)| l >= d) {
            return Err(Error::Dimension(format!(
                "levels {levels:?} do not address dims {:?}",
                self.dims
            )));
        }
        Ok(self.amplitudes[big_endian_index(&self.dims, levels)])
    }

    /// Per-subsystem levels of amplitude index `index`.
    pub fn levels_of(&self, index: usize) -> Vec<usize> {
        levels_of(&self.dims, index)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= NORM_TOL
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Input("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            amplitudes: self.amplitudes.iter().map(|z| z * factor).collect(),
            dims: self.dims.clone(),
            labels: self.labels.clone(),
        }
    }

    /// Same amplitudes under new labels.
    pub fn relabeled<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Self::from_amplitudes(labels, &self.dims, self.amplitudes.clone())
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::Dimension(format!(
                "dims {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum())
    }

    /// Kronecker product, `self` subsystems first.
    pub fn tensor(&self, rhs: &PureState) -> Result<Self> {
        if let Some(l) = rhs.labels.iter().find(|l| self.labels.contains(l)) {
            return Err(Error::Label(format!("label {l:?} present on both sides")));
        }
        let mut amplitudes = Vec::with_capacity(self.dimension() * rhs.dimension());
        for x in &self.amplitudes {
            amplitudes.extend(rhs.amplitudes.iter().map(|y| x * y));
        }
        let mut labels = self.labels.clone();
        labels.extend(rhs.labels.iter().cloned());
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&rhs.dims);
        Self::from_amplitudes(&labels, &dims, amplitudes)
    }

    /// Applies a dense operator to the listed subsystems.
    ///
    /// `matrix` is row-major with side `∏ dim(targets)`; its local index puts
    /// the first listed subsystem in the fastest-varying position. The
    /// operator need not be unitary.
    pub fn apply_operator<S: AsRef<str>>(&self, targets: &[S], matrix: &[C64]) -> Result<Self> {
        let positions = targets
            .iter()
            .map(|t| self.position(t.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].contains(p) {
                return Err(Error::Label(format!(
                    "subsystem {:?} listed twice",
                    self.labels[*p]
                )));
            }
        }
        let local_dims: Vec<usize> = positions.iter().map(|&p| self.dims[p]).collect();
        let side: usize = local_dims.iter().product();
        if matrix.len() != side * side {
            return Err(Error::Dimension(format!(
                "operator has {} entries, expected {}x{}",
                matrix.len(),
                side,
                side
            )));
        }
        let strides = strides(&self.dims);
        // offsets[l] = global displacement of local index l
        let offsets: Vec<usize> = (0..side)
            .map(|mut l| {
                let mut off = 0;
                for (k, &p) in positions.iter().enumerate() {
                    off += (l % local_dims[k]) * strides[p];
                    l /= local_dims[k];
                }
                off
            })
            .collect();

        let mut out = self.amplitudes.clone();
        let mut gathered = vec![ZERO; side];
        for base in 0..self.dimension() {
            if positions.iter().any(|&p| !(base / strides[p]).is_multiple_of(self.dims[p])) {
                continue;
            }
            for (g, off) in gathered.iter_mut().zip(&offsets) {
                *g = self.amplitudes[base + off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let r = &matrix[row * side..(row + 1) * side];
                out[base + off] = r.iter().zip(&gathered).map(|(m, g)| m * g).sum();
            }
        }
        Ok(Self {
            amplitudes: out,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
        })
    }

    /// Applies a [`JointUnitary`] to the ordered qubit pair `(p, a)`.
    pub fn apply_joint_unitary(&self, u: &JointUnitary, p: &str, a: &str) -> Result<Self> {
        if p == a {
            return Err(Error::Label(format!("joint unitary needs two subsystems, got {p:?} twice")));
        }
        for l in [p, a] {
            let d = self.dim_of(l)?;
            if d != 2 {
                return Err(Error::Dimension(format!(
                    "subsystem {l:?} has dimension {d}, joint unitaries act on qubits"
                )));
            }
        }
        self.apply_operator(&[p, a], &u.row_major())
    }

    /// Component with subsystem `q` fixed to `level`, with `q` removed from
    /// the register. Not renormalized.
    pub fn slice(&self, q: &str, level: usize) -> Result<Self> {
        let pos = self.position(q)?;
        let d = self.dims[pos];
        if level >= d {
            return Err(Error::Dimension(format!(
                "level {level} out of range for {q:?} of dimension {d}"
            )));
        }
        let stride = strides(&self.dims)[pos];
        let amplitudes: Vec<C64> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / stride) % d == level)
            .map(|(_, z)| *z)
            .collect();
        let mut dims = self.dims.clone();
        dims.remove(pos);
        let mut labels = self.labels.clone();
        labels.remove(pos);
        Self::from_amplitudes(&labels, &dims, amplitudes)
    }

    /// Projects `q` onto `level` in place in the register. Not renormalized.
    pub fn project(&self, q: &str, level: usize) -> Result<Self> {
        let pos = self.position(q)?;
        let d = self.dims[pos];
        if level >= d {
            return Err(Error::Dimension(format!(
                "level {level} out of range for {q:?} of dimension {d}"
            )));
        }
        let stride = strides(&self.dims)[pos];
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| if (i / stride) % d == level { *z } else { ZERO })
            .collect();
        Ok(Self {
            amplitudes,
            dims: self.dims.clone(),
            labels: self.labels.clone(),
        })
    }

    /// Outcome probabilities for a projective measurement of `q` in its
    /// computational basis.
    pub fn outcome_probabilities(&self, q: &str) -> Result<Vec<f64>> {
        self.require_normalized("measurement")?;
        let pos = self.position(q)?;
        let d = self.dims[pos];
        let stride = strides(&self.dims)[pos];
        let mut probs = vec![0.0; d];
        for (i, z) in self.amplitudes.iter().enumerate() {
            probs[(i / stride) % d] += z.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(probs)
    }

    /// Resolves a measurement of `q` into all of its branches.
    pub fn measure_subsystem(&self, q: &str) -> Result<MeasurementResolution> {
        let probs = self.outcome_probabilities(q)?;
        let branches = probs
            .into_iter()
            .enumerate()
            .map(|(outcome, probability)| {
                let post_state = if probability < NULL_BRANCH_TOL {
                    None
                } else {
                    Some(self.project(q, outcome)?.normalized()?)
                };
                Ok(MeasurementBranch {
                    outcome,
                    probability,
                    post_state,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MeasurementResolution {
            subsystem: q.to_owned(),
            branches,
        })
    }

    /// Draws one outcome of a measurement of `q` with the exact branch
    /// probabilities.
    pub fn sample_measurement<R: Rng + ?Sized>(&self, q: &str, rng: &mut R) -> Result<usize> {
        let probs = self.outcome_probabilities(q)?;
        Ok(sample_index(&probs, rng))
    }

    /// `|⟨target|self⟩|²`.
    pub fn fidelity(&self, target: &PureState) -> Result<f64> {
        self.require_normalized("fidelity")?;
        target.require_normalized("fidelity")?;
        Ok(target.inner(self)?.norm_sqr().min(1.0))
    }

    /// Reduced density matrix over `keep`, in register order.
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::Label("partial trace must keep at least one subsystem".into()));
        }
        self.require_normalized("partial trace")?;
        let mut kept = keep
            .iter()
            .map(|k| self.position(k.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        kept.sort_unstable();
        kept.dedup();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|p| !kept.contains(p)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&p| self.dims[p]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&p| self.dims[p]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // psi as a dk x dt matrix
        let mut psi = DMatrix::<C64>::zeros(dk, dt);
        for (i, z) in self.amplitudes.iter().enumerate() {
            let lv = self.levels_of(i);
            let ki: Vec<usize> = kept.iter().map(|&p| lv[p]).collect();
            let ti: Vec<usize> = traced.iter().map(|&p| lv[p]).collect();
            psi[(big_endian_index(&kept_dims, &ki), big_endian_index(&traced_dims, &ti))] = *z;
        }
        let rho = &psi * psi.adjoint();
        let labels: Vec<String> = kept.iter().map(|&p| self.labels[p].clone()).collect();
        DensityMatrix::new(rho, kept_dims, labels)
    }

    /// Purity of the marginal on `keep`.
    pub fn marginal_purity<S: AsRef<str>>(&self, keep: &[S]) -> Result<f64> {
        Ok(self.partial_trace(keep)?.purity())
    }

    fn require_normalized(&self, what: &str) -> Result<()> {
        if self.is_normalized() {
            Ok(())
        } else {
            Err(Error::Input(format!(
                "{what} needs a normalized state, norm is {}",
                self.norm()
            )))
        }
    }

    /// Kets with non-negligible amplitude, e.g. `(0.577+0i)|001⟩`.
    pub fn ket_string(&self, threshold: f64) -> String {
        let terms: Vec<String> = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > threshold)
            .map(|(i, z)| {
                let digits: String = self
                    .levels_of(i)
                    .iter()
                    .map(|l| l.to_string())
                    .collect::<Vec<_>>()
                    .join(if self.dims.iter().any(|&d| d > 10) { "," } else { "" });
                format!("({:.6}{:+.6}i)|{digits}⟩", z.re, z.im)
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

impl fmt::Display for PureState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.ket_string(1e-12), self.labels.join(" "))
    }
}

/// `make_basis_state` with default labels `"0"`, `"1"`, ...
pub fn make_basis_state(dims: &[usize], occupation: &[usize]) -> Result<PureState> {
    let labels: Vec<String> = (0..dims.len()).map(|i| i.to_string()).collect();
    PureState::basis(&labels, dims, occupation)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

pub(crate) fn big_endian_index(dims: &[usize], levels: &[usize]) -> usize {
    levels.iter().zip(dims).fold(0, |acc, (l, d)| acc * d + l)
}

fn levels_of(dims: &[usize], mut index: usize) -> Vec<usize> {
    let mut lv = vec![0; dims.len()];
    for (l, d) in lv.iter_mut().zip(dims).rev() {
        *l = index % d;
        index /= d;
    }
    lv
}

/// Inverse-CDF draw over `probs`; outcomes with zero weight are never chosen.
pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// One branch of a resolved measurement.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBranch {
    pub outcome: usize,
    pub probability: f64,
    /// Normalized collapsed state over the full register; `None` for
    /// branches lighter than [`NULL_BRANCH_TOL`].
    pub post_state: Option<PureState>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementResolution {
    pub subsystem: String,
    pub branches: Vec<MeasurementBranch>,
}

impl MeasurementResolution {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn branch(&self, outcome: usize) -> Option<&MeasurementBranch> {
        self.branches.iter().find(|b| b.outcome == outcome)
    }
}

/// A 4×4 unitary on an ordered qubit pair `(p, a)`, indexed by
/// `level(p) + 2 * level(a)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointUnitary {
    entries: [[C64; 4]; 4],
}

impl JointUnitary {
    /// Accepts `entries` if `max |UU† − I| < 1e-12`.
    pub fn new(entries: [[C64; 4]; 4]) -> Result<Self> {
        let u = Self { entries };
        let deviation = u.unitarity_deviation();
        if deviation < UNITARY_TOL {
            Ok(u)
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    pub fn from_real(entries: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(entries.map(|row| row.map(|x| C64::new(x, 0.0))))
    }

    pub fn identity() -> Self {
        let mut entries = [[ZERO; 4]; 4];
        for (i, row) in entries.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Self { entries }
    }

    pub fn entries(&self) -> &[[C64; 4]; 4] {
        &self.entries
    }

    pub fn row_major(&self) -> Vec<C64> {
        self.entries.iter().flatten().copied().collect()
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.row_major(), 4)
    }
}

/// `max |UU† − I|` elementwise for a row-major `n×n` matrix.
pub fn unitarity_deviation(m: &[C64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for k in 0..n {
                acc += m[i * n + k] * m[j * n + k].conj();
            }
            if i == j {
                acc -= ONE;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

/// A validated density matrix over labelled subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<C64>,
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl DensityMatrix {
    pub fn new(entries: DMatrix<C64>, dims: Vec<usize>, labels: Vec<String>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for dims {:?}",
                entries.nrows(),
                entries.ncols(),
                dims
            )));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::Input(format!("density matrix not Hermitian ({herm:e})")));
        }
        let rho = Self {
            entries,
            dims,
            labels,
        };
        let tr = rho.trace();
        if (tr - 1.0).abs() > NORM_TOL {
            return Err(Error::Input(format!("density matrix trace {tr}")));
        }
        if let Some(min) = rho.eigenvalues().first() {
            if *min < EIGEN_FLOOR {
                return Err(Error::Input(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.entries.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Wootters concurrence of a two-qubit state, clamped to `[0, 1]`.
    pub fn concurrence(&self) -> Result<f64> {
        if self.dims != [2, 2] {
            return Err(Error::Dimension(format!(
                "concurrence needs two qubits, got dims {:?}",
                self.dims
            )));
        }
        // sigma_y ⊗ sigma_y in the |00>,|01>,|10>,|11> basis
        let mut yy = DMatrix::<C64>::zeros(4, 4);
        yy[(0, 3)] = -ONE;
        yy[(1, 2)] = ONE;
        yy[(2, 1)] = ONE;
        yy[(3, 0)] = -ONE;
        // rho = A A^dagger over the eigenvectors that carry weight; the lambdas are
        // then the singular values of A^T (sigma_y ⊗ sigma_y) A
        let eig = SymmetricEigen::new(self.entries.clone());
        let cols: Vec<DVector<C64>> = (0..4)
            .filter(|&k| eig.eigenvalues[k] > EIGEN_WEIGHT_FLOOR)
            .map(|k| eig.eigenvectors.column(k) * C64::new(eig.eigenvalues[k].sqrt(), 0.0))
            .collect();
        if cols.is_empty() {
            return Ok(0.0);
        }
        let a = DMatrix::from_columns(&cols);
        let tau = a.transpose() * yy * &a;
        let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
        lambdas.resize(4, 0.0);
        lambdas.sort_by(|x, y| y.total_cmp(x));
        let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
        Ok(c.clamp(0.0, 1.0))
    }
}

/// [`PureState::fidelity`] as a free function.
pub fn fidelity(state: &PureState, target: &PureState) -> Result<f64> {
    state.fidelity(target)
}

/// [`DensityMatrix::concurrence`] as a free function.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    rho.concurrence()
}
