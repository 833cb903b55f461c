//! Time evolution under static Hamiltonians and piecewise schedules, plus
//! expectation values.
//!
//! A [`Propagator`] splits the Hamiltonian into its connected blocks (for
//! example magnetization sectors of a symmetric model) and treats each block
//! either by a dense spectral decomposition or by Lanczos propagation.

pub mod krylov;
pub mod schedule;

use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::StateVector;
use crate::linalg;
use crate::operators::SparseOperator;
use crate::{Error, Result};

pub use krylov::{expm_multiply, KrylovSettings, KrylovStats};
pub use schedule::{evolve_schedule, Envelope, Schedule, ScheduleResult, ScheduleSettings, Segment};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest block treated by dense diagonalization under [`Method::Auto`].
pub const DENSE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    #[default]
    Auto,
    Dense,
    Krylov,
}

enum BlockKind {
    Dense { values: Vec<f64>, vectors: Mat<Complex64> },
    Krylov { matrix: SparseOperator },
}

struct Block {
    indices: Vec<usize>,
    kind: BlockKind,
}

/// `exp(-i t H)` for a fixed Hermitian `H`.
pub struct Propagator {
    dim: usize,
    blocks: Vec<Block>,
    krylov: KrylovSettings,
}

impl Propagator {
    pub fn new(h: &SparseOperator, method: Method) -> Result<Self> {
        Self::with_settings(h, method, KrylovSettings::default())
    }

    pub fn with_settings(h: &SparseOperator, method: Method, krylov: KrylovSettings) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::InvalidParameter("propagation needs a Hermitian operator".into()));
        }
        let dim = h.dim();
        let mut blocks = Vec::new();
        for indices in connected_blocks(h) {
            let n = indices.len();
            let dense = match method {
                Method::Dense => true,
                Method::Krylov => false,
                Method::Auto => n <= DENSE_LIMIT,
            };
            let local = restrict(h, &indices);
            let kind = if dense {
                let eig = linalg::eigh(&local.to_dense())?;
                BlockKind::Dense {
                    values: eig.values,
                    vectors: eig.vectors,
                }
            } else {
                BlockKind::Krylov {
                    matrix: local.mark_hermitian(1e-12)?,
                }
            };
            blocks.push(Block { indices, kind });
        }
        Ok(Self { dim, blocks, krylov })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    /// True when every block uses the dense spectral path.
    pub fn is_dense(&self) -> bool {
        self.blocks.iter().all(|b| matches!(b.kind, BlockKind::Dense { .. }))
    }

    /// Eigenvalues of all dense blocks (unsorted across blocks).
    pub fn dense_eigenvalues(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .filter_map(|b| match &b.kind {
                BlockKind::Dense { values, .. } => Some(values.iter().copied()),
                _ => None,
            })
            .flatten()
            .collect()
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        self.check(psi)?;
        let mut out = vec![ZERO; self.dim];
        for block in &self.blocks {
            let local: Vec<Complex64> = block.indices.iter().map(|&i| psi.amplitudes()[i]).collect();
            if local.iter().all(|z| *z == ZERO) {
                continue;
            }
            let evolved = match &block.kind {
                BlockKind::Dense { values, vectors } => {
                    let coeffs = project(vectors, &local);
                    let phased: Vec<Complex64> = coeffs
                        .iter()
                        .zip(values)
                        .map(|(c, e)| c * Complex64::from_polar(1.0, -t * e))
                        .collect();
                    expand(vectors, &phased)
                }
                BlockKind::Krylov { matrix } => {
                    let mut apply = |x: &[Complex64], y: &mut [Complex64]| matrix.apply_into(x, y);
                    expm_multiply(&mut apply, &local, t, &self.krylov)?.0
                }
            };
            for (&i, z) in block.indices.iter().zip(evolved) {
                out[i] = z;
            }
        }
        Ok(StateVector::from_amplitudes(out))
    }

    /// Prepares repeated evaluation of `exp(-i t H) psi` at many times.
    pub fn trajectory(self: &Arc<Self>, psi: &StateVector) -> Result<Trajectory> {
        self.check(psi)?;
        let mut spectral = Vec::new();
        let mut krylov = Vec::new();
        for (k, block) in self.blocks.iter().enumerate() {
            let local: Vec<Complex64> = block.indices.iter().map(|&i| psi.amplitudes()[i]).collect();
            if local.iter().all(|z| *z == ZERO) {
                continue;
            }
            match &block.kind {
                BlockKind::Dense { vectors, .. } => spectral.push((k, project(vectors, &local))),
                BlockKind::Krylov { .. } => krylov.push((k, vec![(0.0, local)])),
            }
        }
        Ok(Trajectory {
            propagator: Arc::clone(self),
            spectral,
            krylov,
        })
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: psi.dim(),
            });
        }
        Ok(())
    }
}

/// Maximum number of stored Krylov checkpoints per block.
const MAX_CHECKPOINTS: usize = 64;

/// A state evolving under a fixed propagator, evaluable at arbitrary times.
/// Dense blocks are evaluated in closed form; Krylov blocks step forward
/// from the nearest earlier checkpoint.
pub struct Trajectory {
    propagator: Arc<Propagator>,
    spectral: Vec<(usize, Vec<Complex64>)>,
    krylov: Vec<(usize, Vec<(f64, Vec<Complex64>)>)>,
}

impl Trajectory {
    pub fn state_at(&mut self, t: f64) -> Result<StateVector> {
        let p = &self.propagator;
        let mut out = vec![ZERO; p.dim];
        for (k, coeffs) in &self.spectral {
            let block = &p.blocks[*k];
            if let BlockKind::Dense { values, vectors } = &block.kind {
                let phased: Vec<Complex64> = coeffs
                    .iter()
                    .zip(values)
                    .map(|(c, e)| c * Complex64::from_polar(1.0, -t * e))
                    .collect();
                for (&i, z) in block.indices.iter().zip(expand(vectors, &phased)) {
                    out[i] = z;
                }
            }
        }
        for (k, checkpoints) in &mut self.krylov {
            let block = &p.blocks[*k];
            let BlockKind::Krylov { matrix } = &block.kind else {
                continue;
            };
            let (t0, start) = checkpoints
                .iter()
                .filter(|(s, _)| *s <= t)
                .max_by(|a, b| a.0.total_cmp(&b.0))
                .map(|(s, v)| (*s, v.clone()))
                .unwrap_or_else(|| (0.0, checkpoints[0].1.clone()));
            let mut apply = |x: &[Complex64], y: &mut [Complex64]| matrix.apply_into(x, y);
            let state = expm_multiply(&mut apply, &start, t - t0, &p.krylov)?.0;
            if t > t0 {
                if checkpoints.len() >= MAX_CHECKPOINTS {
                    // keep the initial state and thin out the rest
                    let mut keep = 0;
                    checkpoints.retain(|_| {
                        keep += 1;
                        keep == 1 || keep % 2 == 0
                    });
                }
                checkpoints.push((t, state.clone()));
            }
            for (&i, z) in block.indices.iter().zip(state) {
                out[i] = z;
            }
        }
        Ok(StateVector::from_amplitudes(out))
    }
}

/// `exp(-i t H) psi` with automatic method selection.
pub fn evolve_static(h: &SparseOperator, psi: &StateVector, t: f64) -> Result<StateVector> {
    if t == 0.0 {
        if psi.dim() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: psi.dim(),
            });
        }
        return Ok(psi.clone());
    }
    Propagator::new(h, Method::Auto)?.evolve(psi, t)
}

/// `exp(-i t H) psi` by Lanczos propagation on the whole space.
pub fn evolve_krylov(h: &SparseOperator, psi: &StateVector, t: f64, settings: &KrylovSettings) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi.dim(),
        });
    }
    let mut apply = |x: &[Complex64], y: &mut [Complex64]| h.apply_into(x, y);
    Ok(StateVector::from_amplitudes(
        expm_multiply(&mut apply, psi.amplitudes(), t, settings)?.0,
    ))
}

fn project(vectors: &Mat<Complex64>, local: &[Complex64]) -> Vec<Complex64> {
    let n = local.len();
    (0..vectors.ncols())
        .map(|k| (0..n).map(|i| vectors[(i, k)].conj() * local[i]).sum())
        .collect()
}

fn expand(vectors: &Mat<Complex64>, coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = vectors.nrows();
    let mut out = vec![ZERO; n];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        let col = vectors.col(k);
        for i in 0..n {
            out[i] += col[i] * c;
        }
    }
    out
}

/// Index sets of the connected components of the sparsity graph.
fn connected_blocks(h: &SparseOperator) -> Vec<Vec<usize>> {
    let n = h.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c, _) in h.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if label[root] == usize::MAX {
            label[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[label[root]].push(i);
    }
    blocks
}

fn restrict(h: &SparseOperator, indices: &[usize]) -> SparseOperator {
    let mut position = std::collections::HashMap::with_capacity(indices.len());
    for (k, &i) in indices.iter().enumerate() {
        position.insert(i, k as u32);
    }
    let mut t = Vec::new();
    for (k, &i) in indices.iter().enumerate() {
        for (c, v) in h.row(i) {
            if let Some(&kc) = position.get(&c) {
                t.push((k as u32, kc, v));
            }
        }
    }
    SparseOperator::from_triplets(indices.len(), t)
}

fn check_op(psi: &StateVector, op: &SparseOperator) -> Result<()> {
    if psi.dim() != op.dim() {
        return Err(Error::DimensionMismatch {
            expected: op.dim(),
            found: psi.dim(),
        });
    }
    if !op.is_hermitian() {
        return Err(Error::InvalidParameter("expectation values need a Hermitian observable".into()));
    }
    Ok(())
}

/// `<psi|O|psi>` for Hermitian `O`.
pub fn expectation(psi: &StateVector, op: &SparseOperator) -> Result<f64> {
    check_op(psi, op)?;
    let o_psi = op.apply(psi.amplitudes());
    let z = linalg::inner(psi.amplitudes(), &o_psi);
    let scale = 1.0_f64.max(linalg::norm(&o_psi));
    if z.im.abs() > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "expectation value has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

/// `<O^2> - <O>^2`, clamped at zero.
pub fn variance(psi: &StateVector, op: &SparseOperator) -> Result<f64> {
    check_op(psi, op)?;
    let o_psi = op.apply(psi.amplitudes());
    let mean = linalg::inner(psi.amplitudes(), &o_psi).re;
    let second = o_psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    Ok((second - mean * mean).max(0.0))
}

/// First and second moments of a set of observables in one state.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub means: Vec<f64>,
    /// Symmetrized covariance `Re<B_i B_j> - <B_i><B_j>`.
    pub covariance: Mat<f64>,
}

pub fn moments(psi: &StateVector, ops: &[SparseOperator]) -> Result<Moments> {
    let images: Vec<Vec<Complex64>> = ops
        .iter()
        .map(|op| {
            check_op(psi, op)?;
            Ok(op.apply(psi.amplitudes()))
        })
        .collect::<Result<_>>()?;
    let means: Vec<f64> = images
        .iter()
        .map(|im| linalg::inner(psi.amplitudes(), im).re)
        .collect();
    let k = ops.len();
    let mut covariance = Mat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = linalg::inner(&images[i], &images[j]).re - means[i] * means[j];
            covariance[(i, j)] = v;
            covariance[(j, i)] = v;
        }
    }
    Ok(Moments { means, covariance })
}
