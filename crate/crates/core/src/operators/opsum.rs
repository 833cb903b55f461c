//! Symbolic sums of products of single-site operators and their
//! materialization as sparse matrices in a working basis.

use num_complex::Complex64;

use super::local::LocalOp;
use super::sparse::SparseOperator;
use crate::basis::{HilbertSpace, SectorBasis, StateVector};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `coeff * prod_k A_k(site_k)` over distinct sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<(usize, LocalOp)>,
}

impl Term {
    pub fn adjoint(&self) -> Term {
        Term {
            coeff: self.coeff.conj(),
            factors: self.factors.iter().map(|(s, op)| (*s, op.adjoint())).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OperatorSum {
    space: HilbertSpace,
    terms: Vec<Term>,
}

/// How matrix elements leaving the working basis are treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leakage {
    /// The basis must be invariant; leakage beyond `1e-10` is an error.
    Forbid,
    /// Compute `P A P` for the projector `P` onto the basis.
    Project,
}

impl OperatorSum {
    pub fn new(space: &HilbertSpace) -> Self {
        Self {
            space: space.clone(),
            terms: Vec::new(),
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff * prod op(site)`; sites must be distinct and in range.
    pub fn push(&mut self, coeff: Complex64, factors: Vec<(usize, LocalOp)>) -> Result<()> {
        let d = self.space.local_dim();
        for (k, (site, op)) in factors.iter().enumerate() {
            if *site >= self.space.num_sites() {
                return Err(Error::InvalidParameter(format!("site {site} out of range")));
            }
            if op.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
            }
            if factors[..k].iter().any(|(s, _)| s == site) {
                return Err(Error::InvalidParameter(format!("site {site} repeated in one term")));
            }
        }
        if coeff == ZERO || factors.iter().any(|(_, op)| op.is_zero()) {
            return Ok(());
        }
        self.terms.push(Term { coeff, factors });
        Ok(())
    }

    pub fn push_real(&mut self, coeff: f64, factors: Vec<(usize, LocalOp)>) -> Result<()> {
        self.push(Complex64::new(coeff, 0.0), factors)
    }

    /// Adds `coeff * A + conj(coeff) * A^dag`.
    pub fn push_with_adjoint(&mut self, coeff: Complex64, factors: Vec<(usize, LocalOp)>) -> Result<()> {
        let t = Term { coeff, factors };
        let a = t.adjoint();
        self.push(t.coeff, t.factors)?;
        self.push(a.coeff, a.factors)
    }

    pub fn extend(&mut self, other: &OperatorSum) -> Result<()> {
        if other.space != self.space {
            return Err(Error::InvalidSpace("operator sums live on different spaces".into()));
        }
        self.terms.extend(other.terms.iter().cloned());
        Ok(())
    }

    pub fn plus(mut self, other: &OperatorSum) -> Result<Self> {
        self.extend(other)?;
        Ok(self)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .filter(|_| s != ZERO)
                .map(|t| Term { coeff: t.coeff * s, factors: t.factors.clone() })
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            terms: self.terms.iter().map(Term::adjoint).collect(),
        }
    }

    /// Calls `f(target, amplitude)` for every nonzero `<target| A |config>`
    /// contribution (targets may repeat).
    pub fn apply_config(&self, config: u64, scratch: &mut ApplyScratch, mut f: impl FnMut(u64, Complex64)) {
        for term in &self.terms {
            scratch.current.clear();
            scratch.current.push((config, term.coeff));
            for (site, op) in &term.factors {
                scratch.next.clear();
                for &(c, a) in &scratch.current {
                    let digit = self.space.digit(c, *site);
                    for &(row, v) in op.column(digit) {
                        scratch.next.push((self.space.with_digit(c, *site, row as usize), a * v));
                    }
                }
                std::mem::swap(&mut scratch.current, &mut scratch.next);
                if scratch.current.is_empty() {
                    break;
                }
            }
            for &(c, a) in &scratch.current {
                f(c, a);
            }
        }
    }

    /// Full-space matrix-free product `A psi`.
    pub fn apply_full(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: psi.len(),
            });
        }
        let mut out = vec![ZERO; psi.len()];
        let mut scratch = ApplyScratch::default();
        for (c, &a) in psi.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            self.apply_config(c as u64, &mut scratch, |t, v| out[t as usize] += v * a);
        }
        Ok(out)
    }

    pub fn apply_state_full(&self, psi: &StateVector) -> Result<StateVector> {
        Ok(StateVector::from_amplitudes(self.apply_full(psi.amplitudes())?))
    }

    /// Matrix in the full configuration basis.
    pub fn to_sparse_full(&self) -> Result<SparseOperator> {
        self.to_sparse(&SectorBasis::full(&self.space), Leakage::Forbid)
    }

    /// Matrix `M_ij = <b_i| A |b_j>` in a working basis.
    pub fn to_sparse(&self, basis: &SectorBasis, leakage: Leakage) -> Result<SparseOperator> {
        if basis.space() != &self.space {
            return Err(Error::InvalidSpace("basis and operator live on different spaces".into()));
        }
        let dim = basis.dim();
        let mut triplets = Vec::new();
        let mut scratch = ApplyScratch::default();
        let mut column = vec![ZERO; dim];
        let mut seen = vec![false; dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut image: Vec<(u64, Complex64)> = Vec::new();
        let mut worst_leak: f64 = 0.0;
        let mut residual: std::collections::HashMap<u64, Complex64> = std::collections::HashMap::new();
        for j in 0..dim {
            image.clear();
            basis.for_each_support(j, |c, a| {
                self.apply_config(c, &mut scratch, |t, v| image.push((t, v * a)));
            });
            for &(t, v) in &image {
                if let Some((i, w)) = basis.locate(t) {
                    if !seen[i] {
                        seen[i] = true;
                        touched.push(i);
                    }
                    column[i] += w.conj() * v;
                }
            }
            if leakage == Leakage::Forbid && !basis.is_full() {
                // residual of the image after projecting onto the basis
                residual.clear();
                for &(t, v) in &image {
                    *residual.entry(t).or_insert(ZERO) += v;
                }
                for &i in &touched {
                    let c = column[i];
                    basis.for_each_support(i, |t, w| *residual.entry(t).or_insert(ZERO) -= c * w);
                }
                let leak: f64 = residual.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                worst_leak = worst_leak.max(leak);
            }
            for &i in &touched {
                triplets.push((i as u32, j as u32, column[i]));
                column[i] = ZERO;
                seen[i] = false;
            }
            touched.clear();
        }
        if worst_leak > 1e-10 {
            return Err(Error::SubspaceViolation(worst_leak));
        }
        Ok(SparseOperator::from_triplets(dim, triplets))
    }

    /// Like [`Self::to_sparse`], additionally checking and flagging
    /// hermiticity.
    pub fn to_hermitian(&self, basis: &SectorBasis, leakage: Leakage) -> Result<SparseOperator> {
        self.to_sparse(basis, leakage)?.mark_hermitian(1e-12)
    }
}

#[derive(Default)]
pub struct ApplyScratch {
    current: Vec<(u64, Complex64)>,
    next: Vec<(u64, Complex64)>,
}
