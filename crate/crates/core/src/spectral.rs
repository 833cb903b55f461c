//! Full-spectrum diagnostics: level statistics, eigenstate expectation scans
//! and bipartite entanglement.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{HilbertSpace, StateVector};
use crate::linalg;
use crate::operators::SparseOperator;
use crate::{Error, Result};

/// Largest sector handed to the dense eigensolver by default.
pub const DENSE_BUDGET: usize = 12_000;

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub label: String,
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `j` belongs to `values[j]`.
    pub vectors: Option<Mat<Complex64>>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eigenvector(&self, j: usize) -> Option<StateVector> {
        let v = self.vectors.as_ref()?;
        Some(StateVector::from_amplitudes((0..v.nrows()).map(|r| v[(r, j)]).collect()))
    }
}

pub fn full_spectrum(h: &SparseOperator, label: &str, budget: usize, with_vectors: bool) -> Result<SpectrumResult> {
    if h.dim() > budget {
        return Err(Error::BudgetExceeded { dim: h.dim(), budget });
    }
    if !h.is_hermitian() {
        return Err(Error::InvalidParameter("spectrum requested for a non-Hermitian operator".into()));
    }
    let dense = h.to_dense();
    let (values, vectors) = if with_vectors {
        let e = linalg::eigh(&dense)?;
        (e.values, Some(e.vectors))
    } else {
        (linalg::eigvalsh(&dense)?, None)
    };
    let trace = h.trace().re;
    let sum: f64 = values.iter().sum();
    let scale = values.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
    if (trace - sum).abs() > 1e-8 * scale {
        return Err(Error::Eigen(format!("trace check failed: tr H = {trace}, sum E = {sum}")));
    }
    Ok(SpectrumResult {
        label: label.to_string(),
        values,
        vectors,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioStats {
    pub mean: f64,
    /// Number of ratios averaged.
    pub count: usize,
    /// Fraction of spacings that vanish (exact degeneracies).
    pub zero_fraction: f64,
}

/// Mean of `min(s_i, s_{i+1}) / max(s_i, s_{i+1})` over consecutive
/// spacings of the sorted levels.
pub fn level_spacing_ratio(values: &[f64]) -> Result<RatioStats> {
    if values.len() < 3 {
        return Err(Error::InvalidParameter("need at least three levels".into()));
    }
    let mut e = values.to_vec();
    e.sort_by(f64::total_cmp);
    let scale = e.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    let s: Vec<f64> = e
        .windows(2)
        .map(|w| {
            let d = w[1] - w[0];
            if d <= 1e-12 * scale {
                0.0
            } else {
                d
            }
        })
        .collect();
    let zeros = s.iter().filter(|x| **x == 0.0).count();
    let ratios: Vec<f64> = s
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].min(w[1]), w[0].max(w[1]));
            if hi == 0.0 {
                0.0
            } else {
                lo / hi
            }
        })
        .collect();
    Ok(RatioStats {
        mean: ratios.iter().sum::<f64>() / ratios.len() as f64,
        count: ratios.len(),
        zero_fraction: zeros as f64 / s.len() as f64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Unfolding {
    pub degree: usize,
    /// Fraction of the spectrum kept around its centre.
    pub kept_fraction: f64,
    pub kept_levels: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub ratio: RatioStats,
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
    pub unfolding: Unfolding,
}

/// Chebyshev polynomials `T_0..T_degree` at `x` in `[-1, 1]`.
fn chebyshev(x: f64, degree: usize, out: &mut [f64]) {
    out[0] = 1.0;
    if degree > 0 {
        out[1] = x;
    }
    for k in 2..=degree {
        out[k] = 2.0 * x * out[k - 1] - out[k - 2];
    }
}

/// Maps the levels onto unit mean spacing by a least-squares polynomial fit
/// of the staircase `N(E)`; returns the unfolded central part.
pub fn unfold(values: &[f64], degree: usize, kept_fraction: f64) -> Result<(Vec<f64>, Unfolding)> {
    let mut e = values.to_vec();
    e.sort_by(f64::total_cmp);
    let n = e.len();
    if n < degree + 2 {
        return Err(Error::InvalidParameter(format!("{n} levels are too few for a degree-{degree} unfolding")));
    }
    let (lo, hi) = (e[0], e[n - 1]);
    if !(hi > lo) {
        return Err(Error::InvalidParameter("spectrum has zero width".into()));
    }
    let x = |v: f64| 2.0 * (v - lo) / (hi - lo) - 1.0;
    let k = degree + 1;
    let mut gram = Mat::<f64>::zeros(k, k);
    let mut rhs = vec![0.0; k];
    let mut t = vec![0.0; k];
    for (i, &v) in e.iter().enumerate() {
        chebyshev(x(v), degree, &mut t);
        // staircase at the level itself, midpoint convention
        let y = i as f64 + 0.5;
        for a in 0..k {
            rhs[a] += t[a] * y;
            for b in 0..k {
                gram[(a, b)] += t[a] * t[b];
            }
        }
    }
    let (coef, _) = linalg::pinv_solve_psd(&gram, &rhs, 1e-14)?;
    let cut = ((1.0 - kept_fraction) / 2.0 * n as f64).floor() as usize;
    let kept = &e[cut..n - cut];
    let unfolded = kept
        .iter()
        .map(|&v| {
            chebyshev(x(v), degree, &mut t);
            t.iter().zip(&coef).map(|(a, b)| a * b).sum()
        })
        .collect::<Vec<f64>>();
    Ok((
        unfolded,
        Unfolding {
            degree,
            kept_fraction,
            kept_levels: kept.len(),
        },
    ))
}

/// Ratio statistics plus a normalized histogram of unfolded spacings
/// (degree-10 staircase fit, central 80% of the levels).
pub fn spacing_histogram(values: &[f64], bins: usize, s_max: f64) -> Result<LevelStats> {
    if bins == 0 || !(s_max > 0.0) {
        return Err(Error::InvalidParameter("histogram needs bins > 0 and s_max > 0".into()));
    }
    let ratio = level_spacing_ratio(values)?;
    let (unfolded, unfolding) = unfold(values, 10, 0.8)?;
    let mut s: Vec<f64> = unfolded.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    s.iter_mut().for_each(|x| *x /= mean);
    let width = s_max / bins as f64;
    let mut counts = vec![0usize; bins];
    let mut total = 0usize;
    for &v in &s {
        total += 1;
        if v >= 0.0 && v < s_max {
            counts[((v / width) as usize).min(bins - 1)] += 1;
        }
    }
    let edges = (0..=bins).map(|i| i as f64 * width).collect();
    // normalized over all spacings; mass beyond s_max is not shown
    let densities = counts.iter().map(|&c| c as f64 / (total as f64 * width)).collect();
    Ok(LevelStats {
        ratio,
        edges,
        densities,
        unfolding,
    })
}

/// Wigner surmise for the Gaussian orthogonal ensemble.
pub fn wigner_surmise(s: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * s * (-std::f64::consts::FRAC_PI_4 * s * s).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub energy: f64,
    pub value: f64,
}

/// `<E_j|O|E_j>` for every eigenvector. Within degenerate clusters the
/// eigenbasis is fixed by diagonalizing `O`, so the values are basis
/// independent.
pub fn eigenstate_scan(spectrum: &SpectrumResult, observable: &SparseOperator) -> Result<Vec<ScanPoint>> {
    Ok(align_degenerate(spectrum, observable)?.1)
}

/// Rotates each degenerate cluster of eigenvectors onto the eigenbasis of
/// `observable` restricted to it. Returns the rotated spectrum together with
/// the scan of `observable` over it (same column order).
pub fn align_degenerate(spectrum: &SpectrumResult, observable: &SparseOperator) -> Result<(SpectrumResult, Vec<ScanPoint>)> {
    let v = spectrum
        .vectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("eigenstate scan needs eigenvectors".into()))?;
    let dim = v.nrows();
    if observable.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: observable.dim() });
    }
    let e = &spectrum.values;
    let scale = e.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let tol = 1e-9 * scale;
    let column = |j: usize| -> Vec<Complex64> { (0..dim).map(|r| v[(r, j)]).collect() };
    let images: Vec<Vec<Complex64>> = (0..e.len()).map(|j| observable.apply(&column(j))).collect();
    let mut rotated = v.clone();
    let mut out = Vec::with_capacity(e.len());
    let mut start = 0;
    while start < e.len() {
        let mut end = start + 1;
        while end < e.len() && e[end] - e[end - 1] <= tol {
            end += 1;
        }
        if end - start == 1 {
            let val = linalg::inner(&column(start), &images[start]).re;
            out.push(ScanPoint { energy: e[start], value: val });
        } else {
            let k = end - start;
            let cols: Vec<Vec<Complex64>> = (start..end).map(column).collect();
            let sub = Mat::from_fn(k, k, |a, b| linalg::inner(&cols[a], &images[start + b]));
            let sub = Mat::from_fn(k, k, |a, b| (sub[(a, b)] + sub[(b, a)].conj()) * 0.5);
            let eig = linalg::eigh(&sub)?;
            for (i, &val) in eig.values.iter().enumerate() {
                out.push(ScanPoint { energy: e[start + i], value: val });
                for r in 0..dim {
                    rotated[(r, start + i)] = (0..k).map(|a| eig.vectors[(a, i)] * cols[a][r]).sum();
                }
            }
        }
        start = end;
    }
    let aligned = SpectrumResult {
        label: spectrum.label.clone(),
        values: e.clone(),
        vectors: Some(rotated),
    };
    Ok((aligned, out))
}

/// Squared Schmidt coefficients of a full-space state across the cut
/// `subsystem | rest`, descending.
pub fn schmidt_weights(space: &HilbertSpace, psi: &StateVector, subsystem: &[usize]) -> Result<Vec<f64>> {
    let n = space.num_sites();
    if psi.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: psi.dim() });
    }
    let mut in_a = vec![false; n];
    for &s in subsystem {
        if s >= n || in_a[s] {
            return Err(Error::InvalidParameter(format!("invalid or repeated site {s} in bipartition")));
        }
        in_a[s] = true;
    }
    if subsystem.is_empty() || subsystem.len() == n {
        return Err(Error::InvalidParameter("bipartition must be a nonempty proper subset".into()));
    }
    let d = space.local_dim();
    let a_sites: Vec<usize> = (0..n).filter(|&s| in_a[s]).collect();
    let b_sites: Vec<usize> = (0..n).filter(|&s| !in_a[s]).collect();
    // reduced density matrix of the smaller side
    let (small, large) = if a_sites.len() <= b_sites.len() {
        (&a_sites, &b_sites)
    } else {
        (&b_sites, &a_sites)
    };
    let ds = d.pow(small.len() as u32);
    let dl = d.pow(large.len() as u32);
    let mut m = Mat::<Complex64>::zeros(ds, dl);
    for (c, &amp) in psi.amplitudes().iter().enumerate() {
        if amp == Complex64::new(0.0, 0.0) {
            continue;
        }
        let c = c as u64;
        let idx = |sites: &[usize]| sites.iter().fold(0usize, |acc, &s| acc * d + space.digit(c, s));
        m[(idx(small), idx(large))] = amp;
    }
    let rho = &m * m.adjoint();
    let mut w: Vec<f64> = linalg::eigvalsh(&rho)?.into_iter().map(|x| x.max(0.0)).collect();
    w.sort_by(|a, b| b.total_cmp(a));
    Ok(w)
}

/// Von Neumann entropy (natural log) of the reduced state on `subsystem`.
pub fn entanglement_entropy(space: &HilbertSpace, psi: &StateVector, subsystem: &[usize]) -> Result<f64> {
    let w = schmidt_weights(space, psi, subsystem)?;
    let total: f64 = w.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidParameter("state has zero norm".into()));
    }
    Ok(w.iter()
        .map(|&p| p / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum::<f64>()
        .max(0.0))
}

/// Sites `0..N/2`.
pub fn half_chain(space: &HilbertSpace) -> Vec<usize> {
    (0..space.num_sites() / 2).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{configuration_state, Boundary};
    use crate::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn equally_spaced_ratio_is_one() {
        let e: Vec<f64> = (0..100).map(|i| i as f64 * 0.3).collect();
        let r = level_spacing_ratio(&e).unwrap();
        assert!((r.mean - 1.0).abs() < 1e-12);
        assert_eq!(r.zero_fraction, 0.0);
    }

    #[test]
    fn degeneracies_give_zero_ratios() {
        let r = level_spacing_ratio(&[0.0, 1.0, 1.0, 2.0]).unwrap();
        assert_eq!(r.count, 2);
        assert_eq!(r.mean, 0.0);
        assert!((r.zero_fraction - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn poisson_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let e: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let r = level_spacing_ratio(&e).unwrap();
        // 2 ln 2 - 1
        assert!((r.mean - 0.3863).abs() < 0.01, "{}", r.mean);
    }

    #[test]
    fn goe_matrix() {
        use rand_distr::{Distribution, StandardNormal};
        let n = 2000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = StandardNormal.sample(&mut rng);
                let x = if i == j { x * std::f64::consts::SQRT_2 } else { x };
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        let (e, _) = linalg::eigh_real(&a).unwrap();
        let r = level_spacing_ratio(&e).unwrap();
        assert!(r.mean > 0.52 && r.mean < 0.545, "{}", r.mean);
        let h = spacing_histogram(&e, 30, 3.0).unwrap();
        let width = h.edges[1] - h.edges[0];
        let mass: f64 = h.densities.iter().sum::<f64>() * width;
        assert!(mass > 0.97 && mass <= 1.0 + 1e-12);
        // bulk agrees with the surmise
        let mid: f64 = h.densities[5..15].iter().sum::<f64>() / 10.0;
        let want: f64 = (5..15).map(|i| wigner_surmise((i as f64 + 0.5) * width)).sum::<f64>() / 10.0;
        assert!((mid - want).abs() < 0.1 * want);
    }

    #[test]
    fn histogram_integrates_to_one_without_tail() {
        let e: Vec<f64> = (0..400).map(|i| (i as f64).powf(1.3)).collect();
        let h = spacing_histogram(&e, 20, 10.0).unwrap();
        let width = h.edges[1] - h.edges[0];
        let mass: f64 = h.densities.iter().sum::<f64>() * width;
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn two_site_singlet_like_entropy() {
        let space = HilbertSpace::spin_one(2, Boundary::Open).unwrap();
        let a = configuration_state(&space, &[1, -1]).unwrap();
        let b = configuration_state(&space, &[-1, 1]).unwrap();
        let amps = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (x + y) * (0.5f64).sqrt()).collect();
        let psi = StateVector::from_amplitudes(amps);
        let s = entanglement_entropy(&space, &psi, &[0]).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-12);
        assert!(entanglement_entropy(&space, &a, &[1]).unwrap().abs() < 1e-12);
        assert!(entanglement_entropy(&space, &a, &[]).is_err());
        assert!(entanglement_entropy(&space, &a, &[0, 1]).is_err());
    }

    #[test]
    fn degenerate_cluster_scan_is_basis_independent() {
        // H = diag(0, 1, 1), O mixes the degenerate pair
        let h = SparseOperator::from_triplets(3, vec![(1, 1, c64(1.0, 0.0)), (2, 2, c64(1.0, 0.0))])
            .mark_hermitian(0.0)
            .unwrap();
        let o = SparseOperator::from_triplets(3, vec![(1, 2, c64(1.0, 0.0)), (2, 1, c64(1.0, 0.0))])
            .mark_hermitian(0.0)
            .unwrap();
        let spec = full_spectrum(&h, "toy", 10, true).unwrap();
        let scan = eigenstate_scan(&spec, &o).unwrap();
        assert_eq!(scan[0].value, 0.0);
        assert!((scan[1].value + 1.0).abs() < 1e-12 && (scan[2].value - 1.0).abs() < 1e-12);
        assert!(full_spectrum(&h, "toy", 2, false).is_err());
    }
}
