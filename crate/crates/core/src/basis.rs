//! Many-body Hilbert spaces of spin chains, product states and
//! symmetry-reduced sectors.
//!
//! Basis configurations are encoded as base-`d` integers with site 0 as the
//! most significant digit. Local states are ordered
//!
//! * spin-1: `m = +1, 0, -1` (local indices 0, 1, 2),
//! * spin-1/2: `down, up` (local indices 0, 1).
//!
//! Magnetization labels are integers: `m` for spin-1 and the `sigma^z`
//! eigenvalue `+-1` for spin-1/2.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg;
use crate::{Error, Result};

/// Largest full Hilbert-space dimension we are willing to enumerate.
pub const MAX_FULL_DIM: u64 = 1 << 34;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalDim {
    SpinHalf,
    SpinOne,
}

impl LocalDim {
    pub fn dim(self) -> usize {
        match self {
            LocalDim::SpinHalf => 2,
            LocalDim::SpinOne => 3,
        }
    }

    /// Integer magnetization label of the local state with index `index`.
    #[inline]
    pub fn charge(self, index: usize) -> i32 {
        match self {
            LocalDim::SpinOne => 1 - index as i32,
            LocalDim::SpinHalf => 2 * index as i32 - 1,
        }
    }

    /// Local index of the state with magnetization label `charge`.
    pub fn index_of_charge(self, charge: i32) -> Option<usize> {
        (0..self.dim()).find(|&i| self.charge(i) == charge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSpace {
    num_sites: usize,
    local: LocalDim,
    boundary: Boundary,
    dim: u64,
    place: Vec<u64>,
}

impl HilbertSpace {
    pub fn new(num_sites: usize, local: LocalDim, boundary: Boundary) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidSpace("a chain needs at least one site".into()));
        }
        let d = local.dim() as u64;
        let mut dim: u64 = 1;
        for _ in 0..num_sites {
            dim = dim
                .checked_mul(d)
                .filter(|&v| v <= MAX_FULL_DIM)
                .ok_or_else(|| {
                    Error::InvalidSpace(format!(
                        "{num_sites} sites of local dimension {d} exceed the enumeration limit"
                    ))
                })?;
        }
        let place = (0..num_sites)
            .map(|n| d.pow((num_sites - 1 - n) as u32))
            .collect();
        Ok(Self {
            num_sites,
            local,
            boundary,
            dim,
            place,
        })
    }

    pub fn spin_one(num_sites: usize, boundary: Boundary) -> Result<Self> {
        Self::new(num_sites, LocalDim::SpinOne, boundary)
    }

    pub fn spin_half(num_sites: usize, boundary: Boundary) -> Result<Self> {
        Self::new(num_sites, LocalDim::SpinHalf, boundary)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn local(&self) -> LocalDim {
        self.local
    }

    pub fn local_dim(&self) -> usize {
        self.local.dim()
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Full dimension `d^N`.
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn place(&self, site: usize) -> u64 {
        self.place[site]
    }

    #[inline]
    pub fn digit(&self, config: u64, site: usize) -> usize {
        ((config / self.place[site]) % self.local.dim() as u64) as usize
    }

    #[inline]
    pub fn with_digit(&self, config: u64, site: usize, value: usize) -> u64 {
        let old = self.digit(config, site) as u64;
        config - old * self.place[site] + value as u64 * self.place[site]
    }

    pub fn digits(&self, config: u64) -> Vec<u8> {
        (0..self.num_sites)
            .map(|n| self.digit(config, n) as u8)
            .collect()
    }

    pub fn from_digits(&self, digits: &[u8]) -> Result<u64> {
        if digits.len() != self.num_sites {
            return Err(Error::DimensionMismatch {
                expected: self.num_sites,
                found: digits.len(),
            });
        }
        let d = self.local.dim() as u8;
        let mut config = 0u64;
        for (n, &v) in digits.iter().enumerate() {
            if v >= d {
                return Err(Error::InvalidParameter(format!(
                    "local index {v} out of range at site {n}"
                )));
            }
            config += v as u64 * self.place[n];
        }
        Ok(config)
    }

    pub fn label(&self, config: u64) -> BasisLabel {
        BasisLabel {
            local: self.local,
            digits: self.digits(config),
        }
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<u64> {
        self.from_digits(&label.digits)
    }

    /// Sum of the integer magnetization labels of all sites.
    #[inline]
    pub fn charge(&self, config: u64) -> i32 {
        let d = self.local.dim() as u64;
        let mut c = config;
        let mut total = 0;
        for _ in 0..self.num_sites {
            total += self.local.charge((c % d) as usize);
            c /= d;
        }
        total
    }

    /// Number of spin-1 sites in `m = 0`; always zero for spin-1/2.
    #[inline]
    pub fn zero_count(&self, config: u64) -> usize {
        if self.local == LocalDim::SpinHalf {
            return 0;
        }
        let mut c = config;
        let mut count = 0;
        for _ in 0..self.num_sites {
            if c % 3 == 1 {
                count += 1;
            }
            c /= 3;
        }
        count
    }

    /// Applies a site permutation: the digit at site `n` moves to `perm[n]`.
    #[inline]
    pub fn permute(&self, config: u64, perm: &[usize]) -> u64 {
        let mut out = 0u64;
        for (n, &target) in perm.iter().enumerate() {
            out += self.digit(config, n) as u64 * self.place[target];
        }
        out
    }

    /// Ring distance between two sites (open chains use `|n - n'|`).
    pub fn distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        match self.boundary {
            Boundary::Periodic => d.min(self.num_sites - d),
            Boundary::Open => d,
        }
    }
}

/// Per-site local indices of one basis configuration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub local: LocalDim,
    pub digits: Vec<u8>,
}

impl BasisLabel {
    pub fn quantum_numbers(&self) -> Vec<i32> {
        self.digits
            .iter()
            .map(|&v| self.local.charge(v as usize))
            .collect()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.digits {
            let c = match (self.local, v) {
                (LocalDim::SpinOne, 0) => '+',
                (LocalDim::SpinOne, 1) => '0',
                (LocalDim::SpinOne, _) => '-',
                (LocalDim::SpinHalf, 0) => 'd',
                (LocalDim::SpinHalf, _) => 'u',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Quantum-number labels selecting a subspace.
///
/// `momentum` is the integer `k` of the translation eigenvalue
/// `exp(2 pi i k / L)` under a shift by `translation_step` sites, where
/// `L = N / translation_step`. `reflection` is the parity under the
/// site-centred mirror `n -> -n mod N` (periodic) or `n -> N - 1 - n` (open).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymmetrySector {
    pub magnetization: Option<i32>,
    pub momentum: Option<usize>,
    pub translation_step: Option<usize>,
    pub reflection: Option<i8>,
    pub number_parity: Option<i8>,
}

impl SymmetrySector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_magnetization(mut self, m: i32) -> Self {
        self.magnetization = Some(m);
        self
    }

    pub fn with_momentum(mut self, k: usize) -> Self {
        self.momentum = Some(k);
        self
    }

    pub fn with_translation_step(mut self, step: usize) -> Self {
        self.translation_step = Some(step);
        self
    }

    pub fn with_reflection(mut self, parity: i8) -> Self {
        self.reflection = Some(parity);
        self
    }

    pub fn with_number_parity(mut self, parity: i8) -> Self {
        self.number_parity = Some(parity);
        self
    }

    pub fn is_trivial(&self) -> bool {
        self.magnetization.is_none()
            && self.momentum.is_none()
            && self.reflection.is_none()
            && self.number_parity.is_none()
    }

    fn has_group(&self) -> bool {
        self.momentum.is_some() || self.reflection.is_some()
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(m) = self.magnetization {
            parts.push(format!("M={m}"));
        }
        if let Some(k) = self.momentum {
            match self.translation_step {
                Some(s) if s != 1 => parts.push(format!("k={k}(step {s})")),
                _ => parts.push(format!("k={k}")),
            }
        }
        if let Some(p) = self.reflection {
            parts.push(format!("R={p:+}"));
        }
        if let Some(p) = self.number_parity {
            parts.push(format!("P0={p:+}"));
        }
        if parts.is_empty() {
            "full".into()
        } else {
            parts.join(",")
        }
    }

    fn validate(&self, space: &HilbertSpace) -> Result<()> {
        for (name, p) in [("reflection", self.reflection), ("number_parity", self.number_parity)] {
            if let Some(p) = p {
                if p != 1 && p != -1 {
                    return Err(Error::InvalidSector(format!("{name} must be +1 or -1, got {p}")));
                }
            }
        }
        let n = space.num_sites();
        if let Some(k) = self.momentum {
            if space.boundary() != Boundary::Periodic {
                return Err(Error::InvalidSector(
                    "momentum sectors need periodic boundaries".into(),
                ));
            }
            let step = self.translation_step.unwrap_or(1);
            if step == 0 || n % step != 0 {
                return Err(Error::InvalidSector(format!(
                    "translation step {step} does not divide {n} sites"
                )));
            }
            let period = n / step;
            if k >= period {
                return Err(Error::InvalidSector(format!(
                    "momentum {k} out of range 0..{period}"
                )));
            }
            if self.reflection.is_some() && (2 * k) % period != 0 {
                return Err(Error::InvalidSector(format!(
                    "reflection parity is only defined at k = 0 or k = {}/2",
                    period
                )));
            }
        }
        Ok(())
    }
}

struct GroupElement {
    perm: Vec<usize>,
    character: Complex64,
}

fn symmetry_group(space: &HilbertSpace, sector: &SymmetrySector) -> Vec<GroupElement> {
    let n = space.num_sites();
    let mirror: Vec<usize> = match space.boundary() {
        Boundary::Periodic => (0..n).map(|i| (n - i) % n).collect(),
        Boundary::Open => (0..n).map(|i| n - 1 - i).collect(),
    };
    let mut elements = Vec::new();
    match sector.momentum {
        Some(k) => {
            let step = sector.translation_step.unwrap_or(1);
            let period = n / step;
            for j in 0..period {
                let shift: Vec<usize> = (0..n).map(|i| (i + j * step) % n).collect();
                let character = Complex64::from_polar(1.0, 2.0 * PI * (k * j) as f64 / period as f64);
                if let Some(p) = sector.reflection {
                    // reflect first, then shift
                    let composed: Vec<usize> = (0..n).map(|i| shift[mirror[i]]).collect();
                    elements.push(GroupElement {
                        perm: composed,
                        character: character * p as f64,
                    });
                }
                elements.push(GroupElement {
                    perm: shift,
                    character,
                });
            }
        }
        None => {
            elements.push(GroupElement {
                perm: (0..n).collect(),
                character: Complex64::new(1.0, 0.0),
            });
            if let Some(p) = sector.reflection {
                elements.push(GroupElement {
                    perm: mirror,
                    character: Complex64::new(p as f64, 0.0),
                });
            }
        }
    }
    elements
}

/// One symmetry-adapted basis vector, stored by its expansion over
/// configurations.
#[derive(Clone, Debug)]
pub struct SymmetricState {
    pub representative: u64,
    pub orbit_size: usize,
    /// Unnormalized squared norm of the character-weighted orbit sum divided
    /// by the group order.
    pub normalization: f64,
    pub support: Vec<(u64, Complex64)>,
}

/// An enumerated basis element: the representative configuration and its
/// normalization data.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisEntry {
    pub label: BasisLabel,
    pub representative: u64,
    pub orbit_size: usize,
    pub normalization: f64,
}

#[derive(Clone, Debug)]
enum BasisKind {
    Full,
    Explicit {
        states: Vec<SymmetricState>,
        lookup: HashMap<u64, (u32, Complex64)>,
    },
}

/// A working basis: the full space, a symmetry sector, or a constrained
/// subspace of product configurations.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    space: HilbertSpace,
    sector: SymmetrySector,
    kind: BasisKind,
}

impl SectorBasis {
    pub fn full(space: &HilbertSpace) -> Self {
        Self {
            space: space.clone(),
            sector: SymmetrySector::default(),
            kind: BasisKind::Full,
        }
    }

    pub fn new(space: &HilbertSpace, sector: &SymmetrySector) -> Result<Self> {
        sector.validate(space)?;
        if sector.is_trivial() {
            return Ok(Self::full(space));
        }
        let passes = |c: u64| -> bool {
            if let Some(m) = sector.magnetization {
                if space.charge(c) != m {
                    return false;
                }
            }
            if let Some(p) = sector.number_parity {
                let parity = if space.zero_count(c) % 2 == 0 { 1 } else { -1 };
                if parity != p {
                    return false;
                }
            }
            true
        };
        let states = if sector.has_group() {
            build_orbits(space, &symmetry_group(space, sector), passes)
        } else {
            single_configs(space, passes)
        };
        Ok(Self::from_states(space, sector.clone(), states))
    }

    /// Subspace spanned by the configurations accepted by `keep`.
    pub fn constrained(space: &HilbertSpace, keep: impl Fn(u64) -> bool) -> Self {
        let states = single_configs(space, keep);
        Self::from_states(space, SymmetrySector::default(), states)
    }

    fn from_states(space: &HilbertSpace, sector: SymmetrySector, states: Vec<SymmetricState>) -> Self {
        let mut lookup = HashMap::with_capacity(states.iter().map(|s| s.support.len()).sum());
        for (i, s) in states.iter().enumerate() {
            for &(c, a) in &s.support {
                lookup.insert(c, (i as u32, a));
            }
        }
        Self {
            space: space.clone(),
            sector,
            kind: BasisKind::Explicit { states, lookup },
        }
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn sector(&self) -> &SymmetrySector {
        &self.sector
    }

    pub fn is_full(&self) -> bool {
        matches!(self.kind, BasisKind::Full)
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            BasisKind::Full => self.space.dim(),
            BasisKind::Explicit { states, .. } => states.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    /// Basis index and expansion amplitude of a configuration, if it lies in
    /// the support of some basis vector.
    #[inline]
    pub fn locate(&self, config: u64) -> Option<(usize, Complex64)> {
        match &self.kind {
            BasisKind::Full => Some((config as usize, Complex64::new(1.0, 0.0))),
            BasisKind::Explicit { lookup, .. } => {
                lookup.get(&config).map(|&(i, a)| (i as usize, a))
            }
        }
    }

    /// Calls `f(config, amplitude)` for each configuration in basis vector `i`.
    #[inline]
    pub fn for_each_support(&self, i: usize, mut f: impl FnMut(u64, Complex64)) {
        match &self.kind {
            BasisKind::Full => f(i as u64, Complex64::new(1.0, 0.0)),
            BasisKind::Explicit { states, .. } => {
                for &(c, a) in &states[i].support {
                    f(c, a);
                }
            }
        }
    }

    pub fn representative(&self, i: usize) -> u64 {
        match &self.kind {
            BasisKind::Full => i as u64,
            BasisKind::Explicit { states, .. } => states[i].representative,
        }
    }

    pub fn entries(&self) -> Vec<BasisEntry> {
        match &self.kind {
            BasisKind::Full => (0..self.space.dim() as u64)
                .map(|c| BasisEntry {
                    label: self.space.label(c),
                    representative: c,
                    orbit_size: 1,
                    normalization: 1.0,
                })
                .collect(),
            BasisKind::Explicit { states, .. } => states
                .iter()
                .map(|s| BasisEntry {
                    label: self.space.label(s.representative),
                    representative: s.representative,
                    orbit_size: s.orbit_size,
                    normalization: s.normalization,
                })
                .collect(),
        }
    }

    /// Expands a sector vector into the full configuration basis.
    pub fn embed(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), psi.dim())?;
        if self.is_full() {
            return Ok(psi.clone());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.space.dim()];
        for (i, &a) in psi.amplitudes().iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            self.for_each_support(i, |c, w| out[c as usize] += a * w);
        }
        Ok(StateVector::from_amplitudes(out))
    }

    /// Coefficients `<b_i|psi>` of a full-space vector (not renormalized).
    pub fn restrict(&self, psi: &StateVector) -> Result<StateVector> {
        check_dim(self.space.dim(), psi.dim())?;
        if self.is_full() {
            return Ok(psi.clone());
        }
        let amps = psi.amplitudes();
        let out = (0..self.dim())
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                self.for_each_support(i, |c, w| acc += w.conj() * amps[c as usize]);
                acc
            })
            .collect();
        Ok(StateVector::from_amplitudes(out))
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

fn single_configs(space: &HilbertSpace, keep: impl Fn(u64) -> bool) -> Vec<SymmetricState> {
    (0..space.dim() as u64)
        .filter(|&c| keep(c))
        .map(|c| SymmetricState {
            representative: c,
            orbit_size: 1,
            normalization: 1.0,
            support: vec![(c, Complex64::new(1.0, 0.0))],
        })
        .collect()
}

fn build_orbits(
    space: &HilbertSpace,
    group: &[GroupElement],
    keep: impl Fn(u64) -> bool,
) -> Vec<SymmetricState> {
    let dim = space.dim();
    let mut visited = vec![false; dim];
    let mut states = Vec::new();
    let mut acc: Vec<(u64, Complex64)> = Vec::with_capacity(group.len());
    for c in 0..dim as u64 {
        if visited[c as usize] || !keep(c) {
            continue;
        }
        acc.clear();
        for g in group {
            let image = space.permute(c, &g.perm);
            visited[image as usize] = true;
            let w = g.character.conj();
            match acc.iter_mut().find(|(x, _)| *x == image) {
                Some(entry) => entry.1 += w,
                None => acc.push((image, w)),
            }
        }
        let orbit_size = acc.len();
        let norm_sq: f64 = acc.iter().map(|(_, a)| a.norm_sqr()).sum();
        if norm_sq < 1e-8 {
            continue;
        }
        let scale = 1.0 / norm_sq.sqrt();
        let mut support: Vec<(u64, Complex64)> = acc
            .iter()
            .filter(|(_, a)| a.norm_sqr() > 1e-20)
            .map(|&(x, a)| (x, a * scale))
            .collect();
        support.sort_by_key(|&(x, _)| x);
        states.push(SymmetricState {
            representative: c,
            orbit_size,
            normalization: norm_sq / group.len() as f64,
            support,
        });
    }
    states
}

/// Enumerates the basis of `space`, optionally restricted to `sector`, in
/// ascending configuration order.
pub fn enumerate_basis(space: &HilbertSpace, sector: Option<&SymmetrySector>) -> Result<Vec<BasisEntry>> {
    let basis = match sector {
        Some(s) => SectorBasis::new(space, s)?,
        None => SectorBasis::full(space),
    };
    Ok(basis.entries())
}

/// Complex amplitude vector over some working basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes without normalizing.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        Self { amplitudes }
    }

    /// Wraps and normalizes; fails on the zero vector.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let mut s = Self { amplitudes };
        let n = s.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidParameter("cannot normalize a zero vector".into()));
        }
        s.scale(Complex64::new(1.0 / n, 0.0));
        Ok(s)
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.amplitudes)
    }

    pub fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        linalg::inner(&self.amplitudes, &other.amplitudes)
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        linalg::distance(&self.amplitudes, &other.amplitudes)
    }
}

/// Tensor product of per-site kets (site 0 first).
pub fn product_state(space: &HilbertSpace, kets: &[Vec<Complex64>]) -> Result<StateVector> {
    if kets.len() != space.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: space.num_sites(),
            found: kets.len(),
        });
    }
    let d = space.local_dim();
    for (n, ket) in kets.iter().enumerate() {
        if ket.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: ket.len(),
            });
        }
        let nrm = linalg::norm(ket);
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "local ket at site {n} has norm {nrm}"
            )));
        }
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for ket in kets {
        let mut next = Vec::with_capacity(amps.len() * d);
        for a in &amps {
            for k in ket {
                next.push(a * k);
            }
        }
        amps = next;
    }
    Ok(StateVector::from_amplitudes(amps))
}

/// Same local ket on every site.
pub fn uniform_product_state(space: &HilbertSpace, ket: &[Complex64]) -> Result<StateVector> {
    product_state(space, &vec![ket.to_vec(); space.num_sites()])
}

/// Computational basis state from per-site magnetization labels.
pub fn configuration_state(space: &HilbertSpace, charges: &[i32]) -> Result<StateVector> {
    if charges.len() != space.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: space.num_sites(),
            found: charges.len(),
        });
    }
    let digits = charges
        .iter()
        .map(|&q| {
            space
                .local()
                .index_of_charge(q)
                .map(|i| i as u8)
                .ok_or_else(|| Error::InvalidParameter(format!("no local state with label {q}")))
        })
        .collect::<Result<Vec<u8>>>()?;
    let c = space.from_digits(&digits)?;
    Ok(StateVector::basis_state(space.dim(), c as usize))
}

/// Spin-1 state with every site in `(|+1> + |-1>)/sqrt(2)`.
pub fn plus_state(space: &HilbertSpace) -> Result<StateVector> {
    if space.local() != LocalDim::SpinOne {
        return Err(Error::InvalidSpace("the plus state is defined for spin-1 chains".into()));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    uniform_product_state(
        space,
        &[Complex64::new(h, 0.0), Complex64::new(0.0, 0.0), Complex64::new(h, 0.0)],
    )
}

/// Spin-1/2 Neel state `up, down, up, down, ...`.
pub fn neel_state(space: &HilbertSpace) -> Result<StateVector> {
    let charges: Vec<i32> = (0..space.num_sites())
        .map(|n| if n % 2 == 0 { 1 } else { -1 })
        .collect();
    configuration_state(space, &charges)
}

/// Every site in its lowest magnetization state.
pub fn polarized_down(space: &HilbertSpace) -> Result<StateVector> {
    configuration_state(space, &vec![-1; space.num_sites()])
}

/// Normalized projection of a full-space state onto a sector.
#[derive(Clone, Debug)]
pub struct Projection {
    /// `None` when the state has no weight in the sector.
    pub state: Option<StateVector>,
    pub weight: f64,
}

pub fn sector_project(psi: &StateVector, basis: &SectorBasis) -> Result<Projection> {
    let coeffs = basis.restrict(psi)?;
    let weight = coeffs.amplitudes().iter().map(|a| a.norm_sqr()).sum::<f64>();
    let state = if weight > 1e-28 {
        let mut s = coeffs;
        s.scale(Complex64::new(1.0 / weight.sqrt(), 0.0));
        Some(s)
    } else {
        None
    };
    Ok(Projection { state, weight })
}
