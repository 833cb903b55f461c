//! Brute-force dense constructions used as oracles. Everything here is built
//! from explicit matrices and Kronecker products, independently of the
//! operator-sum machinery in the library.

#![allow(dead_code)]

use faer::{Mat, Side};
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn zeros(n: usize) -> Mat<C> {
    Mat::from_fn(n, n, |_, _| c(0.0, 0.0))
}

pub fn eye(n: usize) -> Mat<C> {
    Mat::from_fn(n, n, |i, j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn mat(rows: &[&[C]]) -> Mat<C> {
    Mat::from_fn(rows.len(), rows.len(), |i, j| rows[i][j])
}

pub fn kron(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| a[(i / rb, j / cb)] * b[(i % rb, j % cb)])
}

pub fn add(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)])
}

pub fn scale(a: &Mat<C>, s: C) -> Mat<C> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn mul(a: &Mat<C>, b: &Mat<C>) -> Mat<C> {
    Mat::from_fn(a.nrows(), b.ncols(), |i, j| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

pub fn dagger(a: &Mat<C>) -> Mat<C> {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a[(j, i)].conj())
}

pub fn max_diff(a: &Mat<C>, b: &Mat<C>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Operator `op` on `site` of an `n`-site chain with local dimension `d`,
/// site 0 being the leftmost Kronecker factor.
pub fn on_site(n: usize, d: usize, site: usize, op: &Mat<C>) -> Mat<C> {
    let mut out = eye(1);
    for s in 0..n {
        out = kron(&out, &if s == site { op.clone() } else { eye(d) });
    }
    out
}

pub fn on_sites(n: usize, d: usize, ops: &[(usize, &Mat<C>)]) -> Mat<C> {
    let mut out = eye(1);
    for s in 0..n {
        let f = ops.iter().find(|(k, _)| *k == s).map(|(_, m)| (*m).clone()).unwrap_or_else(|| eye(d));
        out = kron(&out, &f);
    }
    out
}

pub fn sum_sites(n: usize, d: usize, op: &Mat<C>) -> Mat<C> {
    (0..n).fold(zeros(d.pow(n as u32)), |acc, s| add(&acc, &on_site(n, d, s, op)))
}

// Spin-1 in the basis (+1, 0, -1).
pub mod s1 {
    use super::*;

    pub fn plus() -> Mat<C> {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        mat(&[&[z, o, z], &[z, z, o], &[z, z, z]])
    }

    pub fn minus() -> Mat<C> {
        dagger(&plus())
    }

    pub fn z() -> Mat<C> {
        let zz = c(0.0, 0.0);
        mat(&[&[c(1.0, 0.0), zz, zz], &[zz, zz, zz], &[zz, zz, c(-1.0, 0.0)]])
    }

    pub fn x() -> Mat<C> {
        let (h, z) = (c(std::f64::consts::FRAC_1_SQRT_2, 0.0), c(0.0, 0.0));
        mat(&[&[z, h, z], &[h, z, h], &[z, h, z]])
    }

    pub fn y() -> Mat<C> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        mat(&[&[z, c(0.0, -h), z], &[c(0.0, h), z, c(0.0, -h)], &[z, c(0.0, h), z]])
    }

    /// `|+1><-1|`
    pub fn sigma_plus() -> Mat<C> {
        let mut m = zeros(3);
        m[(0, 2)] = c(1.0, 0.0);
        m
    }

    pub fn zero_proj() -> Mat<C> {
        let mut m = zeros(3);
        m[(1, 1)] = c(1.0, 0.0);
        m
    }

    /// `exp(i pi S)` for a spin-1 component with eigenvalues -1, 0, 1:
    /// `1 - 2 S^2`.
    pub fn pi_rotation(s: &Mat<C>) -> Mat<C> {
        add(&eye(3), &scale(&mul(s, s), c(-2.0, 0.0)))
    }
}

// Spin-1/2 in the basis (down, up).
pub mod s12 {
    use super::*;

    pub fn x() -> Mat<C> {
        let (o, z) = (c(1.0, 0.0), c(0.0, 0.0));
        mat(&[&[z, o], &[o, z]])
    }

    /// `sigma^y` in the (down, up) ordering.
    pub fn y() -> Mat<C> {
        let z = c(0.0, 0.0);
        mat(&[&[z, c(0.0, 1.0)], &[c(0.0, -1.0), z]])
    }

    /// `sigma^z` with `down = -1` first.
    pub fn z() -> Mat<C> {
        let z = c(0.0, 0.0);
        mat(&[&[c(-1.0, 0.0), z], &[z, c(1.0, 0.0)]])
    }

    pub fn up_proj() -> Mat<C> {
        let z = c(0.0, 0.0);
        mat(&[&[z, z], &[z, c(1.0, 0.0)]])
    }
}

pub fn ring_distance(n: usize, a: usize, b: usize, periodic: bool) -> usize {
    let d = a.abs_diff(b);
    if periodic {
        d.min(n - d)
    } else {
        d
    }
}

/// Oriented pair list `(from, to, weight)` for a symmetric strength
/// function: each unordered pair once, oriented along the shorter arc on a
/// ring, antipodal pairs split into two half-weight opposite bonds.
pub fn oriented_pairs(n: usize, periodic: bool, strength: impl Fn(usize, usize) -> f64) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let s = strength(a, b);
            if s == 0.0 {
                continue;
            }
            if !periodic {
                out.push((a, b, s));
                continue;
            }
            let fwd = b - a;
            let bwd = n - fwd;
            if fwd < bwd {
                out.push((a, b, s));
            } else if bwd < fwd {
                out.push((b, a, s));
            } else {
                out.push((a, b, 0.5 * s));
                out.push((b, a, 0.5 * s));
            }
        }
    }
    out
}

/// `(omega/2) sum S^z + sum lambda_ab (e^{i phi} S^+_a S^-_b + h.c.)
/// + D sum (S^z)^2 + (Omega/2) sum (e^{i eta} sigma^+ + h.c.) + sum Delta_n S^z_n`
#[allow(clippy::too_many_arguments)]
pub fn spin1_dense(
    n: usize,
    omega: f64,
    phi: f64,
    pairs: &[(usize, usize, f64)],
    d: f64,
    big_omega: f64,
    eta: f64,
    disorder: &[f64],
) -> Mat<C> {
    let dim = 3usize.pow(n as u32);
    let mut h = scale(&sum_sites(n, 3, &s1::z()), c(omega / 2.0, 0.0));
    let (p, m) = (s1::plus(), s1::minus());
    for &(a, b, s) in pairs {
        let t = scale(&on_sites(n, 3, &[(a, &p), (b, &m)]), C::from_polar(s, phi));
        h = add(&h, &add(&t, &dagger(&t)));
    }
    let z2 = mul(&s1::z(), &s1::z());
    h = add(&h, &scale(&sum_sites(n, 3, &z2), c(d, 0.0)));
    let t = scale(&sum_sites(n, 3, &s1::sigma_plus()), C::from_polar(big_omega / 2.0, eta));
    h = add(&h, &add(&t, &dagger(&t)));
    for (site, &delta) in disorder.iter().enumerate() {
        h = add(&h, &scale(&on_site(n, 3, site, &s1::z()), c(delta, 0.0)));
    }
    assert_eq!(h.nrows(), dim);
    h
}

/// XX and DMI parts written with `S^x, S^y`.
pub fn spin1_xx_dmi_dense(n: usize, pairs: &[(usize, usize, f64)]) -> (Mat<C>, Mat<C>) {
    let dim = 3usize.pow(n as u32);
    let (x, y) = (s1::x(), s1::y());
    let (mut xx, mut dmi) = (zeros(dim), zeros(dim));
    for &(a, b, s) in pairs {
        let w = c(s, 0.0);
        xx = add(&xx, &scale(&add(&on_sites(n, 3, &[(a, &x), (b, &x)]), &on_sites(n, 3, &[(a, &y), (b, &y)])), w));
        dmi = add(
            &dmi,
            &scale(&add(&on_sites(n, 3, &[(a, &x), (b, &y)]), &scale(&on_sites(n, 3, &[(a, &y), (b, &x)]), c(-1.0, 0.0))), w),
        );
    }
    (xx, dmi)
}

pub fn golden(d: usize) -> f64 {
    let g: f64 = (1.0 + 5.0f64.sqrt()) / 2.0;
    let k = d as f64 - 1.0;
    (g.powf(k) - g.powf(-k)).powi(-2)
}

/// `(omega/2) sum sigma^x + (Omega/2) sum sigma^z + (lambda/4) sum_nn sigma^z sigma^z + delta H`
pub fn mfi_dense(n: usize, periodic: bool, omega: f64, big_omega: f64, lambda: f64, eta: f64) -> Mat<C> {
    let (x, z) = (s12::x(), s12::z());
    let mut h = add(
        &scale(&sum_sites(n, 2, &x), c(omega / 2.0, 0.0)),
        &scale(&sum_sites(n, 2, &z), c(big_omega / 2.0, 0.0)),
    );
    let bonds: Vec<(usize, usize)> =
        if periodic { (0..n).map(|i| (i, (i + 1) % n)).collect() } else { (0..n - 1).map(|i| (i, i + 1)).collect() };
    for (a, b) in bonds {
        h = add(&h, &scale(&on_sites(n, 2, &[(a, &z), (b, &z)]), c(lambda / 4.0, 0.0)));
    }
    if eta != 0.0 {
        for site in 0..n {
            for d in 2..=n / 2 {
                let other = if periodic {
                    (site + d) % n
                } else if site + d < n {
                    site + d
                } else {
                    continue;
                };
                let w = c(eta / 4.0 * golden(d), 0.0);
                let t = add(&on_sites(n, 2, &[(site, &x), (other, &z)]), &on_sites(n, 2, &[(site, &z), (other, &x)]));
                h = add(&h, &scale(&t, w));
            }
        }
    }
    h
}

/// Eigen-decomposition by faer, used for dense reference propagation.
pub fn expm_minus_i(h: &Mat<C>, t: f64) -> Mat<C> {
    let evd = h.self_adjoint_eigen(Side::Lower).unwrap();
    let n = h.nrows();
    let u = evd.U();
    let s = evd.S();
    Mat::from_fn(n, n, |i, j| {
        (0..n).map(|k| u[(i, k)] * C::from_polar(1.0, -t * s[k].re) * u[(j, k)].conj()).sum()
    })
}

pub fn apply(m: &Mat<C>, v: &[C]) -> Vec<C> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

pub fn vec_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Half-chain entropy of the Dicke state `|N, s>` from the Vandermonde
/// split: Schmidt weights `C(A, k) C(N - A, s - k) / C(N, s)`.
pub fn dicke_entropy(n: usize, a: usize, s: usize) -> f64 {
    let total = binomial(n, s);
    (0..=s.min(a))
        .map(|k| binomial(a, k) * binomial(n - a, s - k) / total)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum()
}
