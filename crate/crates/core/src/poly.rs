//! Dense real polynomials and a companion-matrix root finder.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> Poly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn eval(&self, x: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(T::zero());
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize(k).unwrap())
                .collect(),
        )
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * k).collect())
    }

    /// Coefficient of `x^k` (zero past the end).
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).copied().unwrap_or_else(T::zero)
    }
}

impl<T: Real> Add for &Poly<T> {
    type Output = Poly<T>;
    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<T: Real> Sub for &Poly<T> {
    type Output = Poly<T>;
    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<T: Real> Mul for &Poly<T> {
    type Output = Poly<T>;
    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

/// A quartic `z4 η⁴ + z3 η³ + z2 η² + z1 η + z0`, stored highest degree
/// first. `degree` drops below 4 when leading coefficients vanish relative
/// to the largest one.
#[derive(Debug, Clone, PartialEq)]
pub struct Quartic<T> {
    pub z: [T; 5],
    pub degree: usize,
}

impl<T: Real> Quartic<T> {
    pub fn new(z: [T; 5]) -> Self {
        let scale = z.iter().fold(T::zero(), |m, c| m.max(c.abs()));
        let cut = scale * T::tol(1e-12);
        let degree = z
            .iter()
            .position(|c| c.abs() > cut)
            .map(|lead| 4 - lead)
            .unwrap_or(0);
        Self { z, degree }
    }

    /// Built from an ascending-order polynomial of degree at most four.
    pub fn from_poly(p: &Poly<T>) -> Self {
        Self::new([p.coeff(4), p.coeff(3), p.coeff(2), p.coeff(1), p.coeff(0)])
    }

    pub fn is_demoted(&self) -> bool {
        self.degree < 4
    }

    pub fn as_poly(&self) -> Poly<T> {
        Poly::new(self.z.iter().rev().copied().collect())
    }

    pub fn eval(&self, x: T) -> T {
        self.z.iter().fold(T::zero(), |acc, &c| acc * x + c)
    }

    pub fn max_coeff(&self) -> T {
        self.z.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot<T> {
    pub value: T,
    pub multiplicity: usize,
}

/// All real roots, ascending, from the eigenvalues of the companion matrix.
pub fn solve_quartic<T: Real>(q: &Quartic<T>) -> Result<Vec<RealRoot<T>>> {
    if q.z.iter().all(|c| *c == T::zero()) {
        return Err(Error::Usage(
            "all-zero polynomial has no isolated roots".into(),
        ));
    }
    let lead = 4 - q.degree;
    let coeffs: Vec<T> = q.z[lead..].to_vec();
    real_roots(&coeffs)
}

/// Real roots of a polynomial given highest degree first.
pub fn real_roots<T: Real>(desc: &[T]) -> Result<Vec<RealRoot<T>>> {
    let degree = desc.len().saturating_sub(1);
    if degree == 0 {
        return Ok(Vec::new());
    }
    let eig = companion_eigenvalues(desc)?;
    let poly = Poly::new(desc.iter().rev().copied().collect());

    let cluster = T::epsilon().cbrt() * T::lit(4.0);
    let mut reals: Vec<T> = eig
        .iter()
        .filter(|(re, im)| im.abs() <= cluster * (T::one() + re.abs()))
        .map(|(re, _)| *re)
        .collect();
    reals.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut roots: Vec<RealRoot<T>> = Vec::new();
    let mut i = 0;
    while i < reals.len() {
        let mut j = i + 1;
        while j < reals.len()
            && (reals[j] - reals[i]).abs() <= cluster * (T::one() + reals[i].abs())
        {
            j += 1;
        }
        let group = &reals[i..j];
        let mean = group.iter().copied().sum::<T>() / T::from_usize(group.len()).unwrap();
        let multiplicity = group.len();
        let mut target = poly.clone();
        for _ in 1..multiplicity {
            target = target.derivative();
        }
        roots.push(RealRoot {
            value: polish(&target, mean),
            multiplicity,
        });
        i = j;
    }
    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(roots)
}

/// Newton steps on `p`, keeping only those that reduce `|p|`.
pub fn polish<T: Real>(p: &Poly<T>, mut x: T) -> T {
    let dp = p.derivative();
    let mut fx = p.eval(x).abs();
    for _ in 0..8 {
        let d = dp.eval(x);
        if d == T::zero() || fx == T::zero() {
            break;
        }
        let cand = x - p.eval(x) / d;
        let fc = p.eval(cand).abs();
        if fc < fx {
            x = cand;
            fx = fc;
        } else {
            break;
        }
    }
    x
}

/// Eigenvalues `(re, im)` of the companion matrix of a polynomial given
/// highest degree first.
fn companion_eigenvalues<T: Real>(desc: &[T]) -> Result<Vec<(T, T)>> {
    let n = desc.len() - 1;
    let lead = desc[0];
    if lead == T::zero() {
        return Err(Error::Usage("leading coefficient is zero".into()));
    }
    let mut a = vec![vec![T::zero(); n]; n];
    for j in 0..n {
        a[0][j] = -desc[j + 1] / lead;
    }
    for i in 1..n {
        a[i][i - 1] = T::one();
    }
    balance(&mut a);
    hqr(a)
}

/// Similarity scaling by powers of the radix to equalize row and column norms.
fn balance<T: Real>(a: &mut [Vec<T>]) {
    let n = a.len();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[i][j] *= g;
                    }
                    for row in a.iter_mut() {
                        row[i] *= f;
                    }
                }
            }
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
#[allow(unused_assignments)]
fn hqr<T: Real>(mut a: Vec<Vec<T>>) -> Result<Vec<(T, T)>> {
    let n = a.len();
    let eps = T::epsilon();
    let mut wr = vec![T::zero(); n];
    let mut wi = vec![T::zero(); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
    let (mut x, mut y, mut z);
    let mut w;
    let mut s;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nnu = nn as usize;
            let mut l = nnu;
            while l > 0 {
                s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[l][l - 1].abs() <= eps * s {
                    a[l][l - 1] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = a[nnu][nnu];
            if l == nnu {
                wr[nnu] = x + t;
                wi[nnu] = T::zero();
                nn -= 1;
                break;
            }
            y = a[nnu - 1][nnu - 1];
            w = a[nnu][nnu - 1] * a[nnu - 1][nnu];
            if l == nnu - 1 {
                p = T::lit(0.5) * (y - x);
                q = p * p + w;
                z = q.abs().sqrt();
                x += t;
                if q >= T::zero() {
                    z = p + sign(z, p);
                    wr[nnu - 1] = x + z;
                    wr[nnu] = x + z;
                    if z != T::zero() {
                        wr[nnu] = x - w / z;
                    }
                    wi[nnu - 1] = T::zero();
                    wi[nnu] = T::zero();
                } else {
                    wr[nnu - 1] = x + p;
                    wr[nnu] = x + p;
                    wi[nnu - 1] = -z;
                    wi[nnu] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::Inconsistent("QR iteration did not converge".into()));
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=nnu {
                    a[i][i] -= x;
                }
                s = a[nnu][nnu - 1].abs() + a[nnu - 1][nnu - 2].abs();
                x = T::lit(0.75) * s;
                y = x;
                w = T::lit(-0.4375) * s * s;
            }
            its += 1;
            let mut m = nnu - 2;
            loop {
                z = a[m][m];
                r = x - z;
                s = y - z;
                p = (r * s - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - r - s;
                r = a[m + 2][m + 1];
                s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in m..nnu - 1 {
                a[i + 2][i] = T::zero();
                if i != m {
                    a[i + 2][i - 1] = T::zero();
                }
            }
            let mut k = m;
            while k < nnu {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = T::zero();
                    if k + 1 != nnu {
                        r = a[k + 2][k - 1];
                    }
                    x = p.abs() + q.abs() + r.abs();
                    if x != T::zero() {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != T::zero() {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=nnu {
                        p = a[k][j] + q * a[k + 1][j];
                        if k + 1 != nnu {
                            p += r * a[k + 2][j];
                            a[k + 2][j] -= p * z;
                        }
                        a[k + 1][j] -= p * y;
                        a[k][j] -= p * x;
                    }
                    let mmin = if nnu < k + 3 { nnu } else { k + 3 };
                    for i in l..=mmin {
                        p = x * a[i][k] + y * a[i][k + 1];
                        if k + 1 != nnu {
                            p += z * a[i][k + 2];
                            a[i][k + 2] -= p * r;
                        }
                        a[i][k + 1] -= p * q;
                        a[i][k] -= p;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).collect())
}
