//! Brute-force check of the symmetry reduction.
//!
//! The machine is given its most general form on the boundary pair,
//!
//! ```text
//! U|s1>|_> = ξ1|s1 s1> + η1|s2 s2> + c11|c1> + c12|c2>
//! U|s2>|_> = η2|s1 s1> + ξ2|s2 s2> + c21|c1> + c22|c2>
//! ```
//!
//! with eight free complex amplitudes, and the global fidelity is maximized
//! under the unit-norm and overlap-preservation constraints without any
//! symmetry assumption. The fidelity and all four constraints are Hermitian
//! forms `a†Ha` in the amplitude vector `a`, which keeps gradients exact.

mod bfgs;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{complement_basis, expansion_coeffs, StateFamily};
use crate::form::discrete_form;
use crate::qubit::{inner_product, linear_combination, tensor_product, Ket, Ket4};
use crate::reduced::{optimize_reduced, Geometry};
use crate::scalar::Real;

pub use bfgs::{minimize, BfgsOptions, BfgsResult};

/// A point counts as feasible when every constraint residual is below this.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Scale of the normal distribution for random starting amplitudes.
const START_SCALE: f64 = 0.5;

/// All eight complex output amplitudes of a general machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullParams<T> {
    pub xi1: Complex<T>,
    pub eta1: Complex<T>,
    pub c11: Complex<T>,
    pub c12: Complex<T>,
    pub xi2: Complex<T>,
    pub eta2: Complex<T>,
    pub c21: Complex<T>,
    pub c22: Complex<T>,
}

impl<T: Real> FullParams<T> {
    pub fn zero() -> Self {
        Self::from_array([Complex::new(T::zero(), T::zero()); 8])
    }

    /// Embeds symmetric real parameters `v = (ξ, η, c)`.
    pub fn symmetric(v: &[T; 3]) -> Self {
        let r = |x: T| Complex::new(x, T::zero());
        Self::from_array([
            r(v[0]),
            r(v[1]),
            r(v[2]),
            r(T::zero()),
            r(v[0]),
            r(v[1]),
            r(v[2]),
            r(T::zero()),
        ])
    }

    /// Order: `ξ1, η1, c11, c12, ξ2, η2, c21, c22`.
    pub fn from_array(a: [Complex<T>; 8]) -> Self {
        Self {
            xi1: a[0],
            eta1: a[1],
            c11: a[2],
            c12: a[3],
            xi2: a[4],
            eta2: a[5],
            c21: a[6],
            c22: a[7],
        }
    }

    pub fn amplitudes(&self) -> [Complex<T>; 8] {
        [
            self.xi1, self.eta1, self.c11, self.c12, self.xi2, self.eta2, self.c21, self.c22,
        ]
    }

    /// Exchanges the roles of the two outputs: `ξ1↔ξ2, η1↔η2, c11↔c21, c12↔c22`.
    pub fn swapped(&self) -> Self {
        Self {
            xi1: self.xi2,
            eta1: self.eta2,
            c11: self.c21,
            c12: self.c22,
            xi2: self.xi1,
            eta2: self.eta1,
            c21: self.c11,
            c22: self.c12,
        }
    }

    /// Multiplies the first output by `e^{i·a}` and the second by `e^{i·b}`.
    pub fn rotated(&self, a: T, b: T) -> Self {
        let (pa, pb) = (
            Complex::from_polar(T::one(), a),
            Complex::from_polar(T::one(), b),
        );
        let x = self.amplitudes();
        Self::from_array(std::array::from_fn(|k| x[k] * if k < 4 { pa } else { pb }))
    }

    /// The two output states `(U|s1>|_>, U|s2>|_>)`.
    pub fn outputs(&self, family: &StateFamily<T>) -> (Ket4<T>, Ket4<T>) {
        let b = amplitude_basis(family);
        let a = self.amplitudes();
        let alpha = linear_combination(&a[..4], &b[..4]).unwrap();
        let beta = linear_combination(&a[4..], &b[4..]).unwrap();
        (alpha, beta)
    }

    fn to_reals(self) -> Vec<T> {
        self.amplitudes()
            .iter()
            .flat_map(|z| [z.re, z.im])
            .collect()
    }

    fn from_reals(x: &[T]) -> Self {
        Self::from_array(std::array::from_fn(|k| {
            Complex::new(x[2 * k], x[2 * k + 1])
        }))
    }
}

/// Two-qubit state multiplying each amplitude.
fn amplitude_basis<T: Real>(family: &StateFamily<T>) -> [Ket4<T>; 8] {
    let (s1, s2) = family.boundary();
    let s11 = tensor_product(s1, s1);
    let s22 = tensor_product(s2, s2);
    let (c1, c2) = complement_basis(family);
    [s11, s22, c1, c2, s22, s11, c1, c2]
}

/// `(p, q)` with `member = p·s1 + q·s2`; a collapsed family has every
/// member equal to `s1`.
fn member_coeffs<T: Real>(family: &StateFamily<T>, i: usize) -> (T, T) {
    if family.is_degenerate() {
        (T::one(), T::zero())
    } else {
        expansion_coeffs(family, i).expect("member index in range")
    }
}

/// Unit-norm and overlap residuals `(φ1, φ2, φ3, φ4)`:
/// `<α|α> - 1`, `<β|β> - 1`, `2 Re<α|β> - 2<s1|s2>`, `2 Im<α|β>`,
/// evaluated from the reconstructed output states.
pub fn constraint_residuals<T: Real>(p: &FullParams<T>, family: &StateFamily<T>) -> [T; 4] {
    let (alpha, beta) = p.outputs(family);
    let ab = inner_product(&alpha, &beta);
    let two = T::lit(2.0);
    [
        alpha.norm_sqr() - T::one(),
        beta.norm_sqr() - T::one(),
        two * ab.re - two * family.boundary_overlap(),
        two * ab.im,
    ]
}

/// The same residuals written out in the amplitudes, using
/// `<s1 s1|s2 s2> = <s1|s2>²` and the orthonormality of `c1`, `c2`.
pub fn constraint_residuals_expanded<T: Real>(
    p: &FullParams<T>,
    family: &StateFamily<T>,
) -> [T; 4] {
    let o = family.boundary_overlap();
    let o2 = o * o;
    let two = T::lit(2.0);
    // z* w + z w* = 2 Re(z* w); z* w - z w* = 2i Im(z* w).
    let re = |z: Complex<T>, w: Complex<T>| two * (z.conj() * w).re;
    let im = |z: Complex<T>, w: Complex<T>| two * (z.conj() * w).im;
    let FullParams {
        xi1,
        eta1,
        c11,
        c12,
        xi2,
        eta2,
        c21,
        c22,
    } = *p;
    let phi1 =
        xi1.norm_sqr() + eta1.norm_sqr() + c11.norm_sqr() + c12.norm_sqr() + re(xi1, eta1) * o2
            - T::one();
    let phi2 =
        xi2.norm_sqr() + eta2.norm_sqr() + c21.norm_sqr() + c22.norm_sqr() + re(xi2, eta2) * o2
            - T::one();
    let phi3 = re(xi1, eta2)
        + re(xi2, eta1)
        + re(c11, c21)
        + re(c12, c22)
        + (re(xi1, xi2) + re(eta1, eta2)) * o2
        - two * o;
    let phi4 = im(xi1, eta2) - im(xi2, eta1)
        + im(c11, c21)
        + im(c12, c22)
        + (im(xi1, xi2) + im(eta1, eta2)) * o2;
    [phi1, phi2, phi3, phi4]
}

fn max_residual<T: Real>(r: &[T; 4]) -> T {
    r.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// `(1/N) Σ_m |<ψ_m ψ_m| U |ψ_m>|²` over every family member, with
/// `U|ψ_m> = p_m·U|s1> + q_m·U|s2>` by linearity.
pub fn full_fidelity<T: Real>(p: &FullParams<T>, family: &StateFamily<T>) -> T {
    let (alpha, beta) = p.outputs(family);
    let total: T = family
        .members()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (pm, qm) = member_coeffs(family, i);
            let out = alpha
                .scale(Complex::new(pm, T::zero()))
                .add(&beta.scale(Complex::new(qm, T::zero())));
            inner_product(&tensor_product(&m.ket, &m.ket), &out).norm_sqr()
        })
        .sum();
    total / T::from_usize(family.n_states()).unwrap()
}

type Herm<T> = [[Complex<T>; 8]; 8];

/// Hermitian forms of the fidelity and the four constraints, with the
/// constants the constraints must equal.
struct Forms<T> {
    fidelity: Herm<T>,
    constraints: [Herm<T>; 4],
    targets: [T; 4],
}

impl<T: Real> Forms<T> {
    fn new(family: &StateFamily<T>) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let basis = amplitude_basis(family);
        let gram: Herm<T> =
            std::array::from_fn(|j| std::array::from_fn(|k| inner_product(&basis[j], &basis[k])));

        let mut fidelity = [[zero; 8]; 8];
        let w = T::one() / T::from_usize(family.n_states()).unwrap();
        for (i, m) in family.members().iter().enumerate() {
            let (pm, qm) = member_coeffs(family, i);
            let mm = tensor_product(&m.ket, &m.ket);
            let g: [Complex<T>; 8] = std::array::from_fn(|k| {
                let c = if k < 4 { pm } else { qm };
                inner_product(&mm, &basis[k]) * c
            });
            for j in 0..8 {
                for k in 0..8 {
                    fidelity[j][k] += g[j].conj() * g[k] * w;
                }
            }
        }

        let block = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| {
            let mut h = [[zero; 8]; 8];
            for j in rows.clone() {
                for k in cols.clone() {
                    h[j][k] = gram[j][k];
                }
            }
            h
        };
        let q = block(0..4, 4..8);
        let i = Complex::new(T::zero(), T::one());
        let phi3 = std::array::from_fn(|j| std::array::from_fn(|k| q[j][k] + q[k][j].conj()));
        let phi4 =
            std::array::from_fn(|j| std::array::from_fn(|k| -i * (q[j][k] - q[k][j].conj())));
        let two = T::lit(2.0);
        Self {
            fidelity,
            constraints: [block(0..4, 0..4), block(4..8, 4..8), phi3, phi4],
            targets: [
                T::one(),
                T::one(),
                two * family.boundary_overlap(),
                T::zero(),
            ],
        }
    }

    fn residuals(&self, x: &[T]) -> ([T; 4], [Vec<T>; 4]) {
        let mut r = [T::zero(); 4];
        let grads = std::array::from_fn(|i| {
            let (v, g) = herm_eval(&self.constraints[i], x);
            r[i] = v - self.targets[i];
            g
        });
        (r, grads)
    }
}

/// `a†Ha` and its gradient with respect to `(Re a_k, Im a_k)` interleaved.
fn herm_eval<T: Real>(h: &Herm<T>, x: &[T]) -> (T, Vec<T>) {
    let a: [Complex<T>; 8] = std::array::from_fn(|k| Complex::new(x[2 * k], x[2 * k + 1]));
    let mut value = T::zero();
    let mut grad = vec![T::zero(); 16];
    for j in 0..8 {
        let hv: Complex<T> = (0..8)
            .map(|k| h[j][k] * a[k])
            .fold(Complex::new(T::zero(), T::zero()), |s, t| s + t);
        value += (a[j].conj() * hv).re;
        grad[2 * j] = T::lit(2.0) * hv.re;
        grad[2 * j + 1] = T::lit(2.0) * hv.im;
    }
    (value, grad)
}

/// Solves the small dense system `m·y = b` by Gaussian elimination with
/// partial pivoting; `None` when a pivot vanishes.
fn solve_dense<T: Real>(mut m: [[T; 4]; 4], mut b: [T; 4]) -> Option<[T; 4]> {
    let scale = m.iter().flatten().fold(T::zero(), |s, &v| s.max(v.abs()));
    for col in 0..4 {
        let piv =
            (col..4).max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())?;
        if m[piv][col].abs() <= T::epsilon() * scale {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut y = [T::zero(); 4];
    for row in (0..4).rev() {
        let s: T = (row + 1..4).map(|k| m[row][k] * y[k]).sum();
        y[row] = (b[row] - s) / m[row][row];
    }
    Some(y)
}

/// Minimum-norm Newton steps onto the constraint set.
fn project<T: Real>(forms: &Forms<T>, mut x: Vec<T>) -> Vec<T> {
    for _ in 0..50 {
        let (r, j) = forms.residuals(&x);
        if max_residual(&r) <= T::epsilon() * T::lit(16.0) {
            break;
        }
        let jjt = std::array::from_fn(|a| {
            std::array::from_fn(|b| j[a].iter().zip(&j[b]).map(|(&p, &q)| p * q).sum())
        });
        let Some(y) = solve_dense(jjt, r) else { break };
        for (k, xk) in x.iter_mut().enumerate() {
            *xk -= (0..4).map(|i| j[i][k] * y[i]).sum::<T>();
        }
    }
    x
}

/// One local search: augmented Lagrangian rounds with escalating penalty,
/// each minimized by BFGS, then a projection onto the constraints.
fn local_search<T: Real>(forms: &Forms<T>, start: FullParams<T>) -> FullParams<T> {
    let mut x = start.to_reals();
    let mut lambda = [T::zero(); 4];
    let mut mu = T::lit(1e2);
    let opts = BfgsOptions {
        max_iters: 2000,
        grad_tol: T::tol(1e-11),
    };
    for _round in 0..12 {
        let objective = |x: &[T]| {
            let (f, gf) = herm_eval(&forms.fidelity, x);
            let (r, gr) = forms.residuals(x);
            let mut value = -f;
            let mut grad: Vec<T> = gf.iter().map(|&g| -g).collect();
            for i in 0..4 {
                value += lambda[i] * r[i] + mu * T::lit(0.5) * r[i] * r[i];
                let w = lambda[i] + mu * r[i];
                for (g, &d) in grad.iter_mut().zip(&gr[i]) {
                    *g += w * d;
                }
            }
            (value, grad)
        };
        x = minimize(x, opts, objective).x;
        let (r, _) = forms.residuals(&x);
        for i in 0..4 {
            lambda[i] += mu * r[i];
        }
        if max_residual(&r) <= T::tol(1e-12) {
            break;
        }
        mu = (mu * T::lit(10.0)).min(T::lit(1e8));
    }
    FullParams::from_reals(&project(forms, x))
}

#[derive(Debug, Clone)]
pub struct OracleOutcome<T> {
    pub params: FullParams<T>,
    pub fidelity: T,
    /// Largest constraint residual at `params`.
    pub residual: T,
    /// Index of the winning start; 0 is the symmetric embedding.
    pub start_index: usize,
    pub feasible_starts: usize,
    /// Best feasible fidelity among the random starts alone.
    pub best_random_fidelity: Option<T>,
}

/// Maximizes [`full_fidelity`] under the four constraints from `starts`
/// initial points: start 0 is the symmetric embedding of the reduced
/// optimum, the rest are drawn from a normal distribution seeded by `seed`.
/// Returns the best feasible local optimum; ties go to the lower index.
pub fn oracle_optimize<T: Real>(
    family: &StateFamily<T>,
    starts: usize,
    seed: u64,
) -> Result<OracleOutcome<T>> {
    if starts == 0 {
        return Err(Error::Usage("at least one start required".into()));
    }
    if family.is_degenerate() {
        return Err(Error::DegenerateFamily);
    }
    let reduced = optimize_reduced(&discrete_form(family)?, &Geometry::of_family(family))?;
    let mut points = vec![FullParams::symmetric(&reduced.params.vector())];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = T::lit(START_SCALE);
    for _ in 1..starts {
        let x: Vec<T> = (0..16)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                T::lit(z) * scale
            })
            .collect();
        points.push(FullParams::from_reals(&x));
    }

    let forms = Forms::new(family);
    let results: Vec<(FullParams<T>, T, T)> = points
        .into_par_iter()
        .map(|start| {
            let p = local_search(&forms, start);
            let r = max_residual(&constraint_residuals(&p, family));
            (p, full_fidelity(&p, family), r)
        })
        .collect();

    let feasible = |r: T| r < T::tol(FEASIBILITY_TOL);
    let best = results
        .iter()
        .enumerate()
        .filter(|(_, (_, _, r))| feasible(*r))
        .fold(None, |acc: Option<usize>, (i, (_, f, _))| match acc {
            Some(b) if results[b].1 >= *f => Some(b),
            _ => Some(i),
        });
    let Some(best) = best else {
        let closest = results.iter().map(|x| x.2).fold(T::infinity(), T::min);
        return Err(Error::Infeasible(format!(
            "none of {starts} starts reached the constraint set (smallest residual {closest})"
        )));
    };
    let (params, fidelity, residual) = results[best];
    Ok(OracleOutcome {
        params,
        fidelity,
        residual,
        start_index: best,
        feasible_starts: results.iter().filter(|x| feasible(x.2)).count(),
        best_random_fidelity: results[1..]
            .iter()
            .filter(|x| feasible(x.2))
            .map(|x| x.1)
            .fold(None, |acc: Option<T>, f| Some(acc.map_or(f, |a| a.max(f)))),
    })
}

/// Distance of a general machine from the symmetric real form, after
/// fixing each output's global phase so that `ξ1` and `ξ2` are real and
/// nonnegative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport<T> {
    pub xi_gap: T,
    pub eta_gap: T,
    pub c_gap: T,
    pub c12: T,
    pub c22: T,
    pub max_imag: T,
}

impl<T: Real> SymmetryReport<T> {
    pub fn entries(&self) -> [(&'static str, T); 6] {
        [
            ("|xi1 - xi2|", self.xi_gap),
            ("|eta1 - eta2|", self.eta_gap),
            ("|c11 - c21|", self.c_gap),
            ("|c12|", self.c12),
            ("|c22|", self.c22),
            ("max |Im|", self.max_imag),
        ]
    }

    pub fn max_entry(&self) -> T {
        self.entries().iter().fold(T::zero(), |m, e| m.max(e.1))
    }
}

pub fn symmetry_report<T: Real>(
    p: &FullParams<T>,
    family: &StateFamily<T>,
) -> Result<SymmetryReport<T>> {
    let r = max_residual(&constraint_residuals(p, family));
    if !(r < T::tol(FEASIBILITY_TOL)) {
        return Err(Error::Usage(format!(
            "symmetry report needs a feasible point (residual {r})"
        )));
    }
    let g = p.rotated(-p.xi1.arg(), -p.xi2.arg());
    Ok(SymmetryReport {
        xi_gap: (g.xi1 - g.xi2).norm(),
        eta_gap: (g.eta1 - g.eta2).norm(),
        c_gap: (g.c11 - g.c21).norm(),
        c12: g.c12.norm(),
        c22: g.c22.norm(),
        max_imag: g
            .amplitudes()
            .iter()
            .fold(T::zero(), |m, z| m.max(z.im.abs())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::build_family;
    use crate::reduced::optimize_family;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn random_params(rng: &mut ChaCha8Rng) -> FullParams<f64> {
        FullParams::from_array(std::array::from_fn(|_| {
            Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }))
    }

    #[test]
    fn expanded_residuals_match_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (n, phi) in [(2usize, 0.7f64), (3, 1.1), (4, 0.3), (7, 1.5)] {
            let f = build_family(n, phi).unwrap();
            for _ in 0..50 {
                let p = random_params(&mut rng);
                let a = constraint_residuals(&p, &f);
                let b = constraint_residuals_expanded(&p, &f);
                for i in 0..4 {
                    assert!(
                        (a[i] - b[i]).abs() < 1e-12,
                        "{n} {phi} phi{}: {} vs {}",
                        i + 1,
                        a[i],
                        b[i]
                    );
                }
            }
        }
    }

    #[test]
    fn single_amplitude_residuals() {
        let f = build_family(2, FRAC_PI_2).unwrap();
        let mut p = FullParams::zero();
        p.xi1 = Complex::new(1.0, 0.0);
        let r = constraint_residuals(&p, &f);
        assert!(r[0].abs() < 1e-15);
        assert!((r[1] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_point_is_infeasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = build_family(3, 0.8f64).unwrap();
        let p = random_params(&mut rng);
        assert!(max_residual(&constraint_residuals(&p, &f)) > 0.1);
    }

    #[test]
    fn embedding_is_feasible_and_reproduces_reduced_fidelity() {
        for (n, phi) in [(2usize, 0.9f64), (3, 1.2), (6, 0.5)] {
            let f = build_family(n, phi).unwrap();
            let o = optimize_family(n, phi).unwrap();
            let p = FullParams::symmetric(&o.params.vector());
            assert!(max_residual(&constraint_residuals(&p, &f)) < 1e-10);
            assert!((full_fidelity(&p, &f) - o.fidelity).abs() < 1e-12);
            assert!(symmetry_report(&p, &f).unwrap().max_entry() < 1e-12);
        }
    }

    #[test]
    fn zero_params_have_zero_fidelity() {
        let f = build_family(4, 1.0f64).unwrap();
        assert_eq!(full_fidelity(&FullParams::zero(), &f), 0.0);
    }

    #[test]
    fn hermitian_forms_match_direct_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (n, phi) in [(2usize, 0.6f64), (5, 1.3)] {
            let f = build_family(n, phi).unwrap();
            let forms = Forms::new(&f);
            for _ in 0..20 {
                let p = random_params(&mut rng);
                let x = p.to_reals();
                assert!((herm_eval(&forms.fidelity, &x).0 - full_fidelity(&p, &f)).abs() < 1e-12);
                let (r, _) = forms.residuals(&x);
                let d = constraint_residuals(&p, &f);
                for i in 0..4 {
                    assert!((r[i] - d[i]).abs() < 1e-12);
                }
                // gradient by central differences
                let (_, g) = herm_eval(&forms.fidelity, &x);
                for k in [0, 5, 11] {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += 1e-6;
                    xm[k] -= 1e-6;
                    let fd = (herm_eval(&forms.fidelity, &xp).0
                        - herm_eval(&forms.fidelity, &xm).0)
                        / 2e-6;
                    assert!((g[k] - fd).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn swap_and_gauge_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (n, phi) in [(4usize, 1.0f64), (5, 0.7)] {
            let f = build_family(n, phi).unwrap();
            for _ in 0..100 {
                let p = random_params(&mut rng);
                let base = full_fidelity(&p, &f);
                assert!((full_fidelity(&p.swapped(), &f) - base).abs() < 1e-12 * (1.0 + base));
                let t = rng.random_range(-3.0..3.0);
                assert!((full_fidelity(&p.rotated(t, t), &f) - base).abs() < 1e-12 * (1.0 + base));
            }
        }
    }

    #[test]
    fn gauge_invariance_on_feasible_points() {
        // Feasible points drawn by projecting random amplitudes.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = build_family(3, 0.9f64).unwrap();
        let forms = Forms::new(&f);
        let mut checked = 0;
        while checked < 100 {
            let p = FullParams::from_reals(&project(&forms, random_params(&mut rng).to_reals()));
            if max_residual(&constraint_residuals(&p, &f)) > 1e-10 {
                continue;
            }
            let t = rng.random_range(-3.0..3.0);
            let q = p.rotated(t, t);
            assert!((full_fidelity(&q, &f) - full_fidelity(&p, &f)).abs() < 1e-12);
            assert!(max_residual(&constraint_residuals(&q, &f)) < 1e-10);
            checked += 1;
        }
    }

    #[test]
    fn report_is_gauge_fixed() {
        let f = build_family(3, 1.0f64).unwrap();
        let o = optimize_family(3, 1.0f64).unwrap();
        let p = FullParams::symmetric(&o.params.vector()).rotated(0.8, 0.8);
        let r = symmetry_report(&p, &f).unwrap();
        assert!(r.max_entry() < 1e-12, "{r:?}");
    }

    #[test]
    fn report_rejects_infeasible_points() {
        let f = build_family(3, 1.0f64).unwrap();
        assert!(matches!(
            symmetry_report(&FullParams::zero(), &f),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn symmetric_start_alone() {
        let f = build_family(4, 1.1f64).unwrap();
        let o = optimize_family(4, 1.1f64).unwrap();
        let r = oracle_optimize(&f, 1, 0).unwrap();
        assert_eq!(r.start_index, 0);
        assert!(r.fidelity >= o.fidelity - 1e-10);
        assert!(r.best_random_fidelity.is_none());
    }

    #[test]
    fn oracle_agrees_with_reduction() {
        for n in [2usize, 3] {
            let f = build_family(n, FRAC_PI_3).unwrap();
            let reduced = optimize_family(n, FRAC_PI_3).unwrap().fidelity;
            let r = oracle_optimize(&f, 32, 7).unwrap();
            assert!(r.residual < 1e-8);
            assert!(
                (r.fidelity - reduced).abs() < 1e-4,
                "N={n}: {} vs {reduced}",
                r.fidelity
            );
            let random = r.best_random_fidelity.unwrap();
            assert!(
                (random - reduced).abs() < 1e-4,
                "N={n}: random {random} vs {reduced}"
            );
            let rep = symmetry_report(&r.params, &f).unwrap();
            assert!(rep.max_entry() < 1e-3, "{rep:?}");
        }
    }

    #[test]
    fn rejects_zero_starts() {
        let f = build_family(2, 1.0f64).unwrap();
        assert!(matches!(oracle_optimize(&f, 0, 1), Err(Error::Usage(_))));
    }

    #[test]
    fn dense_solver() {
        let m = [
            [4.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 2.0, 1.0],
            [0.0, 0.0, 1.0, 5.0f64],
        ];
        let y = solve_dense(m, [1.0, 2.0, 3.0, 4.0]).unwrap();
        for i in 0..4 {
            let s: f64 = (0..4).map(|k| m[i][k] * y[k]).sum();
            assert!((s - [1.0, 2.0, 3.0, 4.0][i]).abs() < 1e-14);
        }
        assert!(solve_dense([[0.0; 4]; 4], [1.0; 4]).is_none());
    }
}
