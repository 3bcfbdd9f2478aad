//! Global fidelity as a quadratic form in the symmetric machine parameters.
//!
//! With the output states restricted to
//!
//! ```text
//! U|s1>|_> = ξ|s1 s1> + η|s2 s2> + c|c1>
//! U|s2>|_> = η|s1 s1> + ξ|s2 s2> + c|c1>
//! ```
//!
//! every clone overlap `<ψψ|U|ψ>` is linear in `v = (ξ, η, c)`, so the
//! averaged squared overlap is `vᵀ M v` with `M` an average of outer
//! products `u uᵀ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::family::{check_spread, complement_pair, expansion_coeffs, solve_in_plane, StateFamily};
use crate::quadrature::GaussLegendre;
use crate::qubit::{inner_product, linear_combination, tensor_product, Ket2, Ket4};
use crate::scalar::Real;

/// Default node count for the continuum mean value.
pub const CONTINUUM_NODES: usize = 64;

/// Coefficients of `<ψψ|U|ψ>` in `(ξ, η, c)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapVector<T> {
    pub u: [T; 3],
}

impl<T: Real> OverlapVector<T> {
    pub fn dot(&self, v: &[T; 3]) -> T {
        self.u[0] * v[0] + self.u[1] * v[1] + self.u[2] * v[2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormSource {
    Discrete(usize),
    Continuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm<T> {
    pub m: [[T; 3]; 3],
    pub source: FormSource,
}

impl<T: Real> QuadraticForm<T> {
    pub fn eval(&self, v: &[T; 3]) -> T {
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * self.m[i][j] * v[j];
            }
        }
        acc
    }

    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..i {
                worst = worst.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order (cyclic Jacobi).
    pub fn eigenvalues(&self) -> [T; 3] {
        symmetric_eigenvalues(self.m)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    fn from_vectors(us: impl Iterator<Item = (T, OverlapVector<T>)>, source: FormSource) -> Self {
        let mut m = [[T::zero(); 3]; 3];
        for (w, ov) in us {
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += w * ov.u[i] * ov.u[j];
                }
            }
        }
        Self { m, source }
    }
}

/// `u` for a state `member = p·s1 + q·s2`.
fn contract<T: Real>(
    member: &Ket2<T>,
    p: T,
    q: T,
    s1: &Ket2<T>,
    s2: &Ket2<T>,
    c1: &Ket4<T>,
) -> OverlapVector<T> {
    let o1 = inner_product(member, s1);
    let o2 = inner_product(member, s2);
    let (o1, o2) = (o1 * o1, o2 * o2);
    let mm = tensor_product(member, member);
    let oc = inner_product(&mm, c1);
    OverlapVector {
        u: [
            p * o1.re + q * o2.re,
            p * o2.re + q * o1.re,
            (p + q) * oc.re,
        ],
    }
}

pub fn overlap_vector<T: Real>(
    family: &StateFamily<T>,
    member_index: usize,
) -> Result<OverlapVector<T>> {
    let (p, q) = expansion_coeffs(family, member_index)?;
    let (s1, s2) = family.boundary();
    let (c1, _) = family_complement(family);
    Ok(contract(
        &family.members()[member_index].ket,
        p,
        q,
        s1,
        s2,
        &c1,
    ))
}

fn family_complement<T: Real>(family: &StateFamily<T>) -> (Ket4<T>, Ket4<T>) {
    crate::family::complement_basis(family)
}

/// `M = (1/N) Σ_m u_m u_mᵀ` over every member of the family.
///
/// Even-family `b_m` members are handled by the same contraction; with
/// symmetric parameters their vectors coincide with those of `a_m`.
pub fn discrete_form<T: Real>(family: &StateFamily<T>) -> Result<QuadraticForm<T>> {
    if family.is_degenerate() {
        return Err(Error::DegenerateFamily);
    }
    let w = T::one() / T::from_usize(family.n_states()).unwrap();
    let us = (0..family.n_states())
        .map(|i| overlap_vector(family, i).map(|u| (w, u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadraticForm::from_vectors(
        us.into_iter(),
        FormSource::Discrete(family.n_states()),
    ))
}

/// Overlap vector of `ψ(x)` for a machine defined on the pair `ψ(±phi/2)`.
pub fn continuum_overlap_vector<T: Real>(phi: T, x: T) -> Result<OverlapVector<T>> {
    let h = phi * T::lit(0.5);
    let s1 = Ket2::planar(h);
    let s2 = Ket2::planar(-h);
    let (c1, _) = complement_pair(h);
    let psi = Ket2::planar(x);
    let (p, q) = solve_in_plane(&s1, &s2, &psi)?;
    Ok(contract(&psi, p, q, &s1, &s2, &c1))
}

/// `M = (1/Φ) ∫_{-Φ/2}^{Φ/2} u(x) u(x)ᵀ dx` by Gauss–Legendre quadrature.
pub fn continuum_form<T: Real>(phi: T, node_count: usize) -> Result<QuadraticForm<T>> {
    check_spread(phi)?;
    if phi == T::zero() {
        return Err(Error::DegenerateFamily);
    }
    let rule = GaussLegendre::new(node_count)?;
    let h = phi * T::lit(0.5);
    // (1/Φ)·(Φ/2) = 1/2 per unit weight on [-1, 1].
    let us = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&t, &w)| continuum_overlap_vector(phi, h * t).map(|u| (w * T::lit(0.5), u)))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadraticForm::from_vectors(
        us.into_iter(),
        FormSource::Continuum,
    ))
}

/// Output states `(U|s1>, U|s2>)` of the symmetric machine `v = (ξ, η, c)`.
pub fn symmetric_outputs<T: Real>(family: &StateFamily<T>, v: &[T; 3]) -> (Ket4<T>, Ket4<T>) {
    let (s1, s2) = family.boundary();
    let (c1, _) = family_complement(family);
    outputs_from_parts(s1, s2, &c1, v)
}

/// Output states for a machine defined on the pair `ψ(±half_angle)`.
pub fn symmetric_outputs_at<T: Real>(half_angle: T, v: &[T; 3]) -> (Ket4<T>, Ket4<T>) {
    let s1 = Ket2::planar(half_angle);
    let s2 = Ket2::planar(-half_angle);
    let (c1, _) = complement_pair(half_angle);
    outputs_from_parts(&s1, &s2, &c1, v)
}

fn outputs_from_parts<T: Real>(
    s1: &Ket2<T>,
    s2: &Ket2<T>,
    c1: &Ket4<T>,
    v: &[T; 3],
) -> (Ket4<T>, Ket4<T>) {
    let c1 = *c1;
    let s11 = tensor_product(s1, s1);
    let s22 = tensor_product(s2, s2);
    let r = |x: T| Complex::new(x, T::zero());
    let alpha = linear_combination(&[r(v[0]), r(v[1]), r(v[2])], &[s11, s22, c1]).unwrap();
    let beta = linear_combination(&[r(v[1]), r(v[0]), r(v[2])], &[s11, s22, c1]).unwrap();
    (alpha, beta)
}

/// `<a_m a_m| U |a_m>` computed from explicit two-qubit kets, without the
/// overlap-vector contraction.
pub fn direct_member_overlap<T: Real>(
    family: &StateFamily<T>,
    member_index: usize,
    v: &[T; 3],
) -> Result<Complex<T>> {
    let (p, q) = expansion_coeffs(family, member_index)?;
    let (alpha, beta) = symmetric_outputs(family, v);
    let out = linear_combination(
        &[Complex::new(p, T::zero()), Complex::new(q, T::zero())],
        &[alpha, beta],
    )?;
    let m = &family.members()[member_index].ket;
    Ok(inner_product(&tensor_product(m, m), &out))
}

/// Eigenvalues of a symmetric 3×3 matrix, ascending.
pub(crate) fn symmetric_eigenvalues<T: Real>(mut a: [[T; 3]; 3]) -> [T; 3] {
    for _sweep in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    let mut ev = [a[0][0], a[1][1], a[2][2]];
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::build_family;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn random_v(rng: &mut ChaCha8Rng) -> [f64; 3] {
        [
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
            rng.random_range(-1.5..1.5),
        ]
    }

    #[test]
    fn boundary_member_vector() {
        for (n, phi) in [(2usize, 0.7f64), (3, 1.1), (6, 0.4)] {
            let f = build_family(n, phi).unwrap();
            let idx = f
                .members()
                .iter()
                .position(|m| (m.angle - f.half_angle()).abs() < 1e-15)
                .unwrap();
            let u = overlap_vector(&f, idx).unwrap();
            assert!((u.u[0] - 1.0).abs() < 1e-14);
            assert!((u.u[1] - phi.cos().powi(2)).abs() < 1e-14);
            // the complement state is orthogonal to the boundary product state
            assert!(u.u[2].abs() < 1e-15);
        }
    }

    #[test]
    fn centre_of_odd_family_is_symmetric() {
        let f = build_family(3, FRAC_PI_2).unwrap();
        let u = overlap_vector(&f, 1).unwrap();
        assert!((u.u[0] - u.u[1]).abs() < 1e-15);
    }

    #[test]
    fn even_member_matches_direct_overlap() {
        let f = build_family(4, 0.9).unwrap();
        let u = overlap_vector(&f, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let v = random_v(&mut rng);
            let direct = direct_member_overlap(&f, 0, &v).unwrap();
            assert!((u.dot(&v) - direct.re).abs() < 1e-12);
            assert!(direct.im.abs() < 1e-15);
        }
    }

    #[test]
    fn two_state_form_is_rank_one() {
        // Both members share u = (1, cos²Φ, 0) under the symmetric parametrization.
        let phi = 0.8f64;
        let f = build_family(2, phi).unwrap();
        let form = discrete_form(&f).unwrap();
        let u = [1.0, phi.cos().powi(2), 0.0];
        for i in 0..3 {
            for j in 0..3 {
                assert!((form.m[i][j] - u[i] * u[j]).abs() < 1e-14);
            }
        }
        assert_eq!(form.eval(&[0.0; 3]), 0.0);
    }

    #[test]
    fn odd_quarter_turn_form_by_hand() {
        // Members at -π/4, 0, π/4 with orthogonal boundaries. Both boundary
        // members give u = (1, 0, 0); the centre |0> has p = q = 1/√2 and
        // u = (1/√2, 1/√2, 1). Mirroring maps the symmetric machine onto
        // itself, so M₁₁ and M₂₂ differ.
        let form = discrete_form(&build_family(3, FRAC_PI_2).unwrap()).unwrap();
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let want = [
            [5.0 / 6.0, 1.0 / 6.0, a / 3.0],
            [1.0 / 6.0, 1.0 / 6.0, a / 3.0],
            [a / 3.0, a / 3.0, 1.0 / 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((form.m[i][j] - want[i][j]).abs() < 1e-15, "({i},{j})");
            }
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            discrete_form(&build_family(3, 0.0f64).unwrap()),
            Err(Error::DegenerateFamily)
        );
        assert_eq!(continuum_form(0.0f64, 64), Err(Error::DegenerateFamily));
        assert!(matches!(continuum_form(1.0f64, 1), Err(Error::Usage(_))));
        assert!(matches!(continuum_form(4.0f64, 64), Err(Error::Domain(_))));
    }

    #[test]
    fn continuum_is_converged_at_64_nodes() {
        for phi in [0.2f64, 1.0, 1.5, 2.5] {
            let a = continuum_form(phi, 64).unwrap();
            let b = continuum_form(phi, 128).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((a.m[i][j] - b.m[i][j]).abs() < 1e-13, "phi {phi} ({i},{j})");
                }
            }
            assert_eq!(a.eval(&[0.0; 3]), 0.0);
        }
    }

    #[test]
    fn dense_family_approaches_continuum() {
        // The member average includes both arc endpoints, so it differs from
        // the mean value by (endpoint average - mean)/(N - 1) + O(1/N²).
        let phi = 1.0f64;
        let cont = continuum_form(phi, 64).unwrap();
        let d401 = discrete_form(&build_family(401, phi).unwrap()).unwrap();
        let d801 = discrete_form(&build_family(801, phi).unwrap()).unwrap();
        let ends: Vec<_> = [-0.5, 0.5]
            .iter()
            .map(|&x| continuum_overlap_vector(phi, x).unwrap())
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let e401 = d401.m[i][j] - cont.m[i][j];
                let e801 = d801.m[i][j] - cont.m[i][j];
                assert!(e401.abs() < 1e-3, "({i},{j}) {e401}");
                let edge = 0.5 * (ends[0].u[i] * ends[0].u[j] + ends[1].u[i] * ends[1].u[j]);
                let predicted = (edge - d401.m[i][j]) / 400.0;
                assert!(
                    (e401 - predicted).abs() < 1e-5,
                    "({i},{j}) {e401} vs {predicted}"
                );
                if e401.abs() > 1e-8 {
                    assert!(
                        (e801 / e401 - 0.5).abs() < 0.01,
                        "({i},{j}) ratio {}",
                        e801 / e401
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_eigenvalues() {
        let m = [[2.0f64, 1.0, 0.0], [1.0, 2.0, 0.0], [0.0, 0.0, -1.0]];
        let ev = symmetric_eigenvalues(m);
        assert!((ev[0] + 1.0).abs() < 1e-15);
        assert!((ev[1] - 1.0).abs() < 1e-15);
        assert!((ev[2] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn grid_linearity_psd_and_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 2..=10 {
            for phi in [0.2, 0.6, 1.0, 1.4] {
                let f = build_family(n, phi).unwrap();
                let form = discrete_form(&f).unwrap();
                assert!(form.asymmetry() < 1e-14);
                assert!(form.min_eigenvalue() >= -1e-12);
                for _ in 0..100 {
                    let v = random_v(&mut rng);
                    let direct: f64 = (0..n)
                        .map(|i| direct_member_overlap(&f, i, &v).unwrap().norm_sqr())
                        .sum::<f64>()
                        / n as f64;
                    assert!((form.eval(&v) - direct).abs() < 1e-10);
                }
                // a_m ↔ b_m (even) and m ↔ -m (odd) are mirror images.
                let v = random_v(&mut rng);
                for (i, mi) in f.members().iter().enumerate() {
                    let j = f
                        .members()
                        .iter()
                        .position(|mj| (mj.angle + mi.angle).abs() < 1e-14)
                        .unwrap();
                    let fi = direct_member_overlap(&f, i, &v).unwrap().norm_sqr();
                    let fj = direct_member_overlap(&f, j, &v).unwrap().norm_sqr();
                    assert!((fi - fj).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_precision_form() {
        let f = build_family(5, 0.8f32).unwrap();
        let form = discrete_form(&f).unwrap();
        assert!(form.min_eigenvalue() > -1e-5);
        let f64form = discrete_form(&build_family(5, 0.8f64).unwrap()).unwrap();
        assert!((form.m[0][0] as f64 - f64form.m[0][0]).abs() < 1e-5);
    }
}
