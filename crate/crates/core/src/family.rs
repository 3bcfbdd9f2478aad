//! Families of `N` equally spaced coplanar qubit states.
//!
//! Even families (`N = 2n`) place states at `±(m - 1/2)θ` for `m = 1..n`;
//! odd families (`N = 2n + 1`) place them at `mθ` for `m = -n..n`. In both
//! cases `θ = Φ / (N - 1)` so the extreme members are exactly `Φ` apart.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qubit::{inner_product, tensor_product, Ket2, Ket4};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Name of a family member, `a_m` or `b_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberLabel {
    A(i64),
    B(i64),
}

impl fmt::Display for MemberLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MemberLabel::A(m) => write!(f, "a_{m}"),
            MemberLabel::B(m) => write!(f, "b_{m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Member<T> {
    pub label: MemberLabel,
    /// Angle from `|0>` towards `|1>`, radians.
    pub angle: T,
    pub ket: Ket2<T>,
}

#[derive(Debug, Clone)]
pub struct StateFamily<T> {
    n_states: usize,
    phi: T,
    theta: T,
    parity: Parity,
    half_count: usize,
    members: Vec<Member<T>>,
    boundary: (Ket2<T>, Ket2<T>),
    complement: (Ket4<T>, Ket4<T>),
}

/// Builds the family of `n_states` inputs spread over `phi` radians.
pub fn build_family<T: Real>(n_states: usize, phi: T) -> Result<StateFamily<T>> {
    if n_states < 2 {
        return Err(Error::Domain(
            "at least two candidate inputs required".into(),
        ));
    }
    check_spread(phi)?;

    let theta = phi / T::from_usize(n_states - 1).unwrap();
    let half_count = n_states / 2;
    let n = half_count as i64;
    let t = |x: i64| T::from_i64(x).unwrap();
    let half = T::lit(0.5);

    let (parity, members) = if n_states % 2 == 0 {
        let mut members = Vec::with_capacity(n_states);
        for m in 1..=n {
            let angle = (t(m) - half) * theta;
            members.push(Member {
                label: MemberLabel::A(m),
                angle,
                ket: Ket2::planar(angle),
            });
        }
        for m in 1..=n {
            let angle = -(t(m) - half) * theta;
            members.push(Member {
                label: MemberLabel::B(m),
                angle,
                ket: Ket2::planar(angle),
            });
        }
        (Parity::Even, members)
    } else {
        let members = (-n..=n)
            .map(|m| {
                let angle = t(m) * theta;
                Member {
                    label: MemberLabel::A(m),
                    angle,
                    ket: Ket2::planar(angle),
                }
            })
            .collect();
        (Parity::Odd, members)
    };

    let half_angle = match parity {
        Parity::Even => (t(n) - half) * theta,
        Parity::Odd => t(n) * theta,
    };
    let boundary = (Ket2::planar(half_angle), Ket2::planar(-half_angle));
    let complement = complement_pair(half_angle);

    Ok(StateFamily {
        n_states,
        phi,
        theta,
        parity,
        half_count,
        members,
        boundary,
        complement,
    })
}

pub(crate) fn check_spread<T: Real>(phi: T) -> Result<()> {
    if !(phi >= T::zero() && phi < T::PI()) {
        return Err(Error::Domain(format!(
            "angular spread {phi} outside [0, pi)"
        )));
    }
    Ok(())
}

/// The complement pair for boundary states at `±half_angle`:
/// `(sin²h |00> - cos²h |11>) / norm` and the singlet `(|01> - |10>)/√2`.
pub(crate) fn complement_pair<T: Real>(half_angle: T) -> (Ket4<T>, Ket4<T>) {
    let s2 = half_angle.sin().powi(2);
    let c2 = half_angle.cos().powi(2);
    let norm = (s2 * s2 + c2 * c2).sqrt();
    let first = Ket4::real([s2 / norm, T::zero(), T::zero(), -c2 / norm]);
    let h = T::FRAC_1_SQRT_2();
    let singlet = Ket4::real([T::zero(), h, -h, T::zero()]);
    (first, singlet)
}

impl<T: Real> StateFamily<T> {
    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn half_count(&self) -> usize {
        self.half_count
    }

    pub fn members(&self) -> &[Member<T>] {
        &self.members
    }

    /// The two extreme states: `(a_n, b_n)` for even, `(a_n, a_-n)` for odd.
    pub fn boundary(&self) -> (&Ket2<T>, &Ket2<T>) {
        (&self.boundary.0, &self.boundary.1)
    }

    /// Angle of the first boundary state: `(n - 1/2)θ` or `nθ`.
    pub fn half_angle(&self) -> T {
        let n = T::from_usize(self.half_count).unwrap();
        match self.parity {
            Parity::Even => (n - T::lit(0.5)) * self.theta,
            Parity::Odd => n * self.theta,
        }
    }

    /// `<s1|s2>` of the boundary pair: `cos((2n-1)θ)` or `cos(2nθ)`.
    pub fn boundary_overlap(&self) -> T {
        let n = T::from_usize(self.half_count).unwrap();
        match self.parity {
            Parity::Even => ((n + n - T::one()) * self.theta).cos(),
            Parity::Odd => ((n + n) * self.theta).cos(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.phi == T::zero()
    }
}

/// The complement pair orthogonal to both boundary product states.
pub fn complement_basis<T: Real>(family: &StateFamily<T>) -> (Ket4<T>, Ket4<T>) {
    family.complement
}

/// Coefficients `(p, q)` with `member = p·s1 + q·s2` for the boundary pair
/// `(s1, s2)`.
pub fn expansion_coeffs<T: Real>(family: &StateFamily<T>, member_index: usize) -> Result<(T, T)> {
    let member = family.members.get(member_index).ok_or_else(|| {
        Error::Usage(format!(
            "member index {member_index} out of range for {} states",
            family.n_states
        ))
    })?;
    solve_in_plane(&family.boundary.0, &family.boundary.1, &member.ket)
}

/// Solves `target = p·s1 + q·s2` for real coplanar kets by Cramer's rule.
pub(crate) fn solve_in_plane<T: Real>(
    s1: &Ket2<T>,
    s2: &Ket2<T>,
    target: &Ket2<T>,
) -> Result<(T, T)> {
    let (a, c) = (s1.amps[0].re, s1.amps[1].re);
    let (b, d) = (s2.amps[0].re, s2.amps[1].re);
    let det = a * d - b * c;
    if det.abs() <= T::epsilon() {
        return Err(Error::DegenerateFamily);
    }
    let (x, y) = (target.amps[0].re, target.amps[1].re);
    Ok(((x * d - b * y) / det, (a * y - x * c) / det))
}

/// States per radian, `N / Φ`; infinite for `Φ = 0`.
pub fn denseness<T: Real>(family: &StateFamily<T>) -> T {
    if family.phi == T::zero() {
        T::infinity()
    } else {
        T::from_usize(family.n_states).unwrap() / family.phi
    }
}

/// Shannon entropy of a uniform prior over `n_states` inputs, in nats.
pub fn shannon_entropy<T: Real>(n_states: usize) -> T {
    T::from_usize(n_states.max(1)).unwrap().ln()
}

/// Residual norm of `p·s1 + q·s2 - member`.
pub fn reconstruction_residual<T: Real>(
    family: &StateFamily<T>,
    member_index: usize,
    p: T,
    q: T,
) -> T {
    let (s1, s2) = family.boundary();
    let m = &family.members[member_index].ket;
    let r = |i: usize| {
        s1.amps[i] * Complex::new(p, T::zero()) + s2.amps[i] * Complex::new(q, T::zero())
            - m.amps[i]
    };
    (r(0).norm_sqr() + r(1).norm_sqr()).sqrt()
}

/// Largest overlap of the complement pair with anything it must be
/// orthogonal to, and its deviation from orthonormality.
pub fn complement_defect<T: Real>(family: &StateFamily<T>) -> T {
    let (c1, c2) = complement_basis(family);
    let (s1, s2) = family.boundary();
    let s11 = tensor_product(s1, s1);
    let s22 = tensor_product(s2, s2);
    let one = Complex::new(T::one(), T::zero());
    [
        (inner_product(&c1, &c1) - one).norm(),
        (inner_product(&c2, &c2) - one).norm(),
        inner_product(&c1, &c2).norm(),
        inner_product(&c1, &s11).norm(),
        inner_product(&c1, &s22).norm(),
        inner_product(&c2, &s11).norm(),
        inner_product(&c2, &s22).norm(),
    ]
    .into_iter()
    .fold(T::zero(), T::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Ket;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, LN_2, PI};

    fn angles(f: &StateFamily<f64>) -> Vec<f64> {
        f.members().iter().map(|m| m.angle).collect()
    }

    #[test]
    fn two_states() {
        let f = build_family(2, FRAC_PI_3).unwrap();
        assert_eq!(f.parity(), Parity::Even);
        let a = angles(&f);
        assert!((a[0] - FRAC_PI_6).abs() < 1e-15);
        assert!((a[1] + FRAC_PI_6).abs() < 1e-15);
        assert!((f.boundary_overlap() - 0.5).abs() < 1e-15);
        let (s1, s2) = f.boundary();
        assert!((inner_product(s1, s2).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn three_states_quarter_turn() {
        let f = build_family(3, FRAC_PI_2).unwrap();
        assert_eq!(f.parity(), Parity::Odd);
        let a = angles(&f);
        let want = [-PI / 4.0, 0.0, PI / 4.0];
        for (g, w) in a.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        assert!(f.boundary_overlap().abs() < 1e-15);
        assert_eq!(
            f.members().iter().map(|m| m.label).collect::<Vec<_>>(),
            vec![MemberLabel::A(-1), MemberLabel::A(0), MemberLabel::A(1)]
        );
    }

    #[test]
    fn four_states() {
        let f = build_family(4, 0.9f64).unwrap();
        assert!((f.theta() - 0.3).abs() < 1e-15);
        let a = angles(&f);
        let want = [0.15, 0.45, -0.15, -0.45];
        for (g, w) in a.iter().zip(want) {
            assert!((g - w).abs() < 1e-15);
        }
        assert_eq!(f.members()[1].label.to_string(), "a_2");
        assert_eq!(f.members()[3].label.to_string(), "b_2");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(build_family(1, 0.5), Err(Error::Domain(_))));
        assert!(matches!(build_family(3, -0.1), Err(Error::Domain(_))));
        assert!(matches!(build_family(3, PI), Err(Error::Domain(_))));
        assert!(matches!(build_family(3, f64::NAN), Err(Error::Domain(_))));
        assert!(build_family(3, 0.0).is_ok());
    }

    #[test]
    fn complement_for_right_angle_pair() {
        let f = build_family(2, FRAC_PI_2).unwrap();
        let (c1, c2) = complement_basis(&f);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, 0.0, -h];
        for (g, w) in c1.amps.iter().zip(want) {
            assert!((g.re - w).abs() < 1e-15 && g.im == 0.0);
        }
        assert_eq!(c2, Ket4::real([0.0, h, -h, 0.0]));
    }

    #[test]
    fn complement_for_odd_family() {
        // n = 1, θ = π/6: sin² = 1/4, cos² = 3/4.
        let f = build_family(3, FRAC_PI_3).unwrap();
        let (c3, c4) = complement_basis(&f);
        let norm = (1.0f64 / 16.0 + 9.0 / 16.0).sqrt();
        let want = [0.25 / norm, 0.0, 0.0, -0.75 / norm];
        for (g, w) in c3.amps.iter().zip(want) {
            assert!((g.re - w).abs() < 1e-15);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c4, Ket4::real([0.0, h, -h, 0.0]));
    }

    #[test]
    fn expansion_of_boundary_and_center() {
        let f = build_family(5, 1.2f64).unwrap();
        // Odd members run a_-2 .. a_2; the first boundary state is a_2.
        let (p, q) = expansion_coeffs(&f, 4).unwrap();
        assert!((p - 1.0).abs() < 1e-15 && q.abs() < 1e-15);
        let (p, q) = expansion_coeffs(&f, 2).unwrap();
        let want = 1.0 / (2.0 * f.half_angle().cos());
        assert!((p - want).abs() < 1e-14 && (q - want).abs() < 1e-14);
    }

    #[test]
    fn expansion_on_even_family() {
        let f = build_family(4, 0.9).unwrap();
        let (p, q) = expansion_coeffs(&f, 0).unwrap();
        assert!(reconstruction_residual(&f, 0, p, q) < 1e-12);
        // a_1 sits between the boundaries, closer to a_2.
        assert!(p > q && q > 0.0);
    }

    #[test]
    fn expansion_of_collapsed_family_is_degenerate() {
        let f = build_family(4, 0.0).unwrap();
        assert!(f.is_degenerate());
        assert_eq!(expansion_coeffs(&f, 1), Err(Error::DegenerateFamily));
        assert!(matches!(expansion_coeffs(&f, 9), Err(Error::Usage(_))));
    }

    #[test]
    fn denseness_values() {
        assert_eq!(denseness(&build_family(4, 2.0).unwrap()), 2.0);
        assert!((denseness(&build_family(2, FRAC_PI_2).unwrap()) - 4.0 / PI).abs() < 1e-15);
        assert_eq!(denseness(&build_family(8, 0.5).unwrap()), 16.0);
        assert!(denseness(&build_family(3, 0.0f64).unwrap()).is_infinite());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(shannon_entropy::<f64>(1), 0.0);
        assert!((shannon_entropy::<f64>(2) - 0.693147).abs() < 1e-6);
        assert!((shannon_entropy::<f64>(2) - LN_2).abs() < 1e-15);
        assert!((shannon_entropy::<f64>(8) - 3.0 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn grid_invariants() {
        for n in 2..=12 {
            for phi in [0.1, 0.5, 1.0, 1.5] {
                let f = build_family(n, phi).unwrap();
                let a = angles(&f);
                let lo = a.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                assert!((hi - lo - phi).abs() < 1e-12, "spread n={n} phi={phi}");
                assert!((f.theta() * (n - 1) as f64 - phi).abs() <= 2.0 * f64::EPSILON * phi);

                for (i, mi) in f.members().iter().enumerate() {
                    assert!((mi.ket.norm() - 1.0).abs() < 1e-12);
                    for mj in f.members() {
                        let g = inner_product(&mi.ket, &mj.ket);
                        assert!((g.re - (mi.angle - mj.angle).cos()).abs() < 1e-12);
                        assert!(g.im.abs() < 1e-12);
                    }
                    let (p, q) = expansion_coeffs(&f, i).unwrap();
                    assert!(reconstruction_residual(&f, i, p, q) < 1e-12);
                }

                let (s1, s2) = f.boundary();
                assert!((inner_product(s1, s2).re - f.boundary_overlap()).abs() < 1e-12);
                assert!((f.boundary_overlap() - phi.cos()).abs() < 1e-12);
                assert!(complement_defect(&f) < 1e-12);
            }
        }
    }
}
