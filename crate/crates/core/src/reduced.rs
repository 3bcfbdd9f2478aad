//! Maximization over the one free parameter of the symmetric real machine.
//!
//! Unit norm of both outputs and preservation of the boundary overlap fix
//! `ξ - η = 1/(√2 cos h)` (with `h` the boundary half-angle) and give `c²`
//! as a concave quadratic in `η`. On each sign branch `c = ±√c²(η)` the
//! fidelity reads `F(η) = A(η) ± L(η)·√g(η)` with `A`, `g` quadratic and
//! `L` linear. Isolating the radical in `F'(η) = 0` and squaring gives
//!
//! ```text
//! 4·g·A'² - (2·L'·g + L·g')² = 0,
//! ```
//!
//! a quartic in `η` whose real roots contain every stationary point of both
//! branches. The optimizer searches a grid, refines with golden section and
//! cross-checks the result against the quartic.

use std::fmt;

use crate::error::{Error, Result};
use crate::family::{check_spread, Parity, StateFamily};
use crate::form::{
    continuum_form, discrete_form, symmetric_outputs_at, QuadraticForm, CONTINUUM_NODES,
};
use crate::poly::{solve_quartic, Poly, Quartic};
use crate::qubit::{inner_product, Ket};
use crate::scalar::Real;
use crate::search::golden_section_max;

/// Number of grid points over the feasible interval.
pub const GRID_POINTS: usize = 2001;

/// Quartic roots whose stationarity residual exceeds this are treated as
/// artefacts of squaring.
const SPURIOUS_ROOT_RESIDUAL: f64 = 1e-6;

/// Maximum tolerated distance between the grid-refined maximizer and the
/// matched quartic root before the optimizer reports an inconsistency.
const MAX_DISAGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryKind {
    Even,
    Odd,
    Continuum,
}

/// Boundary data shared by a discrete family and its continuum analogue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry<T> {
    pub kind: GeometryKind,
    pub phi: T,
    /// Angle of the first boundary state; `(n - 1/2)θ`, `nθ`, or `Φ/2`.
    pub half_angle: T,
    /// `<s1|s2>` of the boundary pair.
    pub overlap: T,
}

impl<T: Real> Geometry<T> {
    pub fn of_family(family: &StateFamily<T>) -> Self {
        Self {
            kind: match family.parity() {
                Parity::Even => GeometryKind::Even,
                Parity::Odd => GeometryKind::Odd,
            },
            phi: family.phi(),
            half_angle: family.half_angle(),
            overlap: family.boundary_overlap(),
        }
    }

    pub fn continuum(phi: T) -> Result<Self> {
        check_spread(phi)?;
        Ok(Self {
            kind: GeometryKind::Continuum,
            phi,
            half_angle: phi * T::lit(0.5),
            overlap: phi.cos(),
        })
    }

    /// `1/(√2 cos h)`.
    fn offset(&self) -> Result<T> {
        let c = self.half_angle.cos();
        if !(c > T::zero()) || !(self.phi < T::PI()) {
            return Err(Error::Domain(format!(
                "boundary half-angle {} leaves the open quarter turn",
                self.half_angle
            )));
        }
        Ok(T::one() / (T::SQRT_2() * c))
    }

    /// Constant `c²` would take if the squared term vanished.
    fn c_sq_ceiling(&self) -> T {
        match self.kind {
            GeometryKind::Odd => self.half_angle.cos().powi(2),
            _ => T::lit(0.5) * (T::one() + self.overlap),
        }
    }

    /// `(1 + <s1|s2>²)/2`.
    fn curvature(&self) -> T {
        T::lit(0.5) * (T::one() + self.overlap * self.overlap)
    }

    /// `c²(η)` as a polynomial.
    fn c_sq_poly(&self) -> Result<Poly<T>> {
        let d = self.offset()?;
        let k = self.curvature();
        let four = T::lit(4.0);
        Ok(Poly::new(vec![
            self.c_sq_ceiling() - k * d * d,
            -four * k * d,
            -four * k,
        ]))
    }
}

/// `ξ = η + 1/(√2 cos h)`.
pub fn xi_of_eta<T: Real>(geom: &Geometry<T>, eta: T) -> Result<T> {
    Ok(eta + geom.offset()?)
}

/// `c²(η)`; negative values mark infeasible `η`.
pub fn c_sq_of_eta<T: Real>(geom: &Geometry<T>, eta: T) -> Result<T> {
    let d = geom.offset()?;
    let s = eta + eta + d;
    Ok(geom.c_sq_ceiling() - geom.curvature() * s * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibleInterval<T> {
    pub eta_lo: T,
    pub eta_hi: T,
}

impl<T: Real> FeasibleInterval<T> {
    pub fn width(&self) -> T {
        self.eta_hi - self.eta_lo
    }

    pub fn midpoint(&self) -> T {
        (self.eta_lo + self.eta_hi) * T::lit(0.5)
    }

    pub fn contains(&self, eta: T, slack: T) -> bool {
        eta >= self.eta_lo - slack && eta <= self.eta_hi + slack
    }

    pub fn clamp(&self, eta: T) -> T {
        eta.max(self.eta_lo).min(self.eta_hi)
    }
}

/// The two roots of `c²(η) = 0`, ascending.
pub fn feasible_interval<T: Real>(geom: &Geometry<T>) -> Result<FeasibleInterval<T>> {
    let d = geom.offset()?;
    let r = (geom.c_sq_ceiling().max(T::zero()) / geom.curvature()).sqrt();
    let half = T::lit(0.5);
    Ok(FeasibleInterval {
        eta_lo: (-d - r) * half,
        eta_hi: (-d + r) * half,
    })
}

/// Sign chosen for `c = ±√c²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CSign {
    Plus,
    Minus,
}

impl CSign {
    pub fn value<T: Real>(self) -> T {
        match self {
            CSign::Plus => T::one(),
            CSign::Minus => -T::one(),
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            CSign::Plus => 1,
            CSign::Minus => -1,
        }
    }
}

impl fmt::Display for CSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams<T> {
    pub eta: T,
    pub xi: T,
    pub c: T,
}

impl<T: Real> ReducedParams<T> {
    /// Closes `ξ` and `c` over `η`. Slightly negative `c²` from endpoint
    /// roundoff is clamped to zero; anything below `-1e-12` is infeasible.
    pub fn from_eta(geom: &Geometry<T>, eta: T, sign: CSign) -> Result<Self> {
        let xi = xi_of_eta(geom, eta)?;
        let c_sq = c_sq_of_eta(geom, eta)?;
        if c_sq < -T::tol(1e-12) {
            return Err(Error::Domain(format!(
                "eta = {eta} is infeasible (c^2 = {c_sq})"
            )));
        }
        let iv = feasible_interval(geom)?;
        let c = if eta <= iv.eta_lo || eta >= iv.eta_hi {
            T::zero()
        } else {
            sign.value::<T>() * c_sq.max(T::zero()).sqrt()
        };
        Ok(Self { eta, xi, c })
    }

    pub fn vector(&self) -> [T; 3] {
        [self.xi, self.eta, self.c]
    }

    /// Largest violation of `<α|α> = <β|β> = 1` and `<α|β> = <s1|s2>` for
    /// the reconstructed two-qubit outputs.
    pub fn restoration_defect(&self, geom: &Geometry<T>) -> T {
        let (alpha, beta) = symmetric_outputs_at(geom.half_angle, &self.vector());
        let ab = inner_product(&alpha, &beta);
        [
            (alpha.norm_sqr() - T::one()).abs(),
            (beta.norm_sqr() - T::one()).abs(),
            (ab.re - geom.overlap).abs(),
            ab.im.abs(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }
}

/// `F(η) = vᵀ M v` on the reduced parametrization.
pub fn fidelity_of_eta<T: Real>(
    form: &QuadraticForm<T>,
    geom: &Geometry<T>,
    eta: T,
    sign: CSign,
) -> Result<T> {
    if geom.phi == T::zero() {
        return Ok(T::one());
    }
    let p = ReducedParams::from_eta(geom, eta, sign)?;
    Ok(form.eval(&p.vector()))
}

/// `F(η) = A(η) + s·L(η)·√g(η)` on one sign branch, with `A`, `L`, `g` as
/// explicit polynomials.
#[derive(Debug, Clone)]
pub struct Branch<T> {
    pub sign: CSign,
    pub a: Poly<T>,
    pub l: Poly<T>,
    pub g: Poly<T>,
    da: Poly<T>,
    dl: Poly<T>,
    dg: Poly<T>,
    m: [[T; 3]; 3],
    offset: T,
    /// Semi-axes of the constraint ellipse in `(2η + d, c)`.
    r_sigma: T,
    r_c: T,
    interval: FeasibleInterval<T>,
}

impl<T: Real> Branch<T> {
    pub fn new(form: &QuadraticForm<T>, geom: &Geometry<T>, sign: CSign) -> Result<Self> {
        let d = geom.offset()?;
        let m = &form.m;
        let xi = Poly::new(vec![d, T::one()]);
        let eta = Poly::new(vec![T::zero(), T::one()]);
        let g = geom.c_sq_poly()?;
        let two = T::lit(2.0);
        let a = &(&(&(&xi * &xi).scale(m[0][0]) + &(&xi * &eta).scale(two * m[0][1]))
            + &(&eta * &eta).scale(m[1][1]))
            + &g.scale(m[2][2]);
        let l = &xi.scale(two * m[0][2]) + &eta.scale(two * m[1][2]);
        let ceiling = geom.c_sq_ceiling().max(T::zero());
        Ok(Self {
            sign,
            m: *m,
            offset: d,
            r_sigma: (ceiling / geom.curvature()).sqrt(),
            r_c: ceiling.sqrt(),
            interval: feasible_interval(geom)?,
            da: a.derivative(),
            dl: l.derivative(),
            dg: g.derivative(),
            a,
            l,
            g,
        })
    }

    /// `√g`, exactly zero on and beyond the interval edges.
    fn root_g(&self, eta: T) -> T {
        if eta <= self.interval.eta_lo || eta >= self.interval.eta_hi {
            return T::zero();
        }
        self.g.eval(eta).max(T::zero()).sqrt()
    }

    pub fn value(&self, eta: T) -> T {
        let s = self.sign.value::<T>();
        self.a.eval(eta) + s * self.l.eval(eta) * self.root_g(eta)
    }

    /// `F'(η)`; unbounded where `g → 0` unless `L` vanishes there.
    pub fn derivative(&self, eta: T) -> T {
        let s = self.sign.value::<T>();
        let rg = self.root_g(eta);
        self.da.eval(eta)
            + s * (self.dl.eval(eta) * rg
                + self.l.eval(eta) * self.dg.eval(eta) / (T::lit(2.0) * rg))
    }

    /// `sin t` of the angle parametrizing the constraint ellipse
    /// `(2η + d, c) = (R_σ cos t, R_c sin t)`; its sign is the branch sign.
    fn sin_t(&self, eta: T) -> T {
        if self.r_c == T::zero() {
            return T::zero();
        }
        self.sign.value::<T>() * self.root_g(eta) / self.r_c
    }

    /// `dF/dt` along the constraint ellipse. Unlike `F'(η)` this stays
    /// regular at the interval edges, where `c = 0` and `dη/dt = 0`.
    pub fn tangent_derivative(&self, eta: T) -> T {
        let s = self.sign.value::<T>();
        let v = [eta + self.offset, eta, s * self.root_g(eta)];
        let sin_t = self.sin_t(eta);
        let cos_t = if self.r_sigma == T::zero() {
            T::one()
        } else {
            ((eta + eta + self.offset) / self.r_sigma)
                .max(-T::one())
                .min(T::one())
        };
        let deta = -self.r_sigma * sin_t * T::lit(0.5);
        let dv = [deta, deta, self.r_c * cos_t];
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc += v[i] * self.m[i][j] * dv[j];
            }
        }
        acc + acc
    }

    /// Stationarity residual at `eta`: `|F'(η)|` where the η-chart is
    /// regular. Within `|sin t| < 1e-3` of an edge the chart degenerates
    /// (`dη/dt → 0`), and the residual is `|dF/dt|/(R_σ/2)`, which equals
    /// `|F'(η)|·|sin t|` and stays finite; at the edge itself it is
    /// proportional to `|∂F/∂c| = |L|`.
    pub fn stationarity_residual(&self, eta: T) -> T {
        if self.sin_t(eta).abs() >= T::lit(1e-3) {
            return self.derivative(eta).abs();
        }
        if self.r_sigma == T::zero() {
            return T::zero();
        }
        self.tangent_derivative(eta).abs() * T::lit(2.0) / self.r_sigma
    }

    /// Whether moving off the `c = 0` edge at `eta` onto this branch lowers
    /// `F` to first order, so the branch peaks on the edge itself.
    fn falls_off_edge(&self, eta: T, slack: T) -> bool {
        self.sign.value::<T>() * self.l.eval(eta) < -slack
    }
}

/// Quartic whose real roots contain the stationary points of `F` on both
/// sign branches. Squaring removes the sign, so one quartic serves both.
pub fn derive_quartic<T: Real>(form: &QuadraticForm<T>, geom: &Geometry<T>) -> Result<Quartic<T>> {
    if geom.phi == T::zero() {
        return Err(Error::DegenerateFamily);
    }
    let b = Branch::new(form, geom, CSign::Plus)?;
    let four = T::lit(4.0);
    let lhs = &(&b.g * &(&b.da * &b.da)).scale(four);
    let inner = &(&b.dl * &b.g).scale(T::lit(2.0)) + &(&b.l * &b.dg);
    let rhs = &inner * &inner;
    Ok(Quartic::from_poly(&(lhs - &rhs)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum<T> {
    pub params: ReducedParams<T>,
    pub fidelity: T,
    pub c_sign: CSign,
    /// `None` only for the collapsed `Φ = 0` family.
    pub quartic: Option<Quartic<T>>,
    /// Quartic root matched to the grid-refined maximizer.
    pub root: Option<T>,
    /// Maximizer found by grid search plus golden section.
    pub grid_eta: T,
    /// Stationarity residual at the matched root.
    pub root_residual: T,
    /// `|grid_eta - root|`.
    pub method_agreement: T,
    /// Strict interior local maxima seen on the grid of the winning branch.
    pub local_maxima: usize,
}

impl<T: Real> Optimum<T> {
    /// Identical inputs clone perfectly: `U|ψ>|_> = |ψψ>`, i.e. `ξ + η = 1`,
    /// `c = 0` on the `Φ → 0` limit of the reduced parametrization.
    fn perfect(geom: &Geometry<T>) -> Result<Self> {
        let d = geom.offset()?;
        let eta = (T::one() - d) * T::lit(0.5);
        Ok(Self {
            params: ReducedParams {
                eta,
                xi: eta + d,
                c: T::zero(),
            },
            fidelity: T::one(),
            c_sign: CSign::Plus,
            quartic: None,
            root: None,
            grid_eta: eta,
            root_residual: T::zero(),
            method_agreement: T::zero(),
            local_maxima: 1,
        })
    }
}

struct BranchResult<T> {
    eta: T,
    fidelity: T,
    grid_eta: T,
    root: T,
    residual: T,
    agreement: T,
    local_maxima: usize,
}

/// `Ok(None)` when the branch peaks on an edge of the interval where it
/// falls off to first order: both branches meet there with `c = 0`, and the
/// other one rises above that shared value just inside the interval.
fn optimize_branch<T: Real>(
    branch: &Branch<T>,
    interval: &FeasibleInterval<T>,
    roots: &[T],
) -> Result<Option<BranchResult<T>>> {
    let steps = GRID_POINTS - 1;
    let h = interval.width() / T::from_usize(steps).unwrap();
    let grid: Vec<T> = (0..GRID_POINTS)
        .map(|i| {
            if i == steps {
                interval.eta_hi
            } else {
                interval.eta_lo + h * T::from_usize(i).unwrap()
            }
        })
        .collect();
    let values: Vec<T> = grid.iter().map(|&e| branch.value(e)).collect();

    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v > values[b] { i } else { b });
    let local_maxima = (1..steps)
        .filter(|&i| values[i] > values[i - 1] && values[i] > values[i + 1])
        .count();

    let lo = grid[best.saturating_sub(1)];
    let hi = grid[(best + 1).min(steps)];
    let tol = T::tol(1e-10).max(T::epsilon().sqrt() * (T::one() + interval.width()));
    let (grid_eta, grid_f) = golden_section_max(lo, hi, tol, |e| branch.value(e));

    let filter = T::tol(SPURIOUS_ROOT_RESIDUAL);
    let edge = [interval.eta_lo, interval.eta_hi]
        .into_iter()
        .find(|&e| (grid_eta - e).abs() <= tol);
    if let Some(e) = edge {
        if branch.falls_off_edge(e, filter) {
            return Ok(None);
        }
    }
    let nearest = roots
        .iter()
        .map(|&r| snap_to_edge(branch, interval, r))
        .filter(|&r| branch.stationarity_residual(r) <= filter)
        .map(|r| (r, (r - grid_eta).abs()))
        .fold(None, |acc: Option<(T, T)>, cand| match acc {
            Some(a) if a.1 <= cand.1 => Some(a),
            _ => Some(cand),
        });
    let Some((root, agreement)) = nearest else {
        return Err(Error::Inconsistent(format!(
            "no stationary quartic root for the {} branch (grid maximizer {grid_eta})",
            branch.sign
        )));
    };
    if agreement > T::tol(MAX_DISAGREEMENT) {
        return Err(Error::Inconsistent(format!(
            "grid maximizer {grid_eta} and quartic root {root} differ by {agreement}"
        )));
    }
    let root_f = branch.value(root);
    let (eta, fidelity) = if root_f >= grid_f {
        (root, root_f)
    } else {
        (grid_eta, grid_f)
    };
    Ok(Some(BranchResult {
        eta,
        fidelity,
        grid_eta,
        root,
        residual: branch.stationarity_residual(root),
        agreement,
        local_maxima,
    }))
}

/// Clamps a quartic root into the interval. Edges are exact roots of `g`,
/// so a root within roundoff of one is replaced by the edge when that
/// lowers the residual.
fn snap_to_edge<T: Real>(branch: &Branch<T>, interval: &FeasibleInterval<T>, root: T) -> T {
    let r = interval.clamp(root);
    let snap = T::tol(1e-12) * (T::one() + interval.width());
    [interval.eta_lo, interval.eta_hi]
        .into_iter()
        .filter(|&e| (r - e).abs() <= snap)
        .fold(r, |best, e| {
            if branch.stationarity_residual(e) < branch.stationarity_residual(best) {
                e
            } else {
                best
            }
        })
}

/// Maximizes `F(η)` over the feasible interval on both sign branches.
pub fn optimize_reduced<T: Real>(
    form: &QuadraticForm<T>,
    geom: &Geometry<T>,
) -> Result<Optimum<T>> {
    check_spread(geom.phi)?;
    if geom.phi == T::zero() {
        return Optimum::perfect(geom);
    }
    let interval = feasible_interval(geom)?;
    let quartic = derive_quartic(form, geom)?;
    let roots: Vec<T> = match solve_quartic(&quartic) {
        Ok(r) => r.into_iter().map(|r| r.value).collect(),
        Err(Error::Usage(_)) => Vec::new(),
        Err(e) => return Err(e),
    };

    let plus = optimize_branch(&Branch::new(form, geom, CSign::Plus)?, &interval, &roots)?;
    let minus = optimize_branch(&Branch::new(form, geom, CSign::Minus)?, &interval, &roots)?;
    let (sign, win) = match (plus, minus) {
        (Some(p), Some(m)) if m.fidelity > p.fidelity + T::tol(1e-12) => (CSign::Minus, m),
        (Some(p), _) => (CSign::Plus, p),
        (None, Some(m)) => (CSign::Minus, m),
        (None, None) => {
            return Err(Error::Inconsistent(
                "both sign branches peak on a non-stationary edge".into(),
            ))
        }
    };

    Ok(Optimum {
        params: ReducedParams::from_eta(geom, win.eta, sign)?,
        fidelity: win.fidelity,
        c_sign: sign,
        quartic: Some(quartic),
        root: Some(win.root),
        grid_eta: win.grid_eta,
        root_residual: win.residual,
        method_agreement: win.agreement,
        local_maxima: win.local_maxima,
    })
}

/// Optimal machine for the `n_states` family spread over `phi`.
pub fn optimize_family<T: Real>(n_states: usize, phi: T) -> Result<Optimum<T>> {
    let family = crate::family::build_family(n_states, phi)?;
    let geom = Geometry::of_family(&family);
    if family.is_degenerate() {
        return Optimum::perfect(&geom);
    }
    optimize_reduced(&discrete_form(&family)?, &geom)
}

/// Optimal machine for the continuum of states on an arc of width `phi`.
pub fn optimize_continuum<T: Real>(phi: T) -> Result<Optimum<T>> {
    let geom = Geometry::continuum(phi)?;
    if phi == T::zero() {
        return Optimum::perfect(&geom);
    }
    optimize_reduced(&continuum_form(phi, CONTINUUM_NODES)?, &geom)
}
