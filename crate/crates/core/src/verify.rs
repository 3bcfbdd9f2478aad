//! Cross-module invariant suite over the standard grid of family sizes and
//! angular spreads.

use rayon::prelude::*;

use crate::error::Result;
use crate::family::build_family;
use crate::form::{continuum_form, discrete_form, overlap_vector, QuadraticForm, CONTINUUM_NODES};
use crate::oracle::{full_fidelity, FullParams};
use crate::reduced::{optimize_reduced, CSign, Geometry, Optimum};
use crate::report::{format_number, NStates};

/// Family sizes checked; the continuum is added on top.
pub const GRID_SIZES: std::ops::RangeInclusive<usize> = 2..=10;

/// Spreads `0.05·k` for `k = 1..=31`.
pub fn grid_angles() -> Vec<f64> {
    (1..=31).map(|k| 0.05 * k as f64).collect()
}

/// Deliberate defects for exercising the suite itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Reports the optimum with the sign of `c` flipped.
    FlipCSign,
}

#[derive(Debug, Clone)]
pub struct InvariantCheck {
    pub name: &'static str,
    /// Failing grid points with the offending value.
    pub failures: Vec<String>,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<InvariantCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(InvariantCheck::passed)
    }

    /// One `PASS`/`FAIL` line per invariant, failing points indented below.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status} {}\n", c.name));
            for f in &c.failures {
                out.push_str(&format!("  {f}\n"));
            }
        }
        out
    }
}

struct Point {
    n: NStates,
    phi: f64,
    form: QuadraticForm<f64>,
    geom: Geometry<f64>,
    optimum: Result<Optimum<f64>>,
}

fn evaluate(n: NStates, phi: f64, mutation: Mutation) -> Result<Point> {
    let (form, geom) = match n {
        NStates::Discrete(k) => {
            let family = build_family(k, phi)?;
            (discrete_form(&family)?, Geometry::of_family(&family))
        }
        NStates::Continuum => (
            continuum_form(phi, CONTINUUM_NODES)?,
            Geometry::continuum(phi)?,
        ),
    };
    let optimum = optimize_reduced(&form, &geom).map(|mut o| {
        if mutation == Mutation::FlipCSign {
            o.params.c = -o.params.c;
            o.c_sign = match o.c_sign {
                CSign::Plus => CSign::Minus,
                CSign::Minus => CSign::Plus,
            };
        }
        o
    });
    Ok(Point {
        n,
        phi,
        form,
        geom,
        optimum,
    })
}

fn label(n: NStates, phi: f64) -> String {
    format!("N={n} phi={}", format_number(phi))
}

/// Runs every invariant over the grid.
pub fn run_suite(mutation: Mutation) -> Result<VerifyReport> {
    let mut sizes: Vec<NStates> = GRID_SIZES.map(NStates::Discrete).collect();
    sizes.push(NStates::Continuum);
    let angles = grid_angles();
    let jobs: Vec<(NStates, f64)> = sizes
        .iter()
        .flat_map(|&n| angles.iter().map(move |&phi| (n, phi)))
        .collect();
    let points = jobs
        .into_par_iter()
        .map(|(n, phi)| evaluate(n, phi, mutation))
        .collect::<Result<Vec<_>>>()?;

    let mut solved = Vec::new();
    let mut optimizer = InvariantCheck {
        name: "optimizer returns a result",
        failures: Vec::new(),
    };
    for p in &points {
        match &p.optimum {
            Ok(o) => solved.push((p, o)),
            Err(e) => optimizer
                .failures
                .push(format!("{}: {e}", label(p.n, p.phi))),
        }
    }

    let per_point = |name: &'static str, bad: &dyn Fn(&Point, &Optimum<f64>) -> Option<String>| {
        InvariantCheck {
            name,
            failures: solved
                .iter()
                .filter_map(|(p, o)| bad(p, o).map(|why| format!("{}: {why}", label(p.n, p.phi))))
                .collect(),
        }
    };

    let psd = per_point("fidelity form is positive semidefinite", &|p, _| {
        let m = p.form.min_eigenvalue();
        (m < -1e-12).then(|| format!("min eigenvalue {}", format_number(m)))
    });
    let bounds = per_point("fidelity within [0, 1]", &|_, o| {
        (!(0.0..=1.0 + 1e-12).contains(&o.fidelity))
            .then(|| format!("fidelity {}", format_number(o.fidelity)))
    });
    let restoration = per_point("outputs restore norms and boundary overlap", &|p, o| {
        let d = o.params.restoration_defect(&p.geom);
        (d >= 1e-10).then(|| format!("defect {}", format_number(d)))
    });
    let quartic = per_point(
        "grid maximizer matches a stationary quartic root",
        &|_, o| {
            (o.method_agreement >= 1e-6 || o.root_residual >= 1e-8).then(|| {
                format!(
                    "agreement {}, residual {}",
                    format_number(o.method_agreement),
                    format_number(o.root_residual)
                )
            })
        },
    );
    let embedding = per_point(
        "reported parameters reproduce the reported fidelity",
        &|p, o| {
            let direct = match p.n {
                NStates::Discrete(k) => {
                    let family = build_family(k, p.phi).ok()?;
                    full_fidelity(&FullParams::symmetric(&o.params.vector()), &family)
                }
                NStates::Continuum => p.form.eval(&o.params.vector()),
            };
            let gap = (direct - o.fidelity).abs();
            (gap >= 1e-10).then(|| {
                format!(
                    "recomputed {} vs reported {}",
                    format_number(direct),
                    format_number(o.fidelity)
                )
            })
        },
    );
    let symmetry = per_point("swap and mirror symmetry", &|p, o| {
        let NStates::Discrete(k) = p.n else {
            return None;
        };
        let family = build_family(k, p.phi).ok()?;
        let e = FullParams::symmetric(&[o.params.xi, o.params.eta, o.params.c]);
        let swap_gap = (full_fidelity(&e.swapped(), &family) - full_fidelity(&e, &family)).abs();
        if swap_gap >= 1e-12 {
            return Some(format!(
                "swap changes fidelity by {}",
                format_number(swap_gap)
            ));
        }
        let members = family.members();
        for (i, m) in members.iter().enumerate() {
            let Some(j) = members
                .iter()
                .position(|x| (x.angle + m.angle).abs() < 1e-12)
            else {
                return Some(format!("member {} has no mirror image", m.label));
            };
            let (ui, uj) = (
                overlap_vector(&family, i).ok()?,
                overlap_vector(&family, j).ok()?,
            );
            let gap = (0..3)
                .map(|k| (ui.u[k] - uj.u[k]).abs())
                .fold(0.0, f64::max);
            if gap >= 1e-12 {
                return Some(format!(
                    "mirror members {} and {} differ by {}",
                    m.label,
                    members[j].label,
                    format_number(gap)
                ));
            }
        }
        None
    });

    let mut monotone = InvariantCheck {
        name: "fidelity non-decreasing in N and bounded by the continuum",
        failures: Vec::new(),
    };
    for &phi in &angles {
        let at = |n: NStates| {
            solved
                .iter()
                .find(|(p, _)| p.n == n && p.phi == phi)
                .map(|(_, o)| o.fidelity)
        };
        let Some(cont) = at(NStates::Continuum) else {
            continue;
        };
        for k in 3..=*GRID_SIZES.end() {
            let Some(f) = at(NStates::Discrete(k)) else {
                continue;
            };
            if f > cont + 1e-6 {
                monotone.failures.push(format!(
                    "{}: {} exceeds continuum {}",
                    label(NStates::Discrete(k), phi),
                    format_number(f),
                    format_number(cont)
                ));
            }
            if let Some(next) = at(NStates::Discrete(k + 1)) {
                if next < f - 1e-9 {
                    monotone.failures.push(format!(
                        "{}: drops to {} at N={}",
                        label(NStates::Discrete(k), phi),
                        format_number(next),
                        k + 1
                    ));
                }
            }
        }
    }

    Ok(VerifyReport {
        checks: vec![
            optimizer,
            psd,
            bounds,
            restoration,
            quartic,
            embedding,
            symmetry,
            monotone,
        ],
    })
}
