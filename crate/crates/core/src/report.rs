//! Sweeps, CSV rows and text reports.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::{build_family, check_spread, denseness, shannon_entropy};
use crate::reduced::{optimize_continuum, optimize_family, Optimum};
use crate::scalar::Real;

/// Header of the sweep CSV.
pub const CSV_HEADER: &str = "phi,n_states,fidelity,eta,xi,c,c_sign";

/// Formats `x` with at least 12 significant digits: 12 decimals from 1 up,
/// more below 1, and exponent notation under `1e-4`. Negative zero prints
/// as zero.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.12}", 0.0);
    }
    let s = if x.abs() < 1e-4 {
        format!("{x:.11e}")
    } else {
        let decimals = (11 - x.abs().log10().floor() as i32).max(12) as usize;
        format!("{x:.decimals$}")
    };
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

/// Family size, or the continuum of states on the arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NStates {
    Discrete(usize),
    Continuum,
}

impl Ord for NStates {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NStates::Discrete(a), NStates::Discrete(b)) => a.cmp(b),
            (NStates::Discrete(_), NStates::Continuum) => Ordering::Less,
            (NStates::Continuum, NStates::Discrete(_)) => Ordering::Greater,
            (NStates::Continuum, NStates::Continuum) => Ordering::Equal,
        }
    }
}

impl PartialOrd for NStates {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NStates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NStates::Discrete(n) => write!(f, "{n}"),
            NStates::Continuum => write!(f, "cont"),
        }
    }
}

/// Optimal machine for a family size or the continuum.
pub fn optimize_point<T: Real>(n_states: NStates, phi: T) -> Result<Optimum<T>> {
    match n_states {
        NStates::Discrete(n) => optimize_family(n, phi),
        NStates::Continuum => optimize_continuum(phi),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub n_states: NStates,
    pub fidelity: f64,
    pub eta: f64,
    pub xi: f64,
    pub c: f64,
    pub c_sign: i8,
}

impl SweepRow {
    pub fn from_optimum(phi: f64, n_states: NStates, o: &Optimum<f64>) -> Self {
        Self {
            phi,
            n_states,
            fidelity: o.fidelity,
            eta: o.params.eta,
            xi: o.params.xi,
            c: o.params.c,
            c_sign: o.c_sign.as_i8(),
        }
    }

    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            format_number(self.phi),
            self.n_states,
            format_number(self.fidelity),
            format_number(self.eta),
            format_number(self.xi),
            format_number(self.c),
            self.c_sign
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub phi_start: f64,
    pub phi_end: f64,
    pub steps: usize,
    pub n_states: Vec<usize>,
    pub continuum: bool,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Usage(format!(
                "steps must be at least 2, got {}",
                self.steps
            )));
        }
        check_spread(self.phi_start)?;
        check_spread(self.phi_end)?;
        if !(self.phi_start < self.phi_end) {
            return Err(Error::Usage(format!(
                "phi range [{}, {}] is empty",
                self.phi_start, self.phi_end
            )));
        }
        if self.n_states.is_empty() && !self.continuum {
            return Err(Error::Usage(
                "no family sizes requested and continuum not set".into(),
            ));
        }
        if let Some(&n) = self.n_states.iter().find(|&&n| n < 2) {
            return Err(Error::Domain(format!(
                "at least two candidate inputs required, got {n}"
            )));
        }
        Ok(())
    }

    /// Evenly spaced angles, both ends included exactly.
    pub fn angles(&self) -> Vec<f64> {
        let last = self.steps - 1;
        (0..self.steps)
            .map(|k| {
                if k == last {
                    self.phi_end
                } else {
                    self.phi_start + (self.phi_end - self.phi_start) * k as f64 / last as f64
                }
            })
            .collect()
    }
}

/// Optimizes every grid point in parallel; rows come back sorted by
/// `(n_states, phi)` regardless of completion order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let mut sizes: Vec<NStates> = spec
        .n_states
        .iter()
        .map(|&n| NStates::Discrete(n))
        .collect();
    if spec.continuum {
        sizes.push(NStates::Continuum);
    }
    sizes.sort();
    sizes.dedup();
    let points: Vec<(NStates, f64)> = sizes
        .iter()
        .flat_map(|&n| spec.angles().into_iter().map(move |phi| (n, phi)))
        .collect();
    let mut rows = points
        .into_par_iter()
        .map(|(n, phi)| optimize_point(n, phi).map(|o| SweepRow::from_optimum(phi, n, &o)))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.n_states.cmp(&b.n_states).then(a.phi.total_cmp(&b.phi)));
    Ok(rows)
}

/// The sweep as CSV text, newline-terminated.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// One optimized point with the family statistics alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub phi: f64,
    pub n_states: NStates,
    pub optimum: Optimum<f64>,
    pub denseness: f64,
    pub shannon_entropy: f64,
}

impl PointReport {
    pub fn new(n_states: NStates, phi: f64) -> Result<Self> {
        let optimum = optimize_point(n_states, phi)?;
        let (denseness, shannon_entropy) = match n_states {
            NStates::Discrete(n) => (denseness(&build_family(n, phi)?), shannon_entropy(n)),
            NStates::Continuum => (f64::INFINITY, f64::INFINITY),
        };
        Ok(Self {
            phi,
            n_states,
            optimum,
            denseness,
            shannon_entropy,
        })
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let o = &self.optimum;
        vec![
            ("phi", format_number(self.phi)),
            ("n_states", self.n_states.to_string()),
            ("fidelity", format_number(o.fidelity)),
            ("eta", format_number(o.params.eta)),
            ("xi", format_number(o.params.xi)),
            ("c", format_number(o.params.c)),
            ("c_sign", o.c_sign.to_string()),
            ("denseness", format_number(self.denseness)),
            ("shannon_entropy", format_number(self.shannon_entropy)),
            ("method_agreement", format_number(o.method_agreement)),
            ("root_residual", format_number(o.root_residual)),
        ]
    }

    /// `key value` lines.
    pub fn to_text(&self) -> String {
        self.fields()
            .into_iter()
            .map(|(k, v)| format!("{k} {v}\n"))
            .collect()
    }

    /// A single JSON object. Non-numeric tokens (`cont`, `inf`) are quoted.
    pub fn to_json(&self) -> String {
        let body: Vec<String> = self
            .fields()
            .into_iter()
            .map(|(k, v)| {
                let numeric = v.parse::<f64>().is_ok_and(f64::is_finite);
                if numeric {
                    format!("\"{k}\": {v}")
                } else {
                    format!("\"{k}\": \"{v}\"")
                }
            })
            .collect();
        format!("{{{}}}\n", body.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(1.0), "1.000000000000");
        assert_eq!(format_number(0.0), "0.000000000000");
        assert_eq!(format_number(-0.0), "0.000000000000");
        assert_eq!(format_number(0.5), "0.500000000000");
        assert_eq!(format_number(0.0123456789012345), "0.0123456789012");
        assert_eq!(format_number(-1.25e-9), "-1.25000000000e-9");
        assert_eq!(format_number(123.456), "123.456000000000");
        assert_eq!(format_number(f64::INFINITY), "inf");
        assert_eq!(format_number(-1e-20 * 0.0), "0.000000000000");
    }

    #[test]
    fn formatted_numbers_carry_twelve_significant_digits() {
        for x in [
            0.987654321098765,
            3.14159265358979,
            2.5e-7,
            0.000123456789,
            42.0,
        ] {
            let s = format_number(x);
            let mantissa = s.split('e').next().unwrap();
            let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
            let significant = digits.trim_start_matches('0').len();
            assert!(significant >= 12, "{x} -> {s}");
            assert!((s.parse::<f64>().unwrap() - x).abs() <= 1e-11 * x.abs().max(1e-300) * 10.0);
        }
    }

    #[test]
    fn n_states_order() {
        let mut v = vec![
            NStates::Continuum,
            NStates::Discrete(10),
            NStates::Discrete(2),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                NStates::Discrete(2),
                NStates::Discrete(10),
                NStates::Continuum
            ]
        );
        assert_eq!(NStates::Continuum.to_string(), "cont");
    }

    #[test]
    fn two_step_sweep() {
        let spec = SweepSpec {
            phi_start: 0.0,
            phi_end: 0.5,
            steps: 2,
            n_states: vec![2],
            continuum: false,
        };
        let rows = sweep(&spec).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].fidelity, 1.0);
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("phi,n_states,fidelity,eta,xi,c,c_sign\n"));
        assert!(csv.ends_with('\n') && !csv.contains(" \n"));
    }

    #[test]
    fn sweep_rows_are_sorted_and_deterministic() {
        let spec = SweepSpec {
            phi_start: 0.1,
            phi_end: 1.5,
            steps: 8,
            n_states: vec![6, 3],
            continuum: true,
        };
        let a = to_csv(&sweep(&spec).unwrap());
        let b = to_csv(&sweep(&spec).unwrap());
        assert_eq!(a, b);
        let labels: Vec<&str> = a
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap())
            .collect();
        assert_eq!(&labels[..8], &["3"; 8]);
        assert_eq!(&labels[16..], &["cont"; 8]);
    }

    #[test]
    fn sweep_rejects_bad_specs() {
        let ok = SweepSpec {
            phi_start: 0.0,
            phi_end: 1.0,
            steps: 4,
            n_states: vec![2],
            continuum: false,
        };
        assert!(sweep(&SweepSpec {
            steps: 1,
            ..ok.clone()
        })
        .is_err());
        assert!(sweep(&SweepSpec {
            phi_end: 4.0,
            ..ok.clone()
        })
        .is_err());
        assert!(sweep(&SweepSpec {
            phi_start: 1.0,
            ..ok.clone()
        })
        .is_err());
        assert!(sweep(&SweepSpec {
            n_states: vec![],
            ..ok.clone()
        })
        .is_err());
        assert!(sweep(&SweepSpec {
            n_states: vec![1],
            ..ok.clone()
        })
        .is_err());
        assert!(sweep(&SweepSpec {
            n_states: vec![],
            continuum: true,
            ..ok
        })
        .is_ok());
    }

    #[test]
    fn point_report_keys() {
        let r = PointReport::new(NStates::Discrete(4), 0.9).unwrap();
        let json = r.to_json();
        for key in [
            "phi",
            "n_states",
            "fidelity",
            "eta",
            "xi",
            "c",
            "c_sign",
            "denseness",
            "shannon_entropy",
            "method_agreement",
            "root_residual",
        ] {
            assert!(
                json.contains(&format!("\"{key}\": ")),
                "{key} missing from {json}"
            );
        }
        let cont = PointReport::new(NStates::Continuum, 0.9).unwrap().to_json();
        assert!(cont.contains("\"n_states\": \"cont\"") && cont.contains("\"denseness\": \"inf\""));
    }
}
