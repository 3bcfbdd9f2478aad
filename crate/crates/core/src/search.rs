//! Bracketed scalar maximization.

use crate::scalar::Real;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, shrinking the
/// bracket until it is narrower than `tol`. Returns `(argmax, max)`.
pub fn golden_section_max<T: Real>(mut lo: T, mut hi: T, tol: T, f: impl Fn(T) -> T) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) * T::lit(0.5);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    // The bracket ends are candidates too: the maximum may sit on an edge.
    [(x1, f1), (x2, f2), (lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .fold(
            (x1, f1),
            |best, cand| if cand.1 > best.1 { cand } else { best },
        )
}
