//! Unconstrained minimization by BFGS with Armijo backtracking.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions<T> {
    pub max_iters: usize,
    /// Stop once `‖∇f‖∞` falls below this.
    pub grad_tol: T,
}

#[derive(Debug, Clone)]
pub struct BfgsResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn max_abs<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Minimizes `f`, which returns the value and gradient at a point.
pub fn minimize<T: Real>(
    x0: Vec<T>,
    opts: BfgsOptions<T>,
    f: impl Fn(&[T]) -> (T, Vec<T>),
) -> BfgsResult<T> {
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f(&x);
    // Inverse Hessian approximation, row-major.
    let mut h = vec![T::zero(); n * n];
    for i in 0..n {
        h[i * n + i] = T::one();
    }
    let mut first = true;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        if max_abs(&g) <= opts.grad_tol {
            break;
        }
        iterations += 1;
        let mut p: Vec<T> = (0..n).map(|i| -dot(&h[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&p, &g);
        if !(slope < T::zero()) {
            // Curvature information went bad; restart from steepest descent.
            h.iter_mut().for_each(|v| *v = T::zero());
            for i in 0..n {
                h[i * n + i] = T::one();
            }
            p = g.iter().map(|&v| -v).collect();
            slope = dot(&p, &g);
        }

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<T> = x.iter().zip(&p).map(|(&xi, &pi)| xi + step * pi).collect();
            let (ft, gt) = f(&trial);
            if ft <= fx + T::lit(1e-4) * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= T::lit(0.5);
        }
        let Some((xn, fn_, gn)) = accepted else { break };

        let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
        let y: Vec<T> = gn.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let sy = dot(&s, &y);
        let small_step = max_abs(&s) <= T::epsilon() * (T::one() + max_abs(&x));
        x = xn;
        g = gn;
        let stalled = (fx - fn_).abs() <= T::epsilon() * (T::one() + fn_.abs());
        fx = fn_;
        if small_step {
            break;
        }
        if sy > T::epsilon().sqrt() * (dot(&s, &s) * dot(&y, &y)).sqrt() {
            if first {
                let scale = sy / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
                first = false;
            }
            let hy: Vec<T> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = T::one() / sy;
            let coef = (T::one() + yhy * rho) * rho;
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        if stalled && max_abs(&g) <= opts.grad_tol.sqrt() {
            break;
        }
    }
    BfgsResult {
        x,
        value: fx,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let r = minimize(
            vec![-1.2f64, 1.0],
            BfgsOptions {
                max_iters: 500,
                grad_tol: 1e-10,
            },
            |x| {
                let (a, b) = (x[0], x[1]);
                let f = (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2);
                let g = vec![
                    -2.0 * (1.0 - a) - 400.0 * a * (b - a * a),
                    200.0 * (b - a * a),
                ];
                (f, g)
            },
        );
        assert!(
            (r.x[0] - 1.0).abs() < 1e-7 && (r.x[1] - 1.0).abs() < 1e-7,
            "{:?}",
            r.x
        );
    }

    #[test]
    fn quadratic_converges_in_few_steps() {
        let r = minimize(
            vec![3.0f64, -2.0, 1.0],
            BfgsOptions {
                max_iters: 50,
                grad_tol: 1e-12,
            },
            |x| {
                let d = [1.0, 10.0, 100.0];
                let f = (0..3).map(|i| 0.5 * d[i] * x[i] * x[i]).sum();
                (f, (0..3).map(|i| d[i] * x[i]).collect())
            },
        );
        assert!(r.value < 1e-20);
        assert!(r.iterations < 30);
    }
}
