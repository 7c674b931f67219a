//! Pseudo-arclength continuation of curves `g(u) = 0`, `g: R^{n+1} -> R^n`.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct ContinuationOpts {
    pub step: f64,
    pub max_steps: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ContinuationOpts {
    fn default() -> Self {
        ContinuationOpts {
            step: 1e-3,
            max_steps: 10_000,
            tol: 1e-13,
            max_iter: 30,
        }
    }
}

/// Central-difference Jacobian, `m x n`.
pub fn fd_jacobian<G: Fn(&[f64]) -> Vec<f64>>(g: &G, u: &[f64]) -> DMatrix<f64> {
    let g0 = g(u);
    let m = g0.len();
    let n = u.len();
    let mut j = DMatrix::zeros(m, n);
    let mut v = u.to_vec();
    for c in 0..n {
        let h = 1e-7 * u[c].abs().max(1e-3);
        v[c] = u[c] + h;
        let gp = g(&v);
        v[c] = u[c] - h;
        let gm = g(&v);
        v[c] = u[c];
        for r in 0..m {
            j[(r, c)] = (gp[r] - gm[r]) / (2.0 * h);
        }
    }
    j
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, b| a.max(b.abs()))
}

/// Solves `g(u) = 0` with `u[idx]` held at `value`; the remaining
/// coordinates start from `u0`.
pub fn solve_fixed<G: Fn(&[f64]) -> Vec<f64>>(
    g: &G,
    u0: &[f64],
    idx: usize,
    value: f64,
    tol: f64,
) -> Result<Vec<f64>> {
    let mut u = u0.to_vec();
    u[idx] = value;
    let n = u.len();
    for _ in 0..60 {
        let r = g(&u);
        let j = fd_jacobian(g, &u);
        let free: Vec<usize> = (0..n).filter(|&c| c != idx).collect();
        let js = DMatrix::from_fn(r.len(), free.len(), |a, b| j[(a, free[b])]);
        let rhs = DVector::from_column_slice(&r);
        let dx = js.lu().solve(&rhs).ok_or(Error::SingularJacobian)?;
        let mut step = 0.0f64;
        for (k, &c) in free.iter().enumerate() {
            u[c] -= dx[k];
            step = step.max(dx[k].abs());
        }
        if max_abs(&g(&u)) < tol && step < 1e-12 {
            return Ok(u);
        }
    }
    if max_abs(&g(&u)) < tol {
        Ok(u)
    } else {
        Err(Error::NoConvergence)
    }
}

fn tangent(j: &DMatrix<f64>, prev: &DVector<f64>) -> Result<DVector<f64>> {
    let n = j.ncols();
    let mut a = DMatrix::zeros(n, n);
    a.view_mut((0, 0), (n - 1, n)).copy_from(j);
    for c in 0..n {
        a[(n - 1, c)] = prev[c];
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let t = a.lu().solve(&b).ok_or(Error::SingularJacobian)?;
    Ok(t.normalize())
}

/// Traces the branch through `u0` (a point on the curve) starting along
/// `hint`, until `keep` rejects a point or `max_steps` is reached.
pub fn trace<G, K>(g: &G, u0: &[f64], hint: &[f64], opts: &ContinuationOpts, keep: K) -> Result<Vec<Vec<f64>>>
where
    G: Fn(&[f64]) -> Vec<f64>,
    K: Fn(&[f64]) -> bool,
{
    let mut u = DVector::from_column_slice(u0);
    let mut t = tangent(&fd_jacobian(g, u0), &DVector::from_column_slice(hint))?;
    let mut out = vec![u0.to_vec()];
    let n = u.len();
    let mut h = opts.step;
    let mut steps = 0;
    while steps < opts.max_steps {
        let pred = &u + &t * h;
        let mut v = pred.clone();
        let mut ok = false;
        for _ in 0..opts.max_iter {
            let r = g(v.as_slice());
            let j = fd_jacobian(g, v.as_slice());
            let mut a = DMatrix::zeros(n, n);
            a.view_mut((0, 0), (n - 1, n)).copy_from(&j);
            let mut rhs = DVector::zeros(n);
            for k in 0..n - 1 {
                rhs[k] = r[k];
            }
            for c in 0..n {
                a[(n - 1, c)] = t[c];
            }
            rhs[n - 1] = t.dot(&(&v - &pred));
            let Some(dx) = a.lu().solve(&rhs) else { break };
            v -= &dx;
            if dx.amax() < 1e-13 && max_abs(&g(v.as_slice())) < opts.tol {
                ok = true;
                break;
            }
        }
        if !ok {
            if max_abs(&g(v.as_slice())) < opts.tol.max(1e-11) {
                ok = true;
            }
        }
        if !ok {
            h *= 0.5;
            if h < opts.step * 1e-4 {
                return Err(Error::NoConvergence);
            }
            continue;
        }
        steps += 1;
        if !keep(v.as_slice()) {
            break;
        }
        let tn = tangent(&fd_jacobian(g, v.as_slice()), &t)?;
        t = if tn.dot(&t) < 0.0 { -tn } else { tn };
        u = v;
        out.push(u.as_slice().to_vec());
        h = (h * 1.5).min(opts.step);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn traces_unit_circle() {
        let g = |u: &[f64]| vec![u[0] * u[0] + u[1] * u[1] - 1.0];
        let opts = ContinuationOpts {
            step: 0.05,
            max_steps: 40,
            ..Default::default()
        };
        let pts = trace(&g, &[1.0, 0.0], &[0.0, 1.0], &opts, |u| u[0] > -0.5).unwrap();
        assert!(pts.len() > 10);
        for p in &pts {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
        }
        assert!(pts[1][1] > 0.0);
    }

    #[test]
    fn fixed_solve_hits_parabola() {
        let g = |u: &[f64]| vec![u[1] - u[0] * u[0]];
        let u = solve_fixed(&g, &[0.0, 0.0], 0, 0.3, 1e-14).unwrap();
        assert!((u[1] - 0.09).abs() < 1e-14);
    }
}
