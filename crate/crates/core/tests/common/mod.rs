//! Reference solvers kept independent of the library's own solution paths.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Plain bisection on a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// 1D Dirac root `y` of `tan(y) + y / lc` on branch `n`, by bisection.
pub fn dirac_1d_bisection(n: u32, lc: f64) -> f64 {
    let n = f64::from(n);
    bisect(|y| y.tan() + y / lc, (n - 0.5) * PI + 1e-9 * PI, n * PI, 1e-12)
}

/// `sin(y_i)(x_i² − a²) − 2 a x_i cos(y_i)` with `a = sqrt(|x|² + 1) + 1`:
/// the tangent-form conditions multiplied through by `cos(y_i)(x_i² − a²)`.
fn newton_residual(x: &[f64; 3], l: &[f64; 3]) -> [f64; 3] {
    let a = (x.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt() + 1.0;
    let mut r = [0.0; 3];
    for i in 0..3 {
        let y = x[i] * l[i];
        r[i] = y.sin() * (x[i] * x[i] - a * a) - 2.0 * a * x[i] * y.cos();
    }
    r
}

fn newton_jacobian(x: &[f64; 3], l: &[f64; 3]) -> [[f64; 3]; 3] {
    let e = (x.iter().map(|v| v * v).sum::<f64>() + 1.0).sqrt();
    let a = e + 1.0;
    let mut j = [[0.0; 3]; 3];
    for i in 0..3 {
        let (s, c) = (x[i] * l[i]).sin_cos();
        let d_a = -2.0 * a * s - 2.0 * x[i] * c;
        for k in 0..3 {
            j[i][k] = d_a * x[k] / e;
        }
        j[i][i] += l[i] * c * (x[i] * x[i] - a * a) + 2.0 * x[i] * s - 2.0 * a * c
            + 2.0 * a * x[i] * l[i] * s;
    }
    j
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|p, q| a[*p][col].abs().total_cmp(&a[*q][col].abs())).unwrap();
        a.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut out = [0.0; 3];
    for i in (0..3).rev() {
        let tail: f64 = (i + 1..3).map(|k| a[i][k] * out[k]).sum();
        out[i] = (a[i][3] - tail) / a[i][i];
    }
    out
}

fn norm(r: &[f64; 3]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Damped Newton on the three coupled Dirac conditions, started at
/// `y_i = (n_i − ¼)π` and kept inside each branch `((n_i − ½)π, n_iπ)`.
pub fn dirac_3d_newton(n: [u32; 3], l: [f64; 3]) -> [f64; 3] {
    let in_branch = |x: &[f64; 3]| {
        (0..3).all(|i| {
            let y = x[i] * l[i];
            let ni = f64::from(n[i]);
            y > (ni - 0.5) * PI && y < ni * PI
        })
    };
    let mut x = [0.0; 3];
    for i in 0..3 {
        x[i] = (f64::from(n[i]) - 0.25) * PI / l[i];
    }
    for _ in 0..200 {
        let r = newton_residual(&x, &l);
        let step = solve3(newton_jacobian(&x, &l), r.map(|v| -v));
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = [x[0] + lambda * step[0], x[1] + lambda * step[1], x[2] + lambda * step[2]];
            if in_branch(&trial) && norm(&newton_residual(&trial, &l)) < norm(&r) {
                accepted = Some(trial);
                break;
            }
            lambda *= 0.5;
        }
        let Some(next) = accepted else {
            return x;
        };
        let rel = (0..3).map(|i| ((next[i] - x[i]) / next[i]).abs()).fold(0.0, f64::max);
        x = next;
        if rel < 1e-15 {
            break;
        }
    }
    assert!(in_branch(&x), "Newton left the branch for n = {n:?}");
    x
}

/// States with `sqrt(|x|² + 1) − 1 <= t_max` over every triple with
/// entries `<= n_max`, counted one by one.
pub fn kg_lattice_count(lc: f64, t_max: f64, n_max: u32) -> u64 {
    let mut count = 0;
    for a in 1..=n_max {
        for b in 1..=n_max {
            for c in 1..=n_max {
                let s = f64::from(a * a + b * b + c * c) * (PI / lc).powi(2);
                if (s + 1.0).sqrt() - 1.0 <= t_max {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Same count for the quadratic dispersion `|x|² / 2`.
pub fn nonrel_lattice_count(lc: f64, t_max: f64, n_max: u32) -> u64 {
    let mut count = 0;
    for a in 1..=n_max {
        for b in 1..=n_max {
            for c in 1..=n_max {
                let s = f64::from(a * a + b * b + c * c) * (PI / lc).powi(2);
                if 0.5 * s <= t_max {
                    count += 1;
                }
            }
        }
    }
    count
}
