//! Independent reference computations used by the test suites and `selfcheck`.
//!
//! Each routine takes a different numerical route from the production code:
//! integral representations instead of series, uniform Riemann sums instead
//! of adaptive quadrature, and grid diagonalization instead of closed forms.

use std::f64::consts::PI;

/// J_n(x) from Bessel's integral (1/π)∫₀^π cos(nτ − x sin τ) dτ, evaluated by
/// the trapezoid rule, which converges geometrically for periodic integrands.
pub fn bessel_j_integral(n: u32, x: f64) -> f64 {
    let m = 2048;
    let h = PI / m as f64;
    let f = |t: f64| (n as f64 * t - x * t.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for k in 1..m {
        s += f(k as f64 * h);
    }
    s * h / PI
}

/// e^z K₁(z) = ∫₀^∞ e^{−z(cosh t − 1)} cosh t dt by the trapezoid rule.
pub fn scaled_bessel_k1(z: f64) -> f64 {
    let t_max = (1.0 + 60.0 / z).acosh();
    let m = 200_000;
    let h = t_max / m as f64;
    let f = |t: f64| (-z * (t.cosh() - 1.0)).exp() * t.cosh();
    let mut s = 0.5 * (f(0.0) + f(t_max));
    for k in 1..m {
        s += f(k as f64 * h);
    }
    s * h
}

fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    let mut c = 0.0;
    for k in 0..n {
        // Kahan summation keeps a million-term sum honest.
        let y = f(a + (k as f64 + 0.5) * h) - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s * h
}

/// (1/Δ)∫_Δ^end ε n(ε)/sqrt(ε²−Δ²) dε with ε = Δ cosh t and a midpoint rule.
pub fn bcs_normalization(n: &dyn Fn(f64) -> f64, delta: f64, end: f64, points: usize) -> f64 {
    let t_max = (end / delta).acosh();
    midpoint(|t| t.cosh() * n(delta * t.cosh()), 0.0, t_max, points)
}

/// S±[ω] by a uniform midpoint sum. The lower integration edge is mapped by a
/// cosh substitution on whichever lead supplies it; `weight` is n_L/x_QP.
pub fn s_pm_riemann(
    dev: &crate::DeviceParams,
    weight: &dyn Fn(f64) -> f64,
    sign: crate::spectral::Sign,
    omega: f64,
    eps_end: f64,
    points: usize,
) -> f64 {
    let (dl, dr) = (dev.delta_l, dev.delta_r);
    let dbar = dev.delta_mean();
    let pm = sign.as_f64();
    let num = |e: f64| e * (e + omega) + pm * dl * dr;
    if dl + omega >= dr {
        if eps_end <= dl {
            return 0.0;
        }
        let f = |t: f64| {
            let e = dl * t.cosh();
            let f2 = ((e + omega) * (e + omega) - dr * dr).sqrt();
            num(e) * weight(e) / f2
        };
        midpoint(f, 0.0, (eps_end / dl).acosh(), points) / dbar
    } else {
        let lo = dr - omega;
        if eps_end <= lo {
            return 0.0;
        }
        let f = |t: f64| {
            let e = dr * t.cosh() - omega;
            let f1 = (e * e - dl * dl).sqrt();
            num(e) * weight(e) / f1
        };
        midpoint(f, 0.0, ((eps_end + omega) / dr).acosh(), points) / dbar
    }
}

/// S̃±[ω] by midpoint sums on the two halves of [Δ_L, ω−Δ_R], each mapped by a
/// cosh substitution that removes its endpoint singularity.
pub fn s_tilde_midpoint(dev: &crate::DeviceParams, sign: crate::spectral::Sign, omega: f64, points: usize) -> f64 {
    let (dl, dr) = (dev.delta_l, dev.delta_r);
    let top = omega - dr;
    if top <= dl {
        return 0.0;
    }
    let mid = 0.5 * (dl + top);
    let pm = sign.as_f64();
    let num = |e: f64| e * (omega - e) + pm * dl * dr;
    let lower = midpoint(
        |t| {
            let e = dl * t.cosh();
            num(e) / ((omega - e) * (omega - e) - dr * dr).sqrt()
        },
        0.0,
        (mid / dl).acosh(),
        points,
    );
    let upper = midpoint(
        |t| {
            let e = omega - dr * t.cosh();
            num(e) / (e * e - dl * dl).sqrt()
        },
        0.0,
        ((omega - mid) / dr).acosh(),
        points,
    );
    (lower + upper) / dev.delta_mean()
}

/// Number of eigenvalues of the symmetric tridiagonal matrix (diag, off)
/// below `x`, from the Sturm sequence.
fn sturm_count(diag: &[f64], off: f64, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for (k, &d) in diag.iter().enumerate() {
        q = if k == 0 { d - x } else { d - x - off * off / q };
        if q == 0.0 {
            q = -1e-300;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn tridiagonal_eigenvalue(diag: &[f64], off: f64, k: usize, hi: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solve (T − λ)y = b with the Thomas algorithm.
fn shifted_solve(diag: &[f64], off: f64, lambda: f64, b: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut y = vec![0.0; n];
    let mut denom = diag[0] - lambda;
    c[0] = off / denom;
    y[0] = b[0] / denom;
    for k in 1..n {
        denom = diag[k] - lambda - off * c[k - 1];
        if denom == 0.0 {
            denom = 1e-300;
        }
        c[k] = off / denom;
        y[k] = (b[k] - off * y[k - 1]) / denom;
    }
    for k in (0..n - 1).rev() {
        y[k] -= c[k] * y[k + 1];
    }
    y
}

/// Lowest `count` eigenvectors of −4∂² + (E_J/2E_C)φ² on (−2π, 2π) with
/// Dirichlet ends and `points` interior nodes, normalized in L² and signed so
/// that the tail at positive φ is positive. Returns (grid, vectors).
pub fn harmonic_grid_states(ej_over_ec: f64, count: usize, points: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let h = 4.0 * PI / (points + 1) as f64;
    let grid: Vec<f64> = (0..points).map(|k| -2.0 * PI + (k + 1) as f64 * h).collect();
    let diag: Vec<f64> = grid.iter().map(|x| 8.0 / (h * h) + 0.5 * ej_over_ec * x * x).collect();
    let off = -4.0 / (h * h);
    let spacing = (8.0 * ej_over_ec).sqrt();
    let mut states = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = tridiagonal_eigenvalue(&diag, off, k, spacing * (count as f64 + 2.0));
        let mut v: Vec<f64> = (0..points).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
        for _ in 0..4 {
            v = shifted_solve(&diag, off, lambda, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let tail = v.iter().rposition(|x| x.abs() > 1e-3 * peak).unwrap();
        let scale = v[tail].signum() / h.sqrt();
        v.iter_mut().for_each(|x| *x *= scale);
        states.push(v);
    }
    (grid, states)
}

fn half_phase_on_grid(ej_over_ec: f64, offset: f64, n_max: usize, points: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (grid, psi) = harmonic_grid_states(ej_over_ec, n_max + 1, points);
    let h = grid[1] - grid[0];
    let cosw: Vec<f64> = grid.iter().map(|x| (0.5 * (offset + x)).cos()).collect();
    let sinw: Vec<f64> = grid.iter().map(|x| (0.5 * (offset + x)).sin()).collect();
    let mut c = vec![vec![0.0; n_max + 1]; n_max + 1];
    let mut s = vec![vec![0.0; n_max + 1]; n_max + 1];
    for f in 0..=n_max {
        for i in 0..=n_max {
            let mut sc = 0.0;
            let mut ss = 0.0;
            for k in 0..grid.len() {
                let w = psi[f][k] * psi[i][k];
                sc += w * cosw[k];
                ss += w * sinw[k];
            }
            c[f][i] = sc * h;
            s[f][i] = ss * h;
        }
    }
    (c, s)
}

/// ⟨f|cos((c+φ)/2)|i⟩ and ⟨f|sin((c+φ)/2)|i⟩ for the eigenstates of
/// 4E_C N² + (E_J/2)φ², from finite differences on 2^k and 2^{k+1} cells
/// combined by Richardson extrapolation.
pub fn half_phase_grid(ej_over_ec: f64, offset: f64, n_max: usize, log2_cells: u32) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n1 = (1usize << log2_cells) - 1;
    let n2 = (1usize << (log2_cells + 1)) - 1;
    let (c1, s1) = half_phase_on_grid(ej_over_ec, offset, n_max, n1);
    let (c2, s2) = half_phase_on_grid(ej_over_ec, offset, n_max, n2);
    let extrapolate = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (4.0 * y - x) / 3.0).collect()).collect()
    };
    (extrapolate(&c1, &c2), extrapolate(&s1, &s2))
}
