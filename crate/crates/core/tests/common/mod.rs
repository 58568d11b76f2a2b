//! Reference computations that share no code with the library.
#![allow(dead_code)]

/// Root of `r⁴ − r_d²·r² − 1/(4k²)` above `r_d`, by bisection.
pub fn equilibrium_radius_bisection(r_d: f64, k: f64) -> f64 {
    let c = 1.0 / (4.0 * k * k);
    let f = |r: f64| r * r * (r * r - r_d * r_d) - c;
    let mut lo = r_d;
    let mut hi = r_d.max(1.0);
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn panel(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn refine(
        f: &dyn Fn(f64) -> f64,
        (a, fa): (f64, f64),
        (b, fb): (f64, f64),
        (m, fm): (f64, f64),
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = panel(f, a, fa, m, fm);
        let (rm, frm, right) = panel(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        refine(f, (a, fa), (m, fm), (lm, flm), left, 0.5 * tol, depth - 1)
            + refine(f, (m, fm), (b, fb), (rm, frm), right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = panel(f, a, fa, b, fb);
    refine(f, (a, fa), (b, fb), (m, fm), whole, tol, 60)
}

/// Smooth-law Lyapunov function by quadrature of its radial part,
/// `1 − sin θ + ∫_{r_a}^{r} (2|k|·sqrt(z² − r_d²) − 1/z) dz`.
pub fn smooth_lyapunov_quadrature(r: f64, bearing: f64, r_d: f64, k: f64) -> f64 {
    let r_a = equilibrium_radius_bisection(r_d, k);
    let g = |z: f64| 2.0 * k.abs() * (z * z - r_d * r_d).max(0.0).sqrt() - 1.0 / z;
    1.0 - bearing.sin() + integrate(&g, r_a, r, 1e-13)
}

/// Position after flying an arc of constant turn rate.
pub fn arc_endpoint(x0: f64, y0: f64, psi0: f64, v: f64, omega: f64, t: f64) -> (f64, f64) {
    let psi = psi0 + omega * t;
    (
        x0 + v / omega * (psi.sin() - psi0.sin()),
        y0 - v / omega * (psi.cos() - psi0.cos()),
    )
}
