//! Zeta-type special functions and Gauss-Legendre quadrature.
//!
//! The zeta family supplies the regularised lattice sums used by the
//! diagonal corrections in [`crate::singular`]. All functions accept real
//! arguments away from the pole at 1 (negative arguments included, through
//! the Euler-Maclaurin continuation).

use std::sync::OnceLock;

/// B_2, B_4, ..., B_24.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `ζ(x, a) = Σ_{k≥0} (k + a)^{-x}`, analytically continued to
/// every real `x ≠ 1`. Requires `a > 0`.
pub fn hurwitz_zeta(x: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta needs a > 0");
    if (x - 1.0).abs() < 1e-14 {
        return f64::INFINITY;
    }
    let (m, regular) = hurwitz_regular(x, a);
    regular + (m as f64 + a).powf(1.0 - x) / (x - 1.0)
}

/// Shift used by the Euler-Maclaurin continuation; large enough that the
/// asymptotic tail is accurate for |x| up to about 10.
fn em_shift(x: f64) -> usize {
    24usize + (x.abs().ceil() as usize)
}

/// Everything in the Euler-Maclaurin form of `ζ(x, a)` except the pole
/// term `B^{1-x}/(x-1)`, with `B = m + a`.
fn hurwitz_regular(x: f64, a: f64) -> (usize, f64) {
    let m = em_shift(x);
    let mut sum = 0.0;
    for k in 0..m {
        sum += (k as f64 + a).powf(-x);
    }
    let big = m as f64 + a;
    sum += 0.5 * big.powf(-x);
    // B_{2j}/(2j)! * x(x+1)...(x+2j-2) * big^{-x-2j+1}
    let mut rising = x;
    let mut fact = 2.0;
    let mut pow = big.powf(-x - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let jj = (j + 1) as f64;
        let term = b / fact * rising * pow;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
        rising *= (x + 2.0 * jj - 1.0) * (x + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        pow /= big * big;
    }
    (m, sum)
}

/// `ζ(x, a) - ζ(x, b)`, finite at `x = 1` where the poles cancel.
pub fn hurwitz_zeta_diff(x: f64, a: f64, b: f64) -> f64 {
    let (m, ra) = hurwitz_regular(x, a);
    let (_, rb) = hurwitz_regular(x, b);
    let (ba, bb) = (m as f64 + a, m as f64 + b);
    let t = 1.0 - x;
    let lambda = (ba / bb).ln();
    // (ba^t - bb^t) / (x - 1)
    let pole = if t == 0.0 {
        -lambda
    } else {
        -bb.powf(t) * (t * lambda).exp_m1() / t
    };
    ra - rb + pole
}

/// Riemann zeta for real `x ≠ 1`.
pub fn riemann_zeta(x: f64) -> f64 {
    hurwitz_zeta(x, 1.0)
}

/// Dirichlet beta `β(x) = Σ_{k≥0} (-1)^k (2k+1)^{-x}`.
pub fn dirichlet_beta(x: f64) -> f64 {
    4f64.powf(-x) * hurwitz_zeta_diff(x, 0.25, 0.75)
}

/// Epstein zeta of the square lattice, `Σ'_{k∈ℤ²} |k|^{-σ} = 4 ζ(σ/2) β(σ/2)`.
pub fn square_lattice_zeta(sigma: f64) -> f64 {
    4.0 * riemann_zeta(0.5 * sigma) * dirichlet_beta(0.5 * sigma)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

/// Composite 20-point Gauss-Legendre quadrature of `f` over `[a, b]` with
/// `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = gl20();
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        let mut acc = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            acc += wi * f(mid + 0.5 * width * xi);
        }
        total += 0.5 * width * acc;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta_known_values() {
        assert_relative_eq!(riemann_zeta(2.0), std::f64::consts::PI.powi(2) / 6.0, max_relative = 1e-14);
        assert_relative_eq!(riemann_zeta(0.0), -0.5, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(-1.0), -1.0 / 12.0, max_relative = 1e-12);
        assert_relative_eq!(riemann_zeta(0.5), -1.4603545088095868, max_relative = 1e-13);
        assert_relative_eq!(riemann_zeta(-0.5), -0.20788622497735457, max_relative = 1e-12);
        assert!(riemann_zeta(-2.0).abs() < 1e-13);
    }

    #[test]
    fn beta_and_lattice() {
        assert_relative_eq!(dirichlet_beta(1.0), std::f64::consts::FRAC_PI_4, max_relative = 1e-13);
        assert_relative_eq!(dirichlet_beta(0.5), 0.6676914571896091, max_relative = 1e-12);
        // Σ' |k|^{-1} over ℤ², analytically continued
        assert_relative_eq!(square_lattice_zeta(1.0), -3.900264920001955, max_relative = 1e-11);
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert_relative_eq!(v, exact, max_relative = 1e-13);
        let (_, w) = gauss_legendre(9);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }
}
