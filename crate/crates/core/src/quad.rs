//! Gauss–Legendre quadrature.

#[allow(unused_imports)]
use num_traits::Float;

const ORDER: usize = 20;

/// Nodes and weights of the `ORDER`-point rule on `[-1, 1]`.
struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

impl Rule {
    fn new() -> Self {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            // Newton iteration from the Chebyshev-like initial guess.
            let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(ORDER, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(ORDER, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    }

    fn apply(&self, f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(self.weights.iter()) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of `f` over `[a, b]` on `panels` equal panels.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = Rule::new();
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            rule.apply(&mut f, lo, lo + h)
        })
        .sum()
}

/// Integral of `f` over `[0, b]` for `f` that may be singular (integrably) at
/// zero: equal panels of width `h`, with the first panel split into
/// geometrically shrinking pieces toward zero.
pub fn integrate_from_zero(mut f: impl FnMut(f64) -> f64, b: f64, h: f64) -> f64 {
    let rule = Rule::new();
    if b <= 0.0 {
        return 0.0;
    }
    let panels = ((b / h).ceil() as usize).max(1);
    let h = b / panels as f64;
    let mut total = 0.0;
    for i in 1..panels {
        let lo = h * i as f64;
        total += rule.apply(&mut f, lo, lo + h);
    }
    let mut hi = h;
    for _ in 0..200 {
        let lo = hi * 0.5;
        total += rule.apply(&mut f, lo, hi);
        hi = lo;
        if hi < 1e-300 {
            break;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        let r = Rule::new();
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn polynomials_are_exact() {
        let v = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1);
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn log_singularity_at_zero() {
        // ∫_0^1 ln x dx = -1
        let v = integrate_from_zero(|x| x.ln(), 1.0, 0.25);
        assert!((v + 1.0).abs() < 1e-12, "{v}");
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate_from_zero(|x| 1.0 / x.sqrt(), 1.0, 0.25);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
    }
}
