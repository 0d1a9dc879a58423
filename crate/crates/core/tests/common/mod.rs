//! Independent numerical oracles for integration tests. Nothing here calls the
//! library's quadrature or special functions.

#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    h / 3.0 * (f(a) + inner + f(b))
}

/// `∫_a^b f` by composite Simpson, doubling the panel count from `pieces`
/// until successive estimates agree to `rel`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, rel: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut n = 2 * pieces;
    let mut prev = simpson(f, a, b, n);
    while n < 1 << 18 {
        n *= 2;
        let cur = simpson(f, a, b, n);
        if (cur - prev).abs() <= rel * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `ln I_ν(x)` by its power series, summed as a log-sum-exp over the terms.
pub fn ln_bessel_i(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let lh = (0.5 * x).ln();
    let mut t = nu * lh - ln_gamma(nu + 1.0);
    let mut peak = t;
    let mut terms = vec![t];
    let mut k = 0.0;
    // Past the peak (k > x/2) the terms fall faster than geometrically.
    while k < 0.5 * x + 5.0 || t > peak - 45.0 {
        t += 2.0 * lh - (k + 1.0).ln() - (k + nu + 1.0).ln();
        k += 1.0;
        peak = peak.max(t);
        terms.push(t);
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    peak + terms.iter().map(|t| (t - peak).exp()).sum::<f64>().ln()
}

/// Stirling series with shift; accurate to ~1e-14 for x > 0.
pub fn ln_gamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 15.0 {
        acc -= x.ln();
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)));
    acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Density of one Rician power gain with mean `omega`.
pub fn rician_pdf(x: f64, k: f64, omega: f64) -> f64 {
    let s = (k + 1.0) / omega;
    let arg = 2.0 * (k * s * x).sqrt();
    (s.ln() - k - s * x + ln_bessel_i(0.0, arg)).exp()
}

/// Density of the sum of `n` Rician power gains (noncentral chi-square form).
pub fn rician_sum_pdf(x: f64, k: f64, omega: f64, n: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let nf = n as f64;
    let s = (k + 1.0) / omega;
    if k == 0.0 {
        return (nf * s.ln() + (nf - 1.0) * x.ln() - s * x - ln_gamma(nf)).exp();
    }
    let arg = 2.0 * (k * nf * s * x).sqrt();
    let ln = s.ln() - k * nf + 0.5 * (nf - 1.0) * (s * x / (k * nf)).ln() - s * x + ln_bessel_i(nf - 1.0, arg);
    ln.exp()
}

/// `E[h(G)]` for the sum of `n` Rician gains.
pub fn rician_sum_expect(h: &dyn Fn(f64) -> f64, k: f64, omega: f64, n: usize) -> f64 {
    let mean = n as f64 * omega;
    let sd = (n as f64 * omega * omega * (1.0 + 2.0 * k) / (1.0 + k).powi(2)).sqrt();
    let hi = mean + 40.0 * sd + 40.0 * omega;
    let g = |x: f64| h(x) * rician_sum_pdf(x, k, omega, n);
    integrate(&g, 0.0, hi, 64, 1e-10)
}

/// Standard normal CDF via the complementary error function series/continued fraction.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc_oracle(-z / std::f64::consts::SQRT_2)
}

/// `erfc` from the Maclaurin series of erf (x < 2) or the Laplace continued fraction.
pub fn erfc_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_oracle(-x);
    }
    if x < 2.0 {
        // erf x = 2/√π Σ (−1)^n x^{2n+1} / (n! (2n+1))
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum;
    }
    // Backward evaluation of x + 1/2 / (x + 1 / (x + 3/2 / (x + …)))
    let mut frac = x;
    for k in (1..200).rev() {
        frac = x + (k as f64 / 2.0) / frac;
    }
    (-x * x).exp() / (std::f64::consts::PI.sqrt() * frac)
}

/// Gaussian-surrogate outage `P(mean of M·C draws ≤ R/M)`.
pub fn clt_outage(mean: f64, variance: f64, m: usize, c: usize, rate: f64) -> f64 {
    let n = (m * c) as f64;
    normal_cdf(n.sqrt() * (rate / m as f64 - mean) / variance.sqrt())
}

pub fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Pass/fail report printed one line per criterion.
#[derive(Default)]
pub struct Report {
    lines: Vec<(bool, String)>,
}

impl Report {
    pub fn record(&mut self, id: &str, pass: bool, detail: impl Into<String>) {
        let line = format!("[{}] {id}: {}", if pass { "PASS" } else { "FAIL" }, detail.into());
        println!("{line}");
        self.lines.push((pass, line));
    }

    pub fn failures(&self) -> Vec<&str> {
        self.lines.iter().filter(|l| !l.0).map(|l| l.1.as_str()).collect()
    }
}
