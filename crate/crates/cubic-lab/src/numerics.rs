//! Shared numerical routines: special functions, quadrature, interpolation,
//! prime sieves, and small statistics helpers.
//!
//! Everything here is deterministic and side-effect free; the only caches are
//! lazily initialized constant tables (Gauss-Legendre nodes), which are
//! idempotent under concurrent initialization.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Bernoulli numbers B_2, B_4, ..., B_26 as floats.
pub const BERNOULLI_EVEN: [f64; 13] = [
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
    8553103.0 / 6.0,
];

/// Simple quadrature or special-function failure carrying the best error
/// estimate that was achieved before giving up.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadFailure {
    pub achieved: f64,
    pub target: f64,
}

impl std::fmt::Display for QuadFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "quadrature refinement stalled at error {:.3e} (target {:.3e})",
            self.achieved, self.target
        )
    }
}

impl std::error::Error for QuadFailure {}

// ---------------------------------------------------------------------------
// primes
// ---------------------------------------------------------------------------

/// All primes up to and including `n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Deterministic primality test by trial division; fine for the word-sized
/// moduli this crate works with.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = 7u64;
    while d.saturating_mul(d) <= n {
        for off in [0, 4] {
            let q = d + off;
            if q * q > n {
                break;
            }
            if n % q == 0 {
                return false;
            }
        }
        d += 6;
    }
    true
}

/// `base^exp mod m` with 128-bit intermediates.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Greatest common divisor.
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Prime factorization of a word-sized integer by trial division, as
/// `(prime, exponent)` pairs in increasing order.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

// ---------------------------------------------------------------------------
// gamma-family special functions
// ---------------------------------------------------------------------------

/// Principal-branch-per-segment log-gamma for complex arguments, via the
/// Stirling series after shifting the argument to real part >= 12.
///
/// The result is reliable up to an integer multiple of 2πi in the imaginary
/// part (the recurrence takes separate principal logarithms), which is
/// harmless everywhere this crate uses it: only `exp` of differences of
/// log-gammas ever reaches user-visible values.
///
/// Returns `Err` within 1e-10 of a pole (nonpositive integers).
pub fn lgamma_complex(z: Complex64) -> Result<Complex64, QuadFailure> {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 12.0 {
        if w.norm() < 1e-10 {
            return Err(QuadFailure {
                achieved: f64::INFINITY,
                target: 0.0,
            });
        }
        shift += w.ln();
        w += 1.0;
    }
    let w2 = w * w;
    let mut series = Complex64::new(0.0, 0.0);
    let mut wp = w;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate().take(9) {
        let k = 2 * (j + 1);
        series += b / ((k * (k - 1)) as f64) / wp;
        wp *= w2;
    }
    let half_log_two_pi = 0.918_938_533_204_672_74; // ln(2π)/2
    let stirling = (w - 0.5) * w.ln() - w + half_log_two_pi + series;
    Ok(stirling - shift)
}

/// Digamma function for positive real arguments.
pub fn digamma(x: f64) -> f64 {
    digamma_with_lift(x, 12.0)
}

/// Digamma with an explicit recurrence threshold, exposed so callers can
/// verify stability of downstream values under doubling the parameter.
pub fn digamma_with_lift(mut x: f64, lift: f64) -> f64 {
    assert!(x > 0.0, "digamma requires a positive argument");
    assert!(lift >= 12.0, "the asymptotic series needs x at least 12");
    let mut acc = 0.0;
    while x < lift {
        acc -= 1.0 / x;
        x += 1.0;
    }
    // ψ(x) ~ ln x - 1/(2x) - Σ_j B_2j / (2j x^{2j})
    let mut tail = 0.0;
    let mut xp = x * x;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate().take(8) {
        let k = (2 * (j + 1)) as f64;
        tail -= b / (k * xp);
        xp *= x * x;
    }
    acc + x.ln() - 0.5 / x + tail
}

// ---------------------------------------------------------------------------
// Hurwitz zeta by Euler-Maclaurin
// ---------------------------------------------------------------------------

/// Shift count and correction depth for the Euler-Maclaurin evaluation.
const EM_SHIFT: u32 = 20;
const EM_TERMS: usize = 12;

/// Hurwitz zeta ζ(s, x) for x > 0, s ≠ 1, by Euler-Maclaurin summation.
/// Returns the value together with a (generous) bound on the absolute error.
pub fn hurwitz_zeta(s: Complex64, x: f64) -> (Complex64, f64) {
    hurwitz_zeta_with_shift(s, x, EM_SHIFT)
}

/// Hurwitz zeta with an explicit Euler-Maclaurin shift count, exposed so
/// callers can verify stability under doubling the parameter.
pub fn hurwitz_zeta_with_shift(s: Complex64, x: f64, n: u32) -> (Complex64, f64) {
    assert!(x > 0.0, "hurwitz_zeta requires x > 0");
    assert!(
        (s - Complex64::new(1.0, 0.0)).norm() > 1e-12,
        "hurwitz_zeta has a pole at s = 1"
    );
    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..n {
        head += (-s * (x + k as f64).ln()).exp();
    }
    let xn = x + n as f64;
    let lxn = xn.ln();
    let tail_pole = (-(s - 1.0) * lxn).exp() / (s - 1.0);
    let tail_half = 0.5 * (-s * lxn).exp();
    let mut corr = Complex64::new(0.0, 0.0);
    // Pochhammer (s)_{2j-1} built incrementally; factorial in extended range.
    let mut poch = s; // (s)_1
    let mut fact = 2.0f64; // (2j)! for j = 1
    let mut power = (-(s + 1.0) * lxn).exp(); // (x+n)^{-s-1}
    let mut last_mag = 0.0f64;
    for j in 1..=EM_TERMS {
        let term = BERNOULLI_EVEN[j - 1] / fact * poch * power;
        corr += term;
        last_mag = term.norm();
        // advance to j+1: multiply Pochhammer by (s+2j-1)(s+2j), factorial by
        // (2j+1)(2j+2), power by (x+n)^{-2}
        let tj = 2 * j as i32;
        poch *= (s + (tj - 1) as f64) * (s + tj as f64);
        fact *= ((tj + 1) * (tj + 2)) as f64;
        power *= (-2.0 * lxn).exp();
    }
    // The series is asymptotic with error comparable to the first omitted
    // term; the last included term times a safety factor is a usable bound.
    let err = last_mag * 2.0 + 1e-16 * head.norm();
    (head + tail_pole + tail_half + corr, err)
}

/// Regularized value lim_{s→1} (ζ(s, x) − 1/(s−1)) = −ψ(x).
pub fn hurwitz_zeta_reg_at_one(x: f64) -> f64 {
    -digamma(x)
}

// ---------------------------------------------------------------------------
// Gauss-Legendre quadrature
// ---------------------------------------------------------------------------

/// Nodes and weights for `n`-point Gauss-Legendre quadrature on [-1, 1].
fn gauss_legendre_raw(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi-style initial guess, then Newton.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Cached 20-point rule used by the adaptive integrator.
fn gl20() -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre_raw(20))
}

/// Cached 60-point rule for one-shot smooth integrals.
pub fn gl60() -> &'static [(f64, f64)] {
    static CACHE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    CACHE.get_or_init(|| gauss_legendre_raw(60))
}

fn gl_panel(f: &impl Fn(f64) -> Complex64, a: f64, b: f64, rule: &[(f64, f64)]) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in rule {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// Accumulate a long sum of complex terms in fixed-size blocks before
/// combining the block totals. Serial accumulation rounding grows linearly
/// with the term count, which drowns sub-1e-10 refinement targets once a
/// trapezoid sum reaches a few hundred thousand nodes; blocking keeps the
/// partial-sum chain short without allocating.
pub(crate) struct BlockedSum {
    total: Complex64,
    block: Complex64,
    in_block: u32,
}

impl BlockedSum {
    const BLOCK: u32 = 1024;

    pub(crate) fn new() -> Self {
        BlockedSum {
            total: Complex64::new(0.0, 0.0),
            block: Complex64::new(0.0, 0.0),
            in_block: 0,
        }
    }

    pub(crate) fn add(&mut self, term: Complex64) {
        self.block += term;
        self.in_block += 1;
        if self.in_block == Self::BLOCK {
            self.total += self.block;
            self.block = Complex64::new(0.0, 0.0);
            self.in_block = 0;
        }
    }

    pub(crate) fn finish(self) -> Complex64 {
        self.total + self.block
    }
}

/// Adaptive Gauss-Legendre integration of a smooth complex integrand over a
/// finite interval. Bisects panels until the whole-panel and split-panel
/// estimates agree within the local share of `tol`.
pub fn integrate_adaptive(
    f: impl Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<(Complex64, f64), QuadFailure> {
    fn recurse(
        f: &impl Fn(f64) -> Complex64,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
        err_acc: &mut f64,
    ) -> Result<Complex64, QuadFailure> {
        let mid = 0.5 * (a + b);
        let rule = gl20();
        let left = gl_panel(f, a, mid, rule);
        let right = gl_panel(f, mid, b, rule);
        let diff = (left + right - whole).norm();
        if diff <= tol || depth >= 24 {
            if depth >= 24 && diff > tol {
                return Err(QuadFailure {
                    achieved: diff,
                    target: tol,
                });
            }
            *err_acc += diff;
            return Ok(left + right);
        }
        let l = recurse(f, a, mid, left, 0.5 * tol, depth + 1, err_acc)?;
        let r = recurse(f, mid, b, right, 0.5 * tol, depth + 1, err_acc)?;
        Ok(l + r)
    }
    let whole = gl_panel(&f, a, b, gl20());
    let mut err = 0.0;
    let v = recurse(&f, a, b, whole, tol, 0, &mut err)?;
    Ok((v, err))
}

// ---------------------------------------------------------------------------
// integrals over the whole real line
// ---------------------------------------------------------------------------

/// Integral of a decaying integrand over the real line by trapezoid sums with
/// nested refinement. The integrand must decay fast enough that expanding the
/// truncation window until the endpoint magnitude falls below a fraction of
/// the peak magnitude captures the tail; this matches every contour integrand
/// in this crate (Gaussian or super-polynomial decay).
pub fn integrate_line(
    g: impl Fn(f64) -> Complex64,
    initial_half_width: f64,
    tol: f64,
) -> Result<(Complex64, f64), QuadFailure> {
    // Expand the window until the endpoints are negligible.
    let mut half = initial_half_width.max(1.0);
    let peak = g(0.0).norm().max(g(0.37).norm()).max(1e-300);
    let tail_cut = (tol * 1e-3).min(1e-14) * peak.max(1.0);
    let mut expansions = 0;
    while g(half).norm() > tail_cut || g(-half).norm() > tail_cut {
        half *= 1.4;
        expansions += 1;
        if expansions > 60 {
            return Err(QuadFailure {
                achieved: g(half).norm(),
                target: tail_cut,
            });
        }
    }
    // Nested trapezoid refinement on [-half, half].
    let mut n: usize = 64;
    let mut h = 2.0 * half / n as f64;
    let mut sum = 0.5 * (g(-half) + g(half));
    for i in 1..n {
        sum += g(-half + i as f64 * h);
    }
    let mut value = sum * h;
    for _ in 0..14 {
        // halve the step, reusing previous nodes
        let mut odd = BlockedSum::new();
        for i in 0..n {
            odd.add(g(-half + (i as f64 + 0.5) * h));
        }
        let refined = (value + odd.finish() * h) * 0.5;
        let diff = (refined - value).norm();
        n *= 2;
        h *= 0.5;
        value = refined;
        if diff <= tol * (1.0 + value.norm()) {
            return Ok((value, diff));
        }
    }
    Err(QuadFailure {
        achieved: (value.norm() * 1e-9).max(tol * 10.0),
        target: tol,
    })
}

// ---------------------------------------------------------------------------
// interpolation tables
// ---------------------------------------------------------------------------

/// Uniform-grid table with 4-point Lagrange (cubic) interpolation, O(h^4)
/// accurate for smooth data.
#[derive(Debug, Clone)]
pub struct CubicTable {
    pub t0: f64,
    pub h: f64,
    pub values: Vec<Complex64>,
}

impl CubicTable {
    pub fn t_max(&self) -> f64 {
        self.t0 + self.h * (self.values.len() - 1) as f64
    }

    /// Interpolated value; the argument must lie within the tabulated range.
    pub fn eval(&self, t: f64) -> Complex64 {
        let n = self.values.len();
        debug_assert!(n >= 4, "table too small");
        let pos = (t - self.t0) / self.h;
        let mut i = pos.floor() as isize;
        if i < 1 {
            i = 1;
        }
        if i > n as isize - 3 {
            i = n as isize - 3;
        }
        let i = i as usize;
        let u = pos - i as f64; // in [0,1] away from the edges
        let vm1 = self.values[i - 1];
        let v0 = self.values[i];
        let v1 = self.values[i + 1];
        let v2 = self.values[i + 2];
        // Lagrange basis for nodes -1, 0, 1, 2 evaluated at u.
        let lm1 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l2 = (u + 1.0) * u * (u - 1.0) / 6.0;
        vm1 * lm1 + v0 * l0 + v1 * l1 + v2 * l2
    }
}

// ---------------------------------------------------------------------------
// statistics helpers
// ---------------------------------------------------------------------------

/// Least-squares slope and intercept of y against x.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    assert_eq!(xs.len(), ys.len());
    assert!(xs.len() >= 2, "need at least two points to fit a line");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of log y against log x.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_line(&lx, &ly).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn primes_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(is_prime(9973));
        assert!(!is_prime(9975));
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
    }

    #[test]
    fn pow_mod_agrees_with_naive() {
        for &(b, e, m) in &[(3u64, 20u64, 1000u64), (7, 13, 101), (2, 64, 97)] {
            let mut naive = 1u64;
            for _ in 0..e {
                naive = naive * b % m;
            }
            assert_eq!(pow_mod(b, e, m), naive);
        }
    }

    #[test]
    fn lgamma_matches_real_reference() {
        for x in [0.5f64, 1.0, 2.5, 7.25, 11.0, 25.0] {
            let ours = lgamma_complex(Complex64::new(x, 0.0)).unwrap();
            assert!((ours.re - ln_gamma(x)).abs() < 1e-12, "x = {x}");
            assert!(ours.im.abs() < 1e-12);
        }
    }

    #[test]
    fn lgamma_on_critical_line_magnitude() {
        // |Γ(1/2 + it)|² = π / cosh(πt)
        for t in [0.5f64, 1.0, 3.0, 10.0] {
            let lg = lgamma_complex(Complex64::new(0.5, t)).unwrap();
            let mag2 = (2.0 * lg.re).exp();
            let expect = std::f64::consts::PI / (std::f64::consts::PI * t).cosh();
            assert!(
                (mag2 / expect - 1.0).abs() < 1e-11,
                "t = {t}: {mag2} vs {expect}"
            );
        }
    }

    #[test]
    fn lgamma_recurrence_consistency() {
        // Γ(z+1) = zΓ(z) for a complex argument with negative real part.
        let z = Complex64::new(-3.3, 1.7);
        let a = lgamma_complex(z + 1.0).unwrap();
        let b = lgamma_complex(z).unwrap();
        let ratio = (a - b).exp();
        assert!((ratio - z).norm() < 1e-10 * z.norm());
    }

    #[test]
    fn digamma_reference_values() {
        // ψ(1) = -γ, ψ(1/2) = -γ - 2 ln 2
        let gamma = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + gamma).abs() < 1e-12);
        assert!((digamma(0.5) + gamma + 2.0 * (2.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn hurwitz_zeta_reproduces_zeta_two() {
        let (v, err) = hurwitz_zeta(Complex64::new(2.0, 0.0), 1.0);
        let expect = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        assert!(err < 1e-12);
        assert!((v.re - expect).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn hurwitz_zeta_splits_over_residues() {
        // ζ(s) = q^{-s} Σ_{a=1..q} ζ(s, a/q) for q = 5 at a complex point.
        let s = Complex64::new(1.4, 0.6);
        let q = 5.0f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for a in 1..=5 {
            sum += hurwitz_zeta(s, a as f64 / q).0;
        }
        let lhs = (-s * q.ln()).exp() * sum;
        let rhs = hurwitz_zeta(s, 1.0).0;
        assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn hurwitz_regularized_at_one() {
        // ζ(s, 1) - 1/(s-1) → -ψ(1) = γ
        let s = Complex64::new(1.0 + 1e-6, 0.0);
        let (v, _) = hurwitz_zeta(s, 1.0);
        let reg = v - 1.0 / (s - 1.0);
        assert!((reg.re - hurwitz_zeta_reg_at_one(1.0)).abs() < 1e-5);
    }

    #[test]
    fn adaptive_integration_of_gaussian() {
        let (v, _) = integrate_adaptive(
            |x| Complex64::new((-x * x).exp(), 0.0),
            -8.0,
            8.0,
            1e-12,
        )
        .unwrap();
        assert!((v.re - std::f64::consts::PI.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn line_integral_of_lorentz_gaussian() {
        // ∫ exp(-t²) cos(3t) dt = √π exp(-9/4)
        let (v, _) = integrate_line(
            |t| Complex64::new((-t * t).exp() * (3.0 * t).cos(), 0.0),
            4.0,
            1e-12,
        )
        .unwrap();
        let expect = std::f64::consts::PI.sqrt() * (-2.25f64).exp();
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn cubic_table_accuracy() {
        let h = 0.01;
        let t0 = -1.0;
        let values: Vec<Complex64> = (0..400)
            .map(|i| {
                let t = t0 + i as f64 * h;
                Complex64::new((2.0 * t).sin(), (1.5 * t).cos())
            })
            .collect();
        let table = CubicTable { t0, h, values };
        for &t in &[-0.5f64, 0.0, 0.3333, 1.234, 2.5] {
            let exact = Complex64::new((2.0 * t).sin(), (1.5 * t).cos());
            assert!((table.eval(t) - exact).norm() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn loglog_fit_recovers_power() {
        let xs = [10.0f64, 20.0, 40.0, 80.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(1.5)).collect();
        assert!((fit_loglog(&xs, &ys) - 1.5).abs() < 1e-12);
    }
}
