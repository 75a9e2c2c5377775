//! One-dimensional quadrature building blocks: Gauss–Legendre rules with
//! cached node tables, and a globally adaptive Gauss–Kronrod 7–15 integrator
//! with a priori breakpoints.

use std::collections::BinaryHeap;
use std::sync::OnceLock;

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on the Legendre recurrence; accurate to ~1 ulp.
    pub fn new(order: usize) -> Self {
        assert!(order >= 2);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // p_{k+1}(x) via the three-term recurrence; dp is p_n'.
                let mut p0 = 1.0;
                let mut p1 = x;
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// Cached rules of order 16·2^k, k = 0..=4.
pub fn cached_gl(level: usize) -> &'static GaussLegendre {
    static TABLES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| (0..5).map(|k| GaussLegendre::new(16 << k)).collect());
    &tables[level.min(4)]
}

/// Number of cached doubling levels.
pub const GL_LEVELS: usize = 5;

// Gauss–Kronrod 7–15 nodes and weights (QUADPACK values).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

/// One Gauss–Kronrod 7–15 application; returns (value, error estimate).
pub fn gk15<F: FnMut(f64) -> f64>(lo: f64, hi: f64, mut f: F) -> (f64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let f_mid = f(mid);
    let mut result_gauss = WG[3] * f_mid;
    let mut result_kronrod = WGK[7] * f_mid;
    let mut resabs = WGK[7] * f_mid.abs();
    let mut fvals = [0.0f64; 15];
    fvals[7] = f_mid;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        fvals[j] = f1;
        fvals[14 - j] = f2;
        result_kronrod += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * result_kronrod;
    let mut resasc = WGK[7] * (f_mid - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fvals[j] - mean).abs() + (fvals[14 - j] - mean).abs());
    }
    resasc *= half.abs();
    resabs *= half.abs();
    let value = result_kronrod * half;
    let mut err = ((result_kronrod - result_gauss) * half).abs();
    // QUADPACK error model: scale the raw difference against the variation.
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * resabs;
    if round > f64::MIN_POSITIVE && err < round {
        err = round;
    }
    (value, err)
}

#[derive(Debug)]
struct Segment {
    err: f64,
    lo: f64,
    hi: f64,
    value: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOutcome {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Globally adaptive GK15 over [lo, hi], pre-split at the given interior
/// breakpoints, refining the worst segment until the summed error estimate
/// drops below `abs_tol` or `max_segments` is reached. Segments narrower than
/// ~1e-13 of the span are accepted as is to avoid chasing roundoff.
pub fn adaptive<F: FnMut(f64) -> f64>(
    lo: f64,
    hi: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_segments: usize,
    mut f: F,
) -> AdaptiveOutcome {
    debug_assert!(lo <= hi);
    if lo >= hi {
        return AdaptiveOutcome {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.insert(0, lo);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut done: Vec<Segment> = Vec::new();
    let mut total_err = 0.0;
    for pair in cuts.windows(2) {
        let (value, err) = gk15(pair[0], pair[1], &mut f);
        total_err += err;
        heap.push(Segment {
            err,
            lo: pair[0],
            hi: pair[1],
            value,
        });
    }

    let width_floor = (hi - lo) * 1e-13;
    while total_err > abs_tol && heap.len() + done.len() < max_segments {
        let worst = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        if worst.hi - worst.lo < width_floor || worst.err == 0.0 {
            // Too narrow to refine; its error stays in the total.
            done.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk15(worst.lo, mid, &mut f);
        let (v2, e2) = gk15(mid, worst.hi, &mut f);
        total_err += e1 + e2 - worst.err;
        heap.push(Segment {
            err: e1,
            lo: worst.lo,
            hi: mid,
            value: v1,
        });
        heap.push(Segment {
            err: e2,
            lo: mid,
            hi: worst.hi,
            value: v2,
        });
    }

    // Re-sum from the segments to shed accumulated cancellation.
    let mut value = 0.0;
    let mut error = 0.0;
    for s in heap.into_iter().chain(done) {
        value += s.value;
        error += s.err;
    }
    AdaptiveOutcome {
        value,
        error,
        converged: error <= abs_tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gauss_legendre_is_exact_on_polynomials() {
        let rule = GaussLegendre::new(16);
        // Degree ≤ 31 exactly.
        let got = rule.integrate(0.0, 1.0, |x| x.powi(20));
        assert!((got - 1.0 / 21.0).abs() < 1e-15);
        let got = rule.integrate(-2.0, 3.0, |x| 3.0 * x * x);
        assert!((got - 35.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_converges_on_smooth() {
        let exact = 1.0_f64.sin() - 0.0_f64.sin();
        for level in 0..GL_LEVELS {
            let got = cached_gl(level).integrate(0.0, 1.0, |x| x.cos());
            assert!((got - exact).abs() < 1e-14, "level {level}");
        }
    }

    #[test]
    fn gk15_error_estimate_is_conservative_on_smooth() {
        let (v, e) = gk15(0.0, 1.0, |x| (4.0 * x).sin());
        let exact = (1.0 - 4.0_f64.cos()) / 4.0;
        assert!((v - exact).abs() <= e.max(1e-15));
    }

    #[test]
    fn adaptive_handles_kinks_with_breakpoints() {
        // ∫_0^2 |x−1|^(3/2) dx = 2·(2/5) = 0.8
        let f = |x: f64| (x - 1.0).abs().powf(1.5);
        let out = adaptive(0.0, 2.0, &[1.0], 1e-12, 10_000, f);
        assert!(out.converged);
        assert!((out.value - 0.8).abs() < 1e-11, "{}", out.value);
    }

    #[test]
    fn adaptive_oscillatory() {
        let out = adaptive(0.0, PI, &[], 1e-12, 10_000, |x| (20.0 * x).cos() * x);
        // ∫_0^π x cos(20x) dx = [x sin(20x)/20 + cos(20x)/400]_0^π
        let exact = (PI * (20.0 * PI).sin()) / 20.0 + ((20.0 * PI).cos() - 1.0) / 400.0;
        assert!(out.converged);
        assert!((out.value - exact).abs() < 1e-12);
    }

    #[test]
    fn adaptive_reports_budget_exhaustion() {
        // Needle the integrator cannot resolve with 3 segments.
        let out = adaptive(0.0, 1.0, &[], 1e-14, 3, |x| (x - 0.3171).abs().sqrt());
        assert!(!out.converged);
        assert!(out.error > 1e-14);
    }

    #[test]
    fn adaptive_empty_interval() {
        let out = adaptive(1.0, 1.0, &[], 1e-12, 100, |_| panic!("must not evaluate"));
        assert_eq!(out.value, 0.0);
        assert!(out.converged);
    }
}
