use num_traits::{Float, FromPrimitive};
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::hierarchy::{ell, kappa_star};
use crate::Rng;

fn c<T: FromPrimitive>(v: f64) -> T {
    T::from_f64(v).expect("representable constant")
}

fn from_usize<T: FromPrimitive>(v: usize) -> T {
    T::from_usize(v).expect("representable integer")
}

/// `(n - 1)(r - 1 - j*)^2`: variance cap of a rest sum when every other row
/// has all mass in `[j* .. r - 1]`.
pub fn variance_bound<T: Float + FromPrimitive>(n: usize, r: usize, j_star: usize) -> Result<T> {
    if n < 1 || r < 2 || j_star > r - 1 {
        return Err(Error::InvalidParameter(format!("variance bound needs j* <= r - 1 (n={n}, r={r}, j*={j_star})")));
    }
    let width = from_usize::<T>(r - 1 - j_star);
    Ok(from_usize::<T>(n - 1) * width * width)
}

/// `9 max{1, delta} / (32(4 sigma - 1))`, a lower bound on
/// `P[D in [0..delta]]`.
pub fn biased_window_bound<T: Float + FromPrimitive>(delta: u64, sigma: T) -> Result<T> {
    let d = T::from_u64(delta).expect("representable");
    if sigma <= c(0.25) || sigma < (d + c(2.0)) / c(4.0) {
        return Err(Error::Precondition(format!(
            "sigma must exceed 1/4 and be at least (delta + 2)/4 (delta = {delta})"
        )));
    }
    Ok(c::<T>(9.0) * d.max(T::one()) / (c::<T>(32.0) * (c::<T>(4.0) * sigma - T::one())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftPrediction<T> {
    /// The constant-explicit expression.
    pub formula: T,
    /// `c_drift s (1 - s) / (29 sqrt(n))`.
    pub fallback: T,
    /// `l_kappa` used by the formula.
    pub ell: usize,
}

impl<T: Float> DriftPrediction<T> {
    pub fn fallback_holds(&self) -> bool {
        self.formula >= self.fallback
    }
}

/// Per-step drift predicted for `mu(S_{kappa+1})` (scaled by `K`), where
/// `s = mu(S_{kappa+1})` and `c_drift` lower-bounds
/// `mu(S_{kappa+2}) / mu(S_{kappa+1})`.
pub fn drift_prediction<T: Float + FromPrimitive>(
    n: usize,
    r: usize,
    kappa: usize,
    c_drift: T,
    s: T,
) -> Result<DriftPrediction<T>> {
    if r < 10 {
        return Err(Error::Precondition(format!("drift bound needs r >= 10, got {r}")));
    }
    if n < 4 {
        return Err(Error::Precondition(format!("drift bound needs n >= 4, got {n}")));
    }
    if kappa >= kappa_star(r) {
        return Err(Error::Precondition(format!("kappa = {kappa} has no interval boundary")));
    }
    let l = ell(r, kappa);
    if l + 10 > r {
        return Err(Error::Precondition(format!("l_kappa = {l} exceeds r - 10")));
    }
    if !(s > T::zero() && s < T::one()) {
        return Err(Error::Precondition("mass s must lie in (0, 1)".into()));
    }
    if c_drift <= T::zero() {
        return Err(Error::Precondition("c_drift must be positive".into()));
    }
    let width = from_usize::<T>(r - 1 - l);
    let spread = s * (T::one() - s);
    let sigma = (from_usize::<T>(n - 1) * width * width).sqrt();
    let formula = c::<T>(9.0) * c_drift * spread * (width / c(2.0)).max(T::one())
        / (c::<T>(32.0) * (c::<T>(4.0) * sigma - T::one()));
    let fallback = c_drift * spread / (c::<T>(29.0) * from_usize::<T>(n).sqrt());
    Ok(DriftPrediction { formula, fallback, ell: l })
}

/// `max{min{(1-a)P0, 1-(1-a)P0}, min{(1+a)P0, 1-(1+a)P0}}`.
pub fn martingale_beta<T: Float>(alpha: T, p0: T) -> T {
    let lo = (T::one() - alpha) * p0;
    let hi = (T::one() + alpha) * p0;
    lo.min(T::one() - lo).max(hi.min(T::one() - hi))
}

/// `2 exp(-3(a P0 K)^2 / (4 max{6 t beta, a P0 K}))`; equals 2 when the
/// deviation radius is zero.
pub fn martingale_bound<T: Float + FromPrimitive>(alpha: T, p0: T, k: u64, t: u64, beta: T) -> T {
    let radius = alpha * p0 * T::from_u64(k).expect("representable");
    let var_term = c::<T>(6.0) * T::from_u64(t).expect("representable") * beta;
    let denom = c::<T>(4.0) * var_term.max(radius);
    if denom <= T::zero() {
        return c(2.0);
    }
    c::<T>(2.0) * (-(c::<T>(3.0) * radius * radius) / denom).exp()
}

/// `t exp(-(1 - b delta)(1 - b)^2 delta^2 mu / 2)` with `mu = t p`.
pub fn chernoff_variant_bound<T: Float + FromPrimitive>(t: u64, p: T, delta: T, b: T) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
    }
    if b >= T::one() || b < T::zero() {
        return Err(Error::InvalidParameter("b must lie in [0, 1)".into()));
    }
    let tt = T::from_u64(t).expect("representable");
    let mu = tt * p;
    let one_minus_b = T::one() - b;
    Ok(tt * (-(T::one() - b * delta) * one_minus_b * one_minus_b * delta * delta * mu / c(2.0)).exp())
}

/// Runs the extremal self-reinforcing Bernoulli process where
/// `P[X_s = 1] = (rho p + eta Z_{s-1}) / (rho + eta (s - 1))` exactly, and
/// returns `Z_0 ..= Z_t`.
pub fn simulate_reinforced_bernoulli(t: u64, p: f64, rho: f64, eta: f64, rng: &mut Rng) -> Result<Vec<u64>> {
    if !(0.0..=1.0).contains(&p) || rho <= 0.0 || eta < 0.0 {
        return Err(Error::InvalidParameter("need p in [0, 1], rho > 0, eta >= 0".into()));
    }
    let mut z = Vec::with_capacity(t as usize + 1);
    z.push(0u64);
    let mut successes = 0u64;
    for s in 1..=t {
        let prob = (rho * p + eta * successes as f64) / (rho + eta * (s - 1) as f64);
        if rng.gen::<f64>() < prob {
            successes += 1;
        }
        z.push(successes);
    }
    Ok(z)
}

/// `(ln(X0 / x_min) + gamma) / delta`, the horizon after which the hitting
/// time exceeds it with probability at most `q + e^-gamma`.
pub fn mult_drift_time<T: Float>(x0: T, x_min: T, gamma: T, delta: T) -> Result<T> {
    if !(delta > T::zero() && delta < T::one()) {
        return Err(Error::InvalidParameter("delta must lie in (0, 1)".into()));
    }
    if !(x_min > T::zero() && x0 >= x_min) {
        return Err(Error::InvalidParameter("need X0 >= x_min > 0".into()));
    }
    if gamma <= T::zero() {
        return Err(Error::InvalidParameter("gamma must be positive".into()));
    }
    Ok(((x0 / x_min).ln() + gamma) / delta)
}

pub fn mult_drift_tail<T: Float>(q: T, gamma: T) -> T {
    q + (-gamma).exp()
}

/// `K r sqrt(n) (ln r + ln K)`, constant-free.
pub fn adak_witt_bound<T: Float + FromPrimitive>(n: usize, r: usize, k: u64) -> Result<T> {
    if r < 2 || n < 1 || k < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 1, r >= 2, K >= 1 (n={n}, r={r}, K={k})")));
    }
    let kk = T::from_u64(k).expect("representable");
    let rr = from_usize::<T>(r);
    Ok(kk * rr * from_usize::<T>(n).sqrt() * (rr.ln() + kk.ln()))
}

/// `K sqrt(n) ln n ln r`, the normalizer for runtime scaling.
pub fn rcga_on_gom_scale<T: Float + FromPrimitive>(n: usize, r: usize, k: u64) -> T {
    let nn = from_usize::<T>(n);
    T::from_u64(k).expect("representable") * nn.sqrt() * nn.ln() * from_usize::<T>(r).ln()
}

/// `c r sqrt(n) ln^2 n ln^2 r`.
pub fn theorem_k<T: Float + FromPrimitive>(n: usize, r: usize, c_star: T) -> T {
    let nn = from_usize::<T>(n);
    let rr = from_usize::<T>(r);
    let (ln_n, ln_r) = (nn.ln(), rr.ln());
    c_star * rr * nn.sqrt() * ln_n * ln_n * ln_r * ln_r
}

/// `c r^2 sqrt(n) ln n`.
pub fn adak_witt_k<T: Float + FromPrimitive>(n: usize, r: usize, c_star: T) -> T {
    let nn = from_usize::<T>(n);
    let rr = from_usize::<T>(r);
    c_star * rr * rr * nn.sqrt() * nn.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_bound::<f64>(101, 11, 0), Ok(10000.0));
        assert_eq!(variance_bound::<f64>(101, 11, 10), Ok(0.0));
        assert!(variance_bound::<f64>(101, 11, 11).is_err());
    }

    #[test]
    fn biased_window_examples() {
        assert!(close(biased_window_bound(0, 10.0f64).unwrap(), 9.0 / 1248.0, 1e-15));
        assert!(close(biased_window_bound(4, 10.0f64).unwrap(), 36.0 / 1248.0, 1e-15));
        assert_eq!(biased_window_bound(1, 10.0f64), biased_window_bound(0, 10.0f64));
        assert!(biased_window_bound(0, 0.25f64).is_err());
        assert!(biased_window_bound(40, 10.0f64).is_err());
        let single: f32 = biased_window_bound(0, 10.0f32).unwrap();
        assert!((single - 0.007_211_538).abs() < 1e-7);
    }

    #[test]
    fn drift_examples() {
        let d = drift_prediction(101, 11, 0, 0.4, 7.0 / 11.0).unwrap();
        assert!(close(d.formula, 3.262_287_951_283_166_7e-4, 1e-12));
        assert!(close(d.fallback, 3.175_952_274_252_459e-4, 1e-12));
        assert!(d.fallback_holds());
        assert_eq!(d.ell, 0);
        let tiny = drift_prediction(101, 11, 0, 0.4, 1e-12).unwrap();
        assert!(tiny.formula < 1e-14);
        assert!(drift_prediction(101, 9, 0, 0.4, 0.5).is_err());
        assert!(drift_prediction(3, 11, 0, 0.4, 0.5).is_err());
        assert!(drift_prediction(101, 11, 1, 0.4, 0.5).is_err());
        assert!(drift_prediction(101, 11, 0, 0.4, 1.0).is_err());
    }

    #[test]
    fn martingale_examples() {
        assert!(close(martingale_beta(0.5, 0.2), 0.3, 1e-15));
        let b = martingale_bound(0.5, 0.2, 1000, 1000, 0.3);
        assert!(close(b, 0.031_007_707_198_018_628, 1e-12));
        assert_eq!(martingale_bound(0.0, 0.2, 1000, 1000, 0.3), 2.0);
        assert_eq!(martingale_bound(0.0, 0.0, 1000, 0, 0.0), 2.0);
    }

    #[test]
    fn chernoff_examples() {
        let b = chernoff_variant_bound(1000, 0.5, 0.5, 0.5).unwrap();
        assert!(close(b, 8.139_758_880_082_828e-3, 1e-12));
        let vacuous = chernoff_variant_bound(1000, 0.5, 1e-9, 0.5).unwrap();
        assert!(close(vacuous, 1000.0, 1e-9));
        assert!(chernoff_variant_bound(10, 0.5, 0.5, 1.0f64).is_err());
        assert!(chernoff_variant_bound(10, 0.5, 1.0, 0.5f64).is_err());
    }

    #[test]
    fn reinforced_simulator_start() {
        let mut rng = seeded_rng(5);
        let z = simulate_reinforced_bernoulli(0, 0.3, 10.0, 1.0, &mut rng).unwrap();
        assert_eq!(z, vec![0]);
        // With eta = 0 the process is an ordinary Binomial(t, p) walk.
        let z = simulate_reinforced_bernoulli(5, 1.0, 1.0, 0.0, &mut rng).unwrap();
        assert_eq!(z, vec![0, 1, 2, 3, 4, 5]);
        assert!(simulate_reinforced_bernoulli(5, 0.5, 0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn multiplicative_drift_examples() {
        let beta = mult_drift_time(1.0, 1e-3, 100f64.ln(), 0.01).unwrap();
        assert!(close(beta, 1_151.292_546_497_022_8, 1e-12));
        assert!(close(mult_drift_tail(0.02, 100f64.ln()), 0.03, 1e-12));
        assert!(close(mult_drift_tail(0.02, 800.0), 0.02, 1e-15));
        assert!(close(mult_drift_time(0.5, 0.5, 2.0, 0.1).unwrap(), 20.0, 1e-12));
        assert!(mult_drift_time(1.0, 1e-3, 1.0, 1.0).is_err());
    }

    #[test]
    fn adak_witt_examples() {
        assert!(close(adak_witt_bound::<f64>(100, 4, 40).unwrap(), 8_120.278_104_374_122, 1e-12));
        assert!(adak_witt_bound::<f64>(100, 1, 40).is_err());
        let a = adak_witt_bound::<f64>(100, 4, 40).unwrap();
        let b = adak_witt_bound::<f64>(100, 4, 80).unwrap();
        let log_ratio = (4f64.ln() + 80f64.ln()) / (4f64.ln() + 40f64.ln());
        assert!(close(b, 2.0 * a * log_ratio, 1e-12));
    }

    #[test]
    fn k_rules() {
        assert!(close(theorem_k(100, 8, 0.25), 1_834.065_307_199_925_7, 1e-12));
        assert!(close(adak_witt_k(100, 8, 1.0), 64.0 * 10.0 * 100f64.ln(), 1e-12));
    }
}
