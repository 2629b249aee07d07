use statrs::distribution::{Binomial, ContinuousCDF, DiscreteCDF, Normal};

/// `P[Bin(trials, p) >= count]`.
pub fn binomial_upper_tail(count: u64, trials: u64, p: f64) -> f64 {
    if count == 0 {
        return 1.0;
    }
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if count <= trials { 1.0 } else { 0.0 };
    }
    let b = Binomial::new(p, trials).expect("valid binomial parameters");
    b.sf(count - 1)
}

/// `P[Bin(trials, p) <= count]`.
pub fn binomial_lower_tail(count: u64, trials: u64, p: f64) -> f64 {
    if count >= trials || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let b = Binomial::new(p, trials).expect("valid binomial parameters");
    b.cdf(count)
}

/// `z` with `P[N(0,1) > z] = alpha`.
pub fn normal_upper_quantile(alpha: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("standard normal");
    n.inverse_cdf(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tails_match_hand_values() {
        // Bin(3, 1/2): P[>= 2] = 4/8, P[<= 0] = 1/8.
        assert!((binomial_upper_tail(2, 3, 0.5) - 0.5).abs() < 1e-12);
        assert!((binomial_lower_tail(0, 3, 0.5) - 0.125).abs() < 1e-12);
        assert_eq!(binomial_upper_tail(0, 10, 0.3), 1.0);
        assert_eq!(binomial_upper_tail(1, 10, 0.0), 0.0);
        assert!((normal_upper_quantile(1e-3) - 3.090232306167813).abs() < 1e-6);
    }
}
