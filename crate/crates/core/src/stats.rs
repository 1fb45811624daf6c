//! Small statistics helpers.

/// Arithmetic mean. Caller guarantees `xs` is non-empty.
pub(crate) fn mean(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by `n`, not `n - 1`), so a
/// single observation yields 0 rather than an undefined value.
pub(crate) fn population_std(xs: &[f64]) -> f64 {
    debug_assert!(!xs.is_empty());
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    libm::sqrt(var)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_std_of_single_value_is_zero() {
        assert_eq!(population_std(&[0.7]), 0.0);
    }

    #[test]
    fn population_std_matches_hand_computation() {
        // {1,2,3,4,5}: mean 3, variance 2
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((population_std(&xs) - libm::sqrt(2.0)).abs() < 1e-15);
    }
}
