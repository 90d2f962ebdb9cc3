//! Compensated summation. Plain accumulation over ~10^5 critical inputs
//! drifts by a few parts in 10^12, which is exactly the tolerance band the
//! unit-norm and mass-split checks live in; Neumaier's correction keeps the
//! error at a few ulps regardless of length.

pub(crate) fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}
