//! One-off oracle run backing the size-distortion regression baseline in
//! the acceptance suite: sign-change test, centered exponential data, n=5,
//! abs-mean statistic, level 0.05, one million replicates.
//!
//! Output with this seed: rate 0.0864448, standard error 0.000281.

use randinf_core::*;

fn main() {
    let group = groups::sign_change_group(5, None).unwrap();
    let t0 = std::time::Instant::now();
    let est = estimate_rejection_rate(
        Dgp::CenteredExponential,
        &group,
        &TestStatistic::AbsMean,
        0.05,
        5,
        1_000_000,
        0xD15EA5E,
    )
    .unwrap();
    println!("oracle rate = {:.10}", est.rate);
    println!("se          = {:.10}", est.standard_error);
    println!("elapsed     = {:?}", t0.elapsed());
}
