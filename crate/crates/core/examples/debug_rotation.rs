use randinf_core::groups::{block_rotation_group, BlockRotationMode};
use randinf_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    let spec = block_rotation_group(9, BlockRotationMode::CyclicPerBlock, 100_000).unwrap();
    let elems = spec.realize().unwrap();
    println!("group size: {}", elems.len());
    let explicit = GroupSpec::explicit(elems.clone()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let xs: Vec<f64> = (0..9).map(|_| 3.0 + 2.0 * rng.gen::<f64>()).collect();
        let s = Sample::new(xs).unwrap();
        let avg = group_average_phi(&s, &explicit, &TestStatistic::max_abs(), 0.05).unwrap();
        println!("orbit avg phi = {avg}");
        let d = run_randomization_test(&s, &explicit, &TestStatistic::max_abs(), 0.05).unwrap();
        println!("  decision: phi={} p={} k={} m_plus={} m_zero={}", d.phi, d.p_value, d.k, d.m_plus, d.m_zero);
    }
}
