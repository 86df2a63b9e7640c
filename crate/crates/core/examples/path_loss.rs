//! Floating-Intercept path loss against distance, and how often a link at a
//! given distance clears the 120 dB threshold once shadowing is added.

use relaylearn::channelsim::{fi_path_loss, sample_shadow, FiParams};
use relaylearn::dataset::{label, LabelRule};
use relaylearn::rng;

fn main() -> relaylearn::Result<()> {
    let fi = FiParams::default();
    let rule = LabelRule::default();
    let mut r = rng::seeded(1);
    let draws = 20_000;

    println!("alpha {} dB, beta {}, sigma {} dB", fi.alpha, fi.beta, fi.sigma);
    println!("{:>6} {:>10} {:>10}", "d (m)", "PL (dB)", "P(strong)");
    for d in [1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0] {
        let median = fi_path_loss(&fi, d, 0.0)?;
        let mut strong = 0;
        for _ in 0..draws {
            let pl = fi_path_loss(&fi, d, sample_shadow(&mut r, fi.sigma)?)?;
            strong += usize::from(label(pl, &rule)? == 1);
        }
        println!("{d:>6.1} {median:>10.2} {:>10.3}", strong as f64 / draws as f64);
    }
    Ok(())
}
