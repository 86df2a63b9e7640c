//! Synthesize the standard link dataset and write it as CSV.
//!
//! cargo run --example generate_dataset -- [out.csv] [n] [seed]

use std::path::PathBuf;

use relaylearn::channelsim::{gen_dataset, ScenarioConfig};
use relaylearn::dataset::{read_csv, write_csv};

fn main() -> relaylearn::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("relaylearn_links.csv"));
    let mut cfg = ScenarioConfig::default();
    if let Some(n) = args.next() {
        cfg.n_samples = n.parse().expect("n must be an integer");
    }
    if let Some(seed) = args.next() {
        cfg.seed = seed.parse().expect("seed must be an integer");
    }

    let samples = gen_dataset(&cfg)?;
    write_csv(&samples, &out)?;
    assert_eq!(read_csv(&out)?, samples);

    let strong = samples.iter().filter(|s| s.label == 1).count();
    let mean_pl = samples.iter().map(|s| s.path_loss_db).sum::<f64>() / samples.len() as f64;
    println!("{} links -> {}", samples.len(), out.display());
    println!("strong {strong}, weak {}, mean path loss {mean_pl:.2} dB", samples.len() - strong);
    for s in samples.iter().take(3) {
        println!(
            "  link {}: {:.1} m, PL {:.1} dB, rx {:.1} dBm, {} paths, label {}",
            s.link_id, s.distance_m, s.path_loss_db, s.rx_power_dbm, s.num_paths, s.label
        );
    }
    Ok(())
}
