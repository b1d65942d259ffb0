//! Writes a synthetic Arizona-style crash CSV.
//!
//! Usage: synth_crash <out.csv> [rows] [seed]

use std::error::Error;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// (raw collision manner, sampling weight, effect on severity)
const MANNERS: &[(&str, u32, f64)] = &[
    ("Single Vehicle", 18, 0.5),
    ("Rear End", 30, -0.3),
    ("ANGLE (Front To Side)-(Other Than Left Turn)", 12, 0.6),
    ("Left Turn", 10, 0.8),
    ("U Turn", 2, 0.2),
    ("Sideswipe Same Direction", 10, -0.8),
    ("Sideswipe Opposite Direction", 3, 0.4),
    ("Head On", 3, 1.8),
    ("Rear To Rear", 1, -0.5),
    ("Rear To Side", 2, 0.0),
    ("10", 1, 0.0),
    ("Other", 3, 0.0),
    ("Unknown", 2, 0.0),
    ("", 2, 0.0),
    ("Backing", 1, -0.4),
];

const SEVERITY_NO: &str = "No Injury";
const SEVERITY_YES: &[&str] = &["Possible Injury", "Suspected Minor Injury", "Suspected Serious Injury", "Fatal"];

fn main() -> Result<(), Box<dyn Error>> {
    let args: Vec<String> = std::env::args().collect();
    let out = args.get(1).ok_or("usage: synth_crash <out.csv> [rows] [seed]")?;
    let rows: usize = args.get(2).map_or(Ok(2400), |s| s.parse())?;
    let seed: u64 = args.get(3).map_or(Ok(7), |s| s.parse())?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = WeightedIndex::new(MANNERS.iter().map(|m| m.1))?;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["ReportId", "CollisionManner", "NumberOfVehicles", "SpeedLimit", "Lighting", "InjurySeverity"])?;
    for id in 0..rows {
        let (manner, _, effect) = MANNERS[pick.sample(&mut rng)];
        let vehicles: u32 = if manner == "Single Vehicle" { 1 } else { rng.gen_range(2..=5) };
        let speed: u32 = 5 * rng.gen_range(5..=15);
        let lighting: u32 = rng.gen_range(1..=4);
        let z = -1.0
            + effect
            + 0.35 * f64::from(vehicles.saturating_sub(2))
            + 0.04 * (f64::from(speed) - 45.0)
            + if lighting >= 3 { 0.5 } else { 0.0 };
        let p = 1.0 / (1.0 + (-z).exp());
        let severity = if rng.gen_bool(p) {
            SEVERITY_YES[rng.gen_range(0..SEVERITY_YES.len())]
        } else {
            SEVERITY_NO
        };
        w.write_record([
            format!("AZ{id:05}"),
            manner.to_string(),
            vehicles.to_string(),
            speed.to_string(),
            lighting.to_string(),
            severity.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
