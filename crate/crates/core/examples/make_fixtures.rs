//! Regenerates the synthetic fixtures under `tests/fixtures`:
//! three years of harmonic SIE with known coefficients (values rounded to
//! three decimals, one sentinel day and one absent day) and an AR(1) NAO
//! series.
//!
//! `cargo run -p seaice-core --example make_fixtures`

use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use seaice_core::harmonic::{HarmonicFit, HarmonicSpec};
use seaice_core::ingest::CalendarDate;

pub const START: (i32, u32, u32) = (2015, 1, 1);
pub const DAYS: usize = 1096;
pub const TREND: [f64; 3] = [11.5, -1.5e-4, 2e-8];
pub const SINE: [f64; 4] = [-0.8, 0.25, -0.1, 0.05];
pub const COSINE: [f64; 4] = [4.2, -0.6, 0.15, -0.04];
pub const NAO_PHI: f64 = 0.6;
pub const NAO_SD: f64 = 0.5;

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let start = CalendarDate::new(START.0, START.1, START.2).unwrap();
    let end = start.add_days(DAYS as i64 - 1);
    let truth = HarmonicFit::from_coefficients(
        HarmonicSpec::default(),
        start,
        end,
        TREND,
        vec![SINE.to_vec()],
        vec![COSINE.to_vec()],
    )
    .unwrap();

    let mut sie = String::from(
        " Year, Month, Day,     Extent,    Missing, Source Data\n  YYYY,    MM,  DD, 10^6 sq km, 10^6 sq km, Source data product web sites\n",
    );
    for d in 0..DAYS {
        let date = start.add_days(d as i64);
        if d == 400 {
            continue;
        }
        let v = if d == 700 { -9999.0 } else { truth.eval(d as f64) };
        let _ = writeln!(
            sie,
            " {}, {:>5}, {:>3}, {:>10.3}, {:>10.3}, ['synthetic']",
            date.year(),
            date.month(),
            date.day(),
            v,
            0.0
        );
    }
    std::fs::write(dir.join("sie_synthetic.csv"), sie).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(20_150_101);
    let noise = Normal::new(0.0, NAO_SD).unwrap();
    let mut x = 0.0;
    let mut nao = String::new();
    for d in 0..DAYS {
        x = NAO_PHI * x + noise.sample(&mut rng);
        let date = start.add_days(d as i64);
        let _ = writeln!(nao, "{} {:2} {:2} {:.3}", date.year(), date.month(), date.day(), x);
    }
    std::fs::write(dir.join("nao_synthetic.txt"), nao).unwrap();
}
