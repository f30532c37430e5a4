//! Exact small-ball probability of Z = B(E(t)) against a short Monte Carlo run.

use invsub::path::CompositionSpec;
use invsub::smallball::{mc_smallball_levels, smallball_z_series, SmallBallSeriesConfig};
use invsub::stable::{StableParams, SubordinatorParams};

fn main() -> invsub::Result<()> {
    let beta = 0.5;
    let us = [0.2, 0.5, 1.0];
    let spec = CompositionSpec::new(StableParams::brownian(2.0)?, SubordinatorParams::standard(beta)?, 1.0, 1025)?;
    let mc = mc_smallball_levels(&spec, &us, 20_000, 1, 0.9973)?;
    println!("{:>5} {:>10} {:>10} {:>10}", "u", "series", "mc", "+-");
    for (u, m) in us.iter().zip(&mc) {
        let exact = smallball_z_series(beta, *u, &SmallBallSeriesConfig::default())?;
        let b = m.best();
        println!("{u:>5} {exact:>10.5} {:>10.5} {:>10.5}", b.mean, b.half_width);
    }
    Ok(())
}
