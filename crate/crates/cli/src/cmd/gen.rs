use anyhow::Result;
use trajprune::{generate_synthetic, Mix, SyntheticSpec};

use super::format_for;
use crate::args::GenArgs;

pub fn run(args: GenArgs) -> Result<()> {
    let mix: Mix = args.mix.parse()?;
    let spec = SyntheticSpec {
        count: args.count,
        mix,
        points_per_trajectory: args.points,
        dt: args.dt,
        speed_range: (args.speed_min, args.speed_max),
        turn_radius_range: (args.radius_min, args.radius_max),
        noise_std: args.noise,
        seed: args.seed,
    };
    let data = generate_synthetic(&spec)?;
    trajprune::io::write_dataset(&data, &args.output, format_for(&args.output, args.format))?;
    Ok(())
}
