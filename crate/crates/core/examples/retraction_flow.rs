//! Retracting a neighborhood onto the surface along the negative gradient.

use stein_nbhd::localgeo::{flow_to_surface, FlowOptions, LocalModel, ScalarField};
use stein_nbhd::suites::{sample_sublevel, DEFAULT_SEED};

fn main() -> stein_nbhd::error::Result<()> {
    let opts = FlowOptions::default();
    for model in LocalModel::ALL {
        println!("{model}:");
        for start in sample_sublevel(model, 0.01, 4, DEFAULT_SEED) {
            let r = flow_to_surface(&model, start, &opts)?;
            println!(
                "  {start} rho {:.2e} -> {} rho {:.2e} in {} steps",
                model.value(start),
                r.end(),
                r.final_value,
                r.trajectory.len() - 1
            );
        }
    }
    Ok(())
}
