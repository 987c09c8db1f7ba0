//! Plans surfaces in the projective plane with Stein neighborhoods and
//! replays the recipes.

use stein_nbhd::error::Error;
use stein_nbhd::invariants::stein_condition;
use stein_nbhd::surgery::{plan_cp2, replay_traced, PlanTarget};

fn main() -> stein_nbhd::error::Result<()> {
    let targets = [
        PlanTarget::oriented(1, 3, 0),
        PlanTarget::oriented(1, 0, 3),
        PlanTarget::oriented(2, 1, 5),
        PlanTarget::oriented(3, 10, 0),
        PlanTarget::oriented(1, 0, 2),
    ];
    for target in targets {
        let d = target.degree.unwrap_or_default();
        print!(
            "degree {d}, genus {}, delta+ {}: ",
            target.genus, target.delta_plus
        );
        match plan_cp2(target) {
            Ok(recipe) => {
                let trace = replay_traced(recipe.base(), recipe.steps())?;
                let names: Vec<_> = recipe.steps().iter().map(|s| s.name()).collect();
                println!("{} steps [{}]", names.len(), names.join(", "));
                println!("  -> {}", trace.result());
                println!(
                    "  index nonpositive: {}",
                    stein_condition(trace.result())?.pass
                );
            }
            Err(Error::Infeasible { rule, lhs, rhs }) => {
                println!("infeasible by {rule}: g + delta+ = {lhs} < {rhs}");
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
