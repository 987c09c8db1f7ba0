//! Real projective planes summed onto the real points of the projective
//! plane stay below index zero, so each has a Stein neighborhood basis.

use stein_nbhd::invariants::{
    index_set_c2_unorientable, lai, stein_condition, ImmersionClass, SurfaceTopology,
};
use stein_nbhd::surgery::{plan_cp2, replay, PlanTarget, SurgeryStep};

fn main() -> stein_nbhd::error::Result<()> {
    let base = ImmersionClass::real_projective_plane_in_cp2();
    for k in 0..=5 {
        let imm = replay(&base, &vec![SurgeryStep::AttachRP2; k])?;
        println!(
            "RP2 + {k} handles: genus {}, I = {:>3}, stein {}",
            imm.genus(),
            lai(&imm)?.total,
            stein_condition(&imm)?.pass
        );
    }

    let recipe = plan_cp2(PlanTarget::unoriented(4))?;
    println!("\nplanned unorientable genus 4: {}", recipe.expected());

    println!("\nattainable indices of totally real embeddings in C2:");
    for g in 1..=4 {
        let set = index_set_c2_unorientable(SurfaceTopology::unorientable(g))?;
        println!("  genus {g}: {set:?}");
    }
    Ok(())
}
