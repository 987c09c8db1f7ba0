//! Removing double points: positive ones become handles, negative ones
//! either handles or blow-ups; all classes end in a normal form of special
//! complex points.

use stein_nbhd::invariants::{adjunction_rhs, lai, ImmersionClass, SurfaceTopology};
use stein_nbhd::surgery::{normalize_complex_points, replay_traced, SurgeryStep};

fn main() -> stein_nbhd::error::Result<()> {
    let start = ImmersionClass::immersed(SurfaceTopology::orientable(0), 4, 6, 2, 1);
    let steps = [
        SurgeryStep::ResolvePositiveDpHandle,
        SurgeryStep::ResolveNegativeDpBlowup,
        SurgeryStep::AttachWeinsteinSphere,
        SurgeryStep::ResolvePositiveDpHandle,
        SurgeryStep::NormalizeComplexPoints,
    ];
    let trace = replay_traced(&start, &steps)?;
    for (i, imm) in trace.states.iter().enumerate() {
        let idx = lai(imm)?;
        let label = if i == 0 { "start" } else { steps[i - 1].name() };
        println!(
            "{label:<26} g {} d+ {} d- {}  I+ {:>3} I- {:>3}  rhs {}",
            imm.genus(),
            imm.delta_plus,
            imm.delta_minus,
            idx.positive.unwrap_or_default(),
            idx.negative.unwrap_or_default(),
            adjunction_rhs(imm)?
        );
    }
    println!("exceptional spheres: {}", trace.exceptional_spheres);
    println!(
        "normal form: {:?}",
        normalize_complex_points(trace.result())?
    );
    Ok(())
}
