#![allow(dead_code)]

use rand::Rng;
use stein_nbhd::invariants::{ImmersionClass, SurfaceTopology};
use stein_nbhd::surgery::SurgeryStep;

/// A random class that passes `validate`: oriented classes get the parity of
/// `c1` fixed up, unoriented ones carry no double points of either sign.
pub fn random_class<R: Rng>(rng: &mut R) -> ImmersionClass {
    if rng.gen_bool(0.75) {
        let genus = rng.gen_range(0..=8);
        let normal_euler = rng.gen_range(-30..=30);
        let mut c1 = rng.gen_range(-30..=30);
        if (2 - 2 * genus + normal_euler + c1) % 2 != 0 {
            c1 += 1;
        }
        ImmersionClass {
            topology: SurfaceTopology::orientable(genus),
            normal_euler,
            c1_pairing: c1,
            delta_plus: rng.gen_range(0..=6),
            delta_minus: rng.gen_range(0..=6),
        }
    } else {
        ImmersionClass {
            topology: SurfaceTopology::unorientable(rng.gen_range(1..=8)),
            normal_euler: rng.gen_range(-30..=30),
            c1_pairing: 0,
            delta_plus: 0,
            delta_minus: 0,
        }
    }
}

/// Every step kind that acts on a class without extra data.
pub const LOCAL_STEPS: [SurgeryStep; 8] = [
    SurgeryStep::AttachTorus,
    SurgeryStep::AttachRP2,
    SurgeryStep::AttachKlein,
    SurgeryStep::AttachWeinsteinSphere,
    SurgeryStep::ResolvePositiveDpHandle,
    SurgeryStep::ResolveNegativeDpHandle,
    SurgeryStep::ResolveNegativeDpBlowup,
    SurgeryStep::NormalizeComplexPoints,
];

/// Whether a step may legitimately refuse this class.
pub fn may_refuse(step: &SurgeryStep, imm: &ImmersionClass) -> bool {
    let oriented = imm.topology.orientable;
    match step {
        SurgeryStep::AttachWeinsteinSphere => !oriented,
        SurgeryStep::ResolvePositiveDpHandle => !oriented || imm.delta_plus == 0,
        SurgeryStep::ResolveNegativeDpHandle | SurgeryStep::ResolveNegativeDpBlowup => {
            !oriented || imm.delta_minus == 0
        }
        _ => false,
    }
}

/// `S² = e(ν) + 2(δ₊ − δ₋)` written out independently of the library.
pub fn self_intersection(imm: &ImmersionClass) -> i64 {
    imm.normal_euler + 2 * imm.delta_plus - 2 * imm.delta_minus
}

/// `I = χ + e(ν)` and `I± = (I ± c1)/2`, independently of the library.
pub fn indices(imm: &ImmersionClass) -> (i64, i64, i64) {
    let chi = if imm.topology.orientable {
        2 - 2 * imm.topology.genus
    } else {
        2 - imm.topology.genus
    };
    let total = chi + imm.normal_euler;
    (
        total,
        (total + imm.c1_pairing) / 2,
        (total - imm.c1_pairing) / 2,
    )
}
