//! Complex-point indices and adjunction bounds for curves in the projective
//! plane, and the verdict for a few surfaces in other ambients.

use stein_nbhd::invariants::{
    adjunction_rhs, lai, verdict, AmbientDescriptor, ImmersionClass, SurfaceTopology,
};

fn main() -> stein_nbhd::error::Result<()> {
    println!(
        "{:>3} {:>6} {:>4} {:>4} {:>8}",
        "d", "genus", "I+", "I-", "bound"
    );
    for d in 1..=6 {
        let curve = ImmersionClass::cp2_curve(d);
        let idx = lai(&curve)?;
        println!(
            "{d:>3} {:>6} {:>4} {:>4} {:>8}",
            curve.genus(),
            idx.positive.unwrap_or_default(),
            idx.negative.unwrap_or_default(),
            adjunction_rhs(&curve)?
        );
    }

    let cases = [
        (
            "smooth conic in CP2",
            ImmersionClass::cp2_curve(2),
            AmbientDescriptor::projective_plane(2),
            true,
        ),
        (
            "genus-3 surface in the line class",
            ImmersionClass::embedded(SurfaceTopology::orientable(3), 1, 3),
            AmbientDescriptor::projective_plane(1),
            true,
        ),
        (
            "null-homologous torus in C2",
            ImmersionClass::null_torus(),
            AmbientDescriptor::affine_plane(),
            false,
        ),
        (
            "diagonal sphere in CP1 x CP1",
            ImmersionClass::embedded(SurfaceTopology::orientable(0), 2, 4),
            AmbientDescriptor::quadric(1, 1),
            true,
        ),
    ];
    println!();
    for (name, imm, ambient, nonzero) in cases {
        let v = verdict(&imm, &ambient, nonzero)?;
        print!("{name}: {:?} ({})", v.outcome, v.rule);
        if let Some(h) = v.unresolved {
            print!(" -- needs: {h}");
        }
        println!();
    }
    Ok(())
}
