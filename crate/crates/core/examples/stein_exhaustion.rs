//! A strictly plurisubharmonic exhaustion of a sublevel set, and what goes
//! wrong when the cutoff term is weighted too heavily.

use stein_nbhd::certificate::Witness;
use stein_nbhd::localgeo::{exhaustion_certificate, PointC2, Scene};

fn main() -> stein_nbhd::error::Result<()> {
    let scene = Scene::special_hyperbolic(0.5);
    println!("epsilon bound {:.4}", scene.epsilon_bound());
    for delta in [1e-4, 1e-3, 1e-1, 10.0] {
        let cert = exhaustion_certificate(&scene, 0.01, delta, 0.05)?;
        let Some(Witness::Sample { point, value, .. }) = cert.witnesses.first() else {
            continue;
        };
        let p = PointC2::from_real(point.as_slice().try_into().unwrap());
        println!(
            "delta {delta:>6}: pass {:<5} min eigenvalue {value:>10.3e} at {p} (annulus: {})",
            cert.pass,
            scene.in_cutoff_annulus(p)
        );
    }
    Ok(())
}
