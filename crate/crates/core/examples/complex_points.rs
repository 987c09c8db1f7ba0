//! Winding indices of complex points on graphs and on the handles that
//! replace a double point.

use stein_nbhd::localgeo::patch::{GraphPatch, SigmaHandle};
use stein_nbhd::localgeo::{
    locate_complex_points, locate_in_atlas, model_patch, winding_index, ModelKind,
};
use stein_nbhd::surgery::Sign;

fn main() -> stein_nbhd::error::Result<()> {
    for (name, graph) in [
        ("w = z zbar", GraphPatch::special_elliptic()),
        ("w = zbar^2", GraphPatch::special_hyperbolic()),
        ("w = zbar^3", GraphPatch::cubic()),
    ] {
        println!(
            "{name}: index {}",
            winding_index(&graph, [0.0, 0.0], 0.5, 64)?
        );
    }

    for sign in [Sign::Positive, Sign::Negative] {
        let handle = SigmaHandle::new(sign, 0.1)?;
        let scan = locate_complex_points(&handle, 0.02, 1e-12)?;
        println!("\nhandle {sign:?}: {} complex points", scan.points.len());
        for p in &scan.points {
            println!(
                "  {} index {} ({})",
                p.point,
                p.index,
                if p.positive { "+" } else { "-" }
            );
        }
    }

    let atlas = model_patch(ModelKind::Weinstein)?;
    let scan = locate_in_atlas(&atlas, 0.05, 1e-12)?;
    println!(
        "\nWeinstein sphere: {} complex points over {} charts, min |det| {:.3}",
        scan.points.len(),
        atlas.charts.len(),
        scan.min_modulus
    );
    Ok(())
}
