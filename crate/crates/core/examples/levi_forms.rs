//! Levi forms of the two model functions: closed form against finite
//! differences, and a plurisubharmonicity sweep over the unit box.

use stein_nbhd::localgeo::{
    det_identity_check, levi_closed, levi_fd, psh_certificate, Grid, LocalModel, PointC2,
    PshOptions,
};

fn main() -> stein_nbhd::error::Result<()> {
    let p = PointC2::from_real([0.3, -0.2, 0.5, 0.1]);
    for model in LocalModel::ALL {
        let closed = levi_closed(model, p);
        let fd = levi_fd(&model, p, 1e-4)?;
        println!(
            "{model}: eigenvalues {:?}, fd error {:.2e}",
            closed.eigenvalues(),
            closed.max_abs_diff(&fd)
        );
    }

    let cert = det_identity_check(PointC2::from_real([0.5, 0.0, 0.25, 0.0]));
    println!("\ndeterminant identity at (0.5, 0.25): pass {}", cert.pass);

    let grid = Grid::cube(1.0, 0.1)?;
    for model in LocalModel::ALL {
        let cert = psh_certificate(&model, &grid, &PshOptions::closed())?;
        println!("\n{model} over {} points: pass {}", grid.len(), cert.pass);
        println!(
            "{}",
            serde_json::to_string_pretty(&cert.witnesses[0]).unwrap()
        );
    }
    Ok(())
}
