//! Running-bond periodic unit cell and laboratory wall block: node counts,
//! interface segments, periodic pairs and validation.
//!
//! `cargo run --release --example mesh_generation [-- out_dir]`

use std::path::PathBuf;

use masonry_ham::cli::mesh_hash;
use masonry_ham::mesh::{generate_puc, generate_wall_sample, validate, PucSpec, WallSpec};
use masonry_ham::{Mesh, Phase};

fn describe(name: &str, mesh: &Mesh) {
    println!(
        "{name}: {:.3} x {:.3} m, {} nodes, {} triangles, {} interface segments, {} periodic pairs",
        mesh.width(),
        mesh.height(),
        mesh.num_nodes(),
        mesh.triangles.len(),
        mesh.interfaces.len(),
        mesh.periodic.len(),
    );
    let brick = mesh.phase_area(Phase::Brick) / mesh.total_area();
    println!("  brick fraction {brick:.4}, sha256 {}", mesh_hash(mesh));
    let report = validate(mesh);
    if report.is_empty() {
        println!("  valid");
    } else {
        print!("{report}");
    }
}

fn main() -> masonry_ham::Result<()> {
    let puc = generate_puc(&PucSpec::default())?;
    describe("PUC", &puc);
    let wall = generate_wall_sample(&WallSpec::default())?;
    describe("wall", &wall);

    match generate_puc(&PucSpec {
        bed_joint: 0.08,
        ..PucSpec::default()
    }) {
        Ok(_) => println!("unexpected: degenerate spec accepted"),
        Err(e) => println!("degenerate spec rejected: {e}"),
    }

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        puc.write(&dir.join("puc.mesh"))?;
        wall.write(&dir.join("wall.json"))?;
        println!("written to {}", dir.display());
    }
    Ok(())
}
