//! Write every figure that needs no external data into a directory, with
//! SVG renderings.
//!
//!     cargo run --example figures -- [out_dir]

use std::path::PathBuf;

use biphoton::cli::{figure, svg, FigureId, FigureRequest};
use biphoton::ExperimentParams;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    let params = ExperimentParams::reference(5.0);
    for id in FigureId::ALL.into_iter().filter(|id| *id != FigureId::Fig5) {
        let table = figure(&FigureRequest::new(id), &params)?;
        let csv = dir.join(format!("{id}.csv"));
        std::fs::write(&csv, table.to_csv())?;
        std::fs::write(csv.with_extension("svg"), svg::render(&table))?;
        println!("{id}: {} rows -> {}", table.rows.len(), csv.display());
    }
    Ok(())
}
