//! Regenerates the frozen twin-width tables under `data/`:
//! `cargo run --release -p finmodel --example baselines`.

use std::collections::BTreeMap;
use std::path::Path;

use finmodel::classes::generate;
use finmodel::structures::build::edges;
use finmodel::twinwidth::{transfer_experiment, twin_width, SolverOptions};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::create_dir_all(&dir)?;

    let mut table = Vec::new();
    for g in generate("graphs", 6)?.members() {
        let w = twin_width(g, &SolverOptions::default())?;
        assert!(w.is_exact(), "{} fell back to the heuristic", g.name());
        table.push(json!({ "name": g.name(), "n": g.len(), "edges": edges(g), "width": w.width }));
    }
    std::fs::write(dir.join("tww_baseline.json"), serde_json::to_string_pretty(&table)? + "\n")?;

    let opts = SolverOptions { max_vertices: 12, ..Default::default() };
    let report = transfer_experiment(generate("graphs", 4)?.members(), generate("graphs", 3)?.members(), &opts)?;
    let mut profile: BTreeMap<String, usize> = BTreeMap::new();
    for r in &report.rows {
        *profile.entry(format!("{}/{}/{}", r.spine_width, r.rib_width, r.sum_width)).or_insert(0) += 1;
    }
    let doc = json!({
        "scale": report.scale,
        "rows": report.rows.len(),
        "excess": report.excess,
        "bound_failures": report.bound_failures,
        "profile": profile,
    });
    std::fs::write(dir.join("transfer_baseline.json"), serde_json::to_string_pretty(&doc)? + "\n")?;
    println!("{} graphs, {} transfer rows", table.len(), report.rows.len());
    Ok(())
}
