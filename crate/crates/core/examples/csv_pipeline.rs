//! Write points to CSV, run the pipeline from the file, list the outputs.
use penalized_kmeans::cli::{run_estimate, write_csv, Input, RunConfig};
use penalized_kmeans::synth::{generate, SynthSpec};

fn main() -> penalized_kmeans::Result<()> {
    let dir = std::env::temp_dir().join("penkm-example");
    std::fs::create_dir_all(&dir)?;
    let (data, _) = generate(&SynthSpec { clusters: 5, dim: 3, seed: 2, ..SynthSpec::default() })?;
    let csv = dir.join("points.csv");
    write_csv(&csv, &data, true)?;

    let mut cfg = RunConfig::new(Input::Csv(csv), 6);
    cfg.output_dir = Some(dir.join("run"));
    cfg.emit_plots = true;
    let out = run_estimate(&cfg)?;
    println!("estimate {:?}", out.report.final_estimate);
    for f in &out.files {
        println!("{}", f.display());
    }
    Ok(())
}
