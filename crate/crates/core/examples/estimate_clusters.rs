//! Full estimate: additive scan, multiplicative curve, agreement.
use penalized_kmeans::clustering::sweep;
use penalized_kmeans::penalty::{estimate, EstimateConfig, ScanConfig};
use penalized_kmeans::synth::{generate, SynthSpec};
use penalized_kmeans::{ClusteringConfig, PenaltyFamily};

fn main() -> penalized_kmeans::Result<()> {
    let spec = SynthSpec { clusters: 10, seed: 0, ..SynthSpec::default() };
    let (data, _) = generate(&spec)?;
    let sw = sweep(&data, 1, 30, &ClusteringConfig::default())?;
    let cfg = EstimateConfig {
        k_assumed_max: 10,
        scan: ScanConfig::default(),
        multiplicative_family: PenaltyFamily::Linear,
    };
    let r = estimate(&data, &sw, &cfg)?;
    for e in &r.scan.entries {
        let mark = if e.is_candidate() { "*" } else { "" };
        println!("assumed {:>2}  lambda {:>10.2}  -> {:>2} {mark}", e.assumed_k, e.lambda, e.estimated_k);
    }
    println!("additive candidates {:?}", r.additive_candidates());
    println!("multiplicative candidates {:?}", r.multiplicative_candidates());
    println!("agreed {:?}, estimate {:?}", r.agreed, r.final_estimate);
    Ok(())
}
