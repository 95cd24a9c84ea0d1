//! Pulling clusters together until the estimate breaks down.
use penalized_kmeans::clustering::sweep;
use penalized_kmeans::penalty::{estimate, EstimateConfig, ScanConfig};
use penalized_kmeans::synth::{generate, SynthSpec};
use penalized_kmeans::{ClusteringConfig, PenaltyFamily};

fn main() -> penalized_kmeans::Result<()> {
    for shrink in [1.0, 0.8, 0.6, 0.4, 0.2] {
        let spec = SynthSpec { clusters: 8, dim: 3, shrink, seed: 9, ..SynthSpec::default() };
        let (data, _) = generate(&spec)?;
        let sw = sweep(&data, 1, 24, &ClusteringConfig::default())?;
        let cfg = EstimateConfig {
            k_assumed_max: 8,
            scan: ScanConfig::default(),
            multiplicative_family: PenaltyFamily::Linear,
        };
        let r = estimate(&data, &sw, &cfg)?;
        println!(
            "shrink {shrink:.1}: additive {:?}, multiplicative {:?} (global min {}), estimate {:?}",
            r.additive_candidates(),
            r.multiplicative_candidates(),
            r.multiplicative_global_min,
            r.final_estimate
        );
    }
    Ok(())
}
