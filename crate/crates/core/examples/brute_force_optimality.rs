//! Lloyd from farthest-first seeds against exhaustive search on tiny inputs.
use penalized_kmeans::clustering::sweep;
use penalized_kmeans::oracle::brute_force_kmeans;
use penalized_kmeans::synth::{generate, SynthSpec};
use penalized_kmeans::ClusteringConfig;

fn main() -> penalized_kmeans::Result<()> {
    for seed in 0..5 {
        let spec = SynthSpec { clusters: 3, points_per_cluster: 4, seed, ..SynthSpec::default() };
        let (data, _) = generate(&spec)?;
        let sw = sweep(&data, 1, 4, &ClusteringConfig::default())?;
        for r in &sw.results {
            let best = brute_force_kmeans(&data, r.k)?;
            println!(
                "seed {seed} k {}: lloyd {:.4}, optimum {:.4} over {} partitions",
                r.k, r.error, best.min_error, best.partitions
            );
        }
    }
    Ok(())
}
