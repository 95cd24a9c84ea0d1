//! Raw k-means errors over a range of k, with sizes at k = K.
use penalized_kmeans::clustering::sweep;
use penalized_kmeans::synth::{generate, SynthSpec};
use penalized_kmeans::ClusteringConfig;

fn main() -> penalized_kmeans::Result<()> {
    let spec = SynthSpec { clusters: 6, seed: 4, ..SynthSpec::default() };
    let (data, _) = generate(&spec)?;
    let sw = sweep(&data, 1, 12, &ClusteringConfig::default())?;
    for r in &sw.results {
        println!("k = {:>2}  E = {:>9.2}  k*E = {:>9.2}  iters = {}", r.k, r.error, r.k as f64 * r.error, r.iterations);
    }
    println!("sizes at k = 6: {:?}", sw.get(6).unwrap().cluster_sizes());
    Ok(())
}
