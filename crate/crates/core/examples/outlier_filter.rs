//! Background noise removed by the density filter.
use penalized_kmeans::outliers::{density_filter, DensityFilterConfig};
use penalized_kmeans::synth::{generate, SynthSpec, Truth};

fn main() -> penalized_kmeans::Result<()> {
    let spec = SynthSpec {
        clusters: 5,
        dim: 3,
        points_per_cluster: 400,
        background_noise: 20,
        placement_box: Some(10.0),
        seed: 1,
        ..SynthSpec::default()
    };
    let (data, truth) = generate(&spec)?;
    let out = density_filter(&data, &DensityFilterConfig::default())?;
    let noise_hit = out.removed.iter().filter(|&&i| truth.labels[i] == Truth::NOISE).count();
    println!("radius {:.3}", out.radius);
    println!("removed {} points, {noise_hit} of 20 noise points", out.removed.len());
    if let Some(w) = out.warning {
        println!("warning: {w}");
    }
    Ok(())
}
