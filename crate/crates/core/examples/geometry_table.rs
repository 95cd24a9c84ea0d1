//! Ideal-cluster constants for a range of dimensions.
use penalized_kmeans::geometry::constants;

fn main() -> penalized_kmeans::Result<()> {
    println!("{:>4} {:>10} {:>10} {:>10} {:>10}", "d", "alpha", "beta", "gamma", "a/2b");
    for d in [1, 2, 3, 4, 8, 16, 32, 64, 128, 1000] {
        let c = constants(d, 1.0)?;
        println!(
            "{d:>4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            c.alpha,
            c.beta,
            c.gamma,
            c.alpha_over_two_beta()
        );
    }
    Ok(())
}
