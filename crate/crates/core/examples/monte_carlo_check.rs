//! Sampled moments against the closed forms.
use penalized_kmeans::geometry::constants;
use penalized_kmeans::oracle::{mc_moments, MomentShape};

fn main() -> penalized_kmeans::Result<()> {
    for d in [1, 2, 3, 8, 16] {
        let c = constants(d, 1.0)?;
        let ball = mc_moments(d, 1.0, MomentShape::Sphere, 100_000, 3)?;
        let half = mc_moments(d, 1.0, MomentShape::HalfSphere, 100_000, 4)?;
        println!(
            "d = {d:>2}: alpha {:.5} vs {:.5} +/- {:.5}, gamma {:.5} vs {:.5} +/- {:.5}",
            c.alpha, ball.mean_sq_dev, ball.mean_sq_dev_se, c.gamma, half.mean_offset, half.mean_offset_se
        );
    }
    Ok(())
}
