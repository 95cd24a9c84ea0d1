//! Error ladder around K and the admissible lambda window for each family.
use penalized_kmeans::geometry::{constants, error_ladder, lambda_bounds};
use penalized_kmeans::{ClusterMass, PenaltyFamily};

fn main() -> penalized_kmeans::Result<()> {
    let (n, k, l) = (10_000usize, 10usize, 1.5);
    let c = constants(2, 1.0)?;
    let ladder = error_ladder(&c, k, l, ClusterMass::Points(n as f64 / k as f64))?;
    for (k, e) in ladder.points() {
        println!("E_{k:<2} = {e:.2}");
    }
    println!("merge gap {:.2}, split gap {:.2}\n", ladder.merge_gap, ladder.split_gap);

    for family in [
        PenaltyFamily::Linear,
        PenaltyFamily::Log,
        PenaltyFamily::Polynomial(2.0),
        PenaltyFamily::Exponential,
    ] {
        let b = lambda_bounds(n, k, &c, l, family)?;
        println!(
            "{family:<8} lambda in ({:.4}, {:.4}), midpoint {:.4}",
            b.lower, b.upper, b.midpoint
        );
    }
    Ok(())
}
