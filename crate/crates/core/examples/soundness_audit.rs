//! Audits of the decoding mechanism behind the soundness analysis.

use littlestone::labelcover::generators::{planted_satisfiable, shifted_parallel};
use littlestone::labelcover::{brute_force_optimum, BlockPartition};
use littlestone::reductions::{vc_reduction, ReductionParams};
use littlestone::verify::{containment_audit, pass_probability_audit, shattered_search};

fn main() {
    let (l, _) = planted_satisfiable(2, 3, 3, 2, 0.5);
    let params = ReductionParams {
        r: Some(2),
        ell: Some(1),
        seed: 1,
        ..Default::default()
    };
    let out = vc_reduction(&l, &params).unwrap();
    let search = shattered_search(&out, 100_000);
    print!("{}", search.to_report(&out, 100_000).to_text());
    print!("{}", containment_audit(&out, 500, 9).to_text());

    // Two A vertices, six B vertices, 128 symbols, singleton blocks.
    let low = shifted_parallel(4, 2, 6, 128);
    let partition =
        BlockPartition::from_blocks(&low, (0..low.n()).map(|v| vec![v]).collect()).unwrap();
    let (_, sigma) = brute_force_optimum(&low, 1 << 20).unwrap();
    let blocks: Vec<usize> = (0..partition.r()).collect();
    let report =
        pass_probability_audit(&low, &partition, &blocks, &sigma, 1.0, 2_000, 5, 1 << 20).unwrap();
    print!("{}", report.to_text());
}
