//! The optimal learner against the adversary and against fixed targets.

use littlestone::concept::families::thresholds;
use littlestone::dimensions::{ls_dimension, run_online_game, Opponent};

fn main() {
    let class = thresholds(15);
    let ls = ls_dimension(&class).value().unwrap();
    println!("thresholds over 1..15, ls={ls}");

    let adversarial = run_online_game(&class, &Opponent::OptimalAdversary, usize::MAX).unwrap();
    for step in &adversarial.steps {
        println!(
            "  adversary asks {}: predicted {}, answer {}",
            class.universe().label(step.element),
            step.prediction as u8,
            step.correct as u8
        );
    }
    println!("  mistakes against the adversary: {}", adversarial.mistakes);

    let worst = (0..class.len())
        .map(|concept| {
            let target = Opponent::Target {
                concept,
                order: None,
            };
            run_online_game(&class, &target, usize::MAX)
                .unwrap()
                .mistakes
        })
        .max()
        .unwrap();
    println!("  worst mistakes over all targets in positional order: {worst}");
}
