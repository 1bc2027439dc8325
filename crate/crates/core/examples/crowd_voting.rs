//! Simulates noisy crowd workers and shows how majority voting over more
//! votes per pair trades budget for label accuracy.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use screenal::crowd::{aggregate_majority, majority_accuracy, simulate_votes};
use screenal::{AccuracyModel, Label};

fn main() -> screenal::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trials = 20_000;
    let models = [
        ("point 0.7", AccuracyModel::Point(0.7)),
        ("beta(8,2)", AccuracyModel::Beta { alpha: 8.0, beta: 2.0 }),
    ];
    for (name, model) in models {
        model.validate()?;
        println!("{name}");
        for n in [1, 3, 5, 7] {
            let mut correct = 0;
            for t in 0..trials {
                let gold = Label::from_bool(t % 2 == 0);
                if aggregate_majority(&simulate_votes(gold, n, &model, &mut rng))? == gold {
                    correct += 1;
                }
            }
            let analytic = match model {
                AccuracyModel::Point(a) => format!(" (analytic {:.4})", majority_accuracy(a, n)),
                _ => String::new(),
            };
            println!("  {n} votes: {:.4}{analytic}", correct as f64 / trials as f64);
        }
    }
    Ok(())
}
