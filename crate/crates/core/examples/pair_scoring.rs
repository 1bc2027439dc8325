//! Scores a four-item, two-predicate pool with each strategy and shows which
//! pair gets annotated first.
//!
//! Items 2 and 3 are equally uncertain on `p1`, but item 2 almost surely
//! fails `p2`, so labeling its `p1` cannot change the screening outcome.
//! Uncertainty sampling sees a tie; the objective-aware score does not.

use screenal::crowd::LabelStore;
use screenal::strategies::{select_batch, ProbTable, Strategy, StrategyConfig};
use screenal::{Pair, StrategyKind};

fn main() -> screenal::Result<()> {
    let table = ProbTable::new(
        vec!["1".into(), "2".into(), "3".into(), "4".into()],
        vec!["p1".into(), "p2".into()],
        vec![vec![0.99, 0.98], vec![0.51, 0.01], vec![0.51, 0.99], vec![0.03, 0.01]],
    )?;
    let labels = LabelStore::new();

    for kind in [StrategyKind::ObjectiveAware, StrategyKind::Uncertainty] {
        let mut strategy = Strategy::new(StrategyConfig::new(kind, 1, 0))?;
        println!("{kind}");
        for item in 0..table.num_items() {
            let pair = Pair::new(item, 0);
            println!(
                "  item {} p1: P(in)={:.2} score={:.4}",
                table.item_id(item),
                table.prob(pair),
                strategy.score(pair, &table)?
            );
        }
        let best = &select_batch(&table.all_pairs(), &mut strategy, 1, &table, &labels)?[0];
        println!(
            "  -> annotate ({}, {})",
            table.item_id(best.pair.item),
            table.predicate_id(best.pair.predicate)
        );
    }
    Ok(())
}
