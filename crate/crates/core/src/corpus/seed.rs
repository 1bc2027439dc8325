use rand::seq::index::sample;
use rand::Rng;

use super::{Corpus, GoldOracle, Label};
use crate::error::{Error, Result};
use crate::Pair;

/// Splits all `(item, predicate)` pairs into an initial labeled seed and the
/// remaining pool.
///
/// Each predicate gets `round(fraction * N)` seed items (at least two), drawn
/// uniformly and then patched so both gold classes appear. Both returned
/// lists are sorted by `(item, predicate)`.
pub fn split_seed<R: Rng + ?Sized>(corpus: &Corpus, fraction: f64, rng: &mut R) -> Result<(Vec<Pair>, Vec<Pair>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid("seedFraction", "must lie strictly between 0 and 1"));
    }
    let n = corpus.len();
    let count = ((fraction * n as f64).round() as usize).max(2).min(n);

    let mut seed = Vec::with_capacity(count * corpus.num_predicates());
    for p in 0..corpus.num_predicates() {
        let (ins, outs): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| corpus.gold(i, p).is_in());
        if ins.is_empty() || outs.is_empty() {
            return Err(Error::Stratification(corpus.predicate_ids()[p].clone()));
        }
        let mut chosen: Vec<usize> = sample(rng, n, count).into_vec();
        chosen.sort_unstable();
        for (class, members) in [(Label::In, &ins), (Label::Out, &outs)] {
            if chosen.iter().any(|&i| corpus.gold(i, p) == class) {
                continue;
            }
            let slot = rng.random_range(0..chosen.len());
            chosen[slot] = members[rng.random_range(0..members.len())];
            chosen.sort_unstable();
        }
        seed.extend(chosen.into_iter().map(|i| Pair::new(i, p)));
    }
    seed.sort_unstable();

    let mut pool = Vec::with_capacity(n * corpus.num_predicates() - seed.len());
    let mut s = seed.iter().peekable();
    for i in 0..n {
        for p in 0..corpus.num_predicates() {
            let pair = Pair::new(i, p);
            if s.peek() == Some(&&pair) {
                s.next();
            } else {
                pool.push(pair);
            }
        }
    }
    Ok((seed, pool))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use crate::rng::{stream, Stream};

    fn corpus(n: usize, gold: impl Fn(usize) -> [bool; 2]) -> Corpus {
        let docs = (0..n)
            .map(|i| {
                let g = gold(i);
                Document::new(format!("d{i:04}"), "x", vec![Label::from_bool(g[0]), Label::from_bool(g[1])])
            })
            .collect();
        Corpus::new(docs, vec!["p1".into(), "p2".into()]).unwrap()
    }

    #[test]
    fn counts_per_predicate() {
        let c = corpus(1000, |i| [i % 3 == 0, i % 5 == 0]);
        let (seed, pool) = split_seed(&c, 0.02, &mut stream(1, Stream::Split)).unwrap();
        assert_eq!(seed.iter().filter(|p| p.predicate == 0).count(), 20);
        assert_eq!(seed.iter().filter(|p| p.predicate == 1).count(), 20);
        assert_eq!(seed.len() + pool.len(), 2000);
    }

    #[test]
    fn deterministic() {
        let c = corpus(500, |i| [i % 3 == 0, i % 5 == 0]);
        let a = split_seed(&c, 0.05, &mut stream(9, Stream::Split)).unwrap();
        let b = split_seed(&c, 0.05, &mut stream(9, Stream::Split)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stratified_even_for_rare_class() {
        // a single IN item for p2 must still land in the seed
        let c = corpus(1000, |i| [i % 2 == 0, i == 777]);
        for seed in 0..20 {
            let (s, _) = split_seed(&c, 0.01, &mut stream(seed, Stream::Split)).unwrap();
            assert!(s.contains(&Pair::new(777, 1)));
            assert!(s.iter().any(|p| p.predicate == 1 && p.item != 777));
        }
    }

    #[test]
    fn single_class_predicate_fails() {
        let c = corpus(100, |i| [true, i % 2 == 0]);
        assert!(matches!(
            split_seed(&c, 0.1, &mut stream(0, Stream::Split)),
            Err(Error::Stratification(p)) if p == "p1"
        ));
    }

    #[test]
    fn fraction_range() {
        let c = corpus(100, |i| [i % 2 == 0, i % 2 == 1]);
        assert!(split_seed(&c, 0.0, &mut stream(0, Stream::Split)).is_err());
        assert!(split_seed(&c, 1.0, &mut stream(0, Stream::Split)).is_err());
    }
}
