use std::cmp::Ordering;

use super::lattice::lattice_edges;
use super::model::{Alignment, AlignmentModel, Chunk, Link};
use super::{log_add, AlignmentConfig};
use crate::error::{Error, Result};
use crate::phone::{Phone, Pronunciation};

type TieKey<'a> = (usize, usize, &'a [Phone], &'a [Phone]);

/// Log of the summed probability of every monotone chunking, by the forward
/// recurrence. `-inf` when no chunking has positive mass.
pub fn pair_likelihood(
    model: &AlignmentModel,
    source: &Pronunciation,
    target: &Pronunciation,
    config: &AlignmentConfig,
) -> f64 {
    let cols = target.len() + 1;
    let mut alpha = vec![f64::NEG_INFINITY; (source.len() + 1) * cols];
    alpha[0] = 0.0;
    for e in lattice_edges(source.len(), target.len(), config) {
        let from = alpha[e.from_state(cols)];
        if from == f64::NEG_INFINITY {
            continue;
        }
        let lp = model.log_prob(
            &source[e.i..e.i + e.source_len],
            &target[e.j..e.j + e.target_len],
        );
        let to = e.to_state(cols);
        alpha[to] = log_add(alpha[to], from + lp);
    }
    alpha[alpha.len() - 1]
}

fn same_score(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Ordering used to break exact ties between incoming links: shorter source
/// chunk, then shorter target chunk, then phone text.
fn tie_order(a: &TieKey<'_>, b: &TieKey<'_>) -> Ordering {
    a.0.cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then_with(|| a.2.cmp(b.2))
        .then_with(|| a.3.cmp(b.3))
}

/// Maximum-probability chunking. Scores within 1e-12 (relative) are treated
/// as ties and broken per link, starting from the end of the word.
pub fn viterbi_align(
    model: &AlignmentModel,
    source: &Pronunciation,
    target: &Pronunciation,
    config: &AlignmentConfig,
) -> Result<Alignment> {
    let cols = target.len() + 1;
    let states = (source.len() + 1) * cols;
    let mut best = vec![f64::NEG_INFINITY; states];
    let mut back: Vec<Option<(usize, usize, usize, usize)>> = vec![None; states];
    best[0] = 0.0;
    for e in lattice_edges(source.len(), target.len(), config) {
        let from = e.from_state(cols);
        if best[from] == f64::NEG_INFINITY {
            continue;
        }
        let s = &source[e.i..e.i + e.source_len];
        let t = &target[e.j..e.j + e.target_len];
        let lp = model.log_prob(s, t);
        if lp == f64::NEG_INFINITY {
            continue;
        }
        let cand = best[from] + lp;
        let to = e.to_state(cols);
        let replace = match back[to] {
            None => true,
            Some(_) if same_score(cand, best[to]) => {
                let (pi, pj, pa, pb) = back[to].unwrap();
                let incumbent = (pa, pb, &source[pi..pi + pa], &target[pj..pj + pb]);
                tie_order(&(e.source_len, e.target_len, s, t), &incumbent) == Ordering::Less
            }
            Some(_) => cand > best[to],
        };
        if replace {
            best[to] = cand;
            back[to] = Some((e.i, e.j, e.source_len, e.target_len));
        }
    }

    if back[states - 1].is_none() && states > 1 {
        return Err(Error::Unalignable {
            word: format!("{source} -> {target}"),
        });
    }
    let mut links = Vec::new();
    let mut state = states - 1;
    while let Some((i, j, a, b)) = back[state] {
        links.push(Link {
            source: Chunk::from(&source[i..i + a]),
            target: Chunk::from(&target[j..j + b]),
        });
        state = i * cols + j;
    }
    links.reverse();
    Ok(Alignment {
        links,
        score: best[states - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phone::parse_ipa_string;

    fn ipa(s: &str) -> Pronunciation {
        parse_ipa_string(s).unwrap()
    }

    fn chunk(s: &str) -> Chunk {
        s.parse().unwrap()
    }

    fn model(entries: &[(&str, &str, f64)]) -> AlignmentModel {
        AlignmentModel::from_entries(entries.iter().map(|&(s, t, p)| (chunk(s), chunk(t), p)))
    }

    #[test]
    fn identity_likelihood_is_zero() {
        let m = model(&[("a", "a", 1.0)]);
        let cfg = AlignmentConfig::default();
        assert_eq!(pair_likelihood(&m, &ipa("a"), &ipa("a"), &cfg), 0.0);
    }

    #[test]
    fn unseen_target_phone_is_impossible() {
        let m = model(&[("a", "a", 1.0), ("b", "b", 1.0)]);
        let cfg = AlignmentConfig::default();
        assert_eq!(
            pair_likelihood(&m, &ipa("a b"), &ipa("a x"), &cfg),
            f64::NEG_INFINITY
        );
        assert!(matches!(
            viterbi_align(&m, &ipa("a b"), &ipa("a x"), &cfg),
            Err(Error::Unalignable { .. })
        ));
    }

    #[test]
    fn identity_viterbi() {
        let m = model(&[("d", "d", 1.0), ("iː", "iː", 1.0)]);
        let a = viterbi_align(&m, &ipa("d iː"), &ipa("d iː"), &AlignmentConfig::default()).unwrap();
        assert_eq!(
            a.links,
            vec![
                Link {
                    source: chunk("d"),
                    target: chunk("d")
                },
                Link {
                    source: chunk("iː"),
                    target: chunk("iː")
                },
            ]
        );
        assert_eq!(a.score, 0.0);
    }

    #[test]
    fn one_to_two_link_wins_when_heavier() {
        // a -> x y as one link (0.8) beats a -> x, deletion-free path needs
        // another source phone, so compare against a -> x then b -> y.
        let m = model(&[
            ("a", "x y", 0.8),
            ("a", "x", 0.2),
            ("b", "y", 0.5),
            ("b", "_", 0.5),
        ]);
        let cfg = AlignmentConfig::default();
        let a = viterbi_align(&m, &ipa("a b"), &ipa("x y"), &cfg).unwrap();
        // a:xy b:_ = 0.4, a:x b:y = 0.1
        assert_eq!(a.links[0].target, chunk("x y"));
        assert!((a.score - 0.4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_shorter_source_chunk() {
        // "a b" -> "x y": either a:x b:y (0.5 * 1.0) or ab:xy (0.5).
        let m = model(&[("a", "x", 0.5), ("b", "y", 1.0), ("a b", "x y", 0.5)]);
        let cfg = AlignmentConfig::default();
        for _ in 0..3 {
            let a = viterbi_align(&m, &ipa("a b"), &ipa("x y"), &cfg).unwrap();
            assert_eq!(a.links.len(), 2);
        }
    }
}
