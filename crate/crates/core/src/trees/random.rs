use rand::Rng;

use super::{make_equidistant, Builder, PhyloTree};
use crate::rational::{ratio, Rational};

fn random_length<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(1..=20), 4)
}

/// A random binary equidistant tree on taxa `T01, T02, …`: leaves are
/// attached one at a time to a uniformly chosen edge (or above the root),
/// edges get lengths in `{1/4, …, 5}`, and pendant edges are then
/// stretched to make the tree equidistant.
pub fn random_equidistant_tree<R: Rng + ?Sized>(rng: &mut R, n_taxa: usize) -> PhyloTree {
    assert!(n_taxa >= 1, "need at least one taxon");
    let width = n_taxa.to_string().len().max(2);
    let label = |k: usize| format!("T{:0width$}", k + 1);
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut labels = vec![Some(label(0))];
    let mut lengths = vec![random_length(rng)];
    let mut root = 0;
    for k in 1..n_taxa {
        let target = rng.gen_range(0..parents.len());
        let joint = parents.len();
        parents.push(parents[target]);
        labels.push(None);
        let length = random_length(rng);
        lengths.push(length);
        parents[target] = Some(joint);
        if target == root {
            root = joint;
        }
        parents.push(Some(joint));
        labels.push(Some(label(k)));
        lengths.push(random_length(rng));
    }
    let mut builder = Builder::default();
    for ((label, parent), length) in labels.into_iter().zip(parents).zip(lengths) {
        builder.add(label, parent, length);
    }
    let tree = builder.finish(root).expect("generated labels are unique");
    make_equidistant(&tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_are_binary_and_equidistant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..12 {
            let t = random_equidistant_tree(&mut rng, n);
            assert!(t.is_equidistant());
            assert_eq!(t.num_leaves(), n);
            assert_eq!(t.node_count(), 2 * n - 1);
            assert!((0..t.node_count()).all(|v| t.is_leaf(v) || t.children(v).len() == 2));
            if n >= 10 {
                assert_eq!(t.taxa()[0], "T01");
            }
        }
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = random_equidistant_tree(&mut ChaCha8Rng::seed_from_u64(9), 7);
        let b = random_equidistant_tree(&mut ChaCha8Rng::seed_from_u64(9), 7);
        assert_eq!(a.to_string(), b.to_string());
    }
}
