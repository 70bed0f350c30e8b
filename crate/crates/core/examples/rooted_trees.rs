// Rooted trees by canonical code with their Poisson Galton-Watson
// probabilities; per size they add up to the Borel law.

use gelation::kinetics::borel_pmf;
use gelation::trees::{enumerate_rooted_trees, gw_tree_prob, RootedTree};

/// Returns the number of rooted trees with 6 vertices.
pub fn run_example() -> gelation::Result<usize> {
    let lambda = 1.0;
    let trees = enumerate_rooted_trees(6)?;
    for (k, of_size) in trees.iter().enumerate().take(4) {
        for t in of_size {
            println!("{:<10} {:.6}", t.code(), gw_tree_prob(lambda, t));
        }
        let total: f64 = of_size.iter().map(|t| gw_tree_prob(lambda, t)).sum();
        println!("size {}: {} trees, total {total:.6}, Borel {:.6}", k + 1, of_size.len(), borel_pmf(lambda, k + 1)?);
    }
    // a path and a star on four vertices, labelled by parent arrays
    let path = RootedTree::from_parents(&[0, 0, 1, 2]);
    let star = RootedTree::from_parents(&[0, 0, 0, 0]);
    println!("path {path}, star {star}");
    Ok(trees[5].len())
}

fn main() -> gelation::Result<()> {
    run_example().map(|_| ())
}
