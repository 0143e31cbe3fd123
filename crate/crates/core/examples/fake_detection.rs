//! Input noise that makes a separable state look entangled.

use mdiew::fake::{example1_grid_minimum, example2_sweep, example2_value};
use mdiew::states::PerpConvention;

fn main() -> mdiew::Result<()> {
    for q in [0.0, 0.5, 1.0] {
        let best = example1_grid_minimum(q, 50, 100)?;
        println!("non-uniform admixture, q = {q}: min value {:.6} at theta {:?}", best.value, best.theta.components());
    }

    println!("entangling noise at p = 0, by orthogonal-state phase rule:");
    for perp in PerpConvention::ALL {
        println!("  {perp:?}: {:.6}", example2_value(0.0, perp)?);
    }
    for (p, v) in example2_sweep(0.2, PerpConvention::default())? {
        println!("  p = {p:.1}: {v:.6}");
    }
    Ok(())
}
