//! Evaluating the cyclic prestack instances on finite sets.

use hdescent::prestacks::CyclicInstance;
use hdescent::site::FiniteSet;

fn main() -> hdescent::Result<()> {
    let m = FiniteSet::new(["x", "y"])?;
    for inst in [CyclicInstance::bun(2), CyclicInstance::grbtriv(3), CyclicInstance::jandl(2)] {
        let b = inst.eval(&m, 1 << 16)?;
        assert!(b.axiom_violations().is_empty());
        let (o, c1, c2) = b.counts();
        println!("{}({{x,y}}): {o} objects, {c1} 1-cells, {c2} 2-cells", inst.name);
    }
    let inst = CyclicInstance::grbtriv(2);
    let t = FiniteSet::new(["u"])?;
    println!("product witness for {}: {}", inst.name, inst.product_witness(&m, &t, 1 << 16)?);
    Ok(())
}
