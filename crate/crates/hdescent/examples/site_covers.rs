//! Covers of finite sets, their Čech nerves and common refinements.

use hdescent::site::{canonical_common_refinement, cover_nerve, fiber_product, Cover, CoverClass, FiniteSet};

fn main() -> hdescent::Result<()> {
    let m = FiniteSet::new(["p", "q"])?;
    let y = Cover::from_fibers(&m, &[2, 1], CoverClass::Surjection)?;
    let y2 = Cover::from_subsets(&m, &[vec![0], vec![0, 1]])?;
    println!("Y = {:?} over {:?}", y.total().labels(), m.labels());

    let fp = fiber_product(&y.map, &y.map)?;
    println!("Y x_M Y has {} points: {:?}", fp.set.len(), fp.set.labels());

    let nerve = cover_nerve(&y, 3)?;
    for n in 0..=nerve.simplicial.top() {
        println!("level {n}: {} simplices", nerve.simplicial.size(n));
    }
    assert!(nerve.simplicial.identity_violations().is_empty());

    let r = canonical_common_refinement(&y, &y2)?;
    println!("common refinement of {:?} and {:?}: fibers {:?}", y.fiber_sizes(), y2.fiber_sizes(), r.cover.fiber_sizes());
    Ok(())
}
