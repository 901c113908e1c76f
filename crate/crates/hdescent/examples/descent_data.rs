//! Descent data along a cover, the comparison functor τ, and the homotopy limit cross-check.

use hdescent::descent::{descent_bicategory, holim, is_equivalence, tau_functor, CosimplicialBicategory, DescentSpace};
use hdescent::group::FiniteGroup;
use hdescent::groupoid::FiniteGroupoid;
use hdescent::prestacks::CyclicInstance;
use hdescent::site::{Cover, CoverClass, FiniteSet};

fn main() -> hdescent::Result<()> {
    let m = FiniteSet::new(["m"])?;
    let y = Cover::from_fibers(&m, &[2], CoverClass::Surjection)?;
    for inst in [CyclicInstance::grbtriv(2), CyclicInstance::bun(2)] {
        let desc = descent_bicategory(&inst, &y, true, 1 << 16)?;
        let (eval_m, tau) = tau_functor(&inst, &y, &desc, true, 1 << 16)?;
        let r = is_equivalence(&tau, &eval_m, &desc);
        println!("{} over a two-point cover: counts {:?}, tau an equivalence: {}", inst.name, desc.counts(), r.equivalence());
    }

    // the generic holim only fits small diagrams; compare it on the nerve of B(Z/2)
    let nerve = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2)).nerve(3);
    let inst = CyclicInstance::grbtriv(2);
    let c = CosimplicialBicategory::from_simplicial(&inst, &nerve.simplicial, 1 << 17)?;
    let h = holim(&c, 1 << 16)?;
    let e = DescentSpace::new(&inst, &nerve.simplicial, false)?.build(1 << 16)?;
    println!("holim over N(B Z/2): counts {:?}, coordinate engine {:?}", h.counts(), e.counts());
    Ok(())
}
