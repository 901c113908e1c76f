//! The plus construction: objects over bounded families of covers, and the stack check.

use hdescent::group::FiniteGroup;
use hdescent::groupoid::FiniteGroupoid;
use hdescent::plus::{plus_eval, plus_on_groupoid, verify_stack};
use hdescent::prestacks::CyclicInstance;
use hdescent::site::{Cover, CoverClass, FiniteSet};

fn main() -> hdescent::Result<()> {
    let inst = CyclicInstance::grbtriv(2);
    let m = FiniteSet::new(["m"])?;
    let s = plus_eval(&inst, &m, CoverClass::Surjection, 1, 1 << 16)?;
    println!("X+(point): {} objects over covers {:?}, classes {:?}", s.objects, s.covers, s.classes);

    let bz2 = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
    let g = plus_on_groupoid(&inst, &bz2, CoverClass::Surjection, 1, 1 << 16)?;
    println!("X+(B Z/2): {} of {} classes hit, witnesses verified {}", g.classes.len(), g.base_classes, g.witnesses_verified);

    let y = Cover::from_fibers(&m, &[2], CoverClass::Surjection)?;
    let r = verify_stack(&inst, &y, 1)?;
    println!("along a two-point cover: prestack {}, stack {}, plus is a stack {}", r.prestack, r.stack, r.plus_stack);
    Ok(())
}
