//! Pullback along weak equivalences of groupoids and the exchange of iterated limits.

use hdescent::equivariant::{exchange, pullback_harness, BisimplicialData, Strength};
use hdescent::groupoid::{FiniteGroupoid, GroupoidFunctor};
use hdescent::prestacks::CyclicInstance;

fn main() -> hdescent::Result<()> {
    let inst = CyclicInstance::grbtriv(2);
    let point = FiniteGroupoid::point();
    let interval = FiniteGroupoid::interval();
    let a = interval.objects.index("a").unwrap();
    let inc = GroupoidFunctor { f0: vec![a], f1: vec![interval.identity[a]] };
    let collapse = GroupoidFunctor { f0: vec![0; 2], f1: vec![0; 4] };

    for (name, f, src, dst) in [("point -> interval", &inc, &point, &interval), ("interval -> point", &collapse, &interval, &point)] {
        let r = pullback_harness(&inst, f, src, dst, Strength::Stack)?;
        println!("{name}: via factorization {}, direct {}, agree {}", r.route, r.direct, r.agree);
    }

    let grid = BisimplicialData::constant(vec!["x".into(), "y".into()], 3);
    let e = exchange(&grid, &inst)?;
    println!("exchange on a constant grid is an isomorphism: {}", e.is_isomorphism());
    Ok(())
}
