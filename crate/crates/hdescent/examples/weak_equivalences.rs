//! Weak equivalences of groupoids, quasi-inverses, factorization and Morita equivalence.

use hdescent::equivalence::{equivalence_report, factorize, morita_by_search, morita_equivalent, strong_equivalence};
use hdescent::group::FiniteGroup;
use hdescent::groupoid::{FiniteGroupoid, GroupoidFunctor};
use hdescent::site::CoverClass;

fn main() -> hdescent::Result<()> {
    let point = FiniteGroupoid::point();
    let interval = FiniteGroupoid::interval();
    let a = interval.objects.index("a").unwrap();
    let inc = GroupoidFunctor { f0: vec![a], f1: vec![interval.identity[a]] };

    let r = equivalence_report(&inc, &point, &interval);
    println!("point -> interval: fully faithful {}, weak {}", r.fully_faithful, r.weak(CoverClass::Split));
    let se = strong_equivalence(&inc, &point, &interval).expect("a quasi-inverse exists");
    assert!(se.violations(&inc, &point, &interval).is_empty());

    let fac = factorize(&inc, &point, &interval)?;
    assert!(fac.violations(&inc, &point, &interval).is_empty());
    println!("factored through a groupoid with {} objects", fac.middle.n_objects());

    let bz2 = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
    let bz2_twice = bz2.product(&interval);
    println!("B(Z/2) ~ B(Z/2) x I: {}", morita_equivalent(&bz2, &bz2_twice).holds());
    println!("B(Z/2) ~ point: {}", morita_equivalent(&bz2, &point).holds());
    println!("search agrees: {}", morita_by_search(&point, &interval, 4).is_some());
    Ok(())
}
