//! Building finite groupoids and reading off their structure.

use hdescent::group::FiniteGroup;
use hdescent::groupoid::FiniteGroupoid;
use hdescent::site::{Cover, CoverClass, FiniteSet};

fn main() -> hdescent::Result<()> {
    let s3 = FiniteGroupoid::delooping(&FiniteGroup::s3());
    let m = FiniteSet::new(["a", "b", "c"])?;
    // rotation action of Z/3 on three points
    let rot = FiniteGroupoid::action(&FiniteGroup::cyclic(3), &m, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]])?;
    let cech = FiniteGroupoid::cech(&Cover::from_fibers(&m, &[2, 1, 1], CoverClass::Surjection)?);

    for (name, g) in [("B S3", &s3), ("{a,b,c}//Z3", &rot), ("Cech groupoid", &cech)] {
        assert!(g.check_axioms().is_empty());
        let comps = g.components();
        let orders: Vec<usize> = comps.iter().map(|c| g.vertex_group(c[0]).0.order()).collect();
        let nerve = g.nerve(2);
        println!(
            "{name}: {} objects, {} morphisms, vertex group orders {orders:?}, {} 2-simplices",
            g.n_objects(),
            g.n_morphisms(),
            nerve.simplicial.size(2)
        );
    }
    let (skel, _) = rot.skeleton();
    println!("skeleton of the free action: {} object(s), {} morphism(s)", skel.n_objects(), skel.n_morphisms());
    Ok(())
}
