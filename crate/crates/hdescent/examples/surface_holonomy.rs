//! Holonomy of forms, gerbes and orientifold data on triangulated surfaces.

use hdescent::holonomy::{
    jandl_holonomy, kan_bundle_check, oriented_holonomy, orientation_double_cover, trivialize, DiscreteTwoForm, GerbeData,
    OrientifoldData, SolveOrder, Q,
};
use hdescent::site::{FiniteSet, TriangulatedSurface};

fn main() -> hdescent::Result<()> {
    let tet = TriangulatedSurface::tetrahedron();
    let w = DiscreteTwoForm::new(tet.clone(), vec![Q::new(1, 8); 4])?;
    println!("tetrahedron with 1/8 per face: exponent {}", oriented_holonomy(&w)?);

    let g = GerbeData::trivial(&w);
    let t = trivialize(&g, SolveOrder::Forward)?;
    println!("gerbe holonomy {} = trivialization holonomy {}", g.holonomy()?, t.holonomy());

    let rp2 = TriangulatedSurface::rp2();
    let dc = orientation_double_cover(&rp2)?.report();
    println!("RP2 double cover: Euler {} over {}, connected {}", dc.total_euler, dc.base_euler, dc.total_connected);
    let o = OrientifoldData::new(rp2.clone(), &vec![Q::new(1, 20); rp2.faces.len()], vec![false; rp2.edges().len()])?;
    println!("orientifold on RP2: exponent {}, independent of the domain: {}", jandl_holonomy(&o)?, o.all_domain_values()?.len() == 1);

    let pts = FiniteSet::new(["a", "b"])?;
    let k = kan_bundle_check(&pts, &[1, 0])?;
    println!("quotient bundle of a free involution matches the canonical one: {}", k.matches && k.section_trivializes);
    Ok(())
}
