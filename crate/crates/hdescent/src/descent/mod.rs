//! Descent bicategories over simplicial sets, cover refinements, and the
//! decision engines for equivalence.

pub mod bicategory;
pub mod explicit;
pub mod holim;
pub mod window;

use std::collections::HashMap;

pub use bicategory::{is_equivalence, Bifunctor, EngineReport, FinBicategory};
pub use explicit::{DescentMorphism, DescentObject, DescentSpace};
pub use holim::{holim, CosimplicialBicategory};

use crate::error::{Error, Result};
use crate::prestacks::CyclicInstance;
use crate::simplicial::SimplicialMap;
use crate::site::{cover_nerve, Cover, CoverNerve, SetMap};

/// `Desc_X(Y ↠ M)` in cocycle coordinates over the Čech nerve.
pub fn descent_bicategory(inst: &CyclicInstance, c: &Cover, normalized: bool, limit: u64) -> Result<FinBicategory> {
    let nerve = cover_nerve(c, 4)?;
    DescentSpace::new(inst, &nerve.simplicial, normalized)?.build(limit)
}

/// `τ_Y: X(M) → Desc_X(Y ↠ M)` together with `X(M)`.
pub fn tau_functor(inst: &CyclicInstance, c: &Cover, desc: &FinBicategory, normalized: bool, limit: u64) -> Result<(FinBicategory, Bifunctor)> {
    let nerve = cover_nerve(c, 4)?;
    let eval_m = inst.eval(c.base(), limit)?;
    let f = DescentSpace::new(inst, &nerve.simplicial, normalized)?.tau(&eval_m, c.map.images(), desc)?;
    Ok((eval_m, f))
}

/// Map of Čech nerves induced by `s: Z → Y` over the common base.
pub fn nerve_map(s: &SetMap, z: &CoverNerve, y: &CoverNerve) -> Result<SimplicialMap> {
    if z.cover.base() != y.cover.base() {
        return Err(Error::BaseMismatch("covers live over different bases".into()));
    }
    if s.domain != *z.cover.total() || s.codomain != *y.cover.total() {
        return Err(Error::InvalidMap("refinement map must go from the first cover to the second".into()));
    }
    for i in 0..s.domain.len() {
        if y.cover.map.apply(s.apply(i)) != z.cover.map.apply(i) {
            return Err(Error::InvalidMap(format!("triangle over the base fails at {}", s.domain.label(i))));
        }
    }
    let levels = z
        .tuples
        .iter()
        .zip(&y.tuples)
        .map(|(zl, yl)| {
            let index: HashMap<&[usize], usize> = yl.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
            zl.iter().map(|t| index[t.iter().map(|&z| s.apply(z)).collect::<Vec<_>>().as_slice()]).collect()
        })
        .collect();
    Ok(SimplicialMap { levels })
}

/// `s*: Desc(Y) → Desc(Z)` for a refinement `s: Z → Y` over `M`.
pub fn refinement_functor(s: &SetMap, z: &Cover, y: &Cover, desc_y: &FinBicategory, desc_z: &FinBicategory) -> Result<Bifunctor> {
    let (nz, ny) = (cover_nerve(z, 4)?, cover_nerve(y, 4)?);
    let m = nerve_map(s, &nz, &ny)?;
    explicit::pullback_descent(&m, desc_y, &ny.simplicial, desc_z)
}
