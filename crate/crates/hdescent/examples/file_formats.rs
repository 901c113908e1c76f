//! Writes the JSON fixtures under `data/` and checks that each one loads back.
//!
//! `cargo run --example file_formats` prints the files it would write;
//! `cargo run --example file_formats -- --write data` writes them.

use std::path::Path;

use hdescent::cli::files::{CoverFile, DescentObjectFile, FormFile, FunctorFile, GroupoidFile, OrientifoldFile, SetFile, SurfaceFile};
use hdescent::descent::{descent_bicategory, DescentSpace};
use hdescent::group::FiniteGroup;
use hdescent::groupoid::{FiniteGroupoid, GroupoidFunctor};
use hdescent::holonomy::{closed_edge_sets, OrientifoldData, Q};
use hdescent::prestacks::CyclicInstance;
use hdescent::site::{cover_nerve, Cover, CoverClass, FiniteSet, TriangulatedSurface};
use serde::Serialize;

fn to_point(g: &FiniteGroupoid) -> GroupoidFunctor {
    GroupoidFunctor { f0: vec![0; g.n_objects()], f1: vec![0; g.n_morphisms()] }
}

fn functor(f: &GroupoidFunctor, src: &FiniteGroupoid, dst: &FiniteGroupoid) -> FunctorFile {
    assert!(f.violations(src, dst).is_empty());
    FunctorFile::from_functor(f, src, dst)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let out_dir = match args.iter().position(|a| a == "--write") {
        Some(i) => Some(args.get(i + 1).ok_or("--write needs a directory")?.clone()),
        None => None,
    };
    let mut files: Vec<(String, String)> = Vec::new();
    let mut put = |name: &str, v: &dyn erased::Json| files.push((name.to_string(), v.json()));

    let point = FiniteGroupoid::point();
    let interval = FiniteGroupoid::interval();
    let bz2 = FiniteGroupoid::delooping(&FiniteGroup::cyclic(2));
    let bz3 = FiniteGroupoid::delooping(&FiniteGroup::cyclic(3));
    let two = FiniteSet::new(["x", "y"])?;
    let free = FiniteGroupoid::action(&FiniteGroup::cyclic(2), &two, &[vec![0, 1], vec![1, 0]])?;
    for (name, g) in [("point", &point), ("interval", &interval), ("bz2", &bz2), ("bz3", &bz3), ("free_z2", &free)] {
        put(&format!("groupoids/{name}.json"), &GroupoidFile::from_groupoid(g));
    }

    put("functors/interval_to_point.json", &functor(&to_point(&interval), &interval, &point));
    let a = interval.objects.index("a").ok_or("interval has object a")?;
    let end = GroupoidFunctor { f0: vec![a], f1: vec![interval.identity[a]] };
    put("functors/point_to_interval.json", &functor(&end, &point, &interval));
    put("functors/bz2_to_point.json", &functor(&to_point(&bz2), &bz2, &point));
    put("functors/free_z2_to_point.json", &functor(&to_point(&free), &free, &point));
    let (cyl, i0, _) = bz2.cylinder();
    put("functors/bz2_cylinder_end.json", &functor(&i0, &bz2, &cyl));

    let one = FiniteSet::new(["m"])?;
    let pair_base = FiniteSet::new(["m", "n"])?;
    put("sets/point.json", &SetFile { elements: one.labels().to_vec() });
    put("sets/two.json", &SetFile { elements: pair_base.labels().to_vec() });
    let pair_cover = Cover::from_fibers(&one, &[2], CoverClass::Surjection)?;
    put("covers/pair_of_point.json", &CoverFile::from_cover(&pair_cover));
    put("covers/identity_two.json", &CoverFile::from_cover(&Cover::identity(&pair_base)));
    put("covers/split_two.json", &CoverFile::from_cover(&Cover::from_fibers(&pair_base, &[2, 1], CoverClass::Split)?));

    let inst = CyclicInstance::grbtriv(2);
    let desc = descent_bicategory(&inst, &pair_cover, true, 1 << 16)?;
    let nerve = cover_nerve(&pair_cover, 4)?;
    let space = DescentSpace::new(&inst, &nerve.simplicial, true)?;
    let obj = space.decode_object(&desc.objects[desc.objects.len() - 1]);
    put(
        "descent/pair_object.json",
        &DescentObjectFile { instance: inst.name.clone(), cover: CoverFile::from_cover(&pair_cover), normalized: true, p: obj.p, mu: obj.mu },
    );

    let surfaces = [
        ("tetrahedron", TriangulatedSurface::tetrahedron()),
        ("torus", TriangulatedSurface::torus_grid()),
        ("rp2", TriangulatedSurface::rp2()),
        ("klein", TriangulatedSurface::klein_bottle()),
    ];
    for (name, s) in &surfaces {
        put(&format!("surfaces/{name}.json"), &SurfaceFile::from_surface(s));
    }
    put("forms/tetrahedron_eighths.json", &FormFile::from_values(&[Q::new(1, 8); 4]));
    let torus_faces = surfaces[1].1.faces.len();
    put("forms/torus_tenths.json", &FormFile::from_values(&vec![Q::new(1, 10); torus_faces]));

    let rp2 = &surfaces[2].1;
    let edges = rp2.edges();
    let zero = vec![Q::from_integer(0); rp2.faces.len()];
    // the first closed edge set whose class is nontrivial shows up as holonomy 1/2
    let kappa = closed_edge_sets(rp2)
        .into_iter()
        .find(|k| OrientifoldData::new(rp2.clone(), &zero, k.clone()).and_then(|o| o.holonomy()).is_ok_and(|h| h == Q::new(1, 2)))
        .ok_or("rp2 carries a nontrivial edge class")?;
    let kappa_labels: Vec<[String; 2]> = edges
        .iter()
        .zip(&kappa)
        .filter(|(_, &k)| k)
        .map(|(e, _)| [rp2.vertices.label(e.a).to_string(), rp2.vertices.label(e.b).to_string()])
        .collect();
    put(
        "orientifolds/rp2_twisted.json",
        &OrientifoldFile { surface: SurfaceFile::from_surface(rp2), values: FormFile::from_values(&zero).values, kappa: kappa_labels },
    );
    put(
        "orientifolds/rp2_plain.json",
        &OrientifoldFile { surface: SurfaceFile::from_surface(rp2), values: FormFile::from_values(&zero).values, kappa: Vec::new() },
    );

    for (name, text) in &files {
        match &out_dir {
            Some(dir) => {
                let path = Path::new(dir).join(name);
                std::fs::create_dir_all(path.parent().unwrap())?;
                std::fs::write(&path, format!("{text}\n"))?;
            }
            None => println!("{name}: {} bytes", text.len()),
        }
    }
    if let Some(dir) = &out_dir {
        let bad = Path::new(dir).join("invalid");
        std::fs::create_dir_all(&bad)?;
        std::fs::write(bad.join("empty.json"), "")?;
        std::fs::write(bad.join("syntax.json"), "{\n  \"elements\": [\"a\", \"b\"\n}\n")?;
        std::fs::write(bad.join("missing_field.json"), "{\n  \"vertices\": [\"a\", \"b\", \"c\"]\n}\n")?;
        let mut dup = GroupoidFile::from_groupoid(&FiniteGroupoid::point());
        dup.objects.push("*".into());
        std::fs::write(bad.join("duplicate_label.json"), format!("{}\n", serde_json::to_string_pretty(&dup)?))?;
        println!("wrote {} fixtures and 4 invalid files to {dir}", files.len());
    }
    Ok(())
}

mod erased {
    pub trait Json {
        fn json(&self) -> String;
    }

    impl<T: super::Serialize> Json for T {
        fn json(&self) -> String {
            serde_json::to_string_pretty(self).expect("fixture serializes")
        }
    }
}
