use std::collections::BTreeSet;

use affine_fair::complex::{ChromaticComplex, Simplex};
use affine_fair::procset::Color;
use affine_fair::subdivision::{chr_s, ChrVertex};
use proptest::prelude::*;

fn chr3_facets() -> Vec<Simplex<ChrVertex>> {
    chr_s(3).unwrap().facets().to_vec()
}

/// A random subcomplex of `Chr s` at n = 3, given by some of its faces.
fn random_simplices() -> impl Strategy<Value = Vec<Simplex<ChrVertex>>> {
    let facets = chr3_facets();
    prop::collection::vec((0..facets.len(), 1u32..8), 0..8).prop_map(move |picks| {
        picks.into_iter().filter_map(|(i, mask)| facets[i].face_by_mask(mask)).collect()
    })
}

/// Faces of every simplex, enumerated by brute force without the facet index.
fn brute_simplices(k: &ChromaticComplex<ChrVertex>) -> BTreeSet<Simplex<ChrVertex>> {
    let mut out = BTreeSet::new();
    for f in k.facets() {
        let vs = f.vertices();
        for mask in 1u32..(1 << vs.len()) {
            let face: Vec<ChrVertex> =
                (0..vs.len()).filter(|i| mask & (1 << i) != 0).map(|i| vs[i].clone()).collect();
            out.insert(Simplex::new(face).unwrap());
        }
    }
    out
}

proptest! {
    #[test]
    fn closure_is_idempotent(simplices in random_simplices()) {
        let k = ChromaticComplex::closure(3, simplices);
        let again = ChromaticComplex::closure(3, k.simplices());
        prop_assert_eq!(&again, &k);
        prop_assert_eq!(k.simplices(), brute_simplices(&k));
        k.check_coloring().unwrap();
    }

    #[test]
    fn closure_contains_its_inputs(simplices in random_simplices()) {
        let k = ChromaticComplex::closure(3, simplices.clone());
        for s in &simplices {
            prop_assert!(k.contains(s));
        }
        for v in k.vertices() {
            prop_assert!(k.contains(&Simplex::vertex(v)));
        }
    }

    #[test]
    fn star_matches_subset_scan(picks in random_simplices()) {
        let k = chr_s(3).unwrap();
        let s: BTreeSet<_> = picks.into_iter().collect();
        let star = k.star(&s).unwrap();
        let brute: BTreeSet<_> = brute_simplices(&k)
            .into_iter()
            .filter(|sigma| s.iter().any(|t| t.is_face_of(sigma)))
            .collect();
        prop_assert!(s.is_subset(&star));
        prop_assert_eq!(star, brute);
    }

    #[test]
    fn pure_complement_avoids_excluded(picks in random_simplices()) {
        let k = chr_s(3).unwrap();
        let s: BTreeSet<_> = picks.into_iter().collect();
        let pc = k.pure_complement(&s).unwrap();
        prop_assert!(pc.is_pure());
        for sigma in pc.simplices() {
            prop_assert!(!s.contains(&sigma));
        }
        let kept = k.facets().iter().filter(|f| f.faces().all(|face| !s.contains(&face))).count();
        prop_assert_eq!(pc.facets().len(), kept);
    }
}

#[test]
fn star_of_central_vertex() {
    let k = chr_s(3).unwrap();
    let centre = ChrVertex::from_ids(2, &[1, 2, 3]).unwrap();
    let v = Simplex::vertex(centre.clone());
    let star = k.star(&BTreeSet::from([v])).unwrap();
    let brute: BTreeSet<_> = brute_simplices(&k).into_iter().filter(|s| s.contains_vertex(&centre)).collect();
    assert_eq!(star, brute);
    // Facets through a full-view vertex: that process in the last block.
    let facets = k.facets().iter().filter(|f| f.contains_vertex(&centre)).count();
    assert_eq!(facets, 1 + 2 + 1 + 2);
}

#[test]
fn star_requires_membership() {
    let k = ChromaticComplex::closure(3, chr3_facets().into_iter().take(1));
    let outside = chr3_facets().into_iter().last().unwrap();
    assert!(k.star(&BTreeSet::from([outside])).is_err());
}

#[test]
fn skeleton_keeps_low_faces() {
    let k = chr_s(3).unwrap();
    let sk = k.skeleton(1);
    assert!(sk.facets().iter().all(|f| f.dim() == 1));
    let edges: BTreeSet<_> = brute_simplices(&k).into_iter().filter(|s| s.dim() <= 1).collect();
    assert_eq!(sk.simplices(), edges);
    assert_eq!(k.skeleton(0).facets().len(), k.vertices().len());
    assert_eq!(k.skeleton(5), k);
    assert_eq!(Color::new(1).to_string(), "p1");
}
