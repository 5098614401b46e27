//! JSON and mesh export of chromatic complexes.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::{ChromaticComplex, ChromaticVertex, ComplexError, Simplex};
use crate::procset::Color;
use crate::subdivision::Realize;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub uid: String,
    pub color: Color,
    pub payload: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDocument {
    pub n: usize,
    pub vertices: Vec<VertexRecord>,
    pub facets: Vec<Vec<String>>,
}

pub fn to_document<V: ChromaticVertex>(k: &ChromaticComplex<V>) -> ComplexDocument {
    let vertices = k
        .vertices()
        .into_iter()
        .map(|v| VertexRecord { uid: v.uid(), color: v.color(), payload: v.payload() })
        .collect();
    let facets = k.facets().iter().map(Simplex::uids).collect();
    ComplexDocument { n: k.n(), vertices, facets }
}

/// Rebuilds a complex, checking that every uid parses and its color matches.
pub fn from_document<V: ChromaticVertex>(doc: &ComplexDocument) -> Result<ChromaticComplex<V>, ComplexError> {
    crate::complex::check_system_size(doc.n)?;
    let mut by_uid = HashMap::new();
    for rec in &doc.vertices {
        let v = V::parse_uid(&rec.uid)?;
        if v.color() != rec.color {
            return Err(ComplexError::BadUid(rec.uid.clone()));
        }
        by_uid.insert(rec.uid.as_str(), v);
    }
    let mut facets = Vec::with_capacity(doc.facets.len());
    for facet in &doc.facets {
        let vs = facet
            .iter()
            .map(|u| by_uid.get(u.as_str()).cloned().ok_or_else(|| ComplexError::UnknownUid(u.clone())))
            .collect::<Result<Vec<V>, _>>()?;
        facets.push(Simplex::new(vs)?);
    }
    let k = ChromaticComplex::closure(doc.n, facets);
    k.check_coloring()?;
    Ok(k)
}

/// Object File Format mesh of the triangles of a complex realized in `R^n`,
/// projected to the first three barycentric coordinates. Used for `n = 4`.
pub fn to_off<V: ChromaticVertex + Realize>(k: &ChromaticComplex<V>) -> String {
    let vertices: Vec<V> = k.vertices().into_iter().collect();
    let index: HashMap<&V, usize> = vertices.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut triangles = std::collections::BTreeSet::new();
    for f in k.facets() {
        let ids: Vec<usize> = f.vertices().iter().map(|v| index[v]).collect();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                for c in b + 1..ids.len() {
                    triangles.insert([ids[a], ids[b], ids[c]]);
                }
            }
        }
    }
    let mut out = String::from("OFF\n");
    let _ = writeln!(out, "{} {} 0", vertices.len(), triangles.len());
    for v in &vertices {
        let p = v.point(k.n());
        let coord = |i: usize| p.get(i).copied().unwrap_or(0.0);
        let _ = writeln!(out, "{:.6} {:.6} {:.6}", coord(0), coord(1), coord(2));
    }
    for t in &triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::{build_chr2, chr_s, Chr2Vertex, ChrVertex};

    #[test]
    fn document_round_trip() {
        let k = chr_s(3).unwrap();
        let doc = to_document(&k);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.starts_with("{\"n\":3,\"vertices\":"));
        let back: ComplexDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(from_document::<ChrVertex>(&back).unwrap(), k);
    }

    #[test]
    fn chr2_document_round_trip() {
        let k = build_chr2(2).unwrap();
        let doc = to_document(&k);
        assert_eq!(from_document::<Chr2Vertex>(&doc).unwrap(), k);
    }

    #[test]
    fn unknown_uid_is_rejected() {
        let mut doc = to_document(&chr_s(2).unwrap());
        doc.facets[0][0] = "2:[2]".into();
        doc.vertices.retain(|v| v.uid != "2:[2]");
        assert!(from_document::<ChrVertex>(&doc).is_err());
    }

    #[test]
    fn off_header_counts() {
        let k = chr_s(4).unwrap();
        let off = to_off(&k);
        let header = off.lines().nth(1).unwrap();
        assert!(header.starts_with(&format!("{} ", k.vertices().len())));
    }
}
