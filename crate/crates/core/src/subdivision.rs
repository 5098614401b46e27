//! The standard chromatic subdivision and its second iteration.
//!
//! A vertex of `Chr K` is a pair `(base, view)` where `base` is a vertex of `K`
//! and `view` is a simplex of `K` containing it. [`SubVertex`] is generic over
//! the base vertex type, so `Chr s` and `Chr² s` share one implementation and a
//! `Chr²` vertex carries its whole carrier in `Chr s`.

use std::fmt;

use serde_json::{json, Value};

use crate::complex::{
    check_system_size, standard_simplex, ChromaticComplex, ChromaticVertex, ComplexError, Simplex,
};
use crate::procset::{Color, ProcSet};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubVertex<V> {
    base: V,
    view: Simplex<V>,
}

pub type ChrVertex = SubVertex<Color>;
pub type Chr2Vertex = SubVertex<ChrVertex>;
pub type ChrSimplex = Simplex<ChrVertex>;
pub type Chr2Simplex = Simplex<Chr2Vertex>;
pub type ChrComplex = ChromaticComplex<ChrVertex>;
pub type Chr2Complex = ChromaticComplex<Chr2Vertex>;

impl<V: ChromaticVertex> SubVertex<V> {
    /// Fails unless `base` belongs to `view`.
    pub fn new(base: V, view: Simplex<V>) -> Result<Self, ComplexError> {
        if !view.contains_vertex(&base) {
            return Err(ComplexError::BadUid(format!(
                "{}:{} violates self-inclusion",
                base.uid(),
                view
            )));
        }
        Ok(Self { base, view })
    }

    pub fn base(&self) -> &V {
        &self.base
    }

    /// The carrier of this vertex in the base complex.
    pub fn view(&self) -> &Simplex<V> {
        &self.view
    }

    pub fn view_colors(&self) -> ProcSet {
        self.view.colors()
    }
}

impl ChrVertex {
    pub fn from_ids(color: u8, view: &[u8]) -> Result<Self, ComplexError> {
        let view = Simplex::new(view.iter().map(|&c| Color::new(c)))?;
        Self::new(Color::new(color), view)
    }

    /// `carrier(v, s)` as a color set.
    pub fn carrier_s(&self) -> ProcSet {
        self.view.colors()
    }
}

impl Chr2Vertex {
    /// Processes seen in the first immediate snapshot.
    pub fn view1(&self) -> ProcSet {
        self.base.view_colors()
    }

    /// Processes seen in the second immediate snapshot.
    pub fn view2(&self) -> ProcSet {
        self.view.colors()
    }

    /// `carrier(v, s)`.
    pub fn carrier_s(&self) -> ProcSet {
        self.view.carrier().colors()
    }
}

impl<V: ChromaticVertex> ChromaticVertex for SubVertex<V> {
    fn color(&self) -> Color {
        self.base.color()
    }

    fn uid(&self) -> String {
        format!("{}:[{}]", self.color().id(), self.view.uids().join(","))
    }

    fn parse_uid(uid: &str) -> Result<Self, ComplexError> {
        let bad = || ComplexError::BadUid(uid.to_string());
        let (color, rest) = uid.split_once(':').ok_or_else(bad)?;
        let color = Color::parse_uid(color).map_err(|_| bad())?;
        let inner = rest.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let members = split_top_level(inner)
            .ok_or_else(bad)?
            .into_iter()
            .map(V::parse_uid)
            .collect::<Result<Vec<V>, _>>()?;
        let view = Simplex::new(members).map_err(|_| bad())?;
        let base = view.vertex_of(color).cloned().ok_or_else(bad)?;
        Ok(Self { base, view })
    }

    fn to_json(&self) -> Value {
        json!({
            "color": self.color().id(),
            "view": self.view.vertices().iter().map(V::to_json).collect::<Vec<_>>(),
        })
    }

    fn payload(&self) -> Value {
        json!({ "view": self.view.vertices().iter().map(V::to_json).collect::<Vec<_>>() })
    }
}

impl<V: ChromaticVertex> fmt::Debug for SubVertex<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.uid())
    }
}

/// Splits on commas that are not nested inside brackets.
fn split_top_level(s: &str) -> Option<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' => depth += 1,
            ']' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&s[start..]);
    Some(parts)
}

impl<V: ChromaticVertex> Simplex<SubVertex<V>> {
    /// Carrier in the base complex.
    ///
    /// Views within a simplex of a chromatic subdivision form a chain, so the
    /// union of the vertex carriers is simply the largest view.
    pub fn carrier(&self) -> Simplex<V> {
        let largest = self
            .vertices()
            .iter()
            .map(SubVertex::view)
            .max_by_key(|view| view.len())
            .expect("simplices are nonempty");
        debug_assert!(self.vertices().iter().all(|v| v.view().is_face_of(largest)));
        largest.clone()
    }

    /// Union of the vertex carriers computed without assuming the chain property.
    pub fn carrier_union(&self) -> Result<Simplex<V>, ComplexError> {
        Simplex::new(self.vertices().iter().flat_map(|v| v.view().vertices().iter().cloned()))
    }

    /// Checks self-inclusion, containment and immediacy for every vertex pair.
    pub fn check_is_axioms(&self) -> Result<(), IsViolation> {
        let vs = self.vertices();
        for u in vs {
            if !u.view.contains_vertex(&u.base) {
                return Err(IsViolation::new(IsAxiom::SelfInclusion, u, u));
            }
        }
        for (i, u) in vs.iter().enumerate() {
            for w in &vs[i + 1..] {
                if !u.view.is_face_of(&w.view) && !w.view.is_face_of(&u.view) {
                    return Err(IsViolation::new(IsAxiom::Containment, u, w));
                }
            }
        }
        for u in vs {
            for w in vs {
                if w.view.contains_vertex(&u.base) && !u.view.is_face_of(&w.view) {
                    return Err(IsViolation::new(IsAxiom::Immediacy, u, w));
                }
            }
        }
        Ok(())
    }
}

impl Chr2Simplex {
    /// `carrier(σ, s)` obtained through `carrier(σ, Chr s)`.
    pub fn carrier_s(&self) -> Simplex<Color> {
        self.carrier().carrier()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsAxiom {
    SelfInclusion,
    Containment,
    Immediacy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsViolation {
    pub axiom: IsAxiom,
    pub first: String,
    pub second: String,
}

impl IsViolation {
    fn new<V: ChromaticVertex>(axiom: IsAxiom, a: &V, b: &V) -> Self {
        Self { axiom, first: a.uid(), second: b.uid() }
    }
}

impl fmt::Display for IsViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} fails for {} and {}", self.axiom, self.first, self.second)
    }
}

/// A sequence of pairwise disjoint, nonempty blocks of processes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OrderedPartition {
    blocks: Vec<ProcSet>,
}

impl OrderedPartition {
    pub fn new(blocks: Vec<ProcSet>) -> Result<Self, ComplexError> {
        let mut seen = ProcSet::EMPTY;
        for b in &blocks {
            if b.is_empty() {
                return Err(ComplexError::EmptySimplex);
            }
            if let Some(c) = b.intersection(seen).min() {
                return Err(ComplexError::ColorCollision(c));
            }
            seen = seen.union(*b);
        }
        Ok(Self { blocks })
    }

    pub fn from_ids(blocks: &[&[u8]]) -> Result<Self, ComplexError> {
        Self::new(blocks.iter().map(|b| ProcSet::from_ids(b.iter().copied())).collect())
    }

    pub fn blocks(&self) -> &[ProcSet] {
        &self.blocks
    }

    pub fn support(&self) -> ProcSet {
        self.blocks.iter().fold(ProcSet::EMPTY, |acc, b| acc.union(*b))
    }

    /// The snapshot returned to `c`: its block together with all earlier blocks.
    pub fn snapshot_of(&self, c: Color) -> Option<ProcSet> {
        let mut acc = ProcSet::EMPTY;
        for b in &self.blocks {
            acc = acc.union(*b);
            if b.contains(c) {
                return Some(acc);
            }
        }
        None
    }
}

impl fmt::Display for OrderedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = self.blocks.iter().map(ToString::to_string).collect();
        f.write_str(&shown.join(""))
    }
}

/// All ordered partitions of `set`, in canonical order.
pub fn ordered_partitions(set: ProcSet) -> Vec<OrderedPartition> {
    fn go(rest: ProcSet, prefix: &mut Vec<ProcSet>, out: &mut Vec<OrderedPartition>) {
        if rest.is_empty() {
            out.push(OrderedPartition { blocks: prefix.clone() });
            return;
        }
        for block in rest.nonempty_subsets() {
            prefix.push(block);
            go(rest.difference(block), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if !set.is_empty() {
        go(set, &mut Vec::new(), &mut out);
    }
    out.sort();
    out
}

/// The simplex of `Chr(base)` produced by an immediate snapshot run with the
/// given block order. The partition must cover exactly the colors of `base`.
pub fn run_simplex<V: ChromaticVertex>(
    base: &Simplex<V>,
    partition: &OrderedPartition,
) -> Result<Simplex<SubVertex<V>>, ComplexError> {
    if partition.support() != base.colors() {
        return Err(ComplexError::NotInComplex(format!(
            "partition {partition} does not cover {}",
            base.colors()
        )));
    }
    let mut seen = ProcSet::EMPTY;
    let mut vertices = Vec::with_capacity(base.len());
    for block in partition.blocks() {
        seen = seen.union(*block);
        let view = base.restrict_to(seen).expect("block is nonempty");
        for c in block.iter() {
            let v = base.vertex_of(c).expect("block inside base").clone();
            vertices.push(SubVertex { base: v, view: view.clone() });
        }
    }
    Simplex::new(vertices)
}

/// Facet of `Chr s` corresponding to an ordered partition of `Π`.
pub fn partition_to_facet(n: usize, partition: &OrderedPartition) -> Result<ChrSimplex, ComplexError> {
    check_system_size(n)?;
    let top = standard_simplex(n)?.facets()[0].clone();
    run_simplex(&top, partition)
}

/// Inverse of [`run_simplex`]: groups vertices by view, smallest view first.
pub fn facet_to_partition<V: ChromaticVertex>(sigma: &Simplex<SubVertex<V>>) -> OrderedPartition {
    let mut views: Vec<ProcSet> = sigma.vertices().iter().map(SubVertex::view_colors).collect();
    views.sort_by_key(|v| v.len());
    views.dedup();
    let mut blocks = Vec::with_capacity(views.len());
    let mut prev = ProcSet::EMPTY;
    for v in views {
        blocks.push(v.difference(prev));
        prev = v;
    }
    OrderedPartition { blocks }
}

/// `Chr(base)`: subdivide each facet independently. Shared faces produce
/// identical vertices, which glues the pieces together.
pub fn build_chr<V: ChromaticVertex>(base: &ChromaticComplex<V>) -> ChromaticComplex<SubVertex<V>> {
    let facets: Vec<Simplex<SubVertex<V>>> = base
        .facets()
        .iter()
        .flat_map(|facet| {
            ordered_partitions(facet.colors())
                .into_iter()
                .map(move |p| run_simplex(facet, &p).expect("partition covers facet"))
        })
        .collect();
    ChromaticComplex::closure(base.n(), facets)
}

pub fn chr_s(n: usize) -> Result<ChrComplex, ComplexError> {
    Ok(build_chr(&standard_simplex(n)?))
}

pub fn build_chr2(n: usize) -> Result<Chr2Complex, ComplexError> {
    Ok(build_chr(&chr_s(n)?))
}

/// The facet of `Chr² s` reached by two consecutive full-participation runs.
pub fn chr2_facet(
    n: usize,
    first: &OrderedPartition,
    second: &OrderedPartition,
) -> Result<Chr2Simplex, ComplexError> {
    let outer = partition_to_facet(n, first)?;
    run_simplex(&outer, second)
}

/// Barycentric coordinates of a vertex in the realization of `s`.
pub trait Realize {
    fn point(&self, n: usize) -> Vec<f64>;
}

impl Realize for Color {
    fn point(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        x[self.index()] = 1.0;
        x
    }
}

/// `(i, t)` sits at `x_i / (2k-1) + 2/(2k-1) * sum of the other corners of t`,
/// with the corners of `t` themselves realized recursively.
impl<V: ChromaticVertex + Realize> Realize for SubVertex<V> {
    fn point(&self, n: usize) -> Vec<f64> {
        let k = self.view.len() as f64;
        let denom = 2.0 * k - 1.0;
        let mut out = vec![0.0; n];
        for u in self.view.vertices() {
            let weight = if *u == self.base { 1.0 } else { 2.0 } / denom;
            for (o, x) in out.iter_mut().zip(u.point(n)) {
                *o += weight * x;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_two() {
        let ps = ordered_partitions(ProcSet::full(2));
        let shown: Vec<String> = ps.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["{1}{2}", "{1,2}", "{2}{1}"]);
    }

    #[test]
    fn synchronous_run_sees_everyone() {
        let p = OrderedPartition::from_ids(&[&[1, 2, 3]]).unwrap();
        let f = partition_to_facet(3, &p).unwrap();
        assert!(f.vertices().iter().all(|v| v.carrier_s() == ProcSet::full(3)));
        assert_eq!(f.carrier().colors(), ProcSet::full(3));
    }

    #[test]
    fn ordered_run_views() {
        let p = OrderedPartition::from_ids(&[&[2], &[1], &[3]]).unwrap();
        let f = partition_to_facet(3, &p).unwrap();
        let v1 = f.vertex_of(Color::new(1)).unwrap();
        assert_eq!(v1.carrier_s(), ProcSet::from_ids([1, 2]));
        assert_eq!(facet_to_partition(&f), p);
    }

    #[test]
    fn partition_must_cover() {
        let p = OrderedPartition::from_ids(&[&[1], &[2]]).unwrap();
        assert!(partition_to_facet(3, &p).is_err());
        assert!(OrderedPartition::from_ids(&[&[1], &[1, 2]]).is_err());
    }

    #[test]
    fn uid_round_trip() {
        let k = build_chr2(3).unwrap();
        for v in k.vertices() {
            assert_eq!(Chr2Vertex::parse_uid(&v.uid()).unwrap(), v);
        }
        let v = ChrVertex::from_ids(1, &[1, 2]).unwrap();
        assert_eq!(v.uid(), "1:[1,2]");
        assert!(ChrVertex::parse_uid("3:[1,2]").is_err());
        assert!(ChrVertex::parse_uid("1:[1,2").is_err());
    }

    #[test]
    fn solo_vertex_sits_at_corner() {
        let v = ChrVertex::from_ids(2, &[2]).unwrap();
        assert_eq!(v.point(3), vec![0.0, 1.0, 0.0]);
        let w = ChrVertex::from_ids(1, &[1, 2, 3]).unwrap();
        let p = w.point(3);
        assert!((p[0] - 0.2).abs() < 1e-12 && (p[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn chr2_has_full_vertex_carriers() {
        let k = build_chr2(2).unwrap();
        assert_eq!(k.facets().len(), 9);
        for f in k.facets() {
            assert_eq!(f.colors(), ProcSet::full(2));
            assert_eq!(f.carrier_s().colors(), ProcSet::full(2));
        }
    }
}
