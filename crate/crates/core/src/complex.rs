//! Chromatic simplicial complexes and the set-level operators on them.
//!
//! A complex stores only its facets. Faces are produced on demand by subset
//! iteration, which keeps `Chr² s` at `n = 4` (5625 facets) cheap to hold.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::hash::Hash;

use serde_json::Value;
use thiserror::Error;

use crate::procset::{Color, ProcSet, MAX_PROCESSES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("system size {0} is outside 1..={MAX_PROCESSES}")]
    SystemSize(usize),
    #[error("a simplex needs at least one vertex")]
    EmptySimplex,
    #[error("two vertices of a simplex share color {0}")]
    ColorCollision(Color),
    #[error("color {color} exceeds system size {n}")]
    ColorOutOfRange { color: Color, n: usize },
    #[error("simplex {0} is not in the complex")]
    NotInComplex(String),
    #[error("operation requires a pure complex")]
    NotPure,
    #[error("malformed vertex uid `{0}`")]
    BadUid(String),
    #[error("unknown vertex uid `{0}` in facet list")]
    UnknownUid(String),
}

pub fn check_system_size(n: usize) -> Result<(), ComplexError> {
    if (1..=MAX_PROCESSES).contains(&n) {
        Ok(())
    } else {
        Err(ComplexError::SystemSize(n))
    }
}

/// A vertex of some chromatic complex.
///
/// `uid` must be canonical: two vertices are equal iff their uids are equal.
pub trait ChromaticVertex: Clone + Eq + Ord + Hash + fmt::Debug {
    fn color(&self) -> Color;

    fn uid(&self) -> String;

    fn parse_uid(uid: &str) -> Result<Self, ComplexError>;

    /// Nested JSON form of this vertex when it appears inside another vertex's payload.
    fn to_json(&self) -> Value;

    /// Module-specific data exported next to the uid.
    fn payload(&self) -> Value;
}

/// Vertices of the standard simplex `s` are the processes themselves.
impl ChromaticVertex for Color {
    fn color(&self) -> Color {
        *self
    }

    fn uid(&self) -> String {
        self.id().to_string()
    }

    fn parse_uid(uid: &str) -> Result<Self, ComplexError> {
        uid.trim()
            .parse::<u8>()
            .ok()
            .and_then(Color::checked)
            .ok_or_else(|| ComplexError::BadUid(uid.to_string()))
    }

    fn to_json(&self) -> Value {
        Value::from(self.id())
    }

    fn payload(&self) -> Value {
        Value::Null
    }
}

/// A chromatic simplex: a nonempty vertex set with pairwise distinct colors,
/// stored sorted by color.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex<V> {
    vertices: Vec<V>,
}

impl<V: ChromaticVertex> Simplex<V> {
    pub fn new<I: IntoIterator<Item = V>>(vertices: I) -> Result<Self, ComplexError> {
        let mut vertices: Vec<V> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(ComplexError::EmptySimplex);
        }
        vertices.sort_by_key(|v| v.color());
        for pair in vertices.windows(2) {
            if pair[0].color() == pair[1].color() {
                if pair[0] == pair[1] {
                    continue;
                }
                return Err(ComplexError::ColorCollision(pair[0].color()));
            }
        }
        vertices.dedup();
        Ok(Self { vertices })
    }

    pub fn vertex(v: V) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn vertices(&self) -> &[V] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// χ(σ), the set of colors of the simplex.
    pub fn colors(&self) -> ProcSet {
        self.vertices.iter().map(ChromaticVertex::color).collect()
    }

    pub fn vertex_of(&self, c: Color) -> Option<&V> {
        self.vertices
            .binary_search_by_key(&c, |v| v.color())
            .ok()
            .map(|i| &self.vertices[i])
    }

    pub fn contains_vertex(&self, v: &V) -> bool {
        self.vertex_of(v.color()) == Some(v)
    }

    pub fn is_face_of(&self, other: &Self) -> bool {
        self.vertices.iter().all(|v| other.contains_vertex(v))
    }

    /// The face spanned by the vertices whose color lies in `colors`, if any.
    pub fn restrict_to(&self, colors: ProcSet) -> Option<Self> {
        let vertices: Vec<V> =
            self.vertices.iter().filter(|v| colors.contains(v.color())).cloned().collect();
        (!vertices.is_empty()).then_some(Self { vertices })
    }

    /// The face given by a bitmask over vertex positions.
    pub fn face_by_mask(&self, mask: u32) -> Option<Self> {
        let vertices: Vec<V> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.clone())
            .collect();
        (!vertices.is_empty()).then_some(Self { vertices })
    }

    /// All nonempty faces, `self` included.
    pub fn faces(&self) -> impl Iterator<Item = Simplex<V>> + '_ {
        let count = 1u32 << self.vertices.len();
        (1..count).filter_map(move |mask| self.face_by_mask(mask))
    }

    pub fn uids(&self) -> Vec<String> {
        self.vertices.iter().map(ChromaticVertex::uid).collect()
    }
}

impl<V: ChromaticVertex> fmt::Debug for Simplex<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.uids().join(" "))
    }
}

impl<V: ChromaticVertex> fmt::Display for Simplex<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// An inclusion-closed family of chromatic simplices over colors `1..=n`,
/// represented by its facets.
#[derive(Clone)]
pub struct ChromaticComplex<V> {
    n: usize,
    facets: Vec<Simplex<V>>,
    by_vertex: HashMap<V, Vec<usize>>,
}

impl<V: ChromaticVertex> ChromaticComplex<V> {
    pub fn empty(n: usize) -> Self {
        Self { n, facets: Vec::new(), by_vertex: HashMap::new() }
    }

    /// `Cl(S)`: the complex of all faces of the given simplices.
    pub fn closure<I: IntoIterator<Item = Simplex<V>>>(n: usize, simplices: I) -> Self {
        let mut candidates: Vec<Simplex<V>> = simplices.into_iter().collect();
        candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        candidates.dedup();
        let mut complex = Self::empty(n);
        for sigma in candidates {
            if !complex.contains(&sigma) {
                complex.push_facet(sigma);
            }
        }
        complex.sort_facets();
        complex
    }

    /// Builds directly from a list already known to be pairwise incomparable.
    pub(crate) fn from_facets_unchecked(n: usize, facets: Vec<Simplex<V>>) -> Self {
        let mut complex = Self::empty(n);
        for f in facets {
            complex.push_facet(f);
        }
        complex.sort_facets();
        complex
    }

    fn push_facet(&mut self, sigma: Simplex<V>) {
        let idx = self.facets.len();
        for v in sigma.vertices() {
            self.by_vertex.entry(v.clone()).or_default().push(idx);
        }
        self.facets.push(sigma);
    }

    fn sort_facets(&mut self) {
        let mut sorted = std::mem::take(&mut self.facets);
        sorted.sort();
        sorted.dedup();
        self.by_vertex.clear();
        for f in sorted {
            self.push_facet(f);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn facets(&self) -> &[Simplex<V>] {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<V> {
        self.by_vertex.keys().cloned().collect()
    }

    pub fn has_vertex(&self, v: &V) -> bool {
        self.by_vertex.contains_key(v)
    }

    /// Facets containing the given vertex.
    pub fn facets_with(&self, v: &V) -> impl Iterator<Item = &Simplex<V>> {
        self.by_vertex.get(v).into_iter().flatten().map(|&i| &self.facets[i])
    }

    pub fn contains(&self, sigma: &Simplex<V>) -> bool {
        let Some(first) = sigma.vertices().first() else {
            return false;
        };
        self.facets_with(first).any(|f| sigma.is_face_of(f))
    }

    /// Every simplex of the complex.
    pub fn simplices(&self) -> BTreeSet<Simplex<V>> {
        self.facets.iter().flat_map(|f| f.faces()).collect()
    }

    /// Largest facet dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.facets.iter().map(Simplex::dim).max()
    }

    pub fn is_pure(&self) -> bool {
        let mut dims = self.facets.iter().map(Simplex::dim);
        match dims.next() {
            None => true,
            Some(d) => dims.all(|e| e == d),
        }
    }

    /// Simplices of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> Self {
        let faces = self.facets.iter().flat_map(|f| {
            let f = f.clone();
            let (count, width) = (1u32 << f.len(), (k + 1).min(f.len()));
            (1..count)
                .filter(move |m| m.count_ones() as usize == width)
                .filter_map(move |m| f.face_by_mask(m))
        });
        Self::closure(self.n, faces)
    }

    /// `St(S, K)`: simplices of `K` having some member of `S` as a face.
    pub fn star(&self, s: &BTreeSet<Simplex<V>>) -> Result<BTreeSet<Simplex<V>>, ComplexError> {
        let mut out = BTreeSet::new();
        for tau in s {
            let Some(first) = tau.vertices().first() else { continue };
            let mut found = false;
            for facet in self.facets_with(first) {
                if !tau.is_face_of(facet) {
                    continue;
                }
                found = true;
                for sigma in facet.faces() {
                    if tau.is_face_of(&sigma) {
                        out.insert(sigma);
                    }
                }
            }
            if !found {
                return Err(ComplexError::NotInComplex(tau.to_string()));
            }
        }
        Ok(out)
    }

    /// `Pc(S, K)`: closure of the facets of `K` none of whose faces is in `S`.
    pub fn pure_complement(&self, s: &BTreeSet<Simplex<V>>) -> Result<Self, ComplexError> {
        if !self.is_pure() {
            return Err(ComplexError::NotPure);
        }
        let excluded: HashSet<&Simplex<V>> = s.iter().collect();
        let kept = self
            .facets
            .iter()
            .filter(|f| f.faces().all(|face| !excluded.contains(&face)))
            .cloned()
            .collect();
        Ok(Self::from_facets_unchecked(self.n, kept))
    }

    /// The non-collapsing coloring check: every color lies in `1..=n`.
    /// Distinct colors within a simplex are enforced by [`Simplex::new`].
    pub fn check_coloring(&self) -> Result<(), ComplexError> {
        for f in &self.facets {
            for v in f.vertices() {
                if v.color().id() as usize > self.n {
                    return Err(ComplexError::ColorOutOfRange { color: v.color(), n: self.n });
                }
            }
        }
        Ok(())
    }

    /// Keeps the facets satisfying `keep`.
    pub fn filter_facets<F: FnMut(&Simplex<V>) -> bool>(&self, mut keep: F) -> Self {
        let kept = self.facets.iter().filter(|f| keep(f)).cloned().collect();
        Self::from_facets_unchecked(self.n, kept)
    }
}

impl<V: ChromaticVertex> PartialEq for ChromaticComplex<V> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.facets == other.facets
    }
}

impl<V: ChromaticVertex> Eq for ChromaticComplex<V> {}

impl<V: ChromaticVertex> fmt::Debug for ChromaticComplex<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChromaticComplex")
            .field("n", &self.n)
            .field("facets", &self.facets.len())
            .finish()
    }
}

/// The standard `(n-1)`-simplex `s`.
pub fn standard_simplex(n: usize) -> Result<ChromaticComplex<Color>, ComplexError> {
    check_system_size(n)?;
    let top = Simplex::new((1..=n as u8).map(Color::new))?;
    Ok(ChromaticComplex::from_facets_unchecked(n, vec![top]))
}
