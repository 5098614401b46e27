//! Process identifiers and compact process sets.
//!
//! Processes are `p1..pn` with `n <= MAX_PROCESSES`. A [`ProcSet`] is a bitmask
//! over those identifiers; bit `i - 1` stands for process `p_i`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest supported system size.
pub const MAX_PROCESSES: usize = 5;

/// A process identifier, also used as the color of chromatic vertices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Color(u8);

impl Color {
    /// Panics if `id` is outside `1..=MAX_PROCESSES`.
    pub fn new(id: u8) -> Self {
        Self::checked(id).unwrap_or_else(|| panic!("process id {id} outside 1..={MAX_PROCESSES}"))
    }

    pub fn checked(id: u8) -> Option<Self> {
        (1..=MAX_PROCESSES as u8).contains(&id).then_some(Self(id))
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Zero-based position, handy for indexing per-process arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        Self::new(index as u8 + 1)
    }

    fn bit(self) -> u8 {
        1 << (self.0 - 1)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.0)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let id = u8::deserialize(deserializer)?;
        Color::checked(id)
            .ok_or_else(|| serde::de::Error::custom(format!("process id {id} out of range")))
    }
}

/// A set of processes.
///
/// Ordering is lexicographic on the ascending list of members, so
/// `{1} < {1,2} < {1,3} < {2}`. The empty set sorts first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ProcSet(u8);

impl ProcSet {
    pub const EMPTY: ProcSet = ProcSet(0);

    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_PROCESSES, "system size {n} exceeds {MAX_PROCESSES}");
        Self(((1u16 << n) - 1) as u8)
    }

    pub fn singleton(c: Color) -> Self {
        Self(c.bit())
    }

    pub fn from_bits(bits: u8) -> Self {
        assert!(bits < (1 << MAX_PROCESSES), "bitmask {bits:#b} names unknown processes");
        Self(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// Builds a set from process ids; panics on an out-of-range id.
    pub fn from_ids<I: IntoIterator<Item = u8>>(ids: I) -> Self {
        ids.into_iter().map(Color::new).collect()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, c: Color) -> bool {
        self.0 & c.bit() != 0
    }

    pub fn insert(&mut self, c: Color) {
        self.0 |= c.bit();
    }

    pub fn with(self, c: Color) -> Self {
        Self(self.0 | c.bit())
    }

    pub fn without(self, c: Color) -> Self {
        Self(self.0 & !c.bit())
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Self(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Self(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset(self, other: Self) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest process identifier in the set.
    pub fn min(self) -> Option<Color> {
        self.iter().next()
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = Color> {
        (0..MAX_PROCESSES).filter(move |i| self.0 & (1 << i) != 0).map(Color::from_index)
    }

    /// All subsets, the empty set and `self` included, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = ProcSet> {
        let full = self.0;
        // Enumerate submasks of `full` in increasing numeric order.
        (0..=full).filter(move |m| m & !full == 0).map(ProcSet)
    }

    pub fn nonempty_subsets(self) -> impl Iterator<Item = ProcSet> {
        self.subsets().filter(|s| !s.is_empty())
    }

    pub fn ids(self) -> Vec<u8> {
        self.iter().map(Color::id).collect()
    }
}

impl FromIterator<Color> for ProcSet {
    fn from_iter<I: IntoIterator<Item = Color>>(iter: I) -> Self {
        let mut set = ProcSet::EMPTY;
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl Ord for ProcSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter().cmp(other.iter())
    }
}

impl PartialOrd for ProcSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ProcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ProcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.id())?;
        }
        write!(f, "}}")
    }
}

impl Serialize for ProcSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.ids().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProcSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let ids = Vec::<Color>::deserialize(deserializer)?;
        Ok(ids.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexicographic_order() {
        let mut sets = [
            ProcSet::from_ids([2]),
            ProcSet::from_ids([1, 3]),
            ProcSet::from_ids([1]),
            ProcSet::from_ids([1, 2]),
            ProcSet::EMPTY,
        ];
        sets.sort();
        let shown: Vec<String> = sets.iter().map(ToString::to_string).collect();
        assert_eq!(shown, ["{}", "{1}", "{1,2}", "{1,3}", "{2}"]);
    }

    #[test]
    fn subsets_enumerates_powerset() {
        let s = ProcSet::from_ids([1, 3, 4]);
        let subs: Vec<ProcSet> = s.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|x| x.is_subset(s)));
        assert_eq!(s.nonempty_subsets().count(), 7);
    }

    #[test]
    fn serde_as_id_list() {
        let s = ProcSet::from_ids([3, 1]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3]");
        let back: ProcSet = serde_json::from_str("[3,1]").unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<ProcSet>("[9]").is_err());
    }
}
