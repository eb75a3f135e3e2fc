//! Packed subsets of a small finite carrier.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Subset of `{0, .., width-1}`, packed into a `u64`.
///
/// All set operations are pointwise bit operations. Two sets may only be
/// combined when their widths agree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElemSet {
    bits: u64,
    width: u8,
}

impl ElemSet {
    pub const MAX_WIDTH: usize = 64;

    pub fn empty(width: usize) -> Self {
        assert!(width <= Self::MAX_WIDTH, "carrier too wide: {width}");
        ElemSet {
            bits: 0,
            width: width as u8,
        }
    }

    pub fn full(width: usize) -> Self {
        Self::empty(width).complement()
    }

    pub fn singleton(width: usize, elem: usize) -> Self {
        Self::empty(width).with(elem)
    }

    pub fn from_bits(width: usize, bits: u64) -> Self {
        let s = Self::empty(width);
        assert_eq!(bits & !s.mask(), 0, "bits out of range for width {width}");
        ElemSet {
            bits,
            width: width as u8,
        }
    }

    pub fn from_elems<I: IntoIterator<Item = usize>>(width: usize, elems: I) -> Self {
        let mut s = Self::empty(width);
        for e in elems {
            s.insert(e);
        }
        s
    }

    fn mask(&self) -> u64 {
        if self.width == 64 {
            u64::MAX
        } else {
            (1u64 << self.width) - 1
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, elem: usize) -> bool {
        elem < self.width() && self.bits >> elem & 1 == 1
    }

    pub fn insert(&mut self, elem: usize) {
        assert!(elem < self.width(), "element {elem} out of range");
        self.bits |= 1 << elem;
    }

    pub fn remove(&mut self, elem: usize) {
        assert!(elem < self.width(), "element {elem} out of range");
        self.bits &= !(1 << elem);
    }

    pub fn with(mut self, elem: usize) -> Self {
        self.insert(elem);
        self
    }

    pub fn without(mut self, elem: usize) -> Self {
        self.remove(elem);
        self
    }

    fn check_width(&self, other: &Self) {
        assert_eq!(self.width, other.width, "width mismatch");
    }

    pub fn union(self, other: Self) -> Self {
        self.check_width(&other);
        ElemSet {
            bits: self.bits | other.bits,
            width: self.width,
        }
    }

    pub fn intersect(self, other: Self) -> Self {
        self.check_width(&other);
        ElemSet {
            bits: self.bits & other.bits,
            width: self.width,
        }
    }

    pub fn minus(self, other: Self) -> Self {
        self.check_width(&other);
        ElemSet {
            bits: self.bits & !other.bits,
            width: self.width,
        }
    }

    pub fn complement(self) -> Self {
        ElemSet {
            bits: !self.bits & self.mask(),
            width: self.width,
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.check_width(other);
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.check_width(other);
        self.bits & other.bits == 0
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let e = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(e)
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All supersets of `self` within the carrier, in ascending bit order.
    pub fn supersets(self) -> impl Iterator<Item = ElemSet> {
        let free = self.complement().bits;
        let base = self.bits;
        let width = self.width;
        let mut sub: u64 = 0;
        let mut done = false;
        std::iter::from_fn(move || {
            if done {
                return None;
            }
            let cur = ElemSet {
                bits: base | sub,
                width,
            };
            sub = sub.wrapping_sub(free) & free;
            if sub == 0 {
                done = true;
            }
            Some(cur)
        })
    }

    /// All subsets of the full carrier of the given width, ascending.
    pub fn all_subsets(width: usize) -> impl Iterator<Item = ElemSet> {
        assert!(width < 32, "subset enumeration over {width} bits refused");
        (0u64..1 << width).map(move |bits| ElemSet {
            bits,
            width: width as u8,
        })
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Serialize, Deserialize)]
struct ElemSetRepr {
    width: usize,
    elems: Vec<usize>,
}

impl Serialize for ElemSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ElemSetRepr {
            width: self.width(),
            elems: self.to_vec(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ElemSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ElemSetRepr::deserialize(deserializer)?;
        if repr.width > Self::MAX_WIDTH {
            return Err(D::Error::custom("width out of range"));
        }
        let mut s = ElemSet::empty(repr.width);
        for e in repr.elems {
            if e >= repr.width {
                return Err(D::Error::custom("element out of range"));
            }
            s.insert(e);
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn basics() {
        let s = ElemSet::from_elems(5, [0, 2]);
        assert!(s.contains(0) && s.contains(2) && !s.contains(1));
        assert_eq!(s.len(), 2);
        assert_eq!(s.complement().to_vec(), vec![1, 3, 4]);
        assert_eq!(s.to_string(), "{0,2}");
    }

    #[test]
    fn supersets_of_base() {
        let base = ElemSet::singleton(3, 1);
        let sup: Vec<u64> = base.supersets().map(|s| s.bits()).collect();
        assert_eq!(sup, vec![0b010, 0b011, 0b110, 0b111]);
    }

    fn arb_set() -> impl Strategy<Value = ElemSet> {
        (0u64..256).prop_map(|bits| ElemSet::from_bits(8, bits))
    }

    proptest! {
        #[test]
        fn de_morgan(a in arb_set(), b in arb_set()) {
            prop_assert_eq!(a.union(b).complement(), a.complement().intersect(b.complement()));
            prop_assert_eq!(a.intersect(b).complement(), a.complement().union(b.complement()));
        }

        #[test]
        fn subset_antisymmetric(a in arb_set(), b in arb_set()) {
            if a.is_subset_of(&b) && b.is_subset_of(&a) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn serde_round_trip(a in arb_set()) {
            let json = serde_json::to_string(&a).unwrap();
            let back: ElemSet = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(a, back);
        }
    }
}
