use std::fmt;
use std::ops::Deref;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result, MAX_DOMAIN, MAX_UNIVERSE};

/// A tuple of domain elements. Coordinates are 0-based in the API.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Tuple(pub Vec<u8>);

impl Tuple {
    pub fn new(entries: Vec<u8>) -> Self {
        Tuple(entries)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Copy of `self` with coordinate `i` replaced by `value`.
    pub fn with(&self, i: usize, value: u8) -> Tuple {
        let mut out = self.0.clone();
        out[i] = value;
        Tuple(out)
    }
}

impl Deref for Tuple {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl From<Vec<u8>> for Tuple {
    fn from(v: Vec<u8>) -> Self {
        Tuple(v)
    }
}

impl From<&[u8]> for Tuple {
    fn from(v: &[u8]) -> Self {
        Tuple(v.to_vec())
    }
}

impl<const N: usize> From<[u8; N]> for Tuple {
    fn from(v: [u8; N]) -> Self {
        Tuple(v.to_vec())
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Checks the desk-scale guards for a domain of size `k` and arity `n`.
pub fn check_guards(k: usize, n: usize) -> Result<()> {
    if !(2..=MAX_DOMAIN).contains(&k) {
        return Err(Error::Guard(format!(
            "domain size {k} outside 2..={MAX_DOMAIN}"
        )));
    }
    if n == 0 {
        return Err(Error::input("arity must be at least 1"));
    }
    universe_size(k, n)
        .filter(|&u| u <= MAX_UNIVERSE)
        .map(|_| ())
        .ok_or_else(|| Error::Guard(format!("{k}^{n} exceeds {MAX_UNIVERSE} tuples")))
}

fn universe_size(k: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(k))
}

/// An `n`-ary relation over `{0..k-1}`, stored as a dense bitset over the
/// `k^n` mixed-radix tuple indices (coordinate 0 most significant).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    k: usize,
    arity: usize,
    bits: FixedBitSet,
}

impl Relation {
    pub fn empty(k: usize, arity: usize) -> Result<Self> {
        check_guards(k, arity)?;
        let size = universe_size(k, arity).unwrap_or(0);
        Ok(Relation {
            k,
            arity,
            bits: FixedBitSet::with_capacity(size),
        })
    }

    pub fn full(k: usize, arity: usize) -> Result<Self> {
        let mut rel = Self::empty(k, arity)?;
        rel.bits.insert_range(..);
        Ok(rel)
    }

    pub fn from_tuples<I, T>(k: usize, arity: usize, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        let mut rel = Self::empty(k, arity)?;
        for t in tuples {
            let t = t.as_ref();
            rel.check_tuple(t)?;
            let idx = rel.index_of(t);
            rel.bits.insert(idx);
        }
        Ok(rel)
    }

    pub fn from_predicate(k: usize, arity: usize, pred: impl Fn(&[u8]) -> bool) -> Result<Self> {
        let mut rel = Self::empty(k, arity)?;
        let mut buf = vec![0u8; arity];
        for idx in 0..rel.universe_size() {
            rel.decode_into(idx, &mut buf);
            if pred(&buf) {
                rel.bits.insert(idx);
            }
        }
        Ok(rel)
    }

    pub(crate) fn from_indices(k: usize, arity: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut rel = Self::empty(k, arity)?;
        for idx in indices {
            rel.bits.insert(idx);
        }
        Ok(rel)
    }

    pub fn domain_size(&self) -> usize {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn universe_size(&self) -> usize {
        self.bits.len()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe_size()
    }

    pub fn check_tuple(&self, t: &[u8]) -> Result<()> {
        if t.len() != self.arity {
            return Err(Error::input(format!(
                "tuple of arity {} given for relation of arity {}",
                t.len(),
                self.arity
            )));
        }
        if let Some(&bad) = t.iter().find(|&&x| x as usize >= self.k) {
            return Err(Error::input(format!(
                "entry {bad} outside domain of size {}",
                self.k
            )));
        }
        Ok(())
    }

    pub fn index_of(&self, t: &[u8]) -> usize {
        t.iter().fold(0, |acc, &x| acc * self.k + x as usize)
    }

    pub fn decode_into(&self, mut idx: usize, buf: &mut [u8]) {
        for slot in buf.iter_mut().rev() {
            *slot = (idx % self.k) as u8;
            idx /= self.k;
        }
    }

    pub fn tuple_at(&self, idx: usize) -> Tuple {
        let mut buf = vec![0u8; self.arity];
        self.decode_into(idx, &mut buf);
        Tuple(buf)
    }

    pub fn contains(&self, t: &[u8]) -> bool {
        self.bits.contains(self.index_of(t))
    }

    pub fn contains_index(&self, idx: usize) -> bool {
        self.bits.contains(idx)
    }

    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn non_member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.bits.len()).filter(|&i| !self.bits.contains(i))
    }

    /// Members in canonical (index) order.
    pub fn members(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.bits.ones().map(|i| self.tuple_at(i))
    }

    pub fn non_members(&self) -> impl Iterator<Item = Tuple> + '_ {
        self.non_member_indices().map(|i| self.tuple_at(i))
    }

    /// Members as a flat `len * arity` buffer, for hot loops.
    pub(crate) fn member_matrix(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len() * self.arity];
        for (row, idx) in self.bits.ones().enumerate() {
            self.decode_into(idx, &mut out[row * self.arity..(row + 1) * self.arity]);
        }
        out
    }

    pub(crate) fn insert_index(&mut self, idx: usize) {
        self.bits.insert(idx);
    }

    pub fn union(&self, other: &Relation) -> Result<Relation> {
        self.same_shape(other)?;
        let mut out = self.clone();
        out.bits.union_with(&other.bits);
        Ok(out)
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.k == other.k && self.arity == other.arity && self.bits.is_subset(&other.bits)
    }

    fn same_shape(&self, other: &Relation) -> Result<()> {
        if self.k != other.k || self.arity != other.arity {
            return Err(Error::input("relations differ in domain or arity"));
        }
        Ok(())
    }

    fn check_coordinate(&self, i: usize) -> Result<()> {
        if i >= self.arity {
            return Err(Error::input(format!(
                "coordinate {} out of range 1..={}",
                i + 1,
                self.arity
            )));
        }
        Ok(())
    }

    /// The set of values occurring at coordinate `i` (0-based), ascending.
    pub fn projection(&self, i: usize) -> Result<Vec<u8>> {
        self.check_coordinate(i)?;
        let mut seen = vec![false; self.k];
        let mut buf = vec![0u8; self.arity];
        for idx in self.bits.ones() {
            self.decode_into(idx, &mut buf);
            seen[buf[i] as usize] = true;
        }
        Ok((0..self.k as u8).filter(|&c| seen[c as usize]).collect())
    }

    /// All projections, one per coordinate.
    pub fn projections(&self) -> Vec<Vec<u8>> {
        let mut seen = vec![vec![false; self.k]; self.arity];
        let mut buf = vec![0u8; self.arity];
        for idx in self.bits.ones() {
            self.decode_into(idx, &mut buf);
            for (i, &x) in buf.iter().enumerate() {
                seen[i][x as usize] = true;
            }
        }
        seen.into_iter()
            .map(|s| (0..self.k as u8).filter(|&c| s[c as usize]).collect())
            .collect()
    }

    /// Pins coordinate `i` to `c` and drops it: `σ(x..) = ρ(.., c, ..)`.
    pub fn restrict(&self, i: usize, c: u8) -> Result<Relation> {
        self.check_coordinate(i)?;
        if c as usize >= self.k {
            return Err(Error::input(format!("element {c} outside domain")));
        }
        if self.arity < 2 {
            return Err(Error::input("cannot restrict a unary relation"));
        }
        let mut out = Relation::empty(self.k, self.arity - 1)?;
        let mut buf = vec![0u8; self.arity];
        for idx in self.bits.ones() {
            self.decode_into(idx, &mut buf);
            if buf[i] == c {
                let mut rest = buf.clone();
                rest.remove(i);
                let j = out.index_of(&rest);
                out.bits.insert(j);
            }
        }
        Ok(out)
    }

    /// Pins every coordinate in `pins` (coordinate, value) and keeps the
    /// remaining coordinates in their original order.
    pub fn restrict_many(&self, pins: &[(usize, u8)]) -> Result<Relation> {
        for &(i, c) in pins {
            self.check_coordinate(i)?;
            if c as usize >= self.k {
                return Err(Error::input(format!("element {c} outside domain")));
            }
        }
        let keep: Vec<usize> = (0..self.arity)
            .filter(|i| !pins.iter().any(|&(j, _)| j == *i))
            .collect();
        if keep.is_empty() {
            return Err(Error::input("restriction would leave no coordinates"));
        }
        let mut out = Relation::empty(self.k, keep.len())?;
        let mut buf = vec![0u8; self.arity];
        let mut rest = vec![0u8; keep.len()];
        for idx in self.bits.ones() {
            self.decode_into(idx, &mut buf);
            if pins.iter().all(|&(j, c)| buf[j] == c) {
                for (slot, &j) in rest.iter_mut().zip(&keep) {
                    *slot = buf[j];
                }
                let j = out.index_of(&rest);
                out.bits.insert(j);
            }
        }
        Ok(out)
    }

    /// `self × A^s`.
    pub fn cylindrify(&self, s: usize) -> Result<Relation> {
        if s == 0 {
            return Err(Error::input("cylindrify needs s >= 1"));
        }
        let mut out = Relation::empty(self.k, self.arity + s)?;
        let block = out.universe_size() / self.universe_size();
        for idx in self.bits.ones() {
            out.bits.insert_range(idx * block..(idx + 1) * block);
        }
        Ok(out)
    }

    /// Reorders coordinates: coordinate `j` of the result is coordinate
    /// `perm[j]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Relation> {
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.arity).collect::<Vec<_>>() {
            return Err(Error::input("not a permutation of the coordinates"));
        }
        let mut out = Relation::empty(self.k, self.arity)?;
        let mut buf = vec![0u8; self.arity];
        let mut moved = vec![0u8; self.arity];
        for idx in self.bits.ones() {
            self.decode_into(idx, &mut buf);
            for (slot, &p) in moved.iter_mut().zip(perm) {
                *slot = buf[p];
            }
            let j = out.index_of(&moved);
            out.bits.insert(j);
        }
        Ok(out)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Relation")
            .field("k", &self.k)
            .field("arity", &self.arity)
            .field("members", &self.members().collect::<Vec<_>>())
            .finish()
    }
}

/// Serialized as `{domain, arity, members}` with members in canonical order.
impl Serialize for Relation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Relation", 3)?;
        st.serialize_field("domain", &self.domain_size())?;
        st.serialize_field("arity", &self.arity())?;
        st.serialize_field("members", &self.members().collect::<Vec<_>>())?;
        st.end()
    }
}

/// A product of per-coordinate value sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoxSet {
    pub sets: Vec<Vec<u8>>,
}

impl BoxSet {
    pub fn new(mut sets: Vec<Vec<u8>>) -> Self {
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
        }
        BoxSet { sets }
    }

    pub fn arity(&self) -> usize {
        self.sets.len()
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(Vec::len).product()
    }

    pub fn contains(&self, t: &[u8]) -> bool {
        t.iter().zip(&self.sets).all(|(x, s)| s.binary_search(x).is_ok())
    }

    /// Every tuple of the box in lexicographic order.
    pub fn tuples(&self) -> BoxIter<'_> {
        BoxIter {
            sets: &self.sets,
            pos: vec![0; self.sets.len()],
            done: self.sets.iter().any(Vec::is_empty),
        }
    }
}

pub struct BoxIter<'a> {
    sets: &'a [Vec<u8>],
    pos: Vec<usize>,
    done: bool,
}

impl Iterator for BoxIter<'_> {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if self.done {
            return None;
        }
        let out = Tuple(self.pos.iter().zip(self.sets).map(|(&p, s)| s[p]).collect());
        let mut i = self.pos.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.pos[i] += 1;
            if self.pos[i] < self.sets[i].len() {
                break;
            }
            self.pos[i] = 0;
        }
        Some(out)
    }
}
