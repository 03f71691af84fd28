use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Largest dimension for which all faces are enumerated.
pub const MAX_DIMENSION: usize = 20;

/// A set of coordinates `I ⊂ {0, …, n−1}` stored as a bit mask.
///
/// Displayed and parsed with one-based, comma-joined indices (`"1,2"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FaceSet(u32);

impl FaceSet {
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in indices {
            if i >= MAX_DIMENSION {
                return Err(Error::Capacity { n: i + 1, max: MAX_DIMENSION });
            }
            mask |= 1 << i;
        }
        Ok(Self(mask))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        i < 32 && self.0 & (1 << i) != 0
    }

    pub fn is_subset_of(self, other: FaceSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Zero-based members in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.0 & (1 << i) != 0)
    }

    /// Whether this is a proper face of an `n`-dimensional orthant boundary,
    /// i.e. `2 ≤ |I| ≤ n − 1` and every index is below `n`.
    pub fn is_face_of(self, n: usize) -> bool {
        let k = self.len();
        k >= 2 && k < n && self.indices().all(|i| i < n)
    }

    pub fn label(self) -> String {
        alloc::format!("{self}")
    }
}

impl fmt::Display for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in self.indices() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
            first = false;
        }
        Ok(())
    }
}

impl FromStr for FaceSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut idx = Vec::new();
        for part in s.split(',') {
            let one: usize = part
                .trim()
                .parse()
                .map_err(|_| Error::InvalidSpec(alloc::format!("bad face key {s:?}")))?;
            if one == 0 {
                return Err(Error::InvalidSpec(alloc::format!("face indices are 1-based: {s:?}")));
            }
            idx.push(one - 1);
        }
        let face = Self::from_indices(&idx)?;
        if face.len() != idx.len() {
            return Err(Error::InvalidSpec(alloc::format!("repeated index in face key {s:?}")));
        }
        Ok(face)
    }
}

/// All faces `I` with `2 ≤ |I| ≤ n − 1`, ordered by size and then
/// lexicographically by their sorted members. There are `2^n − n − 2`.
pub fn enumerate_faces(n: usize) -> Result<Vec<FaceSet>> {
    if n < 2 {
        return Err(Error::Shape { expected: 2, found: n });
    }
    if n > MAX_DIMENSION {
        return Err(Error::Capacity { n, max: MAX_DIMENSION });
    }
    let mut out = Vec::with_capacity((1usize << n) - n - 2);
    for k in 2..n {
        let mut comb: Vec<usize> = (0..k).collect();
        loop {
            out.push(FaceSet(comb.iter().fold(0u32, |m, &i| m | (1 << i))));
            // next combination in lexicographic order
            let mut pos = k;
            while pos > 0 && comb[pos - 1] == n - k + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            comb[pos - 1] += 1;
            for j in pos..k {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    Ok(out)
}
