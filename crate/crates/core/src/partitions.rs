//! Set partitions of mode indices.
//!
//! Modes are 0-based internally and 1-based in text. A block is stored as a
//! bitmask, which caps the mode count at 32.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_MODES: usize = 32;
pub const MAX_ENUMERATION_MODES: usize = 12;

/// A set partition of `{0, …, n-1}` in canonical form: blocks ordered by
/// their smallest element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    blocks: Vec<u32>,
}

impl Partition {
    /// Build from 0-based index blocks in any order.
    pub fn new(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let text = blocks
            .iter()
            .map(|b| format!("{b:?}"))
            .collect::<Vec<_>>()
            .join("|");
        let err = |reason: String| Error::Partition {
            text: text.clone(),
            reason,
        };
        check_n(n)?;
        let mut masks = Vec::with_capacity(blocks.len());
        let mut seen = 0u32;
        for block in blocks {
            if block.is_empty() {
                return Err(err("empty block".into()));
            }
            let mut mask = 0u32;
            for &i in block {
                if i >= n {
                    return Err(err(format!("index {} out of range 1..={n}", i + 1)));
                }
                if seen & (1 << i) != 0 {
                    return Err(err(format!("duplicate index {}", i + 1)));
                }
                seen |= 1 << i;
                mask |= 1 << i;
            }
            masks.push(mask);
        }
        if let Some(missing) = (0..n).find(|&i| seen & (1 << i) == 0) {
            return Err(err(format!("missing index {}", missing + 1)));
        }
        Ok(Self::from_masks(n, masks))
    }

    fn from_masks(n: usize, mut blocks: Vec<u32>) -> Self {
        blocks.sort_by_key(|m| m.trailing_zeros());
        Partition { n, blocks }
    }

    /// Parse the bar notation, e.g. `2|134` or `1,10|23456789`.
    ///
    /// Labels are 1-based. A group containing commas is split on them;
    /// otherwise each character is a single-digit label, except that for
    /// `n ≥ 10` a group spelling one label in `10..=n` is read as that label.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let err = |reason: String| Error::Partition {
            text: text.to_string(),
            reason,
        };
        check_n(n)?;
        let mut blocks = Vec::new();
        for group in text.trim().split('|') {
            let group = group.trim();
            if group.is_empty() {
                return Err(err("empty group".into()));
            }
            let labels: Vec<&str> = if group.contains(',') {
                group.split(',').map(str::trim).collect()
            } else if n >= 10 && group.len() > 1 && group.parse::<usize>().is_ok_and(|v| (10..=n).contains(&v)) {
                vec![group]
            } else {
                group
                    .char_indices()
                    .filter(|(_, c)| !c.is_whitespace())
                    .map(|(i, c)| &group[i..i + c.len_utf8()])
                    .collect()
            };
            let mut block = Vec::with_capacity(labels.len());
            for label in labels {
                let value: usize = label
                    .parse()
                    .map_err(|_| err(format!("bad label {label:?}")))?;
                if value == 0 || value > n {
                    return Err(err(format!("label {value} out of range 1..={n}")));
                }
                block.push(value - 1);
            }
            blocks.push(block);
        }
        Partition::new(n, &blocks).map_err(|e| match e {
            Error::Partition { reason, .. } => err(reason),
            other => other,
        })
    }

    /// The single-block partition `12…n`.
    pub fn trivial(n: usize) -> Self {
        Partition {
            n,
            blocks: vec![full_mask(n)],
        }
    }

    /// The partition into singletons `1|2|…|n`.
    pub fn full(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(|i| 1u32 << i).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_bipartition(&self) -> bool {
        self.blocks.len() == 2
    }

    pub fn block_masks(&self) -> &[u32] {
        &self.blocks
    }

    /// Blocks as ascending 0-based index lists.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|&m| mask_indices(m)).collect()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|m| m & (1 << i) != 0)
            .expect("index covered by partition")
    }

    pub fn same_block(&self, i: usize, j: usize) -> bool {
        self.blocks
            .iter()
            .any(|m| m & (1 << i) != 0 && m & (1 << j) != 0)
    }

    // Byte key whose lexicographic order equals that of the block lists;
    // 0 terminates a block and sorts before every label.
    fn sort_key(&self) -> (usize, Vec<u8>) {
        let mut key = Vec::with_capacity(self.n + self.blocks.len());
        for &m in &self.blocks {
            key.extend(mask_indices(m).into_iter().map(|i| i as u8 + 1));
            key.push(0);
        }
        (self.blocks.len(), key)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.n >= 10 { "," } else { "" };
        let groups: Vec<String> = self
            .blocks()
            .iter()
            .map(|b| {
                b.iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(sep)
            })
            .collect();
        f.write_str(&groups.join("|"))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        return Err(Error::InvalidArgument(format!(
            "mode count must be in 1..={MAX_MODES}, got {n}"
        )));
    }
    Ok(())
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn mask_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    Partition::parse(text, n)
}

fn sort_canonical(parts: &mut [Partition]) {
    parts.sort_by_cached_key(Partition::sort_key);
}

/// Every set partition of `n` modes, ordered by block count and then
/// lexicographically. The count is the Bell number `B(n)`.
pub fn all_partitions(n: usize) -> Result<Vec<Partition>> {
    if n == 0 || n > MAX_ENUMERATION_MODES {
        return Err(Error::InvalidArgument(format!(
            "partition enumeration supports 1..={MAX_ENUMERATION_MODES} modes, got {n}"
        )));
    }
    let mut out = Vec::new();
    // restricted growth strings: rgs[0] = 0, rgs[i] ≤ 1 + max(rgs[..i])
    let mut rgs = vec![0usize; n];
    let mut prefix_max = vec![0usize; n];
    loop {
        let k = prefix_max[n - 1] + 1;
        let mut blocks = vec![0u32; k];
        for (i, &b) in rgs.iter().enumerate() {
            blocks[b] |= 1 << i;
        }
        out.push(Partition { n, blocks });

        let mut i = n - 1;
        loop {
            if i == 0 {
                sort_canonical(&mut out);
                return Ok(out);
            }
            if rgs[i] <= prefix_max[i - 1] {
                rgs[i] += 1;
                prefix_max[i] = prefix_max[i - 1].max(rgs[i]);
                for j in (i + 1)..n {
                    rgs[j] = 0;
                    prefix_max[j] = prefix_max[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// The `2^{n-1} - 1` partitions into two blocks.
pub fn bipartitions(n: usize) -> Result<Vec<Partition>> {
    if !(2..=MAX_MODES).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "bipartitions need 2..={MAX_MODES} modes, got {n}"
        )));
    }
    let all = full_mask(n);
    let mut out: Vec<Partition> = (0u64..(1u64 << (n - 1)) - 1)
        .map(|m| {
            let first = 1 | ((m as u32) << 1);
            Partition {
                n,
                blocks: vec![first, all & !first],
            }
        })
        .collect();
    sort_canonical(&mut out);
    Ok(out)
}

/// True iff every block of `a` lies inside some block of `b`.
pub fn is_finer(a: &Partition, b: &Partition) -> Result<bool> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.n,
        });
    }
    Ok(a
        .blocks
        .iter()
        .all(|&ma| b.blocks.iter().any(|&mb| ma & !mb == 0)))
}

/// Entries of `X` and `P` that a separable minimizer leaves unconstrained:
/// every pair of modes in different blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeMask {
    n: usize,
    mask: Vec<bool>,
}

impl FreeMask {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_free(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n + j]
    }

    /// Free pairs `(i, j)` with `i < j`, row-major.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| ((i + 1)..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.is_free(i, j))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.pairs().len()
    }
}

pub fn free_mask(p: &Partition) -> FreeMask {
    let n = p.n;
    let mask = (0..n * n)
        .map(|k| !p.same_block(k / n, k % n))
        .collect();
    FreeMask { n, mask }
}

/// `1..k | k+1..n` for `k = 1..⌊n/2⌋`: one bipartition per orbit under mode
/// permutations, enough for witnesses symmetric in all modes.
pub fn symmetric_bipartition_representatives(n: usize) -> Result<Vec<Partition>> {
    if !(2..=MAX_MODES).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "bipartitions need 2..={MAX_MODES} modes, got {n}"
        )));
    }
    Ok((1..=n / 2)
        .map(|k| {
            let first = full_mask(k);
            Partition {
                n,
                blocks: vec![first, full_mask(n) & !first],
            }
        })
        .collect())
}
