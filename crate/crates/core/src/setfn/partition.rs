use crate::error::{Error, Result};

/// Set partition of `{0, .., ℓ-1}`; blocks are bitmasks ordered by their
/// smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    blocks: Vec<u32>,
}

impl Partition {
    pub fn new(size: usize, mut blocks: Vec<u32>) -> Result<Self> {
        let full = super::full_mask(size);
        let mut seen = 0u32;
        for &b in &blocks {
            if b == 0 || b & seen != 0 || b & !full != 0 {
                return Err(Error::InvalidArgument(format!(
                    "block {b:#b} is empty, overlapping, or out of range"
                )));
            }
            seen |= b;
        }
        if seen != full {
            return Err(Error::InvalidArgument("blocks do not cover the set".into()));
        }
        blocks.sort_by_key(|b| b.trailing_zeros());
        Ok(Partition { blocks })
    }

    pub fn blocks(&self) -> &[u32] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// All set partitions of an `ℓ`-element set (`Bell(ℓ)` of them), `1 ≤ ℓ ≤ 6`.
pub fn enumerate_partitions(size: usize) -> Result<Vec<Partition>> {
    if !(1..=6).contains(&size) {
        return Err(Error::PartitionRange(size));
    }
    // Restricted growth strings: a[0] = 0, a[i] ≤ 1 + max(a[..i]).
    let mut out = Vec::new();
    let mut rgs = vec![0usize; size];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if i == rgs.len() {
            let mut blocks = vec![0u32; max + 1];
            for (elem, &b) in rgs.iter().enumerate() {
                blocks[b] |= 1 << elem;
            }
            out.push(Partition { blocks });
            return;
        }
        for b in 0..=max + 1 {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, out);
        }
    }
    rec(1, 0, &mut rgs, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bell numbers from the triangle recurrence.
    fn bell(n: usize) -> usize {
        let mut row = vec![1usize];
        for _ in 1..n {
            let mut next = vec![*row.last().unwrap()];
            for x in &row {
                let v = next.last().unwrap() + x;
                next.push(v);
            }
            row = next;
        }
        *row.last().unwrap()
    }

    #[test]
    fn counts_match_bell() {
        assert_eq!(enumerate_partitions(1).unwrap().len(), 1);
        assert_eq!(enumerate_partitions(3).unwrap().len(), 5);
        assert_eq!(bell(5), 52);
        for l in 1..=6 {
            assert_eq!(enumerate_partitions(l).unwrap().len(), bell(l), "l={l}");
        }
    }

    #[test]
    fn partitions_are_valid_and_distinct() {
        let ps = enumerate_partitions(4).unwrap();
        let mut seen = std::collections::HashSet::new();
        for p in &ps {
            assert!(Partition::new(4, p.blocks().to_vec()).is_ok());
            assert!(seen.insert(p.clone()));
        }
    }

    #[test]
    fn range_rejected() {
        assert_eq!(enumerate_partitions(0), Err(Error::PartitionRange(0)));
        assert_eq!(enumerate_partitions(7), Err(Error::PartitionRange(7)));
    }

    #[test]
    fn bad_blocks_rejected() {
        assert!(Partition::new(3, vec![0b011, 0b110]).is_err());
        assert!(Partition::new(3, vec![0b011]).is_err());
        assert!(Partition::new(3, vec![0b011, 0, 0b100]).is_err());
    }
}
