//! Kendall's Tau on permutations and the generalized distance K⁽⁰⁾ on
//! top-k lists (penalty zero for pairs that are both missing from one list).
//!
//! [`kendall_k0_oracle`] transcribes the four pair cases literally and is
//! quadratic in the size of the union; [`kendall_k0`] decomposes the same sum
//! into shared-pair inversions, one-shared penalties and the cross term
//! `|A \ B| * |B \ A|`.

use crate::error::{Error, Result};
use crate::ranking::{ItemId, Ranking};

/// Classification of an unordered item pair over the union of two lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairCase {
    /// Both items occur in both lists.
    BothShared,
    /// Both items occur in one list, exactly one of them in the other.
    OneShared,
    /// Each item is exclusive to a different list.
    CrossOnly,
    /// Both items are exclusive to the same list.
    SameListOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairVerdict {
    pub case_tag: PairCase,
    pub penalty: u32,
}

/// Classifies the pair `{i, j}` (which must lie in the union of both lists).
pub fn classify_pair(a: &Ranking, b: &Ranking, i: ItemId, j: ItemId) -> PairVerdict {
    let (ai, aj) = (a.rank_of(i), a.rank_of(j));
    let (bi, bj) = (b.rank_of(i), b.rank_of(j));
    let verdict = |case_tag, discordant: bool| PairVerdict {
        case_tag,
        penalty: u32::from(discordant),
    };
    match (ai, aj, bi, bj) {
        (Some(ai), Some(aj), Some(bi), Some(bj)) => {
            verdict(PairCase::BothShared, (ai < aj) != (bi < bj))
        }
        // Both in `a`, exactly one in `b`: penalize iff the item missing from
        // `b` is ranked ahead of the shared one in `a`.
        (Some(ai), Some(aj), Some(_), None) => verdict(PairCase::OneShared, aj < ai),
        (Some(ai), Some(aj), None, Some(_)) => verdict(PairCase::OneShared, ai < aj),
        (Some(_), None, Some(bi), Some(bj)) => verdict(PairCase::OneShared, bj < bi),
        (None, Some(_), Some(bi), Some(bj)) => verdict(PairCase::OneShared, bi < bj),
        (Some(_), Some(_), None, None) | (None, None, Some(_), Some(_)) => {
            verdict(PairCase::SameListOnly, false)
        }
        (Some(_), None, None, Some(_)) | (None, Some(_), Some(_), None) => {
            verdict(PairCase::CrossOnly, true)
        }
        _ => panic!("pair ({i}, {j}) is not contained in the union of both lists"),
    }
}

/// Kendall's Tau between two rankings over the same item set.
pub fn kendall_complete(a: &Ranking, b: &Ranking) -> Result<u32> {
    let mut sa: Vec<ItemId> = a.items().to_vec();
    let mut sb: Vec<ItemId> = b.items().to_vec();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return Err(Error::DomainMismatch);
    }
    let ranks_in_b: Vec<usize> = a
        .items()
        .iter()
        .map(|&i| b.rank_of(i).expect("same item set"))
        .collect();
    Ok(count_inversions(&ranks_in_b))
}

/// K⁽⁰⁾ by direct enumeration of every unordered pair over the union.
pub fn kendall_k0_oracle(a: &Ranking, b: &Ranking) -> u32 {
    let mut union: Vec<ItemId> = a.items().iter().chain(b.items()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let mut total = 0;
    for (x, &i) in union.iter().enumerate() {
        for &j in &union[x + 1..] {
            total += classify_pair(a, b, i, j).penalty;
        }
    }
    total
}

/// K⁽⁰⁾ decomposed as shared-pair inversions + one-shared penalties +
/// `|A \ B| * |B \ A|`. Lists of up to 64 items use position bitmasks and
/// never allocate.
pub fn kendall_k0(a: &Ranking, b: &Ranking) -> u32 {
    if a.len() <= 64 && b.len() <= 64 {
        kendall_k0_masked(a.items(), b.items())
    } else {
        kendall_k0_sorted(a.items(), b.items())
    }
}

fn kendall_k0_masked(a: &[ItemId], b: &[ItemId]) -> u32 {
    // Bit q of `seen_b` marks b-positions of shared items already visited in a-order.
    let mut seen_b: u64 = 0;
    let mut shared = 0u32;
    let mut both_shared = 0u32;
    let mut one_shared_a = 0u32;
    for (p, item) in a.iter().enumerate() {
        if let Some(q) = b.iter().position(|x| x == item) {
            // unshared items ahead of this one in a
            one_shared_a += p as u32 - shared;
            // shared items ahead in a but behind in b
            both_shared += (seen_b >> q).count_ones();
            seen_b |= 1 << q;
            shared += 1;
        }
    }
    let mut one_shared_b = 0u32;
    let mut mask = seen_b;
    let mut before = 0u32;
    while mask != 0 {
        let q = mask.trailing_zeros();
        one_shared_b += q - before;
        before += 1;
        mask &= mask - 1;
    }
    let cross = (a.len() as u32 - shared) * (b.len() as u32 - shared);
    both_shared + one_shared_a + one_shared_b + cross
}

fn kendall_k0_sorted(a: &[ItemId], b: &[ItemId]) -> u32 {
    // (item, 0-based position) sorted by item, so shared items are found by merging.
    let mut pa: Vec<(ItemId, u32)> = a.iter().enumerate().map(|(p, &i)| (i, p as u32)).collect();
    let mut pb: Vec<(ItemId, u32)> = b.iter().enumerate().map(|(p, &i)| (i, p as u32)).collect();
    pa.sort_unstable();
    pb.sort_unstable();

    let mut shared: Vec<(u32, u32)> = Vec::with_capacity(pa.len().min(pb.len()));
    let (mut x, mut y) = (0, 0);
    while x < pa.len() && y < pb.len() {
        match pa[x].0.cmp(&pb[y].0) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                shared.push((pa[x].1, pb[y].1));
                x += 1;
                y += 1;
            }
        }
    }
    let s = shared.len() as u32;

    // A shared item at position p has p items ahead of it; the shared ones
    // among them are counted by its index among shared items in position order.
    shared.sort_unstable_by_key(|&(p, _)| p);
    let one_shared_a: u32 = shared
        .iter()
        .enumerate()
        .map(|(idx, &(p, _))| p - idx as u32)
        .sum();
    let mut in_b: Vec<u32> = shared.iter().map(|&(_, q)| q).collect();
    let both_shared = count_inversions(&in_b);
    in_b.sort_unstable();
    let one_shared_b: u32 = in_b
        .iter()
        .enumerate()
        .map(|(idx, &q)| q - idx as u32)
        .sum();

    let cross = (a.len() as u32 - s) * (b.len() as u32 - s);
    both_shared + one_shared_a + one_shared_b + cross
}

fn count_inversions<T: Ord>(seq: &[T]) -> u32 {
    let mut n = 0;
    for (x, v) in seq.iter().enumerate() {
        n += seq[x + 1..].iter().filter(|w| *w < v).count() as u32;
    }
    n
}

/// Smallest possible K⁽⁰⁾ between two top-k lists sharing `n` items: `(k - n)^2`.
pub fn min_distance(k: usize, n: usize) -> u32 {
    assert!(n <= k, "overlap {n} exceeds k = {k}");
    ((k - n) * (k - n)) as u32
}

/// Smallest overlap `m` with `min_distance(k, m) <= theta_d`, i.e.
/// `ceil(k - sqrt(theta_d))`. Rankings sharing fewer items cannot qualify.
pub fn min_overlap(k: usize, theta_d: f64) -> usize {
    (0..=k)
        .find(|&m| f64::from(min_distance(k, m)) <= theta_d)
        .unwrap_or(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(id: u32, items: &[u32]) -> Ranking {
        Ranking::from_ids(id, items).unwrap()
    }

    #[test]
    fn complete_kendall_examples() {
        assert_eq!(
            kendall_complete(&r(0, &[1, 2, 3]), &r(1, &[1, 2, 3])),
            Ok(0)
        );
        assert_eq!(
            kendall_complete(&r(0, &[1, 2, 3]), &r(1, &[3, 2, 1])),
            Ok(3)
        );
        assert_eq!(
            kendall_complete(&r(0, &[2, 5, 4, 3]), &r(1, &[5, 2, 4, 3])),
            Ok(1)
        );
        assert_eq!(
            kendall_complete(&r(0, &[1, 2, 3]), &r(1, &[1, 2, 4])),
            Err(Error::DomainMismatch)
        );
    }

    #[test]
    fn adjacent_swap_by_pair_enumeration() {
        // Count discordant pairs without going through either implementation.
        let a = [2u32, 5, 4, 3];
        let b = [5u32, 2, 4, 3];
        let pos = |l: &[u32], x: u32| l.iter().position(|&y| y == x).unwrap();
        let mut discordant = 0;
        for x in 0..4 {
            for y in x + 1..4 {
                let (i, j) = (a[x], a[y]);
                if (pos(&a, i) < pos(&a, j)) != (pos(&b, i) < pos(&b, j)) {
                    discordant += 1;
                }
            }
        }
        assert_eq!(discordant, 1);
    }

    #[test]
    fn pair_cases_on_worked_example() {
        let t2 = r(2, &[1, 4, 7, 5]);
        let t3 = r(3, &[0, 8, 7, 5]);
        let tag = |i, j| classify_pair(&t2, &t3, ItemId(i), ItemId(j));
        assert_eq!(tag(7, 5).case_tag, PairCase::BothShared);
        assert_eq!(tag(7, 5).penalty, 0);
        assert_eq!(tag(1, 7).case_tag, PairCase::OneShared);
        assert_eq!(tag(1, 7).penalty, 1);
        assert_eq!(tag(1, 0).case_tag, PairCase::CrossOnly);
        assert_eq!(tag(1, 0).penalty, 1);
        assert_eq!(tag(1, 4).case_tag, PairCase::SameListOnly);
        assert_eq!(tag(1, 4).penalty, 0);
    }

    #[test]
    fn k0_worked_examples() {
        let t2 = r(2, &[1, 4, 7, 5]);
        let t3 = r(3, &[0, 8, 7, 5]);
        let q = r(0, &[8, 1, 0, 6]);
        for f in [kendall_k0_oracle, kendall_k0] {
            assert_eq!(f(&t2, &t3), 12);
            assert_eq!(f(&q, &t3), 6);
            assert_eq!(f(&q, &t2), 10);
            assert_eq!(f(&r(0, &[1, 2, 3, 4]), &r(1, &[5, 6, 7, 8])), 16);
            assert_eq!(f(&t2, &t2), 0);
        }
    }

    #[test]
    fn long_lists_use_sorted_path() {
        let a: Vec<u32> = (0..100).collect();
        let mut b: Vec<u32> = (50..150).collect();
        b.reverse();
        let (ra, rb) = (r(0, &a), r(1, &b));
        assert_eq!(kendall_k0(&ra, &rb), kendall_k0_oracle(&ra, &rb));
        assert_eq!(kendall_k0(&rb, &ra), kendall_k0_oracle(&ra, &rb));
        assert_eq!(
            kendall_k0_masked(&ra.items()[..60], &rb.items()[..60]),
            kendall_k0_sorted(&ra.items()[..60], &rb.items()[..60])
        );
    }

    #[test]
    fn bounds() {
        assert_eq!(min_distance(10, 10), 0);
        assert_eq!(min_distance(10, 0), 100);
        assert_eq!(min_distance(4, 2), 4);
        assert_eq!(min_overlap(10, 9.0), 7);
        assert_eq!(min_overlap(10, 0.0), 10);
        assert_eq!(min_overlap(10, 10.0), 7);
        assert_eq!(min_overlap(4, 4.0), 2);
        assert_eq!(min_overlap(4, 15.99), 1);
    }

    #[test]
    fn min_overlap_matches_ceil_formula() {
        for k in 1..=30usize {
            for step in 0..(k * k * 4) {
                let theta_d = step as f64 / 4.0;
                let expected = (k as f64 - theta_d.sqrt()).ceil().max(0.0) as usize;
                assert_eq!(min_overlap(k, theta_d), expected, "k={k} theta_d={theta_d}");
            }
        }
    }

    fn top_k_pair(k: usize, domain: u32) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
        let items: Vec<u32> = (0..domain).collect();
        (
            proptest::sample::subsequence(items.clone(), k).prop_shuffle(),
            proptest::sample::subsequence(items, k).prop_shuffle(),
        )
    }

    proptest! {
        #[test]
        fn kernel_matches_oracle_and_is_symmetric((a, b) in (1usize..=8).prop_flat_map(|k| top_k_pair(k, 12))) {
            let (ra, rb) = (r(0, &a), r(1, &b));
            let d = kendall_k0(&ra, &rb);
            prop_assert_eq!(d, kendall_k0_oracle(&ra, &rb));
            prop_assert_eq!(d, kendall_k0(&rb, &ra));
            let k = a.len();
            prop_assert!(d as usize <= k * k);
            let n = crate::ranking::overlap(&ra, &rb);
            prop_assert_eq!(d as usize == k * k, n == 0);
            prop_assert!(d >= min_distance(k, n));
        }

        #[test]
        fn reduces_to_complete_kendall(a in proptest::sample::subsequence((0u32..10).collect::<Vec<_>>(), 6).prop_shuffle(), seed in any::<u64>()) {
            let mut b = a.clone();
            // deterministic shuffle from seed
            let mut s = seed;
            for x in (1..b.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                b.swap(x, (s >> 33) as usize % (x + 1));
            }
            let (ra, rb) = (r(0, &a), r(1, &b));
            prop_assert_eq!(Ok(kendall_k0(&ra, &rb)), kendall_complete(&ra, &rb));
        }
    }
}
