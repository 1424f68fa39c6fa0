use super::{IntervalError, Partition};
use crate::conv::{conv_step, return_time, IndexInterval};
use crate::perm::CyclicPermutation;

/// A pair `r <= s` inside one block with `(conv f)^l({r, s}) ⊇ {r, s}`.
///
/// `chain[0]` is `{r..s}` and `chain[m]` is `(conv f)^m({r, s})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub r: usize,
    pub s: usize,
    pub l: usize,
    pub block: usize,
    pub chain: Vec<IndexInterval>,
}

impl Witness {
    /// Recomputes the chain under `f` and checks the final containment.
    pub fn replay(&self, f: &CyclicPermutation) -> bool {
        let start = IndexInterval::new(self.r, self.s);
        let mut cur = start;
        let mut chain = vec![cur];
        for _ in 0..self.l {
            cur = conv_step(f, &cur);
            chain.push(cur);
        }
        chain == self.chain && cur.contains_interval(&start)
    }
}

/// Picks the non-cut position `t` with the smallest characteristic number
/// `m_t <= k` (smallest `t` on ties) and returns `r = t, s = t + 1, l = m_t`.
///
/// When no such pair exists (every block is a single point, or the cycle
/// has degree 1) the singleton `r = s = 1` with `l = n` is used, which
/// needs `n <= k`.
pub fn find_witness(f: &CyclicPermutation, part: &Partition) -> Result<Witness, IntervalError> {
    let n = f.degree();
    if part.n() != n {
        return Err(IntervalError::BadPartition(format!(
            "partition of {} points for a cycle of degree {n}",
            part.n()
        )));
    }
    let k = part.k();
    let pair = (1..n)
        .filter(|&t| !part.is_cut(t))
        .filter_map(|t| return_time(f, IndexInterval::new(t, t + 1), k).map(|m| (m, t)))
        .min()
        .map(|(m, t)| (t, t + 1, m));
    let (r, s, l) = match pair {
        Some(p) => p,
        None if n <= k => (1, 1, n),
        None => {
            return Err(IntervalError::NoWitness(format!("cycle ({f}) with cuts {:?}", part.cuts())));
        }
    };
    let mut chain = vec![IndexInterval::new(r, s)];
    for _ in 0..l {
        let next = conv_step(f, chain.last().unwrap());
        chain.push(next);
    }
    Ok(Witness {
        r,
        s,
        l,
        block: part.block_of(r),
        chain,
    })
}
