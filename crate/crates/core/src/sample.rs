//! Random test instances: pmfs, joints and majorization pairs.

use crate::channels::JointPmf;
use crate::pmf::Pmf;
use crate::rng::Sampler;

/// A pmf on `n` atoms, uniform on the simplex when `zero_prob` is 0;
/// otherwise each atom is zeroed with that probability (one always stays).
pub fn random_pmf(s: &mut Sampler, n: usize, zero_prob: f64) -> Pmf {
    Pmf::normalized(s.sparse_dirichlet(n, zero_prob)).expect("positive mass")
}

/// A joint pmf on a `rows × cols` grid drawn like [`random_pmf`].
pub fn random_joint(s: &mut Sampler, rows: usize, cols: usize, zero_prob: f64) -> JointPmf {
    JointPmf::from_flat(rows, cols, s.sparse_dirichlet(rows * cols, zero_prob), true)
        .expect("positive mass")
}

/// A joint with random size in `1..=max_rows × 1..=max_cols`; every third
/// draw is sparse so that zero cells and ties are exercised.
pub fn random_joint_upto(s: &mut Sampler, max_rows: usize, max_cols: usize) -> JointPmf {
    let rows = s.range_inclusive(1, max_rows);
    let cols = s.range_inclusive(1, max_cols);
    let zero_prob = if s.below(3) == 0 { 0.3 } else { 0.0 };
    random_joint(s, rows, cols, zero_prob)
}

/// A joint whose every conditional `p(·|y)` is nonincreasing in `x`.
pub fn monotone_joint(s: &mut Sampler, rows: usize, cols: usize) -> JointPmf {
    let py = s.dirichlet_ones(cols);
    let conditionals: Vec<Vec<f64>> = (0..cols)
        .map(|_| {
            let mut c = s.dirichlet_ones(rows);
            c.sort_by(|a, b| b.total_cmp(a));
            c
        })
        .collect();
    let mut data = vec![0.0; rows * cols];
    for (y, c) in conditionals.iter().enumerate() {
        for (x, &q) in c.iter().enumerate() {
            data[x * cols + y] = py[y] * q;
        }
    }
    JointPmf::from_flat(rows, cols, data, true).expect("positive mass")
}

/// A Robin-Hood transfer: move part of the gap between a richer and a
/// poorer atom from the former to the latter, without reversing their
/// order. The input majorizes the output. `None` if `p` is uniform.
pub fn robin_hood(s: &mut Sampler, p: &[f64]) -> Option<Vec<f64>> {
    let n = p.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let (rich, poor) = pairs[s.below(pairs.len() as u64) as usize];
    let delta = s.unit() * (p[rich] - p[poor]) / 2.0;
    let mut q = p.to_vec();
    q[rich] -= delta;
    q[poor] += delta;
    Some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let mut s = Sampler::new(1);
        for _ in 0..50 {
            let j = random_joint_upto(&mut s, 8, 8);
            assert!(j.rows() <= 8 && j.cols() <= 8);
            let m = monotone_joint(&mut s, 4, 3);
            for (_, c) in m.conditionals() {
                assert!(c.windows(2).all(|w| w[0] >= w[1]));
            }
        }
        assert_eq!(robin_hood(&mut s, &[0.25; 4]), None);
        let q = robin_hood(&mut s, &[0.7, 0.2, 0.1]).unwrap();
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
