use crate::error::{domain, Result};

pub const MULTIINDEX_LIMIT: usize = 20;

/// Multi-indices bounding ∏|η_j − η_{j−1}|^θ by Σ_a ∏|η_j|^{θ a_j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiIndexSet {
    pub k: usize,
    pub indices: Vec<Vec<u8>>,
}

impl MultiIndexSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Factor j ≥ 2 of the product picks either η_j or η_{j−1}; a_j counts how often η_j is picked.
pub fn multiindex_set(k: usize) -> Result<MultiIndexSet> {
    if !(1..=MULTIINDEX_LIMIT).contains(&k) {
        return domain(format!("k = {k} must lie in 1..={MULTIINDEX_LIMIT}"));
    }
    let count = 1usize << (k - 1);
    let mut indices = Vec::with_capacity(count);
    for mask in 0..count {
        let mut a = vec![0u8; k];
        a[0] = 1;
        for j in 1..k {
            // bit set: factor j+1 picks η_j (the earlier point)
            if mask >> (j - 1) & 1 == 1 {
                a[j - 1] += 1;
            } else {
                a[j] += 1;
            }
        }
        indices.push(a);
    }
    indices.sort();
    Ok(MultiIndexSet { k, indices })
}

/// (∏|η_j − η_{j−1}|^{1−2H}, Σ_{a∈A_k}∏|η_j|^{(1−2H)a_j}) with η₀ = 0.
pub fn product_bound_check(etas: &[f64], h: f64) -> (f64, f64) {
    let k = etas.len();
    if k == 0 {
        return (1.0, 1.0);
    }
    let theta = 1.0 - 2.0 * h;
    let mut prev = 0.0;
    let mut lhs = 1.0;
    for &e in etas {
        lhs *= (e - prev).abs().powf(theta);
        prev = e;
    }
    let set = match multiindex_set(k) {
        Ok(s) => s,
        Err(_) => return (lhs, f64::NAN),
    };
    let rhs = set
        .indices
        .iter()
        .map(|a| etas.iter().zip(a).map(|(e, &aj)| e.abs().powf(theta * aj as f64)).product::<f64>())
        .sum();
    (lhs, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sets() {
        assert_eq!(multiindex_set(1).unwrap().indices, vec![vec![1]]);
        assert_eq!(multiindex_set(2).unwrap().indices, vec![vec![1, 1], vec![2, 0]]);
        assert_eq!(multiindex_set(4).unwrap().len(), 8);
        assert!(multiindex_set(0).is_err());
        assert!(multiindex_set(21).is_err());
    }

    #[test]
    fn structure_and_cardinality() {
        for k in 1..=12 {
            let s = multiindex_set(k).unwrap();
            assert_eq!(s.len(), 1 << (k - 1));
            let mut dedup = s.indices.clone();
            dedup.dedup();
            assert_eq!(dedup.len(), s.len());
            for a in &s.indices {
                assert!(a[0] == 1 || a[0] == 2);
                assert!(a[k - 1] <= 1);
                assert!(a.iter().all(|&x| x <= 2));
                assert_eq!(a.iter().map(|&x| x as usize).sum::<usize>(), k);
            }
        }
    }

    #[test]
    fn bound_examples() {
        let (l, r) = product_bound_check(&[2.0], 0.25);
        assert!((l - 2f64.sqrt()).abs() < 1e-15 && (r - 2f64.sqrt()).abs() < 1e-15);
        let (l, r) = product_bound_check(&[1.0, 1.0], 0.25);
        assert_eq!(l, 0.0);
        assert!(r > 0.0);
    }
}
