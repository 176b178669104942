use std::collections::HashMap;

use super::EnvError;
use crate::qubits::QubitOperatorAction;

/// Ordered, conjugate-free set of sign-free actions on a fixed register.
///
/// Of each Hermitian-conjugate pair only the orientation with
/// `(p, q) < (k, l)` is kept, and actions are sorted lexicographically.
#[derive(Debug, Clone)]
pub struct ActionPool {
    n_qubits: usize,
    actions: Vec<QubitOperatorAction>,
    pairs: Vec<Vec<(usize, usize)>>,
    index: HashMap<QubitOperatorAction, usize>,
}

impl ActionPool {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn actions(&self) -> &[QubitOperatorAction] {
        &self.actions
    }

    pub fn action(&self, index: usize) -> Result<&QubitOperatorAction, EnvError> {
        self.actions.get(index).ok_or(EnvError::InvalidActionIndex { index, size: self.len() })
    }

    /// `(b, γb)` pairs of the action at `index`, precomputed for the register.
    pub fn pairs(&self, index: usize) -> &[(usize, usize)] {
        &self.pairs[index]
    }

    /// Position of `action` or of its conjugate partner.
    pub fn position(&self, action: &QubitOperatorAction) -> Option<usize> {
        self.index.get(action).or_else(|| self.index.get(&action.conjugate())).copied()
    }

    /// Whether the action moves the same number of α and β electrons in as out.
    pub fn conserves_sz(action: &QubitOperatorAction) -> bool {
        let alpha = |a: usize, b: usize| (a % 2 == 0) as i32 + (b % 2 == 0) as i32;
        alpha(action.p, action.q) == alpha(action.k, action.l)
    }
}

/// Enumerates every `γ^{pq}_{kl}` with `p<q`, `k<l`, `(p,q) ≠ (k,l)` once.
pub fn build_action_pool(n_qubits: usize, sz_filter: bool) -> Result<ActionPool, EnvError> {
    if !(4..=crate::qubits::MAX_QUBITS).contains(&n_qubits) {
        return Err(EnvError::InvalidPool(format!(
            "pool needs between 4 and {} qubits, got {n_qubits}",
            crate::qubits::MAX_QUBITS
        )));
    }
    let index_pairs: Vec<(usize, usize)> = (0..n_qubits).flat_map(|a| (a + 1..n_qubits).map(move |b| (a, b))).collect();
    let mut actions = Vec::new();
    for (i, &(p, q)) in index_pairs.iter().enumerate() {
        for &(k, l) in &index_pairs[i + 1..] {
            let a = QubitOperatorAction { p, q, k, l };
            if !sz_filter || ActionPool::conserves_sz(&a) {
                actions.push(a);
            }
        }
    }
    actions.sort();
    let pairs = actions.iter().map(|a| a.pairs(n_qubits)).collect();
    let index = actions.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    Ok(ActionPool { n_qubits, actions, pairs, index })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(build_action_pool(4, false).unwrap().len(), 15);
        assert_eq!(build_action_pool(6, false).unwrap().len(), 105);
        assert!(build_action_pool(3, false).is_err());
    }

    #[test]
    fn no_conjugate_duplicates() {
        let pool = build_action_pool(6, false).unwrap();
        for (i, a) in pool.actions().iter().enumerate() {
            assert_eq!(pool.position(a), Some(i));
            assert!(!pool.actions().contains(&a.conjugate()));
        }
        assert!(pool.actions().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sz_filter_keeps_balanced_actions() {
        let full = build_action_pool(4, false).unwrap();
        let filtered = build_action_pool(4, true).unwrap();
        assert!(filtered.len() < full.len());
        assert!(filtered.actions().iter().all(ActionPool::conserves_sz));
        let a = QubitOperatorAction::new(0, 4, 4, 5).unwrap();
        assert!(!ActionPool::conserves_sz(&a));
    }
}
