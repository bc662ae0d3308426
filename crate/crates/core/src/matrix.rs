use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `N` items, each an unordered collection of responses in `[0, 1]`.
///
/// Responses are stored contiguously; item `i` owns
/// `values[offsets[i]..offsets[i + 1]]`. Item ids are shared behind an
/// `Arc` so resampled matrices of one experiment don't copy them.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix {
    ids: Arc<[String]>,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

fn check_value(id: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::ValueOutOfRange {
            item_id: id.into(),
            value: v,
        })
    }
}

impl ResponseMatrix {
    /// Builds a (possibly ragged) matrix from `(item_id, responses)` pairs.
    pub fn from_items<I, S>(items: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut ids = Vec::new();
        let mut offsets = alloc::vec![0];
        let mut values = Vec::new();
        for (id, responses) in items {
            let id = id.into();
            for &v in &responses {
                check_value(&id, v)?;
            }
            values.extend_from_slice(&responses);
            offsets.push(values.len());
            ids.push(id);
        }
        Ok(ResponseMatrix {
            ids: ids.into(),
            offsets,
            values,
        })
    }

    /// Rectangular matrix with `k` responses per item stored row-major in `values`.
    pub fn rectangular(ids: Arc<[String]>, k: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != ids.len() * k {
            return Err(Error::LengthMismatch(values.len(), ids.len() * k));
        }
        for (i, row) in values.chunks(k.max(1)).enumerate() {
            for &v in row {
                check_value(&ids[i], v)?;
            }
        }
        Ok(Self::rectangular_unchecked(ids, k, values))
    }

    pub(crate) fn rectangular_unchecked(ids: Arc<[String]>, k: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), ids.len() * k);
        let offsets = (0..=ids.len()).map(|i| i * k).collect();
        ResponseMatrix {
            ids,
            offsets,
            values,
        }
    }

    /// Same item ids, new responses laid out by `offsets`.
    pub(crate) fn with_layout(&self, offsets: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(offsets.len(), self.ids.len() + 1);
        ResponseMatrix {
            ids: self.ids.clone(),
            offsets,
            values,
        }
    }

    pub(crate) fn with_ids(mut self, ids: Arc<[String]>) -> Self {
        debug_assert_eq!(ids.len(), self.ids.len());
        self.ids = ids;
        self
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn n_items(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &Arc<[String]> {
        &self.ids
    }

    pub fn item_id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn item(&self, i: usize) -> &[f64] {
        &self.values[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn items(&self) -> impl ExactSizeIterator<Item = (&str, &[f64])> + '_ {
        (0..self.n_items()).map(move |i| (self.item_id(i), self.item(i)))
    }

    /// Total number of responses.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// `Some(k)` when every item holds exactly `k` responses.
    pub fn rectangular_width(&self) -> Option<usize> {
        let k = self.offsets.get(1).copied().unwrap_or(0);
        self.offsets
            .windows(2)
            .all(|w| w[1] - w[0] == k)
            .then_some(k)
    }

    /// Per-item response means; fails on an empty item.
    pub fn item_means(&self) -> Result<Vec<f64>> {
        (0..self.n_items())
            .map(|i| {
                let r = self.item(i);
                if r.is_empty() {
                    Err(Error::EmptyItem(self.ids[i].clone()))
                } else {
                    Ok(r.iter().sum::<f64>() / r.len() as f64)
                }
            })
            .collect()
    }

    /// Fails with `ItemMismatch` unless both matrices list the same ids in
    /// the same order.
    pub fn check_aligned(&self, other: &ResponseMatrix) -> Result<()> {
        if Arc::ptr_eq(&self.ids, &other.ids) {
            return Ok(());
        }
        for i in 0..self.n_items().max(other.n_items()) {
            let l = self.ids.get(i);
            let r = other.ids.get(i);
            if l != r {
                return Err(Error::ItemMismatch {
                    index: i,
                    left: l.cloned().unwrap_or_default(),
                    right: r.cloned().unwrap_or_default(),
                });
            }
        }
        Ok(())
    }

    /// Fails with `EmptyItem` on the first item without responses.
    pub fn check_nonempty(&self) -> Result<()> {
        match (0..self.n_items()).find(|&i| self.item(i).is_empty()) {
            Some(i) => Err(Error::EmptyItem(self.ids[i].clone())),
            None => Ok(()),
        }
    }

    /// Reorders items (ids included) by `order`; used to test permutation invariance.
    pub fn select_items(&self, order: &[usize]) -> ResponseMatrix {
        let ids: Vec<String> = order.iter().map(|&i| self.ids[i].clone()).collect();
        let mut offsets = alloc::vec![0];
        let mut values = Vec::with_capacity(self.values.len());
        for &i in order {
            values.extend_from_slice(self.item(i));
            offsets.push(values.len());
        }
        ResponseMatrix {
            ids: ids.into(),
            offsets,
            values,
        }
    }
}

/// Gold matrix `G` with the two model matrices `A` and `B`, sharing item ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub gold: ResponseMatrix,
    pub a: ResponseMatrix,
    pub b: ResponseMatrix,
}

impl Triple {
    pub fn new(gold: ResponseMatrix, a: ResponseMatrix, b: ResponseMatrix) -> Result<Self> {
        gold.check_aligned(&a)?;
        gold.check_aligned(&b)?;
        Ok(Triple { gold, a, b })
    }

    /// Swaps the roles of the two models.
    pub fn swapped(self) -> Triple {
        Triple {
            gold: self.gold,
            a: self.b,
            b: self.a,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn ragged_layout() {
        let m = ResponseMatrix::from_items([("a", vec![0.0, 1.0]), ("b", vec![0.5])]).unwrap();
        assert_eq!(m.n_items(), 2);
        assert_eq!(m.item(0), &[0.0, 1.0]);
        assert_eq!(m.item(1), &[0.5]);
        assert_eq!(m.rectangular_width(), None);
        assert_eq!(m.item_means().unwrap(), vec![0.5, 0.5]);
    }

    #[test]
    fn rejects_out_of_range() {
        let err = ResponseMatrix::from_items([("x", vec![1.5])]).unwrap_err();
        assert!(matches!(err, Error::ValueOutOfRange { .. }));
    }

    #[test]
    fn alignment() {
        let a = ResponseMatrix::from_items([("a", vec![0.0]), ("b", vec![0.0])]).unwrap();
        let b = ResponseMatrix::from_items([("a", vec![1.0]), ("c", vec![0.0])]).unwrap();
        assert!(matches!(
            a.check_aligned(&b),
            Err(Error::ItemMismatch { index: 1, .. })
        ));
        assert!(a.check_aligned(&a.clone()).is_ok());
    }

    #[test]
    fn empty_item_is_reported() {
        let m = ResponseMatrix::from_items([("a", vec![0.0]), ("b", vec![])]).unwrap();
        assert_eq!(m.check_nonempty(), Err(Error::EmptyItem("b".into())));
        assert!(m.item_means().is_err());
    }
}
