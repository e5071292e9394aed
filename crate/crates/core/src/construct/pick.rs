use rand::Rng;

use crate::{Error, Result};

/// Entries kept in ascending key order; equal keys keep ascending `id` order.
#[derive(Debug, Clone)]
pub struct SortedCandidateList<T> {
    entries: Vec<(f64, usize, T)>,
}

impl<T> Default for SortedCandidateList<T> {
    fn default() -> Self {
        SortedCandidateList {
            entries: Vec::new(),
        }
    }
}

impl<T> SortedCandidateList<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: f64, id: usize, payload: T) {
        let at = self
            .entries
            .partition_point(|(k, i, _)| k.total_cmp(&key).then(i.cmp(&id)).is_lt());
        self.entries.insert(at, (key, id, payload));
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, idx: usize) -> Option<&T> {
        self.entries.get(idx).map(|e| &e.2)
    }

    pub fn remove(&mut self, idx: usize) -> T {
        self.entries.remove(idx).2
    }

    pub fn keys(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn payloads(&self) -> impl Iterator<Item = &T> + '_ {
        self.entries.iter().map(|e| &e.2)
    }
}

/// Index `floor(y^p * len)` clamped into the list.
pub fn pick_index(y: f64, power: f64, len: usize) -> usize {
    let r = (y.powf(power) * len as f64).floor() as usize;
    r.min(len.saturating_sub(1))
}

/// Head-biased random pick: returns the position drawn and its payload.
pub fn probabilistic_pick<'a, T>(
    list: &'a SortedCandidateList<T>,
    power: f64,
    rng: &mut impl Rng,
) -> Result<(usize, &'a T)> {
    if list.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot pick from an empty candidate list".into(),
        ));
    }
    let y: f64 = rng.gen();
    let idx = pick_index(y, power, list.len());
    Ok((idx, list.get(idx).expect("index clamped")))
}
