//! Per-thread accounting of live table entries.
//!
//! Every DP table and every large join buffer is held in a [`Buf`], which
//! reports its length here on creation and on drop. [`peak`] then gives the
//! largest number of entries alive at once since the last [`reset`].

use std::cell::Cell;
use std::ops::{Deref, DerefMut};

thread_local! {
    static CURRENT: Cell<usize> = const { Cell::new(0) };
    static PEAK: Cell<usize> = const { Cell::new(0) };
}

fn alloc(n: usize) {
    CURRENT.with(|c| {
        let now = c.get() + n;
        c.set(now);
        PEAK.with(|p| p.set(p.get().max(now)));
    });
}

fn free(n: usize) {
    CURRENT.with(|c| c.set(c.get().saturating_sub(n)));
}

/// Entries currently alive on this thread.
pub fn current() -> usize {
    CURRENT.with(Cell::get)
}

/// Largest value of [`current`] since the last [`reset`].
pub fn peak() -> usize {
    PEAK.with(Cell::get)
}

/// Restart peak tracking from the current level.
pub fn reset() {
    PEAK.with(|p| p.set(current()));
}

/// A metered vector of table entries. Length is fixed after creation.
#[derive(Debug, PartialEq)]
pub struct Buf<T> {
    data: Vec<T>,
}

impl<T> Buf<T> {
    pub fn new(data: Vec<T>) -> Buf<T> {
        alloc(data.len());
        Buf { data }
    }

    pub fn into_vec(mut self) -> Vec<T> {
        let data = std::mem::take(&mut self.data);
        free(data.len());
        data
    }
}

impl<T: Clone> Clone for Buf<T> {
    fn clone(&self) -> Self {
        Buf::new(self.data.clone())
    }
}

impl<T> Drop for Buf<T> {
    fn drop(&mut self) {
        free(self.data.len());
    }
}

impl<T> Deref for Buf<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.data
    }
}

impl<T> DerefMut for Buf<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_live_entries() {
        reset();
        let base = current();
        let a = Buf::new(vec![0u8; 10]);
        let b = a.clone();
        assert_eq!(current(), base + 20);
        drop(a);
        let v = b.into_vec();
        assert_eq!(v.len(), 10);
        assert_eq!(current(), base);
        assert_eq!(peak(), base + 20);
        reset();
        assert_eq!(peak(), base);
    }
}
