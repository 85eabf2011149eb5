//! Lock-free shared parameter matrices for asynchronous SGD.
//!
//! Workers write rows without synchronization. Concurrent updates to the
//! same row may lose increments, which asynchronous SGD tolerates; each
//! element is a naturally aligned `f64`, so readers never see torn values.
//! With a single worker the access pattern is exactly sequential SGD.

use std::marker::PhantomData;

pub(crate) struct SharedRows<'a> {
    ptr: *mut f64,
    len: usize,
    dim: usize,
    _owner: PhantomData<&'a mut [f64]>,
}

unsafe impl Send for SharedRows<'_> {}
unsafe impl Sync for SharedRows<'_> {}

impl<'a> SharedRows<'a> {
    pub(crate) fn new(data: &'a mut [f64], dim: usize) -> Self {
        SharedRows {
            ptr: data.as_mut_ptr(),
            len: data.len(),
            dim,
            _owner: PhantomData,
        }
    }

    /// Mutable view of row `r`.
    ///
    /// # Safety
    /// Callers must not hold two views of the same row at once within one
    /// thread. Cross-thread overlap is the accepted asynchronous-SGD race.
    #[inline]
    #[allow(clippy::mut_from_ref)]
    pub(crate) unsafe fn row(&self, r: usize) -> &mut [f64] {
        let start = r * self.dim;
        assert!(start + self.dim <= self.len, "row {r} out of bounds");
        std::slice::from_raw_parts_mut(self.ptr.add(start), self.dim)
    }
}
