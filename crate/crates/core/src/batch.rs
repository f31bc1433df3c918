//! Clearing many independent books at once.

use crate::book::Book;
use crate::clearing::{clear, ClearingMode, ClearingOutcome};

/// Clears every book. Runs on the rayon pool with the `parallel` feature.
pub fn clear_many(books: &[Book], mode: ClearingMode) -> Vec<ClearingOutcome> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        books.par_iter().map(|b| clear(b, mode)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        clear_many_sequential(books, mode)
    }
}

pub fn clear_many_sequential(books: &[Book], mode: ClearingMode) -> Vec<ClearingOutcome> {
    books.iter().map(|b| clear(b, mode)).collect()
}
