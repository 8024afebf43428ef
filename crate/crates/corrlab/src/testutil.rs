//! Shared test fixtures.

use crate::corr1::Corr1;
use crate::polyalg::{BiPoly, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// w - z^2, the graph of squaring.
pub(crate) fn squaring() -> Corr1 {
    let rows = vec![
        vec![c(0.0), c(1.0)],
        vec![c(0.0), c(0.0)],
        vec![c(-1.0), c(0.0)],
    ];
    Corr1::from_c64(&BiPoly::new(rows)).unwrap()
}
