//! Fourier lattice, spectral fields, moving-frame multipliers and dealiased transforms.
//!
//! Coefficient convention: a field `f` on `T_x × [0, L_y)` is represented as
//! `f(x, y) = Σ f̂(k, η) e^{i(kx + ηy)}`, so `e^{ix}` has coefficient 1 at `(1, 0)`.
//! Norms and inner products are lattice sums, i.e. physical-space means.

mod field;
mod grid;
mod snapshot;
mod symbols;
mod transform;

pub use field::{FieldLabel, ModePart, SpectralField};
pub use grid::Grid;
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use symbols::{moving_symbol, p_symbol, MovingSymbol};
pub use transform::{transform_product, Fft2};
