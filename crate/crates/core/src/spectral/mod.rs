//! Fourier-side fields on a lattice, their products and norms.

mod field;
pub mod io;
mod norms;
mod product;

pub use field::{
    inner, l2_norm, populate_region, populate_region_with, project, Column, FillMode, Spacing, SparseField,
    DEFAULT_POINT_CAP,
};
pub use norms::{best_slab_window, slab_sup_norm, tube_sup_norm, TubeSupNorm};
pub use product::{
    bilinear_product, trilinear_form, trilinear_form_with, ProductOptions, SymbolKind, DEFAULT_PAIR_CAP,
};
