//! Bundled five-country panel, 1995-2014.
//!
//! See `data/README.md` for how the values were assembled. Replace it with a
//! fresh World Bank extract (`tools/fetch_wdi.py`) for authoritative figures.

use crate::panel::{parse_csv, PanelDataset};

pub const BALKAN_CSV: &str = include_str!("../data/balkan_1995_2014.csv");

pub fn balkan_panel() -> PanelDataset {
    parse_csv(BALKAN_CSV).expect("bundled snapshot is valid")
}
