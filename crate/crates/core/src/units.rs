//! Conversion between bits and k_BT. Energies are in units of k_BT throughout.

pub const LN2: f64 = std::f64::consts::LN_2;

pub fn bits_to_kt(bits: f64) -> f64 {
    bits * LN2
}

pub fn kt_to_bits(kt: f64) -> f64 {
    kt / LN2
}
