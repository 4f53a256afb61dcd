#![allow(dead_code)]

use qtraj_core::schrodinger::{
    assemble_field, solve_axis_analytic, solve_axis_numerov, CatalogEntry, NumerovSetup,
    ProductTerm, Selector::*,
};
use qtraj_core::{Axis, AxisPotential, ReducedActionField};

pub fn catalog(axis: Axis, entry: CatalogEntry<f64>) -> qtraj_core::AxisSolutionPair64 {
    solve_axis_analytic(axis, entry, None, 1.0, 1.0).unwrap()
}

/// θ = sin x, φ = cos x embedded in 3D; E = 1/2.
pub fn free_1d(a: f64, b: f64) -> ReducedActionField<f64> {
    let field = assemble_field(
        [
            catalog(Axis::X, CatalogEntry::Free { k: 1.0 }),
            catalog(Axis::Y, CatalogEntry::ZeroEnergyFree),
            catalog(Axis::Z, CatalogEntry::ZeroEnergyFree),
        ],
        vec![ProductTerm::new(1.0, [U1, U1, U1])],
        vec![ProductTerm::new(1.0, [U2, U1, U1])],
    )
    .unwrap();
    ReducedActionField::new(field, a, b).unwrap()
}

/// θ = sin(x + y), φ = cos x cos y; E = 1.
pub fn free_2d(a: f64, b: f64) -> ReducedActionField<f64> {
    let field = assemble_field(
        [
            catalog(Axis::X, CatalogEntry::Free { k: 1.0 }),
            catalog(Axis::Y, CatalogEntry::Free { k: 1.0 }),
            catalog(Axis::Z, CatalogEntry::ZeroEnergyFree),
        ],
        vec![
            ProductTerm::new(1.0, [U1, U2, U1]),
            ProductTerm::new(1.0, [U2, U1, U1]),
        ],
        vec![ProductTerm::new(1.0, [U2, U2, U1])],
    )
    .unwrap();
    ReducedActionField::new(field, a, b).unwrap()
}

pub fn oscillator_pair(axis: Axis, energy: f64, half_width: f64) -> qtraj_core::AxisSolutionPair64 {
    let potential = AxisPotential::harmonic(axis, 1.0, 1.0).unwrap();
    let setup = NumerovSetup {
        domain: (-half_width, half_width),
        step: 1e-3,
        ic1: (1.0, 0.0),
        ic2: (0.0, 1.0),
        anchor: Some(0.0),
    };
    solve_axis_numerov(&potential, energy, &setup, 1.0, 1.0).unwrap()
}

/// Isotropic oscillator with every axis tabulated by Numerov on [-3, 3].
pub fn harmonic_numerov(a: f64, b: f64) -> ReducedActionField<f64> {
    let field = assemble_field(
        [
            oscillator_pair(Axis::X, 0.5, 3.0),
            oscillator_pair(Axis::Y, 0.7, 3.0),
            oscillator_pair(Axis::Z, 0.9, 3.0),
        ],
        vec![
            ProductTerm::new(1.0, [U1, U1, U1]),
            ProductTerm::new(0.5, [U2, U1, U2]),
        ],
        vec![
            ProductTerm::new(1.0, [U2, U2, U2]),
            ProductTerm::new(0.3, [U1, U2, U1]),
        ],
    )
    .unwrap();
    ReducedActionField::new(field, a, b).unwrap()
}

/// Box modes along x and y on the unit square.
pub fn box_2d(a: f64, b: f64) -> ReducedActionField<f64> {
    let mode = CatalogEntry::Box { length: 1.0, n: 1 };
    let field = assemble_field(
        [
            catalog(Axis::X, mode),
            catalog(Axis::Y, mode),
            catalog(Axis::Z, CatalogEntry::ZeroEnergyFree),
        ],
        vec![
            ProductTerm::new(1.0, [U1, U2, U1]),
            ProductTerm::new(1.0, [U2, U1, U1]),
        ],
        vec![ProductTerm::new(1.0, [U2, U2, U1])],
    )
    .unwrap();
    ReducedActionField::new(field, a, b).unwrap()
}

/// Oscillator along x at E_x = 1/2, constant along y and z.
pub fn oscillator_1d(a: f64, b: f64) -> ReducedActionField<f64> {
    let field = assemble_field(
        [
            oscillator_pair(Axis::X, 0.5, 3.0),
            catalog(Axis::Y, CatalogEntry::ZeroEnergyFree),
            catalog(Axis::Z, CatalogEntry::ZeroEnergyFree),
        ],
        vec![ProductTerm::new(1.0, [U1, U1, U1])],
        vec![ProductTerm::new(1.0, [U2, U1, U1])],
    )
    .unwrap();
    ReducedActionField::new(field, a, b).unwrap()
}

/// Rotation matrix from a unit quaternion built out of four numbers.
pub fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ]
}

/// Closed-form `∂_x S0` of the embedded 1D field: `ħa / ((a sin x + b cos x)² + cos² x)`.
pub fn free_1d_momentum(a: f64, b: f64, x: f64) -> f64 {
    let tp = a * x.sin() + b * x.cos();
    a / (tp * tp + x.cos().powi(2))
}
