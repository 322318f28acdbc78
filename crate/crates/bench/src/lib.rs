//! Fixtures shared by the benchmarks.

use coorbit_core::kernels::{modulation_kernel, shannon_kernel_periodic, ShannonSetting};
use coorbit_core::pou::{make_pou_1d_periodic, PartitionOfUnity};
use coorbit_core::spectral::band_limited_family;
use coorbit_core::{Grid1D, Grid2D, SampledFunction1D, SampledFunction2D};

pub const SEED: u64 = 2024;

pub struct ShannonFixture {
    pub setting: ShannonSetting,
    pub pou: PartitionOfUnity,
    pub kernel: SampledFunction1D,
    pub signal: SampledFunction1D,
}

/// Unit band on the periodic window `[−half_width, half_width)` sampled at `1/samples_per_unit`.
pub fn shannon_fixture(half_width: f64, samples_per_unit: u32) -> ShannonFixture {
    let setting = ShannonSetting::new(1.0).unwrap();
    let grid = Grid1D::symmetric(half_width, 1.0 / f64::from(samples_per_unit)).unwrap();
    let pou = make_pou_1d_periodic(setting.tau(), &grid).unwrap();
    let kernel = shannon_kernel_periodic(&setting, &grid);
    let signal = band_limited_family(&grid, setting.omega(), SEED, 1).pop().unwrap();
    ShannonFixture { setting, pou, kernel, signal }
}

pub fn modulation_fixture(x_half_width: f64, omega_half_width: f64) -> SampledFunction2D {
    let grid = Grid2D::new(
        Grid1D::symmetric(x_half_width, 1.0 / 32.0).unwrap(),
        Grid1D::symmetric(omega_half_width, 1.0 / 8.0).unwrap(),
    );
    modulation_kernel(&grid)
}
