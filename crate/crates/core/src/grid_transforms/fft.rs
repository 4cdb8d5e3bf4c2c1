//! Continuous Fourier transform `f̂(ξ) = ∫ f(x) e^{−2πi x·ξ} dx` approximated
//! on a periodic grid.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::{Domain, FreqGrid, GridFunction};
use crate::error::Result;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

/// Forward transform (scaled by `(L/N)ⁿ`) or its exact inverse.
pub fn fourier_transform(f: &GridFunction, direction: Direction) -> Result<GridFunction> {
    match direction {
        Direction::Forward => {
            f.expect_domain(Domain::Space)?;
            let mut data = f.values.clone();
            modulate(&f.grid, &mut data, -1.0);
            fft_nd(&f.grid, &mut data, FftDirection::Forward);
            let c = f.grid.cell_volume();
            data.iter_mut().for_each(|v| *v *= c);
            Ok(GridFunction { grid: f.grid.clone(), domain: Domain::Frequency, values: data, band_limit: f.band_limit })
        }
        Direction::Inverse => {
            f.expect_domain(Domain::Frequency)?;
            let mut data = f.values.clone();
            fft_nd(&f.grid, &mut data, FftDirection::Inverse);
            modulate(&f.grid, &mut data, 1.0);
            let c = f.grid.period.powi(-(f.grid.n as i32));
            data.iter_mut().for_each(|v| *v *= c);
            Ok(GridFunction { grid: f.grid.clone(), domain: Domain::Space, values: data, band_limit: f.band_limit })
        }
    }
}

pub fn forward(f: &GridFunction) -> Result<GridFunction> {
    fourier_transform(f, Direction::Forward)
}

pub fn inverse(f: &GridFunction) -> Result<GridFunction> {
    fourier_transform(f, Direction::Inverse)
}

// multiply by e^{sign·2πi carrier·j/N}, phase reduced mod N exactly
fn modulate(grid: &FreqGrid, data: &mut [Complex64], sign: f64) {
    if grid.carrier == [0, 0] {
        return;
    }
    let n = grid.size as i64;
    let table: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(1.0, sign * 2.0 * std::f64::consts::PI * r as f64 / n as f64))
        .collect();
    let c0 = grid.carrier[0].rem_euclid(n);
    let c1 = grid.carrier[1].rem_euclid(n);
    for (flat, v) in data.iter_mut().enumerate() {
        let m = grid.split(flat);
        let phase = (c0 * m[0] as i64 + c1 * m[1] as i64).rem_euclid(n);
        *v *= table[phase as usize];
    }
}

fn plan(len: usize, dir: FftDirection) -> std::sync::Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, dir))
}

fn fft_nd(grid: &FreqGrid, data: &mut [Complex64], dir: FftDirection) {
    let n = grid.size;
    let fft = plan(n, dir);
    if grid.n == 1 {
        fft.process(data);
        return;
    }
    // rows are contiguous
    fft.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            column[r] = data[r * n + c];
        }
        fft.process(&mut column);
        for r in 0..n {
            data[r * n + c] = column[r];
        }
    }
}
