use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Complex samples on the periodic grid `[-L, L)^n` with `P` points per axis, stored row-major
/// (last axis fastest). Grid point `j` on an axis sits at `-L + j·2L/P`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T> {
    dimension: usize,
    points_per_axis: usize,
    half_width: T,
    values: Vec<Complex<T>>,
}

impl<T: Real> GridField<T> {
    pub fn new(dimension: usize, points_per_axis: usize, half_width: T, values: Vec<Complex<T>>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpec("grid dimension must be positive".into()));
        }
        if !points_per_axis.is_power_of_two() || points_per_axis < 2 {
            return Err(Error::InvalidSpec(format!(
                "points per axis must be a power of two >= 2, got {points_per_axis}"
            )));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(Error::InvalidSpec(format!("box half-width must be positive, got {half_width}")));
        }
        let expected = points_per_axis
            .checked_pow(dimension as u32)
            .ok_or_else(|| Error::InvalidSpec("grid too large".into()))?;
        if values.len() != expected {
            return Err(Error::InvalidSpec(format!("grid needs {expected} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidSpec("grid values must be finite".into()));
        }
        Ok(Self {
            dimension,
            points_per_axis,
            half_width,
            values,
        })
    }

    pub fn zeros(dimension: usize, points_per_axis: usize, half_width: T) -> Result<Self> {
        let len = points_per_axis.pow(dimension as u32);
        Self::new(dimension, points_per_axis, half_width, vec![Complex::new(T::zero(), T::zero()); len])
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(
        dimension: usize,
        points_per_axis: usize,
        half_width: T,
        f: impl Fn(&[T]) -> Complex<T>,
    ) -> Result<Self> {
        let mut field = Self::zeros(dimension, points_per_axis, half_width)?;
        let mut x = vec![T::zero(); dimension];
        for flat in 0..field.values.len() {
            field.point_into(flat, &mut x);
            field.values[flat] = f(&x);
        }
        Self::new(dimension, points_per_axis, half_width, field.values)
    }

    /// Discrete point mass at the origin, normalised to unit integral.
    pub fn point_mass(dimension: usize, points_per_axis: usize, half_width: T) -> Result<Self> {
        let mut field = Self::zeros(dimension, points_per_axis, half_width)?;
        let centre = points_per_axis / 2;
        let flat = (0..dimension).fold(0, |acc, _| acc * points_per_axis + centre);
        field.values[flat] = Complex::new(T::one() / field.cell_volume(), T::zero());
        Ok(field)
    }

    /// `e^{-|x|²/(2w²)} e^{ik·x}`.
    pub fn gaussian(
        dimension: usize,
        points_per_axis: usize,
        half_width: T,
        width: T,
        modulation: Option<&[T]>,
    ) -> Result<Self> {
        Self::from_fn(dimension, points_per_axis, half_width, |x| {
            let r2 = x.iter().fold(T::zero(), |acc, &v| acc + v * v);
            let phase = modulation.map_or(T::zero(), |k| x.iter().zip(k).fold(T::zero(), |acc, (&a, &b)| acc + a * b));
            Complex::from_polar((-r2 / (T::lit(2.0) * width * width)).exp(), phase)
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn spacing(&self) -> T {
        T::lit(2.0) * self.half_width / T::from_usize(self.points_per_axis).expect("grid size")
    }

    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.dimension as i32)
    }

    pub fn coordinate(&self, j: usize) -> T {
        -self.half_width + T::from_usize(j).expect("index") * self.spacing()
    }

    /// Wavenumber of FFT bin `j`: `2π/(2L)·j` for `j < P/2`, else `2π/(2L)·(j - P)`.
    pub fn wavenumber(&self, j: usize) -> T {
        let p = self.points_per_axis;
        let signed = if j < p / 2 { j as f64 } else { j as f64 - p as f64 };
        T::PI() / self.half_width * T::lit(signed)
    }

    /// Coordinates of the grid point with row-major index `flat`.
    pub fn point_into(&self, flat: usize, out: &mut [T]) {
        self.indices_into(flat, |k, j| out[k] = self.coordinate(j));
    }

    /// Wavevector of the spectral bin with row-major index `flat`.
    pub fn wavevector_into(&self, flat: usize, out: &mut [T]) {
        self.indices_into(flat, |k, j| out[k] = self.wavenumber(j));
    }

    fn indices_into(&self, mut flat: usize, mut set: impl FnMut(usize, usize)) {
        for k in (0..self.dimension).rev() {
            set(k, flat % self.points_per_axis);
            flat /= self.points_per_axis;
        }
    }

    /// Riemann-sum `L^p` norm; `p = ∞` gives the max-norm.
    pub fn lp_norm(&self, p: T) -> Result<T> {
        check_exponent(p)?;
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(T::zero(), T::max));
        }
        let mut sum = crate::scalar::CompensatedReal::new();
        for v in &self.values {
            sum.add(v.norm().powf(p));
        }
        Ok((sum.value() * self.cell_volume()).powf(T::one() / p))
    }

    /// Share of `Σ|u|²` carried by points with some coordinate beyond `0.9 L`.
    pub fn frame_fraction(&self) -> T {
        let edge = T::lit(0.9) * self.half_width;
        let mut x = vec![T::zero(); self.dimension];
        let (mut frame, mut total) = (T::zero(), T::zero());
        for (flat, v) in self.values.iter().enumerate() {
            let m = v.norm_sqr();
            total = total + m;
            self.point_into(flat, &mut x);
            if x.iter().any(|c| c.abs() > edge) {
                frame = frame + m;
            }
        }
        if total == T::zero() {
            T::zero()
        } else {
            frame / total
        }
    }

    /// Unnormalised forward transform over every axis.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        let mut data = self.values.clone();
        transform(&mut data, self.dimension, self.points_per_axis, false);
        data
    }

    /// Inverse of [`GridField::spectrum`], including the `1/P^n` normalisation.
    pub fn from_spectrum(&self, mut spectrum: Vec<Complex<T>>) -> Result<Self> {
        transform(&mut spectrum, self.dimension, self.points_per_axis, true);
        let scale = T::one() / T::from_usize(spectrum.len()).expect("grid size");
        for v in &mut spectrum {
            *v = *v * scale;
        }
        Self::new(self.dimension, self.points_per_axis, self.half_width, spectrum)
    }

    /// `F^{-1}[m(k) F u]`.
    pub fn apply_multiplier(&self, multiplier: impl Fn(&[T]) -> Complex<T>) -> Result<Self> {
        let mut spectrum = self.spectrum();
        let mut k = vec![T::zero(); self.dimension];
        for (flat, v) in spectrum.iter_mut().enumerate() {
            self.wavevector_into(flat, &mut k);
            *v = *v * multiplier(&k);
        }
        self.from_spectrum(spectrum)
    }

    /// Pointwise product with another field on the same grid.
    pub fn multiply(&self, other: &GridField<T>) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Self::new(self.dimension, self.points_per_axis, self.half_width, values)
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }

    pub(crate) fn check_same_grid(&self, other: &GridField<T>) -> Result<()> {
        if self.dimension != other.dimension
            || self.points_per_axis != other.points_per_axis
            || self.half_width != other.half_width
        {
            return Err(Error::InvalidSpec("fields live on different grids".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<()> {
    if !(p >= T::one()) {
        return Err(Error::ParameterRange {
            parameter: "p",
            value: p.to_string(),
            interval: "[1, inf]".into(),
        });
    }
    Ok(())
}

/// In-place multidimensional FFT, one axis at a time.
fn transform<T: Real>(data: &mut [Complex<T>], dimension: usize, points: usize, inverse: bool) {
    let mut planner = FftPlanner::<T>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(points)
    } else {
        planner.plan_fft_forward(points)
    };
    let mut line = vec![Complex::new(T::zero(), T::zero()); points];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for axis in 0..dimension {
        let stride = points.pow((dimension - 1 - axis) as u32);
        let block = stride * points;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, slot) in line.iter().enumerate() {
                    data[start + j * stride] = *slot;
                }
            }
        }
    }
}
