//! Kernel-convolution (spatial moving-average) fields driven by a correlated
//! Gaussian innovation field.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{sym_sqrt, DenseMatrix, SpdMatrix};

use super::lattice::{LatticeField, LatticeSpec};
use super::matern::{matern_corr, solve_effective_range, CorrelationFamily};

/// Correlation function of the innovation field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InnovationCorrelation {
    /// Independent standard normals.
    White,
    Matern {
        nu: f64,
        beta: f64,
    },
}

impl InnovationCorrelation {
    pub fn exponential(beta: f64) -> Self {
        Self::Matern { nu: 0.5, beta }
    }

    pub fn whittle(beta: f64) -> Self {
        Self::Matern { nu: 1.0, beta }
    }

    /// Family member whose correlation drops to 0.05 at `h_star`.
    pub fn from_effective_range(family: CorrelationFamily, h_star: f64) -> Result<Self> {
        let beta = solve_effective_range(family, h_star)?;
        Ok(Self::Matern { nu: family.nu(), beta })
    }

    pub fn corr(&self, h: f64) -> Result<f64> {
        match *self {
            Self::White => Ok(if h == 0.0 { 1.0 } else { 0.0 }),
            Self::Matern { nu, beta } => matern_corr(h, nu, beta),
        }
    }
}

/// Draws zero-mean unit-variance Gaussian fields on an `n_x × n_y` grid by
/// applying a cached symmetric square root of the correlation matrix.
#[derive(Debug, Clone)]
pub struct GaussianFieldSampler {
    n_x: usize,
    n_y: usize,
    root: Option<DenseMatrix>,
}

impl GaussianFieldSampler {
    pub fn new(correlation: InnovationCorrelation, n_x: usize, n_y: usize, spacing: f64) -> Result<Self> {
        if n_x == 0 || n_y == 0 {
            return Err(Error::Contract("sampler grid must be non-empty".into()));
        }
        let root = match correlation {
            InnovationCorrelation::White => None,
            InnovationCorrelation::Matern { .. } => {
                let mut table = Vec::with_capacity(n_x * n_y);
                for dy in 0..n_y {
                    for dx in 0..n_x {
                        table.push(correlation.corr((dx as f64 * spacing).hypot(dy as f64 * spacing))?);
                    }
                }
                let n = n_x * n_y;
                let mut m = DenseMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        let lag = (i % n_x).abs_diff(j % n_x) + n_x * (i / n_x).abs_diff(j / n_x);
                        m.set(i, j, table[lag]);
                    }
                }
                Some(sym_sqrt(&SpdMatrix::new(m)?)?)
            }
        };
        Ok(Self { n_x, n_y, root })
    }

    pub fn n_sites(&self) -> usize {
        self.n_x * self.n_y
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let noise: Vec<f64> = (0..self.n_sites()).map(|_| rng.sample(StandardNormal)).collect();
        match &self.root {
            None => noise,
            Some(root) => root.matvec(&noise).expect("sampler root matches its own grid"),
        }
    }
}

/// Innovation values on a lattice extended by `pad` sites on every side.
///
/// Interior site `(ix, iy)` of the lattice corresponds to padded position
/// `(ix + pad, iy + pad)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedGrid {
    n_x: usize,
    n_y: usize,
    pad: usize,
    values: Vec<f64>,
}

impl PaddedGrid {
    pub fn zeros(lattice: &LatticeSpec, pad: usize) -> Self {
        let (w, h) = (lattice.n_x + 2 * pad, lattice.n_y + 2 * pad);
        Self {
            n_x: lattice.n_x,
            n_y: lattice.n_y,
            pad,
            values: vec![0.0; w * h],
        }
    }

    pub fn from_values(lattice: &LatticeSpec, pad: usize, values: Vec<f64>) -> Result<Self> {
        let g = Self::zeros(lattice, pad);
        if values.len() != g.values.len() {
            return Err(Error::Contract(format!(
                "padded grid needs {} values, got {}",
                g.values.len(),
                values.len()
            )));
        }
        Ok(Self { values, ..g })
    }

    pub fn width(&self) -> usize {
        self.n_x + 2 * self.pad
    }

    pub fn height(&self) -> usize {
        self.n_y + 2 * self.pad
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    /// Value at lattice coordinates, which may lie in the padding.
    #[inline]
    pub fn get(&self, ix: isize, iy: isize) -> f64 {
        let px = (ix + self.pad as isize) as usize;
        let py = (iy + self.pad as isize) as usize;
        self.values[py * self.width() + px]
    }

    #[inline]
    pub fn set(&mut self, ix: isize, iy: isize, v: f64) {
        let px = (ix + self.pad as isize) as usize;
        let py = (iy + self.pad as isize) as usize;
        let w = self.width();
        self.values[py * w + px] = v;
    }
}

/// A finitely supported kernel on the integer lattice with `k(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeKernel {
    taps: Vec<(i32, i32, f64)>,
}

impl LatticeKernel {
    pub fn new(taps: Vec<(i32, i32, f64)>) -> Result<Self> {
        let mut centre = None;
        for &(dx, dy, w) in &taps {
            if !w.is_finite() {
                return Err(Error::Contract(format!("kernel weight at ({dx}, {dy}) is not finite")));
            }
            if (dx, dy) == (0, 0) {
                if centre.is_some() {
                    return Err(Error::Contract("kernel lists the origin twice".into()));
                }
                centre = Some(w);
            }
        }
        if centre != Some(1.0) {
            return Err(Error::Contract("kernel must have weight 1 at the origin".into()));
        }
        Ok(Self { taps })
    }

    pub fn point() -> Self {
        Self {
            taps: vec![(0, 0, 1.0)],
        }
    }

    /// Origin plus weight `theta` on the four rook neighbours.
    pub fn rook(theta: f64) -> Self {
        Self {
            taps: vec![
                (0, 0, 1.0),
                (-1, 0, theta),
                (1, 0, theta),
                (0, -1, theta),
                (0, 1, theta),
            ],
        }
    }

    pub fn taps(&self) -> &[(i32, i32, f64)] {
        &self.taps
    }

    pub fn radius(&self) -> usize {
        self.taps
            .iter()
            .map(|&(dx, dy, _)| dx.unsigned_abs().max(dy.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }
}

/// `Σ_t k(s − t) ω(t)` at every lattice site.
pub fn convolve(kernel: &LatticeKernel, innovations: &PaddedGrid, lattice: &LatticeSpec) -> Result<Vec<f64>> {
    if innovations.n_x != lattice.n_x || innovations.n_y != lattice.n_y {
        return Err(Error::Contract("innovation grid does not match the lattice".into()));
    }
    if kernel.radius() > innovations.pad {
        return Err(Error::Contract(format!(
            "kernel radius {} exceeds innovation padding {}",
            kernel.radius(),
            innovations.pad
        )));
    }
    let mut out = vec![0.0; lattice.n_sites()];
    for iy in 0..lattice.n_y {
        for ix in 0..lattice.n_x {
            let mut acc = 0.0;
            for &(dx, dy, w) in &kernel.taps {
                acc += w * innovations.get(ix as isize - dx as isize, iy as isize - dy as isize);
            }
            out[lattice.site(ix, iy)] = acc;
        }
    }
    Ok(out)
}

/// The lattice moving-average model
/// `X_l(i,j) = θ_l {e(i−1,j) + e(i+1,j) + e(i,j−1) + e(i,j+1)} + e(i,j)`
/// with one innovation field shared by all variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovingAverageSpec {
    pub thetas: Vec<f64>,
    pub innovation: InnovationCorrelation,
}

impl MovingAverageSpec {
    /// Coefficients outside |θ| ≤ 1/4, where the model stops being invertible.
    pub fn non_invertible(&self) -> Vec<usize> {
        self.thetas
            .iter()
            .enumerate()
            .filter(|(_, t)| t.abs() > 0.25)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Applies the moving-average model to a given innovation grid (padding 1).
pub fn moving_average_from_innovations(
    thetas: &[f64],
    innovations: &PaddedGrid,
    lattice: &LatticeSpec,
) -> Result<LatticeField> {
    if thetas.is_empty() {
        return Err(Error::Contract("moving average needs at least one coefficient".into()));
    }
    let mut values = Vec::with_capacity(thetas.len() * lattice.n_sites());
    for &theta in thetas {
        values.extend(convolve(&LatticeKernel::rook(theta), innovations, lattice)?);
    }
    LatticeField::new(*lattice, thetas.len(), values)
}

/// Cached simulator for [`MovingAverageSpec`] on a fixed lattice.
///
/// The innovation field is simulated on lattice indices `1..=n+1` along each
/// axis (one extra ring on the high side) and is zero on index 0.
#[derive(Debug, Clone)]
pub struct MovingAverageSimulator {
    thetas: Vec<f64>,
    lattice: LatticeSpec,
    sampler: GaussianFieldSampler,
}

impl MovingAverageSimulator {
    pub fn new(spec: &MovingAverageSpec, lattice: &LatticeSpec) -> Result<Self> {
        if spec.thetas.is_empty() {
            return Err(Error::Contract("moving average needs at least one coefficient".into()));
        }
        let sampler = GaussianFieldSampler::new(spec.innovation, lattice.n_x + 1, lattice.n_y + 1, lattice.spacing)?;
        Ok(Self {
            thetas: spec.thetas.clone(),
            lattice: *lattice,
            sampler,
        })
    }

    pub fn innovations<R: Rng + ?Sized>(&self, rng: &mut R) -> PaddedGrid {
        let e = self.sampler.sample(rng);
        let mut grid = PaddedGrid::zeros(&self.lattice, 1);
        let w = self.lattice.n_x + 1;
        for (k, v) in e.into_iter().enumerate() {
            grid.set((k % w) as isize, (k / w) as isize, v);
        }
        grid
    }

    pub fn simulate<R: Rng + ?Sized>(&self, rng: &mut R) -> LatticeField {
        let grid = self.innovations(rng);
        moving_average_from_innovations(&self.thetas, &grid, &self.lattice).expect("grid built for this lattice")
    }
}

pub fn simulate_moving_average<R: Rng + ?Sized>(
    spec: &MovingAverageSpec,
    lattice: &LatticeSpec,
    rng: &mut R,
) -> Result<LatticeField> {
    Ok(MovingAverageSimulator::new(spec, lattice)?.simulate(rng))
}

/// `X_l(s) = μ_l + σ_l Σ_t k_l(s − t) ω(t)` with a shared innovation field ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelConvolutionSpec {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub kernels: Vec<LatticeKernel>,
    pub innovation: InnovationCorrelation,
}

impl KernelConvolutionSpec {
    pub fn validate(&self) -> Result<()> {
        let p = self.kernels.len();
        if p == 0 || self.means.len() != p || self.sds.len() != p {
            return Err(Error::Contract(
                "means, sds and kernels must have the same positive length".into(),
            ));
        }
        if self.sds.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::Contract("standard deviations must be positive".into()));
        }
        if self.means.iter().any(|m| !m.is_finite()) {
            return Err(Error::Contract("means must be finite".into()));
        }
        Ok(())
    }

    pub fn radius(&self) -> usize {
        self.kernels.iter().map(LatticeKernel::radius).max().unwrap_or(0)
    }
}

/// Applies the kernel-convolution model to given innovations.
pub fn kernel_convolution_from_innovations(
    spec: &KernelConvolutionSpec,
    innovations: &PaddedGrid,
    lattice: &LatticeSpec,
) -> Result<LatticeField> {
    spec.validate()?;
    let mut values = Vec::with_capacity(spec.kernels.len() * lattice.n_sites());
    for ((kernel, &mu), &sd) in spec.kernels.iter().zip(&spec.means).zip(&spec.sds) {
        values.extend(convolve(kernel, innovations, lattice)?.into_iter().map(|v| mu + sd * v));
    }
    LatticeField::new(*lattice, spec.kernels.len(), values)
}

pub fn simulate_kernel_convolution<R: Rng + ?Sized>(
    spec: &KernelConvolutionSpec,
    lattice: &LatticeSpec,
    rng: &mut R,
) -> Result<LatticeField> {
    spec.validate()?;
    let pad = spec.radius();
    let sampler = GaussianFieldSampler::new(
        spec.innovation,
        lattice.n_x + 2 * pad,
        lattice.n_y + 2 * pad,
        lattice.spacing,
    )?;
    let grid = PaddedGrid::from_values(lattice, pad, sampler.sample(rng))?;
    kernel_convolution_from_innovations(spec, &grid, lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lattice(n: usize) -> LatticeSpec {
        LatticeSpec::unit_square(n).unwrap()
    }

    #[test]
    fn zero_theta_is_innovation() {
        let lat = lattice(5);
        let sim = MovingAverageSimulator::new(
            &MovingAverageSpec {
                thetas: vec![0.0, 0.0],
                innovation: InnovationCorrelation::exponential(0.1),
            },
            &lat,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = sim.innovations(&mut rng);
        let x = moving_average_from_innovations(&[0.0, 0.0], &grid, &lat).unwrap();
        for iy in 0..5 {
            for ix in 0..5 {
                let e = grid.get(ix as isize, iy as isize);
                assert_eq!(x.get(0, lat.site(ix, iy)), e);
                assert_eq!(x.get(1, lat.site(ix, iy)), e);
            }
        }
    }

    #[test]
    fn impulse_response() {
        let lat = lattice(5);
        let mut grid = PaddedGrid::zeros(&lat, 1);
        grid.set(2, 2, 1.0);
        let x = moving_average_from_innovations(&[0.2], &grid, &lat).unwrap();
        for iy in 0..5 {
            for ix in 0..5 {
                let want = match (ix, iy) {
                    (2, 2) => 1.0,
                    (1, 2) | (3, 2) | (2, 1) | (2, 3) => 0.2,
                    _ => 0.0,
                };
                assert_eq!(x.get(0, lat.site(ix, iy)), want);
            }
        }
    }

    #[test]
    fn boundary_ring_is_zero_low_and_simulated_high() {
        let lat = lattice(4);
        let sim = MovingAverageSimulator::new(
            &MovingAverageSpec {
                thetas: vec![0.2],
                innovation: InnovationCorrelation::White,
            },
            &lat,
        )
        .unwrap();
        let grid = sim.innovations(&mut ChaCha8Rng::seed_from_u64(1));
        for k in -1..=4 {
            assert_eq!(grid.get(-1, k), 0.0);
            assert_eq!(grid.get(k, -1), 0.0);
        }
        assert!((0..4).all(|k| grid.get(4, k) != 0.0 && grid.get(k, 4) != 0.0));
    }

    #[test]
    fn rook_kernel_reproduces_moving_average() {
        let lat = lattice(6);
        let sim = MovingAverageSimulator::new(
            &MovingAverageSpec {
                thetas: vec![0.2, -0.2],
                innovation: InnovationCorrelation::exponential(0.05),
            },
            &lat,
        )
        .unwrap();
        let grid = sim.innovations(&mut ChaCha8Rng::seed_from_u64(11));
        let ma = moving_average_from_innovations(&[0.2, -0.2], &grid, &lat).unwrap();
        let kc = KernelConvolutionSpec {
            means: vec![0.0, 0.0],
            sds: vec![1.0, 1.0],
            kernels: vec![LatticeKernel::rook(0.2), LatticeKernel::rook(-0.2)],
            innovation: InnovationCorrelation::exponential(0.05),
        };
        let x = kernel_convolution_from_innovations(&kc, &grid, &lat).unwrap();
        assert_eq!(ma, x);
    }

    #[test]
    fn point_kernel_is_innovation() {
        let lat = lattice(4);
        let spec = KernelConvolutionSpec {
            means: vec![0.0],
            sds: vec![1.0],
            kernels: vec![LatticeKernel::point()],
            innovation: InnovationCorrelation::White,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = simulate_kernel_convolution(&spec, &lat, &mut rng).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let omega = GaussianFieldSampler::new(InnovationCorrelation::White, 4, 4, lat.spacing)
            .unwrap()
            .sample(&mut rng);
        assert_eq!(x.values(), omega.as_slice());
    }

    #[test]
    fn moving_average_reproducible() {
        let lat = lattice(7);
        let spec = MovingAverageSpec {
            thetas: vec![0.2, -0.2],
            innovation: InnovationCorrelation::exponential(0.1),
        };
        let a = simulate_moving_average(&spec, &lat, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = simulate_moving_average(&spec, &lat, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
        let c = simulate_moving_average(&spec, &lat, &mut ChaCha8Rng::seed_from_u64(43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn kernel_validation() {
        assert!(LatticeKernel::new(vec![(0, 0, 0.5)]).is_err());
        assert!(LatticeKernel::new(vec![(1, 0, 1.0)]).is_err());
        assert!(LatticeKernel::new(vec![(0, 0, 1.0), (0, 0, 1.0)]).is_err());
        assert_eq!(LatticeKernel::new(vec![(0, 0, 1.0), (2, -3, 0.1)]).unwrap().radius(), 3);
        let spec = MovingAverageSpec {
            thetas: vec![0.2, 0.3, -0.26],
            innovation: InnovationCorrelation::White,
        };
        assert_eq!(spec.non_invertible(), vec![1, 2]);
    }
}
