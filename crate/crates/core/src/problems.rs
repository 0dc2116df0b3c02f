//! Manufactured solutions, boundary configurations and data noise.

use rand::distr::Open01;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{BoundarySegmentSpec, Point, Side};

/// A closed-form solution `u` together with its gradient and Laplacian.
#[derive(Debug, Clone, Copy)]
pub struct ManufacturedSolution {
    pub name: &'static str,
    pub u: fn(Point) -> f64,
    pub grad: fn(Point) -> Point,
    /// The source term `f = Δu`.
    pub laplacian: fn(Point) -> f64,
}

impl ManufacturedSolution {
    pub fn value(&self, p: Point) -> f64 {
        (self.u)(p)
    }

    pub fn gradient(&self, p: Point) -> Point {
        (self.grad)(p)
    }

    pub fn source(&self, p: Point) -> f64 {
        (self.laplacian)(p)
    }

    /// Normal derivative `∇u·n`.
    pub fn flux(&self, p: Point, n: Point) -> f64 {
        let g = self.gradient(p);
        g[0] * n[0] + g[1] * n[1]
    }

    pub fn by_name(name: &str) -> Result<Self> {
        catalog()
            .into_iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::UnknownProblem(name.to_string()))
    }
}

pub const QUAD: ManufacturedSolution = ManufacturedSolution {
    name: "quad",
    u: |[x, y]| x * x + y * y - 10.0 * x * y,
    grad: |[x, y]| [2.0 * x - 10.0 * y, 2.0 * y - 10.0 * x],
    laplacian: |_| 4.0,
};

pub const SINSIN: ManufacturedSolution = ManufacturedSolution {
    name: "sinsin",
    u: |[x, y]| x.sin() * y.sin(),
    grad: |[x, y]| [x.cos() * y.sin(), x.sin() * y.cos()],
    laplacian: |[x, y]| -2.0 * x.sin() * y.sin(),
};

pub const COSCOS: ManufacturedSolution = ManufacturedSolution {
    name: "coscos",
    u: |[x, y]| x.cos() * y.cos(),
    grad: |[x, y]| [-x.sin() * y.cos(), -x.cos() * y.sin()],
    laplacian: |[x, y]| -2.0 * x.cos() * y.cos(),
};

pub const BUBBLE: ManufacturedSolution = ManufacturedSolution {
    name: "bubble",
    u: |[x, y]| 30.0 * x * y * (1.0 - x) * (1.0 - y),
    grad: |[x, y]| [30.0 * (1.0 - 2.0 * x) * y * (1.0 - y), 30.0 * x * (1.0 - x) * (1.0 - 2.0 * y)],
    laplacian: |[x, y]| 60.0 * (y * y - y) + 60.0 * (x * x - x),
};

pub fn catalog() -> [ManufacturedSolution; 4] {
    [QUAD, SINSIN, COSCOS, BUBBLE]
}

/// A named set of boundary segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseConfig {
    pub name: String,
    pub segments: Vec<BoundarySegmentSpec>,
}

impl CaseConfig {
    pub fn by_name(name: &str) -> Result<Self> {
        case_configs()
            .into_iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCase(name.to_string()))
    }
}

pub const CASE_NAMES: [&str; 6] = ["case1", "case2", "case3", "case4", "case5", "figures"];

pub fn case_configs() -> Vec<CaseConfig> {
    use BoundarySegmentSpec as S;
    let case = |name: &str, segments: Vec<BoundarySegmentSpec>| CaseConfig { name: name.to_string(), segments };
    vec![
        case(
            "case1",
            vec![
                S::whole(Side::Bottom, true, true),
                S::whole(Side::Right, true, true),
                S::whole(Side::Left, true, false),
                S::whole(Side::Top, false, true),
            ],
        ),
        case(
            "case2",
            vec![
                S::whole(Side::Bottom, true, false),
                S::whole(Side::Left, true, false),
                S::whole(Side::Right, false, true),
                S::whole(Side::Top, false, true),
            ],
        ),
        case(
            "case3",
            vec![S::whole(Side::Bottom, true, true), S::whole(Side::Left, true, false), S::whole(Side::Top, false, true)],
        ),
        case("case4", vec![S::whole(Side::Left, true, true), S::whole(Side::Right, true, true)]),
        case("case5", vec![S::whole(Side::Bottom, true, true)]),
        case("figures", vec![S::partial(Side::Bottom, 0.0, 0.5, true, true)]),
    ]
}

pub const DEFAULT_SEED: u64 = 42;

/// Perturbation `a (0.5 − r)` of boundary data, `r` uniform in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub amplitude: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(amplitude: f64, seed: u64) -> Result<Self> {
        if !(amplitude >= 0.0) || !amplitude.is_finite() {
            return Err(Error::InvalidArgument(format!("noise amplitude must be finite and >= 0, got {amplitude}")));
        }
        Ok(Self { amplitude, seed })
    }

    pub fn none() -> Self {
        Self { amplitude: 0.0, seed: DEFAULT_SEED }
    }

    pub fn stream(&self) -> NoiseStream {
        NoiseStream { amplitude: self.amplitude, rng: SplitMix64::seed_from_u64(self.seed) }
    }
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self::none()
    }
}

/// Sequential source of perturbations (SplitMix64).
#[derive(Debug, Clone)]
pub struct NoiseStream {
    amplitude: f64,
    rng: SplitMix64,
}

impl NoiseStream {
    /// Perturb one sample. With zero amplitude the value is returned
    /// unchanged (a draw is still consumed so the sequence does not depend on it).
    pub fn perturb(&mut self, value: f64) -> f64 {
        let r: f64 = self.rng.sample(Open01);
        if self.amplitude == 0.0 {
            value
        } else {
            value + self.amplitude * (0.5 - r)
        }
    }
}

/// Perturb a slice of samples in order.
pub fn perturb(samples: &[f64], spec: &NoiseSpec) -> Vec<f64> {
    let mut stream = spec.stream();
    samples.iter().map(|&v| stream.perturb(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn points() -> Vec<Point> {
        let mut rng = SplitMix64::seed_from_u64(3);
        (0..25).map(|_| [rng.random::<f64>(), rng.random::<f64>()]).collect()
    }

    #[test]
    fn laplacians_match_finite_differences() {
        let h = 1e-4;
        for s in catalog() {
            for p in points() {
                let u = |dx: f64, dy: f64| s.value([p[0] + dx, p[1] + dy]);
                let fd = (u(h, 0.0) + u(-h, 0.0) + u(0.0, h) + u(0.0, -h) - 4.0 * u(0.0, 0.0)) / (h * h);
                assert!((fd - s.source(p)).abs() < 1e-6 * (1.0 + s.source(p).abs()), "{}", s.name);
                let gx = (u(h, 0.0) - u(-h, 0.0)) / (2.0 * h);
                let gy = (u(0.0, h) - u(0.0, -h)) / (2.0 * h);
                let g = s.gradient(p);
                assert!((gx - g[0]).abs() < 1e-6 && (gy - g[1]).abs() < 1e-6, "{}", s.name);
            }
        }
    }

    #[test]
    fn bubble_source_expanded() {
        for [x, y] in points() {
            let expected = 60.0 * y * (y - 1.0) + 60.0 * x * (x - 1.0);
            assert!((BUBBLE.source([x, y]) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn lookup() {
        assert_eq!(ManufacturedSolution::by_name("coscos").unwrap().name, "coscos");
        assert!(matches!(ManufacturedSolution::by_name("cubic"), Err(Error::UnknownProblem(_))));
        for name in CASE_NAMES {
            assert_eq!(CaseConfig::by_name(name).unwrap().name, name);
        }
        assert!(CaseConfig::by_name("case6").is_err());
    }

    #[test]
    fn case_flags() {
        let c2 = CaseConfig::by_name("case2").unwrap();
        assert!(c2.segments.iter().all(|s| !(s.dirichlet && s.neumann)));
        let c5 = CaseConfig::by_name("case5").unwrap();
        assert_eq!(c5.segments.len(), 1);
        assert_eq!(c5.segments[0].side, Side::Bottom);
        let c4 = CaseConfig::by_name("case4").unwrap();
        assert!(c4.segments.iter().all(|s| matches!(s.side, Side::Left | Side::Right)));
    }

    #[test]
    fn noise_properties() {
        let data: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
        let clean = perturb(&data, &NoiseSpec::new(0.0, 9).unwrap());
        assert_eq!(clean, data);
        let spec = NoiseSpec::new(0.005, 9).unwrap();
        let a = perturb(&data, &spec);
        assert_eq!(a, perturb(&data, &spec));
        assert!(a.iter().zip(&data).all(|(p, d)| (p - d).abs() < 0.0025));
        assert!(a.iter().zip(&data).any(|(p, d)| p != d));
        assert_ne!(a, perturb(&data, &NoiseSpec::new(0.005, 10).unwrap()));
        assert!(NoiseSpec::new(-1.0, 0).is_err());
    }
}
