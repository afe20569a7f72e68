//! Explicit extremal Lipschitz extensions and Lipschitz constants.
//!
//! For boundary data `F` and a slope `lambda`, the two extremal extensions
//! with Lipschitz constant `lambda` are evaluated directly from their
//! formulas:
//!
//! - upper (McShane):  `inf over boundary z of  F(z) + lambda * |x - z|`
//! - lower (Whitney):  `sup over boundary z of  F(z) - lambda * |x - z|`
//!
//! Both are evaluated at every non-exterior node, including boundary nodes,
//! where the raw formula value is kept rather than overwritten with `F`:
//! when `lambda` is below the least Lipschitz constant of `F` the formulas
//! no longer attain the boundary values, and that gap is part of what the
//! verification module measures.
//!
//! Evaluation is brute force over all boundary nodes per node. That is the
//! point: these fields double as the correctness oracle for the iterative
//! schemes, so they must stay simple.

use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{BoundaryData, GridDomain, ScalarField};
use crate::{Error, Result};

/// Slope parameter of the extremal extensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtensionParams {
    lambda: f64,
}

impl ExtensionParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidConfig("lambda must be nonnegative".into()));
        }
        Ok(ExtensionParams { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Least Lipschitz constant of the boundary data: the max of
/// `|F(x) - F(y)| / |x - y|` over all boundary node pairs.
pub fn lipschitz_constant_boundary(data: &BoundaryData) -> Result<f64> {
    let domain = data.domain();
    let boundary = domain.boundary();
    if boundary.len() < 2 {
        return Err(Error::InvalidConfig(
            "need at least 2 boundary nodes for a Lipschitz constant".into(),
        ));
    }
    let mut best = 0.0f64;
    for a in 0..boundary.len() {
        for b in (a + 1)..boundary.len() {
            let d = domain.distance(boundary[a] as usize, boundary[b] as usize);
            let slope = (data.value(a) - data.value(b)).abs() / d;
            if slope > best {
                best = slope;
            }
        }
    }
    Ok(best)
}

/// Upper extremal extension: at every non-exterior node, the min over
/// boundary nodes of `F(z) + lambda * |x - z|`.
pub fn mcshane_extension(data: &BoundaryData, params: ExtensionParams) -> ScalarField {
    let domain = data.domain();
    let lambda = params.lambda();
    let mut field = ScalarField::zeros(domain);
    for id in domain.non_exterior() {
        let mut best = f64::INFINITY;
        for (zid, fz) in data.iter() {
            let v = fz + lambda * domain.distance(id, zid);
            if v < best {
                best = v;
            }
        }
        field.set(id, best);
    }
    field
}

/// Lower extremal extension: at every non-exterior node, the max over
/// boundary nodes of `F(z) - lambda * |x - z|`.
pub fn whitney_extension(data: &BoundaryData, params: ExtensionParams) -> ScalarField {
    let domain = data.domain();
    let lambda = params.lambda();
    let mut field = ScalarField::zeros(domain);
    for id in domain.non_exterior() {
        let mut best = f64::NEG_INFINITY;
        for (zid, fz) in data.iter() {
            let v = fz - lambda * domain.distance(id, zid);
            if v > best {
                best = v;
            }
        }
        field.set(id, best);
    }
    field
}

/// How [`lipschitz_constant_field`] enumerates node pairs. The exhaustive
/// scan is quadratic in the node count and meant for desk-scale fields;
/// `Sampled` caps the work at a fixed number of random pairs.
#[derive(Clone, Copy, Debug)]
pub enum PairSampling {
    Exhaustive,
    Sampled { max_pairs: usize, seed: u64 },
}

/// Largest difference quotient `|u(x) - u(y)| / |x - y|` over non-exterior
/// node pairs.
pub fn lipschitz_constant_field(u: &ScalarField) -> f64 {
    lipschitz_constant_field_with(u, PairSampling::Exhaustive)
}

pub fn lipschitz_constant_field_with(u: &ScalarField, sampling: PairSampling) -> f64 {
    let domain = u.domain();
    let nodes: Vec<usize> = domain.non_exterior().collect();
    assert!(nodes.len() >= 2, "need at least 2 nodes for a Lipschitz constant");
    let total_pairs = nodes.len() * (nodes.len() - 1) / 2;
    let mut best = 0.0f64;
    match sampling {
        PairSampling::Sampled { max_pairs, seed } if max_pairs < total_pairs => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut done = 0;
            while done < max_pairs {
                let a = nodes[rng.gen_range(0..nodes.len())];
                let b = nodes[rng.gen_range(0..nodes.len())];
                if a == b {
                    continue;
                }
                let slope = (u.value(a) - u.value(b)).abs() / domain.distance(a, b);
                if slope > best {
                    best = slope;
                }
                done += 1;
            }
        }
        _ => {
            for (k, &a) in nodes.iter().enumerate() {
                for &b in &nodes[k + 1..] {
                    let slope = (u.value(a) - u.value(b)).abs() / domain.distance(a, b);
                    if slope > best {
                        best = slope;
                    }
                }
            }
        }
    }
    best
}

/// Built-in boundary data families.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryPreset {
    /// `F = 0`.
    Zero,
    /// `F = c`.
    Const(f64),
    /// 1-D only: `F(0) = a`, `F(1) = b` (affine in `x`).
    Linear { a: f64, b: f64 },
    /// 2-D only: `F(x, y) = x + y`.
    Xy,
    /// `F = sin(2 pi k x)` in 1-D, `sin(2 pi k x) + y` in 2-D.
    Sine { k: f64 },
    /// Distance cone `F(z) = |z - center|`.
    Cone { center: [f64; 2] },
}

impl BoundaryPreset {
    pub fn evaluate(&self, domain: &Arc<GridDomain>) -> Result<BoundaryData> {
        match self {
            BoundaryPreset::Zero => Ok(BoundaryData::from_coord_fn(domain, |_| 0.0)),
            BoundaryPreset::Const(c) => {
                let c = *c;
                Ok(BoundaryData::from_coord_fn(domain, move |_| c))
            }
            BoundaryPreset::Linear { a, b } => {
                if domain.dim() != 1 {
                    return Err(Error::InvalidConfig(
                        "the linear preset is restricted to 1-D domains".into(),
                    ));
                }
                let (a, b) = (*a, *b);
                Ok(BoundaryData::from_coord_fn(domain, move |c| {
                    a + (b - a) * c[0]
                }))
            }
            BoundaryPreset::Xy => {
                if domain.dim() != 2 {
                    return Err(Error::InvalidConfig(
                        "the xy preset is restricted to 2-D domains".into(),
                    ));
                }
                Ok(BoundaryData::from_coord_fn(domain, |c| c[0] + c[1]))
            }
            BoundaryPreset::Sine { k } => {
                let k = *k;
                let two_d = domain.dim() == 2;
                Ok(BoundaryData::from_coord_fn(domain, move |c| {
                    let base = (2.0 * std::f64::consts::PI * k * c[0]).sin();
                    if two_d {
                        base + c[1]
                    } else {
                        base
                    }
                }))
            }
            BoundaryPreset::Cone { center } => {
                let z0 = *center;
                Ok(BoundaryData::from_coord_fn(domain, move |c| {
                    let dx = c[0] - z0[0];
                    let dy = c[1] - z0[1];
                    (dx * dx + dy * dy).sqrt()
                }))
            }
        }
    }
}

impl FromStr for BoundaryPreset {
    type Err = Error;

    /// Parses `zero`, `const:c`, `linear:a,b`, `xy`, `sine:k`, `cone:x[,y]`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidConfig(msg);
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let parse_f64 = |tok: &str| -> Result<f64> {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("expected a number, got {:?}", tok)))
        };
        match (name, args) {
            ("zero", None) => Ok(BoundaryPreset::Zero),
            ("xy", None) => Ok(BoundaryPreset::Xy),
            ("const", Some(a)) => Ok(BoundaryPreset::Const(parse_f64(a)?)),
            ("sine", Some(a)) => Ok(BoundaryPreset::Sine { k: parse_f64(a)? }),
            ("linear", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                if parts.len() != 2 {
                    return Err(bad(format!("linear preset needs a,b, got {:?}", a)));
                }
                Ok(BoundaryPreset::Linear {
                    a: parse_f64(parts[0])?,
                    b: parse_f64(parts[1])?,
                })
            }
            ("cone", Some(a)) => {
                let parts: Vec<&str> = a.split(',').collect();
                match parts.len() {
                    1 => Ok(BoundaryPreset::Cone {
                        center: [parse_f64(parts[0])?, 0.0],
                    }),
                    2 => Ok(BoundaryPreset::Cone {
                        center: [parse_f64(parts[0])?, parse_f64(parts[1])?],
                    }),
                    _ => Err(bad(format!("cone preset needs x or x,y, got {:?}", a))),
                }
            }
            _ => Err(bad(format!("unknown boundary data preset {:?}", s))),
        }
    }
}
