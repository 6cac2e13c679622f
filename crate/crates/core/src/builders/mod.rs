//! Triangulations of model surfaces: hyperbolic disks, flat cylinders,
//! funnels, cusps, pairs of pants, pants trees and disks with holes.
//!
//! Edge lengths are the exact geodesic distances of the model metric between
//! the two endpoints, so every triangle is a flat triangle with the same side
//! lengths as the corresponding geodesic triangle.

mod holes;
mod pants;
mod rings;

use std::collections::BTreeMap;

use serde::Serialize;

pub use holes::{mark_surrounding_curve, Hole, SurroundingCurve};
pub use pants::hexagon_opposite_sides;

use crate::error::{Error, Result};
use crate::mesh::TriMesh;

/// Surface to build; every variant carries its resolution `h`, the maximum edge length.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BuildSpec {
    HyperbolicDisk {
        radius: f64,
        h: f64,
    },
    FlatCylinder {
        circumference: f64,
        height: f64,
        h: f64,
    },
    Funnel {
        boundary_length: f64,
        t_max: f64,
        h: f64,
    },
    Cusp {
        boundary_length: f64,
        t_max: f64,
        h: f64,
    },
    Ypiece {
        lengths: [f64; 3],
        h: f64,
    },
    PantsTree {
        depth: u32,
        l: f64,
        h: f64,
    },
    DiskMinusDisks {
        radius: f64,
        holes: Vec<Hole>,
        remove: bool,
        h: f64,
    },
}

fn get<T: std::str::FromStr>(kv: &BTreeMap<String, String>, key: &str, default: Option<T>) -> Result<T> {
    match kv.get(key) {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("invalid value `{v}` for `{key}`"))),
        None => default.ok_or_else(|| Error::Parameter(format!("missing key `{key}`"))),
    }
}

fn parse_floats(s: &str, key: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parameter(format!("invalid number `{t}` in `{key}`")))
        })
        .collect()
}

impl BuildSpec {
    /// Parses a block of `key = value` pairs. Holes are written as
    /// `holes = r theta radius; r theta radius; ...`.
    pub fn from_pairs(kv: &BTreeMap<String, String>) -> Result<Self> {
        let kind = kv
            .get("kind")
            .ok_or_else(|| Error::Parameter("missing key `kind`".into()))?;
        let spec = match kind.trim() {
            "hyperbolic_disk" => Self::HyperbolicDisk {
                radius: get(kv, "radius", Some(3.0))?,
                h: get(kv, "h", Some(0.05))?,
            },
            "flat_cylinder" => Self::FlatCylinder {
                circumference: get(kv, "circumference", Some(2.0))?,
                height: get(kv, "height", Some(10.0))?,
                h: get(kv, "h", Some(0.1))?,
            },
            "funnel" => Self::Funnel {
                boundary_length: get(kv, "boundary_length", Some(1.0))?,
                t_max: get(kv, "t_max", Some(4.0))?,
                h: get(kv, "h", Some(0.1))?,
            },
            "cusp" => Self::Cusp {
                boundary_length: get(kv, "boundary_length", Some(1.0))?,
                t_max: get(kv, "t_max", Some(4.0))?,
                h: get(kv, "h", Some(0.1))?,
            },
            "ypiece" => {
                let l = parse_floats(kv.get("lengths").map_or("1 1 1", |s| s), "lengths")?;
                let lengths: [f64; 3] = l
                    .try_into()
                    .map_err(|_| Error::Parameter("`lengths` needs three values".into()))?;
                Self::Ypiece {
                    lengths,
                    h: get(kv, "h", Some(0.2))?,
                }
            }
            "pants_tree" => Self::PantsTree {
                depth: get(kv, "depth", Some(2))?,
                l: get(kv, "l", Some(1.0))?,
                h: get(kv, "h", Some(0.25))?,
            },
            "disk_minus_disks" => {
                let mut holes = Vec::new();
                if let Some(s) = kv.get("holes") {
                    for part in s.split(';').filter(|p| !p.trim().is_empty()) {
                        let v = parse_floats(part, "holes")?;
                        let [r, theta, radius] = v[..] else {
                            return Err(Error::Parameter(format!(
                                "hole `{}` needs r, theta and radius",
                                part.trim()
                            )));
                        };
                        holes.push(Hole { r, theta, radius });
                    }
                }
                Self::DiskMinusDisks {
                    radius: get(kv, "radius", Some(3.0))?,
                    holes,
                    remove: get(kv, "remove", Some(true))?,
                    h: get(kv, "h", Some(0.1))?,
                }
            }
            other => return Err(Error::Parameter(format!("unknown surface kind `{other}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn resolution(&self) -> f64 {
        match *self {
            Self::HyperbolicDisk { h, .. }
            | Self::FlatCylinder { h, .. }
            | Self::Funnel { h, .. }
            | Self::Cusp { h, .. }
            | Self::Ypiece { h, .. }
            | Self::PantsTree { h, .. }
            | Self::DiskMinusDisks { h, .. } => h,
        }
    }

    /// Same surface with every edge at most `h`.
    pub fn with_resolution(&self, h: f64) -> Self {
        let mut s = self.clone();
        match &mut s {
            Self::HyperbolicDisk { h: x, .. }
            | Self::FlatCylinder { h: x, .. }
            | Self::Funnel { h: x, .. }
            | Self::Cusp { h: x, .. }
            | Self::Ypiece { h: x, .. }
            | Self::PantsTree { h: x, .. }
            | Self::DiskMinusDisks { h: x, .. } => *x = h,
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::Build(format!("{name} must be positive, got {x}")))
            }
        };
        pos("h", self.resolution())?;
        match self {
            Self::HyperbolicDisk { radius, .. } => pos("radius", *radius),
            Self::FlatCylinder {
                circumference,
                height,
                ..
            } => pos("circumference", *circumference).and(pos("height", *height)),
            Self::Funnel {
                boundary_length,
                t_max,
                ..
            }
            | Self::Cusp {
                boundary_length,
                t_max,
                ..
            } => pos("boundary_length", *boundary_length).and(pos("t_max", *t_max)),
            Self::Ypiece { lengths, .. } => lengths.iter().try_for_each(|&l| pos("cuff length", l)),
            Self::PantsTree { l, .. } => pos("l", *l),
            Self::DiskMinusDisks { radius, .. } => pos("radius", *radius),
        }
    }
}

/// Builds the mesh described by `spec`. Every mesh carries a `base` label
/// holding the basepoint used by profile experiments.
pub fn build(spec: &BuildSpec) -> Result<TriMesh> {
    spec.validate()?;
    match *spec {
        BuildSpec::HyperbolicDisk { radius, h } => {
            let m = rings::hyperbolic_disk(radius, h)?;
            let mut labels = BTreeMap::new();
            labels.insert("base".to_string(), vec![0]);
            labels.insert("boundary".to_string(), m.rings.last().unwrap().clone());
            rings::with_labels(m.mesh, labels)
        }
        BuildSpec::FlatCylinder {
            circumference,
            height,
            h,
        } => {
            let m = rings::flat_cylinder(circumference, height, h)?;
            let mid = m
                .rings
                .iter()
                .min_by(|a, b| {
                    let da = (m.coords[a[0]].0 - height / 2.0).abs();
                    let db = (m.coords[b[0]].0 - height / 2.0).abs();
                    da.total_cmp(&db)
                })
                .unwrap();
            let mut labels = BTreeMap::new();
            labels.insert("base".to_string(), vec![mid[0]]);
            labels.insert("bottom".to_string(), m.rings[0].clone());
            labels.insert("top".to_string(), m.rings.last().unwrap().clone());
            rings::with_labels(m.mesh, labels)
        }
        BuildSpec::Funnel {
            boundary_length,
            t_max,
            h,
        } => {
            let m = rings::funnel(boundary_length, t_max, h)?;
            let mut labels = BTreeMap::new();
            labels.insert("base".to_string(), vec![m.rings[0][0]]);
            labels.insert("geodesic".to_string(), m.rings[0].clone());
            labels.insert("outer".to_string(), m.rings.last().unwrap().clone());
            rings::with_labels(m.mesh, labels)
        }
        BuildSpec::Cusp {
            boundary_length,
            t_max,
            h,
        } => {
            let m = rings::cusp(boundary_length, t_max, h)?;
            let mut labels = BTreeMap::new();
            labels.insert("base".to_string(), vec![m.rings[0][0]]);
            labels.insert("horocycle".to_string(), m.rings[0].clone());
            labels.insert("end".to_string(), m.rings.last().unwrap().clone());
            rings::with_labels(m.mesh, labels)
        }
        BuildSpec::Ypiece { lengths, h } => pants::ypiece(lengths, h)?.to_mesh(),
        BuildSpec::PantsTree { depth, l, h } => pants::pants_tree(depth, l, h),
        BuildSpec::DiskMinusDisks {
            radius,
            ref holes,
            remove,
            h,
        } => holes::disk_minus_disks(radius, holes, h, remove),
    }
}

/// Basepoint of a built mesh (the first vertex of its `base` label, or 0).
pub fn basepoint(mesh: &TriMesh) -> usize {
    mesh.label("base").and_then(|b| b.first().copied()).unwrap_or(0)
}
