//! Rasterized figure data: the Colop(3) region on the torus square and
//! slices of the 3x3 determinant coamoeba (the set of phase matrices with
//! nonmaximal rank) over free angle slots.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::matrix::PhaseMatrix;
use crate::rank3::decide_rank3;
use crate::scaling::colop3_region_membership;

/// Membership raster of Colop(3) (first coordinate normalized to 1) over
/// `[0, 2pi)^2`, row-major with `u` as the row axis; sampled at cell
/// centers.
pub fn colop_region_raster(resolution: usize) -> Result<Vec<bool>> {
    if resolution < 8 {
        return Err(Error::Domain("raster resolution must be at least 8".into()));
    }
    let h = TAU / resolution as f64;
    Ok(map_indexed(resolution * resolution, |idx| {
        let u = ((idx / resolution) as f64 + 0.5) * h;
        let v = ((idx % resolution) as f64 + 0.5) * h;
        colop3_region_membership(Angle::new(u), Angle::new(v))
    }))
}

/// A 3x3 phase matrix with up to three entries left free; the free slots
/// are swept by the slice raster. Written in the inline grammar with `t1`,
/// `t2`, `t3` marking the free entries.
#[derive(Debug, Clone)]
pub struct SliceTemplate {
    base: PhaseMatrix,
    slots: Vec<(usize, usize)>,
}

impl SliceTemplate {
    pub fn new(base: PhaseMatrix, slots: Vec<(usize, usize)>) -> Result<Self> {
        if base.rows() != 3 || base.cols() != 3 {
            return Err(Error::Domain("slice template must be 3x3".into()));
        }
        if slots.len() > 3 {
            return Err(Error::Domain("at most three free slots".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &(i, j) in &slots {
            if i >= 3 || j >= 3 || !seen.insert((i, j)) {
                return Err(Error::Domain("free slots must be distinct entries of the 3x3 grid".into()));
            }
        }
        Ok(SliceTemplate { base, slots })
    }

    /// Parse from the inline grammar with `t1`/`t2`/`t3` free markers:
    /// `"1,1,1;1,t1,t2;1,t3,e^{ipi/3}"`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut slots: Vec<Option<(usize, usize)>> = vec![None; 3];
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, row) in text.split(';').enumerate() {
            let mut out = Vec::new();
            for (j, cell) in row.split(',').enumerate() {
                match cell.trim() {
                    t @ ("t1" | "t2" | "t3") => {
                        let k = (t.as_bytes()[1] - b'1') as usize;
                        if slots[k].is_some() {
                            return Err(Error::Parse(format!("free slot {t} used twice")));
                        }
                        slots[k] = Some((i, j));
                        out.push(0.0);
                    }
                    _ => {
                        let m = crate::io::parse_inline_matrix(cell)?;
                        out.push(m.angle(0, 0).value());
                    }
                }
            }
            rows.push(out);
        }
        let base = PhaseMatrix::from_radians(&rows)?;
        let used: Vec<(usize, usize)> = slots.iter().flatten().copied().collect();
        if slots.iter().enumerate().any(|(k, s)| s.is_none() && slots[k + 1..].iter().any(|l| l.is_some())) {
            return Err(Error::Parse("free slots must be used in order t1, t2, t3".into()));
        }
        SliceTemplate::new(base, used)
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Fill the free slots with the given angles.
    pub fn instantiate(&self, angles: &[f64]) -> PhaseMatrix {
        let mut m = self.base.clone();
        for (&(i, j), &a) in self.slots.iter().zip(angles) {
            m.set_angle(i, j, Angle::new(a));
        }
        m
    }
}

/// Raster of a determinant-coamoeba slice: `true` cells are matrices of
/// nonmaximal (below 3) phase rank.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SliceRaster {
    pub resolution: usize,
    /// Number of swept axes (0-3).
    pub axes: usize,
    /// Membership, layer-major then row-major: index
    /// `((layer * res) + row) * res + col` for 3 axes, `row * res + col`
    /// for 2, a single entry for 0 axes.
    pub membership: Vec<bool>,
}

/// Sweep the free slots of a 3x3 template over the torus and decide the
/// rank at every grid point.
pub fn coamoeba_slice(template: &SliceTemplate, resolution: usize) -> Result<SliceRaster> {
    let axes = template.slot_count();
    if axes == 1 {
        return Err(Error::Domain("slice needs zero, two, or three free slots".into()));
    }
    if axes >= 2 && resolution < 8 {
        return Err(Error::Domain("slice resolution must be at least 8".into()));
    }
    let h = TAU / resolution as f64;
    let total = resolution.pow(axes as u32);
    let membership = map_indexed(total.max(1), |idx| {
        let mut angles = [0.0f64; 3];
        let mut rest = idx;
        for k in (0..axes).rev() {
            angles[k] = ((rest % resolution) as f64 + 0.5) * h;
            rest /= resolution;
        }
        let m = template.instantiate(&angles[..axes]);
        match decide_rank3(&m) {
            Ok(d) => d.rank < 3,
            Err(_) => false,
        }
    });
    Ok(SliceRaster {
        resolution,
        axes,
        membership,
    })
}
