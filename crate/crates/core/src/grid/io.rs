//! Field dumps.
//!
//! Binary layout (little-endian): magic `MFGB`, `u32` dimension, `u32` points
//! per axis, `u32` component count, then `f64` values. Components are stored
//! one after another, each in row-major node order. Trajectories are written
//! with their time slices as consecutive component blocks (slice-major, then
//! component).

use std::io::{Read, Write};

use super::field::{FieldTrajectory, MultiField, ScalarField, Trajectory};
use super::spec::GridSpec;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"MFGB";

/// Header and payload of a binary dump.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDump {
    pub dim: u32,
    pub n: u32,
    pub components: Vec<Vec<f64>>,
}

impl FieldDump {
    pub fn from_scalar(f: &ScalarField) -> Self {
        Self::from_components(f.grid(), std::iter::once(f))
    }

    pub fn from_multi(f: &MultiField) -> Self {
        Self::from_components(f.grid(), f.components().iter())
    }

    pub fn from_density_trajectory(t: &Trajectory<ScalarField>) -> Self {
        Self::from_components(t.grid(), t.slices().iter())
    }

    pub fn from_field_trajectory(t: &FieldTrajectory) -> Self {
        Self::from_components(t.grid(), t.slices().iter().flat_map(|s| s.components().iter()))
    }

    fn from_components<'a>(grid: &GridSpec, comps: impl Iterator<Item = &'a ScalarField>) -> Self {
        Self {
            dim: grid.dim as u32,
            n: grid.n as u32,
            components: comps.map(|c| c.values().to_vec()).collect(),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&self.dim.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&(self.components.len() as u32).to_le_bytes())?;
        for c in &self.components {
            for v in c {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Config(format!("bad field dump magic {magic:?}")));
        }
        let mut word = [0u8; 4];
        let mut read_u32 = |r: &mut R| -> Result<u32> {
            r.read_exact(&mut word)?;
            Ok(u32::from_le_bytes(word))
        };
        let dim = read_u32(&mut r)?;
        let n = read_u32(&mut r)?;
        let k = read_u32(&mut r)?;
        let nodes = (n as usize)
            .checked_pow(dim)
            .ok_or_else(|| Error::Config("field dump header overflows".into()))?;
        let mut buf = [0u8; 8];
        let mut components = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let mut c = Vec::with_capacity(nodes);
            for _ in 0..nodes {
                r.read_exact(&mut buf)?;
                c.push(f64::from_le_bytes(buf));
            }
            components.push(c);
        }
        Ok(Self { dim, n, components })
    }

    /// Interprets the dump as a single scalar field on `grid`.
    pub fn into_scalar(mut self, grid: GridSpec) -> Result<ScalarField> {
        if self.dim as usize != grid.dim || self.n as usize != grid.n || self.components.len() != 1 {
            return Err(Error::shape(format!(
                "dump has d={}, n={}, k={}; expected a single component on d={}, n={}",
                self.dim,
                self.n,
                self.components.len(),
                grid.dim,
                grid.n
            )));
        }
        ScalarField::new(grid, self.components.pop().unwrap())
    }
}

/// CSV with one row per node: `x_1..x_d, value_1..value_k`.
pub fn write_csv<W: Write>(mut w: W, grid: &GridSpec, components: &[&[f64]]) -> Result<()> {
    let mut header: Vec<String> = (1..=grid.dim).map(|k| format!("x_{k}")).collect();
    header.extend((1..=components.len()).map(|k| format!("value_{k}")));
    writeln!(w, "{}", header.join(","))?;
    for p in 0..grid.nodes() {
        let x = grid.coords(p);
        let mut row: Vec<String> = x[..grid.dim].iter().map(|v| v.to_string()).collect();
        row.extend(components.iter().map(|c| c[p].to_string()));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
