use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::kernel::{curvatures, fundamental_forms, weingarten_residual, Surface, WeingartenCoeffs};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Obj,
    Csv,
}

impl std::str::FromStr for MeshFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "obj" => Ok(MeshFormat::Obj),
            "csv" => Ok(MeshFormat::Csv),
            _ => Err(Error::Config(format!("unknown mesh format `{s}` (expected obj or csv)"))),
        }
    }
}

pub const CSV_HEADER: &str = "u,v,x1,x2,x3,E,F,G,W,H,K,residual";

/// Write the `nu × nv` node grid of `surface`. OBJ vertices run over `v`
/// fastest; each grid cell becomes two triangles.
pub fn write_mesh<W: Write>(
    surface: &Surface,
    wc: Option<&WeingartenCoeffs>,
    nu: usize,
    nv: usize,
    format: MeshFormat,
    out: &mut W,
) -> Result<()> {
    if nu < 2 || nv < 2 {
        return Err(Error::invalid(format!("mesh grid {nu}×{nv} is smaller than 2×2")));
    }
    let d = surface.domain();
    d.validate()?;
    let nodes = d.grid(nu, nv);
    match format {
        MeshFormat::Obj => {
            for &(u, v) in &nodes {
                let p = surface.point(u, v)?;
                writeln!(out, "v {} {} {}", p.x1, p.x2, p.x3)?;
            }
            for i in 0..nu - 1 {
                for j in 0..nv - 1 {
                    let k = i * nv + j + 1;
                    writeln!(out, "f {} {} {}", k, k + nv, k + nv + 1)?;
                    writeln!(out, "f {} {} {}", k, k + nv + 1, k + 1)?;
                }
            }
        }
        MeshFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for &(u, v) in &nodes {
                let jet = surface.eval(u, v)?;
                let p = jet.point();
                let (e, f, g, w, h, k, res) = match fundamental_forms(&jet) {
                    Ok(ff) => {
                        let cp = curvatures(&jet)?;
                        let res = wc.map_or(f64::NAN, |wc| weingarten_residual(&cp, wc));
                        (ff.E, ff.F, ff.G, ff.W, cp.H, cp.K, res)
                    }
                    Err(Error::Degenerate { .. }) => {
                        let nan = f64::NAN;
                        (nan, nan, nan, nan, nan, nan, nan)
                    }
                    Err(e) => return Err(e),
                };
                writeln!(out, "{u},{v},{},{},{},{e},{f},{g},{w},{h},{k},{res}", p.x1, p.x2, p.x3)?;
            }
        }
    }
    Ok(())
}

pub fn export_mesh(
    surface: &Surface,
    wc: Option<&WeingartenCoeffs>,
    nu: usize,
    nv: usize,
    path: &Path,
    format: MeshFormat,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mesh(surface, wc, nu, nv, format, &mut w)?;
    w.flush()?;
    Ok(())
}
