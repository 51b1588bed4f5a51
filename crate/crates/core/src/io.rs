//! CSV and JSON formats for fields, meshes, charges, boundary data and
//! relaxation traces.
//!
//! | data | columns |
//! |------|---------|
//! | field | `x,y,z,value` |
//! | mesh | `cx,cy,cz,area,nx,ny,nz` and optionally `value` |
//! | charges | `x,y,z,m` |
//! | boundary values | `x,y,z,value`, one row per boundary node |
//! | trace | `step,energy,max_grad,min_boundary_distance` |
//!
//! Grid metadata is JSON ([`GridMeta`]).

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::electrostatics::ChargeSet;
use crate::relaxation::RelaxationTrace;
use crate::{Domain, Error, Grid3, NodeLabel, Panel, Result, ScalarField, SurfaceMesh, Vec3};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PointValue {
    x: f64,
    y: f64,
    z: f64,
    value: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct PanelRow {
    cx: f64,
    cy: f64,
    cz: f64,
    area: f64,
    nx: f64,
    ny: f64,
    nz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ChargeRow {
    x: f64,
    y: f64,
    z: f64,
    m: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct TraceRow {
    step: usize,
    energy: f64,
    max_grad: f64,
    min_boundary_distance: f64,
}

/// Everything needed to rebuild a [`Grid3`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub domain: Domain,
    pub h: f64,
    pub padding: f64,
    pub origin: [f64; 3],
    pub dims: [usize; 3],
    pub interior_nodes: usize,
    pub boundary_nodes: usize,
}

impl GridMeta {
    pub fn new(grid: &Grid3, padding: f64) -> Self {
        let o = grid.origin();
        GridMeta {
            domain: *grid.domain(),
            h: grid.spacing(),
            padding,
            origin: [o.x, o.y, o.z],
            dims: grid.dims(),
            interior_nodes: grid.count(NodeLabel::Interior),
            boundary_nodes: grid.count(NodeLabel::Boundary),
        }
    }
}

fn check_finite(values: &[f64], what: &'static str, row: usize) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { what, index: row })
    }
}

pub fn write_field<W: Write>(field: &ScalarField, out: W) -> Result<()> {
    let grid = field.grid();
    let mut w = csv::Writer::from_writer(out);
    for i in 0..grid.len() {
        let p = grid.position(i);
        w.serialize(PointValue { x: p.x, y: p.y, z: p.z, value: field.value(i) })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,y,z,value` rows onto `grid`. Every node must appear exactly once.
pub fn read_field<R: Read>(grid: Arc<Grid3>, input: R) -> Result<ScalarField> {
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (row, rec) in csv::Reader::from_reader(input).deserialize::<PointValue>().enumerate() {
        let r = rec?;
        check_finite(&[r.x, r.y, r.z, r.value], "field csv", row)?;
        let idx = grid.locate(&Vec3::new(r.x, r.y, r.z)).ok_or(Error::OffGrid { x: r.x, y: r.y, z: r.z })?;
        if seen[idx] {
            return Err(Error::invalid("field csv", format!("node {idx} listed twice (row {row})")));
        }
        seen[idx] = true;
        values[idx] = r.value;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::invalid("field csv", format!("no value for node {missing}")));
    }
    ScalarField::new(grid, values)
}

pub fn write_mesh<W: Write>(mesh: &SurfaceMesh, values: Option<&[f64]>, out: W) -> Result<()> {
    if let Some(v) = values {
        if v.len() != mesh.len() {
            return Err(Error::LengthMismatch { what: "panel values", expected: mesh.len(), actual: v.len() });
        }
    }
    let mut w = csv::Writer::from_writer(out);
    for (i, p) in mesh.iter().enumerate() {
        w.serialize(PanelRow {
            cx: p.centroid.x,
            cy: p.centroid.y,
            cz: p.centroid.z,
            area: p.area,
            nx: p.normal.x,
            ny: p.normal.y,
            nz: p.normal.z,
            value: values.map(|v| v[i]),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a panel CSV; the second component holds the `value` column when
/// every row has one.
pub fn read_mesh<R: Read>(input: R) -> Result<(SurfaceMesh, Option<Vec<f64>>)> {
    let mut panels = Vec::new();
    let mut values = Vec::new();
    for (row, rec) in csv::Reader::from_reader(input).deserialize::<PanelRow>().enumerate() {
        let r = rec?;
        check_finite(&[r.cx, r.cy, r.cz, r.area, r.nx, r.ny, r.nz], "mesh csv", row)?;
        if let Some(v) = r.value {
            check_finite(&[v], "mesh csv", row)?;
            values.push(v);
        }
        panels.push(Panel { centroid: Vec3::new(r.cx, r.cy, r.cz), area: r.area, normal: Vec3::new(r.nx, r.ny, r.nz) });
    }
    let values = (!panels.is_empty() && values.len() == panels.len()).then_some(values);
    Ok((SurfaceMesh::new(panels)?, values))
}

pub fn write_charges<W: Write>(positions: &[Vec3], masses: &[f64], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (p, &m) in positions.iter().zip(masses) {
        w.serialize(ChargeRow { x: p.x, y: p.y, z: p.z, m })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_charges<R: Read>(input: R) -> Result<ChargeSet> {
    let mut positions = Vec::new();
    let mut masses = Vec::new();
    for (row, rec) in csv::Reader::from_reader(input).deserialize::<ChargeRow>().enumerate() {
        let r = rec?;
        check_finite(&[r.x, r.y, r.z, r.m], "charges csv", row)?;
        positions.push(Vec3::new(r.x, r.y, r.z));
        masses.push(r.m);
    }
    ChargeSet::new(positions, masses)
}

/// Reads `x,y,z,value` boundary rows into a node-indexed map.
pub fn read_boundary_values<R: Read>(grid: &Grid3, input: R) -> Result<HashMap<usize, f64>> {
    let mut map = HashMap::new();
    for (row, rec) in csv::Reader::from_reader(input).deserialize::<PointValue>().enumerate() {
        let r = rec?;
        check_finite(&[r.x, r.y, r.z, r.value], "boundary csv", row)?;
        let idx = grid.locate(&Vec3::new(r.x, r.y, r.z)).ok_or(Error::OffGrid { x: r.x, y: r.y, z: r.z })?;
        map.insert(idx, r.value);
    }
    Ok(map)
}

pub fn write_trace<W: Write>(trace: &RelaxationTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for step in 0..trace.energies.len() {
        w.serialize(TraceRow {
            step,
            energy: trace.energies[step],
            max_grad: trace.max_grads[step],
            min_boundary_distance: trace.min_boundary_distances[step],
        })?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{build_grid, panelize};

    #[test]
    fn field_roundtrip() {
        let g = Arc::new(build_grid(Domain::unit_cube(), 0.25, 0.25).unwrap());
        let f = ScalarField::from_fn(g.clone(), |p| p.x * 3.0 - p.y * p.z);
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        assert!(buf.starts_with(b"x,y,z,value\n"));
        let back = read_field(g, buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn nan_in_field_csv_is_rejected() {
        let g = Arc::new(build_grid(Domain::unit_cube(), 0.5, 0.0).unwrap());
        let mut buf = Vec::new();
        write_field(&ScalarField::zeros(g.clone()), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap().replacen(",0.0\n", ",NaN\n", 1);
        assert!(matches!(read_field(g, text.as_bytes()), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn mesh_roundtrip_with_and_without_values() {
        let mesh = panelize(&Domain::unit_ball(), 5).unwrap();
        let vals: Vec<f64> = (0..mesh.len()).map(|i| i as f64 * 0.5).collect();
        let mut buf = Vec::new();
        write_mesh(&mesh, Some(&vals), &mut buf).unwrap();
        assert!(buf.starts_with(b"cx,cy,cz,area,nx,ny,nz,value\n"));
        let (m, v) = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(m, mesh);
        assert_eq!(v.unwrap(), vals);

        let mut buf = Vec::new();
        write_mesh(&mesh, None, &mut buf).unwrap();
        assert!(buf.starts_with(b"cx,cy,cz,area,nx,ny,nz\n"));
        let (_, v) = read_mesh(buf.as_slice()).unwrap();
        assert!(v.is_none());
    }

    #[test]
    fn charges_roundtrip() {
        let c = ChargeSet::new(vec![Vec3::new(0.1, 0.2, 0.3), Vec3::new(-1.0, 0.0, 2.5)], vec![1.0, -0.5]).unwrap();
        let mut buf = Vec::new();
        write_charges(c.positions(), c.masses(), &mut buf).unwrap();
        assert_eq!(read_charges(buf.as_slice()).unwrap(), c);
    }

    #[test]
    fn boundary_rows_map_to_nodes() {
        let g = build_grid(Domain::unit_cube(), 0.5, 0.0).unwrap();
        let csv = "x,y,z,value\n0,0,0,1.5\n1,0.5,0.5,2\n";
        let map = read_boundary_values(&g, csv.as_bytes()).unwrap();
        assert_eq!(map[&g.index(0, 0, 0)], 1.5);
        assert_eq!(map[&g.index(2, 1, 1)], 2.0);
        assert!(matches!(read_boundary_values(&g, "x,y,z,value\n0.3,0,0,1\n".as_bytes()), Err(Error::OffGrid { .. })));
    }
}
