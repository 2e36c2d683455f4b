//! Diagnostics CSV, JSON curve snapshots and SVG frames for simulation runs.

use crate::curve::ClosedCurve;
use crate::dynamics::DiagnosticsRecord;
use crate::error::{Error, Result};
use crate::vec2::Vec2;
use crate::velocity::PatchFamily;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidInput(e.to_string())
}

pub fn csv_header(patches: usize) -> String {
    let mut s = String::from("t,Q,W,L,u_inf,min_pair_delta,min_self_delta,growth_ratio");
    for l in 0..patches {
        write!(s, ",area_{l},h2_{l}").unwrap();
    }
    s
}

pub fn csv_row(r: &DiagnosticsRecord) -> String {
    let mut s = format!(
        "{},{},{},{},{},{},{},{}",
        r.t, r.q, r.w, r.l, r.u_inf, r.min_pair_delta, r.min_self_delta, r.growth_ratio
    );
    for (a, h) in r.areas.iter().zip(&r.h2) {
        write!(s, ",{a},{h}").unwrap();
    }
    s
}

/// Closed SVG path through the nodes, in viewport coordinates with y pointing up.
pub fn svg_path(curve: &ClosedCurve) -> String {
    let mut d = String::new();
    for (i, p) in curve.nodes().iter().enumerate() {
        write!(d, "{}{:.6} {:.6} ", if i == 0 { "M" } else { "L" }, p.x, -p.y).unwrap();
    }
    d.push('Z');
    d
}

/// Fixed viewport: the bounding box of the initial family scaled by 1.5 about its center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Viewport {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl Viewport {
    pub fn for_family(family: &PatchFamily) -> Self {
        let (mut lo, mut hi) = family.curves[0].bbox();
        for c in &family.curves[1..] {
            let (a, b) = c.bbox();
            lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
            hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
        }
        let mid = (lo + hi) * 0.5;
        let half = (hi - lo) * 0.75;
        Viewport { lo: mid - half, hi: mid + half }
    }

    pub fn svg(&self, family: &PatchFamily) -> String {
        let w = self.hi.x - self.lo.x;
        let h = self.hi.y - self.lo.y;
        let stroke = 2e-3 * w.max(h);
        let mut s = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{:.6} {:.6} {:.6} {:.6}\">\n",
            self.lo.x, -self.hi.y, w, h
        );
        for (c, th) in family.curves.iter().zip(&family.strengths) {
            let color = if *th >= 0.0 { "#b2182b" } else { "#2166ac" };
            writeln!(
                s,
                "  <path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke:.6}\"/>",
                svg_path(c)
            )
            .unwrap();
        }
        s.push_str("</svg>\n");
        s
    }
}

/// Writes a run's output directory: `diagnostics.csv`, and when snapshots are enabled,
/// `snapshots/frame_XXXXX_patch_Y.json` and `frames/frame_XXXXX.svg`.
pub struct RunWriter {
    dir: PathBuf,
    csv: BufWriter<File>,
    viewport: Viewport,
    snapshots: bool,
    frame: usize,
}

impl RunWriter {
    pub fn create(dir: &Path, initial: &PatchFamily, snapshots: bool) -> Result<Self> {
        fs::create_dir_all(dir).map_err(io_err)?;
        if snapshots {
            fs::create_dir_all(dir.join("snapshots")).map_err(io_err)?;
            fs::create_dir_all(dir.join("frames")).map_err(io_err)?;
        }
        let mut csv = BufWriter::new(File::create(dir.join("diagnostics.csv")).map_err(io_err)?);
        writeln!(csv, "{}", csv_header(initial.len())).map_err(io_err)?;
        Ok(RunWriter { dir: dir.to_path_buf(), csv, viewport: Viewport::for_family(initial), snapshots, frame: 0 })
    }

    pub fn record(&mut self, family: &PatchFamily, r: &DiagnosticsRecord) -> Result<()> {
        writeln!(self.csv, "{}", csv_row(r)).map_err(io_err)?;
        if self.snapshots {
            for (l, c) in family.curves.iter().enumerate() {
                let p = self.dir.join("snapshots").join(format!("frame_{:05}_patch_{l}.json", self.frame));
                fs::write(p, c.to_json()).map_err(io_err)?;
            }
            let p = self.dir.join("frames").join(format!("frame_{:05}.svg", self.frame));
            fs::write(p, self.viewport.svg(family)).map_err(io_err)?;
        }
        self.frame += 1;
        Ok(())
    }

    pub fn frames(&self) -> usize {
        self.frame
    }

    pub fn finish(mut self) -> Result<()> {
        self.csv.flush().map_err(io_err)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{make_shape, Shape};

    fn record() -> DiagnosticsRecord {
        DiagnosticsRecord {
            t: 0.5,
            q: 1.0,
            w: 2.0,
            l: 3.0,
            areas: vec![0.25, 0.75],
            h2: vec![4.0, 5.0],
            u_inf: 0.125,
            min_pair_delta: f64::INFINITY,
            min_self_delta: 0.1,
            growth_ratio: f64::NAN,
        }
    }

    #[test]
    fn csv_columns_match_header() {
        let h = csv_header(2);
        assert_eq!(h, "t,Q,W,L,u_inf,min_pair_delta,min_self_delta,growth_ratio,area_0,h2_0,area_1,h2_1");
        let r = csv_row(&record());
        assert_eq!(r, "0.5,1,2,3,0.125,inf,0.1,NaN,0.25,4,0.75,5");
        assert_eq!(h.split(',').count(), r.split(',').count());
    }

    #[test]
    fn viewport_scales_bbox() {
        let c = make_shape(&Shape::Circle { radius: 1.0, center: [1.0, 0.0] }, 64).unwrap();
        let fam = PatchFamily::new(vec![c], vec![1.0]).unwrap();
        let v = Viewport::for_family(&fam);
        assert!((v.lo.x - -0.5).abs() < 1e-12 && (v.hi.x - 2.5).abs() < 1e-12);
        assert!((v.hi.y - 1.5).abs() < 1e-12);
        let svg = v.svg(&fam);
        assert_eq!(svg.matches("<path").count(), 1);
        assert!(svg.contains("Z\""));
    }

    #[test]
    fn writer_layout() {
        let dir = tempfile::tempdir().unwrap();
        let c = make_shape(&Shape::Circle { radius: 1.0, center: [0.0, 0.0] }, 32).unwrap();
        let fam = PatchFamily::new(vec![c.clone(), make_shape(&Shape::Circle { radius: 0.5, center: [3.0, 0.0] }, 32).unwrap()], vec![1.0, -1.0]).unwrap();
        let mut w = RunWriter::create(dir.path(), &fam, true).unwrap();
        w.record(&fam, &record()).unwrap();
        w.finish().unwrap();
        let csv = fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(csv.lines().count(), 2);
        let back = fs::read_to_string(dir.path().join("snapshots/frame_00000_patch_1.json")).unwrap();
        assert_eq!(ClosedCurve::from_json(&back).unwrap().nodes(), fam.curves[1].nodes());
        assert!(dir.path().join("frames/frame_00000.svg").exists());
    }
}
