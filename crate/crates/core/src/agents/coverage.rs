use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{GridSpec, Vec2};

/// Per-cell first-visit times. Entries are write-once.
#[derive(Debug, Clone, PartialEq)]
pub struct HitTimeMap {
    grid: GridSpec,
    // INFINITY marks an unvisited cell
    times: Vec<f64>,
    visited: usize,
}

impl HitTimeMap {
    pub fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            times: vec![f64::INFINITY; grid.len()],
            visited: 0,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let t = self.times[self.grid.flat(i, j)];
        t.is_finite().then_some(t)
    }

    /// Marks the cell containing `p` as visited at `clock` unless it already
    /// holds an earlier time. Returns whether the cell was newly set.
    pub fn visit(&mut self, p: Vec2, clock: f64) -> Result<bool> {
        let (i, j) = self.grid.cell_index(p)?;
        Ok(self.visit_cell(i, j, clock))
    }

    pub fn visit_cell(&mut self, i: usize, j: usize, clock: f64) -> bool {
        let k = self.grid.flat(i, j);
        let slot = &mut self.times[k];
        if slot.is_infinite() {
            *slot = clock;
            self.visited += 1;
            true
        } else {
            if clock < *slot {
                *slot = clock;
            }
            false
        }
    }

    pub fn visited_cells(&self) -> usize {
        self.visited
    }

    /// Iterates `(i, j, first_visit)` over visited cells in row-major order.
    pub fn iter_visited(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let ny = self.grid.ny;
        self.times
            .iter()
            .enumerate()
            .filter(|(_, t)| t.is_finite())
            .map(move |(k, &t)| (k / ny, k % ny, t))
    }

    /// Raw times with `None` for unvisited cells, row-major.
    pub fn times(&self) -> Vec<Option<f64>> {
        self.times.iter().map(|t| t.is_finite().then_some(*t)).collect()
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.times
    }

    /// CSV with header `i,j,t_first_s`; unvisited cells are omitted.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "t_first_s"])?;
        for (i, j, t) in self.iter_visited() {
            w.write_record([i.to_string(), j.to_string(), t.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(grid: GridSpec, input: R) -> Result<Self> {
        let mut map = HitTimeMap::new(grid);
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["i", "j", "t_first_s"] {
            return Err(Error::Malformed(format!("unexpected hit-map header {header:?}")));
        }
        for rec in r.records() {
            let rec = rec?;
            let parse = |k: usize| -> Result<&str> {
                rec.get(k).ok_or_else(|| Error::Malformed("short hit-map row".into()))
            };
            let i: usize = parse(0)?.parse().map_err(|e| Error::Malformed(format!("{e}")))?;
            let j: usize = parse(1)?.parse().map_err(|e| Error::Malformed(format!("{e}")))?;
            let t: f64 = parse(2)?.parse().map_err(|e| Error::Malformed(format!("{e}")))?;
            if i >= grid.nx || j >= grid.ny {
                return Err(Error::Malformed(format!("cell ({i}, {j}) outside grid")));
            }
            map.visit_cell(i, j, t);
        }
        Ok(map)
    }

    /// Binary PGM (P5) with rows along y from the top; unvisited cells are 0,
    /// visited cells scale linearly from 255 (t = 0) down to 1 (t = `t_max`).
    pub fn write_pgm<W: Write>(&self, mut out: W, t_max: f64) -> Result<()> {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        write!(out, "P5\n{nx} {ny}\n255\n")?;
        let mut row = vec![0u8; nx];
        for jr in 0..ny {
            let j = ny - 1 - jr;
            for (i, px) in row.iter_mut().enumerate() {
                *px = match self.get(i, j) {
                    None => 0,
                    Some(t) => {
                        let frac = if t_max > 0.0 { (t / t_max).clamp(0.0, 1.0) } else { 0.0 };
                        (255.0 - 254.0 * frac).round() as u8
                    }
                };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}
