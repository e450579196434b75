use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{invalid, Error, Result};
use crate::model::{GridSpec, Vec2};

/// Cell-averaged probability density on a grid (1/m^2), stored with
/// `flat(i, j) = i * ny + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
}

const MAGIC: &[u8; 4] = b"UFLD";

impl DensityField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid("values", format!("expected {} cells, got {}", grid.len(), values.len())));
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDensity { index, value });
        }
        Ok(Self { grid, values, time })
    }

    pub fn uniform(grid: GridSpec) -> Self {
        let rho = 1.0 / grid.arena.area();
        Self {
            values: vec![rho; grid.len()],
            grid,
            time: 0.0,
        }
    }

    /// Tabulates `f` on cell centres and normalises to unit mass.
    pub fn from_fn<F: Fn(Vec2) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                values.push(f(grid.cell_center(i, j)));
            }
        }
        let mut field = Self::new(grid, values, 0.0)?;
        field.normalize()?;
        Ok(field)
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(0.0, |m, &v| m.max(v))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.flat(i, j)]
    }

    pub fn normalize(&mut self) -> Result<()> {
        let m = self.mass();
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid("density", "zero or non-finite mass"));
        }
        self.values.iter_mut().for_each(|v| *v /= m);
        Ok(())
    }

    /// `i,j,u` rows after a header line.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["i", "j", "u"])?;
        for i in 0..self.grid.nx {
            for j in 0..self.grid.ny {
                w.write_record(&[i.to_string(), j.to_string(), format!("{:e}", self.get(i, j))])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(grid: GridSpec, input: R) -> Result<Self> {
        let mut values = vec![f64::NAN; grid.len()];
        let mut r = csv::Reader::from_reader(input);
        for rec in r.deserialize::<(usize, usize, f64)>() {
            let (i, j, u) = rec?;
            if i >= grid.nx || j >= grid.ny {
                return Err(Error::Malformed(format!("cell ({i}, {j}) outside the grid")));
            }
            values[grid.flat(i, j)] = u;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Malformed("missing cells in density CSV".into()));
        }
        Self::new(grid, values, 0.0)
    }

    /// `UFLD`, nx and ny as little-endian u32, four zero bytes, then the
    /// values as little-endian f64 in storage order.
    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.grid.nx as u32).to_le_bytes())?;
        out.write_all(&(self.grid.ny as u32).to_le_bytes())?;
        out.write_all(&[0u8; 4])?;
        for v in &self.values {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(grid: GridSpec, input: R) -> Result<Self> {
        let mut r = BufReader::new(input);
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != MAGIC {
            return Err(Error::Malformed("bad magic".into()));
        }
        let nx = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let ny = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        if nx != grid.nx || ny != grid.ny {
            return Err(Error::Malformed(format!("file is {nx}x{ny}, grid is {}x{}", grid.nx, grid.ny)));
        }
        let mut values = Vec::with_capacity(grid.len());
        let mut buf = [0u8; 8];
        for _ in 0..grid.len() {
            r.read_exact(&mut buf)?;
            values.push(f64::from_le_bytes(buf));
        }
        if !r.fill_buf()?.is_empty() {
            return Err(Error::Malformed("trailing bytes".into()));
        }
        Self::new(grid, values, 0.0)
    }
}

/// Bump of the ring start: `max(0, 1.2 exp(-4 N |x|^2 / 0.075) - 0.2)`
/// around the arena centre, normalised.
pub fn build_initial_condition(n_robots: usize, grid: GridSpec) -> Result<DensityField> {
    if n_robots == 0 {
        return Err(invalid("n_robots", "need at least one robot"));
    }
    let c = grid.arena.center();
    let k = 4.0 * n_robots as f64 / 0.075;
    DensityField::from_fn(grid, |p| bump(k, (p - c).norm_sq()))
}

/// Five narrow bumps at the centre and the four points `(+-0.9, +-0.7)`.
pub fn build_spread_initial_condition(grid: GridSpec) -> Result<DensityField> {
    let centers = [
        Vec2::new(0.0, 0.0),
        Vec2::new(0.9, 0.7),
        Vec2::new(0.9, -0.7),
        Vec2::new(-0.9, 0.7),
        Vec2::new(-0.9, -0.7),
    ];
    let k = 20.0 / 0.075;
    DensityField::from_fn(grid, |p| centers.iter().map(|&c| bump(k, (p - c).norm_sq())).sum())
}

fn bump(k: f64, r2: f64) -> f64 {
    (1.2 * (-k * r2).exp() - 0.2).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Arena;

    fn grid() -> GridSpec {
        GridSpec::with_counts(Arena::reference(), 36, 44).unwrap()
    }

    #[test]
    fn bump_peak_and_support() {
        let k = 4.0 * 5.0 / 0.075;
        assert_eq!(bump(k, 0.0), 1.0);
        let edge = (0.075 / 20.0) * 6f64.ln();
        assert_eq!(bump(k, edge * 1.0001), 0.0);
        assert!(bump(k, edge * 0.999) > 0.0);
    }

    #[test]
    fn initial_mass_is_one() {
        for n in [1, 5, 20, 100] {
            let g = GridSpec::with_counts(Arena::reference(), 128, 156).unwrap();
            let u = build_initial_condition(n, g).unwrap();
            assert!((u.mass() - 1.0).abs() < 1e-12);
        }
        let u = build_spread_initial_condition(grid()).unwrap();
        assert!((u.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_and_binary_round_trip() {
        let u = build_initial_condition(1, grid()).unwrap();
        let mut buf = Vec::new();
        u.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 8 * u.values.len());
        assert_eq!(&buf[..4], b"UFLD");
        assert_eq!(DensityField::read_binary(grid(), &buf[..]).unwrap(), u);

        let mut text = Vec::new();
        u.write_csv(&mut text).unwrap();
        let back = DensityField::read_csv(grid(), &text[..]).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn negative_values_rejected() {
        let g = grid();
        let mut v = vec![1.0; g.len()];
        v[3] = -1.0;
        assert!(matches!(DensityField::new(g, v, 0.0), Err(Error::NegativeDensity { index: 3, .. })));
    }
}
