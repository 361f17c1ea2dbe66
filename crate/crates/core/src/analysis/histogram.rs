use std::io::{self, BufRead, Write};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("histograms use different bins (origin {0} width {1} vs origin {2} width {3})")]
    Binning(f64, f64, f64, f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("temporal metrics need between 2 and 128 days (got {0})")]
    Horizon(u32),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Proportions over equal-width bins `[origin + k w, origin + (k + 1) w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub origin: f64,
    pub width: f64,
    pub proportions: Vec<f64>,
}

impl Histogram {
    /// Unit bins starting at 0.
    pub fn from_integers(samples: &[u64]) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        for &s in samples {
            let s = s as usize;
            if s >= counts.len() {
                counts.resize(s + 1, 0);
            }
            counts[s] += 1;
        }
        let n = samples.len() as f64;
        Histogram { origin: 0.0, width: 1.0, proportions: counts.into_iter().map(|c| c as f64 / n).collect() }
    }

    /// Bins of `width` starting at 0; values are assumed non-negative.
    pub fn from_reals(samples: &[f64], width: f64) -> Self {
        let mut counts: Vec<u64> = Vec::new();
        for &s in samples {
            // nudge so values sitting on an edge, like 0.3, land in their own bin
            let k = ((s / width) + 1e-9).floor().max(0.0) as usize;
            if k >= counts.len() {
                counts.resize(k + 1, 0);
            }
            counts[k] += 1;
        }
        let n = samples.len() as f64;
        Histogram { origin: 0.0, width, proportions: counts.into_iter().map(|c| c as f64 / n).collect() }
    }

    /// Unit bins `0..bins` filled from a pmf; the tail beyond is left out.
    pub fn from_pmf<F: Fn(u64) -> f64>(pmf: F, bins: usize) -> Self {
        Histogram { origin: 0.0, width: 1.0, proportions: (0..bins as u64).map(pmf).collect() }
    }

    pub fn is_empty(&self) -> bool {
        self.proportions.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.proportions.iter().sum()
    }

    /// Index one past the last non-zero bin.
    pub fn support_end(&self) -> usize {
        self.proportions.iter().rposition(|&p| p != 0.0).map_or(0, |i| i + 1)
    }

    pub fn get(&self, bin: usize) -> f64 {
        self.proportions.get(bin).copied().unwrap_or(0.0)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "bin,proportion")?;
        for (k, p) in self.proportions.iter().enumerate() {
            writeln!(w, "{},{}", self.origin + k as f64 * self.width, p)?;
        }
        Ok(())
    }

    /// Reads `bin,proportion` rows with equally spaced bins.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, AnalysisError> {
        let mut rows: Vec<(f64, f64)> = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || (i == 0 && t.starts_with("bin")) {
                continue;
            }
            let err = |m: &str| AnalysisError::Parse { line: i + 1, message: m.to_string() };
            let (b, p) = t.split_once(',').ok_or_else(|| err("expected bin,proportion"))?;
            let b: f64 = b.trim().parse().map_err(|_| err("bad bin"))?;
            let p: f64 = p.trim().parse().map_err(|_| err("bad proportion"))?;
            rows.push((b, p));
        }
        if rows.is_empty() {
            return Ok(Histogram { origin: 0.0, width: 1.0, proportions: vec![] });
        }
        let origin = rows[0].0;
        let width = if rows.len() > 1 { rows[1].0 - rows[0].0 } else { 1.0 };
        let mut proportions = Vec::with_capacity(rows.len());
        for (k, &(b, p)) in rows.iter().enumerate() {
            let expect = origin + k as f64 * width;
            if (b - expect).abs() > 1e-9 * width.max(1.0) {
                return Err(AnalysisError::Parse { line: k + 2, message: format!("bin {b} breaks spacing {width}") });
            }
            proportions.push(p);
        }
        Ok(Histogram { origin, width, proportions })
    }
}

/// Root squared error `sqrt(sum (x_i - y_i)^2)` over the bins up to the
/// last non-empty bin of `observed`.
pub fn rse(observed: &Histogram, reference: &Histogram) -> Result<f64, AnalysisError> {
    let same = (observed.origin - reference.origin).abs() <= 1e-12 && (observed.width - reference.width).abs() <= 1e-12;
    if !same {
        return Err(AnalysisError::Binning(observed.origin, observed.width, reference.origin, reference.width));
    }
    let s: f64 = (0..observed.support_end()).map(|k| (observed.get(k) - reference.get(k)).powi(2)).sum();
    Ok(s.sqrt())
}
