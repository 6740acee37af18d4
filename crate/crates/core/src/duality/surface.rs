use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::search::{penalty, PenaltyMode, SearchConfig};
use super::weights::{steps_per_unit, weight_grid, SubProbabilityWeight, WeightMode};
use super::{pairing_slice, MAX_SURFACE_DIMENSION};
use crate::error::{Error, Result};
use crate::scenario::{check_dim, ScenarioVector};
use crate::statistic::RiskStatistic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyEntry {
    pub weight: SubProbabilityWeight,
    /// `+∞` only for imported tables; computed values are always finite.
    pub value: f64,
    pub on_boundary: bool,
}

/// Penalty values on a lattice of weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySurface {
    pub dim: usize,
    pub grid_step: f64,
    /// Unknown for imported tables.
    pub search_box: Option<f64>,
    pub mode: PenaltyMode,
    pub entries: Vec<PenaltyEntry>,
}

/// Evaluates the chosen penalty at every lattice point. Points are computed in
/// parallel and stored in lattice order.
pub fn penalty_surface<S: RiskStatistic + ?Sized>(
    stat: &S,
    dim: usize,
    grid_step: f64,
    weights: WeightMode,
    mode: PenaltyMode,
    cfg: &SearchConfig,
) -> Result<PenaltySurface> {
    if dim > MAX_SURFACE_DIMENSION {
        return Err(Error::DimensionTooLarge(dim));
    }
    if let Some(d) = stat.dimension() {
        check_dim(d, dim)?;
    }
    cfg.validate()?;
    let grid = weight_grid(dim, grid_step, weights)?;
    let results: Vec<Result<PenaltyEntry>> = grid
        .into_par_iter()
        .map(|weight| {
            let v = penalty(stat, &weight, mode, cfg)?;
            Ok(PenaltyEntry {
                weight,
                value: v.value,
                on_boundary: v.on_boundary,
            })
        })
        .collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(e) => entries.push(e),
            Err(e) => failures.push(format!("grid point {i}: {e}")),
        }
    }
    if !failures.is_empty() {
        return Err(Error::SurfacePoints(failures));
    }
    Ok(PenaltySurface {
        dim,
        grid_step,
        search_box: Some(cfg.box_half_width),
        mode,
        entries,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub value: f64,
    pub index: usize,
    pub weight: SubProbabilityWeight,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .is_some_and(|o| o.is_lt())
}

/// `max_P { ⟨P, X⟩ - α(P) }` over the surface, with the maximizing entry.
/// Boundary-flagged entries take part with their lower-bound value. Exact
/// ties go to the lexicographically smallest `P`.
pub fn reconstruct_argmax(surface: &PenaltySurface, x: &ScenarioVector) -> Result<Reconstruction> {
    check_dim(surface.dim, x.dim())?;
    let mut best: Option<(f64, usize)> = None;
    for (i, e) in surface.entries.iter().enumerate() {
        if !e.value.is_finite() {
            continue;
        }
        let v = pairing_slice(e.weight.as_slice(), x) - e.value;
        let better = match best {
            None => true,
            Some((bv, bi)) => {
                v > bv
                    || (v == bv
                        && lex_less(e.weight.as_slice(), surface.entries[bi].weight.as_slice()))
            }
        };
        if better {
            best = Some((v, i));
        }
    }
    let (value, index) = best.ok_or(Error::EmptySurface)?;
    Ok(Reconstruction {
        value,
        index,
        weight: surface.entries[index].weight.clone(),
    })
}

pub fn reconstruct(surface: &PenaltySurface, x: &ScenarioVector) -> Result<f64> {
    Ok(reconstruct_argmax(surface, x)?.value)
}

const CSV_TABLE: &str = "<penalty table>";

impl PenaltySurface {
    pub fn finite_count(&self) -> usize {
        self.entries.iter().filter(|e| e.value.is_finite()).count()
    }

    pub fn boundary_count(&self) -> usize {
        self.entries.iter().filter(|e| e.on_boundary).count()
    }

    /// Columns `p1..pN,value,boundary_flag,mode`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|i| format!("p{i}")).collect();
        header.extend(["value", "boundary_flag", "mode"].map(String::from));
        let table_err = |e: csv::Error| Error::format(CSV_TABLE, e.to_string());
        w.write_record(&header).map_err(table_err)?;
        let mode = self.mode.to_string();
        for e in &self.entries {
            let mut row: Vec<String> = e.weight.as_slice().iter().map(f64::to_string).collect();
            row.push(e.value.to_string());
            row.push(e.on_boundary.to_string());
            row.push(mode.clone());
            w.write_record(&row).map_err(table_err)?;
        }
        w.flush()
            .map_err(|e| Error::format(CSV_TABLE, e.to_string()))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    /// Reads a table written by [`PenaltySurface::write_csv`]. The grid step
    /// is recovered from the smallest positive weight; the search box is not
    /// stored in the table.
    pub fn read_csv<R: Read>(input: R, origin: &str) -> Result<Self> {
        let err = |m: String| Error::format(origin, m);
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let header = rdr.headers().map_err(|e| err(e.to_string()))?.clone();
        let cols: Vec<&str> = header.iter().collect();
        if cols.len() < 4 || cols[cols.len() - 3..] != ["value", "boundary_flag", "mode"] {
            return Err(err("header must be p1..pN,value,boundary_flag,mode".into()));
        }
        let dim = cols.len() - 3;
        for (i, c) in cols[..dim].iter().enumerate() {
            if *c != format!("p{}", i + 1) {
                return Err(err(format!("unexpected column {c:?}, expected p{}", i + 1)));
            }
        }
        let mut entries = Vec::new();
        let mut mode: Option<PenaltyMode> = None;
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| err(e.to_string()))?;
            if rec.len() != cols.len() {
                return Err(err(format!("ragged row {row}")));
            }
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| err(format!("row {row}: {s:?} is not a number")))
            };
            let weights = rec.iter().take(dim).map(num).collect::<Result<Vec<_>>>()?;
            let weight =
                SubProbabilityWeight::new(weights).map_err(|e| err(format!("row {row}: {e}")))?;
            let value = num(&rec[dim])?;
            if value.is_nan() || value == f64::NEG_INFINITY {
                return Err(err(format!(
                    "row {row}: penalty value must not be NaN or -inf"
                )));
            }
            let on_boundary = match rec[dim + 1].trim() {
                "true" | "1" => true,
                "false" | "0" => false,
                other => return Err(err(format!("row {row}: bad boundary flag {other:?}"))),
            };
            let row_mode: PenaltyMode = rec[dim + 2]
                .trim()
                .parse()
                .map_err(|e| err(format!("row {row}: {e}")))?;
            if mode.is_some_and(|m| m != row_mode) {
                return Err(err(format!("row {row}: mixed penalty modes")));
            }
            mode = Some(row_mode);
            entries.push(PenaltyEntry {
                weight,
                value,
                on_boundary,
            });
        }
        let mode = mode.ok_or_else(|| err("table has no rows".into()))?;
        let smallest = entries
            .iter()
            .flat_map(|e| e.weight.as_slice().iter().copied())
            .filter(|v| *v > 0.0)
            .fold(1.0, f64::min);
        let grid_step = 1.0 / steps_per_unit(smallest).map_or((1.0 / smallest).round(), f64::from);
        Ok(Self {
            dim,
            grid_step,
            search_box: None,
            mode,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file), &path.display().to_string())
    }
}

/// Uniform probes on `[-half_width, half_width]^N`.
pub fn sample_probes(dim: usize, count: usize, half_width: f64, seed: u64) -> Vec<ScenarioVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v = (0..dim)
                .map(|_| rng.random_range(-half_width..=half_width))
                .collect();
            ScenarioVector::new(v).expect("finite probe")
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReportConfig {
    pub grid_step: f64,
    pub probe_count: usize,
    pub probe_half_width: f64,
    pub seed: u64,
    pub weights: WeightMode,
}

impl Default for GapReportConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.05,
            probe_count: 100,
            probe_half_width: 3.0,
            seed: 0,
            weights: WeightMode::SubProbability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub x: ScenarioVector,
    pub eval: f64,
    pub acceptance: f64,
    pub acceptance_gap: f64,
    pub conjugate: f64,
    pub conjugate_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub max_acceptance_gap: f64,
    pub max_conjugate_gap: f64,
}

impl GapReport {
    /// Compares `R` with its reconstruction from both surfaces.
    pub fn from_surfaces<S: RiskStatistic + ?Sized>(
        stat: &S,
        acceptance: &PenaltySurface,
        conjugate: &PenaltySurface,
        probes: &[ScenarioVector],
    ) -> Result<Self> {
        let rows = probes
            .iter()
            .map(|x| {
                let eval = stat.evaluate(x)?;
                let p = reconstruct(acceptance, x)?;
                let c = reconstruct(conjugate, x)?;
                Ok(GapRow {
                    x: x.clone(),
                    eval,
                    acceptance: p,
                    acceptance_gap: (p - eval).abs(),
                    conjugate: c,
                    conjugate_gap: (c - eval).abs(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let max = |f: fn(&GapRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
        Ok(Self {
            max_acceptance_gap: max(|r| r.acceptance_gap),
            max_conjugate_gap: max(|r| r.conjugate_gap),
            rows,
        })
    }
}

/// Builds both penalty surfaces and reports `|reconstruct - R|` on random probes.
pub fn duality_gap_report<S: RiskStatistic + ?Sized>(
    stat: &S,
    dim: usize,
    search: &SearchConfig,
    cfg: &GapReportConfig,
) -> Result<GapReport> {
    let acceptance = penalty_surface(
        stat,
        dim,
        cfg.grid_step,
        cfg.weights,
        PenaltyMode::AcceptanceSet,
        search,
    )?;
    let conjugate = penalty_surface(
        stat,
        dim,
        cfg.grid_step,
        cfg.weights,
        PenaltyMode::Conjugate,
        search,
    )?;
    let probes = sample_probes(dim, cfg.probe_count, cfg.probe_half_width, cfg.seed);
    GapReport::from_surfaces(stat, &acceptance, &conjugate, &probes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistic::RiskStatisticSpec;

    fn sv(v: &[f64]) -> ScenarioVector {
        ScenarioVector::new(v.to_vec()).unwrap()
    }

    fn worst_case_simplex(step: f64) -> PenaltySurface {
        penalty_surface(
            &RiskStatisticSpec::worst_case(),
            2,
            step,
            WeightMode::Simplex,
            PenaltyMode::AcceptanceSet,
            &SearchConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn worst_case_simplex_surface_is_zero() {
        let s = worst_case_simplex(0.25);
        assert_eq!(s.entries.len(), 5);
        for e in &s.entries {
            assert!(e.value.abs() <= 1e-6 && !e.on_boundary, "{e:?}");
        }
    }

    #[test]
    fn linear_surface_flags_off_weight_points() {
        let ne = RiskStatisticSpec::neg_expectation(vec![0.5, 0.5]).unwrap();
        let s = penalty_surface(
            &ne,
            2,
            0.5,
            WeightMode::SubProbability,
            PenaltyMode::AcceptanceSet,
            &SearchConfig::default(),
        )
        .unwrap();
        for e in &s.entries {
            if e.weight.as_slice() == [0.5, 0.5] {
                assert!(e.value.abs() < 1e-12 && !e.on_boundary);
            } else {
                assert!(e.on_boundary, "{e:?}");
            }
        }
    }

    #[test]
    fn one_dimensional_worst_case() {
        // R(x) = -x; acceptance set x ≥ 0; objective -p x + x = (1 - p) x
        let s = penalty_surface(
            &RiskStatisticSpec::worst_case(),
            1,
            0.5,
            WeightMode::SubProbability,
            PenaltyMode::AcceptanceSet,
            &SearchConfig::default(),
        )
        .unwrap();
        let values: Vec<f64> = s.entries.iter().map(|e| e.value).collect();
        // brute force over x ∈ [0, 10]
        let oracle = |p: f64| {
            (0..=1000)
                .map(|k| (1.0 - p) * (k as f64 / 100.0))
                .fold(f64::MIN, f64::max)
        };
        for (v, p) in values.iter().zip([0.0, 0.5, 1.0]) {
            assert!((v - oracle(p)).abs() < 1e-9);
        }
        assert_eq!(values[2], 0.0);
        assert!(!s.entries[2].on_boundary);
    }

    #[test]
    fn reconstruct_examples() {
        let s = worst_case_simplex(0.25);
        assert!((reconstruct(&s, &sv(&[1.0, 2.0])).unwrap() + 1.0).abs() <= 0.13);
        for c in [-2.0, 0.0, 3.5] {
            assert!((reconstruct(&s, &sv(&[c, c])).unwrap() + c).abs() <= 1e-6);
        }
        assert!(reconstruct(&s, &sv(&[1.0])).is_err());
    }

    #[test]
    fn ties_go_to_smallest_weight() {
        let s = worst_case_simplex(0.25);
        // constant X: all simplex points tie
        let r = reconstruct_argmax(&s, &sv(&[1.0, 1.0])).unwrap();
        assert_eq!(r.weight.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn empty_surface_is_an_error() {
        let mut s = worst_case_simplex(0.5);
        for e in &mut s.entries {
            e.value = f64::INFINITY;
        }
        assert!(matches!(
            reconstruct(&s, &sv(&[0.0, 0.0])),
            Err(Error::EmptySurface)
        ));
    }

    #[test]
    fn csv_round_trip() {
        let ent = RiskStatisticSpec::entropic(1.0, vec![0.5, 0.5]).unwrap();
        let s = penalty_surface(
            &ent,
            2,
            0.1,
            WeightMode::SubProbability,
            PenaltyMode::Conjugate,
            &SearchConfig::default(),
        )
        .unwrap();
        let text = s.to_csv_string();
        assert!(text.starts_with("p1,p2,value,boundary_flag,mode\n"));
        let back = PenaltySurface::read_csv(text.as_bytes(), "mem").unwrap();
        assert_eq!(back.entries, s.entries);
        assert_eq!(back.mode, s.mode);
        assert_eq!(back.grid_step, 0.1);
        assert_eq!(back.search_box, None);
    }

    #[test]
    fn csv_rejects_bad_tables() {
        for text in [
            "",
            "q1,value,boundary_flag,mode\n0,0,false,paper-formula\n",
            "p1,value,boundary_flag,mode\n0,0,false\n",
            "p1,value,boundary_flag,mode\n0,zero,false,paper-formula\n",
            "p1,value,boundary_flag,mode\n2,0,false,paper-formula\n",
            "p1,value,boundary_flag,mode\n0,0,maybe,paper-formula\n",
            "p1,value,boundary_flag,mode\n0,0,false,paper\n1,0,false,conjugate\n",
            "p1,value,boundary_flag,mode\n",
        ] {
            assert!(
                PenaltySurface::read_csv(text.as_bytes(), "mem").is_err(),
                "{text:?}"
            );
        }
    }

    #[test]
    fn dimension_cap() {
        let r = penalty_surface(
            &RiskStatisticSpec::worst_case(),
            7,
            1.0,
            WeightMode::Simplex,
            PenaltyMode::AcceptanceSet,
            &SearchConfig::default(),
        );
        assert!(matches!(r, Err(Error::DimensionTooLarge(7))));
    }

    #[test]
    fn probes_are_seeded() {
        assert_eq!(sample_probes(2, 5, 3.0, 9), sample_probes(2, 5, 3.0, 9));
        assert_ne!(sample_probes(2, 5, 3.0, 9), sample_probes(2, 5, 3.0, 10));
        assert!(sample_probes(3, 50, 3.0, 1)
            .iter()
            .all(|x| x.iter().all(|v| v.abs() <= 3.0)));
    }
}
