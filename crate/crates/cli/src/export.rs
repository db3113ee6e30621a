//! Figure tables built from pair records.

use std::io::Write;
use std::path::Path;

use mskrylov::seeds::SeedKind;
use serde::{Deserialize, Serialize};

use crate::config::Variant;
use crate::error::{CliError, CliResult};
use crate::record::{read_json, PairRecord};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure {
    pub id: &'static str,
    pub family: &'static str,
    pub variant: Variant,
    pub seeds: Option<SeedKind>,
    pub title: &'static str,
}

pub const FIGURES: [Figure; 8] = [
    Figure {
        id: "fig1-left",
        family: "ising",
        variant: Variant::Operator,
        seeds: Some(SeedKind::SingleSiteSpins),
        title: "multiseed operator plateau, Ising",
    },
    Figure {
        id: "fig1-right",
        family: "xyz",
        variant: Variant::Operator,
        seeds: Some(SeedKind::SingleSiteSpins),
        title: "multiseed operator plateau, XYZ",
    },
    Figure {
        id: "fig2-left",
        family: "qrs",
        variant: Variant::Operator,
        seeds: Some(SeedKind::ZeroBody),
        title: "multiseed operator plateau, resonant system, 0-body seeds",
    },
    Figure {
        id: "fig2-right",
        family: "qrs",
        variant: Variant::Operator,
        seeds: Some(SeedKind::NumberOperators),
        title: "multiseed operator plateau, resonant system, number-operator seeds",
    },
    Figure {
        id: "fig3-left",
        family: "ising",
        variant: Variant::State,
        seeds: Some(SeedKind::ProductStates),
        title: "multiseed state plateau, Ising",
    },
    Figure {
        id: "fig3-right",
        family: "xyz",
        variant: Variant::State,
        seeds: Some(SeedKind::ProductStates),
        title: "multiseed state plateau, XYZ",
    },
    Figure {
        id: "fig4-left",
        family: "xyz",
        variant: Variant::Size,
        seeds: None,
        title: "operator size plateau, XYZ",
    },
    Figure {
        id: "fig4-right",
        family: "qrs",
        variant: Variant::Size,
        seeds: None,
        title: "operator size plateau, resonant system",
    },
];

pub fn figure(id: &str) -> CliResult<&'static Figure> {
    FIGURES
        .iter()
        .find(|f| f.id == id)
        .ok_or_else(|| CliError::Config(format!("unknown figure `{id}`")))
}

impl Figure {
    pub fn matches(&self, p: &PairRecord) -> bool {
        p.family == self.family && p.variant == self.variant && p.seed_kind == self.seeds
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub size: usize,
    pub integrable: f64,
    pub chaotic_mean: f64,
    pub chaotic_sem: f64,
}

impl TableRow {
    pub fn from_pair(p: &PairRecord) -> Self {
        Self {
            size: p.size,
            integrable: p.normalized_integrable,
            chaotic_mean: p.normalized_chaotic.mean,
            chaotic_sem: p.normalized_chaotic.std_error,
        }
    }
}

/// Pair records found directly in `dir`; other JSON files are skipped.
pub fn load_pairs(dir: &Path) -> CliResult<Vec<PairRecord>> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for path in paths {
        if let Ok(p) = read_json::<PairRecord>(&path) {
            if p.schema == crate::record::PAIR_SCHEMA {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// One row per requested size. `integrable_preset` picks between several
/// records at the same size.
pub fn select_rows(
    fig: &Figure,
    pairs: &[PairRecord],
    sizes: &[usize],
    integrable_preset: Option<&str>,
) -> CliResult<Vec<TableRow>> {
    sizes
        .iter()
        .map(|&size| {
            let hits: Vec<&PairRecord> = pairs
                .iter()
                .filter(|p| fig.matches(p) && p.size == size)
                .filter(|p| {
                    integrable_preset
                        .is_none_or(|name| p.integrable_preset().as_deref() == Some(name))
                })
                .collect();
            match hits.as_slice() {
                [] => Err(CliError::MissingRecord {
                    figure: fig.id.to_string(),
                    size,
                }),
                [one] => Ok(TableRow::from_pair(one)),
                _ => Err(CliError::Config(format!(
                    "{} records for {} at size {size}; choose one with --integrable-preset",
                    hits.len(),
                    fig.id
                ))),
            }
        })
        .collect()
}

pub fn write_table(out: impl Write, fig: &Figure, rows: &[TableRow]) -> CliResult<()> {
    let mut out = out;
    writeln!(out, "# figure: {} ({})", fig.id, fig.title)?;
    writeln!(out, "# size: L for chains, N = M for resonant systems")?;
    writeln!(
        out,
        "# integrable: normalized plateau of the integrable Hamiltonian (white bar)"
    )?;
    writeln!(
        out,
        "# chaotic_mean: mean normalized plateau over chaotic realizations (black bar)"
    )?;
    writeln!(
        out,
        "# chaotic_sem: standard error of that mean, 0 for a single realization"
    )?;
    writeln!(
        out,
        "# normalization: plateau / (max(M_integrable, M_chaotic) - 1)"
    )?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table(input: impl std::io::Read) -> CliResult<Vec<TableRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input);
    Ok(r.deserialize().collect::<Result<Vec<TableRow>, _>>()?)
}

pub fn export(
    fig: &Figure,
    pairs: &[PairRecord],
    sizes: &[usize],
    preset: Option<&str>,
    path: &Path,
) -> CliResult<Vec<TableRow>> {
    let rows = select_rows(fig, pairs, sizes, preset)?;
    let mut buf = Vec::new();
    write_table(&mut buf, fig, &rows)?;
    crate::record::write_atomic(path, &buf)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip_is_exact() {
        let rows = vec![
            TableRow {
                size: 4,
                integrable: 0.1 + 0.2,
                chaotic_mean: 1.0 / 3.0,
                chaotic_sem: 0.0,
            },
            TableRow {
                size: 5,
                integrable: 0.145_000_000_000_000_01,
                chaotic_mean: 0.218,
                chaotic_sem: 1e-17,
            },
        ];
        let mut buf = Vec::new();
        write_table(&mut buf, figure("fig1-left").unwrap(), &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("size,integrable,chaotic_mean,chaotic_sem\n"));
        assert_eq!(read_table(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn figure_registry() {
        assert_eq!(
            figure("fig2-right").unwrap().seeds,
            Some(SeedKind::NumberOperators)
        );
        assert!(figure("fig9").is_err());
    }
}
