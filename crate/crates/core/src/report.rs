//! Summary tables computed from catalog records.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::catalog::DessinRecord;
use crate::hypermap::SymmetryGroup;
use crate::lifts::{totals, LiftError, LiftTotals};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    TfCounts,
    K6,
    K12,
    K18,
    K24,
    K24Sym,
    Totals,
}

impl Table {
    pub const ALL: [Table; 7] = [
        Table::TfCounts,
        Table::K6,
        Table::K12,
        Table::K18,
        Table::K24,
        Table::K24Sym,
        Table::Totals,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Table::TfCounts => "tf-counts",
            Table::K6 => "k6",
            Table::K12 => "k12",
            Table::K18 => "k18",
            Table::K24 => "k24",
            Table::K24Sym => "k24sym",
            Table::Totals => "totals",
        }
    }
}

impl FromStr for Table {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Table::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown table {s:?}"))
    }
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn symmetry(r: &DessinRecord) -> SymmetryGroup {
    r.hypermap()
        .expect("validated record decodes")
        .automorphisms()
        .structure()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TfCountRow {
    pub index: usize,
    pub classes: usize,
    /// `Σ index / |Aut|`, the number of subgroups.
    pub rooted: usize,
}

pub fn tf_counts(records: &[DessinRecord]) -> Vec<TfCountRow> {
    let mut rows: BTreeMap<usize, TfCountRow> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_torsion_free()) {
        let row = rows.entry(r.index).or_insert(TfCountRow {
            index: r.index,
            classes: 0,
            rooted: 0,
        });
        row.classes += 1;
        row.rooted += r.index / r.aut_order;
    }
    rows.into_values().collect()
}

/// One torsion-free class and the classes retracting onto it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StratumRow {
    pub label: String,
    pub symmetry: String,
    pub tf: usize,
    pub e2_positive: usize,
    pub e3_one: usize,
    pub e3_two: usize,
    pub e3_three_or_more: usize,
    pub one_to_one: u64,
    pub two_to_one: u64,
}

impl StratumRow {
    fn add(&mut self, r: &DessinRecord) {
        match (r.e2, r.e3) {
            (0, 0) => self.tf += 1,
            (0, 1) => self.e3_one += 1,
            (0, 2) => self.e3_two += 1,
            (0, _) => self.e3_three_or_more += 1,
            _ => self.e2_positive += 1,
        }
        if let Some(p) = r.lift_profile() {
            self.one_to_one += p.one_to_one;
            self.two_to_one += p.two_to_one;
        }
    }

    fn absorb(&mut self, other: &StratumRow) {
        self.tf += other.tf;
        self.e2_positive += other.e2_positive;
        self.e3_one += other.e3_one;
        self.e3_two += other.e3_two;
        self.e3_three_or_more += other.e3_three_or_more;
        self.one_to_one += other.one_to_one;
        self.two_to_one += other.two_to_one;
    }

    pub fn classes(&self) -> usize {
        self.tf + self.e2_positive + self.e3_one + self.e3_two + self.e3_three_or_more
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumTable {
    pub tf_index: usize,
    pub rows: Vec<StratumRow>,
    pub total: StratumRow,
}

pub fn stratum_table(records: &[DessinRecord], tf_index: usize) -> StratumTable {
    let mut rows: BTreeMap<&str, StratumRow> = BTreeMap::new();
    for r in records.iter().filter(|r| r.tf_index() == tf_index) {
        rows.entry(r.tf_code.as_str()).or_default().add(r);
    }
    for r in records
        .iter()
        .filter(|r| r.tf_index() == tf_index && r.is_torsion_free())
    {
        if let Some(row) = rows.get_mut(r.canonical_code.as_str()) {
            row.label = r.id.clone();
            row.symmetry = symmetry(r).to_string();
        }
    }
    let mut rows: Vec<StratumRow> = rows.into_values().collect();
    rows.sort_by(|a, b| a.label.cmp(&b.label));
    let mut total = StratumRow {
        label: "TOT".into(),
        ..StratumRow::default()
    };
    rows.iter().for_each(|row| total.absorb(row));
    StratumTable {
        tf_index,
        rows,
        total,
    }
}

/// Torsion-free index-24 classes grouped by loop count and symmetry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopSymmetryRow {
    pub loops: usize,
    /// `None` for the loop-free row, where symmetry is not distinguished.
    pub symmetry: Option<SymmetryGroup>,
    pub graphs: usize,
    /// Classes per graph when this is the same for every graph in the row.
    pub multiplicity: Option<usize>,
    pub total: usize,
    pub partitions: Vec<String>,
}

pub fn loop_symmetry_table(records: &[DessinRecord], tf_index: usize) -> Vec<LoopSymmetryRow> {
    let mut per_tf: BTreeMap<&str, usize> = BTreeMap::new();
    for r in records.iter().filter(|r| r.tf_index() == tf_index) {
        *per_tf.entry(r.tf_code.as_str()).or_default() += 1;
    }
    let mut rows: BTreeMap<(usize, Option<SymmetryGroup>), LoopSymmetryRow> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.index == tf_index && r.is_torsion_free())
    {
        let symmetry = (r.loop_count > 0).then(|| symmetry(r));
        let count = per_tf.get(r.canonical_code.as_str()).copied().unwrap_or(0);
        let row = rows
            .entry((r.loop_count, symmetry))
            .or_insert(LoopSymmetryRow {
                loops: r.loop_count,
                symmetry,
                graphs: 0,
                multiplicity: Some(count),
                total: 0,
                partitions: Vec::new(),
            });
        row.graphs += 1;
        row.total += count;
        if row.multiplicity != Some(count) {
            row.multiplicity = None;
        }
        row.partitions.push(r.partition());
    }
    let mut rows: Vec<LoopSymmetryRow> = rows.into_values().collect();
    for row in &mut rows {
        row.partitions.sort_by_key(|p| {
            std::cmp::Reverse(
                p.split(',')
                    .map(|w| w.parse::<usize>().unwrap_or(0))
                    .collect::<Vec<_>>(),
            )
        });
    }
    rows
}

/// The loopy rows of [`loop_symmetry_table`] with non-trivial symmetry.
pub fn symmetric_loopy(records: &[DessinRecord], tf_index: usize) -> Vec<LoopSymmetryRow> {
    loop_symmetry_table(records, tf_index)
        .into_iter()
        .filter(|row| row.loops > 0 && row.symmetry != Some(SymmetryGroup::Trivial))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Totals {
    pub strata: BTreeMap<usize, usize>,
    pub classes: usize,
    pub lifts: LiftTotals,
}

pub fn catalog_totals(records: &[DessinRecord]) -> Result<Totals, LiftError> {
    let mut strata = BTreeMap::new();
    for r in records {
        *strata.entry(r.tf_index()).or_default() += 1;
    }
    Ok(Totals {
        strata,
        classes: records.len(),
        lifts: totals(records)?,
    })
}

pub fn render(records: &[DessinRecord], table: Table) -> Result<String, LiftError> {
    let mut out = String::new();
    match table {
        Table::TfCounts => {
            writeln!(out, "{:>6} {:>8} {:>8}", "index", "classes", "rooted").unwrap();
            for row in tf_counts(records) {
                writeln!(out, "{:>6} {:>8} {:>8}", row.index, row.classes, row.rooted).unwrap();
            }
        }
        Table::K6 => render_stratum(&mut out, &stratum_table(records, 6)),
        Table::K12 => render_stratum(&mut out, &stratum_table(records, 12)),
        Table::K18 => render_stratum(&mut out, &stratum_table(records, 18)),
        Table::K24 => {
            writeln!(
                out,
                "{:>6} {:>10} {:>8} {:>6} {:>6}",
                "loops", "sym", "graphs", "mult", "tot"
            )
            .unwrap();
            let rows = loop_symmetry_table(records, 24);
            for row in &rows {
                let sym = row.symmetry.map_or("arb.".to_string(), |s| s.to_string());
                let mult = row
                    .multiplicity
                    .map_or("mixed".to_string(), |m| m.to_string());
                writeln!(
                    out,
                    "{:>6} {:>10} {:>8} {:>6} {:>6}",
                    row.loops, sym, row.graphs, mult, row.total
                )
                .unwrap();
            }
            let graphs: usize = rows.iter().map(|r| r.graphs).sum();
            let total: usize = rows.iter().map(|r| r.total).sum();
            writeln!(
                out,
                "{:>6} {:>10} {:>8} {:>6} {:>6}",
                "", "", graphs, "", total
            )
            .unwrap();
        }
        Table::K24Sym => {
            writeln!(
                out,
                "{:>6} {:>10} {:>8}  partitions",
                "loops", "sym", "graphs"
            )
            .unwrap();
            for row in symmetric_loopy(records, 24) {
                let sym = row.symmetry.map_or(String::new(), |s| s.to_string());
                let parts: Vec<String> = row.partitions.iter().map(|p| format!("[{p}]")).collect();
                writeln!(
                    out,
                    "{:>6} {:>10} {:>8}  {}",
                    row.loops,
                    sym,
                    row.graphs,
                    parts.join(" ")
                )
                .unwrap();
            }
        }
        Table::Totals => {
            let t = catalog_totals(records)?;
            for (index, count) in &t.strata {
                let lifts = t.lifts.per_stratum.get(index).copied().unwrap_or(0);
                writeln!(
                    out,
                    "stratum {index:>3}: {count:>5} classes {lifts:>5} lifts"
                )
                .unwrap();
            }
            writeln!(out, "classes: {}", t.classes).unwrap();
            writeln!(out, "lifts: {}", t.lifts.total).unwrap();
            writeln!(out, "bijective classes: {}", t.lifts.bijective).unwrap();
            writeln!(
                out,
                "multi-lift classes: {} carrying {} lifts",
                t.lifts.multi_lift_groups, t.lifts.multi_lift_lifts
            )
            .unwrap();
        }
    }
    Ok(out)
}

fn render_stratum(out: &mut String, table: &StratumTable) {
    writeln!(
        out,
        "{:<22} {:>8} {:>3} {:>5} {:>5} {:>5} {:>6} {:>5} {:>5}",
        "tf class", "sym", "TF", "e2>0", "e3=1", "e3=2", "e3>=3", "1:1", "2:1"
    )
    .unwrap();
    for row in table.rows.iter().chain(std::iter::once(&table.total)) {
        writeln!(
            out,
            "{:<22} {:>8} {:>3} {:>5} {:>5} {:>5} {:>6} {:>5} {:>5}",
            row.label,
            row.symmetry,
            row.tf,
            row.e2_positive,
            row.e3_one,
            row.e3_two,
            row.e3_three_or_more,
            row.one_to_one,
            row.two_to_one
        )
        .unwrap();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_catalog;

    #[test]
    fn table_names_round_trip() {
        for t in Table::ALL {
            assert_eq!(t.name().parse::<Table>(), Ok(t));
        }
        assert!("k30".parse::<Table>().is_err());
    }

    #[test]
    fn index_twelve_tables() {
        let records = build_catalog(12).unwrap();
        let t = stratum_table(&records, 12);
        assert_eq!(t.rows.len(), 6);
        assert_eq!(
            (
                t.total.tf,
                t.total.e2_positive,
                t.total.e3_one,
                t.total.e3_two,
                t.total.e3_three_or_more
            ),
            (6, 14, 4, 3, 1)
        );
        assert_eq!((t.total.one_to_one, t.total.two_to_one), (41, 28));
        let counts = tf_counts(&records);
        assert_eq!(
            counts
                .iter()
                .map(|r| (r.index, r.classes, r.rooted))
                .collect::<Vec<_>>(),
            vec![(6, 2, 4), (12, 6, 32)]
        );
    }

    #[test]
    fn reports_follow_records() {
        let mut records = build_catalog(12).unwrap();
        let before = render(&records, Table::K12).unwrap();
        let r = records
            .iter_mut()
            .find(|r| r.tf_index() == 12 && r.e2 > 0)
            .unwrap();
        r.lift_two_to_one = Some(5);
        assert_ne!(render(&records, Table::K12).unwrap(), before);
    }
}
