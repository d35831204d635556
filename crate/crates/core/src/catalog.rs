//! Catalog records, their JSON-lines encoding, and the pipeline that builds
//! the genus-0 catalog stratum by stratum.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::enumerate::{enumerate, EnumerationConstraints, EnumerationError};
use crate::hypermap::{CanonicalCode, Hypermap, HypermapError, SubgroupType};
use crate::lifts::{lift_profile, LiftError, LiftProfile, K3_TF_INDEX};
use crate::torsion::{expand_classes, tf_retract, TorsionError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unknown fields {fields:?}")]
    UnknownFields { line: usize, fields: Vec<String> },
    #[error("line {line}: record {id}: {message}")]
    Validation {
        line: usize,
        id: String,
        message: String,
    },
    #[error("no record with id {0}")]
    UnknownId(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Hypermap(#[from] HypermapError),
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Torsion(#[from] TorsionError),
    #[error(transparent)]
    Lift(#[from] LiftError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AssignmentCounts {
    pub white: usize,
    pub black: usize,
}

/// One conjugacy class of subgroups of `PSL(2,Z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DessinRecord {
    pub id: String,
    pub canonical_code: String,
    pub index: usize,
    pub genus: usize,
    pub h: usize,
    pub e2: usize,
    pub e3: usize,
    pub cusp_widths: Vec<usize>,
    pub aut_order: usize,
    pub loop_count: usize,
    pub tf_code: String,
    pub assignment: AssignmentCounts,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_one_to_one: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_two_to_one: Option<u64>,
    /// Fields not part of the schema, kept when reading in lax mode.
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl DessinRecord {
    /// Computes every field except `id` and the lift counts.
    pub fn from_hypermap(h: &Hypermap) -> Self {
        let ty = h.subgroup_type();
        let widths = h.cusp_widths();
        let tf_code = if h.is_torsion_free() {
            h.canonical_code()
        } else {
            tf_retract(h).canonical_code()
        };
        Self {
            id: String::new(),
            canonical_code: h.canonical_code().to_hex(),
            index: ty.index,
            genus: ty.genus,
            h: ty.cusps,
            e2: ty.e2,
            e3: ty.e3,
            loop_count: widths.loops(),
            cusp_widths: widths.0,
            aut_order: h.automorphisms().order(),
            tf_code: tf_code.to_hex(),
            assignment: AssignmentCounts {
                white: ty.e3,
                black: ty.e2,
            },
            lift_one_to_one: None,
            lift_two_to_one: None,
            extra: Map::new(),
        }
    }

    pub fn code(&self) -> Result<CanonicalCode, HypermapError> {
        CanonicalCode::from_hex(&self.canonical_code)
    }

    pub fn hypermap(&self) -> Result<Hypermap, HypermapError> {
        self.code()?.decode()
    }

    pub fn subgroup_type(&self) -> SubgroupType {
        SubgroupType {
            index: self.index,
            genus: self.genus,
            cusps: self.h,
            e2: self.e2,
            e3: self.e3,
        }
    }

    pub fn is_torsion_free(&self) -> bool {
        self.e2 == 0 && self.e3 == 0
    }

    /// Index of the torsion-free retraction, read from the first byte of
    /// `tf_code` (zero if the code is not valid hex).
    pub fn tf_index(&self) -> usize {
        hex::decode(self.tf_code.get(..2).unwrap_or("")).map_or(0, |b| b[0] as usize)
    }

    pub fn partition(&self) -> String {
        self.cusp_widths
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn lift_profile(&self) -> Option<LiftProfile> {
        Some(LiftProfile {
            one_to_one: self.lift_one_to_one?,
            two_to_one: self.lift_two_to_one?,
        })
    }

    pub fn set_lift_profile(&mut self, p: LiftProfile) {
        self.lift_one_to_one = Some(p.one_to_one);
        self.lift_two_to_one = Some(p.two_to_one);
    }

    /// Cheap structural checks performed on every record that is read.
    pub fn validate(&self) -> Result<(), String> {
        let code = self.code().map_err(|e| format!("canonical_code: {e}"))?;
        let tf = CanonicalCode::from_hex(&self.tf_code).map_err(|e| format!("tf_code: {e}"))?;
        if code.index() != self.index {
            return Err(format!(
                "canonical_code has degree {}, index is {}",
                code.index(),
                self.index
            ));
        }
        let expected = self.index + 3 * self.e2 + 2 * self.e3;
        if expected != tf.index() {
            return Err(format!(
                "index + 3e2 + 2e3 = {expected} but tf_code has index {}",
                tf.index()
            ));
        }
        if self.cusp_widths.iter().sum::<usize>() != self.index || self.cusp_widths.len() != self.h
        {
            return Err("cusp widths do not match index and cusp count".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReadMode {
    /// Reject records carrying unknown fields.
    #[default]
    Strict,
    /// Keep unknown fields and write them back out.
    Lax,
}

pub fn read_jsonl<R: BufRead>(
    reader: R,
    mode: ReadMode,
) -> Result<Vec<DessinRecord>, CatalogError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DessinRecord =
            serde_json::from_str(&line).map_err(|e| CatalogError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        if mode == ReadMode::Strict && !record.extra.is_empty() {
            return Err(CatalogError::UnknownFields {
                line: line_no,
                fields: record.extra.keys().cloned().collect(),
            });
        }
        record
            .validate()
            .map_err(|message| CatalogError::Validation {
                line: line_no,
                id: record.id.clone(),
                message,
            })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_jsonl<W: Write>(mut writer: W, records: &[DessinRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}

pub fn read_file(path: &Path, mode: ReadMode) -> Result<Vec<DessinRecord>, CatalogError> {
    read_jsonl(BufReader::new(File::open(path)?), mode)
}

pub fn write_file(path: &Path, records: &[DessinRecord]) -> Result<(), CatalogError> {
    write_jsonl(BufWriter::new(File::create(path)?), records)?;
    Ok(())
}

/// `A, B, …, Z, AA, AB, …`
fn letters(mut i: usize) -> String {
    let mut s = Vec::new();
    loop {
        s.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    s.reverse();
    String::from_utf8(s).unwrap()
}

/// Sorts by canonical code and names each record after its partition, with
/// a letter suffix counting records of the same partition in that order.
pub fn assign_ids(records: &mut [DessinRecord]) {
    records.sort_by(|a, b| a.canonical_code.cmp(&b.canonical_code));
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for r in records.iter_mut() {
        let partition = r.partition();
        let n = seen.entry(partition.clone()).or_default();
        r.id = format!("{partition}-{}", letters(*n));
        *n += 1;
    }
}

pub fn enumerate_records(c: &EnumerationConstraints) -> Result<Vec<DessinRecord>, CatalogError> {
    let classes = enumerate(c)?.classes;
    let mut records: Vec<DessinRecord> = classes
        .par_iter()
        .map(|(_, h)| DessinRecord::from_hypermap(h))
        .collect();
    assign_ids(&mut records);
    Ok(records)
}

/// Every class whose torsion-free retraction is one of the given
/// torsion-free records.
pub fn expand_records(tf: &[DessinRecord]) -> Result<Vec<DessinRecord>, CatalogError> {
    let nested: Result<Vec<Vec<DessinRecord>>, CatalogError> = tf
        .par_iter()
        .map(|r| {
            let h = r.hypermap()?;
            Ok(expand_classes(&h)?
                .iter()
                .map(|x| DessinRecord::from_hypermap(&x.hypermap))
                .collect())
        })
        .collect();
    let mut records: Vec<DessinRecord> = nested?.into_iter().flatten().collect();
    assign_ids(&mut records);
    Ok(records)
}

pub fn attach_lifts(records: &mut [DessinRecord]) -> Result<(), CatalogError> {
    records.par_iter_mut().try_for_each(|r| {
        let p = lift_profile(&r.hypermap()?)?;
        r.set_lift_profile(p);
        Ok(())
    })
}

/// The genus-0 catalog of all classes with torsion-free index at most
/// `max_tf_index`, with lift counts where the rule table applies.
pub fn build_catalog(max_tf_index: usize) -> Result<Vec<DessinRecord>, CatalogError> {
    let mut tf = Vec::new();
    for index in (6..=max_tf_index).step_by(6) {
        tf.extend(enumerate_records(
            &EnumerationConstraints::torsion_free_genus_zero(index),
        )?);
    }
    let mut records = expand_records(&tf)?;
    let (mut k3, mut rest): (Vec<_>, Vec<_>) =
        records.drain(..).partition(|r| r.tf_index() <= K3_TF_INDEX);
    attach_lifts(&mut k3)?;
    k3.append(&mut rest);
    assign_ids(&mut k3);
    Ok(k3)
}

pub fn find<'a>(records: &'a [DessinRecord], id: &str) -> Result<&'a DessinRecord, CatalogError> {
    records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| CatalogError::UnknownId(id.to_string()))
}

/// The dessin as a bipartite graph: `w*` nodes are the `σ`-cycles (unfilled),
/// `b*` nodes the `α`-cycles (filled), and each edge is labelled with the
/// width of the `φ`-cycle containing it.
pub fn to_dot(record: &DessinRecord) -> Result<String, CatalogError> {
    let h = record.hypermap()?;
    let whites = h.sigma().cycles();
    let blacks = h.alpha().cycles();
    let mut white_of = vec![0; h.n()];
    let mut black_of = vec![0; h.n()];
    for (i, c) in whites.iter().enumerate() {
        c.iter().for_each(|&e| white_of[e] = i);
    }
    for (i, c) in blacks.iter().enumerate() {
        c.iter().for_each(|&e| black_of[e] = i);
    }
    let faces = h.faces();
    let face_of = h.face_of_edge();

    let mut dot = String::new();
    let quoted = record.id.replace('"', "");
    writeln!(dot, "graph \"{quoted}\" {{").unwrap();
    writeln!(dot, "  label=\"{quoted} [{}]\";", record.partition()).unwrap();
    for i in 0..whites.len() {
        writeln!(dot, "  w{i} [shape=circle, style=solid, label=\"\"];").unwrap();
    }
    for i in 0..blacks.len() {
        writeln!(
            dot,
            "  b{i} [shape=circle, style=filled, fillcolor=black, label=\"\"];"
        )
        .unwrap();
    }
    for e in 0..h.n() {
        writeln!(
            dot,
            "  w{} -- b{} [label=\"{}\"];",
            white_of[e],
            black_of[e],
            faces[face_of[e]].len()
        )
        .unwrap();
    }
    dot.push_str("}\n");
    Ok(dot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypermap::fixtures::four_one_one;

    #[test]
    fn letter_sequence() {
        assert_eq!(letters(0), "A");
        assert_eq!(letters(25), "Z");
        assert_eq!(letters(26), "AA");
        assert_eq!(letters(27), "AB");
        assert_eq!(letters(26 + 26 * 26), "AAA");
    }

    #[test]
    fn record_fields() {
        let r = DessinRecord::from_hypermap(&four_one_one());
        assert_eq!((r.index, r.genus, r.h, r.e2, r.e3), (6, 0, 3, 0, 0));
        assert_eq!(r.cusp_widths, vec![4, 1, 1]);
        assert_eq!((r.aut_order, r.loop_count, r.tf_index()), (2, 2, 6));
        assert_eq!(r.partition(), "4,1,1");
        assert!(r.validate().is_ok());
    }

    #[test]
    fn index_six_stratum() {
        let records = build_catalog(6).unwrap();
        assert_eq!(records.len(), 6);
        let ids: Vec<&str> = records.iter().map(|r| r.id.as_str()).collect();
        assert!(ids.contains(&"4,1,1-A") && ids.contains(&"2,2,2-A") && ids.contains(&"1-A"));
        let lifts: u64 = records
            .iter()
            .map(|r| r.lift_profile().unwrap().total())
            .sum();
        assert_eq!(lifts, 14);
    }

    #[test]
    fn jsonl_modes() {
        let mut records = build_catalog(6).unwrap();
        records[0].extra.insert("note".into(), Value::from("kept"));
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &records).unwrap();
        assert!(matches!(
            read_jsonl(&buf[..], ReadMode::Strict),
            Err(CatalogError::UnknownFields { line: 1, .. })
        ));
        let back = read_jsonl(&buf[..], ReadMode::Lax).unwrap();
        assert_eq!(back, records);
        let mut again = Vec::new();
        write_jsonl(&mut again, &back).unwrap();
        assert_eq!(again, buf);
        assert!(read_jsonl(&b""[..], ReadMode::Strict).unwrap().is_empty());
    }

    #[test]
    fn validation_errors() {
        let mut r = DessinRecord::from_hypermap(&four_one_one());
        r.e2 = 1;
        let line = serde_json::to_string(&r).unwrap();
        let input = format!("\n{line}\n");
        assert!(matches!(
            read_jsonl(input.as_bytes(), ReadMode::Strict),
            Err(CatalogError::Validation { line: 2, .. })
        ));
        assert!(matches!(
            read_jsonl(&b"{\"id\": 3}\n"[..], ReadMode::Strict),
            Err(CatalogError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn dot_export() {
        let mut r = DessinRecord::from_hypermap(&four_one_one());
        r.id = "4,1,1-A".into();
        let dot = to_dot(&r).unwrap();
        assert_eq!(dot.matches(" -- ").count(), 6);
        assert_eq!(dot.matches("style=filled").count(), 3);
        assert_eq!(dot.matches("style=solid").count(), 2);
        assert_eq!(dot.matches("label=\"1\"").count(), 2);
    }
}
