//! Corpus ingestion: timestamped, pre-tokenized documents bucketed into an
//! ordered sequence of timepoints.
//!
//! Input is line-delimited JSON, one record per line:
//! `{"id": "...", "timestamp": "...", "tokens": ["...", ...]}`.
//! Records are bucketed either by calendar day (in a declared timezone) or by
//! an explicit per-record field. Tokens are case-folded on the way in; any
//! POS tagging or entity extraction happens upstream of this crate.

use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime, TimeZone};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One pre-tokenized document. Duplicate tokens are permitted in the list;
/// they collapse to a set wherever co-occurrence is counted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    #[serde(rename = "id")]
    pub doc_id: String,
    /// Original ISO-8601 timestamp string, kept verbatim for round-tripping.
    pub timestamp: String,
    pub tokens: Vec<String>,
}

impl Document {
    /// Unique tokens of this document (set semantics).
    pub fn token_set(&self) -> BTreeSet<&str> {
        self.tokens.iter().map(String::as_str).collect()
    }
}

/// All documents that fall into one bucket of the time axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timepoint {
    pub index: usize,
    pub label: String,
    pub documents: Vec<Document>,
}

/// The whole corpus: consecutive timepoints plus a global token -> document
/// frequency map (number of documents containing the token).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimepointedCorpus {
    pub timepoints: Vec<Timepoint>,
    pub vocabulary: BTreeMap<String, u64>,
}

/// How records are grouped into timepoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bucketing {
    /// Group by calendar day in the declared timezone.
    CalendarDay,
    /// Group by the value of a per-record field, e.g. `{"timepoint": "wave1"}`.
    ExplicitField(String),
}

/// Ingestion options; see [`ingest`].
#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub bucketing: Bucketing,
    /// Timezone in which calendar days are cut.
    pub utc_offset: FixedOffset,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            bucketing: Bucketing::CalendarDay,
            utc_offset: FixedOffset::east_opt(0).unwrap(),
        }
    }
}

/// One rejected input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRecord {
    /// 1-based line number in the input stream.
    pub line: usize,
    pub reason: String,
}

/// What happened during ingestion: how many records made it in, which lines
/// were skipped and why.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub ingested: usize,
    pub skipped: Vec<SkippedRecord>,
}

impl IngestReport {
    pub fn skip_count(&self) -> usize {
        self.skipped.len()
    }
}

/// Parse a timezone offset such as `+00:00`, `-05:00`, `Z`, or `UTC`.
pub fn parse_utc_offset(spec: &str) -> Result<FixedOffset> {
    if spec.eq_ignore_ascii_case("utc") || spec == "Z" || spec.is_empty() {
        return Ok(FixedOffset::east_opt(0).unwrap());
    }
    let (sign, rest) = match spec.as_bytes().first() {
        Some(b'+') => (1i32, &spec[1..]),
        Some(b'-') => (-1i32, &spec[1..]),
        _ => {
            return Err(Error::InvalidConfig(format!(
                "timezone: expected +HH:MM, -HH:MM, Z or UTC, got {spec:?}"
            )))
        }
    };
    let mut parts = rest.splitn(2, ':');
    let hours: i32 = parts
        .next()
        .and_then(|h| h.parse().ok())
        .ok_or_else(|| Error::InvalidConfig(format!("timezone: bad hours in {spec:?}")))?;
    let minutes: i32 = match parts.next() {
        Some(m) => m
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("timezone: bad minutes in {spec:?}")))?,
        None => 0,
    };
    let seconds = sign * (hours * 3600 + minutes * 60);
    FixedOffset::east_opt(seconds)
        .ok_or_else(|| Error::InvalidConfig(format!("timezone: offset {spec:?} out of range")))
}

/// Accepts RFC 3339, a naive `YYYY-MM-DDTHH:MM:SS[.fff]` (interpreted in the
/// declared timezone), or a bare `YYYY-MM-DD` date (midnight).
fn parse_timestamp(s: &str, tz: &FixedOffset) -> Option<DateTime<FixedOffset>> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.with_timezone(tz));
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f") {
        return tz.from_local_datetime(&naive).single();
    }
    if let Ok(date) = s.parse::<NaiveDate>() {
        return tz
            .from_local_datetime(&date.and_hms_opt(0, 0, 0).unwrap())
            .single();
    }
    None
}

#[derive(Deserialize)]
struct RawRecord {
    id: String,
    timestamp: String,
    tokens: Vec<String>,
    #[serde(flatten)]
    extra: BTreeMap<String, serde_json::Value>,
}

enum BucketKey {
    Day(NaiveDate),
    Named(String),
}

/// Read line-delimited records and bucket them into a [`TimepointedCorpus`].
///
/// Malformed lines (bad JSON, unparseable timestamp, empty token list after
/// case-folding, duplicate doc id, missing bucket field) are skipped and
/// reported per line. Zero valid records is a fatal [`Error::EmptyCorpus`].
pub fn ingest<R: BufRead>(reader: R, options: &IngestOptions) -> Result<(TimepointedCorpus, IngestReport)> {
    let mut report = IngestReport::default();
    let mut seen_ids: BTreeSet<String> = BTreeSet::new();
    // bucket -> documents with their parse time, kept for final ordering
    let mut day_buckets: BTreeMap<NaiveDate, Vec<(DateTime<FixedOffset>, Document)>> = BTreeMap::new();
    let mut named_buckets: BTreeMap<String, Vec<(DateTime<FixedOffset>, Document)>> = BTreeMap::new();

    for (line_no, line) in reader.lines().enumerate() {
        let line_no = line_no + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut skip = |reason: String, report: &mut IngestReport| {
            report.skipped.push(SkippedRecord { line: line_no, reason });
        };

        let raw: RawRecord = match serde_json::from_str(&line) {
            Ok(r) => r,
            Err(e) => {
                skip(format!("invalid JSON: {e}"), &mut report);
                continue;
            }
        };
        let tokens: Vec<String> = raw
            .tokens
            .iter()
            .map(|t| t.to_lowercase())
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            skip("empty token list".to_string(), &mut report);
            continue;
        }
        let Some(ts) = parse_timestamp(&raw.timestamp, &options.utc_offset) else {
            skip(format!("unparseable timestamp {:?}", raw.timestamp), &mut report);
            continue;
        };
        if !seen_ids.insert(raw.id.clone()) {
            skip(format!("duplicate doc id {:?}", raw.id), &mut report);
            continue;
        }
        let key = match &options.bucketing {
            Bucketing::CalendarDay => BucketKey::Day(ts.date_naive()),
            Bucketing::ExplicitField(field) => match raw.extra.get(field) {
                Some(serde_json::Value::String(s)) => BucketKey::Named(s.clone()),
                Some(serde_json::Value::Number(n)) => BucketKey::Named(n.to_string()),
                Some(other) => {
                    skip(
                        format!("bucket field {field:?} has non-scalar value {other}"),
                        &mut report,
                    );
                    continue;
                }
                None => {
                    skip(format!("missing bucket field {field:?}"), &mut report);
                    continue;
                }
            },
        };
        let doc = Document {
            doc_id: raw.id,
            timestamp: raw.timestamp,
            tokens,
        };
        match key {
            BucketKey::Day(d) => day_buckets.entry(d).or_default().push((ts, doc)),
            BucketKey::Named(n) => named_buckets.entry(n).or_default().push((ts, doc)),
        }
        report.ingested += 1;
    }

    if report.ingested == 0 {
        return Err(Error::EmptyCorpus {
            skipped: report.skip_count(),
        });
    }

    // Order buckets by time and fix labels.
    let mut ordered: Vec<(String, Vec<(DateTime<FixedOffset>, Document)>)> = Vec::new();
    if !day_buckets.is_empty() {
        let multi_year = {
            let mut years = day_buckets.keys().map(|d| d.format("%Y").to_string());
            let first = years.next().unwrap();
            years.any(|y| y != first)
        };
        for (date, docs) in day_buckets {
            let label = if multi_year {
                date.format("%Y-%m-%d").to_string()
            } else {
                format!("{}/{}", date.format("%-m"), date.format("%-d"))
            };
            ordered.push((label, docs));
        }
    } else {
        // Explicit buckets are ordered by their earliest timestamp, ties by label.
        let mut buckets: Vec<(String, Vec<(DateTime<FixedOffset>, Document)>)> =
            named_buckets.into_iter().collect();
        buckets.sort_by(|(la, da), (lb, db)| {
            let ta = da.iter().map(|(t, _)| t).min().unwrap();
            let tb = db.iter().map(|(t, _)| t).min().unwrap();
            ta.cmp(tb).then_with(|| la.cmp(lb))
        });
        ordered = buckets;
    }

    let mut timepoints = Vec::with_capacity(ordered.len());
    for (index, (label, mut docs)) in ordered.into_iter().enumerate() {
        docs.sort_by(|(ta, da), (tb, db)| ta.cmp(tb).then_with(|| da.doc_id.cmp(&db.doc_id)));
        timepoints.push(Timepoint {
            index,
            label,
            documents: docs.into_iter().map(|(_, d)| d).collect(),
        });
    }

    let mut vocabulary: BTreeMap<String, u64> = BTreeMap::new();
    for tp in &timepoints {
        for doc in &tp.documents {
            for token in doc.token_set() {
                *vocabulary.entry(token.to_string()).or_insert(0) += 1;
            }
        }
    }

    Ok((
        TimepointedCorpus {
            timepoints,
            vocabulary,
        },
        report,
    ))
}

/// Per-timepoint summary row: document count and unique-token count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimepointStats {
    pub index: usize,
    pub label: String,
    pub documents: usize,
    pub unique_tokens: usize,
}

/// One row per timepoint, in order.
pub fn corpus_stats(corpus: &TimepointedCorpus) -> Vec<TimepointStats> {
    corpus
        .timepoints
        .iter()
        .map(|tp| {
            let tokens: BTreeSet<&str> = tp
                .documents
                .iter()
                .flat_map(|d| d.token_set())
                .collect();
            TimepointStats {
                index: tp.index,
                label: tp.label.clone(),
                documents: tp.documents.len(),
                unique_tokens: tokens.len(),
            }
        })
        .collect()
}

/// Render stats as an aligned text table.
pub fn stats_table(stats: &[TimepointStats]) -> String {
    let label_width = stats
        .iter()
        .map(|s| s.label.len())
        .chain(["timepoint".len()])
        .max()
        .unwrap_or(9);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<5} {:<label_width$} {:>6} {:>7}\n",
        "index", "timepoint", "docs", "tokens"
    ));
    for s in stats {
        out.push_str(&format!(
            "{:<5} {:<label_width$} {:>6} {:>7}\n",
            s.index, s.label, s.documents, s.unique_tokens
        ));
    }
    out
}

impl TimepointedCorpus {
    /// Total number of documents across all timepoints.
    pub fn document_count(&self) -> usize {
        self.timepoints.iter().map(|tp| tp.documents.len()).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn opts() -> IngestOptions {
        IngestOptions::default()
    }

    fn line(id: &str, ts: &str, tokens: &[&str]) -> String {
        serde_json::json!({"id": id, "timestamp": ts, "tokens": tokens}).to_string()
    }

    #[test]
    fn buckets_by_calendar_day() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &["mask", "school"]),
            line("d2", "2020-08-19T23:59:59Z", &["mask"]),
            line("d3", "2020-08-20T00:00:01Z", &["campus"]),
        ]
        .join("\n");
        let (corpus, report) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(report.ingested, 3);
        assert_eq!(corpus.timepoints.len(), 2);
        assert_eq!(corpus.timepoints[0].documents.len(), 2);
        assert_eq!(corpus.timepoints[1].documents.len(), 1);
        assert_eq!(corpus.timepoints[0].label, "8/19");
        assert_eq!(corpus.timepoints[1].label, "8/20");
    }

    #[test]
    fn empty_token_record_is_skipped_and_counted() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &[]),
            line("d2", "2020-08-19T11:00:00Z", &["mask"]),
        ]
        .join("\n");
        let (corpus, report) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(report.skip_count(), 1);
        assert_eq!(report.skipped[0].line, 1);
        assert_eq!(corpus.document_count(), 1);
    }

    #[test]
    fn zero_valid_records_is_fatal() {
        let input = "not json at all\n{\"id\":\"x\"}\n";
        let err = ingest(Cursor::new(input), &opts()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus { skipped: 2 }));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &["a"]),
            "{broken".to_string(),
            line("d2", "2020-08-19T11:00:00Z", &["b"]),
        ]
        .join("\n");
        let (_, report) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].line, 2);
    }

    #[test]
    fn duplicate_doc_id_is_skipped() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &["a"]),
            line("d1", "2020-08-19T11:00:00Z", &["b"]),
        ]
        .join("\n");
        let (corpus, report) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(corpus.document_count(), 1);
        assert_eq!(report.skip_count(), 1);
    }

    #[test]
    fn tokens_are_case_folded() {
        let input = line("d1", "2020-08-19T10:00:00Z", &["Mask", "SCHOOL"]);
        let (corpus, _) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(corpus.timepoints[0].documents[0].tokens, vec!["mask", "school"]);
    }

    #[test]
    fn explicit_field_bucketing_orders_by_earliest_timestamp() {
        let mk = |id: &str, ts: &str, tp: &str| {
            serde_json::json!({"id": id, "timestamp": ts, "tokens": ["t"], "timepoint": tp})
                .to_string()
        };
        let input = [
            mk("d1", "2020-08-20T10:00:00Z", "late"),
            mk("d2", "2020-08-19T10:00:00Z", "early"),
            mk("d3", "2020-08-21T10:00:00Z", "early"),
        ]
        .join("\n");
        let options = IngestOptions {
            bucketing: Bucketing::ExplicitField("timepoint".to_string()),
            ..opts()
        };
        let (corpus, _) = ingest(Cursor::new(input), &options).unwrap();
        assert_eq!(corpus.timepoints[0].label, "early");
        assert_eq!(corpus.timepoints[1].label, "late");
        assert_eq!(corpus.timepoints[0].documents.len(), 2);
    }

    #[test]
    fn missing_explicit_field_is_skipped() {
        let input = line("d1", "2020-08-19T10:00:00Z", &["a"]);
        let options = IngestOptions {
            bucketing: Bucketing::ExplicitField("timepoint".to_string()),
            ..opts()
        };
        let err = ingest(Cursor::new(input), &options).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus { skipped: 1 }));
    }

    #[test]
    fn timezone_shifts_day_boundary() {
        // 2020-08-20T02:00Z is still 8/19 in UTC-05:00.
        let input = [
            line("d1", "2020-08-19T20:00:00Z", &["a"]),
            line("d2", "2020-08-20T02:00:00Z", &["b"]),
        ]
        .join("\n");
        let options = IngestOptions {
            utc_offset: parse_utc_offset("-05:00").unwrap(),
            ..opts()
        };
        let (corpus, _) = ingest(Cursor::new(input), &options).unwrap();
        assert_eq!(corpus.timepoints.len(), 1);
        assert_eq!(corpus.timepoints[0].label, "8/19");
    }

    #[test]
    fn multi_year_corpus_uses_iso_labels() {
        let input = [
            line("d1", "2020-12-31T10:00:00Z", &["a"]),
            line("d2", "2021-01-01T10:00:00Z", &["b"]),
        ]
        .join("\n");
        let (corpus, _) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(corpus.timepoints[0].label, "2020-12-31");
        assert_eq!(corpus.timepoints[1].label, "2021-01-01");
    }

    #[test]
    fn stats_collapse_tokens_to_sets() {
        let input = line("d1", "2020-08-19T10:00:00Z", &["a", "b", "a"]);
        let (corpus, _) = ingest(Cursor::new(input), &opts()).unwrap();
        let stats = corpus_stats(&corpus);
        assert_eq!(stats.len(), 1);
        assert_eq!(stats[0].documents, 1);
        assert_eq!(stats[0].unique_tokens, 2);
    }

    #[test]
    fn shared_tokens_count_once_per_timepoint() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &["a", "b"]),
            line("d2", "2020-08-19T11:00:00Z", &["a", "b"]),
        ]
        .join("\n");
        let (corpus, _) = ingest(Cursor::new(input), &opts()).unwrap();
        let stats = corpus_stats(&corpus);
        assert_eq!(stats[0].unique_tokens, 2);
    }

    #[test]
    fn doc_count_sum_matches_ingested() {
        let input = (0..7)
            .map(|i| line(&format!("d{i}"), &format!("2020-08-{:02}T10:00:00Z", 19 + i % 3), &["t"]))
            .collect::<Vec<_>>()
            .join("\n");
        let (corpus, report) = ingest(Cursor::new(input), &opts()).unwrap();
        assert_eq!(corpus.document_count(), report.ingested);
    }

    #[test]
    fn canonical_form_round_trips() {
        let input = [
            line("d1", "2020-08-19T10:00:00Z", &["Mask", "school"]),
            line("d2", "2020-08-20T10:00:00Z", &["campus", "mask"]),
        ]
        .join("\n");
        let (corpus, _) = ingest(Cursor::new(input), &opts()).unwrap();

        // JSON round-trip is the canonical-form identity.
        let json = corpus.to_json().unwrap();
        let reloaded = TimepointedCorpus::from_json(&json).unwrap();
        assert_eq!(corpus, reloaded);

        // Re-ingesting the corpus's own records is idempotent.
        let records: Vec<String> = corpus
            .timepoints
            .iter()
            .flat_map(|tp| tp.documents.iter())
            .map(|d| {
                serde_json::json!({"id": d.doc_id, "timestamp": d.timestamp, "tokens": d.tokens})
                    .to_string()
            })
            .collect();
        let (again, _) = ingest(Cursor::new(records.join("\n")), &opts()).unwrap();
        assert_eq!(corpus, again);
    }
}
