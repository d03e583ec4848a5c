//! Fixed-memory external sorting of (key, multiplicity) records: sorted
//! deduplicated runs on disk, then a k-way merge that sums multiplicities
//! of equal keys.

use crate::error::{Error, Result};
use crate::wordfile::{Header, Variant, WordFileReader, WordFileWriter};
use num_bigint::BigInt;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::path::{Path, PathBuf};

/// Sorts a batch in place and merges duplicate keys by summing.
pub fn sort_dedup(batch: &mut Vec<(Vec<u8>, BigInt)>) {
    batch.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<(Vec<u8>, BigInt)> = Vec::with_capacity(batch.len());
    for (key, mult) in batch.drain(..) {
        match out.last_mut() {
            Some((last, acc)) if *last == key => *acc += mult,
            _ => out.push((key, mult)),
        }
    }
    *batch = out;
}

/// Writes one sorted run.
pub fn write_run(path: &Path, batch: &[(Vec<u8>, BigInt)], signed: bool) -> Result<Header> {
    let mut w = WordFileWriter::create(path, Variant::SortRun, signed, 0)?;
    for (key, mult) in batch {
        w.push(key, mult)?;
    }
    w.finish()
}

struct HeapItem {
    key: Vec<u8>,
    mult: BigInt,
    source: usize,
}

// BinaryHeap is a max-heap; reverse the order to pop the smallest key.
// Ties break on source index so the merge is deterministic.
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.key.cmp(&self.key).then(other.source.cmp(&self.source))
    }
}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.source == other.source
    }
}
impl Eq for HeapItem {}

/// Streams the merged, multiplicity-summed union of sorted runs into `emit`.
pub fn merge_runs(
    runs: &[PathBuf],
    mut emit: impl FnMut(&[u8], BigInt) -> Result<()>,
) -> Result<()> {
    let mut readers = runs.iter().map(|p| WordFileReader::open(p)).collect::<Result<Vec<_>>>()?;
    let mut heap = BinaryHeap::new();
    for (i, r) in readers.iter_mut().enumerate() {
        if let Some((key, mult)) = r.next_entry()? {
            heap.push(HeapItem { key, mult, source: i });
        }
    }
    let mut current: Option<(Vec<u8>, BigInt)> = None;
    while let Some(item) = heap.pop() {
        if let Some((key, mult)) = readers[item.source].next_entry()? {
            heap.push(HeapItem { key, mult, source: item.source });
        }
        match &mut current {
            Some((key, acc)) if *key == item.key => *acc += item.mult,
            Some((key, acc)) => {
                let done_key = std::mem::take(key);
                let done_acc = std::mem::replace(acc, item.mult);
                *key = item.key;
                if !num_traits::Zero::is_zero(&done_acc) {
                    emit(&done_key, done_acc)?;
                }
            }
            None => current = Some((item.key, item.mult)),
        }
    }
    if let Some((key, acc)) = current {
        if !num_traits::Zero::is_zero(&acc) {
            emit(&key, acc)?;
        }
    }
    Ok(())
}

/// External sort: consumes batches from `source`, spills sorted runs under
/// `tmp_dir`, then merges them into `out`. Batch boundaries are fixed by
/// `chunk_entries`, so outputs are identical across runs and thread counts.
///
/// Run files are named deterministically from `tag`; a pre-existing run that
/// passes validation is reused instead of being regenerated, which makes an
/// interrupted pass restartable.
pub struct ExternalSorter {
    tmp_dir: PathBuf,
    tag: String,
    chunk_entries: usize,
    signed: bool,
    batch: Vec<(Vec<u8>, BigInt)>,
    runs: Vec<PathBuf>,
    next_run: usize,
}

impl ExternalSorter {
    pub fn new(tmp_dir: &Path, tag: &str, chunk_entries: usize, signed: bool) -> Result<Self> {
        std::fs::create_dir_all(tmp_dir).map_err(|e| Error::io(tmp_dir, e))?;
        Ok(ExternalSorter {
            tmp_dir: tmp_dir.to_path_buf(),
            tag: tag.to_string(),
            chunk_entries: chunk_entries.max(1),
            signed,
            batch: Vec::new(),
            runs: Vec::new(),
            next_run: 0,
        })
    }

    fn run_path(&self, idx: usize) -> PathBuf {
        self.tmp_dir.join(format!("{}.run{:05}.twf", self.tag, idx))
    }

    /// True if a valid run with this index already exists on disk.
    fn reusable(&self, path: &Path) -> bool {
        path.exists() && crate::wordfile::validate(path).is_ok()
    }

    pub fn push(&mut self, key: Vec<u8>, mult: BigInt) -> Result<()> {
        self.batch.push((key, mult));
        if self.batch.len() >= self.chunk_entries {
            self.spill()?;
        }
        Ok(())
    }

    /// Number of records currently buffered (for tests).
    pub fn buffered(&self) -> usize {
        self.batch.len()
    }

    pub fn run_count(&self) -> usize {
        self.runs.len() + usize::from(!self.batch.is_empty())
    }

    fn spill(&mut self) -> Result<()> {
        if self.batch.is_empty() {
            return Ok(());
        }
        let path = self.run_path(self.next_run);
        self.next_run += 1;
        if self.reusable(&path) {
            self.batch.clear();
        } else {
            sort_dedup(&mut self.batch);
            write_run(&path, &self.batch, self.signed)?;
            self.batch.clear();
        }
        self.runs.push(path);
        Ok(())
    }

    /// Merges all runs into a writer, removing the runs on success.
    pub fn finish_into(mut self, writer: &mut WordFileWriter) -> Result<()> {
        self.spill()?;
        let runs = std::mem::take(&mut self.runs);
        merge_runs(&runs, |key, mult| writer.push(key, &mult))?;
        for run in &runs {
            let _ = std::fs::remove_file(run);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordfile::validate;
    use tempfile::tempdir;

    #[test]
    fn sort_dedup_sums() {
        let mut batch = vec![
            (vec![3u8], BigInt::from(1)),
            (vec![1u8], BigInt::from(2)),
            (vec![3u8], BigInt::from(5)),
        ];
        sort_dedup(&mut batch);
        assert_eq!(batch, vec![(vec![1u8], BigInt::from(2)), (vec![3u8], BigInt::from(6))]);
    }

    #[test]
    fn multi_run_merge_equals_single_pass() {
        let dir = tempdir().unwrap();
        let entries: Vec<(Vec<u8>, BigInt)> = (0..100u8)
            .map(|i| (vec![i % 25, i], BigInt::from(1 + i as i64 % 3)))
            .collect();

        let mut expected = entries.clone();
        sort_dedup(&mut expected);

        for chunk in [3usize, 17, 1000] {
            let mut sorter = ExternalSorter::new(dir.path(), &format!("t{chunk}"), chunk, false).unwrap();
            for (k, m) in entries.clone() {
                sorter.push(k, m).unwrap();
            }
            let out = dir.path().join(format!("out{chunk}.twf"));
            let mut w = WordFileWriter::create(&out, Variant::AbPower, false, 0).unwrap();
            sorter.finish_into(&mut w).unwrap();
            w.finish().unwrap();
            let mut r = WordFileReader::open(&out).unwrap();
            let mut got = Vec::new();
            while let Some(e) = r.next_entry().unwrap() {
                got.push(e);
            }
            assert_eq!(got, expected, "chunk size {chunk}");
            validate(&out).unwrap();
        }
    }

    #[test]
    fn signed_merge_drops_cancelled_keys() {
        let dir = tempdir().unwrap();
        let mut sorter = ExternalSorter::new(dir.path(), "sg", 2, true).unwrap();
        sorter.push(vec![1], BigInt::from(4)).unwrap();
        sorter.push(vec![2], BigInt::from(-1)).unwrap();
        sorter.push(vec![1], BigInt::from(-4)).unwrap();
        let out = dir.path().join("out.twf");
        let mut w = WordFileWriter::create(&out, Variant::GroupRing, true, 0).unwrap();
        sorter.finish_into(&mut w).unwrap();
        w.finish().unwrap();
        let mut r = WordFileReader::open(&out).unwrap();
        assert_eq!(r.next_entry().unwrap().unwrap(), (vec![2], BigInt::from(-1)));
        assert!(r.next_entry().unwrap().is_none());
    }
}
