//! Disk-backed computation of the cyclic trace numbers
//! zeta_n = tau((ab)^n) for a = C + C^2, b = D + D^2 + D^3.
//!
//! The expanded sum (ab)^n is kept as a sorted word file with
//! multiplicities. Each step left-multiplies every stored element by the six
//! two-letter products and re-sorts externally. tau((ab)^n) is then read off
//! by merge-joining a file against the inverted file: the identity
//! coefficient of (ab)^{2n} equals the inner product of (ab)^n with (ba)^n.
//!
//! The halved variant stores, for each word of the C-half expansion, only
//! the smaller of the element and its reverse-inverse ("small" file) or the
//! element itself when the two coincide ("equal" file); the primed twins are
//! classified after inverting the stream. zeta_n = 2 zeta_s + 4 zeta_e.

use crate::action::{left_mul, Letter, EXPANSION_PAIRS, HALF_EXPANSION};
use crate::element::DoubleTree;
use crate::error::{Error, Result};
use crate::extsort::ExternalSorter;
use crate::ring::GroupRingVector;
use crate::wordfile::{self, Variant, WordFileReader, WordFileWriter};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

/// Estimated bytes per buffered record during sorting.
const BYTES_PER_RECORD: u64 = 200;

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    /// Directory for cached word files and sort runs.
    pub workdir: PathBuf,
    /// Soft cap on sort-buffer memory, in bytes.
    pub memory_budget: u64,
    /// Worker threads for the expansion map stages.
    pub threads: usize,
    /// Log cache hits and stage progress to stderr.
    pub verbose: bool,
}

impl PipelineConfig {
    pub fn new(workdir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            workdir: workdir.into(),
            memory_budget: 1 << 30,
            threads: 0, // rayon default
            verbose: false,
        }
    }
}

/// One row of the zeta table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaRecord {
    pub n: u32,
    pub zeta_s: Option<BigUint>,
    pub zeta_e: Option<BigUint>,
    pub zeta: BigUint,
}

/// Word masses routed by the reverse-inverse comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassMasses {
    pub less: BigUint,
    pub equal: BigUint,
    pub greater: BigUint,
}

pub struct Pipeline {
    cfg: PipelineConfig,
    chunk_entries: usize,
    pool: rayon::ThreadPool,
    validated: Mutex<HashSet<PathBuf>>,
}

fn pow6(n: u32) -> BigUint {
    BigUint::from(6u8).pow(n)
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Self> {
        std::fs::create_dir_all(&cfg.workdir).map_err(|e| Error::io(&cfg.workdir, e))?;
        let chunk_entries = ((cfg.memory_budget / BYTES_PER_RECORD) as usize).max(1024);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
        Ok(Pipeline { cfg, chunk_entries, pool, validated: Mutex::new(HashSet::new()) })
    }

    pub fn workdir(&self) -> &Path {
        &self.cfg.workdir
    }

    fn log(&self, msg: impl AsRef<str>) {
        if self.cfg.verbose {
            eprintln!("[pipeline] {}", msg.as_ref());
        }
    }

    fn cache_path(&self, stem: &str, n: u32) -> PathBuf {
        self.cfg.workdir.join(format!("{stem}_{n:02}.twf"))
    }

    fn tmp_dir(&self) -> PathBuf {
        self.cfg.workdir.join("tmp")
    }

    /// Returns the path if the cached file is present and passes a full
    /// integrity scan; deletes it otherwise.
    fn cached(&self, path: &Path, variant: Variant, n: u32) -> Option<PathBuf> {
        if self.validated.lock().unwrap().contains(path) {
            return Some(path.to_path_buf());
        }
        if !path.exists() {
            return None;
        }
        match wordfile::validate(path) {
            Ok(h) if h.variant == variant && h.n == n => {
                self.log(format!("cache hit: {}", path.display()));
                self.validated.lock().unwrap().insert(path.to_path_buf());
                Some(path.to_path_buf())
            }
            _ => {
                self.log(format!("cache invalid, rebuilding: {}", path.display()));
                let _ = std::fs::remove_file(path);
                None
            }
        }
    }

    fn mark_valid(&self, path: &Path) {
        self.validated.lock().unwrap().insert(path.to_path_buf());
    }

    /// Streams a source file through a map producing (key, multiplicity)
    /// pairs, external-sorts the result, and writes it under `variant`.
    fn transform<F>(&self, source: &Path, out: &Path, variant: Variant, n: u32, map: F) -> Result<()>
    where
        F: Fn(&[u8], &BigUint, &mut Vec<(Vec<u8>, BigUint)>) -> Result<()> + Sync,
    {
        let tag = out.file_stem().and_then(|s| s.to_str()).unwrap_or("stage").to_string();
        let mut sorter = ExternalSorter::new(&self.tmp_dir(), &tag, self.chunk_entries, false)?;
        let mut reader = WordFileReader::open(source)?;
        let read_batch = (self.chunk_entries / 6).max(1024);
        let mut batch: Vec<(Vec<u8>, BigUint)> = Vec::with_capacity(read_batch);
        let mut flush = |batch: &mut Vec<(Vec<u8>, BigUint)>, sorter: &mut ExternalSorter| -> Result<()> {
            let produced: Vec<Vec<(Vec<u8>, BigUint)>> = self.pool.install(|| {
                batch
                    .par_iter()
                    .map(|(key, mult)| {
                        let mut out = Vec::with_capacity(6);
                        map(key, mult, &mut out).map(|()| out)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for group in produced {
                for (key, mult) in group {
                    sorter.push(key, BigInt::from(mult))?;
                }
            }
            batch.clear();
            Ok(())
        };
        while let Some((key, mult)) = reader.next_entry()? {
            batch.push((key, mult.magnitude().clone()));
            if batch.len() >= read_batch {
                flush(&mut batch, &mut sorter)?;
            }
        }
        flush(&mut batch, &mut sorter)?;
        let mut writer = WordFileWriter::create(out, variant, false, n)?;
        sorter.finish_into(&mut writer)?;
        writer.finish()?;
        self.mark_valid(out);
        Ok(())
    }

    /// The (ab)^0 file: just the identity.
    fn ensure_base(&self) -> Result<PathBuf> {
        let path = self.cache_path("ab", 0);
        if let Some(p) = self.cached(&path, Variant::AbPower, 0) {
            return Ok(p);
        }
        let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 0)?;
        w.push_unsigned(&DoubleTree::identity().serialize(), &BigUint::one())?;
        w.finish()?;
        self.mark_valid(&path);
        Ok(path)
    }

    /// The sorted expansion of (ab)^n with multiplicities; total mass 6^n.
    pub fn ensure_ab(&self, n: u32) -> Result<PathBuf> {
        if n == 0 {
            return self.ensure_base();
        }
        let path = self.cache_path("ab", n);
        if let Some(p) = self.cached(&path, Variant::AbPower, n) {
            return Ok(p);
        }
        let prev = self.ensure_ab(n - 1)?;
        self.log(format!("expanding (ab)^{} -> (ab)^{}", n - 1, n));
        self.transform(&prev, &path, Variant::AbPower, n, |key, mult, out| {
            let x = DoubleTree::deserialize(key)?;
            for (cl, dl) in EXPANSION_PAIRS {
                let y = left_mul(cl, &left_mul(dl, &x));
                out.push((y.serialize(), mult.clone()));
            }
            Ok(())
        })?;
        self.check_mass(&path, &pow6(n))?;
        Ok(path)
    }

    /// The expansion of (ba)^n: the element-wise inverse of (ab)^n.
    pub fn ensure_ba(&self, n: u32) -> Result<PathBuf> {
        let path = self.cache_path("ba", n);
        if let Some(p) = self.cached(&path, Variant::BaPower, n) {
            return Ok(p);
        }
        let src = self.ensure_ab(n)?;
        self.log(format!("inverting (ab)^{n} -> (ba)^{n}"));
        self.invert_file(&src, &path, Variant::BaPower)?;
        Ok(path)
    }

    /// Element-wise inversion, re-sorted.
    pub fn invert_file(&self, source: &Path, out: &Path, variant: Variant) -> Result<()> {
        let n = WordFileReader::open(source)?.header().n;
        self.transform(source, out, variant, n, |key, mult, outv| {
            let x = DoubleTree::deserialize(key)?;
            outv.push((x.inverse().serialize(), mult.clone()));
            Ok(())
        })
    }

    /// The C-half file: the expansion of C b (ab)^{n-1}, mass 6^n / 2.
    pub fn ensure_half(&self, n: u32) -> Result<PathBuf> {
        assert!(n >= 1);
        let path = self.cache_path("half", n);
        if let Some(p) = self.cached(&path, Variant::Half, n) {
            return Ok(p);
        }
        let prev = self.ensure_ab(n - 1)?;
        self.log(format!("expanding C b (ab)^{} half file", n - 1));
        self.transform(&prev, &path, Variant::Half, n, |key, mult, out| {
            let x = DoubleTree::deserialize(key)?;
            for (cl, dl) in HALF_EXPANSION {
                let y = left_mul(cl, &left_mul(dl, &x));
                out.push((y.serialize(), mult.clone()));
            }
            Ok(())
        })?;
        self.check_mass(&path, &(pow6(n) / 2u8))?;
        Ok(path)
    }

    fn check_mass(&self, path: &Path, expected: &BigUint) -> Result<()> {
        let header = WordFileReader::open(path)?.header().clone();
        if &header.total_mass != expected {
            return Err(Error::FileIntegrity {
                path: path.to_path_buf(),
                reason: format!("mass {} != expected {}", header.total_mass, expected),
            });
        }
        Ok(())
    }

    /// Splits a word stream by comparing each element with its
    /// reverse-inverse: the smaller of the two goes to the "small" file, and
    /// elements fixed by the map go to the "equal" file. When `primed` is
    /// set the stream is inverted before classification, realizing the file
    /// for the mirrored half b (ab)^{n-1} C^{-1}.
    pub fn ensure_split(&self, n: u32, primed: bool) -> Result<(PathBuf, PathBuf, ClassMasses)> {
        let (s_variant, e_variant, s_stem, e_stem) = if primed {
            (Variant::SmallPrime, Variant::EqualPrime, "sp", "ep")
        } else {
            (Variant::Small, Variant::Equal, "s", "e")
        };
        let s_path = self.cache_path(s_stem, n);
        let e_path = self.cache_path(e_stem, n);
        let masses_path = self.cfg.workdir.join(format!("{s_stem}_{n:02}.masses"));
        if let (Some(s), Some(e)) = (
            self.cached(&s_path, s_variant, n),
            self.cached(&e_path, e_variant, n),
        ) {
            if let Some(m) = read_masses(&masses_path) {
                return Ok((s, e, m));
            }
        }
        let half = self.ensure_half(n)?;
        self.log(format!("classifying half file n={n} (primed={primed})"));

        let tmp = self.tmp_dir();
        let mut s_sorter = ExternalSorter::new(&tmp, &format!("{s_stem}{n:02}"), self.chunk_entries, false)?;
        let mut e_sorter = ExternalSorter::new(&tmp, &format!("{e_stem}{n:02}"), self.chunk_entries, false)?;
        let mut masses = ClassMasses::default();

        let mut reader = WordFileReader::open(&half)?;
        let read_batch = (self.chunk_entries / 2).max(1024);
        let mut batch: Vec<(Vec<u8>, BigUint)> = Vec::with_capacity(read_batch);
        enum Class {
            Small(Vec<u8>),
            Equal(Vec<u8>),
        }
        let mut flush = |batch: &mut Vec<(Vec<u8>, BigUint)>,
                         s_sorter: &mut ExternalSorter,
                         e_sorter: &mut ExternalSorter,
                         masses: &mut ClassMasses|
         -> Result<()> {
            let classified: Vec<(Class, bool, BigUint)> = self.pool.install(|| {
                batch
                    .par_iter()
                    .map(|(key, mult)| {
                        let mut x = DoubleTree::deserialize(key)?;
                        if primed {
                            x = x.inverse();
                        }
                        let xk = x.serialize();
                        let rk = x.reverse_inverse().serialize();
                        Ok(match xk.cmp(&rk) {
                            std::cmp::Ordering::Less => (Class::Small(xk), false, mult.clone()),
                            std::cmp::Ordering::Equal => (Class::Equal(xk), false, mult.clone()),
                            std::cmp::Ordering::Greater => (Class::Small(rk), true, mult.clone()),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (class, was_greater, mult) in classified {
                match class {
                    Class::Small(key) => {
                        if was_greater {
                            masses.greater += &mult;
                        } else {
                            masses.less += &mult;
                        }
                        s_sorter.push(key, BigInt::from(mult))?;
                    }
                    Class::Equal(key) => {
                        masses.equal += &mult;
                        e_sorter.push(key, BigInt::from(mult))?;
                    }
                }
            }
            batch.clear();
            Ok(())
        };
        while let Some((key, mult)) = reader.next_entry()? {
            batch.push((key, mult.magnitude().clone()));
            if batch.len() >= read_batch {
                flush(&mut batch, &mut s_sorter, &mut e_sorter, &mut masses)?;
            }
        }
        flush(&mut batch, &mut s_sorter, &mut e_sorter, &mut masses)?;

        let mut s_writer = WordFileWriter::create(&s_path, s_variant, false, n)?;
        s_sorter.finish_into(&mut s_writer)?;
        s_writer.finish()?;
        let mut e_writer = WordFileWriter::create(&e_path, e_variant, false, n)?;
        e_sorter.finish_into(&mut e_writer)?;
        e_writer.finish()?;
        self.mark_valid(&s_path);
        self.mark_valid(&e_path);
        write_masses(&masses_path, &masses)?;
        Ok((s_path, e_path, masses))
    }

    /// Merge-join inner product: the sum over common keys of the products of
    /// multiplicities. Equals tau(y* x) for the stored sums.
    pub fn inner_product(a: &Path, b: &Path) -> Result<BigUint> {
        let mut ra = WordFileReader::open(a)?;
        let mut rb = WordFileReader::open(b)?;
        let mut total = BigUint::zero();
        let mut ea = ra.next_entry()?;
        let mut eb = rb.next_entry()?;
        while let (Some((ka, ma)), Some((kb, mb))) = (&ea, &eb) {
            match ka.cmp(kb) {
                std::cmp::Ordering::Less => ea = ra.next_entry()?,
                std::cmp::Ordering::Greater => eb = rb.next_entry()?,
                std::cmp::Ordering::Equal => {
                    total += ma.magnitude() * mb.magnitude();
                    ea = ra.next_entry()?;
                    eb = rb.next_entry()?;
                }
            }
        }
        // run both readers to the end so their checksums are verified
        ra.drain()?;
        rb.drain()?;
        Ok(total)
    }

    /// zeta_n via the full files: zeta_{2m} = <(ab)^m, (ba)^m> and
    /// zeta_{2m+1} = <(ab)^{m+1}, (ba)^m>.
    pub fn zeta_direct(&self, n: u32) -> Result<ZetaRecord> {
        assert!(n >= 1);
        let m = n / 2;
        let (a, b) = if n % 2 == 0 {
            (self.ensure_ab(m)?, self.ensure_ba(m)?)
        } else {
            (self.ensure_ab(m + 1)?, self.ensure_ba(m)?)
        };
        let zeta = Self::inner_product(&a, &b)?;
        Ok(ZetaRecord { n, zeta_s: None, zeta_e: None, zeta })
    }

    /// zeta_n via the halved files: zeta_n = 2 zeta_s + 4 zeta_e, with
    /// zeta_{2m}^s = <S_m, S'_m> and zeta_{2m+1}^s = <S_m, S'_{m+1}> (and
    /// likewise for e). For n = 1 the split is empty and the direct value
    /// (which must be zero) is reported.
    pub fn zeta_halved(&self, n: u32) -> Result<ZetaRecord> {
        assert!(n >= 1);
        if n == 1 {
            let direct = self.zeta_direct(1)?;
            if !direct.zeta.is_zero() {
                return Err(Error::Integrity("tau(ab) must vanish".into()));
            }
            return Ok(ZetaRecord {
                n,
                zeta_s: Some(BigUint::zero()),
                zeta_e: Some(BigUint::zero()),
                zeta: direct.zeta,
            });
        }
        let m = n / 2;
        let (s_un, e_un, _) = self.ensure_split(m, false)?;
        let (s_pr, e_pr, _) = if n % 2 == 0 {
            let (s, e, mm) = self.ensure_split(m, true)?;
            (s, e, mm)
        } else {
            let (s, e, mm) = self.ensure_split(m + 1, true)?;
            (s, e, mm)
        };
        let zeta_s = Self::inner_product(&s_un, &s_pr)?;
        let zeta_e = Self::inner_product(&e_un, &e_pr)?;
        let zeta = &zeta_s * 2u8 + &zeta_e * 4u8;
        Ok(ZetaRecord { n, zeta_s: Some(zeta_s), zeta_e: Some(zeta_e), zeta })
    }

    /// In-memory oracle: expands (ab)^n term by term and reads off the
    /// identity coefficient. Refuses when the expansion would exceed the
    /// memory budget.
    pub fn brute_force_zeta(n: u32, budget_bytes: usize) -> Result<BigUint> {
        let mut v = GroupRingVector::identity();
        for step in 0..n {
            let mut next = GroupRingVector::new();
            for (key, coeff) in v.iter() {
                let x = DoubleTree::deserialize(key)?;
                for (cl, dl) in EXPANSION_PAIRS {
                    let y = left_mul(cl, &left_mul(dl, &x));
                    next.add_key(y.serialize(), coeff.clone());
                }
            }
            let bytes = next.approx_bytes();
            if bytes > budget_bytes {
                return Err(Error::MemoryBudget(format!(
                    "in-memory expansion of (ab)^{} needs about {} MiB (step {} of {})",
                    n,
                    bytes >> 20,
                    step + 1,
                    n
                )));
            }
            v = next;
        }
        Ok(v.trace().magnitude().clone())
    }
}

fn write_masses(path: &Path, m: &ClassMasses) -> Result<()> {
    std::fs::write(path, format!("{} {} {}\n", m.less, m.equal, m.greater))
        .map_err(|e| Error::io(path, e))
}

fn read_masses(path: &Path) -> Option<ClassMasses> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut it = text.split_whitespace();
    let less = it.next()?.parse().ok()?;
    let equal = it.next()?.parse().ok()?;
    let greater = it.next()?.parse().ok()?;
    Some(ClassMasses { less, equal, greater })
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn pipeline(dir: &Path) -> Pipeline {
        let mut cfg = PipelineConfig::new(dir);
        cfg.threads = 2;
        Pipeline::new(cfg).unwrap()
    }

    fn zeta_table_low() -> Vec<u64> {
        // zeta_1 .. zeta_12
        vec![0, 0, 0, 0, 2, 0, 0, 8, 72, 152, 132, 1052]
    }

    #[test]
    fn first_expansion_has_six_distinct_words() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        let ab1 = p.ensure_ab(1).unwrap();
        let header = WordFileReader::open(&ab1).unwrap().header().clone();
        assert_eq!(header.entry_count, 6);
        assert_eq!(header.total_mass, BigUint::from(6u8));
    }

    #[test]
    fn mass_is_conserved() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        for n in 0..=4u32 {
            let path = p.ensure_ab(n).unwrap();
            let header = WordFileReader::open(&path).unwrap().header().clone();
            assert_eq!(header.total_mass, pow6(n), "n={n}");
        }
        let half = p.ensure_half(4).unwrap();
        let header = WordFileReader::open(&half).unwrap().header().clone();
        assert_eq!(header.total_mass, pow6(4) / 2u8);
    }

    #[test]
    fn double_inversion_is_byte_identical() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        let ab2 = p.ensure_ab(2).unwrap();
        let inv = dir.path().join("inv.twf");
        let back = dir.path().join("back.twf");
        p.invert_file(&ab2, &inv, Variant::BaPower).unwrap();
        p.invert_file(&inv, &back, Variant::AbPower).unwrap();
        assert_eq!(std::fs::read(&ab2).unwrap(), std::fs::read(&back).unwrap());
    }

    #[test]
    fn identity_coefficient_survives_inversion() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        let ab3 = p.ensure_ab(3).unwrap();
        let ba3 = p.ensure_ba(3).unwrap();
        let e_key = DoubleTree::identity().serialize();
        let find = |path: &Path| -> BigUint {
            let mut r = WordFileReader::open(path).unwrap();
            let mut found = BigUint::zero();
            while let Some((k, m)) = r.next_entry().unwrap() {
                if k == e_key {
                    found = m.magnitude().clone();
                }
            }
            found
        };
        assert_eq!(find(&ab3), find(&ba3));
    }

    #[test]
    fn zeta_direct_matches_reference_rows() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        for (i, expected) in zeta_table_low().iter().enumerate().take(8) {
            let n = (i + 1) as u32;
            let record = p.zeta_direct(n).unwrap();
            assert_eq!(record.zeta, BigUint::from(*expected), "zeta_{n}");
        }
    }

    #[test]
    fn zeta_direct_agrees_with_brute_force() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        for n in 1..=6u32 {
            let direct = p.zeta_direct(n).unwrap().zeta;
            let brute = Pipeline::brute_force_zeta(n, 1 << 30).unwrap();
            assert_eq!(direct, brute, "n={n}");
        }
    }

    #[test]
    fn brute_force_refuses_tiny_budget() {
        match Pipeline::brute_force_zeta(6, 1024) {
            Err(Error::MemoryBudget(msg)) => assert!(msg.contains("MiB")),
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn zeta_halved_matches_direct_low_rows() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        for n in 2..=10u32 {
            let halved = p.zeta_halved(n).unwrap();
            let direct = p.zeta_direct(n).unwrap();
            assert_eq!(halved.zeta, direct.zeta, "n={n}");
            let s = halved.zeta_s.unwrap();
            let e = halved.zeta_e.unwrap();
            assert_eq!(s * 2u8 + e * 4u8, halved.zeta);
        }
    }

    #[test]
    fn zeta_halved_reference_row_ten() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        let r = p.zeta_halved(10).unwrap();
        assert_eq!(r.zeta_s, Some(BigUint::from(70u8)));
        assert_eq!(r.zeta_e, Some(BigUint::from(3u8)));
        assert_eq!(r.zeta, BigUint::from(152u8));
    }

    #[test]
    fn split_masses_partition_the_half_file() {
        let dir = tempdir().unwrap();
        let p = pipeline(dir.path());
        for n in 2..=5u32 {
            let (_, _, m) = p.ensure_split(n, false).unwrap();
            let total = &m.less + &m.equal + &m.greater;
            assert_eq!(total, pow6(n) / 2u8, "n={n}");
        }
    }

    #[test]
    fn warm_cache_reruns_are_byte_identical() {
        let dir = tempdir().unwrap();
        let bytes_first;
        {
            let p = pipeline(dir.path());
            p.zeta_halved(6).unwrap();
            bytes_first = std::fs::read(dir.path().join("s_03.twf")).unwrap();
        }
        {
            let p = pipeline(dir.path());
            p.zeta_halved(6).unwrap();
            let bytes_again = std::fs::read(dir.path().join("s_03.twf")).unwrap();
            assert_eq!(bytes_first, bytes_again);
        }
    }

    #[test]
    fn determinism_across_thread_counts_and_chunking() {
        let reference = {
            let dir = tempdir().unwrap();
            let p = pipeline(dir.path());
            let path = p.ensure_ab(3).unwrap();
            std::fs::read(path).unwrap()
        };
        for threads in [1usize, 4] {
            let dir = tempdir().unwrap();
            let mut cfg = PipelineConfig::new(dir.path());
            cfg.threads = threads;
            cfg.memory_budget = 1 << 19; // force many small chunks
            let p = Pipeline::new(cfg).unwrap();
            let path = p.ensure_ab(3).unwrap();
            assert_eq!(std::fs::read(path).unwrap(), reference, "threads={threads}");
        }
    }
}
