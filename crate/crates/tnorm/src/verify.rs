//! The invariant suite behind `tnorm verify`: named, independently runnable
//! property checks over the whole stack, from the group presentation to the
//! published tables. Each check returns a short detail string on success.

use crate::action::{left_mul, word_element, Letter};
use crate::bridge;
use crate::density::{self, Basis, HalfWidth};
use crate::dyadic::DyadicPoint;
use crate::element::DoubleTree;
use crate::error::{Error, Result};
use crate::exact::big_rational;
use crate::freeprob;
use crate::golden;
use crate::pipeline::{Pipeline, PipelineConfig};
use crate::plmap::PLCircleMap;
use crate::selfadjoint;
use crate::specnorm;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

pub struct CheckReport {
    pub name: &'static str,
    pub result: Result<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.result.is_ok()
    }
}

fn random_words(rng: &mut ChaCha8Rng, count: usize, max_len: usize) -> Vec<DoubleTree> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            let word: Vec<Letter> =
                (0..len).map(|_| Letter::ALL[rng.gen_range(0..Letter::ALL.len())]).collect();
            word_element(&word)
        })
        .collect()
}

fn check(val: bool, msg: impl Into<String>) -> Result<()> {
    if val {
        Ok(())
    } else {
        Err(Error::Integrity(msg.into()))
    }
}

fn presentation_relations() -> Result<String> {
    let (e, c, d) = DoubleTree::generators();
    let pow = |x: &DoubleTree, n: usize| {
        let mut acc = DoubleTree::identity();
        for _ in 0..n {
            acc = DoubleTree::compose(x, &acc);
        }
        acc
    };
    let comm = |g: &DoubleTree, h: &DoubleTree| {
        DoubleTree::compose(
            &DoubleTree::compose(g, h),
            &DoubleTree::compose(&g.inverse(), &h.inverse()),
        )
    };
    let cd = DoubleTree::compose(&c, &d);
    let d2 = pow(&d, 2);
    let cdc = DoubleTree::compose(&c, &DoubleTree::compose(&d, &c));
    let w = DoubleTree::compose(&d2, &DoubleTree::compose(&cdc, &d2));
    let v = DoubleTree::compose(&c, &DoubleTree::compose(&w, &c.inverse()));
    check(pow(&c, 3) == e, "C^3 != e")?;
    check(pow(&d, 4) == e, "D^4 != e")?;
    check(pow(&cd, 5) == e, "(CD)^5 != e")?;
    check(comm(&cdc, &w) == e, "first commutator relation fails")?;
    check(comm(&w, &v) == e, "second commutator relation fails")?;
    Ok("all five defining relations hold".into())
}

fn letter_action_oracle(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let count = if quick { 150 } else { 1000 };
    let words = random_words(&mut rng, count, 12);
    for x in &words {
        for letter in Letter::ALL {
            let fast = left_mul(letter, x);
            let slow = DoubleTree::compose(&letter.element(), x);
            check(fast == slow, format!("letter action of {} deviates", letter.name()))?;
            check(fast.is_reduced(), "letter action output not reduced")?;
        }
    }
    Ok(format!("letter action == composition on {count} random elements x 5 letters"))
}

fn group_axioms(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let count = if quick { 60 } else { 350 };
    let xs = random_words(&mut rng, count, 12);
    let e = DoubleTree::identity();
    for w in xs.chunks(3) {
        if let [x, y, z] = w {
            let a = DoubleTree::compose(&DoubleTree::compose(x, y), z);
            let b = DoubleTree::compose(x, &DoubleTree::compose(y, z));
            check(a == b, "associativity fails")?;
        }
    }
    for x in &xs {
        check(DoubleTree::compose(x, &e) == *x, "right identity fails")?;
        check(DoubleTree::compose(&x.inverse(), x) == e, "left inverse fails")?;
    }
    Ok(format!("associativity, identity and inverse laws on {count} random elements"))
}

fn reverse_inverse_properties(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let count = if quick { 80 } else { 400 };
    let d = DoubleTree::generator_d();
    let d2 = DoubleTree::compose(&d, &d);
    for x in random_words(&mut rng, count, 10) {
        let j = x.reverse_inverse();
        check(j.reverse_inverse() == x, "reverse-inverse is not an involution")?;
        let route = DoubleTree::compose(&d2, &DoubleTree::compose(&x.rotate180(), &d2));
        check(j == route, "direct reverse-inverse deviates from D^2 R(x) D^2")?;
        check(x.rotate180().rotate180() == x, "graph rotation is not an involution")?;
    }
    // anti-automorphism on letter words: the reverse-inverse of the product
    // t_1 ... t_n is the product t_1^-1 ... t_n^-1 (reverse the word, then
    // invert the product; equivalently invert each letter in place)
    for _ in 0..count {
        let len = rng.gen_range(1..=8);
        let word: Vec<Letter> =
            (0..len).map(|_| Letter::ALL[rng.gen_range(0..Letter::ALL.len())]).collect();
        let lhs = word_element(&word).reverse_inverse();
        let inverted: Vec<Letter> = word.iter().map(|l| l.inverse()).collect();
        check(lhs == word_element(&inverted), "reverse-inverse of a word product deviates")?;
    }
    for x in [DoubleTree::generator_c(), d.clone()] {
        let lhs = x.inverse();
        let rhs = DoubleTree::compose(&d2, &DoubleTree::compose(&x.rotate180(), &d2));
        check(lhs == rhs, "x^-1 != D^2 R(x) D^2 on a generator")?;
    }
    Ok(format!("involution and word anti-automorphism on {count} random elements"))
}

fn serialization_roundtrip(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let count = if quick { 200 } else { 1000 };
    for x in random_words(&mut rng, count, 12) {
        let back = DoubleTree::deserialize(&x.serialize())?;
        check(back == x, "binary roundtrip fails")?;
        let back64 = DoubleTree::deserialize_base64(&x.serialize_base64())?;
        check(back64 == x, "base64 roundtrip fails")?;
    }
    Ok(format!("serialize/deserialize identity on {count} random elements"))
}

fn plmap_consistency(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let pairs = if quick { 15 } else { 60 };
    let xs = random_words(&mut rng, 2 * pairs, 8);
    for w in xs.chunks(2) {
        if let [x, y] = w {
            let composed = DoubleTree::compose(x, y);
            let (fx, fy, fc) = (
                PLCircleMap::from_element(x),
                PLCircleMap::from_element(y),
                PLCircleMap::from_element(&composed),
            );
            for k in 0..256u128 {
                let t = DyadicPoint::new(k, 8);
                check(
                    fc.eval(t) == fx.eval(fy.eval(t)),
                    format!("PL evaluation mismatch at {k}/256"),
                )?;
            }
        }
    }
    Ok(format!("composition agrees with pointwise evaluation on {pairs} pairs x 256 grid points"))
}

fn reduce_confluence(quick: bool) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let count = if quick { 100 } else { 500 };
    for x in random_words(&mut rng, count, 10) {
        let mut padded = x.clone();
        for _ in 0..rng.gen_range(1..=4) {
            let leaf = rng.gen_range(0..padded.leaf_count());
            padded = padded.insert_double_caret(leaf);
        }
        check(padded.reduce() == x, "insertion then reduction changes the element")?;
    }
    Ok(format!("reduction reaches the canonical form from {count} random padded pairs"))
}

fn zeta_pipeline_checks(workdir: &Path, quick: bool, threads: usize) -> Result<String> {
    let mut cfg = PipelineConfig::new(workdir.join("cache"));
    cfg.threads = threads;
    let p = Pipeline::new(cfg)?;
    let brute_max = if quick { 5 } else { 7 };
    for n in 1..=brute_max {
        let direct = p.zeta_direct(n)?.zeta;
        let brute = Pipeline::brute_force_zeta(n, 4 << 30)?;
        check(direct == brute, format!("direct pipeline deviates from brute force at n = {n}"))?;
    }
    let halved_max = if quick { 8 } else { 12 };
    let golden_rows = golden::table1()?;
    for n in 2..=halved_max {
        let halved = p.zeta_halved(n)?;
        let direct = p.zeta_direct(n)?;
        check(halved.zeta == direct.zeta, format!("halved != direct at n = {n}"))?;
        let row = &golden_rows[n as usize - 1];
        check(halved.zeta == row.zeta, format!("zeta_{n} deviates from the published value"))?;
        check(
            halved.zeta_s.as_ref() == Some(&row.zeta_s) && halved.zeta_e.as_ref() == Some(&row.zeta_e),
            format!("zeta split deviates from the published row at n = {n}"),
        )?;
    }
    // mass conservation on the cached files
    use crate::wordfile::WordFileReader;
    use num_bigint::BigUint;
    for n in 1..=4u32 {
        let path = p.ensure_ab(n)?;
        let header = WordFileReader::open(&path)?.header().clone();
        check(header.total_mass == BigUint::from(6u8).pow(n), format!("mass of (ab)^{n} != 6^{n}"))?;
    }
    Ok(format!(
        "brute force == direct (n <= {brute_max}), halved == direct == published (n <= {halved_max}), 6^n mass"
    ))
}

fn bridge_exactness() -> Result<String> {
    let zetas = golden::table1_zetas()?;
    let table = bridge::zeta_to_moments(&zetas)?;
    let golden_m = golden::table1_moments()?;
    check(table.moments() == golden_m.moments(), "bridge does not reproduce the published moments")?;
    let back = bridge::moments_to_zeta(&table)?;
    check(back == zetas, "bridge roundtrip fails")?;
    Ok("zeta -> m reproduces all 28 published moments exactly; roundtrip exact".into())
}

fn estimator_tables() -> Result<String> {
    for (name, moments, golden_rows) in [
        ("table 2", golden::table1_moments()?, golden::table2()?),
        ("table 4", golden::table3_moments()?, golden::table4()?),
    ] {
        let rows = specnorm::estimator_table(&moments)?;
        check(rows.len() == 28, format!("{name}: expected 28 rows"))?;
        for (row, gold) in rows.iter().zip(&golden_rows) {
            let pairs = [
                (row.root, &gold.root),
                (row.ratio, &gold.ratio),
                (row.alpha, &gold.alpha),
                (row.lambda_max, &gold.lambda_max),
            ];
            for (computed, printed) in pairs {
                let target: f64 = printed.parse().map_err(|_| Error::Decode("golden".into()))?;
                check(
                    (computed - target).abs() <= 5e-6,
                    format!("{name} row {} deviates: {computed} vs {printed}", row.n),
                )?;
            }
            if let (Some(b), Some(g)) = (row.bracket, gold.bracket.as_ref()) {
                let target: f64 = g.parse().map_err(|_| Error::Decode("golden".into()))?;
                check((b - target).abs() <= 5e-6, format!("{name} bracket row {}", row.n))?;
            }
        }
    }
    Ok("published estimator tables reproduced to 5e-6 in every cell".into())
}

fn bound_invariants() -> Result<String> {
    let qr = specnorm::estimator_table(&golden::table1_moments()?)?;
    let upper = 2.0 + std::f64::consts::SQRT_2;
    let lower = std::f64::consts::SQRT_2 + 3f64.sqrt();
    for row in &qr {
        check(row.lambda_max < upper, format!("lambda_max exceeds 2+sqrt2 at n = {}", row.n))?;
        if row.n >= 16 {
            check(row.lambda_max > lower, format!("lambda_max below sqrt2+sqrt3 at n = {}", row.n))?;
        }
    }
    let sym = specnorm::estimator_table(&golden::table3_moments()?)?;
    for row in &sym {
        check(row.lambda_max < 4.0, format!("symmetric-sum lambda_max reaches 4 at n = {}", row.n))?;
        if row.n >= 6 {
            check(
                row.lambda_max > 2.0 * 3f64.sqrt(),
                format!("symmetric-sum lambda_max below 2 sqrt3 at n = {}", row.n),
            )?;
        }
    }
    Ok("lambda_max stays inside (sqrt2+sqrt3, 2+sqrt2) resp. (2 sqrt3, 4) as required".into())
}

fn free_oracle() -> Result<String> {
    let exact = freeprob::free_moments(20)?;
    let quad = freeprob::free_moments_quadrature(20)?;
    for (k, (e, q)) in exact.iter().zip(&quad).enumerate() {
        let e = e.to_f64().unwrap();
        check((q - e).abs() / e < 1e-9, format!("free moment n = {} deviates", k + 1))?;
    }
    let n23 = freeprob::free_norm(big_rational(1, 2), big_rational(1, 3))?;
    check(
        (n23 - (1.0 + 2f64.sqrt()) / 6f64.sqrt()).abs() < 1e-12,
        "free norm (1/2, 1/3) deviates",
    )?;
    let n34 = freeprob::free_norm(big_rational(1, 3), big_rational(1, 4))?;
    check(
        (n34 * 12f64.sqrt() - (2f64.sqrt() + 3f64.sqrt())).abs() < 1e-12,
        "free norm (1/3, 1/4) deviates",
    )?;
    Ok("free-moment recursion == quadrature (rel 1e-9, n <= 20); closed-form norms".into())
}

fn density_checks(quick: bool) -> Result<String> {
    let order = if quick { 16 } else { 28 };
    let free = freeprob::free_moments(order)?;
    let table = bridge::MomentTable::from_integers(bridge::Convention::QuarterTrace, &free)?;
    let w = HalfWidth::two_plus_sqrt2();
    for basis in [Basis::Chebyshev, Basis::Legendre] {
        let integral = density::curve_integral(&table, &w, basis, order)?;
        check((integral - 0.25).abs() < 1e-8, format!("{basis:?} curve integral deviates from m0"))?;
    }
    if !quick {
        let grid: Vec<f64> = (0..160).map(|i| 1.0 + 2.0 * i as f64 / 159.0).collect();
        let cheb = density::density_curve(&table, &w, Basis::Chebyshev, order, &grid)?;
        let sup = cheb
            .grid
            .iter()
            .map(|&(x, r)| (r - freeprob::qr_scaled_density(x)).abs())
            .fold(0.0, f64::max);
        check(sup < 0.02, format!("Chebyshev free-density error {sup}"))?;
        let leg = density::density_curve(&table, &w, Basis::Legendre, order, &grid)?;
        let supl = leg
            .grid
            .iter()
            .map(|&(x, r)| (r - freeprob::qr_scaled_density(x)).abs())
            .fold(0.0, f64::max);
        check(supl < 0.05, format!("Legendre free-density error {supl}"))?;
        let tail = density::max_density_on(
            &golden::table1_moments()?,
            &w,
            Basis::Chebyshev,
            28,
            3.22,
            3.414,
            512,
        )?;
        check(tail < 0.01, format!("tail density {tail} not small"))?;
    }
    Ok("curve integrals equal m0; free-density oracle and tail bound hold".into())
}

fn selfadjoint_chain(quick: bool) -> Result<String> {
    let n_max = if quick { 8 } else { 12 };
    let norms = selfadjoint::iterate_norms(&selfadjoint::SYMMETRIC_GENERATORS, n_max, 6 << 30)?;
    let rows = selfadjoint::chain_transform(&norms, 3);
    let golden_rows = golden::table3()?;
    for (row, gold) in rows.iter().zip(&golden_rows) {
        check(
            BigInt::from(row.norm_sq.clone()) == BigInt::from(gold.norm_sq.clone())
                && row.eta == BigInt::from(gold.eta.clone())
                && row.zeta == BigInt::from(gold.zeta.clone())
                && row.m == gold.m,
            format!("cogrowth chain deviates from the published row at n = {}", row.n),
        )?;
    }
    Ok(format!("norms, eta, zeta, m match the published rows for n <= {n_max}"))
}

fn extrapolation_checks() -> Result<String> {
    // exact-model recovery
    let ns: Vec<f64> = (18..=28).map(|n| n as f64).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| 10.0 - 5.0 / (n + 1.0)).collect();
    let fit = specnorm::fit_power_law(&ns, &ys, (18, 28))?;
    check(
        (fit.a - 10.0).abs() < 1e-6 && (fit.b - 5.0).abs() < 1e-5 && (fit.c + 1.0).abs() < 1e-5
            && (fit.d - 1.0).abs() < 1e-6,
        "exact-model parameters not recovered",
    )?;
    // the published-data extrapolation lands near the reported limit
    let rows = specnorm::estimator_table(&golden::table1_moments()?)?;
    let ys: Vec<f64> = rows[17..28].iter().map(|r| r.lambda_max * r.lambda_max).collect();
    let fit = specnorm::fit_power_law(&ns, &ys, (18, 28))?;
    let limit = fit.a.sqrt();
    check((3.2..=3.4).contains(&limit), format!("extrapolated limit {limit} outside [3.2, 3.4]"))?;
    Ok(format!("exact-model recovery to 1e-6; extrapolated limit {limit:.4}"))
}

fn cache_integrity(workdir: &Path) -> Result<String> {
    use crate::wordfile::{validate, Variant, WordFileWriter};
    let dir = workdir.join("verify-scratch");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let path = dir.join("corrupt-probe.twf");
    let mut w = WordFileWriter::create(&path, Variant::AbPower, false, 1)?;
    w.push_unsigned(&DoubleTree::identity().serialize(), &num_bigint::BigUint::from(1u8))?;
    w.finish()?;
    validate(&path)?;
    let mut bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let last = bytes.len() - 1;
    bytes[last] ^= 0xff;
    std::fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
    match validate(&path) {
        Err(Error::FileIntegrity { .. }) => {}
        other => {
            return Err(Error::Integrity(format!(
                "corrupted cache file was not rejected: {other:?}"
            )))
        }
    }
    let _ = std::fs::remove_file(&path);
    Ok("corrupted word files are rejected with a file-integrity error".into())
}

fn moment_integrality() -> Result<String> {
    // the bridge asserts integrality and positivity; feed it a corrupted
    // zeta column and expect rejection
    let mut zetas = golden::table1_zetas()?;
    zetas[4] = BigInt::from(-7);
    check(bridge::zeta_to_moments(&zetas).is_err(), "corrupt zeta column was accepted")?;
    // and the log-convexity guard on direct moment input
    let bad: Vec<BigInt> = vec![BigInt::from(1), BigInt::from(10), BigInt::from(20)];
    check(
        bridge::MomentTable::from_integers(bridge::Convention::QuarterTrace, &bad).is_err(),
        "non-log-convex moments were accepted",
    )?;
    Ok("corrupt zeta and non-log-convex moment inputs are rejected".into())
}

fn alpha_dual_route() -> Result<String> {
    let table = golden::table1_moments()?.truncated(14);
    let h = specnorm::hankel_dets(&table)?;
    let a = specnorm::alpha_squares(&h);
    let b = specnorm::alpha_squares_by_recurrence(&table)?;
    check(a == b, "Hankel and recurrence alpha routes disagree")?;
    // positivity of the determinants is enforced inside hankel_dets
    check(h.dets().iter().all(|d| d.is_positive()), "non-positive Hankel determinant")?;
    Ok("alpha_n^2 identical by Hankel ratios and by orthogonalization (exact)".into())
}

/// Runs every check; `quick` trims the expensive randomized and pipeline
/// parts to finish within a few minutes.
pub fn run_all(workdir: &Path, quick: bool, threads: usize) -> Vec<CheckReport> {
    let mut out = Vec::new();
    macro_rules! run {
        ($name:literal, $expr:expr) => {
            out.push(CheckReport { name: $name, result: $expr });
        };
    }
    run!("presentation-relations", presentation_relations());
    run!("letter-action-oracle", letter_action_oracle(quick));
    run!("group-axioms", group_axioms(quick));
    run!("reverse-inverse", reverse_inverse_properties(quick));
    run!("serialization-roundtrip", serialization_roundtrip(quick));
    run!("plmap-consistency", plmap_consistency(quick));
    run!("reduce-confluence", reduce_confluence(quick));
    run!("zeta-pipeline", zeta_pipeline_checks(workdir, quick, threads));
    run!("bridge-exactness", bridge_exactness());
    run!("moment-integrality", moment_integrality());
    run!("alpha-dual-route", alpha_dual_route());
    run!("estimator-tables", estimator_tables());
    run!("bound-invariants", bound_invariants());
    run!("free-oracle", free_oracle());
    run!("density", density_checks(quick));
    run!("selfadjoint-chain", selfadjoint_chain(quick));
    run!("extrapolation", extrapolation_checks());
    run!("cache-integrity", cache_integrity(workdir));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_is_green() {
        let dir = tempfile::tempdir().unwrap();
        let reports = run_all(dir.path(), true, 2);
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", r.name, r.result);
        }
        assert!(reports.len() >= 15);
    }
}
