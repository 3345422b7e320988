//! The twelve acceptance criteria. Each test prints one line
//! `criterion N: PASS|FAIL ...` and fails when its criterion does.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use opm4::blocks::{find_direct_sum_form, hadamard_block_search};
use opm4::classify::{classify_orthogonal, Classification, Tag};
use opm4::decompose::{in_perm_span, membership_of, opm_as_four_perms, split_six_permutative, PermLinComb, Subspaces};
use opm4::families::{
    c_bar_membership, c_set_element, family_element, grover, opm_witness, rational_point_for, trig_family, CSet,
    FamilyId, Letter, Sign, TrigFamily,
};
use opm4::patterns::{pattern_of, Pattern4};
use opm4::perm::{p4, s4_partition};
use opm4::sampling::{covered_samples, random_orthogonal, random_rational, random_sign, Source};
use opm4::scans::two_perm_orthogonality_scan;
use opm4::verify::{run_all, verify_group_chain, verify_nonclosure_example, Chain, DEFAULT_SAMPLES};
use opm4::{Field, Mat, Mat4, Perm4, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, ok: bool, detail: String, elapsed: Duration) {
    let mark = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n}: {mark} {name} ({detail}; {:.3}s)", elapsed.as_secs_f64());
    assert!(ok, "criterion {n} failed: {detail}");
}

fn q(n: i64, d: i64) -> Q {
    Q::ratio(n, d)
}

/// Leibniz expansion, independent of the library's elimination.
fn leibniz_det(a: &Mat4<Q>) -> Q {
    let mut total = Q::zero();
    for p in Perm4::all() {
        let sign = if p.cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0 { 1 } else { -1 };
        let mut term = Q::from_i64(sign);
        for i in 0..4 {
            term *= a[(i, p.apply(i))].clone();
        }
        total += term;
    }
    total
}

fn gram_is_identity(a: &Mat4<Q>) -> bool {
    (0..4).all(|i| {
        (0..4).all(|j| {
            let dot = (0..4).fold(Q::zero(), |acc, k| acc + a[(i, k)].clone() * a[(j, k)].clone());
            dot == if i == j { Q::one() } else { Q::zero() }
        })
    })
}

fn rows_are_permutations(a: &Mat4<Q>) -> bool {
    let sorted = |i: usize| {
        let mut r = a.row(i).to_vec();
        r.sort();
        r
    };
    (1..4).all(|i| sorted(i) == sorted(0))
}

#[test]
fn criterion_01_grover() {
    let t = Instant::now();
    let g = grover::<Q>();
    let h = q(1, 2);
    let printed = Mat::from_fn(|i, j| if i == j { -h.clone() } else { h.clone() });
    let w = opm_witness(&g).expect("grover is an OPM");
    let fp = opm_as_four_perms(&g, &w).expect("witness reproduces");
    let elapsed = t.elapsed();
    let coeffs_ok = fp.coeffs == [q(-1, 2), q(1, 2), q(1, 2), q(1, 2)] && fp.quadruple == Letter::X.quadruple();
    let ok = g == printed && coeffs_ok && elapsed < Duration::from_millis(1);
    report(1, "grover reproduction", ok, format!("coefficients {:?}", fp.coeffs.map(|c| c.to_string())), elapsed);
}

#[test]
fn criterion_02_family_soundness() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0usize;
    let mut count = 0usize;
    for fid in FamilyId::all() {
        for _ in 0..1000 {
            let p = rational_point_for(fid, &random_rational(&mut rng), random_sign(&mut rng)).unwrap();
            let a = family_element(fid, &p, &Perm4::identity(), 0.0).unwrap();
            let line = Q::from_i64(fid.line_sum());
            let sums_ok = (0..4).all(|i| {
                let r = (0..4).fold(Q::zero(), |acc, j| acc + a[(i, j)].clone());
                let c = (0..4).fold(Q::zero(), |acc, j| acc + a[(j, i)].clone());
                r == line && c == line
            });
            let ok = gram_is_identity(&a)
                && rows_are_permutations(&a)
                && sums_ok
                && leibniz_det(&a) == Q::from_i64(fid.det_class());
            count += 1;
            failures += usize::from(!ok);
        }
    }
    let elapsed = t.elapsed();
    let ok = failures == 0 && elapsed < Duration::from_secs(10);
    report(2, "family soundness", ok, format!("{count} matrices, {failures} failures"), elapsed);
}

#[test]
fn criterion_03_trig_families() {
    let t = Instant::now();
    let pi = std::f64::consts::PI;
    let n = 10_000;
    let mut worst_residual: f64 = 0.0;
    let mut not_permutative = 0usize;
    for which in [TrigFamily::X1, TrigFamily::Y1, TrigFamily::Z1] {
        for k in 0..n {
            let theta = -pi + 2.0 * pi * k as f64 / (n - 1) as f64;
            let m = trig_family(theta, which).unwrap();
            worst_residual = worst_residual.max(m.orthogonality_residual());
            not_permutative += usize::from(!m.with_tol(1e-10).is_permutative());
        }
    }
    let ends = [
        (TrigFamily::X1, 0.0, "(13)(24)"),
        (TrigFamily::X1, pi, "(14)(23)"),
        (TrigFamily::Y1, 0.0, "(12)(34)"),
        (TrigFamily::Y1, pi, "(14)(23)"),
        (TrigFamily::Z1, 0.0, "(12)(34)"),
        (TrigFamily::Z1, pi, "(13)(24)"),
    ];
    let worst_end = ends
        .iter()
        .map(|(w, th, p)| trig_family(*th, *w).unwrap().max_abs_diff(&p4(p).to_matrix()))
        .fold(0.0, f64::max);
    let elapsed = t.elapsed();
    let ok = worst_residual < 1e-12 && not_permutative == 0 && worst_end <= 1e-15;
    let detail = format!("max residual {worst_residual:.1e}, {not_permutative} non-permutative, endpoint gap {worst_end:.1e}");
    report(3, "trig families", ok, detail, elapsed);
}

#[test]
fn criterion_04_two_permutations() {
    let t = Instant::now();
    let scan = two_perm_orthogonality_scan();
    let elapsed = t.elapsed();
    let allowed = |a: f64, b: f64| (a.abs() == 1.0 && b == 0.0) || (a == 0.0 && b.abs() == 1.0);
    let sets_ok = scan.pairs.iter().all(|r| {
        r.solutions.as_ref().is_some_and(|s| s.iter().all(|(a, b)| a.is_exact() && allowed(a.to_f64(), b.to_f64())))
    });
    let ok = scan.pairs.len() == 276 && scan.nontrivial == 0 && sets_ok && elapsed < Duration::from_secs(5);
    report(4, "two-permutation scan", ok, format!("{} pairs, {} nontrivial", scan.pairs.len(), scan.nontrivial), elapsed);
}

#[test]
fn criterion_05_partition() {
    let t = Instant::now();
    let classes = s4_partition();
    let mut all: Vec<Perm4> = classes.iter().flat_map(|c| c.members).collect();
    all.sort();
    all.dedup();
    let structure_ok = all.len() == 24
        && classes.iter().all(|c| {
            let m = c.members;
            let pairwise = (0..4).all(|i| (i + 1..4).all(|j| (0..4).all(|k| m[i].apply(k) != m[j].apply(k))));
            let sum = m.iter().fold(Mat4::<Q>::zero(), |acc, p| acc + p.to_matrix());
            pairwise && sum == Mat4::all_ones()
        });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0usize;
    for _ in 0..1000 {
        let c = PermLinComb::from_terms(Perm4::all().into_iter().map(|p| (p, random_rational(&mut rng))));
        let parts = split_six_permutative(&c);
        let total = parts.iter().fold(Mat4::<Q>::zero(), |acc, (_, m)| acc + m.clone());
        let ok = parts.len() <= 6 && parts.iter().all(|(_, m)| rows_are_permutations(m)) && total == c.evaluate();
        failures += usize::from(!ok);
    }
    let elapsed = t.elapsed();
    report(5, "six-class partition", structure_ok && failures == 0, format!("1000 splits, {failures} failures"), elapsed);
}

#[test]
fn criterion_06_product_table() {
    let t = Instant::now();
    let entries: Vec<_> = Chain::ALL.iter().map(|&c| verify_group_chain(c, 200, 6).unwrap()).collect();
    let elapsed = t.elapsed();
    let ok = entries.iter().all(|e| e.passed);
    let detail = entries.iter().map(|e| format!("{}: {}", e.claim, e.detail)).collect::<Vec<_>>().join("; ");
    report(6, "group chain product table", ok, detail, elapsed);
}

#[test]
fn criterion_07_nonclosure() {
    let t = Instant::now();
    let e = verify_nonclosure_example();
    report(7, "non-closure example", e.passed, e.detail.clone(), t.elapsed());
}

#[test]
fn criterion_08_quadrangularity() {
    let t = Instant::now();
    let fixture = Pattern4::parse_rows(&["1100", "1011", "0011", "1110"]).unwrap();
    let mut violations = 0usize;
    for mask in 0..1u64 << 16 {
        let p = Pattern4::from_mask(mask);
        if p.is_strongly_quadrangular() && !p.is_quadrangular() {
            violations += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut unsupported = 0usize;
    for k in 0..600 {
        let a = random_orthogonal(&mut rng, Source::ALL[k % Source::ALL.len()]);
        unsupported += usize::from(!pattern_of(&a).is_strongly_quadrangular());
    }
    let elapsed = t.elapsed();
    let ok = !fixture.is_quadrangular() && violations == 0 && unsupported == 0 && elapsed < Duration::from_secs(10);
    let detail = format!("sweep violations {violations}, generated supports failing {unsupported} of 600");
    report(8, "quadrangularity", ok, detail, elapsed);
}

#[test]
fn criterion_09_c_sets() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures = 0usize;
    for k in 0..500 {
        let which = if k % 2 == 0 { CSet::C1 } else { CSet::C2 };
        let branch = if k % 4 < 2 { Sign::Plus } else { Sign::Minus };
        let ok = if k % 3 == 0 {
            let (lo, hi) = which.interval();
            let c2 = rng.gen_range(lo.to_f64()..=hi.to_f64());
            let m = c_set_element::<f64>(which, &c2, branch).unwrap().with_tol(1e-12);
            c_block_ok(which, &m.conjugate_hadamard().with_tol(1e-10))
        } else {
            let c2 = which.rational_c2(&random_rational(&mut rng));
            let m = c_set_element::<Q>(which, &c2, branch).unwrap();
            c_block_ok(which, &m.conjugate_hadamard())
        };
        failures += usize::from(!ok);
    }
    let elapsed = t.elapsed();
    report(9, "C-set Hadamard blocks", failures == 0, format!("500 samples, {failures} failures"), elapsed);
}

fn c_block_ok<F: Field>(which: CSet, h: &Mat4<F>) -> bool {
    let tol = h.tol();
    let corner = &h[(0, 0)];
    let unit = corner.near(&F::one(), tol) || corner.near(&-F::one(), tol);
    let off = (1..4).all(|i| h[(0, i)].near_zero(tol) && h[(i, 0)].near_zero(tol));
    let b = h.trailing_block();
    let line = F::from_i64(which.block_line_sum());
    let sums = b.row_sums().iter().chain(b.col_sums().iter()).all(|s| s.near(&line, tol));
    unit && off && sums && c_bar_membership(which, &b).is_some()
}

#[test]
fn criterion_10_conclusion_matrix() {
    let t = Instant::now();
    let m: Mat4<Q> = Mat::from_ints([[10, -2, -1, 4], [-2, 7, -2, 8], [-1, -2, 10, 4], [4, 8, 4, -5]], 11);
    let printed = PermLinComb::from_terms(
        [("(12)", 1), ("(34)", 7), ("(13)(24)", -1), ("(14)(23)", 4), ("(24)", 9), ("(12)(34)", -3), ("(23)", -6)]
            .map(|(p, n)| (p4(p), q(n, 11))),
    );
    let c = in_perm_span(&m);
    let span_ok = c.as_ref() == Some(&printed) && membership_of(&printed) == Subspaces::of(&[1, 2, 5]);
    let structure_ok = gram_is_identity(&m)
        && !rows_are_permutations(&m)
        && find_direct_sum_form(&m).is_none()
        && hadamard_block_search(&m).is_none()
        && classify_orthogonal(&m) == Classification::Irreducible;
    let elapsed = t.elapsed();
    let ok = span_ok && structure_ok && elapsed < Duration::from_secs(2);
    report(10, "conclusion matrix irreducible", ok, format!("span {span_ok}, structure {structure_ok}"), elapsed);
}

#[test]
fn criterion_11_theorem_gates() {
    let t = Instant::now();
    let samples = covered_samples(&mut ChaCha8Rng::seed_from_u64(11), 10_000);
    let mut violations: BTreeMap<(String, Tag), usize> = BTreeMap::new();
    let mut first = None;
    for s in &samples {
        let tag = classify_orthogonal(&s.matrix).tag();
        if !s.gate.allows(tag) {
            *violations.entry((s.gate.membership.to_string(), tag)).or_default() += 1;
            first.get_or_insert_with(|| format!("{:?}", s.matrix));
        }
    }
    let elapsed = t.elapsed();
    let total: usize = violations.values().sum();
    let mut detail = format!("{} samples, {total} violations", samples.len());
    for ((membership, tag), n) in &violations {
        detail += &format!(", {n} with membership {membership} tagged {tag}");
    }
    if let Some(w) = first {
        detail += &format!("; first {w}");
    }
    report(11, "subspace theorem gates", total == 0, detail, elapsed);
}

#[test]
fn criterion_12_determinism() {
    let t = Instant::now();
    let a = run_all(12, DEFAULT_SAMPLES).to_json();
    let b = run_all(12, DEFAULT_SAMPLES).to_json();
    let elapsed = t.elapsed();
    report(12, "deterministic report", a == b, format!("{} bytes", a.len()), elapsed);
}
