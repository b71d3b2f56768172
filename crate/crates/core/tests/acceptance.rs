//! Acceptance checks. Runs without the libtest harness so that every check
//! prints one PASS/FAIL line, including when all pass.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use lde::engine::{posterior, posterior_with, Posterior, QueryOptions};
use lde::io::{shipped_linkage_config, shipped_linkage_network, Shipped};
use lde::linkage::{afname_masses, build_same_network, odds, RecordDesc};
use lde::oracle::{
    compare_case, oracle_posterior, random_network, tv_distance, RandomCase, RandomParams,
};
use lde::predicate::{single_edit_neighbors, solution_count, solve};
use lde::table::{Count, NORMALIZATION_TOL};
use lde::tree::{condition, evaluate, merge2, multiply, prune, Context, Op};
use lde::{Alphabet, Atom, ConstraintSet, Factor, Literal, NameTable, Term, TreeNode};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{seq::SliceRandom, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}

// Leaf masses of summing out the actual name after observing DAVID and DAVIG.
fn davis_masses() -> Check {
    let cfg = shipped_linkage_config().map_err(|e| e.to_string())?;
    let male = cfg.tables.get("male").map_err(|e| e.to_string())?;
    let p_davis = male
        .lookup("DAVIS")
        .ok_or("DAVIS missing from the male table")?;
    let pnew = male.pnew();
    let prsing = 1.0 / (25.0 * 5.0);
    let want_p1 = prsing * prsing * p_davis;
    let want_p2 = 23.0 * prsing * prsing * pnew;

    let x = RecordDesc::new("DAVID").unwrap();
    let y = RecordDesc::new("DAVIG").unwrap();
    let (_, leaves) = afname_masses(&x, &y, &cfg).map_err(|e| e.to_string())?;
    let env = build_same_network(&cfg)
        .map_err(|e| e.to_string())?
        .env()
        .clone();

    let both = |in_male: bool| -> BTreeSet<Literal> {
        [
            Literal::new(Atom::in_table(Term::var("Afname"), "male"), in_male),
            Literal::pos(Atom::single_edit(Term::var("Afname"), Term::lit("DAVID"))),
            Literal::pos(Atom::single_edit(Term::var("Afname"), Term::lit("DAVIG"))),
        ]
        .into_iter()
        .collect()
    };
    let find = |in_male: bool| {
        let want = both(in_male);
        leaves
            .iter()
            .find(|l| {
                l.constraints
                    .literals
                    .iter()
                    .cloned()
                    .collect::<BTreeSet<_>>()
                    == want
            })
            .ok_or_else(|| format!("no leaf with constraints {want:?}"))
    };
    let value = |l: &lde::sumout::LeafMass| {
        l.mass
            .fold_constants(&env)
            .ok()
            .and_then(|m| m.as_const())
            .ok_or_else(|| format!("mass {} is not a number", l.mass))
    };
    let p1 = find(true)?;
    let p2 = find(false)?;
    let (v1, v2) = (value(p1)?, value(p2)?);
    ensure(rel_close(v1, want_p1, 1e-12), || {
        format!("p1' = {v1:e}, want {want_p1:e}")
    })?;
    ensure(rel_close(v2, want_p2, 1e-12), || {
        format!("p2' = {v2:e}, want {want_p2:e}")
    })?;
    ensure(p1.count == Some(Count::Finite(1)), || {
        format!("p1' count {:?}", p1.count)
    })?;
    ensure(p2.count == Some(Count::Finite(23)), || {
        format!("p2' count {:?}", p2.count)
    })?;

    let alphabet = Alphabet::latin();
    let common = ConstraintSet::new("Afname")
        .with(
            Atom::single_edit(Term::var("Afname"), Term::lit("DAVID")),
            true,
        )
        .with(
            Atom::single_edit(Term::var("Afname"), Term::lit("DAVIG")),
            true,
        );
    let n_common = solution_count(
        &solve(&common, &cfg.tables, &alphabet).unwrap(),
        &cfg.tables,
    )
    .unwrap();
    let unlisted = common.with(Atom::in_table(Term::var("Afname"), "male"), false);
    let n_unlisted = solution_count(
        &solve(&unlisted, &cfg.tables, &alphabet).unwrap(),
        &cfg.tables,
    )
    .unwrap();
    ensure(n_common == Count::Finite(24), || {
        format!("intersection count {n_common}")
    })?;
    ensure(n_unlisted == Count::Finite(23), || {
        format!("filtered count {n_unlisted}")
    })?;
    Ok(format!("p1'={v1:.6e} p2'={v2:.6e} counts 24/23"))
}

fn hamming_one(a: &str, b: &str) -> bool {
    a.len() == b.len() && a.chars().zip(b.chars()).filter(|(x, y)| x != y).count() == 1
}

fn neighbor_counts() -> Check {
    let alphabet = Alphabet::latin();
    let letters: Vec<char> = alphabet.chars().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let len = rng.gen_range(1..=12);
        let w: String = (0..len)
            .map(|_| *letters.choose(&mut rng).unwrap())
            .collect();
        let got = single_edit_neighbors(&w, &alphabet).map_err(|e| e.to_string())?;
        // brute force: every one-position rewrite, filtered by Hamming distance
        let mut brute = BTreeSet::new();
        for i in 0..len {
            for &c in &letters {
                let mut cs: Vec<char> = w.chars().collect();
                cs[i] = c;
                let cand: String = cs.into_iter().collect();
                if hamming_one(&w, &cand) {
                    brute.insert(cand);
                }
            }
        }
        ensure(got == brute, || {
            format!("neighbors of {w} differ from brute force")
        })?;
        ensure(got.len() == 25 * len, || {
            format!("{w}: {} neighbors", got.len())
        })?;
    }
    Ok("50 words, |N(w)| = 25|w|".into())
}

fn conditioning_golden() -> Check {
    let golden = include_str!("golden/fname_given_david.txt");
    let cfg = shipped_linkage_config().map_err(|e| e.to_string())?;
    let net = build_same_network(&cfg).map_err(|e| e.to_string())?;
    let cpd = net.cpd("Fname_x").map_err(|e| e.to_string())?;
    let f = condition(&cpd.factor, "Fname_x", "DAVID", net.env()).map_err(|e| e.to_string())?;
    let got = f.root().pretty();
    ensure(got == golden, || {
        format!("tree differs from golden file:\n{got}")
    })?;
    ensure(
        golden.contains("= male -> 0.02363") && golden.contains("else -> pnew(female)"),
        || "golden file lost the folded table leaves".into(),
    )?;
    Ok("tree matches golden file".into())
}

fn support_of(case: &RandomCase, var: &str) -> Vec<String> {
    match case.net.env().small_values(var) {
        Ok(vs) => vs.to_vec(),
        Err(_) => case.universe.strings().iter().cloned().collect(),
    }
}

fn oracle_equivalence(posteriors: &mut Vec<Posterior>) -> Check {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for seed in 0..100 {
        let case = random_network(seed, RandomParams::default())
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(
            case.net.cpds().iter().any(|c| {
                let mut preds = false;
                walk(c.factor.root(), &mut |n| {
                    preds |= matches!(n, TreeNode::PredSplit { .. })
                });
                preds
            }),
            || format!("seed {seed} has no predicate CPD"),
        )?;
        ensure(case.universe.len() <= 50, || {
            format!("seed {seed}: universe of {}", case.universe.len())
        })?;
        for c in compare_case(&case).map_err(|e| format!("seed {seed}: {e}"))? {
            ensure(c.tv <= 1e-9, || {
                format!("seed {seed} {}: TV {:e}", c.variable, c.tv)
            })?;
            worst = worst.max(c.tv);
            n += 1;
        }
        for q in &case.queries {
            posteriors.push(posterior(&case.net, &case.evidence, q).map_err(|e| e.to_string())?);
        }
    }
    Ok(format!("100 networks, {n} posteriors, max TV {worst:.2e}"))
}

fn walk<'a>(t: &'a TreeNode, f: &mut impl FnMut(&'a TreeNode)) {
    f(t);
    for c in t.children() {
        walk(c, f);
    }
}

fn pointwise_semantics() -> Check {
    let env = common::env();
    let assignments = common::all_assignments();
    let scope = common::VARS;
    let mut runner = TestRunner::new(Config {
        cases: 200,
        failure_persistence: None,
        ..Config::default()
    });
    let fail = |what: &str, a: &lde::Assignment, x: f64, y: f64| {
        TestCaseError::fail(format!("{what} at {a:?}: {x} vs {y}"))
    };
    let result = runner.run(
        &(
            common::tree(),
            common::tree(),
            proptest::sample::select(vec!["a", "b", "c"]),
        ),
        |(t1, t2, a_val)| {
            let f1 = Factor::new(scope, t1.clone(), &env).unwrap();
            let f2 = Factor::new(scope, t2.clone(), &env).unwrap();
            let pruned = prune(&f1, &Context::new(), &env).unwrap();
            let sum = merge2(&t1, &t2, Op::Add, &env).unwrap();
            let prod = merge2(&t1, &t2, Op::Mul, &env).unwrap();
            let mult = multiply(&[f1.clone(), f2.clone()], &env).unwrap();
            let ctx =
                Context::new().with_restriction("A", &[a_val.to_string()].into_iter().collect());
            let restricted = prune(&f1, &ctx, &env).unwrap();
            for a in &assignments {
                let (e1, e2) = (
                    evaluate(&f1, a, &env).unwrap(),
                    evaluate(&f2, a, &env).unwrap(),
                );
                let checks = [
                    ("prune", common::eval(pruned.root(), a, &env), e1),
                    ("merge2(+)", common::eval(&sum, a, &env), e1 + e2),
                    ("merge2(x)", common::eval(&prod, a, &env), e1 * e2),
                    ("multiply", evaluate(&mult, a, &env).unwrap(), e1 * e2),
                ];
                for (what, got, want) in checks {
                    if !common::close(got, want, 1e-12) {
                        return Err(fail(what, a, got, want));
                    }
                }
                if a.get("A") == Some(a_val) {
                    let got = evaluate(&restricted, a, &env).unwrap();
                    if !common::close(got, e1, 1e-12) {
                        return Err(fail("prune in context", a, got, e1));
                    }
                }
            }
            for var in scope {
                for v in common::values_of(var) {
                    let c = condition(&f1, var, v, &env).unwrap();
                    for a in assignments.iter().filter(|a| a.get(var) == Some(v)) {
                        let (got, want) = (
                            evaluate(&c, a, &env).unwrap(),
                            evaluate(&f1, a, &env).unwrap(),
                        );
                        if !common::close(got, want, 1e-12) {
                            return Err(fail(&format!("condition {var}={v}"), a, got, want));
                        }
                    }
                }
            }
            // zero short-circuit: nothing is grafted below a zero leaf
            let zero_first = TreeNode::split(
                "A",
                vec![(&["a"][..], TreeNode::constant(0.0))],
                Some(t1.clone()),
            );
            let merged = merge2(&zero_first, &t2, Op::Mul, &env).unwrap();
            let under_a = match &merged {
                TreeNode::SmallSplit { var, branches, .. } if var == "A" => branches
                    .iter()
                    .find(|b| b.values.contains("a"))
                    .map(|b| &b.node),
                other => Some(other),
            };
            match under_a.and_then(TreeNode::as_leaf) {
                Some(l) if l.is_zero() => {}
                _ => {
                    return Err(TestCaseError::fail(format!(
                        "graft under zero leaf:\n{}",
                        merged.pretty()
                    )))
                }
            }
            for a in &assignments {
                let want = common::eval(&zero_first, a, &env) * common::eval(&t2, a, &env);
                let got = common::eval(&merged, a, &env);
                if !common::close(got, want, 1e-12) {
                    return Err(fail("zero short-circuit", a, got, want));
                }
            }
            Ok(())
        },
    );
    result.map_err(|e| e.to_string())?;
    Ok(format!(
        "200 random tree pairs x {} assignments",
        assignments.len()
    ))
}

fn table_balanced(t: &NameTable) -> bool {
    let unseen = match t.n_unseen() {
        Count::Finite(n) => n as f64 * t.pnew(),
        Count::Unbounded => return false,
    };
    (t.entry_total() + unseen - 1.0).abs() <= NORMALIZATION_TOL
}

fn normalization(mut posteriors: Vec<Posterior>) -> Check {
    let cfg = shipped_linkage_config().map_err(|e| e.to_string())?;
    let net = shipped_linkage_network()
        .map_err(|e| e.to_string())?
        .network;
    let mut tables: Vec<NameTable> = cfg.tables.iter().cloned().collect();
    tables.extend(net.tables().iter().cloned());
    for male in [Shipped::MALE_NAMES, Shipped::FEMALE_NAMES] {
        for coverage in [lde::Coverage::AsListed, lde::Coverage::Fraction(0.9)] {
            tables.push(
                lde::table::load_name_table("t", male, 1e-6, coverage)
                    .map_err(|e| e.to_string())?,
            );
        }
    }
    for seed in 0..100 {
        let case = random_network(seed, RandomParams::default()).map_err(|e| e.to_string())?;
        tables.extend(case.net.tables().iter().cloned());
    }
    for t in &tables {
        ensure(table_balanced(t), || {
            format!("table {} is not normalized", t.id())
        })?;
    }

    let pairs = [
        ("DAVID", "DAVIG"),
        ("DAVID", "DAVID"),
        ("MARY", "MARIA"),
        ("DAVID", "XQZT"),
    ];
    for (x, y) in pairs {
        let ev = lde::Assignment::new().with("Fname_x", x).with("Fname_y", y);
        for q in ["Afname", "Sex", "EFx", "SloppyY"] {
            posteriors.push(posterior(&net, &ev, q).map_err(|e| e.to_string())?);
        }
    }
    let mut worst: f64 = 0.0;
    for p in &posteriors {
        let dev = (p.total() - 1.0).abs();
        ensure(dev <= 1e-9, || {
            format!("posterior of {} sums to {}", p.variable, p.total())
        })?;
        worst = worst.max(dev);
    }
    Ok(format!(
        "{} tables, {} posteriors, max deviation {worst:.2e}",
        tables.len(),
        posteriors.len()
    ))
}

fn linkage_ordering() -> Check {
    let cfg = shipped_linkage_config().map_err(|e| e.to_string())?;
    let r = |s: &str| RecordDesc::new(s).unwrap();
    let o = |a: &str, b: &str| odds(&r(a), &r(b), &cfg).map_err(|e| e.to_string());
    let (same, near, far) = (
        o("DAVID", "DAVID")?,
        o("DAVID", "DAVIG")?,
        o("DAVID", "XQZT")?,
    );
    ensure(same > near && near > far && far > 0.0, || {
        format!("odds not ordered: {same:e} {near:e} {far:e}")
    })?;
    for (a, b) in [
        ("DAVID", "DAVIG"),
        ("DAVID", "XQZT"),
        ("MARY", "MARIA"),
        ("JOHN", "JOAN"),
        ("DAVIS", "DAVID"),
    ] {
        let (ab, ba) = (o(a, b)?, o(b, a)?);
        ensure(rel_close(ab, ba, 1e-9), || {
            format!("odds({a},{b}) = {ab:e} but odds({b},{a}) = {ba:e}")
        })?;
    }
    Ok(format!("{same:.4e} > {near:.4e} > {far:.4e}, symmetric"))
}

fn pairwise_tv(p: &Posterior, q: &Posterior, support: &[String], case: &RandomCase) -> f64 {
    let tables = case.net.tables();
    let (mut d, mut in_p, mut in_q) = (0.0, 0.0, 0.0);
    for v in support {
        let (a, b) = (
            p.probability(v, tables).unwrap(),
            q.probability(v, tables).unwrap(),
        );
        d += (a - b).abs();
        in_p += a;
        in_q += b;
    }
    0.5 * (d + ((p.total() - in_p) - (q.total() - in_q)).abs())
}

fn order_invariance(posteriors: &mut Vec<Posterior>) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for seed in 1000..1020 {
        let case = random_network(seed, RandomParams::default()).map_err(|e| e.to_string())?;
        for q in &case.queries {
            let support = support_of(&case, q);
            let refs: Vec<&str> = support.iter().map(String::as_str).collect();
            let oracle = oracle_posterior(&case.net, &case.universe, &case.evidence, q)
                .map_err(|e| e.to_string())?;
            let baseline = posterior(&case.net, &case.evidence, q).map_err(|e| e.to_string())?;
            let hidden: Vec<String> = case
                .net
                .variable_names()
                .into_iter()
                .filter(|v| v != q && !case.evidence.contains(v))
                .collect();
            for i in 0..5 {
                let mut order = hidden.clone();
                order.shuffle(&mut rng);
                let opts = QueryOptions {
                    order: Some(order.clone()),
                    keep_barren: i % 2 == 1,
                };
                let (p, _) = posterior_with(&case.net, &case.evidence, q, &opts)
                    .map_err(|e| format!("seed {seed} {q} order {order:?}: {e}"))?;
                let tv = pairwise_tv(&p, &baseline, &support, &case);
                let tv_oracle = tv_distance(&p, &oracle, &refs, case.net.tables()).unwrap();
                ensure(tv <= 1e-9 && tv_oracle <= 1e-9, || {
                    format!("seed {seed} {q} order {order:?}: TV {tv:e} / {tv_oracle:e}")
                })?;
                worst = worst.max(tv).max(tv_oracle);
                runs += 1;
                posteriors.push(p);
            }
        }
    }
    Ok(format!(
        "20 networks, {runs} ordered runs, max TV {worst:.2e}"
    ))
}

fn report(n: usize, name: &str, limit: Option<Duration>, run: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = run();
    let took = start.elapsed();
    let result = match (result, limit) {
        (Ok(_), Some(l)) if took > l => Err(format!("took {took:.2?}, limit {l:?}")),
        (r, _) => r,
    };
    match &result {
        Ok(detail) => println!("criterion {n} {name}: PASS ({detail}; {took:.2?})"),
        Err(e) => println!("criterion {n} {name}: FAIL: {e}"),
    }
    result.is_ok()
}

fn main() {
    let secs = Duration::from_secs;
    let mut posteriors = Vec::new();
    let mut ok = true;
    ok &= report(1, "davis masses", Some(secs(1)), davis_masses);
    ok &= report(2, "neighbor count", Some(secs(1)), neighbor_counts);
    ok &= report(3, "conditioning golden", Some(secs(1)), conditioning_golden);
    ok &= report(4, "oracle equivalence", Some(secs(60)), || {
        oracle_equivalence(&mut posteriors)
    });
    ok &= report(
        5,
        "pointwise semantics",
        Some(secs(10)),
        pointwise_semantics,
    );
    ok &= report(8, "order invariance", None, || {
        order_invariance(&mut posteriors)
    });
    ok &= report(7, "linkage odds", Some(secs(5)), linkage_ordering);
    ok &= report(6, "normalization", None, move || normalization(posteriors));
    if !ok {
        std::process::exit(1);
    }
}
