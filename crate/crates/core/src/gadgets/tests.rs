use super::*;
use crate::engine::reach_set;
use crate::program::{validate_run, Instruction};

fn none(_: &str, _: &Walker<'_>) -> Option<u64> {
    None
}

struct Probe {
    valid: bool,
    tests_used: Option<u64>,
    end: Option<Vec<u64>>,
}

fn probe(c: &Component, n: u64, vals: &[(&str, u64)]) -> (Instance, Probe) {
    let inst = c.instantiate().unwrap();
    let tests = inst.default_tests(n);
    let init = inst.initial(n, vals, tests).unwrap();
    let probe = match inst.valid_run(n, &init, &SearchLimits::states(5_000_000)) {
        PathResult::Found(cs) => {
            let last = cs.last().unwrap();
            let u1 = inst.program.counter_index(U1).map_or(0, |i| init[i] - last.values[i]);
            Probe {
                valid: true,
                tests_used: Some(u1 / 2),
                end: Some(last.values.clone()),
            }
        }
        PathResult::NotFound => Probe {
            valid: false,
            tests_used: None,
            end: None,
        },
        PathResult::LimitExceeded(s) => panic!("search limit: {s:?}"),
    };
    (inst, probe)
}

/// Checks search and walker agree with `expect` on every triple.
fn check_triples(make: fn(&str, &str, &str, &Aux) -> Component, n: u64, expect: fn(u64, u64, u64) -> bool) {
    let c = make("x", "y", "z", &Aux::default());
    let budget = c.budget.eval(n).unwrap() as u64;
    for x in 0..=n {
        for y in 0..=n {
            for z in 0..=n {
                let vals = [("x", x), ("y", y), ("z", z)];
                let (inst, p) = probe(&c, n, &vals);
                assert_eq!(p.valid, expect(x, y, z), "{} at N={n}, {vals:?}", c.name);
                if let Some(used) = p.tests_used {
                    assert!(used <= budget, "{} used {used} > {budget}", c.name);
                    let end = p.end.unwrap();
                    for (name, v) in vals {
                        assert_eq!(end[inst.program.counter_index(name).unwrap()], v);
                    }
                }
                let init = inst.initial(n, &vals, inst.default_tests(n)).unwrap();
                let w = inst.witness(n, init, &none);
                assert_eq!(w.is_ok(), p.valid, "walker on {} {vals:?}", c.name);
                if let Ok(run) = w {
                    let run = run.to_run(&inst.program);
                    assert!(validate_run(&inst.program, run.iter()));
                    let last = run.last().unwrap();
                    assert_eq!(last.line, inst.program.halt_line());
                    let (u1, u2) = (
                        last.values[inst.program.counter_index(U1).unwrap()],
                        last.values[inst.program.counter_index(U2).unwrap()],
                    );
                    assert_eq!(u2, n * u1);
                }
            }
        }
    }
}

#[test]
fn addition_iff() {
    for n in 1..=2 {
        check_triples(addition, n, |x, y, z| x + y == z);
        check_triples(not_addition, n, |x, y, z| x + y != z);
    }
}

#[test]
fn multiplication_iff() {
    for n in 1..=2 {
        check_triples(multiplication, n, |x, y, z| x * y == z);
        check_triples(not_multiplication, n, |x, y, z| x * y != z);
    }
}

#[test]
fn literals_at_three() {
    check_triples(addition, 3, |x, y, z| x + y == z);
    check_triples(not_addition, 3, |x, y, z| x + y != z);
    check_triples(multiplication, 3, |x, y, z| x * y == z);
    check_triples(not_multiplication, 3, |x, y, z| x * y != z);
}

/// Every valid run of not-multiplication leaves the shared scratch counter
/// at zero, so a following copy cannot pick up a stale value.
#[test]
fn not_multiplication_clears_scratch() {
    let c = not_multiplication("y", "c", "x", &Aux::default());
    let inst = c.instantiate().unwrap();
    let idx = |s: &str| inst.program.counter_index(s).unwrap();
    let (t, u1, u2) = (idx("_t"), idx(U1), idx(U2));
    let n = 3;
    let mut limits = SearchLimits::states(5_000_000);
    limits.slack = Some(SlackPrune { u1, u2, n });
    for y in 0..=n {
        for cv in 0..=n {
            for x in (0..=n).filter(|&x| x != y * cv) {
                let init = inst.initial(n, &[("x", x), ("c", cv), ("y", y)], inst.default_tests(n)).unwrap();
                let sys = System::from(&inst.program);
                let halt = inst.program.halt_line();
                let dirty = find_path(&sys, 1, &init, &limits, &|_| true, &|l, v| {
                    l == halt && v[t] != 0 && v[u2] == n * v[u1]
                });
                assert!(matches!(dirty, PathResult::NotFound), "y={y} c={cv} x={x}");
            }
        }
    }
}

#[test]
fn forall_over_alternatives() {
    let aux = Aux::default();
    let body = alt(not_multiplication("y", "c", "x", &aux), addition("y", "o", "x", &aux));
    let inst = forall("y", body).unwrap().instantiate().unwrap();
    for n in 1..=3u64 {
        for x in 0..=n {
            for cv in 0..=n {
                let expect = (0..=n).all(|y| y * cv != x || y == x);
                let vals = [("x", x), ("c", cv), ("o", 0)];
                let init = inst.initial(n, &vals, inst.default_tests(n)).unwrap();
                let found = matches!(inst.valid_run(n, &init, &SearchLimits::states(20_000_000)), PathResult::Found(_));
                assert_eq!(found, expect, "search N={n} x={x} c={cv}");
                assert_eq!(inst.witness(n, init, &none).is_ok(), expect, "walker N={n} x={x} c={cv}");
            }
        }
    }
}

#[test]
fn spot_checks_at_four() {
    let aux = Aux::default();
    let cases: [(Component, [u64; 3], bool); 6] = [
        (addition("x", "y", "z", &aux), [1, 2, 3], true),
        (not_addition("x", "y", "z", &aux), [1, 2, 3], false),
        (addition("x", "y", "z", &aux), [1, 2, 2], false),
        (not_addition("x", "y", "z", &aux), [1, 2, 2], true),
        (multiplication("x", "y", "z", &aux), [2, 2, 4], true),
        (not_multiplication("x", "y", "z", &aux), [2, 2, 3], true),
    ];
    for (c, [x, y, z], expect) in cases {
        let inst = c.instantiate().unwrap();
        let init = inst.initial(4, &[("x", x), ("y", y), ("z", z)], inst.default_tests(4)).unwrap();
        assert_eq!(inst.witness(4, init, &none).is_ok(), expect, "{}", c.name);
    }
}

#[test]
fn zero_test_entries() {
    let c = zero_test("v");
    let inst = c.instantiate().unwrap();
    let sys = System::from(&inst.program);
    let names: Vec<&str> = inst.program.counters().iter().map(|s| s.as_str()).collect();
    assert_eq!(names, ["v", "v^", "u2", "u1"]);
    let halt = inst.program.halt_line();
    let ends = |v: u64| -> Vec<Vec<u64>> {
        let init = vec![v, 3 - v, 6, 2];
        reach_set(&sys, &init, &SearchLimits::unbounded()).values_at(halt)
    };
    assert!(ends(0).contains(&vec![0, 3, 0, 0]));
    assert!(ends(1).iter().all(|e| e[2] != 3 * e[3]));
    assert!(reach_set(&sys, &[0, 3, 6, 0], &SearchLimits::unbounded())
        .values_at(halt)
        .is_empty());
}

#[test]
fn copy_sets_target() {
    let c = copy("x", "x'", "t");
    assert_eq!(c.budget, Budget::constant(3));
    let (inst, p) = probe(&c, 2, &[("x", 2), ("x'", 1)]);
    assert!(p.valid);
    assert_eq!(p.tests_used, Some(3));
    let end = p.end.unwrap();
    let at = |s: &str| end[inst.program.counter_index(s).unwrap()];
    assert_eq!((at("x"), at("x'"), at("t")), (2, 2, 0));
    let (inst, p) = probe(&c, 2, &[]);
    let end = p.end.unwrap();
    assert_eq!(end[inst.program.counter_index("x'").unwrap()], 0);
}

#[test]
fn addition_uses_exactly_twelve() {
    let (_, p) = probe(&addition("x", "y", "z", &Aux::default()), 2, &[("x", 1), ("y", 1), ("z", 2)]);
    assert_eq!(p.tests_used, Some(12));
}

#[test]
fn exists_reaches_every_value() {
    let c = exists("v");
    assert_eq!(c.budget, Budget::zero());
    let inst = c.instantiate().unwrap();
    let init = inst.initial(3, &[], 0).unwrap();
    let sys = System::from(&inst.program);
    let mut ends: Vec<u64> = reach_set(&sys, &init, &SearchLimits::unbounded())
        .values_at(inst.program.halt_line())
        .into_iter()
        .map(|v| v[0])
        .collect();
    ends.sort();
    ends.dedup();
    assert_eq!(ends, [0, 1, 2, 3]);
    for target in 0..=3 {
        let choose = move |_: &str, _: &Walker<'_>| Some(target);
        let run = inst.witness(3, init.clone(), &choose).unwrap();
        assert_eq!(run.to_run(&inst.program).last().unwrap().values[0], target);
    }
}

#[test]
fn forall_checks_every_value() {
    let aux = Aux::default();
    let trivially = forall("v", addition("v", "c0", "v", &aux)).unwrap();
    let squares = forall("v", multiplication("v", "v", "v", &aux)).unwrap();
    for (c, expect) in [(trivially, true), (squares, false)] {
        let inst = c.instantiate().unwrap();
        let init = inst.initial(2, &[], inst.default_tests(2)).unwrap();
        assert_eq!(inst.witness(2, init.clone(), &none).is_ok(), expect, "{}", c.name);
        let found = matches!(
            inst.valid_run(2, &init, &SearchLimits::states(5_000_000)),
            PathResult::Found(_)
        );
        assert_eq!(found, expect, "{}", c.name);
    }
    assert_eq!(
        forall("v", exists("v")).unwrap_err(),
        GadgetError::BodyChangesVariable("v".into())
    );
}

#[test]
fn forall_degenerate_segment() {
    let c = forall("v", zero_test("v")).unwrap();
    let inst = c.instantiate().unwrap();
    let init = inst.initial(0, &[], inst.default_tests(0)).unwrap();
    assert!(inst.witness(0, init, &none).is_ok());
}

#[test]
fn composed_budgets() {
    let aux = Aux::default();
    assert_eq!(seq(vec![copy("x", "x'", "t"), copy("y", "y'", "t")]).budget, Budget::constant(6));
    let a = alt(addition("x", "y", "z", &aux), not_addition("x", "y", "z", &aux));
    assert_eq!(a.budget, Budget::constant(12));
    assert_eq!(seq(vec![exists("v"), exists("w")]).budget, Budget::zero());
    let f = forall("v", zero_test("w")).unwrap();
    assert_eq!(f.budget.eval(3), Some(6));
}

#[test]
fn hats_stay_complementary() {
    let c = not_addition("x", "y", "z", &Aux::default());
    let inst = c.instantiate().unwrap();
    let n = 1;
    let init = inst.initial(n, &[("x", 1)], inst.default_tests(n)).unwrap();
    let sys = System::from(&inst.program);
    let rs = reach_set(&sys, &init, &SearchLimits::states(2_000_000));
    assert!(rs.exhaustive);
    let pairs: Vec<(usize, usize)> = inst
        .hats
        .bounded()
        .map(|b| {
            (
                inst.program.counter_index(b).unwrap(),
                inst.program.counter_index(inst.hats.twin(b).unwrap()).unwrap(),
            )
        })
        .collect();
    // Updates come in pairs, so check only at lines that do not touch hats.
    for cfg in &rs.configs {
        if let Some(Instruction::Inc { .. } | Instruction::Dec { .. }) = inst.program.line(cfg.line - 1) {
            continue;
        }
        for &(a, b) in &pairs {
            assert_eq!(cfg.values[a] + cfg.values[b], n, "line {}", cfg.line);
        }
    }
}

#[test]
fn unknown_gadget_name() {
    assert!(by_name("division").is_err());
    for name in GADGET_NAMES {
        by_name(name).unwrap().instantiate().unwrap();
    }
}
