use super::*;
use crate::engine::{run_stats, ReachResult, SearchLimits};
use crate::program::{is_zero_terminating, render_program, validate_run};

const EVEN: &str = "free x; exists y. y + y = x";

fn compiled(text: &str) -> CompiledProgram {
    compile(&parse_query(text).unwrap()).unwrap()
}

#[test]
fn even_parameters() {
    let cp = compiled(EVEN);
    assert_eq!((cp.k, cp.m), (1, 1));
    assert_eq!(cp.test_budget.to_string(), "2*N + 12");
    assert_eq!(cp.provision, cp.test_budget);
    let init = cp.initial_configuration(3, &[2]).unwrap();
    let at = |c: &str| init.values[cp.program.counter_index(c).unwrap()];
    assert_eq!((at("x"), at("x^"), at("y"), at("y^")), (2, 1, 0, 3));
    assert_eq!((at("_c0"), at("_c0^")), (0, 3));
    assert_eq!((at("u1"), at("u2")), (36, 108));
    assert!(matches!(
        cp.initial_configuration(3, &[4]),
        Err(FoError::OutOfSegment { .. })
    ));
}

#[test]
fn constants_above_segment_rejected() {
    let cp = compiled("free x; x + 2 = 3");
    assert!(cp.initial_configuration(3, &[1]).is_ok());
    assert_eq!(
        cp.initial_configuration(2, &[1]).unwrap_err(),
        FoError::ConstantTooLarge { value: 3, n: 2 }
    );
}

#[test]
fn quantifier_free_literal() {
    let cp = compiled("free x, y, z; x + y = z");
    assert_eq!(cp.component_budget, crate::gadgets::Budget::constant(12));
    assert_eq!((cp.k, cp.m), (1, 0));
}

#[test]
fn compile_is_deterministic() {
    let a = render_program(&compiled(EVEN).program);
    let b = render_program(&compiled(EVEN).program);
    assert_eq!(a, b);
    let m1 = serde_json::to_string(&compiled(EVEN).manifest()).unwrap();
    let m2 = serde_json::to_string(&compiled(EVEN).manifest()).unwrap();
    assert_eq!(m1, m2);
}

#[test]
fn engine_agrees_with_oracle_on_evenness() {
    let cp = compiled(EVEN);
    for n in 1..=2 {
        for x in 0..=n {
            let expect = eval_oracle(&cp.query, n, &[x]).unwrap();
            match cp.zero_reach(n, &[x], &SearchLimits::states(20_000_000)).unwrap() {
                ReachResult::Reachable(run) => {
                    assert!(expect, "N={n} x={x}");
                    assert!(validate_run(&cp.program, run.iter()));
                    assert!(is_zero_terminating(&cp.program, run.iter()));
                }
                ReachResult::Unreachable { exhaustive, .. } => {
                    assert!(exhaustive);
                    assert!(!expect, "N={n} x={x}");
                }
                r => panic!("{r:?}"),
            }
        }
    }
}

#[test]
fn witnesses_for_evenness() {
    let cp = compiled(EVEN);
    let n = 8;
    assert!(cp.witness_run(n, &[5]).unwrap().is_none());
    let run = cp.witness_run(n, &[6]).unwrap().unwrap();
    let configs: Vec<_> = run.configurations(&cp.program).collect();
    assert_eq!(configs.len(), run.len());
    assert!(validate_run(&cp.program, configs.iter()));
    assert!(is_zero_terminating(&cp.program, configs.iter()));
    let stats = run_stats(&cp.program, configs.iter(), &cp.stats_meta(n));
    assert_eq!(stats.hat_violations, 0);
    assert_eq!(stats.zero_tests - stats.drain_zero_tests, 12);
    assert_eq!(stats.zero_tests as i128, cp.provision.eval_n(n).unwrap());
}

#[test]
fn forall_witness() {
    // true only for x = 0
    let cp = compiled("free x; forall y. exists z. x + y = z");
    for x in 0..=3 {
        let w = cp.witness_run(3, &[x]).unwrap();
        assert_eq!(w.is_some(), x == 0);
        if let Some(run) = w {
            let configs: Vec<_> = run.configurations(&cp.program).collect();
            assert!(is_zero_terminating(&cp.program, configs.iter()));
        }
    }
}

#[test]
fn reduction_map_is_polynomial() {
    let cp = compiled("free x, w; exists y. x * y = w");
    let map = cp.reduction_map();
    let find = |c: &str| map.iter().find(|e| e.counter == c).unwrap().poly.to_string();
    assert_eq!(find("x"), "x");
    assert_eq!(find("x^"), "N - x");
    assert_eq!(find("y^"), "N");
    assert_eq!(find("y"), "0");
    assert!(find("u2").contains("N"));
}
