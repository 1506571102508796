use super::*;
use crate::engine::{ReachResult, SearchLimits};

fn corpus(name: &str) -> TuringMachine {
    let (_, text) = CORPUS.iter().find(|(n, _)| *n == name).unwrap();
    TuringMachine::from_json_str(text).unwrap()
}

#[test]
fn codec() {
    let m = corpus("even");
    let c = m.codec();
    assert_eq!(num(&c, "ab").unwrap(), 7);
    assert_eq!(num(&c, "ba").unwrap(), 5);
    assert_eq!(num(&c, "").unwrap(), 0);
    assert_eq!(initial_vector("ab", &c).unwrap(), [7, 0, 0]);
    assert_eq!(initial_vector("", &c).unwrap(), [0, 0, 0]);
    for w in m.words_up_to(5) {
        assert_eq!(denum(num(&c, &w).unwrap(), &c).unwrap(), w);
    }
    // 3 = 0 + 1*3 has a zero digit below the leading one.
    assert_eq!(denum(3, &c), Err(TmError::NotCodeword(3)));
    assert_eq!(num(&c, "ac"), Err(TmError::Symbol('c')));
}

#[test]
fn interpreter() {
    let m = corpus("even");
    let r = tm_run(&m, "abab", 100, 100).unwrap();
    assert_eq!(r.verdict, TmVerdict::Accept);
    assert!(r.space <= 5);
    assert_eq!(tm_run(&m, "a", 100, 100).unwrap().verdict, TmVerdict::Reject);
    assert_eq!(tm_run(&m, "ab", 100, 1).unwrap().verdict, TmVerdict::FuelExceeded);
    let u = corpus("unary-succ");
    assert_eq!(tm_run(&u, "", 1, 100).unwrap().verdict, TmVerdict::SpaceExceeded);
    let ok = tm_run(&u, "11", 100, 100).unwrap();
    assert_eq!((ok.verdict, ok.space), (TmVerdict::Accept, 4));
    let b = corpus("contains-b");
    assert_eq!(tm_run(&b, "aab", 100, 100).unwrap().verdict, TmVerdict::Accept);
    assert_eq!(tm_run(&b, "aa", 100, 100).unwrap().verdict, TmVerdict::Reject);
}

#[test]
fn bad_machines() {
    let multi = r#"{"states":["a","b"],"sigma":["x"],"blank":"_","delta":[],"q0":"a","qacc":"a","qrej":"b","tapes":2}"#;
    assert_eq!(TuringMachine::from_json_str(multi), Err(TmError::MultiTape(2)));
    let twice = r#"{"states":["s","a","r"],"sigma":["x"],"blank":"_","delta":[
        {"q":"s","read":"x","write":"x","move":"R","q'":"a"},
        {"q":"s","read":"x","write":"x","move":"L","q'":"r"}],"q0":"s","qacc":"a","qrej":"r"}"#;
    assert!(matches!(TuringMachine::from_json_str(twice), Err(TmError::InvalidMachine(_))));
    let m = corpus("even");
    assert_eq!(TuringMachine::from_json_str(&m.to_json().to_string()).unwrap(), m);
}

fn single_test_ca() -> CounterAutomaton {
    CounterAutomaton::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["s".into(), "f".into()],
        0,
        1,
        vec![CaTransition {
            from: 0,
            delta: vec![0; 3],
            zeta: Some(0),
            to: 1,
        }],
    )
    .unwrap()
}

#[test]
fn automaton_semantics() {
    let a = single_test_ca();
    assert_eq!(ca_run(&a, &[0, 4, 1], 10).unwrap().verdict, CaVerdict::Accept);
    assert_eq!(ca_run(&a, &[1, 0, 0], 10).unwrap().verdict, CaVerdict::Reject);
    assert_eq!(ca_run(&a, &[0, 0, 0], 0).unwrap().verdict, CaVerdict::FuelExceeded);
    let json = a.to_json().to_string();
    assert!(json.contains("\"zeta\":1"));
    assert_eq!(CounterAutomaton::from_json_str(&json).unwrap(), a);

    let nondet = CounterAutomaton::new(
        vec!["a".into()],
        vec!["s".into(), "f".into()],
        0,
        1,
        vec![
            CaTransition { from: 0, delta: vec![1], zeta: None, to: 1 },
            CaTransition { from: 0, delta: vec![0], zeta: Some(0), to: 1 },
        ],
    )
    .unwrap();
    assert!(matches!(ca_run(&nondet, &[0], 10), Err(TmError::Nondeterministic { .. })));
    let bad = CounterAutomaton::new(
        vec!["a".into()],
        vec!["s".into(), "f".into()],
        0,
        1,
        vec![CaTransition { from: 0, delta: vec![1], zeta: Some(0), to: 1 }],
    );
    assert!(matches!(bad, Err(TmError::InvalidAutomaton(_))));
}

#[test]
fn compiled_automata_agree_with_machines() {
    for (name, _) in CORPUS {
        let m = corpus(name);
        let a = tm_to_ca(&m);
        assert_eq!(a.dim(), 3);
        for w in m.words_up_to(4) {
            let t = tm_run(&m, &w, 64, 10_000).unwrap();
            let c = ca_run(&a, &initial_vector(&w, &m.codec()).unwrap(), 1_000_000).unwrap();
            let accepted = c.verdict == CaVerdict::Accept;
            assert_eq!(accepted, t.verdict == TmVerdict::Accept, "{name} on {w:?}");
            assert_ne!(c.verdict, CaVerdict::FuelExceeded);
            assert!(c.max_counter <= m.base().pow(t.space as u32), "{name} on {w:?}");
        }
    }
}

#[test]
fn empty_input_starts_at_zero() {
    let m = corpus("even");
    let a = tm_to_ca(&m);
    let run = ca_run(&a, &initial_vector("", &m.codec()).unwrap(), 1000).unwrap();
    assert_eq!(run.trace[0].1, [0, 0, 0]);
    assert_eq!(run.verdict, CaVerdict::Accept);
}

#[test]
fn single_test_vass() {
    let a = single_test_ca();
    let v = ca_to_vass(&a, 2, 1).unwrap();
    assert_eq!(v.vass.dim(), 8);
    for x in 0..=2 {
        let r = v.zero_reach(&[x, 1, 2], &SearchLimits::states(1_000_000)).unwrap();
        assert_eq!(r.is_reachable(), x == 0, "x = {x}");
        assert!(!matches!(r, ReachResult::LimitExceeded(_)));
    }
    let none = ca_to_vass(&a, 2, 0).unwrap();
    assert!(none.zero_reach(&[0, 0, 0], &SearchLimits::unbounded()).unwrap().is_unreachable());
    assert!(matches!(v.initial(&[3, 0, 0]), Err(TmError::AboveBound { .. })));
}

#[test]
fn compiled_vass_short_words() {
    let m = corpus("even");
    let a = tm_to_ca(&m);
    for w in m.words_up_to(2) {
        let t = tm_run(&m, &w, 64, 10_000).unwrap();
        let input = initial_vector(&w, &m.codec()).unwrap();
        let c = ca_run(&a, &input, 1_000_000).unwrap();
        let v = ca_to_vass(&a, m.base().pow(t.space as u32), c.steps).unwrap();
        let r = v.zero_reach(&input, &SearchLimits::states(20_000_000)).unwrap();
        assert!(!matches!(r, ReachResult::LimitExceeded(_)), "{w:?}");
        assert_eq!(r.is_reachable(), t.verdict == TmVerdict::Accept, "{w:?}");
    }
}

#[test]
fn compiled_json_keeps_alphabet() {
    let m = corpus("even");
    let a = tm_to_ca(&m);
    let back = CounterAutomaton::from_json_str(&a.to_json().to_string()).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.codec(), Some(&m.codec()));
}
