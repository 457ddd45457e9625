//! Potential DSL: golden cases, a differential test against a second evaluator
//! that works directly on the text, and print/reparse round trips.

mod common;

use common::dsl::{check_golden, differential, expression};
use graphnls::potential::parse;
use proptest::prelude::*;

#[test]
fn golden_suite() {
    let cases = check_golden().unwrap();
    assert!(cases >= 50);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn agrees_with_direct_evaluation(src in expression(), x in -3.0f64..3.0) {
        differential(&src, x)?;
    }

    #[test]
    fn printing_round_trips(src in expression(), xs in prop::collection::vec(-3.0f64..3.0, 100)) {
        let expr = parse(&src).unwrap();
        let again = parse(&expr.to_string()).unwrap();
        prop_assert_eq!(&again, &expr);
        for x in xs {
            match (expr.evaluate(x), again.evaluate(x)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0)),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{src:?} at {x}: {a:?} vs {b:?}"),
            }
        }
    }

    #[test]
    fn whitespace_is_insignificant(src in expression(), x in -3.0f64..3.0) {
        let spaced: String = src.chars().flat_map(|c| match c {
            '+' | '*' | '/' | '^' | '(' | ')' => vec![' ', c, '\t'],
            _ => vec![c],
        }).collect();
        let (a, b) = (parse(&src).unwrap(), parse(&spaced).unwrap());
        prop_assert_eq!(a.evaluate(x).ok(), b.evaluate(x).ok());
    }
}
