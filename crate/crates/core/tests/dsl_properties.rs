use mdpforge::dsl::{self, expand, parse, tokenize, DslError};
use mdpforge::generate::{random_spec, RandomMdpConfig};
use mdpforge::{load_spec, Outcome};
use proptest::prelude::*;

fn entries(text: &str) -> Result<Vec<mdpforge::TransitionEntry>, DslError> {
    let tokens = tokenize(text)?;
    expand(&parse(&tokens)?)
}

fn alternatives(prefix: &str, n: usize) -> String {
    let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    format!("({})", names.join(" | "))
}

#[test]
fn distributivity_example_order() {
    let text = "state a b e f\naction c d\n(a | b) & (c | d) > (e | f)\n";
    let got = entries(text).unwrap();
    assert_eq!(got.len(), 8);
    let triples: Vec<(usize, usize, Outcome)> = got.iter().map(|e| (e.state.0, e.action.0, e.outcome)).collect();
    // (a & c > e) | (a & c > f) | (a & d > e) | (a & d > f) | (b & c > e) | ...
    let next = |i| Outcome::NextState(mdpforge::StateId(i));
    assert_eq!(
        triples,
        vec![
            (0, 0, next(2)),
            (0, 0, next(3)),
            (0, 1, next(2)),
            (0, 1, next(3)),
            (1, 0, next(2)),
            (1, 0, next(3)),
            (1, 1, next(2)),
            (1, 1, next(3)),
        ]
    );
}

#[test]
fn parenthesization_is_transparent() {
    let decl = "state a e\naction c\n";
    let plain = entries(&format!("{decl}a & c > e\n")).unwrap();
    let nested = entries(&format!("{decl}((a) & (c)) > ((e))\n")).unwrap();
    assert_eq!(plain, nested);
}

proptest! {
    #[test]
    fn distributivity_counts(n in 1usize..=4, m in 1usize..=4, k in 1usize..=4) {
        let states: Vec<String> = (0..n).map(|i| format!("s{i}")).chain((0..k).map(|i| format!("t{i}"))).collect();
        let actions: Vec<String> = (0..m).map(|i| format!("a{i}")).collect();
        let text = format!(
            "state {}\naction {}\n{} & {} > {}\n",
            states.join(" "),
            actions.join(" "),
            alternatives("s", n),
            alternatives("a", m),
            alternatives("t", k),
        );
        let got = entries(&text).unwrap();
        prop_assert_eq!(got.len(), n * m * k);
        prop_assert!(got.iter().all(|e| e.weight == 1.0));
    }

    #[test]
    fn text_round_trip_matches_builder(seed in any::<u64>()) {
        let spec = random_spec(seed, &RandomMdpConfig::default());
        let text = dsl::to_text(&spec).unwrap();
        prop_assert_eq!(load_spec(&text).unwrap(), spec.validate().unwrap());
    }

    #[test]
    fn errors_point_inside_the_source(text in "[a-z&|>*() \n0-9.#@-]{0,60}") {
        let full = format!("state a b\naction c d\n{text}");
        if let Err(err) = load_spec(&full) {
            let lines: Vec<&str> = full.split('\n').collect();
            prop_assert!(err.pos.line >= 1 && err.pos.line <= lines.len(), "{err} for {full:?}");
            let width = lines[err.pos.line - 1].chars().count();
            prop_assert!(err.pos.col >= 1 && err.pos.col <= width + 1, "{err} for {full:?}");
        }
    }
}

#[test]
fn example_fixtures_parse() {
    for example in &mdpforge::examples::ALL {
        let m = load_spec(example.source).unwrap();
        assert!(m.num_states() >= 2, "{}", example.name);
    }
}
