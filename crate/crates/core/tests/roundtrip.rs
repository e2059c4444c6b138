//! Pretty-print then re-parse.

use norman::builtin::{builtin_rulebase, RULEBASE_TEXT, SCENARIOS};
use norman::kb::{render_rulebase, render_scenario};
use norman::{parse_rulebase, parse_scenario};

#[test]
fn rulebase_round_trips() {
    let rb = builtin_rulebase();
    let printed = render_rulebase(&rb);
    let back = parse_rulebase(&printed).unwrap_or_else(|e| panic!("{e}\n{printed}"));
    assert_eq!(back, rb);
    // printing is a fixpoint after one pass
    assert_eq!(render_rulebase(&back), printed);
    assert_ne!(printed, RULEBASE_TEXT, "the printer normalises comments away");
}

#[test]
fn scenarios_round_trip() {
    for (name, text) in SCENARIOS {
        let s = parse_scenario(text).unwrap();
        let printed = render_scenario(&s);
        let back = parse_scenario(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(back, s, "{name}");
        assert_eq!(render_scenario(&back), printed, "{name}");
    }
}
