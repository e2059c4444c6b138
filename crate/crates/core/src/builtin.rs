//! The shipped car-crash norm rule base, its catalogue and sample scenarios.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::kb::{parse_rulebase, parse_scenario, RuleBase, Scenario};

pub const RULEBASE_TEXT: &str = include_str!("../kb/crash_norms.nrk");
pub const CATALOGUE_TEXT: &str = include_str!("../kb/crash_norms.catalogue.toml");

/// `(name, file contents)` of every shipped scenario.
pub const SCENARIOS: [(&str, &str); 5] = [
    ("b21", include_str!("../scenarios/b21.scn")),
    ("b21_no_control", include_str!("../scenarios/b21_no_control.scn")),
    ("bend", include_str!("../scenarios/bend.scn")),
    ("perturb", include_str!("../scenarios/perturb.scn")),
    ("calm", include_str!("../scenarios/calm.scn")),
];

pub fn builtin_rulebase() -> RuleBase {
    parse_rulebase(RULEBASE_TEXT).expect("shipped rule base is valid")
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    SCENARIOS
        .iter()
        .map(|(name, text)| parse_scenario(text).unwrap_or_else(|e| panic!("shipped scenario {name}: {e}")))
        .collect()
}

pub fn builtin_scenario(name: &str) -> Option<Scenario> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, text)| parse_scenario(text).expect("shipped scenario is valid"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    /// Part of the published rule set.
    Source,
    /// Added to connect notions the source declares but never connects.
    Bridge,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct CatalogueEntry {
    pub kind: EntryKind,
    pub location: String,
    pub gloss: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct CatalogueGap {
    pub norm: String,
    pub location: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct KbCatalogue {
    pub rules: BTreeMap<String, CatalogueEntry>,
    #[serde(default)]
    pub gaps: Vec<CatalogueGap>,
}

impl KbCatalogue {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn get(&self, id: &str) -> Option<&CatalogueEntry> {
        self.rules.get(id)
    }
}

pub fn catalogue() -> KbCatalogue {
    KbCatalogue::parse(CATALOGUE_TEXT).expect("shipped catalogue is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::persistence_schemas;
    use crate::kb::validate_crossrefs;

    #[test]
    fn every_rule_has_a_catalogue_entry() {
        let rb = builtin_rulebase();
        let cat = catalogue();
        let persist = persistence_schemas(&rb);
        for id in rb.rule_ids().chain(persist.iter().map(|d| &d.id)) {
            let entry = cat.get(id.as_str()).unwrap_or_else(|| panic!("no catalogue entry for {id}"));
            assert!(!entry.location.is_empty() && !entry.gloss.is_empty(), "{id}");
        }
        assert_eq!(cat.get("RB1").unwrap().kind, EntryKind::Bridge);
        assert_eq!(cat.gaps.len(), 2);
    }

    #[test]
    fn follower_default_entry() {
        let d2 = catalogue().get("D2").cloned().unwrap();
        assert_eq!(d2.kind, EntryKind::Source);
        assert_eq!(d2.location, "rear-end example");
        assert!(d2.gloss.contains("lost control"));
    }

    #[test]
    fn scenarios_load_and_match_the_rule_base() {
        let rb = builtin_rulebase();
        let all = builtin_scenarios();
        assert_eq!(all.len(), SCENARIOS.len());
        for s in &all {
            assert!(validate_crossrefs(&rb, s).is_empty(), "{}", s.label);
        }
        let b21 = builtin_scenario("b21").unwrap();
        assert_eq!(b21.facts.len(), 3);
        assert_eq!(b21.max_state, 2);
        assert!(builtin_scenario("nope").is_none());
    }
}
