//! Independent restatement of the decision rules, written from the verbal
//! description of each logic rather than from the library's tables.

#![allow(dead_code)]

use polariscope_core::DecisionLogic;

pub fn f(x: f64, h: f64, a: f64) -> f64 {
    (1.0 + a * x) / (1.0 + (-h * x).exp())
}

/// Probability that a chooser with `(p_g, p_p)` pursues a partner.
pub fn pursue(logic: DecisionLogic, p_g: f64, p_p: f64, same_group: bool, same_party: bool) -> f64 {
    let lean = |p: f64, same: bool| if same { p } else { 1.0 - p };
    match logic {
        DecisionLogic::GroupOnly => lean(p_g, same_group),
        DecisionLogic::PartyOnly => lean(p_g, same_party),
        DecisionLogic::GroupOrParty | DecisionLogic::GroupAndParty => {
            1.0 - (1.0 - lean(p_g, same_group)) * (1.0 - lean(p_g, same_party))
        }
        DecisionLogic::TwoDimOr => 1.0 - (1.0 - lean(p_g, same_group)) * (1.0 - lean(p_p, same_party)),
    }
}

/// Probability that a responder with `(p_g, p_p)` accepts.
pub fn consent(logic: DecisionLogic, p_g: f64, p_p: f64, same_group: bool, same_party: bool) -> f64 {
    let mut refusers = Vec::new();
    let (pg, pp) = match logic {
        DecisionLogic::TwoDimOr => (p_g, p_p),
        _ => (p_g, p_g),
    };
    let attends_group = !matches!(logic, DecisionLogic::PartyOnly);
    let attends_party = !matches!(logic, DecisionLogic::GroupOnly);
    if attends_group && !same_group {
        refusers.push(pg);
    }
    if attends_party && !same_party {
        refusers.push(pp);
    }
    match logic {
        DecisionLogic::GroupAndParty => refusers.iter().map(|p| 1.0 - p).product(),
        _ if refusers.is_empty() => 1.0,
        _ => 1.0 - refusers.iter().product::<f64>(),
    }
}
