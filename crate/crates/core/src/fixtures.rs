//! The IT-baseline example: four modules, each described by the canonical
//! base of its expert's view over the attributes `18`–`22`.

use crate::formats::imp::parse_imp;
use crate::implication::ImplicationSet;
use crate::simulated::SimulatedView;
use crate::universe::AttributeUniverse;

pub const BSI_ATTRIBUTES: [&str; 5] = ["18", "19", "20", "21", "22"];

/// Expert ids with their canonical bases, in expert order.
pub const BSI_BASES: [(&str, &str); 4] = [
    ("APP.1.1", include_str!("../../../fixtures/bsi/APP.1.1.imp")),
    ("CON.1", include_str!("../../../fixtures/bsi/CON.1.imp")),
    ("ORP.1", include_str!("../../../fixtures/bsi/ORP.1.imp")),
    ("SYS.1.1", include_str!("../../../fixtures/bsi/SYS.1.1.imp")),
];

/// Base of the implications shared by all four experts.
pub const BSI_SHARED: &str = include_str!("../../../fixtures/bsi/shared.imp");

pub fn bsi_universe() -> AttributeUniverse {
    AttributeUniverse::new(BSI_ATTRIBUTES).expect("distinct names")
}

pub fn bsi_bases(universe: &AttributeUniverse) -> Vec<(String, ImplicationSet)> {
    BSI_BASES
        .iter()
        .map(|(id, text)| (id.to_string(), parse_imp(text, universe).expect("fixture parses")))
        .collect()
}

/// Theory-only complete views of the four experts.
pub fn bsi_views(universe: &AttributeUniverse) -> Vec<(String, SimulatedView)> {
    bsi_bases(universe)
        .into_iter()
        .map(|(id, base)| (id, SimulatedView::from_theory(base)))
        .collect()
}
