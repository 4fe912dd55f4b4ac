//! Plain-text rendering of dynamics and reports.

use std::fmt::Write;

use subcat::dynamics::{Dynamics, PropertyReport};
use subcat::open::OpenDynamics;

pub fn set(names: &[&str]) -> String {
    format!("{{{}}}", names.join(","))
}

/// One line `f(x) = {..}` per arrow and state with a non-empty image.
pub fn transitions(d: &Dynamics, indent: &str) -> String {
    let motor = d.motor();
    let mut out = String::new();
    for f in 0..motor.num_arrows() {
        let t = d.transition(f);
        for x in 0..t.source().len() {
            let image: Vec<&str> = t.image(x).iter().map(|&y| t.target().name(y)).collect();
            if !image.is_empty() {
                let _ = writeln!(
                    out,
                    "{indent}{}({}) = {}",
                    motor.arrow_name(f),
                    t.source().name(x),
                    set(&image)
                );
            }
        }
    }
    out
}

pub fn states(d: &Dynamics, indent: &str) -> String {
    let motor = d.motor();
    let mut out = String::new();
    for o in 0..motor.num_objects() {
        let names: Vec<&str> = d.states(o).names().iter().map(String::as_str).collect();
        let _ = writeln!(out, "{indent}{}: {}", motor.object_name(o), set(&names));
    }
    out
}

/// Slices in parameter order, then the datation.
pub fn open(a: &OpenDynamics) -> String {
    let mut out = String::from("states:\n");
    out.push_str(&states(a.states(), "  "));
    for (p, name) in a.parameters().iter().enumerate() {
        let _ = writeln!(out, "parameter {name}:");
        out.push_str(&transitions(a.slice(p), "  "));
    }
    out.push_str("datation:\n");
    let st = a.states();
    for s in 0..st.state_count() {
        let _ = writeln!(
            out,
            "  {} ↦ {}",
            st.state_name(s),
            a.clock().instant_name(a.datation(s))
        );
    }
    out
}

/// The five checkers; `proper` is `None` when it is undefined.
pub struct Properties {
    pub subcategorical: PropertyReport,
    pub proper: Option<PropertyReport>,
    pub categorical: PropertyReport,
    pub deterministic: PropertyReport,
    pub quasi_deterministic: PropertyReport,
}

impl Properties {
    pub fn all_hold(&self) -> bool {
        self.subcategorical.holds
            && self.proper.as_ref().is_some_and(|p| p.holds)
            && self.categorical.holds
            && self.deterministic.holds
            && self.quasi_deterministic.holds
    }

    pub fn text(&self) -> String {
        let mut out = format!("{}\n", self.subcategorical);
        match &self.proper {
            Some(p) => {
                let _ = writeln!(out, "{p}");
            }
            None => out.push_str("proper: n/a (not sub-categorical)\n"),
        }
        for r in [
            &self.categorical,
            &self.deterministic,
            &self.quasi_deterministic,
        ] {
            let _ = writeln!(out, "{r}");
        }
        out
    }

    pub fn json(&self) -> serde_json::Value {
        let proper = match &self.proper {
            Some(p) => serde_json::to_value(p).expect("serializable"),
            None => {
                serde_json::json!({ "property": "proper", "holds": null, "violations": [], "omitted": 0 })
            }
        };
        serde_json::json!([
            self.subcategorical,
            proper,
            self.categorical,
            self.deterministic,
            self.quasi_deterministic,
        ])
    }
}
