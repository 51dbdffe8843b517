//! Disables one bulk data qubit and shows the superchecks that replace the
//! damaged checks around it.
//!
//! ```text
//! cargo run --example superchecks
//! ```

use std::collections::BTreeSet;

use fabsim::effective_code::{build_effective_code, effective_distance, LogicalKind};
use fabsim::geometry::{CheckKind, CodeLayout, Coord, SiteKind};

fn main() -> fabsim::Result<()> {
    let layout = CodeLayout::new(5)?;
    let broken = Coord { r: 4, c: 4 };
    let code = build_effective_code(&layout, &BTreeSet::from([broken]))?;

    // `#` disabled qubit, `o` data qubit, `S`/`P` checks inside a supercheck.
    let merged: BTreeSet<Coord> = [CheckKind::Star, CheckKind::Plaquette]
        .iter()
        .flat_map(|&k| code.sector(k).groups().iter().filter(|g| g.is_supercheck()))
        .flat_map(|g| g.members.iter().map(|&c| layout.check(c).site))
        .collect();
    for r in 0..layout.size() {
        let row: String = (0..layout.size())
            .map(|c| {
                let site = Coord { r, c };
                match layout.site_kind(site) {
                    _ if code.disabled().contains(&site) => '#',
                    SiteKind::Data => 'o',
                    SiteKind::Star if merged.contains(&site) => 'S',
                    SiteKind::Plaquette if merged.contains(&site) => 'P',
                    _ => '.',
                }
            })
            .collect();
        println!("{row}");
    }

    for kind in [CheckKind::Star, CheckKind::Plaquette] {
        for g in code.sector(kind).groups().iter().filter(|g| g.is_supercheck()) {
            let sites: Vec<String> = g.members.iter().map(|&c| layout.check(c).site.to_string()).collect();
            println!("{kind:?} supercheck over {} has weight {}", sites.join(" "), g.weight());
        }
    }
    println!("largest supercheck weight {}", code.max_supercheck_weight());
    println!(
        "effective distances: Z {:?}, X {:?}",
        effective_distance(&code, LogicalKind::Z),
        effective_distance(&code, LogicalKind::X)
    );
    Ok(())
}
