//! Derived families `F°`, `F⁺`, `F⁻` and `F*` of an anchored pair.

use std::collections::HashSet;

use super::{bit, mask_iter, AnchoredPair, StructureError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// One edge turned into an open edge.
    Open,
    /// Endpoints of an edge absorbed into the anchor.
    Plus,
    /// Destruction variants, cases (a) to (f).
    Minus,
    /// Members of the minus family with fewer non-anchor vertices.
    Star,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "open" => Ok(Family::Open),
            "plus" => Ok(Family::Plus),
            "minus" => Ok(Family::Minus),
            "star" => Ok(Family::Star),
            _ => Err(format!("unknown family {s:?} (open, plus, minus, star)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub pair: AnchoredPair,
    /// Case letter for the minus/star families.
    pub case: Option<char>,
    /// What was changed, in vertex names.
    pub marker: String,
}

fn fresh_name(pair: &AnchoredPair) -> String {
    let names = pair.structure().names();
    (0..)
        .map(|i| if i == 0 { "new".to_string() } else { format!("new{i}") })
        .find(|c| !names.contains(c))
        .expect("some name is free")
}

pub fn derived_families(pair: &AnchoredPair, which: Family) -> Result<Vec<FamilyMember>, StructureError> {
    Ok(match which {
        Family::Open => open_family(pair),
        Family::Plus => plus_family(pair),
        Family::Minus => minus_family(pair)?,
        Family::Star => minus_family(pair)?
            .into_iter()
            .filter(|m| m.pair.v_a() < pair.v_a())
            .collect(),
    })
}

fn open_family(pair: &AnchoredPair) -> Vec<FamilyMember> {
    let s = pair.structure();
    s.edges()
        .into_iter()
        .map(|(a, b)| {
            let mut f = s.clone();
            f.edge_to_open(a, b);
            FamilyMember {
                pair: AnchoredPair::new(f, pair.anchor_mask()),
                case: None,
                marker: format!("{}-{} made open", s.names()[a], s.names()[b]),
            }
        })
        .collect()
}

fn plus_family(pair: &AnchoredPair) -> Vec<FamilyMember> {
    let s = pair.structure();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (a, b) in s.edges() {
        let anchor = pair.anchor_mask() | bit(a) | bit(b);
        if seen.insert(anchor) {
            out.push(FamilyMember {
                pair: AnchoredPair::new(s.clone(), anchor),
                case: None,
                marker: format!("absorbed {}-{}", s.names()[a], s.names()[b]),
            });
        }
    }
    out
}

fn minus_family(pair: &AnchoredPair) -> Result<Vec<FamilyMember>, StructureError> {
    let s = pair.structure();
    let names = s.names();
    let a_mask = pair.anchor_mask();
    let outside: Vec<usize> = mask_iter(pair.full_mask() & !a_mask).collect();
    let anchors: Vec<usize> = mask_iter(a_mask).collect();
    let mut out = Vec::new();
    let mut push = |p: AnchoredPair, case: char, marker: String| {
        out.push(FamilyMember {
            pair: p,
            case: Some(case),
            marker,
        })
    };

    // (a) an extra edge a-v, where v already has an open neighbour in A
    for &a in &anchors {
        for &v in &outside {
            if s.is_edge(a, v) || s.is_open(a, v) || s.o_row(v) & a_mask == 0 {
                continue;
            }
            let mut f = s.clone();
            f.force_edge(a, v);
            push(AnchoredPair::new(f, a_mask), 'a', format!("edge {}-{}", names[a], names[v]));
        }
    }
    // (b) one vertex of V \ A joins the anchor
    for &v in &outside {
        push(
            AnchoredPair::new(s.clone(), a_mask | bit(v)),
            'b',
            format!("anchor {}", names[v]),
        );
    }
    // (c) a new anchor vertex joined by an edge to V \ A
    let new_name = fresh_name(pair);
    for &w in &outside {
        let mut f = s.clone();
        let x = f.add_vertex(new_name.clone())?;
        f.force_edge(x, w);
        push(
            AnchoredPair::new(f, a_mask | bit(x)),
            'c',
            format!("new anchor {new_name} with edge {new_name}-{}", names[w]),
        );
    }
    // (d) two vertices of V \ A join the anchor
    for (i, &u) in outside.iter().enumerate() {
        for &v in &outside[i + 1..] {
            push(
                AnchoredPair::new(s.clone(), a_mask | bit(u) | bit(v)),
                'd',
                format!("anchor {} {}", names[u], names[v]),
            );
        }
    }
    // (e) one old vertex and one new isolated vertex join the anchor
    // (f) as (e), plus an edge from the new vertex to V \ A⁻
    for &u in &outside {
        let mut f = s.clone();
        let x = f.add_vertex(new_name.clone())?;
        let anchor = a_mask | bit(u) | bit(x);
        push(
            AnchoredPair::new(f.clone(), anchor),
            'e',
            format!("anchor {} and new {new_name}", names[u]),
        );
        for &w in outside.iter().filter(|&&w| w != u) {
            let mut g = f.clone();
            g.force_edge(x, w);
            push(
                AnchoredPair::new(g, anchor),
                'f',
                format!("anchor {} and new {new_name} with edge {new_name}-{}", names[u], names[w]),
            );
        }
    }
    Ok(out)
}
