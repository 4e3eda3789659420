use serde::{Deserialize, Serialize};

use super::{BicliqueSystem, MultipartiteInstance};
use crate::error::{LabError, Result};
use crate::graph::PartStructure;
use crate::lists::{Color, ListAssignment};

/// A part coloured entirely with one colour and removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    /// Vertex ids in the instance the reduction started from.
    pub part: Vec<usize>,
    pub color: Color,
}

/// Output of [`remove_common_color_parts`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub reduced: MultipartiteInstance,
    /// reduced vertex id -> original vertex id
    pub origin: Vec<usize>,
    pub removals: Vec<Removal>,
    pub original_vertex_count: usize,
}

impl Reduction {
    /// Extends a colouring of the reduced instance to the original one by
    /// colouring each removed part with its recorded colour.
    pub fn extend(&self, reduced_coloring: &[Color]) -> Vec<Color> {
        let mut out = vec![Color::MAX; self.original_vertex_count];
        for (v, &c) in reduced_coloring.iter().enumerate() {
            out[self.origin[v]] = c;
        }
        for r in &self.removals {
            for &v in &r.part {
                out[v] = r.color;
            }
        }
        debug_assert!(out.iter().all(|&c| c != Color::MAX));
        out
    }
}

/// Repeatedly removes the lowest-index part of size at least two whose
/// lists share a colour, using the smallest shared colour and deleting it
/// from every remaining list.
///
/// Afterwards no part of size two or more has a colour common to all of its
/// lists. Any acceptable colouring of the reduced instance extends through
/// [`Reduction::extend`]. Returns `None` for the reduced instance when
/// every part is removed.
pub fn remove_common_color_parts(inst: &MultipartiteInstance) -> (Option<Reduction>, Vec<Removal>) {
    let parts = inst.parts().parts();
    let mut lists: Vec<Vec<Color>> = inst.lists().lists().to_vec();
    let mut alive = vec![true; parts.len()];
    let mut removals = Vec::new();
    'scan: loop {
        for (i, part) in parts.iter().enumerate() {
            if !alive[i] || part.len() < 2 {
                continue;
            }
            let common = part[1..].iter().fold(lists[part[0]].clone(), |acc, &v| {
                acc.into_iter().filter(|c| lists[v].binary_search(c).is_ok()).collect()
            });
            if let Some(&c) = common.first() {
                alive[i] = false;
                removals.push(Removal {
                    part: part.clone(),
                    color: c,
                });
                for (j, other) in parts.iter().enumerate() {
                    if alive[j] {
                        for &v in other {
                            if let Ok(pos) = lists[v].binary_search(&c) {
                                lists[v].remove(pos);
                            }
                        }
                    }
                }
                continue 'scan;
            }
        }
        break;
    }
    if alive.iter().all(|&a| !a) {
        return (None, removals);
    }
    let mut origin: Vec<usize> = parts
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .flat_map(|(p, _)| p.iter().copied())
        .collect();
    origin.sort_unstable();
    let mut new_id = vec![usize::MAX; inst.vertex_count()];
    for (i, &v) in origin.iter().enumerate() {
        new_id[v] = i;
    }
    let new_parts: Vec<Vec<usize>> = parts
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(p, _)| p.iter().map(|&v| new_id[v]).collect())
        .collect();
    let new_lists: Vec<Vec<Color>> = origin.iter().map(|&v| lists[v].clone()).collect();
    let reduced = MultipartiteInstance::from_parts_unchecked(
        PartStructure::new(origin.len(), new_parts).expect("surviving parts partition the survivors"),
        ListAssignment::from_sorted(new_lists),
    );
    let reduction = Reduction {
        reduced,
        origin,
        removals: removals.clone(),
        original_vertex_count: inst.vertex_count(),
    };
    (Some(reduction), removals)
}

/// The instance left after colouring `W` greedily from colours outside the
/// biclique blocks.
#[derive(Debug, Clone)]
pub struct Residual {
    pub instance: MultipartiteInstance,
    /// residual vertex id -> id in the instance passed to [`choose_w_and_t`]
    pub origin: Vec<usize>,
    /// The system renumbered onto residual vertex ids.
    pub system: BicliqueSystem,
    /// Coloured singleton vertices (ids in the input instance).
    pub w: Vec<usize>,
    /// Colour given to each vertex of `w`, all distinct.
    pub t_colors: Vec<Color>,
}

impl Residual {
    pub fn extend(&self, residual_coloring: &[Color], vertex_count: usize) -> Vec<Color> {
        let mut out = vec![Color::MAX; vertex_count];
        for (v, &c) in residual_coloring.iter().enumerate() {
            out[self.origin[v]] = c;
        }
        for (&v, &c) in self.w.iter().zip(&self.t_colors) {
            out[v] = c;
        }
        out
    }
}

/// Picks `r = χ - km` singleton parts outside the system, colours them with
/// distinct colours not in any colour block, and removes those colours from
/// every other list. The residual has exactly `km` parts.
pub fn choose_w_and_t(inst: &MultipartiteInstance, system: &BicliqueSystem) -> Result<Residual> {
    let chi = inst.part_count();
    let c_total = system.color_count();
    if c_total > chi {
        return Err(LabError::Precondition(vec![format!(
            "colour blocks hold {c_total} colours but there are only {chi} parts"
        )]));
    }
    let r = chi - c_total;
    let blocked: std::collections::HashSet<Color> = system.color_blocks.iter().flatten().copied().collect();
    let in_system: std::collections::HashSet<usize> = system.singleton_blocks.iter().flatten().copied().collect();
    let outside_colors = |v: usize| -> Vec<Color> {
        inst.lists()
            .list(v)
            .iter()
            .copied()
            .filter(|c| !blocked.contains(c))
            .collect()
    };
    let eligible: Vec<usize> = inst
        .parts()
        .singletons()
        .into_iter()
        .filter(|v| !in_system.contains(v) && outside_colors(*v).len() >= r)
        .collect();
    if eligible.len() < r {
        return Err(LabError::Precondition(vec![format!(
            "need {r} singleton parts outside the blocks with at least {r} free colours, found {}",
            eligible.len()
        )]));
    }
    let w: Vec<usize> = eligible[..r].to_vec();
    let mut t_colors = Vec::with_capacity(r);
    for &v in &w {
        let c = outside_colors(v)
            .into_iter()
            .find(|c| !t_colors.contains(c))
            .ok_or_else(|| LabError::Precondition(vec![format!("greedy colouring of W stuck at vertex {v}")]))?;
        t_colors.push(c);
    }
    let mut removed = vec![false; inst.vertex_count()];
    for &v in &w {
        removed[v] = true;
    }
    let origin: Vec<usize> = (0..inst.vertex_count()).filter(|&v| !removed[v]).collect();
    let mut new_id = vec![usize::MAX; inst.vertex_count()];
    for (i, &v) in origin.iter().enumerate() {
        new_id[v] = i;
    }
    let parts: Vec<Vec<usize>> = inst
        .parts()
        .parts()
        .iter()
        .filter(|p| !(p.len() == 1 && removed[p[0]]))
        .map(|p| p.iter().map(|&v| new_id[v]).collect())
        .collect();
    let lists: Vec<Vec<Color>> = origin
        .iter()
        .map(|&v| {
            inst.lists()
                .list(v)
                .iter()
                .copied()
                .filter(|c| !t_colors.contains(c))
                .collect()
        })
        .collect();
    let instance = MultipartiteInstance::from_parts_unchecked(
        PartStructure::new(origin.len(), parts)?,
        ListAssignment::from_sorted(lists),
    );
    let system = BicliqueSystem {
        m: system.m,
        t: system.t,
        color_blocks: system.color_blocks.clone(),
        singleton_blocks: system
            .singleton_blocks
            .iter()
            .map(|b| b.iter().map(|&v| new_id[v]).collect())
            .collect(),
    };
    debug_assert_eq!(instance.part_count(), system.color_count());
    Ok(Residual {
        instance,
        origin,
        system,
        w,
        t_colors,
    })
}
