use std::collections::VecDeque;

use super::set::DiscreteSet;

/// Components under 8-connectivity: two sites touch when their closed unit squares
/// intersect, i.e. at Chebyshev distance 1. Components are ordered by their smallest site.
pub fn connected_components(set: &DiscreteSet) -> Vec<DiscreteSet> {
    let Some(bbox) = set.bbox() else {
        return Vec::new();
    };
    let mut seen = vec![false; bbox.area()];
    let mut components = Vec::new();
    for start in set.iter() {
        if seen[bbox.index(start)] {
            continue;
        }
        seen[bbox.index(start)] = true;
        let mut members = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            for d1 in -1..=1 {
                for d2 in -1..=1 {
                    let q = p.translate(d1, d2);
                    if set.contains(q) && !seen[bbox.index(q)] {
                        seen[bbox.index(q)] = true;
                        members.push(q);
                        queue.push_back(q);
                    }
                }
            }
        }
        components.push(DiscreteSet::from_sites(members));
    }
    components
}

/// The empty set counts as connected.
pub fn is_connected(set: &DiscreteSet) -> bool {
    connected_components(set).len() <= 1
}
