//! Greedy triangle packing for binary-symmetric instances.

use serde::Serialize;

use crate::error::Result;
use crate::model::{AgentId, Instance, Matching, Mode, Triple};

/// Lexicographically least triangle among agents allowed by `active`.
pub fn find_triangle(inst: &Instance, active: Option<&[bool]>) -> Result<Option<Triple>> {
    inst.require_mode(Mode::BinarySymmetric)?;
    let on = |a: AgentId| active.is_none_or(|m| m[a]);
    for x in 0..inst.n() {
        if !on(x) {
            continue;
        }
        if let Some((y, z)) = least_triangle_at(inst, x, &on) {
            return Ok(Some(Triple::new(x, y, z)?));
        }
    }
    Ok(None)
}

/// Least `(y, z)` with `x < y < z` such that `{x, y, z}` is a triangle.
fn least_triangle_at(
    inst: &Instance,
    x: AgentId,
    on: &impl Fn(AgentId) -> bool,
) -> Option<(AgentId, AgentId)> {
    let nx = inst.neighbors(x);
    for &y in nx.iter().filter(|&&y| y > x && on(y)) {
        for &z in nx.iter().filter(|&&z| z > y && on(z)) {
            if inst.val(y, z) != 0 {
                return Some((y, z));
            }
        }
    }
    None
}

/// Agents left after triangle elimination.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Residual {
    pub active: Vec<bool>,
}

impl Residual {
    pub fn agents(&self) -> Vec<AgentId> {
        (0..self.active.len()).filter(|&a| self.active[a]).collect()
    }

    pub fn len(&self) -> usize {
        self.active.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Induced sub-instance; agent `agents()[k]` becomes agent `k`.
    pub fn to_instance(&self, inst: &Instance) -> Result<Instance> {
        inst.induced(&self.agents())
    }
}

/// Removes triangles one at a time until the remaining graph is triangle-free.
///
/// Agents are scanned once in ascending order; each agent `x` still present
/// removes the least triangle `{x, y, z}` with `x < y < z`. A single pass
/// suffices because removing agents never creates a triangle.
pub fn eliminate_triangles(inst: &Instance) -> Result<(Residual, Matching)> {
    inst.require_mode(Mode::BinarySymmetric)?;
    let n = inst.n();
    let mut active = vec![true; n];
    let mut packing = Vec::new();
    for x in 0..n {
        if !active[x] {
            continue;
        }
        let on = |a: AgentId| active[a];
        if let Some((y, z)) = least_triangle_at(inst, x, &on) {
            active[x] = false;
            active[y] = false;
            active[z] = false;
            packing.push(Triple::new(x, y, z)?);
        }
    }
    Ok((Residual { active }, Matching::new(n, packing)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::Error;

    #[test]
    fn triangle_examples() {
        assert_eq!(
            find_triangle(&fixtures::t3(), None).unwrap(),
            Some(Triple::new(0, 1, 2).unwrap())
        );
        assert_eq!(find_triangle(&fixtures::p3(), None).unwrap(), None);
        assert_eq!(find_triangle(&fixtures::cycle(5), None).unwrap(), None);
        assert_eq!(
            find_triangle(&fixtures::fig9(), None).unwrap(),
            Some(Triple::new(2, 4, 5).unwrap())
        );
        let b = fixtures::bridged_triangles();
        let mask = [false, true, true, true, true, true];
        assert_eq!(
            find_triangle(&b, Some(&mask)).unwrap(),
            Some(Triple::new(3, 4, 5).unwrap())
        );
        assert!(matches!(
            find_triangle(&fixtures::directed_3_cycle(), None),
            Err(Error::WrongMode { .. })
        ));
    }

    #[test]
    fn elimination_examples() {
        let (res, packing) = eliminate_triangles(&fixtures::bridged_triangles()).unwrap();
        assert_eq!(packing.to_arrays(), vec![[0, 1, 2], [3, 4, 5]]);
        assert!(res.is_empty());

        let (res, packing) = eliminate_triangles(&fixtures::complete(4)).unwrap();
        assert_eq!(packing.to_arrays(), vec![[0, 1, 2]]);
        assert_eq!(res.agents(), vec![3]);

        let (res, packing) = eliminate_triangles(&fixtures::fig9()).unwrap();
        assert_eq!(packing.to_arrays(), vec![[2, 4, 5]]);
        let rest = res.to_instance(&fixtures::fig9()).unwrap();
        assert_eq!(rest.n(), 6);
        assert_eq!(find_triangle(&rest, None).unwrap(), None);
    }
}
