use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{consistency, Result};

/// A partition of a finite universe into orbits of a set of generators.
///
/// `universe` is sorted, so orbit `k` is the orbit whose minimal element is
/// the `k`-th smallest representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition<T> {
    pub universe: Vec<T>,
    pub orbit_id: Vec<usize>,
    pub representatives: Vec<T>,
    pub generator_count: usize,
}

impl<T: Ord> OrbitPartition<T> {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn orbit_of(&self, x: &T) -> Option<usize> {
        self.universe
            .binary_search(x)
            .ok()
            .map(|i| self.orbit_id[i])
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count()];
        for &o in &self.orbit_id {
            sizes[o] += 1;
        }
        sizes
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as root so roots are orbit minima.
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// Orbits of the group generated by `generators` acting on `universe`.
/// Every generator must map the universe into itself.
pub fn orbit_count<T: Ord + Hash + Clone>(
    universe: impl IntoIterator<Item = T>,
    generators: &[&dyn Fn(&T) -> T],
) -> Result<OrbitPartition<T>> {
    let mut universe: Vec<T> = universe.into_iter().collect();
    universe.sort();
    universe.dedup();
    let index: HashMap<&T, usize> = universe.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let mut uf = UnionFind {
        parent: (0..universe.len()).collect(),
    };
    for (i, x) in universe.iter().enumerate() {
        for g in generators {
            let y = g(x);
            let j = *index
                .get(&y)
                .ok_or_else(|| consistency("generator maps an element outside the universe"))?;
            uf.union(i, j);
        }
    }
    let mut orbit_of_root: HashMap<usize, usize> = HashMap::new();
    let mut representatives = Vec::new();
    let mut orbit_id = Vec::with_capacity(universe.len());
    for i in 0..universe.len() {
        let r = uf.find(i);
        let next = orbit_of_root.len();
        let id = *orbit_of_root.entry(r).or_insert_with(|| {
            representatives.push(universe[r].clone());
            next
        });
        orbit_id.push(id);
    }
    Ok(OrbitPartition {
        universe,
        orbit_id,
        representatives,
        generator_count: generators.len(),
    })
}
