use std::collections::HashMap;

use crate::error::Result;
use crate::geometry::{Point, PointId};
use crate::grid::{GridIndex, Relation};
use crate::knn::get_knn;
use crate::operators::{knn_join, PairSet, TripletSet};
use crate::query::{ChainedQuery, PlanOutput, PlanStats};

/// Memoized `k_bc`-neighborhoods in `C` of points of `B`, keyed by id.
#[derive(Clone, Debug, Default)]
pub struct NeighborhoodCache {
    entries: HashMap<PointId, Vec<PointId>>,
    hits: u64,
    misses: u64,
}

impl NeighborhoodCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Neighbor ids of `b`, computing them on first request.
    pub fn get_or_compute(&mut self, c_rel: &Relation<'_>, b: &Point, k: usize) -> &[PointId] {
        use std::collections::hash_map::Entry;
        match self.entries.entry(b.id) {
            Entry::Occupied(e) => {
                self.hits += 1;
                e.into_mut()
            }
            Entry::Vacant(e) => {
                self.misses += 1;
                e.insert(get_knn(c_rel, b.coord(), k).ids().collect())
            }
        }
    }

    pub fn get(&self, b: PointId) -> Option<&[PointId]> {
        self.entries.get(&b).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PointId, &[PointId])> {
        self.entries.iter().map(|(&b, cs)| (b, cs.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    /// Number of neighborhoods computed.
    pub fn misses(&self) -> u64 {
        self.misses
    }
}

/// Chained matcher: `(a, b)` from the first join with `(b, c)` from the
/// second, where `b` is the first join's inner key and the second's outer key.
pub fn match_chain_on_b(ab: &PairSet, bc: &PairSet) -> TripletSet {
    let mut by_b: HashMap<PointId, Vec<PointId>> = HashMap::new();
    for &(b, c) in bc.iter() {
        by_b.entry(b).or_default().push(c);
    }
    let mut out = Vec::new();
    for &(a, b) in ab.iter() {
        if let Some(cs) = by_b.get(&b) {
            out.extend(cs.iter().map(|&c| (a, b, c)));
        }
    }
    TripletSet::from_triplets(out)
}

/// Right-deep plan: `(B join C)` materialized for every `b`, then probed for
/// every neighbor of every `a`.
pub fn chained_right_deep(index: &GridIndex, q: &ChainedQuery) -> Result<PlanOutput<TripletSet>> {
    q.validate()?;
    let a_rel = index.relation(&q.a)?;
    let b_rel = index.relation(&q.b)?;
    let c_rel = index.relation(&q.c)?;
    let mut stats = PlanStats::default();

    let mut bc: HashMap<PointId, Vec<PointId>> = HashMap::with_capacity(b_rel.len());
    for b in b_rel.points() {
        stats.chain_neighborhoods += 1;
        bc.insert(b.id, get_knn(&c_rel, b.coord(), q.k_bc).ids().collect());
    }
    let mut out = Vec::new();
    for a in a_rel.points() {
        stats.neighborhoods += 1;
        for b in get_knn(&b_rel, a.coord(), q.k_ab).ids() {
            out.extend(bc[&b].iter().map(|&c| (a.id, b, c)));
        }
    }
    Ok(PlanOutput::new(TripletSet::from_triplets(out), stats))
}

/// Both joins evaluated in full, matched on `b`.
pub fn chained_join_intersection(index: &GridIndex, q: &ChainedQuery) -> Result<PlanOutput<TripletSet>> {
    q.validate()?;
    let ab = knn_join(index, &q.a, &q.b, q.k_ab)?;
    let bc = knn_join(index, &q.b, &q.c, q.k_bc)?;
    let stats = PlanStats {
        neighborhoods: index.relation(&q.a)?.len() as u64,
        chain_neighborhoods: index.relation(&q.b)?.len() as u64,
        ..PlanStats::default()
    };
    Ok(PlanOutput::new(match_chain_on_b(&ab, &bc), stats))
}

/// Nested plan: the neighborhood of `b` in `C` is computed only when `b`
/// is a neighbor of some `a`; with `caching`, at most once per distinct `b`.
pub fn chained_nested_join(
    index: &GridIndex,
    q: &ChainedQuery,
    caching: bool,
) -> Result<PlanOutput<TripletSet>> {
    q.validate()?;
    let a_rel = index.relation(&q.a)?;
    let b_rel = index.relation(&q.b)?;
    let c_rel = index.relation(&q.c)?;
    let mut stats = PlanStats::default();
    let mut cache = NeighborhoodCache::new();
    let mut out = Vec::new();
    for a in a_rel.points() {
        stats.neighborhoods += 1;
        for n in get_knn(&b_rel, a.coord(), q.k_ab).members {
            let b = n.point;
            if caching {
                let cs = cache.get_or_compute(&c_rel, &b, q.k_bc);
                out.extend(cs.iter().map(|&c| (a.id, b.id, c)));
            } else {
                stats.chain_neighborhoods += 1;
                out.extend(get_knn(&c_rel, b.coord(), q.k_bc).ids().map(|c| (a.id, b.id, c)));
            }
        }
    }
    if caching {
        stats.chain_neighborhoods = cache.misses();
        stats.cache_hits = cache.hits();
    }
    Ok(PlanOutput::new(TripletSet::from_triplets(out), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RelationId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(k_ab: usize, k_bc: usize) -> ChainedQuery {
        ChainedQuery {
            a: "A".into(),
            b: "B".into(),
            c: "C".into(),
            k_ab,
            k_bc,
        }
    }

    fn random_index(seed: u64, na: usize, nb: usize, nc: usize) -> GridIndex {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pts = |n: usize| -> Vec<Point> {
            (0..n as u64)
                .map(|i| Point::new(i, rng.random_range(0.0..10.0), rng.random_range(0.0..10.0)))
                .collect()
        };
        let rels = vec![
            (RelationId::from("A"), pts(na)),
            (RelationId::from("B"), pts(nb)),
            (RelationId::from("C"), pts(nc)),
        ];
        GridIndex::build_fitted(rels, Some(5)).unwrap()
    }

    #[test]
    fn plans_agree() {
        for seed in 0..10 {
            let idx = random_index(seed, 120, 80, 150);
            let query = q(1 + seed as usize % 4, 1 + seed as usize % 3);
            let expected = chained_join_intersection(&idx, &query).unwrap().result;
            assert_eq!(chained_right_deep(&idx, &query).unwrap().result, expected);
            assert_eq!(chained_nested_join(&idx, &query, true).unwrap().result, expected);
            assert_eq!(chained_nested_join(&idx, &query, false).unwrap().result, expected);
        }
    }

    #[test]
    fn empty_a_gives_empty_result() {
        let idx = random_index(1, 0, 20, 20);
        assert!(chained_right_deep(&idx, &q(2, 2)).unwrap().result.is_empty());
        assert!(chained_nested_join(&idx, &q(2, 2), true).unwrap().result.is_empty());
    }

    #[test]
    fn cache_computes_each_b_once_and_matches_fresh_knn() {
        let idx = random_index(4, 400, 30, 60);
        let query = q(3, 4);
        let cached = chained_nested_join(&idx, &query, true).unwrap();
        let uncached = chained_nested_join(&idx, &query, false).unwrap();
        assert_eq!(cached.result, uncached.result);
        assert_eq!(uncached.stats.chain_neighborhoods, 400 * 3);
        assert!(cached.stats.chain_neighborhoods <= 30);
        assert_eq!(cached.stats.chain_neighborhoods + cached.stats.cache_hits, 400 * 3);

        let b_rel = idx.relation(&"B".into()).unwrap();
        let c_rel = idx.relation(&"C".into()).unwrap();
        let mut cache = NeighborhoodCache::new();
        for b in b_rel.points() {
            cache.get_or_compute(&c_rel, b, 4);
        }
        for (b, cs) in cache.iter() {
            let p = b_rel.points().iter().find(|p| p.id == b).unwrap();
            let fresh: Vec<_> = get_knn(&c_rel, p.coord(), 4).ids().collect();
            assert_eq!(cs, fresh.as_slice());
        }
    }
}
