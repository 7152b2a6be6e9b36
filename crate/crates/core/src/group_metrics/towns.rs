use serde::Serialize;

use crate::dataset::{InstitutionId, InstitutionRecord};
use crate::error::{Error, Result};

/// Mean Earth radius.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;
pub const DEFAULT_TOWN_RADIUS_KM: f64 = 30.0;

/// Great-circle distance between two (latitude, longitude) points in
/// degrees.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let h = ((lat2 - lat1) / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * ((lon2 - lon1) / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Town {
    /// Smallest institution id in the town.
    pub town_id: u64,
    /// Name of that institution.
    pub name: String,
    pub members: Vec<InstitutionId>,
}

/// Partition of institutions into towns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TownClusters {
    /// Town index of each institution, by position in the input slice.
    pub town_of: Vec<u32>,
    /// Towns ordered by `town_id`.
    pub towns: Vec<Town>,
    /// Institutions without usable coordinates; each forms its own town.
    pub without_coordinates: Vec<InstitutionId>,
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.0[x as usize] != x {
            let parent = self.0[x as usize];
            self.0[x as usize] = self.0[parent as usize];
            x = parent;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Single-linkage clustering: two institutions share a town when a chain
/// of institutions at most `radius_km` apart connects them.
pub fn cluster_towns(institutions: &[InstitutionRecord], radius_km: f64) -> Result<TownClusters> {
    if !(radius_km >= 0.0 && radius_km.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "town radius must be a nonnegative distance, got {radius_km}"
        )));
    }
    let n = institutions.len();
    let mut uf = UnionFind((0..n as u32).collect());
    let mut located: Vec<(u32, (f64, f64))> = institutions
        .iter()
        .enumerate()
        .filter_map(|(i, inst)| inst.coordinates().map(|c| (i as u32, c)))
        .collect();
    located.sort_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)));

    // Any pair within the radius differs in latitude by at most this much.
    let max_dlat = (radius_km / EARTH_RADIUS_KM).to_degrees();
    for (k, &(i, a)) in located.iter().enumerate() {
        for &(j, b) in &located[k + 1..] {
            if b.0 - a.0 > max_dlat {
                break;
            }
            if haversine_km(a, b) <= radius_km {
                uf.union(i, j);
            }
        }
    }

    let roots: Vec<u32> = (0..n as u32).map(|i| uf.find(i)).collect();
    let mut members: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, &r) in roots.iter().enumerate() {
        members[r as usize].push(i as u32);
    }
    let mut towns: Vec<(u64, Vec<u32>)> = members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(|m| {
            (
                m.iter()
                    .map(|&i| institutions[i as usize].institution_id.0)
                    .min()
                    .expect("nonempty"),
                m,
            )
        })
        .collect();
    towns.sort_by_key(|t| t.0);

    let mut town_of = vec![0u32; n];
    let towns = towns
        .into_iter()
        .enumerate()
        .map(|(t, (town_id, m))| {
            for &i in &m {
                town_of[i as usize] = t as u32;
            }
            let mut ids: Vec<InstitutionId> = m.iter().map(|&i| institutions[i as usize].institution_id).collect();
            ids.sort_unstable();
            let name = m
                .iter()
                .map(|&i| &institutions[i as usize])
                .find(|inst| inst.institution_id.0 == town_id)
                .map(|inst| inst.name.clone())
                .unwrap_or_default();
            Town {
                town_id,
                name,
                members: ids,
            }
        })
        .collect();

    let mut without_coordinates: Vec<InstitutionId> = institutions
        .iter()
        .filter(|i| i.coordinates().is_none())
        .map(|i| i.institution_id)
        .collect();
    without_coordinates.sort_unstable();
    Ok(TownClusters {
        town_of,
        towns,
        without_coordinates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(id: u64, lat: f64, lon: f64) -> InstitutionRecord {
        InstitutionRecord {
            institution_id: InstitutionId(id),
            name: format!("i{id}"),
            latitude: Some(lat),
            longitude: Some(lon),
            country_code: None,
            continent: None,
        }
    }

    /// Degrees of longitude spanning `km` along the equator.
    fn lon_for(km: f64) -> f64 {
        (km / EARTH_RADIUS_KM).to_degrees()
    }

    #[test]
    fn haversine_along_equator() {
        assert!((haversine_km((0.0, 0.0), (0.0, lon_for(25.0))) - 25.0).abs() < 1e-9);
        assert!((haversine_km((0.0, 179.9), (0.0, -179.9)) - haversine_km((0.0, 0.0), (0.0, 0.2))).abs() < 1e-6);
    }

    #[test]
    fn near_far_and_chained() {
        let c = cluster_towns(&[inst(1, 0.0, 0.0), inst(2, 0.0, lon_for(10.0))], 30.0).unwrap();
        assert_eq!(c.towns.len(), 1);
        let c = cluster_towns(&[inst(1, 0.0, 0.0), inst(2, 0.0, lon_for(100.0))], 30.0).unwrap();
        assert_eq!(c.towns.len(), 2);
        let chain = [
            inst(3, 0.0, lon_for(50.0)),
            inst(1, 0.0, 0.0),
            inst(2, 0.0, lon_for(25.0)),
        ];
        let c = cluster_towns(&chain, 30.0).unwrap();
        assert_eq!(c.towns.len(), 1);
        assert_eq!(c.towns[0].town_id, 1);
        assert_eq!(
            c.towns[0].members,
            vec![InstitutionId(1), InstitutionId(2), InstitutionId(3)]
        );
    }

    #[test]
    fn no_coordinates_is_a_singleton() {
        let mut lost = inst(5, 0.0, 0.0);
        lost.latitude = None;
        let c = cluster_towns(&[inst(1, 0.0, 0.0), lost], 30.0).unwrap();
        assert_eq!(c.towns.len(), 2);
        assert_eq!(c.without_coordinates, vec![InstitutionId(5)]);
        assert!(cluster_towns(&[], -1.0).is_err());
    }
}
