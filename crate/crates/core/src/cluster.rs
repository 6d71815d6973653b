//! Single-pass clustering of near-duplicate detections.
//!
//! Each virtual ellipse is compared, in input order, against the running
//! centroids of the existing clusters and joins the nearest one within
//! the similarity threshold, otherwise it seeds a new cluster. One
//! representative per cluster (the member nearest its centroid) is the
//! final "real" ellipse.

use crate::ellipse::Ellipse;

/// The 5-component ellipse feature vector `(x0, y0, a, b, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector(pub [f64; 5]);

impl From<&Ellipse> for FeatureVector {
    fn from(e: &Ellipse) -> Self {
        FeatureVector(e.feature())
    }
}

/// Euclidean distance in the raw 5-D feature space. All components enter
/// unscaled; in particular the orientation is compared without angular
/// wrap-around unless [`ClusterOptions::wrap_alpha`] is set.
pub fn distance(v: &FeatureVector, w: &FeatureVector) -> f64 {
    distance_with(v, w, false)
}

fn distance_with(v: &FeatureVector, w: &FeatureVector, wrap_alpha: bool) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        let d = v.0[i] - w.0[i];
        sum += d * d;
    }
    let da = if wrap_alpha {
        crate::ellipse::orientation_difference(v.0[4], w.0[4])
    } else {
        v.0[4] - w.0[4]
    };
    sum += da * da;
    sum.sqrt()
}

#[derive(Debug, Clone, Copy)]
pub struct ClusterOptions {
    /// Similarity threshold on the feature distance.
    pub d_threshold: f64,
    /// Compare orientations mod pi instead of raw subtraction.
    pub wrap_alpha: bool,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            d_threshold: 20.0,
            wrap_alpha: false,
        }
    }
}

/// A group of near-duplicate detections with its running centroid.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub members: Vec<Ellipse>,
    /// Component-wise mean of the members' feature vectors.
    pub centroid: FeatureVector,
    /// Distance from each member to the centroid as it stood at
    /// assignment time (0 for the seed member).
    pub assignment_distances: Vec<f64>,
}

impl Cluster {
    fn seed(e: Ellipse) -> Self {
        Cluster {
            centroid: FeatureVector::from(&e),
            members: vec![e],
            assignment_distances: vec![0.0],
        }
    }

    fn push(&mut self, e: Ellipse, assignment_distance: f64) {
        self.members.push(e);
        self.assignment_distances.push(assignment_distance);
        let n = self.members.len() as f64;
        let mut mean = [0.0f64; 5];
        for m in &self.members {
            let f = m.feature();
            for i in 0..5 {
                mean[i] += f[i] / n;
            }
        }
        self.centroid = FeatureVector(mean);
    }
}

pub fn cluster_ellipses(virtual_ellipses: &[Ellipse], d_threshold: f64) -> Vec<Cluster> {
    cluster_ellipses_with(
        virtual_ellipses,
        ClusterOptions {
            d_threshold,
            ..ClusterOptions::default()
        },
    )
}

pub fn cluster_ellipses_with(
    virtual_ellipses: &[Ellipse],
    options: ClusterOptions,
) -> Vec<Cluster> {
    assert!(options.d_threshold > 0.0, "d_threshold must be positive");
    let mut clusters: Vec<Cluster> = Vec::new();
    for e in virtual_ellipses {
        let fv = FeatureVector::from(e);
        let nearest = clusters
            .iter_mut()
            .map(|c| {
                let d = distance_with(&fv, &c.centroid, options.wrap_alpha);
                (c, d)
            })
            .filter(|(_, d)| *d <= options.d_threshold)
            .min_by(|(_, da), (_, db)| da.total_cmp(db));
        match nearest {
            Some((cluster, d)) => cluster.push(*e, d),
            None => clusters.push(Cluster::seed(*e)),
        }
    }
    clusters
}

/// One representative per cluster: the member nearest the final centroid,
/// earliest member on ties. Order follows cluster creation order.
pub fn representatives(clusters: &[Cluster]) -> Vec<Ellipse> {
    clusters
        .iter()
        .map(|c| {
            *c.members
                .iter()
                .min_by(|a, b| {
                    distance(&(*a).into(), &c.centroid)
                        .total_cmp(&distance(&(*b).into(), &c.centroid))
                })
                .expect("clusters are nonempty")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ellipse(f: [f64; 5]) -> Ellipse {
        Ellipse {
            x0: f[0],
            y0: f[1],
            a: f[2],
            b: f[3],
            alpha: f[4],
            quality: 0,
        }
    }

    #[test]
    fn distance_identical_is_zero() {
        let v = FeatureVector([1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(distance(&v, &v), 0.0);
    }

    #[test]
    fn distance_three_four_five() {
        let v = FeatureVector([0.0; 5]);
        let w = FeatureVector([3.0, 4.0, 0.0, 0.0, 0.0]);
        assert_eq!(distance(&v, &w), 5.0);
    }

    #[test]
    fn distance_hand_evaluated() {
        let v = FeatureVector([235.5, 164.5, 60.0, 37.0, 0.253]);
        let w = FeatureVector([236.0, 165.0, 59.0, 38.0, 0.3]);
        assert!((distance(&v, &w) - 2.502209f64.sqrt()).abs() < 1e-12);
        assert!((distance(&v, &w) - 1.5819).abs() < 1e-4);
    }

    #[test]
    fn empty_input_gives_no_clusters() {
        assert!(cluster_ellipses(&[], 20.0).is_empty());
    }

    #[test]
    fn jittered_copies_form_one_cluster() {
        // per-component jitter <= 2 keeps every pairwise distance under
        // sqrt(5 * 4^2) = sqrt(80); centroids drift less than that, and
        // sqrt(20) < 20 for the first assignment
        let base = [100.0, 90.0, 40.0, 25.0, 0.5];
        let mut input = Vec::new();
        let mut state = 42u64;
        for _ in 0..30 {
            let mut f = base;
            for c in f.iter_mut() {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let u = (state >> 11) as f64 / (1u64 << 53) as f64;
                *c += 4.0 * u - 2.0;
            }
            input.push(ellipse(f));
        }
        let clusters = cluster_ellipses(&input, 20.0);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members.len(), 30);
    }

    #[test]
    fn far_families_split_and_match_brute_force() {
        let fam_a = [50.0, 50.0, 30.0, 20.0, 0.2];
        let fam_b = [150.0, 50.0, 30.0, 20.0, 0.2];
        let mut input = Vec::new();
        for i in 0..10 {
            let d = i as f64 * 0.3;
            input.push(ellipse([
                fam_a[0] + d,
                fam_a[1],
                fam_a[2],
                fam_a[3],
                fam_a[4],
            ]));
            input.push(ellipse([
                fam_b[0] - d,
                fam_b[1],
                fam_b[2],
                fam_b[3],
                fam_b[4],
            ]));
        }
        let clusters = cluster_ellipses(&input, 20.0);
        assert_eq!(clusters.len(), 2);

        // brute-force oracle: nearest family center decides membership
        for c in &clusters {
            for m in &c.members {
                let da = distance(&m.into(), &FeatureVector(fam_a));
                let db = distance(&m.into(), &FeatureVector(fam_b));
                let expect_a = da < db;
                let in_a = distance(&c.centroid, &FeatureVector(fam_a))
                    < distance(&c.centroid, &FeatureVector(fam_b));
                assert_eq!(expect_a, in_a);
            }
        }
        let total: usize = clusters.iter().map(|c| c.members.len()).sum();
        assert_eq!(total, input.len());
    }

    #[test]
    fn assignment_certificate_holds() {
        let mut input = Vec::new();
        for i in 0..40 {
            let x = 60.0 + (i % 7) as f64;
            let y = 80.0 + (i % 5) as f64;
            input.push(ellipse([x, y, 30.0, 20.0, 0.1]));
        }
        let d_t = 20.0;
        let clusters = cluster_ellipses(&input, d_t);
        for c in &clusters {
            assert_eq!(c.members.len(), c.assignment_distances.len());
            for &d in &c.assignment_distances {
                assert!(d <= d_t);
            }
        }
    }

    #[test]
    fn representative_singleton_and_argmin() {
        let only = ellipse([10.0, 10.0, 20.0, 15.0, 0.0]);
        let singleton = cluster_ellipses(&[only], 20.0);
        assert_eq!(representatives(&singleton), vec![only]);

        let centroid = FeatureVector([0.0; 5]);
        let near = ellipse([0.5, 0.0, 0.0, 0.0, 0.0]);
        let mid = ellipse([3.0, 0.0, 0.0, 0.0, 0.0]);
        let far = ellipse([7.1, 0.0, 0.0, 0.0, 0.0]);
        let cluster = Cluster {
            members: vec![mid, near, far],
            centroid,
            assignment_distances: vec![0.0, 0.0, 0.0],
        };
        assert_eq!(representatives(&[cluster]), vec![near]);
    }

    #[test]
    fn representative_is_always_a_member() {
        let mut input = Vec::new();
        for i in 0..12 {
            input.push(ellipse([100.0 + i as f64, 50.0, 30.0, 20.0, 0.3]));
        }
        let clusters = cluster_ellipses(&input, 20.0);
        for (c, rep) in clusters.iter().zip(representatives(&clusters)) {
            assert!(c.members.contains(&rep));
        }
    }

    #[test]
    fn well_separated_partition_is_order_invariant() {
        // within-family spread < d_t/2, across-family distance > 2*d_t
        let mut input = Vec::new();
        for i in 0..6 {
            input.push(ellipse([40.0 + i as f64, 40.0, 30.0, 20.0, 0.1]));
            input.push(ellipse([140.0 + i as f64, 40.0, 30.0, 20.0, 0.1]));
        }
        let forward = cluster_ellipses(&input, 20.0);
        let mut reversed_input = input.clone();
        reversed_input.reverse();
        let backward = cluster_ellipses(&reversed_input, 20.0);
        assert_eq!(forward.len(), backward.len());

        let key = |c: &Cluster| {
            let mut xs: Vec<i64> = c.members.iter().map(|m| m.x0 as i64).collect();
            xs.sort();
            xs
        };
        let mut fk: Vec<_> = forward.iter().map(key).collect();
        let mut bk: Vec<_> = backward.iter().map(key).collect();
        fk.sort();
        bk.sort();
        assert_eq!(fk, bk);
    }

    #[test]
    fn wrapped_alpha_merges_near_pi_orientations() {
        let a = ellipse([50.0, 50.0, 30.0, 20.0, 0.02]);
        let b = ellipse([50.0, 50.0, 30.0, 20.0, std::f64::consts::PI - 0.02]);
        // raw difference is ~pi and exceeds the threshold; the wrapped
        // difference is 0.04 and merges
        let raw = cluster_ellipses(&[a, b], 1.0);
        assert_eq!(raw.len(), 2);
        let wrapped = cluster_ellipses_with(
            &[a, b],
            ClusterOptions {
                d_threshold: 1.0,
                wrap_alpha: true,
            },
        );
        assert_eq!(wrapped.len(), 1);
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(
            u in proptest::array::uniform5(-500.0f64..500.0),
            v in proptest::array::uniform5(-500.0f64..500.0),
            w in proptest::array::uniform5(-500.0f64..500.0),
        ) {
            let (u, v, w) = (FeatureVector(u), FeatureVector(v), FeatureVector(w));
            prop_assert_eq!(distance(&u, &v), distance(&v, &u));
            prop_assert_eq!(distance(&u, &u), 0.0);
            let (duv, dvw, duw) = (distance(&u, &v), distance(&v, &w), distance(&u, &w));
            prop_assert!(duw <= duv + dvw + 1e-12 * (duv + dvw).max(1.0));
        }

        #[test]
        fn clustering_partitions_the_input(
            xs in proptest::collection::vec(0.0f64..300.0, 0..40),
        ) {
            let input: Vec<Ellipse> = xs
                .iter()
                .map(|&x| ellipse([x, 50.0, 30.0, 20.0, 0.2]))
                .collect();
            let clusters = cluster_ellipses(&input, 20.0);
            let total: usize = clusters.iter().map(|c| c.members.len()).sum();
            prop_assert_eq!(total, input.len());
            for c in &clusters {
                prop_assert!(!c.members.is_empty());
                // centroid recomputable as the member mean
                let n = c.members.len() as f64;
                for i in 0..5 {
                    let mean: f64 = c.members.iter().map(|m| m.feature()[i] / n).sum();
                    prop_assert!((mean - c.centroid.0[i]).abs() < 1e-9);
                }
            }
        }
    }
}
