#pragma once

#include <vector>

#include "egad/mesh.hpp"
#include "egad/rng.hpp"

namespace egad {

/// Unnormalized geodesic integral per vertex.
std::vector<double> geodesic_integral(const TriMesh& mesh, int base_count, Rng& rng);

/// Geodesic integral per vertex, normalized as (mu - min) / max. Bases are
/// drawn by systematic sampling over the cumulative vertex area, so each
/// carries an equal share of the surface.
std::vector<double> geodesic_mu(const TriMesh& mesh, int base_count, Rng& rng);

struct ReebNode {
    int interval = 0;
    double area = 0.0;   // fraction of total surface area
    double length = 0.0; // fraction of the level's summed mu extents
    int parent = -1;     // node index one level coarser
    std::vector<int> adjacent;
};

struct ReebLevel {
    int intervals = 1;
    std::vector<ReebNode> nodes;
};

/// levels[0] is the single-interval root level; levels.back() the finest.
struct ReebSignature {
    std::vector<ReebLevel> levels;
};

struct SimilarityParams {
    int levels = 4;
    int base_count = 64;
    double area_weight = 0.5;
};

ReebSignature build_mrg(const TriMesh& mesh, const std::vector<double>& mu, int levels);
ReebSignature build_signature(const TriMesh& mesh, const SimilarityParams& params, Rng& rng);

/// Coarse-to-fine matching score in one direction.
double match_score(const ReebSignature& a, const ReebSignature& b, double area_weight = 0.5);

/// Symmetrized similarity in [0, 1].
double similarity(const ReebSignature& a, const ReebSignature& b, double area_weight = 0.5);

inline double dist(const ReebSignature& a, const ReebSignature& b, double area_weight = 0.5)
{
    return 1.0 - similarity(a, b, area_weight);
}

/// Mean of the k smallest entries of `distances`; 1.0 when empty.
double k_nearest_mean(std::vector<double> distances, int k);

double diversity(const ReebSignature& target, const std::vector<const ReebSignature*>& population, int k, double area_weight = 0.5);

} // namespace egad
