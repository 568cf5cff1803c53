#pragma once

#include <vector>

#include "egad/mesh.hpp"

namespace egad {

/// Normalised histogram of per-vertex angular deficits over [-2pi, 2pi).
struct DeficitHistogram {
    int bins = 512;
    double lo = 0.0;
    double width = 0.0;
    std::vector<double> probabilities;
    int clamped = 0; // deficits outside the range, folded into the edge bins
};

/// 2*pi minus the sum of incident corner angles, one value per vertex.
/// Throws StructuralError for a vertex without faces.
std::vector<double> angular_deficits(const TriMesh& mesh);

DeficitHistogram deficit_histogram(const std::vector<double>& deficits, int bins = 512);

/// Natural-log entropy of a probability vector; zero bins contribute nothing.
double entropy(const std::vector<double>& probabilities);

/// Entropy of the deficit histogram; in [0, ln bins].
double shape_complexity(const TriMesh& mesh, int bins = 512);

} // namespace egad
