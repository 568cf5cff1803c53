#include "egad/complexity.hpp"

#include <cmath>
#include <numbers>

#include "egad/errors.hpp"

namespace egad {

std::vector<double> angular_deficits(const TriMesh& mesh)
{
    std::vector<double> angle_sum(mesh.vertices.size(), 0.0);
    std::vector<char> touched(mesh.vertices.size(), 0);
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            const auto v = static_cast<std::size_t>(f[k]);
            const Vec3 a = mesh.vertices[static_cast<std::size_t>(f[(k + 1) % 3])] - mesh.vertices[v];
            const Vec3 b = mesh.vertices[static_cast<std::size_t>(f[(k + 2) % 3])] - mesh.vertices[v];
            // atan2 is accurate for angles near 0 and pi, unlike acos.
            angle_sum[v] += std::atan2(a.cross(b).norm(), a.dot(b));
            touched[v] = 1;
        }
    std::vector<double> deficits(mesh.vertices.size());
    for (std::size_t v = 0; v < deficits.size(); ++v) {
        if (!touched[v])
            throw StructuralError("vertex " + std::to_string(v) + " has no incident faces");
        deficits[v] = 2.0 * std::numbers::pi - angle_sum[v];
    }
    return deficits;
}

constexpr double kDeficitQuantum = 1e-9;

DeficitHistogram deficit_histogram(const std::vector<double>& deficits, int bins)
{
    DeficitHistogram h;
    h.bins = bins;
    h.lo = -2.0 * std::numbers::pi;
    h.width = 4.0 * std::numbers::pi / bins;
    h.probabilities.assign(static_cast<std::size_t>(bins), 0.0);
    if (deficits.empty())
        return h;
    for (double d : deficits) {
        // Flat vertices come out as +-1e-16 and straddle the edge at 0;
        // snapping first keeps binning stable under rigid motion.
        d = std::round(d / kDeficitQuantum) * kDeficitQuantum;
        long b = static_cast<long>(std::floor((d - h.lo) / h.width));
        if (b < 0 || b >= bins) {
            ++h.clamped;
            b = b < 0 ? 0 : bins - 1;
        }
        h.probabilities[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& p : h.probabilities)
        p /= static_cast<double>(deficits.size());
    return h;
}

double entropy(const std::vector<double>& probabilities)
{
    double h = 0.0;
    for (double p : probabilities)
        if (p > 0.0)
            h -= p * std::log(p);
    return h;
}

double shape_complexity(const TriMesh& mesh, int bins)
{
    return entropy(deficit_histogram(angular_deficits(mesh), bins).probabilities);
}

} // namespace egad
