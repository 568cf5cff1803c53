#include "egad/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "egad/morphology.hpp"

namespace egad {

double percentile(std::vector<double> values, double pct)
{
    if (values.empty())
        return 0.0;
    const double pos = std::clamp(pct, 0.0, 100.0) / 100.0 * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(lo);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(lo), values.end());
    const double a = values[lo];
    if (frac == 0.0 || lo + 1 >= values.size())
        return a;
    const double b = *std::min_element(values.begin() + static_cast<std::ptrdiff_t>(lo) + 1, values.end());
    return a + frac * (b - a);
}

GraspAnalyzer::GraspAnalyzer(const TriMesh& mesh, GraspConfig config) : mesh_(mesh), config_(config), bvh_(mesh)
{
    if (mesh.faces.empty())
        throw std::invalid_argument("cannot analyse grasps on an empty mesh");
    double total = 0.0;
    area_cdf_.reserve(mesh.faces.size());
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        total += face_area(mesh, i);
        area_cdf_.push_back(total);
    }
    centroid_ = volume_centroid(mesh);
    double rho_max = 0.0;
    for (const auto& v : mesh.vertices)
        rho_max = std::max(rho_max, (v - centroid_).norm());
    torque_scale_ = rho_max > 0.0 ? 1.0 / rho_max : 1.0;
    reach_ = 2.0 * std::max(bounding_box(mesh).extent().norm(), 1e-9);
}

std::optional<GraspSample> GraspAnalyzer::close_jaws(const Vec3& center, const Vec3& axis) const
{
    const Vec3 dir = axis.normalized();
    const double back = reach_ + (center - centroid_).norm();
    const auto hits = bvh_.intersect_all(center - back * dir, dir);
    if (hits.size() < 2)
        return std::nullopt;
    GraspSample g;
    g.c1 = hits.front().point;
    g.c2 = hits.back().point;
    g.width = (g.c2 - g.c1).norm();
    if (!(g.width > 1e-9 * reach_) || g.width > config_.gripper_width)
        return std::nullopt;
    // Flat jaws have to clear the whole object along the closing direction.
    double lo = 1e300, hi = -1e300;
    for (const auto& v : mesh_.vertices) {
        const double t = v.dot(dir);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi - lo > config_.gripper_width)
        return std::nullopt;
    g.axis = (g.c2 - g.c1) / g.width;
    g.n1 = face_normal(mesh_, static_cast<std::size_t>(hits.front().face));
    g.n2 = face_normal(mesh_, static_cast<std::size_t>(hits.back().face));
    return g;
}

bool GraspAnalyzer::is_antipodal(const GraspSample& g, double friction) const
{
    const double cos_limit = std::cos(std::atan(friction));
    return (-g.n1).dot(g.axis) >= cos_limit && g.n2.dot(g.axis) >= cos_limit;
}

std::vector<GraspSample> GraspAnalyzer::sample_antipodal(int n, Rng& rng) const
{
    std::vector<GraspSample> grasps;
    if (n <= 0)
        return grasps;
    const double total = area_cdf_.back();
    const double cone = std::atan(config_.friction);
    const long attempts = static_cast<long>(config_.attempt_factor) * n;
    for (long a = 0; a < attempts && static_cast<int>(grasps.size()) < n; ++a) {
        const double pick = rng.uniform() * total;
        auto it = std::upper_bound(area_cdf_.begin(), area_cdf_.end(), pick);
        const auto fi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - area_cdf_.begin(), static_cast<std::ptrdiff_t>(area_cdf_.size()) - 1));
        const auto& f = mesh_.faces[fi];
        const double s = std::sqrt(rng.uniform());
        const double t = rng.uniform();
        const Vec3 point = (1.0 - s) * mesh_.vertices[static_cast<std::size_t>(f[0])] + s * (1.0 - t) * mesh_.vertices[static_cast<std::size_t>(f[1])] +
                           s * t * mesh_.vertices[static_cast<std::size_t>(f[2])];
        const Vec3 inward = -face_normal(mesh_, fi);
        if (inward.isZero())
            continue;

        // Direction uniform in solid angle inside the friction cone.
        const double cos_theta = 1.0 - rng.uniform() * (1.0 - std::cos(cone));
        const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        const auto [t1, t2] = tangent_basis(inward);
        const Vec3 dir = cos_theta * inward + sin_theta * (std::cos(phi) * t1 + std::sin(phi) * t2);

        const auto first = close_jaws(point, dir);
        if (!first)
            continue;
        // Re-close on the canonical line (midpoint, axis) so the stored grasp
        // is exactly what a zero-noise perturbation reproduces.
        auto grasp = close_jaws(0.5 * (first->c1 + first->c2), first->axis);
        if (!grasp || !is_antipodal(*grasp, config_.friction))
            continue;
        grasp->quality = quality(*grasp);
        grasps.push_back(*grasp);
    }
    return grasps;
}

WrenchSet GraspAnalyzer::wrenches(const GraspSample& g, double friction) const
{
    const std::vector<Contact> contacts{{g.c1, g.n1}, {g.c2, g.n2}};
    WrenchSet set = contact_wrenches(contacts, friction, config_.cone_edges, torque_scale_, centroid_);
    add_torsional_wrenches(set, contacts, config_.finger_radius);
    return set;
}

double GraspAnalyzer::quality(const GraspSample& g, double friction) const { return ferrari_canny(wrenches(g, friction)); }

double GraspAnalyzer::robust_quality(const GraspSample& g, int perturbations, Rng& rng) const
{
    if (perturbations <= 0)
        return 0.0;
    const double sigma_rot = config_.sigma_rotation_deg * std::numbers::pi / 180.0;
    const Vec3 mid = 0.5 * (g.c1 + g.c2);
    const auto [t1, t2] = tangent_basis(g.axis);
    double sum = 0.0;
    for (int p = 0; p < perturbations; ++p) {
        const Vec3 jitter(rng.normal(), rng.normal(), rng.normal());
        const Vec3 center = mid + config_.sigma_position * jitter;
        const Vec3 omega = sigma_rot * (rng.normal() * t1 + rng.normal() * t2);
        const double angle = omega.norm();
        const Vec3 axis = angle > 0.0 ? Vec3(Eigen::AngleAxisd(angle, omega / angle) * g.axis) : g.axis;
        double mu = config_.friction;
        if (config_.sigma_friction > 0.0) {
            for (int tries = 0; tries < 100; ++tries) {
                const double candidate = config_.friction + config_.sigma_friction * rng.normal();
                if (candidate > 0.0) {
                    mu = candidate;
                    break;
                }
            }
        }
        if (config_.sigma_position == 0.0 && angle == 0.0)
            sum += quality(g, mu);
        else if (const auto closed = close_jaws(center, axis))
            sum += quality(*closed, mu);
    }
    return sum / perturbations;
}

std::vector<GraspSample> sample_antipodal_grasps(const TriMesh& mesh, int n, double friction, double gripper_width, Rng& rng)
{
    GraspConfig config;
    config.friction = friction;
    config.gripper_width = gripper_width;
    return GraspAnalyzer(mesh, config).sample_antipodal(n, rng);
}

double robust_quality(const TriMesh& mesh, const GraspSample& grasp, const GraspConfig& config, Rng& rng)
{
    return GraspAnalyzer(mesh, config).robust_quality(grasp, config.perturbations, rng);
}

GraspMetrics grasp_metrics(const TriMesh& mesh, const GraspConfig& config, std::uint64_t seed)
{
    GraspMetrics m;
    const GraspAnalyzer analyzer(mesh, config);
    Rng sampler = stream(seed, "grasp-sample");
    const auto grasps = analyzer.sample_antipodal(config.num_grasps, sampler);
    m.grasp_count = static_cast<int>(grasps.size());
    if (grasps.empty())
        return m;
    int closed = 0;
    for (std::size_t i = 0; i < grasps.size(); ++i) {
        Rng noise = stream(seed, "grasp-perturb", i);
        m.robust_qualities.push_back(analyzer.robust_quality(grasps[i], config.perturbations, noise));
        closed += grasps[i].quality > 0.0;
    }
    m.force_closure_rate = static_cast<double>(closed) / static_cast<double>(grasps.size());
    m.quality_percentile = percentile(m.robust_qualities, config.percentile);
    return m;
}

double grasp_difficulty(const TriMesh& mesh, const GraspConfig& config, std::uint64_t seed)
{
    return grasp_metrics(mesh, config, seed).quality_percentile;
}

std::vector<ScalePoint> quality_vs_scale_sweep(const TriMesh& mesh, const std::vector<double>& scales, const GraspConfig& config, std::uint64_t seed)
{
    std::vector<ScalePoint> out;
    for (double s : scales) {
        if (!(s > 0.0))
            throw std::invalid_argument("sweep scales must be positive");
        const TriMesh sized = scale_min_extent(mesh, s * config.gripper_width);
        const auto m = grasp_metrics(sized, config, seed);
        out.push_back({s, percentile(m.robust_qualities, 65.0), percentile(m.robust_qualities, 75.0), percentile(m.robust_qualities, 85.0), m.grasp_count});
    }
    return out;
}

std::string scale_sweep_csv(const std::vector<ScalePoint>& points, double gripper_width)
{
    std::string s = "scale,min_extent_mm,p65,p75,p85,grasp_count\n";
    char buf[160];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.9g,%.9g,%.9g,%d\n", p.scale, p.scale * gripper_width, p.p65, p.p75, p.p85, p.grasp_count);
        s += buf;
    }
    return s;
}

} // namespace egad
