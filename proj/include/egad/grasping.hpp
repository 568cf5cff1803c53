#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "egad/mesh.hpp"
#include "egad/raycast.hpp"
#include "egad/rng.hpp"
#include "egad/wrench.hpp"

namespace egad {

struct GraspConfig {
    double gripper_width = 75.0; // mm
    double scale_fraction = 0.8;
    int num_grasps = 100;
    double friction = 0.5;
    int cone_edges = 8;
    double finger_radius = 5.0; // mm, soft-contact torsion patch; 0 disables
    int attempt_factor = 10;
    int perturbations = 10;
    double sigma_position = 1.0;     // mm
    double sigma_rotation_deg = 2.5;
    double sigma_friction = 0.1;
    double percentile = 75.0;
};

/// Parallel-jaw grasp. Contacts are the first and last surface crossings of
/// the jaw line, so the jaws close onto them from outside the object.
struct GraspSample {
    Vec3 c1 = Vec3::Zero(), c2 = Vec3::Zero();
    Vec3 n1 = Vec3::UnitX(), n2 = -Vec3::UnitX(); // outward normals
    Vec3 axis = Vec3::UnitX();                    // unit, from c1 to c2
    double width = 0.0;
    double quality = 0.0;
};

/// Linear interpolation between order statistics (numpy's default).
/// Empty input returns 0.
double percentile(std::vector<double> values, double pct);

/// Per-mesh grasp analysis state: BVH, area table, centroid and torque
/// scale (1 / max centroid-to-vertex distance).
class GraspAnalyzer {
public:
    GraspAnalyzer(const TriMesh& mesh, GraspConfig config);

    const GraspConfig& config() const { return config_; }
    const Vec3& centroid() const { return centroid_; }
    double torque_scale() const { return torque_scale_; }

    /// Closes the jaws along the line through `center` with direction `axis`.
    /// Empty when the line misses, the contacts are further apart than the
    /// gripper opens, or the object is wider than that along `axis`.
    std::optional<GraspSample> close_jaws(const Vec3& center, const Vec3& axis) const;

    /// Antipodal when each normal lies within the friction cone of the axis.
    bool is_antipodal(const GraspSample& g, double friction) const;

    std::vector<GraspSample> sample_antipodal(int n, Rng& rng) const;

    WrenchSet wrenches(const GraspSample& g, double friction) const;
    double quality(const GraspSample& g, double friction) const;
    double quality(const GraspSample& g) const { return quality(g, config_.friction); }

    /// Mean quality over jittered copies of the grasp; failed re-closures
    /// score 0.
    double robust_quality(const GraspSample& g, int perturbations, Rng& rng) const;

private:
    const TriMesh& mesh_;
    GraspConfig config_;
    MeshBvh bvh_;
    std::vector<double> area_cdf_;
    Vec3 centroid_;
    double torque_scale_ = 1.0;
    double reach_ = 1.0;
};

/// Free-function forms of the analyzer operations.
std::vector<GraspSample> sample_antipodal_grasps(const TriMesh& mesh, int n, double friction, double gripper_width, Rng& rng);
double robust_quality(const TriMesh& mesh, const GraspSample& grasp, const GraspConfig& config, Rng& rng);

struct GraspMetrics {
    double quality_percentile = 0.0; // the configured percentile (75th by default)
    int grasp_count = 0;
    double force_closure_rate = 0.0; // sampled grasps with nominal quality > 0
    std::vector<double> robust_qualities;
};

/// Samples grasps and returns the configured percentile of their robust
/// qualities. The mesh must already be at gripper scale. Per-grasp noise
/// streams derive from `seed`, so the result is a pure function of
/// (mesh, config, seed).
GraspMetrics grasp_metrics(const TriMesh& mesh, const GraspConfig& config, std::uint64_t seed);
double grasp_difficulty(const TriMesh& mesh, const GraspConfig& config, std::uint64_t seed);

struct ScalePoint {
    double scale = 0.0; // min bounding-box dimension / gripper width
    double p65 = 0.0, p75 = 0.0, p85 = 0.0;
    int grasp_count = 0;
};

std::vector<ScalePoint> quality_vs_scale_sweep(const TriMesh& mesh, const std::vector<double>& scales, const GraspConfig& config, std::uint64_t seed);

/// Header "scale,min_extent_mm,p65,p75,p85,grasp_count", one row per point.
std::string scale_sweep_csv(const std::vector<ScalePoint>& points, double gripper_width);

} // namespace egad
