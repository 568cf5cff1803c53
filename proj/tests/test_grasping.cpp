#include <doctest.h>

#include <cmath>

#include "egad/errors.hpp"
#include "egad/grasping.hpp"
#include "egad/morphology.hpp"
#include "egad/primitives.hpp"
#include "oracles.hpp"

using namespace egad;

namespace {

Eigen::Matrix3d random_rotation(Rng& rng)
{
    return Eigen::Quaterniond(rng.normal(), rng.normal(), rng.normal(), rng.normal()).normalized().toRotationMatrix();
}

std::vector<Wrench> rotated(const std::vector<Wrench>& w, const Eigen::Matrix3d& r)
{
    std::vector<Wrench> out;
    for (const auto& x : w) {
        Wrench y;
        y.head<3>() = r * x.head<3>();
        y.tail<3>() = r * x.tail<3>();
        out.push_back(y);
    }
    return out;
}

// Grasps on a few shapes, for comparing against the brute-force hull.
std::vector<std::vector<Wrench>> fixtures()
{
    std::vector<std::vector<Wrench>> out;
    GraspConfig cfg;
    const std::vector<TriMesh> shapes{make_box({40, 40, 40}, 4), make_icosphere(30, 3), make_cylinder(20, 60, 32, 4), make_ellipsoid({35, 25, 20}, 3)};
    Rng rng(77);
    for (const auto& m : shapes) {
        GraspAnalyzer an(m, cfg);
        for (const auto& g : an.sample_antipodal(6, rng))
            out.push_back(an.wrenches(g, cfg.friction).wrenches);
    }
    return out;
}

} // namespace

TEST_CASE("percentile matches a sort-based reference")
{
    Rng rng(1);
    for (int n = 1; n <= 200; ++n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v)
            x = rng.uniform(0, 0.05);
        for (double p : {0.0, 25.0, 50.0, 65.0, 75.0, 85.0, 100.0})
            REQUIRE(percentile(v, p) == oracle::percentile(v, p));
    }
    std::vector<double> q;
    for (int k = 1; k <= 100; ++k)
        q.push_back(0.001 * k);
    CHECK(percentile(q, 75.0) == doctest::Approx(0.07525).epsilon(1e-12));
    CHECK(percentile(std::vector<double>(100, 0.3), 75.0) == 0.3);
    CHECK(percentile({}, 75.0) == 0.0);
}

TEST_CASE("contact wrenches")
{
    const std::vector<Contact> contacts{{Vec3(1, 0, 0), Vec3(1, 0, 0)}, {Vec3(-1, 0, 0), Vec3(-1, 0, 0)}};
    const WrenchSet w = contact_wrenches(contacts, 0.5, 8, 1.0, Vec3::Zero());
    CHECK(w.wrenches.size() == 16);
    for (std::size_t i = 0; i < w.wrenches.size(); ++i) {
        const Vec3 n = contacts[i / 8].normal;
        const Vec3 f = w.wrenches[i].head<3>();
        const double normal = -f.dot(n);
        CHECK(normal > 0.0);
        CHECK(std::abs((f + normal * n).norm() / normal - 0.5) < 1e-9);
    }
    const WrenchSet frictionless = contact_wrenches(contacts, 0.0, 8, 1.0, Vec3::Zero());
    for (int i = 1; i < 8; ++i)
        CHECK(frictionless.wrenches[static_cast<std::size_t>(i)].isApprox(frictionless.wrenches[0]));
}

TEST_CASE("force closure basics")
{
    const std::vector<Contact> one{{Vec3(1, 0, 0), Vec3(1, 0, 0)}};
    WrenchSet single = contact_wrenches(one, 0.5, 8, 1.0, Vec3::Zero());
    add_torsional_wrenches(single, one, 5.0);
    CHECK(ferrari_canny(single) == 0.0);

    const TriMesh box = make_box({40, 40, 40}, 4);
    GraspAnalyzer an(box, GraspConfig{});
    const auto g = an.close_jaws(Vec3::Zero(), Vec3::UnitX());
    REQUIRE(g.has_value());
    CHECK(g->width == doctest::Approx(40.0));
    CHECK(an.is_antipodal(*g, 0.5));
    CHECK(an.quality(*g, 0.5) > 0.0);
}

TEST_CASE("hull distance agrees with brute-force enumeration")
{
    int compared = 0, positive = 0;
    for (const auto& w : fixtures()) {
        const double fast = ferrari_canny(w);
        const double slow = oracle::ferrari_canny(w);
        ++compared;
        if (slow > 1e-6) {
            ++positive;
            CHECK(std::abs(fast - slow) / slow < 0.05);
        } else {
            CHECK(fast < 1e-5);
        }
    }
    CHECK(compared >= 10);
    CHECK(positive >= 5);
}

TEST_CASE("hull distance is rotation invariant")
{
    Rng rng(9);
    for (const auto& w : fixtures()) {
        const double q = ferrari_canny(w);
        for (int t = 0; t < 3; ++t)
            CHECK(std::abs(ferrari_canny(rotated(w, random_rotation(rng))) - q) < 1e-9);
    }
}

TEST_CASE("antipodal sampling on a sphere passes through the centre")
{
    const TriMesh sphere = make_icosphere(30.0, 4);
    Rng rng(3);
    // Low friction keeps accepted chords near the centre: offset <= R sin(atan mu)
    // plus the facet normals' deviation from radial.
    const auto grasps = sample_antipodal_grasps(sphere, 50, 0.05, 75.0, rng);
    CHECK(grasps.size() > 20);
    for (const auto& g : grasps) {
        const Vec3 mid = 0.5 * (g.c1 + g.c2);
        const double off = (mid - mid.dot(g.axis) * g.axis).norm();
        CHECK(off < 0.1 * 30.0);
        CHECK(g.width <= 75.0);
    }
}

TEST_CASE("nothing fits a plate thicker than the gripper")
{
    const TriMesh plate = make_box({200, 200, 90}, 2);
    Rng rng(4);
    CHECK(sample_antipodal_grasps(plate, 30, 0.5, 75.0, rng).empty());
    GraspConfig cfg;
    cfg.num_grasps = 30;
    const auto m = grasp_metrics(plate, cfg, 1);
    CHECK(m.grasp_count == 0);
    CHECK(m.quality_percentile == 0.0);
}

TEST_CASE("box sampling golden values")
{
    const TriMesh box = make_box({40, 40, 40}, 4);
    GraspConfig cfg;
    const auto m = grasp_metrics(box, cfg, 2024);
    CHECK(m.grasp_count == 100);
    MESSAGE("box q75 " << m.quality_percentile << " force closure " << m.force_closure_rate);
}

TEST_CASE("robust quality")
{
    const TriMesh box = make_box({40, 40, 40}, 4);
    GraspConfig exact;
    exact.sigma_position = 0.0;
    exact.sigma_rotation_deg = 0.0;
    exact.sigma_friction = 0.0;
    GraspAnalyzer an(box, exact);
    const auto g = an.close_jaws(Vec3(2, -3, 1), Vec3(1, 0.05, 0).normalized());
    REQUIRE(g.has_value());
    Rng rng(1);
    CHECK(an.robust_quality(*g, 1, rng) == an.quality(*g));

    GraspConfig noisy;
    GraspAnalyzer nan(box, noisy);
    Rng a(5), b(5);
    CHECK(nan.robust_quality(*g, 10, a) == nan.robust_quality(*g, 10, b));

    // Knife edge: a grasp near a box edge loses quality as position noise grows.
    const auto edge = an.close_jaws(Vec3(0, 18.5, 0), Vec3::UnitX());
    REQUIRE(edge.has_value());
    double previous = 1e300;
    for (double sigma : {0.0, 1.0, 3.0, 6.0}) {
        GraspConfig c;
        c.sigma_position = sigma;
        c.sigma_rotation_deg = 0.0;
        c.sigma_friction = 0.0;
        GraspAnalyzer ea(box, c);
        Rng r(11);
        const double q = ea.robust_quality(*edge, 200, r);
        CHECK(q <= previous + 1e-4);
        previous = q;
    }
}

TEST_CASE("grasp metrics are a pure function of the seed")
{
    const TriMesh m = make_ellipsoid({30, 25, 20}, 3);
    GraspConfig cfg;
    cfg.num_grasps = 40;
    const auto a = grasp_metrics(m, cfg, 99);
    const auto b = grasp_metrics(m, cfg, 99);
    CHECK(a.robust_qualities == b.robust_qualities);
    CHECK(a.quality_percentile == b.quality_percentile);
}

TEST_CASE("scale sweep collapses beyond the gripper")
{
    const TriMesh sphere = make_icosphere(1.0, 3);
    GraspConfig cfg;
    cfg.num_grasps = 40;
    const auto pts = quality_vs_scale_sweep(sphere, {0.4, 0.8, 1.05, 1.3}, cfg, 3);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].p75 > 0.0);
    CHECK(pts[1].p75 > 0.0);
    CHECK(pts[2].p75 == 0.0);
    CHECK(pts[3].p75 == 0.0);
    for (const auto& p : pts) {
        CHECK(p.p65 <= p.p75);
        CHECK(p.p75 <= p.p85);
    }
    const std::string csv = scale_sweep_csv(pts, 75.0);
    CHECK(csv.rfind("scale,min_extent_mm,p65,p75,p85,grasp_count\n", 0) == 0);
}
