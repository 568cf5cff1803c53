#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "egad/config.hpp"
#include "egad/errors.hpp"
#include "egad/mesh_io.hpp"
#include "egad/primitives.hpp"

using namespace egad;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "egad_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string error_key(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return {};
}

} // namespace

TEST_CASE("empty config gives defaults")
{
    const RunConfig c = parse_config("");
    CHECK(c.population == 100);
    CHECK(c.steps == 2000);
    CHECK(c.grid == 25);
    CHECK(c.capacity == 4);
    CHECK(c.diversity_k == 10);
    CHECK(c.rates.crossover == 0.5);
    CHECK(c.grasping.num_grasps == 100);
    CHECK(c.grasping.gripper_width == 75.0);
    CHECK(c.morphology.resolution == std::array<int, 3>{25, 25, 25});
    CHECK(c.ranges.complexity_min == 1.0);
    CHECK(c.ranges.complexity_max == 5.0);
    CHECK(c.ranges.quality_min == 0.0005);
    CHECK(c.ranges.quality_max == 0.004);
    CHECK(c.complexity_bins == 512);
}

TEST_CASE("config errors name the key")
{
    CHECK(error_key("genome.crossover = 1.5") == "genome.crossover");
    CHECK(error_key("archive.bogus = 1") == "archive.bogus");
    CHECK(error_key("seed = 1\nseed = 2") == "seed");
    CHECK(error_key("archive.grid =") == "archive.grid");
    CHECK(error_key("archive.grid = ten") == "archive.grid");
    CHECK(error_key("archive.quality_max = 0.0001") == "archive.quality_max");
    CHECK(error_key("# comment only\n\n  seed = 3  # trailing\n").empty());
    CHECK_THROWS_AS(load_config(scratch("missing.conf").string()), InputError);
}

TEST_CASE("config round trip")
{
    const RunConfig c = parse_config("seed = 123\narchive.grid = 10\ngrasping.friction_mu = 0.35\narchive.quality_max = 0.0567\n"
                                     "archive.parent_sampling = cell\narchive.write_meshes = false\nmorphology.resolution = 31\n");
    const std::string echoed = echo_config(c);
    CHECK(echo_config(parse_config(echoed)) == echoed);
    const RunConfig back = config_from_json(config_to_json(c));
    CHECK(echo_config(back) == echoed);
    CHECK(back.seed == 123);
    CHECK(back.grasping.friction == 0.35);
    CHECK(back.parent_sampling == ParentSampling::Cell);
    CHECK_FALSE(back.write_meshes);
    CHECK(config_keys().size() == static_cast<std::size_t>(std::count(echoed.begin(), echoed.end(), '\n')));

    const fs::path p = scratch("round.conf");
    std::ofstream(p) << echoed;
    CHECK(echo_config(load_config(p.string())) == echoed);
}

TEST_CASE("thread count resolution")
{
    CHECK(resolve_threads(3) == 3);
    CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("mesh round trips")
{
    const TriMesh m = make_torus(30, 10, 24, 12);
    const fs::path stl = scratch("torus.stl"), obj = scratch("torus.OBJ");
    write_mesh(m, stl.string());
    write_mesh(m, obj.string());
    CHECK(fs::file_size(stl) == 84 + 50 * m.faces.size());

    const TriMesh a = read_mesh(stl.string());
    CHECK(a.faces.size() == m.faces.size());
    CHECK(a.vertices.size() == m.vertices.size());
    CHECK(validate(a).ok());
    for (std::size_t f = 0; f < m.faces.size(); ++f)
        for (int k = 0; k < 3; ++k) {
            const Vec3& p = m.vertices[static_cast<std::size_t>(m.faces[f][static_cast<std::size_t>(k)])];
            const Vec3& q = a.vertices[static_cast<std::size_t>(a.faces[f][static_cast<std::size_t>(k)])];
            REQUIRE((p - q).norm() < 1e-4);
        }

    const TriMesh b = read_mesh(obj.string());
    CHECK(b.faces == m.faces);
    for (std::size_t i = 0; i < m.vertices.size(); ++i)
        REQUIRE((m.vertices[i] - b.vertices[i]).norm() < 1e-6);
}

TEST_CASE("ascii stl and obj details")
{
    const fs::path ascii = scratch("tri.stl");
    std::ofstream(ascii) << "solid t\n facet normal 0 0 1\n  outer loop\n   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n  endloop\n endfacet\n"
                         << " facet normal 0 0 1\n  outer loop\n   vertex 1 0 0\n   vertex 1 1 0\n   vertex 0 1 0\n  endloop\n endfacet\nendsolid t\n";
    const TriMesh t = read_stl(ascii.string());
    CHECK(t.faces.size() == 2);
    CHECK(t.vertices.size() == 4);

    const fs::path quad = scratch("quad.obj");
    std::ofstream(quad) << "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1/1 2/2 3/3 4/4\nf -4 -2 -1\n";
    const TriMesh q = read_obj(quad.string());
    CHECK(q.faces.size() == 3);
    CHECK(q.faces[2] == Face{0, 2, 3});

    const fs::path bad = scratch("bad.obj");
    std::ofstream(bad) << "v 0 0 0\nf 1 2 3\n";
    CHECK_THROWS_AS(read_obj(bad.string()), InputError);
    const fs::path junk = scratch("junk.stl");
    std::ofstream(junk) << "not a mesh";
    CHECK_THROWS_AS(read_stl(junk.string()), InputError);
    CHECK_THROWS_AS(read_mesh(scratch("x.ply").string()), InputError);
}
