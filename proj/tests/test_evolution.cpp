#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "egad/evolution.hpp"

using namespace egad;
namespace fs = std::filesystem;

namespace {

RunConfig tiny()
{
    RunConfig c;
    c.seed = 42;
    c.population = 6;
    c.steps = 4;
    c.checkpoint_interval = 2;
    c.grid = 5;
    c.capacity = 2;
    c.ranges = {0.8, 3.2, 0.004, 0.056};
    c.grasping.num_grasps = 15;
    c.grasping.perturbations = 3;
    c.morphology.resolution = {16, 16, 16};
    c.threads = 1;
    return c;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

// Every file under dir, keyed by relative path.
std::map<std::string, std::string> tree(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            out[fs::relative(e.path(), dir).string()] = slurp(e.path());
    return out;
}

fs::path fresh(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / "egad_tests" / name;
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("parallel_for covers every index and forwards errors")
{
    std::vector<int> hit(100, 0);
    parallel_for(100, 4, [&](int i) { hit[static_cast<std::size_t>(i)] += 1; });
    CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
    CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
        if (i == 7)
            throw std::runtime_error("boom");
    }),
                    std::runtime_error);
}

TEST_CASE("a small run is deterministic, resumable and thread independent")
{
    const fs::path a = fresh("run_a"), b = fresh("run_b"), c = fresh("run_c");

    Evolution first(tiny());
    CHECK(first.run(a.string()));
    CHECK(first.generation() == 4);
    CHECK(first.archive().invariant_violations() == 0);
    CHECK_FALSE(first.archive().empty());

    RunConfig threaded = tiny();
    threaded.threads = 3;
    Evolution second(threaded);
    second.run(b.string());

    Evolution partial(tiny());
    CHECK(partial.run(c.string(), 2));
    CHECK(partial.generation() == 2);
    CHECK_FALSE(fs::exists(c / "meshes"));
    Evolution resumed = Evolution::resume(c.string());
    CHECK(resumed.generation() == 2);
    CHECK(resumed.archive().size() == partial.archive().size());
    resumed.run(c.string());

    const auto ta = tree(a), tc = tree(c);
    CHECK(ta == tc);
    auto tb = tree(b);
    // The echoed worker count is the only permitted difference.
    const auto manifest_b = nlohmann::json::parse(tb["manifest.json"]);
    auto manifest_a = nlohmann::json::parse(ta.at("manifest.json"));
    manifest_a["config"]["archive.threads"] = "3";
    CHECK(manifest_a == manifest_b);
    tb.erase("manifest.json");
    auto ta_rest = ta;
    ta_rest.erase("manifest.json");
    CHECK(ta_rest == tb);

    const auto m = nlohmann::json::parse(ta.at("manifest.json"));
    CHECK(m.at("generation") == 4);
    CHECK(m.at("occupants").size() == first.archive().size());
    const auto& history = m.at("history");
    REQUIRE(history.size() == 3);
    double previous = 0.0;
    for (const auto& h : history) {
        CHECK(h.at("violations") == 0);
        CHECK(h.at("capacity_coverage").get<double>() >= previous);
        previous = h.at("capacity_coverage").get<double>();
    }
    std::size_t stl = 0, json = 0;
    for (const auto& [name, _] : ta) {
        stl += name.ends_with(".stl");
        json += name.rfind("genomes/", 0) == 0;
    }
    CHECK(stl == first.archive().size());
    CHECK(json == first.archive().size());
}

TEST_CASE("evaluation is reproducible and shapes rebuild")
{
    Rng rng(3);
    const RunConfig cfg = tiny();
    for (int attempt = 0; attempt < 20; ++attempt) {
        const CppnGenome g = random_genome(rng);
        const auto e1 = evaluate_genome(g, cfg, 1, attempt);
        const auto e2 = evaluate_genome(g, cfg, 1, attempt);
        REQUIRE(e1.has_value() == e2.has_value());
        if (!e1)
            continue;
        CHECK(e1->complexity == e2->complexity);
        CHECK(e1->quality == e2->quality);
        Occupant o;
        o.genome = g;
        o.generation = 1;
        o.index = attempt;
        rebuild_shape(o, cfg);
        CHECK(o.mesh->vertices == e1->mesh->vertices);
        CHECK(similarity(*o.signature, *e1->signature) == 1.0);
        return;
    }
    FAIL("no random genome survived");
}
