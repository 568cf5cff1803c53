#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "egad/genome.hpp"
#include "egad/grasping.hpp"
#include "egad/morphology.hpp"
#include "egad/similarity.hpp"

namespace egad {

struct FeatureRanges {
    double complexity_min = 1.0;
    double complexity_max = 5.0;
    double quality_min = 0.0005;
    double quality_max = 0.004;
};

enum class ParentSampling { Occupant, Cell };

struct RunConfig {
    std::uint64_t seed = 0;
    int population = 100;
    int steps = 2000;
    int checkpoint_interval = 10;
    int init_attempt_factor = 100;
    int threads = 0; // 0: EGAD_THREADS or hardware concurrency
    bool write_meshes = true;

    int grid = 25;
    int capacity = 4;
    FeatureRanges ranges;
    ParentSampling parent_sampling = ParentSampling::Occupant;
    int diversity_k = 10;

    EvolutionRates rates;
    MorphologyParams morphology;
    int complexity_bins = 512;
    GraspConfig grasping;
    SimilarityParams similarity;
};

/// Parses `key = value` lines; `#` starts a comment. Keys not listed by
/// config_keys() are rejected. Throws ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Range checks; throws ConfigError naming the first offending key.
void validate(const RunConfig& config);

/// Every resolved value, one `key = value` line each, in a fixed order.
std::string echo_config(const RunConfig& config);
nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

std::vector<std::string> config_keys();

/// Worker count after applying the EGAD_THREADS fallback.
int resolve_threads(int requested);

} // namespace egad
