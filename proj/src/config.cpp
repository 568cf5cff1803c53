#include "egad/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "egad/errors.hpp"

namespace egad {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    const char* end = text.data() + text.size();
    const auto res = std::from_chars(text.data(), end, value);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError(key, "cannot parse '" + text + "' as a number");
    return value;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    if (text == "true" || text == "1")
        return true;
    if (text == "false" || text == "0")
        return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

struct Field {
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

template <class T, class Access>
Field number(std::string key, Access access)
{
    Field f;
    f.key = key;
    f.get = [access](const RunConfig& c) {
        const T v = access(const_cast<RunConfig&>(c));
        if constexpr (std::is_floating_point_v<T>)
            return format_double(v);
        else
            return std::to_string(v);
    };
    f.set = [access, key](RunConfig& c, const std::string& text) { access(c) = parse_number<T>(key, text); };
    return f;
}

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = [] {
        std::vector<Field> t;
        t.push_back(number<std::uint64_t>("seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
        t.push_back(number<int>("archive.population", [](RunConfig& c) -> int& { return c.population; }));
        t.push_back(number<int>("archive.steps", [](RunConfig& c) -> int& { return c.steps; }));
        t.push_back(number<int>("archive.checkpoint_interval", [](RunConfig& c) -> int& { return c.checkpoint_interval; }));
        t.push_back(number<int>("archive.init_attempt_factor", [](RunConfig& c) -> int& { return c.init_attempt_factor; }));
        t.push_back(number<int>("archive.threads", [](RunConfig& c) -> int& { return c.threads; }));
        {
            Field f;
            f.key = "archive.write_meshes";
            f.get = [](const RunConfig& c) { return std::string(c.write_meshes ? "true" : "false"); };
            f.set = [](RunConfig& c, const std::string& v) { c.write_meshes = parse_bool("archive.write_meshes", v); };
            t.push_back(f);
        }
        t.push_back(number<int>("archive.grid", [](RunConfig& c) -> int& { return c.grid; }));
        t.push_back(number<int>("archive.capacity", [](RunConfig& c) -> int& { return c.capacity; }));
        t.push_back(number<double>("archive.complexity_min", [](RunConfig& c) -> double& { return c.ranges.complexity_min; }));
        t.push_back(number<double>("archive.complexity_max", [](RunConfig& c) -> double& { return c.ranges.complexity_max; }));
        t.push_back(number<double>("archive.quality_min", [](RunConfig& c) -> double& { return c.ranges.quality_min; }));
        t.push_back(number<double>("archive.quality_max", [](RunConfig& c) -> double& { return c.ranges.quality_max; }));
        {
            Field f;
            f.key = "archive.parent_sampling";
            f.get = [](const RunConfig& c) { return std::string(c.parent_sampling == ParentSampling::Cell ? "cell" : "occupant"); };
            f.set = [](RunConfig& c, const std::string& v) {
                if (v == "occupant")
                    c.parent_sampling = ParentSampling::Occupant;
                else if (v == "cell")
                    c.parent_sampling = ParentSampling::Cell;
                else
                    throw ConfigError("archive.parent_sampling", "expected occupant or cell, got '" + v + "'");
            };
            t.push_back(f);
        }
        t.push_back(number<int>("similarity.diversity_k", [](RunConfig& c) -> int& { return c.diversity_k; }));
        t.push_back(number<int>("similarity.levels", [](RunConfig& c) -> int& { return c.similarity.levels; }));
        t.push_back(number<int>("similarity.base_count", [](RunConfig& c) -> int& { return c.similarity.base_count; }));
        t.push_back(number<double>("similarity.area_weight", [](RunConfig& c) -> double& { return c.similarity.area_weight; }));

        t.push_back(number<double>("genome.crossover", [](RunConfig& c) -> double& { return c.rates.crossover; }));
        t.push_back(number<double>("genome.node_add", [](RunConfig& c) -> double& { return c.rates.node_add; }));
        t.push_back(number<double>("genome.node_delete", [](RunConfig& c) -> double& { return c.rates.node_delete; }));
        t.push_back(number<double>("genome.connection_add", [](RunConfig& c) -> double& { return c.rates.connection_add; }));
        t.push_back(number<double>("genome.connection_delete", [](RunConfig& c) -> double& { return c.rates.connection_delete; }));
        t.push_back(number<double>("genome.weight_perturb", [](RunConfig& c) -> double& { return c.rates.weight_perturb; }));
        t.push_back(number<double>("genome.weight_replace", [](RunConfig& c) -> double& { return c.rates.weight_replace; }));
        t.push_back(number<double>("genome.weight_stddev", [](RunConfig& c) -> double& { return c.rates.weight_stddev; }));
        t.push_back(number<double>("genome.bias_perturb", [](RunConfig& c) -> double& { return c.rates.bias_perturb; }));
        t.push_back(number<double>("genome.bias_stddev", [](RunConfig& c) -> double& { return c.rates.bias_stddev; }));
        t.push_back(number<double>("genome.activation_swap", [](RunConfig& c) -> double& { return c.rates.activation_swap; }));

        {
            Field f;
            f.key = "morphology.resolution";
            f.get = [](const RunConfig& c) { return std::to_string(c.morphology.resolution[0]); };
            f.set = [](RunConfig& c, const std::string& v) {
                const int n = parse_number<int>("morphology.resolution", v);
                c.morphology.resolution = {n, n, n};
            };
            t.push_back(f);
        }
        t.push_back(number<double>("morphology.threshold", [](RunConfig& c) -> double& { return c.morphology.threshold; }));
        t.push_back(number<int>("morphology.open_radius", [](RunConfig& c) -> int& { return c.morphology.open_radius; }));
        t.push_back(number<int>("morphology.smoothing_iterations", [](RunConfig& c) -> int& { return c.morphology.smoothing.iterations; }));
        t.push_back(number<double>("morphology.smoothing_lambda", [](RunConfig& c) -> double& { return c.morphology.smoothing.lambda; }));
        t.push_back(number<double>("morphology.smoothing_mu", [](RunConfig& c) -> double& { return c.morphology.smoothing.mu; }));

        t.push_back(number<int>("complexity.bins", [](RunConfig& c) -> int& { return c.complexity_bins; }));

        t.push_back(number<double>("grasping.gripper_width", [](RunConfig& c) -> double& { return c.grasping.gripper_width; }));
        t.push_back(number<double>("grasping.scale_fraction", [](RunConfig& c) -> double& { return c.grasping.scale_fraction; }));
        t.push_back(number<int>("grasping.num_grasps", [](RunConfig& c) -> int& { return c.grasping.num_grasps; }));
        t.push_back(number<double>("grasping.friction_mu", [](RunConfig& c) -> double& { return c.grasping.friction; }));
        t.push_back(number<int>("grasping.cone_edges", [](RunConfig& c) -> int& { return c.grasping.cone_edges; }));
        t.push_back(number<double>("grasping.finger_radius", [](RunConfig& c) -> double& { return c.grasping.finger_radius; }));
        t.push_back(number<int>("grasping.attempt_factor", [](RunConfig& c) -> int& { return c.grasping.attempt_factor; }));
        t.push_back(number<int>("grasping.perturbations", [](RunConfig& c) -> int& { return c.grasping.perturbations; }));
        t.push_back(number<double>("grasping.sigma_position", [](RunConfig& c) -> double& { return c.grasping.sigma_position; }));
        t.push_back(number<double>("grasping.sigma_rotation_deg", [](RunConfig& c) -> double& { return c.grasping.sigma_rotation_deg; }));
        t.push_back(number<double>("grasping.sigma_friction", [](RunConfig& c) -> double& { return c.grasping.sigma_friction; }));
        t.push_back(number<double>("grasping.percentile", [](RunConfig& c) -> double& { return c.grasping.percentile; }));
        return t;
    }();
    return table;
}

const Field* find_field(const std::string& key)
{
    for (const auto& f : fields())
        if (f.key == key)
            return &f;
    return nullptr;
}

void require(bool ok, const char* key, const std::string& what)
{
    if (!ok)
        throw ConfigError(key, what);
}

void probability(double p, const char* key)
{
    require(p >= 0.0 && p <= 1.0, key, "must be in [0, 1]");
}

} // namespace

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    for (const auto& f : fields())
        keys.push_back(f.key);
    return keys;
}

RunConfig parse_config(const std::string& text)
{
    RunConfig config;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const Field* field = find_field(key);
        if (!field)
            throw ConfigError(key, "unknown key");
        if (!seen.insert(key).second)
            throw ConfigError(key, "given more than once");
        if (value.empty())
            throw ConfigError(key, "missing value");
        field->set(config, value);
    }
    validate(config);
    return config;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void validate(const RunConfig& c)
{
    require(c.population >= 1, "archive.population", "must be >= 1");
    require(c.steps >= 0, "archive.steps", "must be >= 0");
    require(c.checkpoint_interval >= 1, "archive.checkpoint_interval", "must be >= 1");
    require(c.init_attempt_factor >= 1, "archive.init_attempt_factor", "must be >= 1");
    require(c.threads >= 0, "archive.threads", "must be >= 0");
    require(c.grid >= 1 && c.grid <= 1000, "archive.grid", "must be in [1, 1000]");
    require(c.capacity >= 1, "archive.capacity", "must be >= 1");
    require(c.ranges.complexity_max > c.ranges.complexity_min, "archive.complexity_max", "must exceed archive.complexity_min");
    require(c.ranges.quality_min >= 0.0, "archive.quality_min", "must be >= 0");
    require(c.ranges.quality_max > c.ranges.quality_min, "archive.quality_max", "must exceed archive.quality_min");
    require(c.diversity_k >= 1, "similarity.diversity_k", "must be >= 1");
    require(c.similarity.levels >= 1 && c.similarity.levels <= 12, "similarity.levels", "must be in [1, 12]");
    require(c.similarity.base_count >= 1, "similarity.base_count", "must be >= 1");
    probability(c.similarity.area_weight, "similarity.area_weight");

    probability(c.rates.crossover, "genome.crossover");
    probability(c.rates.node_add, "genome.node_add");
    probability(c.rates.node_delete, "genome.node_delete");
    probability(c.rates.connection_add, "genome.connection_add");
    probability(c.rates.connection_delete, "genome.connection_delete");
    probability(c.rates.weight_perturb, "genome.weight_perturb");
    probability(c.rates.weight_replace, "genome.weight_replace");
    require(c.rates.weight_stddev >= 0.0, "genome.weight_stddev", "must be >= 0");
    probability(c.rates.bias_perturb, "genome.bias_perturb");
    require(c.rates.bias_stddev >= 0.0, "genome.bias_stddev", "must be >= 0");
    probability(c.rates.activation_swap, "genome.activation_swap");

    require(c.morphology.resolution[0] >= 4 && c.morphology.resolution[0] <= 256, "morphology.resolution", "must be in [4, 256]");
    require(c.morphology.open_radius >= 0, "morphology.open_radius", "must be >= 0");
    require(c.morphology.smoothing.iterations >= 0, "morphology.smoothing_iterations", "must be >= 0");
    require(c.morphology.smoothing.lambda > 0.0 && c.morphology.smoothing.lambda < 1.0, "morphology.smoothing_lambda", "must be in (0, 1)");
    require(c.morphology.smoothing.mu < -c.morphology.smoothing.lambda, "morphology.smoothing_mu", "must be below -smoothing_lambda");
    require(c.complexity_bins >= 2, "complexity.bins", "must be >= 2");

    const auto& g = c.grasping;
    require(g.gripper_width > 0.0, "grasping.gripper_width", "must be > 0");
    require(g.scale_fraction > 0.0 && g.scale_fraction <= 1.0, "grasping.scale_fraction", "must be in (0, 1]");
    require(g.num_grasps >= 1, "grasping.num_grasps", "must be >= 1");
    require(g.friction > 0.0, "grasping.friction_mu", "must be > 0");
    require(g.cone_edges >= 3, "grasping.cone_edges", "must be >= 3");
    require(g.finger_radius >= 0.0, "grasping.finger_radius", "must be >= 0");
    require(g.attempt_factor >= 1, "grasping.attempt_factor", "must be >= 1");
    require(g.perturbations >= 1, "grasping.perturbations", "must be >= 1");
    require(g.sigma_position >= 0.0, "grasping.sigma_position", "must be >= 0");
    require(g.sigma_rotation_deg >= 0.0, "grasping.sigma_rotation_deg", "must be >= 0");
    require(g.sigma_friction >= 0.0, "grasping.sigma_friction", "must be >= 0");
    require(g.percentile >= 0.0 && g.percentile <= 100.0, "grasping.percentile", "must be in [0, 100]");
}

std::string echo_config(const RunConfig& config)
{
    std::string out;
    for (const auto& f : fields())
        out += f.key + " = " + f.get(config) + "\n";
    return out;
}

nlohmann::json config_to_json(const RunConfig& config)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& f : fields())
        j[f.key] = f.get(config);
    return j;
}

RunConfig config_from_json(const nlohmann::json& j)
{
    std::string text;
    for (auto it = j.begin(); it != j.end(); ++it)
        text += it.key() + " = " + it.value().get<std::string>() + "\n";
    return parse_config(text);
}

int resolve_threads(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("EGAD_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace egad
