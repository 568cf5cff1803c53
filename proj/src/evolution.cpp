#include "egad/evolution.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "egad/complexity.hpp"
#include "egad/errors.hpp"
#include "egad/grasping.hpp"
#include "egad/mesh_io.hpp"
#include "egad/morphology.hpp"

namespace fs = std::filesystem;

namespace egad {

void parallel_for(int n, int threads, const std::function<void(int)>& fn)
{
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

std::optional<Evaluation> evaluate_genome(const CppnGenome& genome, const RunConfig& config, int generation, int index)
{
    const auto gen = static_cast<std::uint64_t>(generation);
    const auto idx = static_cast<std::uint64_t>(index);
    try {
        Evaluation e;
        auto mesh = std::make_shared<TriMesh>(build_morphology(genome, config.morphology));
        e.complexity = shape_complexity(*mesh, config.complexity_bins);
        const TriMesh scaled = rescale_to_gripper(*mesh, config.grasping.gripper_width, config.grasping.scale_fraction);
        const GraspMetrics m = grasp_metrics(scaled, config.grasping, stream_seed(config.seed, "grasp", gen, idx));
        e.quality = m.quality_percentile;
        e.grasp_count = m.grasp_count;
        Rng rng = stream(config.seed, "signature", gen, idx);
        e.signature = std::make_shared<ReebSignature>(build_signature(*mesh, config.similarity, rng));
        e.mesh = std::move(mesh);
        return e;
    } catch (const RejectIndividual&) {
        return std::nullopt;
    } catch (const StructuralError&) {
        return std::nullopt;
    }
}

void rebuild_shape(Occupant& occupant, const RunConfig& config)
{
    auto mesh = std::make_shared<TriMesh>(build_morphology(occupant.genome, config.morphology));
    Rng rng = stream(config.seed, "signature", static_cast<std::uint64_t>(occupant.generation), static_cast<std::uint64_t>(occupant.index));
    occupant.signature = std::make_shared<ReebSignature>(build_signature(*mesh, config.similarity, rng));
    occupant.mesh = std::move(mesh);
}

std::atomic<bool>& Evolution::stop_requested()
{
    static std::atomic<bool> flag{false};
    return flag;
}

Evolution::Evolution(RunConfig config)
    : config_(std::move(config)),
      archive_(config_.grid, config_.capacity, config_.ranges, config_.diversity_k, config_.similarity.area_weight)
{
    validate(config_);
}

Occupant Evolution::make_occupant(CppnGenome genome, Evaluation eval, int generation, int index)
{
    Occupant o;
    o.id = next_id_++;
    o.generation = generation;
    o.index = index;
    o.genome = std::move(genome);
    o.mesh = std::move(eval.mesh);
    o.signature = std::move(eval.signature);
    o.complexity = eval.complexity;
    o.quality = eval.quality;
    o.grasp_count = eval.grasp_count;
    return o;
}

GenerationReport Evolution::initialize()
{
    if (!archive_.empty())
        throw std::logic_error("initialize: archive already populated");
    const int want = config_.population;
    const int max_attempts = config_.init_attempt_factor * config_.population;
    const int threads = resolve_threads(config_.threads);

    struct Seed {
        int attempt;
        CppnGenome genome;
        Evaluation eval;
    };
    GenerationReport report;
    std::vector<Seed> seeds;
    int attempt = 0;
    while (static_cast<int>(seeds.size()) < want && attempt < max_attempts) {
        const int batch = std::min(want - static_cast<int>(seeds.size()), max_attempts - attempt);
        std::vector<std::optional<CppnGenome>> genomes(static_cast<std::size_t>(batch));
        std::vector<std::optional<Evaluation>> evals(static_cast<std::size_t>(batch));
        parallel_for(batch, threads, [&](int b) {
            const auto i = static_cast<std::size_t>(b);
            Rng rng = stream(config_.seed, "init", static_cast<std::uint64_t>(attempt + b));
            genomes[i] = random_genome(rng);
            evals[i] = evaluate_genome(*genomes[i], config_, 0, attempt + b);
        });
        for (int b = 0; b < batch; ++b) {
            const auto i = static_cast<std::size_t>(b);
            if (evals[i])
                seeds.push_back({attempt + b, std::move(*genomes[i]), std::move(*evals[i])});
            else
                ++report.rejects;
        }
        attempt += batch;
    }
    rejects_ += report.rejects;
    report.offspring = attempt;
    if (seeds.empty())
        throw std::runtime_error("initialize: no random genome produced a usable shape in " + std::to_string(attempt) + " attempts");

    for (auto& s : seeds) {
        const auto outcome = archive_.insert(make_occupant(std::move(s.genome), std::move(s.eval), 0, s.attempt));
        report.inserted += outcome.accepted ? 1 : 0;
        report.evictions += static_cast<int>(outcome.evicted.size());
    }
    report.generation = generation_;
    report.cell_coverage = archive_.cell_coverage();
    report.capacity_coverage = archive_.capacity_coverage();
    return report;
}

GenerationReport Evolution::step()
{
    if (archive_.empty())
        throw std::logic_error("step: archive is empty; initialize first");
    const int gen = generation_ + 1;
    const int n = config_.population;
    std::vector<std::optional<CppnGenome>> children(static_cast<std::size_t>(n));
    std::vector<std::optional<Evaluation>> evals(static_cast<std::size_t>(n));

    // Parents come from the archive as it stood before this generation.
    parallel_for(n, resolve_threads(config_.threads), [&](int i) {
        Rng rng = stream(config_.seed, "offspring", static_cast<std::uint64_t>(gen), static_cast<std::uint64_t>(i));
        CppnGenome child = [&] {
            if (rng.bernoulli(config_.rates.crossover)) {
                const auto p = archive_.sample_parents(2, rng, config_.parent_sampling);
                return mutate(crossover(p[0]->genome, p[1]->genome, rng), config_.rates, rng);
            }
            const auto p = archive_.sample_parents(1, rng, config_.parent_sampling);
            return mutate(p[0]->genome, config_.rates, rng);
        }();
        evals[static_cast<std::size_t>(i)] = evaluate_genome(child, config_, gen, i);
        children[static_cast<std::size_t>(i)] = std::move(child);
    });

    GenerationReport report;
    report.generation = gen;
    report.offspring = n;
    for (int i = 0; i < n; ++i) {
        auto& e = evals[static_cast<std::size_t>(i)];
        if (!e) {
            ++report.rejects;
            continue;
        }
        const auto outcome = archive_.insert(make_occupant(std::move(*children[static_cast<std::size_t>(i)]), std::move(*e), gen, i));
        report.inserted += outcome.accepted ? 1 : 0;
        report.evictions += static_cast<int>(outcome.evicted.size());
    }
    rejects_ += report.rejects;
    generation_ = gen;
    report.cell_coverage = archive_.cell_coverage();
    report.capacity_coverage = archive_.capacity_coverage();
    return report;
}

bool Evolution::run(const std::string& dir, std::optional<int> stop_at, const std::function<void(const GenerationReport&)>& on_step)
{
    fs::create_directories(dir);
    const int last = stop_at ? std::min(*stop_at, config_.steps) : config_.steps;
    if (archive_.empty() && generation_ == 0) {
        const auto report = initialize();
        if (on_step)
            on_step(report);
        checkpoint(dir);
    }
    while (generation_ < last) {
        if (stop_requested().load()) {
            checkpoint(dir);
            return false;
        }
        const auto report = step();
        if (on_step)
            on_step(report);
        if (generation_ % config_.checkpoint_interval == 0)
            checkpoint(dir);
    }
    checkpoint(dir);
    if (generation_ >= config_.steps && config_.write_meshes)
        export_objects(dir);
    return true;
}

namespace {

nlohmann::json occupant_json(const Occupant& o)
{
    return {
        {"id", o.id},
        {"row", o.cell.row},
        {"col", o.cell.col},
        {"complexity", o.complexity},
        {"quality", o.quality},
        {"grasp_count", o.grasp_count},
        {"diversity", o.diversity},
        {"origin", {o.generation, o.index}},
        {"genome", to_json(o.genome)},
    };
}

nlohmann::json stats_json(const CheckpointStats& s)
{
    return {
        {"generation", s.generation},
        {"occupants", s.occupants},
        {"cell_coverage", s.cell_coverage},
        {"capacity_coverage", s.capacity_coverage},
        {"rejects", s.rejects},
        {"violations", s.violations},
    };
}

void write_atomically(const fs::path& path, const std::string& text)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw InputError("cannot write " + tmp.string());
        out << text;
        if (!out)
            throw InputError("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace

nlohmann::json Evolution::manifest() const
{
    nlohmann::json occupants = nlohmann::json::array();
    for (const Occupant* o : archive_.occupants())
        occupants.push_back(occupant_json(*o));
    nlohmann::json history = nlohmann::json::array();
    for (const auto& s : history_)
        history.push_back(stats_json(s));
    return {
        {"format", "egad-archive-1"},
        {"config", config_to_json(config_)},
        {"seed", std::to_string(config_.seed)},
        {"generation", generation_},
        {"next_id", next_id_},
        {"rejects", rejects_},
        {"cell_coverage", archive_.cell_coverage()},
        {"capacity_coverage", archive_.capacity_coverage()},
        {"history", history},
        {"occupants", occupants},
    };
}

void Evolution::checkpoint(const std::string& dir)
{
    archive_.refresh_diversity();
    CheckpointStats s;
    s.generation = generation_;
    s.occupants = archive_.size();
    s.cell_coverage = archive_.cell_coverage();
    s.capacity_coverage = archive_.capacity_coverage();
    s.rejects = rejects_;
    s.violations = archive_.invariant_violations();
    if (!history_.empty() && history_.back().generation == generation_)
        history_.back() = s;
    else
        history_.push_back(s);
    fs::create_directories(dir);
    write_atomically(fs::path(dir) / "manifest.json", manifest().dump(1) + "\n");
}

void Evolution::export_objects(const std::string& dir) const
{
    const fs::path meshes = fs::path(dir) / "meshes";
    const fs::path genomes = fs::path(dir) / "genomes";
    fs::remove_all(meshes);
    fs::remove_all(genomes);
    fs::create_directories(meshes);
    fs::create_directories(genomes);
    for (int r = 0; r < archive_.grid(); ++r)
        for (int c = 0; c < archive_.grid(); ++c) {
            const auto& cell = archive_.cell(r, c);
            for (std::size_t k = 0; k < cell.size(); ++k) {
                const Occupant& o = cell[k];
                const std::string stem = object_stem(o.cell, static_cast<int>(k), archive_.grid());
                TriMesh m = rescale_to_gripper(*o.mesh, config_.grasping.gripper_width, config_.grasping.scale_fraction);
                m.provenance = Provenance{o.id, o.cell.row, o.cell.col};
                write_stl(m, (meshes / (stem + ".stl")).string());
                std::ofstream out(genomes / (stem + ".json"));
                out << occupant_json(o).dump(1) << "\n";
                if (!out)
                    throw InputError("failed writing genome record " + stem);
            }
        }
}

Evolution Evolution::resume(const std::string& dir)
{
    return load(dir, true);
}

Evolution Evolution::load(const std::string& dir, bool rebuild_shapes)
{
    const fs::path path = fs::path(dir) / "manifest.json";
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot read " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    try {
        Evolution evo(config_from_json(j.at("config")));
        evo.generation_ = j.at("generation").get<int>();
        evo.next_id_ = j.at("next_id").get<long long>();
        evo.rejects_ = j.at("rejects").get<long long>();
        for (const auto& h : j.at("history")) {
            CheckpointStats s;
            s.generation = h.at("generation").get<int>();
            s.occupants = h.at("occupants").get<std::size_t>();
            s.cell_coverage = h.at("cell_coverage").get<double>();
            s.capacity_coverage = h.at("capacity_coverage").get<double>();
            s.rejects = h.at("rejects").get<long long>();
            s.violations = h.at("violations").get<int>();
            evo.history_.push_back(s);
        }
        std::vector<Occupant> occupants;
        for (const auto& oj : j.at("occupants")) {
            Occupant o;
            o.id = oj.at("id").get<long long>();
            o.cell = {oj.at("row").get<int>(), oj.at("col").get<int>()};
            o.complexity = oj.at("complexity").get<double>();
            o.quality = oj.at("quality").get<double>();
            o.grasp_count = oj.at("grasp_count").get<int>();
            o.diversity = oj.at("diversity").get<double>();
            o.generation = oj.at("origin").at(0).get<int>();
            o.index = oj.at("origin").at(1).get<int>();
            o.genome = genome_from_json(oj.at("genome"));
            occupants.push_back(std::move(o));
        }
        const RunConfig& cfg = evo.config_;
        if (rebuild_shapes)
            parallel_for(static_cast<int>(occupants.size()), resolve_threads(cfg.threads),
                         [&](int i) { rebuild_shape(occupants[static_cast<std::size_t>(i)], cfg); });
        for (auto& o : occupants)
            evo.archive_.restore(std::move(o));
        return evo;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": malformed manifest: " + e.what());
    }
}

} // namespace egad
