#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "egad/archive.hpp"
#include "egad/complexity.hpp"
#include "egad/config.hpp"
#include "egad/errors.hpp"
#include "egad/evolution.hpp"
#include "egad/grasping.hpp"
#include "egad/mesh_io.hpp"
#include "egad/morphology.hpp"
#include "egad/similarity.hpp"

namespace fs = std::filesystem;
using namespace egad;

namespace {

enum Exit { Ok = 0, ConfigFailure = 2, InputFailure = 3, Partial = 4, Aborted = 5 };

int verbosity = 0;

void on_signal(int) { Evolution::request_stop(); }

void log(int level, const std::string& msg)
{
    if (verbosity >= level)
        std::cerr << msg << '\n';
}

RunConfig load_or_default(const std::string& path)
{
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    validate(c);
    return c;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw InputError("cannot write " + path.string());
    out << text;
    if (!out)
        throw InputError("failed writing " + path.string());
}

// Mesh arguments may be files or directories (scanned for .stl / .obj).
std::vector<std::string> expand_meshes(const std::vector<std::string>& args)
{
    std::vector<std::string> out;
    for (const auto& a : args) {
        if (fs::is_directory(a)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(a)) {
                auto ext = e.path().extension().string();
                for (auto& ch : ext)
                    ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
                if (e.is_regular_file() && (ext == ".stl" || ext == ".obj"))
                    found.push_back(e.path().string());
            }
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(a);
        }
    }
    return out;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + "\"";
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void progress(const GenerationReport& r)
{
    std::ostringstream s;
    s << "generation " << r.generation << ": offspring " << r.offspring << ", rejects " << r.rejects << ", inserted " << r.inserted
      << ", evictions " << r.evictions << ", coverage " << fmt(r.cell_coverage) << " (capacity " << fmt(r.capacity_coverage) << ")";
    log(1, s.str());
}

int finish_run(Evolution& evo, const std::string& out, std::optional<int> stop_at)
{
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const bool done = evo.run(out, stop_at, progress);
    std::cout << "generation " << evo.generation() << ", occupants " << evo.archive().size() << ", coverage "
              << fmt(evo.archive().cell_coverage()) << ", capacity coverage " << fmt(evo.archive().capacity_coverage()) << "\n";
    if (!done) {
        std::cerr << "stopped; resume with: egad resume --out " << out << "\n";
        return Aborted;
    }
    return Ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Evolved grasping analysis dataset generator"};
    app.require_subcommand(1);
    app.add_flag("-v,--verbose", verbosity, "Progress on stderr; repeat for more");

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads, steps, stop_after;

    auto* gen = app.add_subcommand("generate", "Run the archive search from scratch");
    gen->add_option("-c,--config", config_path, "Config file (key = value)")->check(CLI::ExistingFile);
    gen->add_option("-o,--out", out_dir, "Output directory")->required();
    gen->add_option("--seed", seed, "Override the master seed");
    gen->add_option("-j,--threads", threads, "Worker count (default: EGAD_THREADS or all cores)");
    gen->add_option("--steps", steps, "Override the number of evolution steps");
    gen->add_option("--stop-after", stop_after, "Checkpoint and stop after this generation");

    auto* res = app.add_subcommand("resume", "Continue a run from its checkpoint");
    res->add_option("-o,--out", out_dir, "Run directory holding manifest.json")->required();
    res->add_option("-j,--threads", threads, "Worker count");
    res->add_option("--steps", steps, "Extend the run to this many steps");
    res->add_option("--stop-after", stop_after, "Checkpoint and stop after this generation");

    std::vector<std::string> meshes;
    std::string output, matrix_path;
    auto* met = app.add_subcommand("metrics", "Complexity and grasp quality per mesh (CSV)");
    met->add_option("meshes", meshes, "Mesh files or directories")->required();
    met->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
    met->add_option("--seed", seed, "Override the master seed");
    met->add_option("--output", output, "CSV path (default stdout)");
    met->add_option("--distance-matrix", matrix_path, "Also write the pairwise shape distance matrix here");
    met->add_flag("--unscaled", "Use meshes as given instead of rescaling to the gripper");

    auto* sel = app.add_subcommand("select-eval", "Pick the 7x7 evaluation set from a run");
    sel->add_option("-o,--out", out_dir, "Run directory")->required();
    sel->add_option("--output", output, "CSV path (default stdout)");
    sel->add_option("--copy-to", matrix_path, "Copy picked meshes here, named by label");

    double gripper_width = 75.0, fraction = 0.8;
    std::string dest;
    auto* rsc = app.add_subcommand("rescale", "Rescale meshes for a gripper");
    rsc->add_option("meshes", meshes, "Mesh files or directories")->required();
    rsc->add_option("-w,--gripper-width", gripper_width, "Gripper opening in mm")->check(CLI::PositiveNumber);
    rsc->add_option("-f,--fraction", fraction, "Min bounding-box dimension as a fraction of the opening")->check(CLI::Range(1e-9, 1.0));
    rsc->add_option("-d,--dest", dest, "Output directory (default: next to each input)");

    std::string mesh_path;
    double lo = 0.2, hi = 1.6;
    int count = 15;
    auto* swp = app.add_subcommand("scale-sweep", "Grasp quality percentiles against object size (CSV)");
    swp->add_option("mesh", mesh_path, "Mesh file")->required()->check(CLI::ExistingFile);
    swp->add_option("-c,--config", config_path, "Config file")->check(CLI::ExistingFile);
    swp->add_option("--seed", seed, "Override the master seed");
    swp->add_option("--min", lo, "Smallest min-extent / gripper width")->check(CLI::PositiveNumber);
    swp->add_option("--max", hi, "Largest min-extent / gripper width")->check(CLI::PositiveNumber);
    swp->add_option("--count", count, "Number of sizes")->check(CLI::PositiveNumber);
    swp->add_option("--output", output, "CSV path (default stdout)");

    auto* hm = app.add_subcommand("export-heatmap", "Occupancy and diversity grids (CSV)");
    hm->add_option("-o,--out", out_dir, "Run directory")->required();
    hm->add_option("-d,--dest", dest, "Output directory (default: the run directory)");

    auto* val = app.add_subcommand("validate", "Check meshes (and optionally a config)");
    val->add_option("meshes", meshes, "Mesh files or directories");
    val->add_option("-c,--config", config_path, "Config file to validate")->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : ConfigFailure;
    }

    try {
        if (gen->parsed()) {
            RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
            if (seed)
                c.seed = *seed;
            if (threads)
                c.threads = *threads;
            if (steps)
                c.steps = *steps;
            validate(c);
            if (fs::exists(fs::path(out_dir) / "manifest.json"))
                throw InputError(out_dir + " already holds a run; use resume or pick another directory");
            Evolution evo(c);
            return finish_run(evo, out_dir, stop_after);
        }

        if (res->parsed()) {
            Evolution evo = Evolution::resume(out_dir);
            if (threads)
                evo.mutable_config().threads = *threads;
            if (steps)
                evo.mutable_config().steps = *steps;
            validate(evo.config());
            log(1, "resumed at generation " + std::to_string(evo.generation()));
            return finish_run(evo, out_dir, stop_after);
        }

        if (met->parsed()) {
            RunConfig c = load_or_default(config_path);
            if (seed)
                c.seed = *seed;
            const bool unscaled = met->count("--unscaled") > 0;
            const auto paths = expand_meshes(meshes);
            std::string csv = "path,complexity,q75,grasp_count,status\n";
            std::vector<std::string> ok_paths;
            std::vector<ReebSignature> sigs;
            int failures = 0;
            for (std::size_t i = 0; i < paths.size(); ++i) {
                try {
                    TriMesh m = read_mesh(paths[i]);
                    const auto report = egad::validate(m);
                    if (!report.ok())
                        throw InputError("mesh is not a closed manifold");
                    const double h = shape_complexity(m, c.complexity_bins);
                    TriMesh g = unscaled ? m : rescale_to_gripper(m, c.grasping.gripper_width, c.grasping.scale_fraction);
                    const auto gm = grasp_metrics(g, c.grasping, stream_seed(c.seed, "metrics", i));
                    csv += csv_field(paths[i]) + "," + fmt(h) + "," + fmt(gm.quality_percentile) + "," + std::to_string(gm.grasp_count) + ",ok\n";
                    if (!matrix_path.empty()) {
                        Rng rng = stream(c.seed, "signature", 0, i);
                        sigs.push_back(build_signature(m, c.similarity, rng));
                        ok_paths.push_back(paths[i]);
                    }
                } catch (const std::exception& e) {
                    ++failures;
                    csv += csv_field(paths[i]) + ",,,," + csv_field(std::string("error: ") + e.what()) + "\n";
                }
            }
            if (output.empty())
                std::cout << csv;
            else
                write_text(output, csv);
            if (!matrix_path.empty()) {
                std::string m = "path";
                for (const auto& p : ok_paths)
                    m += "," + csv_field(p);
                m += "\n";
                for (std::size_t i = 0; i < sigs.size(); ++i) {
                    m += csv_field(ok_paths[i]);
                    for (std::size_t j = 0; j < sigs.size(); ++j)
                        m += "," + fmt(dist(sigs[i], sigs[j], c.similarity.area_weight));
                    m += "\n";
                }
                write_text(matrix_path, m);
            }
            return failures ? Partial : Ok;
        }

        if (sel->parsed()) {
            Evolution evo = Evolution::resume(out_dir);
            const auto picks = select_eval_set(evo.archive());
            std::string csv = "label,status,id,row,col,complexity,q75,diversity\n";
            std::vector<const Occupant*> chosen;
            for (const auto& p : picks) {
                if (!p.occupant) {
                    csv += p.label + ",vacant,,,,,,\n";
                    continue;
                }
                const Occupant& o = *p.occupant;
                chosen.push_back(&o);
                csv += p.label + ",ok," + std::to_string(o.id) + "," + std::to_string(o.cell.row) + "," + std::to_string(o.cell.col) + "," +
                       fmt(o.complexity) + "," + fmt(o.quality) + "," + fmt(o.diversity) + "\n";
                if (!matrix_path.empty()) {
                    fs::create_directories(matrix_path);
                    const auto& g = evo.config().grasping;
                    write_stl(rescale_to_gripper(*o.mesh, g.gripper_width, g.scale_fraction), (fs::path(matrix_path) / (p.label + ".stl")).string());
                }
            }
            if (output.empty())
                std::cout << csv;
            else
                write_text(output, csv);
            if (chosen.size() > 1)
                log(1, "minimum pairwise distance " + fmt(min_pairwise_distance(evo.archive(), chosen)));
            return Ok;
        }

        if (rsc->parsed()) {
            int failures = 0;
            char suffix[32];
            std::snprintf(suffix, sizeof suffix, "_w%g", gripper_width);
            for (const auto& p : expand_meshes(meshes)) {
                try {
                    const TriMesh m = rescale_to_gripper(read_mesh(p), gripper_width, fraction);
                    const fs::path src(p);
                    const fs::path dir = dest.empty() ? src.parent_path() : fs::path(dest);
                    if (!dir.empty())
                        fs::create_directories(dir);
                    const fs::path target = dir / (src.stem().string() + suffix + src.extension().string());
                    write_mesh(m, target.string());
                    std::cout << csv_field(p) << "," << csv_field(target.string()) << ",ok\n";
                } catch (const std::exception& e) {
                    ++failures;
                    std::cout << csv_field(p) << ",," << csv_field(std::string("error: ") + e.what()) << "\n";
                }
            }
            return failures ? Partial : Ok;
        }

        if (swp->parsed()) {
            RunConfig c = load_or_default(config_path);
            if (seed)
                c.seed = *seed;
            if (!(hi >= lo))
                throw ConfigError("--max", "must be at least --min");
            std::vector<double> scales;
            for (int i = 0; i < count; ++i)
                scales.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
            const TriMesh m = read_mesh(mesh_path);
            const auto pts = quality_vs_scale_sweep(m, scales, c.grasping, stream_seed(c.seed, "sweep"));
            const std::string csv = scale_sweep_csv(pts, c.grasping.gripper_width);
            if (output.empty())
                std::cout << csv;
            else
                write_text(output, csv);
            return Ok;
        }

        if (hm->parsed()) {
            const Evolution evo = Evolution::load(out_dir, false);
            const fs::path d = dest.empty() ? fs::path(out_dir) : fs::path(dest);
            fs::create_directories(d);
            write_text(d / "heatmap_counts.csv", heatmap_counts_csv(evo.archive()));
            write_text(d / "heatmap_diversity.csv", heatmap_diversity_csv(evo.archive()));
            std::cout << (d / "heatmap_counts.csv").string() << "\n" << (d / "heatmap_diversity.csv").string() << "\n";
            return Ok;
        }

        if (val->parsed()) {
            if (!config_path.empty()) {
                validate(load_config(config_path));
                std::cout << csv_field(config_path) << ",config ok\n";
            }
            int failures = 0;
            if (!meshes.empty())
                std::cout << "path,watertight,manifold,components,degenerate_faces,volume,status\n";
            for (const auto& p : expand_meshes(meshes)) {
                try {
                    const auto r = egad::validate(read_mesh(p));
                    failures += r.ok() ? 0 : 1;
                    std::cout << csv_field(p) << "," << r.watertight << "," << r.manifold << "," << r.components << "," << r.degenerate_faces << ","
                              << fmt(r.volume) << "," << (r.ok() ? "ok" : "invalid") << "\n";
                } catch (const std::exception& e) {
                    ++failures;
                    std::cout << csv_field(p) << ",,,,,," << csv_field(std::string("error: ") + e.what()) << "\n";
                }
            }
            return failures ? Partial : Ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ConfigFailure;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return InputFailure;
    } catch (const std::exception& e) {
        std::cerr << "aborted: " << e.what() << "\n";
        return Aborted;
    }
    return Ok;
}
