#include "cli.hpp"

#include "distbrush/error.hpp"
#include "distbrush/metrics.hpp"
#include "distbrush/serialize.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

namespace distbrush::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string dataset;
    std::string projection;
    std::string trajectory;
    std::string labels;
    std::string out;
    std::string cacheDir;
    std::size_t k = 10;
    std::size_t kEval = 20;
    double proportion = 0.0;
    std::uint64_t seed = 0;
    /// Session parameters given explicitly (config file, then flags).
    json session = json::object();
};

// Flags whose values land in RunConfig::session under the same key.
struct SessionFlag {
    const char* flag;
    const char* key;
    const char* help;
};

constexpr SessionFlag kSessionFlags[] = {
    {"--theta-in", "thetaIn", "similarity cutoff in [0,1)"},
    {"--theta-out", "thetaOut", "closeness threshold in [0,1]"},
    {"--margin", "marginFraction", "outer margin as a fraction of the inner diameter"},
    {"--alpha", "alphaFraction", "contour level as a fraction of the density maximum"},
    {"--grid", "gridResolution", "density grid resolution"},
    {"--bandwidth", "bandwidthFactor", "KDE bandwidth as a fraction of the brush diagonal"},
    {"--pause", "pauseThresholdMs", "pause threshold in milliseconds"},
};

void load_config_file(const std::string& path, RunConfig& rc) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "dataset") {
                rc.dataset = value.get<std::string>();
            } else if (key == "projection") {
                rc.projection = value.get<std::string>();
            } else if (key == "out") {
                rc.out = value.get<std::string>();
            } else if (key == "cacheDir") {
                rc.cacheDir = value.get<std::string>();
            } else if (key == "k") {
                rc.k = value.get<std::size_t>();
            } else if (key == "kEval") {
                rc.kEval = value.get<std::size_t>();
            } else if (key == "seed") {
                rc.seed = value.get<std::uint64_t>();
            } else if (key == "session") {
                if (!value.is_object()) {
                    throw ParameterError("config 'session' must be an object");
                }
                rc.session.update(value);
            } else {
                throw ParameterError("unknown config key '" + key + "'");
            }
        } catch (const json::exception& e) {
            throw ParameterError("config key '" + key + "': " + e.what());
        }
    }
}

std::string dataset_hash(const Dataset& data) { return hex64(content_hash(dataset_to_csv(data))); }

fs::path cache_path(const fs::path& dir, const std::string& hash, std::size_t k) {
    return dir / ("snn_" + hash + "_k" + std::to_string(k) + ".json");
}

void require(const std::string& value, const char* what) {
    if (value.empty()) {
        throw ParameterError(std::string("missing required ") + what);
    }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

std::shared_ptr<const SnnModel> obtain_model(const Dataset& data, const RunConfig& rc, std::ostream& out) {
    const std::string hash = dataset_hash(data);
    if (!rc.cacheDir.empty()) {
        const fs::path p = cache_path(rc.cacheDir, hash, rc.k);
        if (fs::exists(p)) {
            json j;
            try {
                j = json::parse(read_file(p));
            } catch (const json::exception& e) {
                throw ParseError("cache " + p.string() + ": " + e.what());
            }
            out << "using cache " << p.string() << "\n";
            return std::make_shared<const SnnModel>(model_from_cache(j, data.size(), rc.k));
        }
    }
    return std::make_shared<const SnnModel>(build_snn_model(build_knn(data, rc.k)));
}

int cmd_precompute(const RunConfig& rc, std::ostream& out) {
    require(rc.dataset, "--dataset");
    const std::string dir = rc.cacheDir.empty() ? rc.out : rc.cacheDir;
    require(dir, "--out or --cache-dir");
    const Dataset data = load_dataset(rc.dataset);
    const std::string hash = dataset_hash(data);
    const fs::path target = cache_path(dir, hash, rc.k);
    if (fs::exists(target)) {
        try {
            const json j = json::parse(read_file(target));
            if (j.value("datasetHash", std::string{}) == hash && j.value("k", std::size_t{0}) == rc.k) {
                out << "cache hit " << target.string() << "\n";
                return kOk;
            }
        } catch (const json::exception&) {
            // unreadable cache is rebuilt below
        }
    }
    const KnnIndex index = build_knn(data, rc.k);
    const SnnModel model = build_snn_model(index);
    fs::create_directories(dir);
    write_file_atomic(target, model_cache_to_json(index, model, hash).dump() + "\n");
    out << "wrote " << target.string() << " (" << model.nonzeros() << " nonzero similarities)\n";
    return kOk;
}

json scores_json(const ClusteringScores& s) {
    return json{{"ami", s.ami},
                {"arand", s.arand},
                {"vmeasure", s.vmeasure},
                {"homogeneity", s.homogeneity},
                {"completeness", s.completeness},
                {"unassignedFraction", s.unassignedFraction},
                {"amiNormalization", "max"}};
}

int cmd_replay(const RunConfig& rc, std::ostream& out) {
    require(rc.dataset, "--dataset");
    require(rc.projection, "--projection");
    require(rc.trajectory, "--trajectory");
    require(rc.out, "--out");
    const Dataset data = load_dataset(rc.dataset);
    const Projection proj = load_projection(rc.projection);
    const std::string trajText = read_file(rc.trajectory);
    const Trajectory traj = parse_trajectory(trajText);

    SessionConfig config;
    apply_session_overrides(traj.params, config);
    apply_session_overrides(rc.session, config);

    auto model = obtain_model(data, rc, out);
    Session session(data, proj, model, config);
    for (std::size_t i = 0; i < traj.events.size(); ++i) {
        const EventResult r = session.handle(traj.events[i].event);
        if (r.status == EventStatus::Rejected) {
            throw TrajectoryError(i, std::string(event_name(traj.events[i].event)) + " rejected: " + r.reason);
        }
    }

    const fs::path dir = rc.out;
    fs::create_directories(dir);
    const std::vector<int> labels = session.export_labels();
    const std::string labelsText = dump(labels_to_json(labels));
    const std::string snapshotText = dump(snapshot_to_json(session));
    write_file_atomic(dir / "labels.json", labelsText);
    write_file_atomic(dir / "snapshot.json", snapshotText);

    json manifest{{"tool", "distbrush"},
                  {"version", kVersion},
                  {"command", "replay"},
                  {"k", rc.k},
                  {"session", session_config_to_json(config)},
                  {"inputs",
                   {{"dataset", dataset_hash(data)},
                    {"projection", hex64(content_hash(projection_to_csv(proj)))},
                    {"trajectory", hex64(content_hash(trajText))}}},
                  {"outputs", {{"labels.json", hex64(content_hash(labelsText))}, {"snapshot.json", hex64(content_hash(snapshotText))}}}};
    if (data.has_labels()) {
        const ClusteringScores s = clustering_scores(labels, *data.labels());
        const std::string scoresText = dump(scores_json(s));
        write_file_atomic(dir / "scores.json", scoresText);
        manifest["outputs"]["scores.json"] = hex64(content_hash(scoresText));
        out << "ami " << format_double(s.ami) << " arand " << format_double(s.arand) << " vmeasure "
            << format_double(s.vmeasure) << " unassigned " << format_double(s.unassignedFraction) << "\n";
    }
    write_file_atomic(dir / "manifest.json", dump(manifest));
    out << "replayed " << traj.events.size() << " events into " << dir.string() << "\n";
    return kOk;
}

int cmd_distort(const RunConfig& rc, std::ostream& out) {
    require(rc.projection, "--projection");
    require(rc.out, "--out");
    if (!(rc.proportion >= 0.0 && rc.proportion <= 1.0)) {
        throw ParameterError("--proportion must lie in [0, 1]");
    }
    const Projection proj = load_projection(rc.projection);
    Projection result{distort_projection(proj.positions, rc.proportion, rc.seed)};
    fs::path target = rc.out;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    save_projection(result, target);
    out << "wrote " << target.string() << "\n";
    return kOk;
}

int cmd_metrics(const RunConfig& rc, std::ostream& out) {
    require(rc.dataset, "--dataset");
    require(rc.projection, "--projection");
    require(rc.out, "--out");
    const Dataset data = load_dataset(rc.dataset);
    const Projection proj = load_projection(rc.projection);
    if (proj.size() != data.size()) {
        throw AlignmentError("projection and dataset differ in row count");
    }
    const QualityScores q = trust_continuity(data, proj.positions, rc.kEval);
    json result{{"trustworthiness", q.trustworthiness}, {"continuity", q.continuity}, {"kEval", q.kEval}};
    if (!rc.labels.empty()) {
        json lj;
        try {
            lj = json::parse(read_file(rc.labels));
        } catch (const json::exception& e) {
            throw ParseError("labels " + rc.labels + ": " + e.what());
        }
        const std::vector<int> predicted = labels_from_json(lj);
        if (predicted.size() != data.size()) {
            throw ValidationError("labels and dataset differ in length");
        }
        if (data.has_labels()) {
            result["clustering"] = scores_json(clustering_scores(predicted, *data.labels()));
        }
        const auto distinct = [&] {
            std::vector<int> v;
            for (int l : predicted) {
                if (l != -1) {
                    v.push_back(l);
                }
            }
            std::sort(v.begin(), v.end());
            return std::unique(v.begin(), v.end()) - v.begin();
        }();
        if (distinct >= 2) {
            result["silhouette2d"] = silhouette(proj.positions, predicted);
        }
    }
    if (data.has_labels()) {
        result["silhouetteMD"] = silhouette(data, *data.labels());
    }
    fs::path target = rc.out;
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    write_file_atomic(target, dump(result));
    out << "T " << format_double(q.trustworthiness) << " C " << format_double(q.continuity) << "\n";
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"distortion-aware brushing engine", "distbrush"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunConfig rc;
    std::string configPath;
    std::map<std::string, double> flagValues;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", configPath, "JSON run configuration");
        sub->add_option("--dataset", rc.dataset, "dataset file (.csv or .json)");
        sub->add_option("--k", rc.k, "neighbors per point");
        sub->add_option("--out", rc.out, "output path");
        sub->add_option("--cache-dir", rc.cacheDir, "similarity cache directory");
    };
    auto session_flags = [&](CLI::App* sub) {
        for (const SessionFlag& f : kSessionFlags) {
            sub->add_option_function<double>(
                f.flag, [&flagValues, key = std::string(f.key)](double v) { flagValues[key] = v; }, f.help);
        }
    };

    CLI::App* pre = app.add_subcommand("precompute", "build and cache the kNN and similarity tables");
    common(pre);

    CLI::App* rep = app.add_subcommand("replay", "replay a recorded trajectory and export labels");
    common(rep);
    session_flags(rep);
    rep->add_option("--projection", rc.projection, "projection CSV (x,y)");
    rep->add_option("--trajectory", rc.trajectory, "trajectory JSON");

    CLI::App* dis = app.add_subcommand("distort", "relocate a random share of points");
    dis->add_option("--config", configPath, "JSON run configuration");
    dis->add_option("--projection", rc.projection, "projection CSV (x,y)");
    dis->add_option("--proportion", rc.proportion, "share of points to resample, in [0,1]")->required();
    dis->add_option("--seed", rc.seed, "random seed");
    dis->add_option("--out", rc.out, "output projection CSV");

    CLI::App* met = app.add_subcommand("metrics", "projection quality and clustering scores");
    common(met);
    met->add_option("--projection", rc.projection, "projection CSV (x,y)");
    met->add_option("--labels", rc.labels, "labels JSON");
    met->add_option("--k-eval", rc.kEval, "neighbors for trustworthiness and continuity");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }

    try {
        if (!configPath.empty()) {
            // Flags win over the file: re-apply what the command line set.
            RunConfig flags = rc;
            load_config_file(configPath, rc);
            CLI::App* sub = app.get_subcommands().front();
            const auto given = [&](const char* name) {
                const CLI::Option* opt = sub->get_option_no_throw(name);
                return opt != nullptr && opt->count() > 0;
            };
            if (given("--dataset")) rc.dataset = flags.dataset;
            if (given("--projection")) rc.projection = flags.projection;
            if (given("--out")) rc.out = flags.out;
            if (given("--cache-dir")) rc.cacheDir = flags.cacheDir;
            if (given("--k")) rc.k = flags.k;
            if (given("--k-eval")) rc.kEval = flags.kEval;
            if (given("--seed")) rc.seed = flags.seed;
        }
        for (const auto& [key, value] : flagValues) {
            rc.session[key] = value;
        }
        if (!rc.session.empty()) {
            SessionConfig probe;
            apply_session_overrides(rc.session, probe);
        }

        if (pre->parsed()) {
            return cmd_precompute(rc, out);
        }
        if (rep->parsed()) {
            return cmd_replay(rc, out);
        }
        if (dis->parsed()) {
            return cmd_distort(rc, out);
        }
        return cmd_metrics(rc, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const DimensionError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const AlignmentError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const TrajectoryError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

} // namespace distbrush::cli
