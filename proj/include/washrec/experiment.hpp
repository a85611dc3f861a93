#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "washrec/core.hpp"
#include "washrec/cross_validation.hpp"
#include "washrec/gaf.hpp"
#include "washrec/perf.hpp"
#include "washrec/report_io.hpp"
#include "washrec/selection.hpp"
#include "washrec/synth.hpp"
#include "washrec/trace.hpp"
#include "washrec/windowing.hpp"

namespace washrec {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kWorkersEnvVar = "WASHREC_WORKERS";

// Declarative description of one experiment: dataset source, task variant,
// windowing, features, models, cross-validation and output location.
struct ExperimentConfig {
    // dataset: either directories of trace/annotation CSVs or a synth spec
    std::string traces_dir;
    std::string annotations_dir;
    std::optional<std::string> calibration_file;
    std::optional<SynthSpec> synth;

    enum class Task { activity, subject } task = Task::activity;

    std::vector<double> window_s_list = {8.0};
    double overlap_frac = 0.75;
    LabelRule label_rule = LabelRule::majority;

    bool undersample_enabled = true;
    std::uint64_t undersample_seed = 1;
    bool per_fold_undersample = false;

    FeatureGroupSelection groups;
    std::optional<bool> standardize;
    bool hjorth_scaled_derivative = true;

    std::vector<ModelSpec::Type> models = {ModelSpec::Type::svm, ModelSpec::Type::ersknn};
    SvmParams svm;
    ErsKnnParams ersknn;

    int k = 5;
    FoldStrategy strategy = FoldStrategy::stratified_window;
    std::uint64_t fold_seed = 7;

    SelectionConfig::Objective selection_objective = SelectionConfig::Objective::accuracy;
    bool selection_exhaustive = true;

    std::size_t gaf_target_len = 64;

    std::string output_dir = "out";
    int workers = 0;  // 0: use WASHREC_WORKERS or hardware concurrency

    ModelSpec model_spec(ModelSpec::Type type) const {
        ModelSpec spec;
        spec.type = type;
        spec.svm = svm;
        spec.ersknn = ersknn;
        spec.standardize = standardize;
        return spec;
    }

    CvConfig cv_config() const {
        CvConfig cfg;
        cfg.k = k;
        cfg.strategy = strategy;
        cfg.fold_seed = fold_seed;
        cfg.per_fold_undersample = per_fold_undersample;
        cfg.undersample_seed = undersample_seed;
        return cfg;
    }

    int effective_workers() const {
        if (workers > 0) return workers;
        if (const char* env = std::getenv(kWorkersEnvVar)) {
            const int w = std::atoi(env);
            if (w > 0) return w;
        }
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1 : static_cast<int>(hc);
    }
};

namespace cfgio {

inline void require_keys(const nlohmann::json& j, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
}

inline SynthSpec synth_from_json(const nlohmann::json& j) {
    if (j.contains("preset")) {
        require_keys(j, {"preset", "minutes", "seed", "noise_sigma"}, "dataset.synth");
        if (j.at("preset") != "three-class")
            throw ConfigError("unknown synth preset '" + j.at("preset").get<std::string>() + "'");
        return three_class_spec(j.value("minutes", 30.0), j.value("seed", std::uint64_t{42}),
                                j.value("noise_sigma", 0.1));
    }
    require_keys(j, {"sample_rate_hz", "seed", "subject_id", "channels", "classes", "plan"},
                 "dataset.synth");
    SynthSpec spec;
    spec.sample_rate_hz = j.value("sample_rate_hz", 100.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    spec.subject_id = j.value("subject_id", std::string("synth"));
    if (j.contains("channels"))
        spec.channel_names = j.at("channels").get<std::vector<std::string>>();
    for (const auto& cj : j.at("classes")) {
        require_keys(cj, {"label", "channels"}, "synth class");
        ClassRecipe c;
        c.label = cj.at("label").get<std::string>();
        for (const auto& chj : cj.at("channels")) {
            require_keys(chj, {"sinusoids", "noise_sigma"}, "synth channel");
            ChannelRecipe ch;
            ch.noise_sigma = chj.value("noise_sigma", 0.0);
            if (chj.contains("sinusoids"))
                for (const auto& sj : chj.at("sinusoids"))
                    ch.sinusoids.push_back({sj.value("amplitude", 1.0),
                                            sj.value("frequency_hz", 1.0),
                                            sj.value("phase", 0.0)});
            c.channels.push_back(std::move(ch));
        }
        spec.classes.push_back(std::move(c));
    }
    for (const auto& pj : j.at("plan")) {
        if (!pj.is_array() || pj.size() != 2)
            throw ConfigError("plan entries must be [label, duration_s] pairs");
        spec.plan.push_back({pj.at(0).get<std::string>(), pj.at(1).get<double>()});
    }
    return spec;
}

inline nlohmann::json synth_to_json(const SynthSpec& s) {
    nlohmann::json j;
    j["sample_rate_hz"] = s.sample_rate_hz;
    j["seed"] = s.seed;
    j["subject_id"] = s.subject_id;
    j["channels"] = s.channel_names;
    j["classes"] = nlohmann::json::array();
    for (const auto& c : s.classes) {
        nlohmann::json cj;
        cj["label"] = c.label;
        cj["channels"] = nlohmann::json::array();
        for (const auto& ch : c.channels) {
            nlohmann::json chj;
            chj["noise_sigma"] = ch.noise_sigma;
            chj["sinusoids"] = nlohmann::json::array();
            for (const auto& sin : ch.sinusoids)
                chj["sinusoids"].push_back({{"amplitude", sin.amplitude},
                                            {"frequency_hz", sin.frequency_hz},
                                            {"phase", sin.phase}});
            cj["channels"].push_back(std::move(chj));
        }
        j["classes"].push_back(std::move(cj));
    }
    j["plan"] = nlohmann::json::array();
    for (const auto& p : s.plan) j["plan"].push_back({p.label, p.duration_s});
    return j;
}

}  // namespace cfgio

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    try {
        cfgio::require_keys(j,
                            {"dataset", "task", "windowing", "undersample", "features", "models",
                             "model", "svm", "ersknn", "cv", "selection", "gaf", "output_dir",
                             "workers"},
                            "config");
        ExperimentConfig cfg;
        if (j.contains("dataset")) {
            const auto& d = j.at("dataset");
            cfgio::require_keys(d, {"traces_dir", "annotations_dir", "calibration_file", "synth"},
                                "dataset");
            cfg.traces_dir = d.value("traces_dir", std::string());
            cfg.annotations_dir = d.value("annotations_dir", std::string());
            if (d.contains("calibration_file"))
                cfg.calibration_file = d.at("calibration_file").get<std::string>();
            if (d.contains("synth")) cfg.synth = cfgio::synth_from_json(d.at("synth"));
        }
        if (j.contains("task")) {
            const auto task = j.at("task").get<std::string>();
            if (task == "activity") cfg.task = ExperimentConfig::Task::activity;
            else if (task == "subject") cfg.task = ExperimentConfig::Task::subject;
            else throw ConfigError("task must be 'activity' or 'subject'");
        }
        if (j.contains("windowing")) {
            const auto& w = j.at("windowing");
            cfgio::require_keys(w, {"window_s", "overlap_frac", "label_rule"}, "windowing");
            if (w.contains("window_s")) {
                cfg.window_s_list.clear();
                if (w.at("window_s").is_array())
                    cfg.window_s_list = w.at("window_s").get<std::vector<double>>();
                else cfg.window_s_list.push_back(w.at("window_s").get<double>());
            }
            cfg.overlap_frac = w.value("overlap_frac", 0.75);
            if (w.contains("label_rule")) {
                const auto rule = w.at("label_rule").get<std::string>();
                if (rule == "majority") cfg.label_rule = LabelRule::majority;
                else if (rule == "full-containment") cfg.label_rule = LabelRule::full_containment;
                else throw ConfigError("label_rule must be 'majority' or 'full-containment'");
            }
        }
        if (j.contains("undersample")) {
            const auto& u = j.at("undersample");
            cfgio::require_keys(u, {"enabled", "seed", "per_fold"}, "undersample");
            cfg.undersample_enabled = u.value("enabled", true);
            cfg.undersample_seed = u.value("seed", std::uint64_t{1});
            cfg.per_fold_undersample = u.value("per_fold", false);
        }
        if (j.contains("features")) {
            const auto& f = j.at("features");
            cfgio::require_keys(
                f, {"base", "hjorth", "shape", "standardize", "hjorth_scaled_derivative"},
                "features");
            cfg.groups.base = f.value("base", true);
            cfg.groups.hjorth = f.value("hjorth", true);
            cfg.groups.shape = f.value("shape", true);
            if (!cfg.groups.any()) throw ConfigError("at least one feature group must be enabled");
            if (f.contains("standardize") && !f.at("standardize").is_null())
                cfg.standardize = f.at("standardize").get<bool>();
            cfg.hjorth_scaled_derivative = f.value("hjorth_scaled_derivative", true);
        }
        const auto parse_model = [](const std::string& name) {
            if (name == "svm") return ModelSpec::Type::svm;
            if (name == "ersknn") return ModelSpec::Type::ersknn;
            throw ConfigError("model must be 'svm' or 'ersknn'");
        };
        if (j.contains("models")) {
            cfg.models.clear();
            for (const auto& m : j.at("models"))
                cfg.models.push_back(parse_model(m.get<std::string>()));
        } else if (j.contains("model")) {
            cfg.models = {parse_model(j.at("model").get<std::string>())};
        }
        if (cfg.models.empty()) throw ConfigError("no models configured");
        if (j.contains("svm")) {
            const auto& s = j.at("svm");
            cfgio::require_keys(s, {"gamma", "coef0", "C", "tol", "max_passes"}, "svm");
            if (s.contains("gamma") && !s.at("gamma").is_null())
                cfg.svm.gamma = s.at("gamma").get<double>();
            cfg.svm.coef0 = s.value("coef0", 1.0);
            cfg.svm.C = s.value("C", 1.0);
            cfg.svm.tol = s.value("tol", 1e-3);
            cfg.svm.max_passes = s.value("max_passes", 1000);
        }
        if (j.contains("ersknn")) {
            const auto& e = j.at("ersknn");
            cfgio::require_keys(e, {"n_learners", "subspace_dim", "k_neighbors", "seed"},
                                "ersknn");
            cfg.ersknn.n_learners = e.value("n_learners", 30);
            if (e.contains("subspace_dim") && !e.at("subspace_dim").is_null())
                cfg.ersknn.subspace_dim = e.at("subspace_dim").get<std::size_t>();
            cfg.ersknn.k_neighbors = e.value("k_neighbors", 1);
            cfg.ersknn.seed = e.value("seed", std::uint64_t{0});
        }
        if (j.contains("cv")) {
            const auto& c = j.at("cv");
            cfgio::require_keys(c, {"k", "strategy", "seed"}, "cv");
            cfg.k = c.value("k", 5);
            if (c.contains("strategy")) {
                const auto s = c.at("strategy").get<std::string>();
                if (s == "stratified-window") cfg.strategy = FoldStrategy::stratified_window;
                else if (s == "subject-holdout") cfg.strategy = FoldStrategy::subject_holdout;
                else throw ConfigError("strategy must be 'stratified-window' or 'subject-holdout'");
            }
            cfg.fold_seed = c.value("seed", std::uint64_t{7});
        }
        if (j.contains("selection")) {
            const auto& s = j.at("selection");
            cfgio::require_keys(s, {"objective", "exhaustive"}, "selection");
            if (s.contains("objective")) {
                const auto o = s.at("objective").get<std::string>();
                if (o == "accuracy")
                    cfg.selection_objective = SelectionConfig::Objective::accuracy;
                else if (o == "overall_accuracy")
                    cfg.selection_objective = SelectionConfig::Objective::overall_accuracy;
                else throw ConfigError("selection objective must be 'accuracy' or 'overall_accuracy'");
            }
            cfg.selection_exhaustive = s.value("exhaustive", true);
        }
        if (j.contains("gaf")) {
            cfgio::require_keys(j.at("gaf"), {"target_len"}, "gaf");
            cfg.gaf_target_len = j.at("gaf").value("target_len", std::size_t{64});
        }
        cfg.output_dir = j.value("output_dir", std::string("out"));
        cfg.workers = j.value("workers", 0);

        if (!cfg.synth && cfg.traces_dir.empty())
            throw ConfigError("dataset needs either traces_dir or synth");
        if (cfg.window_s_list.empty()) throw ConfigError("window_s list is empty");
        if (cfg.k < 2) throw ConfigError("cv.k must be >= 2");
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    return experiment_config_from_json(j);
}

// Canonical snapshot used for the provenance hash and the manifest.
inline nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["dataset"]["traces_dir"] = cfg.traces_dir;
    j["dataset"]["annotations_dir"] = cfg.annotations_dir;
    if (cfg.calibration_file) j["dataset"]["calibration_file"] = *cfg.calibration_file;
    if (cfg.synth) j["dataset"]["synth"] = cfgio::synth_to_json(*cfg.synth);
    j["task"] = cfg.task == ExperimentConfig::Task::activity ? "activity" : "subject";
    j["windowing"]["window_s"] = cfg.window_s_list;
    j["windowing"]["overlap_frac"] = cfg.overlap_frac;
    j["windowing"]["label_rule"] =
        cfg.label_rule == LabelRule::majority ? "majority" : "full-containment";
    j["undersample"]["enabled"] = cfg.undersample_enabled;
    j["undersample"]["seed"] = cfg.undersample_seed;
    j["undersample"]["per_fold"] = cfg.per_fold_undersample;
    j["features"]["base"] = cfg.groups.base;
    j["features"]["hjorth"] = cfg.groups.hjorth;
    j["features"]["shape"] = cfg.groups.shape;
    if (cfg.standardize) j["features"]["standardize"] = *cfg.standardize;
    j["features"]["hjorth_scaled_derivative"] = cfg.hjorth_scaled_derivative;
    j["models"] = nlohmann::json::array();
    for (const auto m : cfg.models)
        j["models"].push_back(m == ModelSpec::Type::svm ? "svm" : "ersknn");
    if (cfg.svm.gamma) j["svm"]["gamma"] = *cfg.svm.gamma;
    j["svm"]["coef0"] = cfg.svm.coef0;
    j["svm"]["C"] = cfg.svm.C;
    j["svm"]["tol"] = cfg.svm.tol;
    j["svm"]["max_passes"] = cfg.svm.max_passes;
    j["ersknn"]["n_learners"] = cfg.ersknn.n_learners;
    if (cfg.ersknn.subspace_dim) j["ersknn"]["subspace_dim"] = *cfg.ersknn.subspace_dim;
    j["ersknn"]["k_neighbors"] = cfg.ersknn.k_neighbors;
    j["ersknn"]["seed"] = cfg.ersknn.seed;
    j["cv"]["k"] = cfg.k;
    j["cv"]["strategy"] =
        cfg.strategy == FoldStrategy::stratified_window ? "stratified-window" : "subject-holdout";
    j["cv"]["seed"] = cfg.fold_seed;
    j["gaf"]["target_len"] = cfg.gaf_target_len;
    j["output_dir"] = cfg.output_dir;
    return j;
}

// Loads every trace in traces_dir (sorted by filename), applies optional
// calibration and attaches annotations from the file of the same stem.
// Subject id is the stem up to a double underscore, so s0__day1.csv and
// s0__day2.csv belong to one subject.
inline std::vector<LabeledTrace> load_dataset(const ExperimentConfig& cfg) {
    if (cfg.synth) {
        const SynthResult r = gen_synthetic_dataset(*cfg.synth);
        return {r.labeled};
    }

    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(cfg.traces_dir))
        throw Error("traces_dir '" + cfg.traces_dir + "' is not a directory");
    for (const auto& entry : std::filesystem::directory_iterator(cfg.traces_dir))
        if (entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no trace CSVs in " + cfg.traces_dir);

    std::optional<SensorTrace> calib;

    std::vector<LabeledTrace> out;
    for (const auto& file : files) {
        const std::string stem = file.stem().string();
        TraceSchema schema;
        const auto sep = stem.find("__");
        schema.subject_id = sep == std::string::npos ? stem : stem.substr(0, sep);

        std::ifstream in(file);
        if (!in) throw Error("cannot open " + file.string());
        SensorTrace trace = parse_trace(in, schema);

        if (cfg.calibration_file) {
            if (!calib) {
                std::ifstream cin(*cfg.calibration_file);
                if (!cin) throw Error("cannot open calibration file " + *cfg.calibration_file);
                TraceSchema cal_schema;
                cal_schema.subject_id = "calibration";
                calib = parse_trace(cin, cal_schema);
            }
            trace = calibrate(trace, *calib);
        }

        AnnotationSet ann;
        if (!cfg.annotations_dir.empty()) {
            const auto ann_path = std::filesystem::path(cfg.annotations_dir) / (stem + ".csv");
            std::ifstream ain(ann_path);
            if (!ain) throw Error("missing annotation file " + ann_path.string());
            ann = parse_annotations(ain);
        }
        out.push_back(attach_labels(trace, ann));
    }
    return out;
}

// Windows for one sweep point: segment every trace, merge, apply the task
// variant, optionally undersample globally.
inline WindowSet build_window_set(const std::vector<LabeledTrace>& traces,
                                  const ExperimentConfig& cfg, double window_s) {
    WindowConfig wc;
    wc.window_s = window_s;
    wc.overlap_frac = cfg.overlap_frac;
    wc.label_rule = cfg.label_rule;

    std::vector<WindowSet> parts;
    for (const auto& lt : traces) parts.push_back(segment(lt, wc));
    WindowSet ws = merge_window_sets(std::move(parts));
    if (cfg.task == ExperimentConfig::Task::subject) ws = to_subject_task(ws);
    if (cfg.undersample_enabled && !cfg.per_fold_undersample)
        ws = undersample(ws, cfg.undersample_seed);
    return ws;
}

struct SweepResult {
    ModelSpec::Type model;
    double window_s = 0.0;
    CvReport report;
    LabelTable labels;
};

inline std::string sweep_dir_name(ModelSpec::Type model, double window_s) {
    return (model == ModelSpec::Type::svm ? std::string("svm") : std::string("ersknn")) + "_ws" +
           csv::fmt(window_s);
}

// Full experiment: cross-validates every (window size, model) pair, writes
// per-configuration report bundles, a sweep summary CSV and a provenance
// manifest. Every output is a pure function of config and seeds, so a rerun
// with the same config reproduces identical bytes.
inline std::vector<SweepResult> run_experiment(const ExperimentConfig& cfg) {
    // validate every sweep point before any compute
    for (double ws : cfg.window_s_list) {
        WindowConfig wc;
        wc.window_s = ws;
        wc.overlap_frac = cfg.overlap_frac;
        const double fs = cfg.synth ? cfg.synth->sample_rate_hz : 100.0;
        wc.window_samples(fs);
        wc.stride_samples(fs);
    }

    const std::vector<LabeledTrace> traces = load_dataset(cfg);

    struct Point {
        double window_s;
        ModelSpec::Type model;
    };
    std::vector<Point> points;
    for (double ws : cfg.window_s_list)
        for (const auto model : cfg.models) points.push_back({ws, model});

    std::vector<std::optional<SweepResult>> results(points.size());
    std::vector<std::string> failures(points.size());
    std::atomic<std::size_t> next{0};
    const int n_workers =
        std::max(1, std::min<int>(cfg.effective_workers(), static_cast<int>(points.size())));

    // window sets are shared between the models of one sweep point; cache
    // them under a mutex keyed by window size
    std::map<double, WindowSet> window_cache;
    std::mutex cache_mutex;
    const auto windows_for = [&](double ws) -> const WindowSet& {
        std::scoped_lock lock(cache_mutex);
        auto it = window_cache.find(ws);
        if (it == window_cache.end())
            it = window_cache.emplace(ws, build_window_set(traces, cfg, ws)).first;
        return it->second;
    };

    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                const auto& [ws_s, model] = points[i];
                const WindowSet& ws = windows_for(ws_s);
                SweepResult r;
                r.model = model;
                r.window_s = ws_s;
                r.report = cross_validate(ws, cfg.groups, cfg.model_spec(model), cfg.cv_config(),
                                          cfg.hjorth_scaled_derivative);
                r.labels = ws.labels;
                results[i] = std::move(r);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (std::size_t i = 0; i < points.size(); ++i)
        if (!results[i])
            throw Error("cross-validation failed for " +
                        sweep_dir_name(points[i].model, points[i].window_s) + ": " + failures[i]);

    // all writing happens after the parallel phase, in fixed order
    const std::filesystem::path out_dir(cfg.output_dir);
    std::filesystem::create_directories(out_dir);

    std::vector<SweepResult> ordered;
    for (auto& r : results) ordered.push_back(std::move(*r));
    for (const auto& r : ordered)
        write_cv_report_files(r.report, r.labels, out_dir / sweep_dir_name(r.model, r.window_s));

    {
        std::ofstream sweep(out_dir / "sweep_summary.csv");
        sweep << "model,window_s,metric,mean,std\n";
        for (const auto& r : ordered) {
            const auto row = [&](const char* metric, double mean, double sd) {
                sweep << r.report.model_name << ',' << csv::fmt(r.window_s) << ',' << metric << ','
                      << csv::fmt(mean) << ',' << csv::fmt(sd) << '\n';
            };
            row("accuracy", r.report.mean.accuracy, r.report.stddev.accuracy);
            row("overall_accuracy", r.report.mean.overall_accuracy,
                r.report.stddev.overall_accuracy);
            row("precision", r.report.mean.precision, r.report.stddev.precision);
            row("recall", r.report.mean.recall, r.report.stddev.recall);
            row("f1", r.report.mean.f1, r.report.stddev.f1);
        }
    }
    {
        const nlohmann::json cfg_json = experiment_config_to_json(cfg);
        nlohmann::json manifest;
        manifest["tool"] = "washrec";
        manifest["version"] = kToolVersion;
        manifest["config"] = cfg_json;
        manifest["config_hash"] = fnv1a64(cfg_json.dump());
        manifest["seeds"] = {{"fold", cfg.fold_seed},
                             {"undersample", cfg.undersample_seed},
                             {"ersknn", cfg.ersknn.seed}};
        manifest["outputs"] = nlohmann::json::array();
        for (const auto& r : ordered)
            manifest["outputs"].push_back(sweep_dir_name(r.model, r.window_s));
        std::ofstream out(out_dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    return ordered;
}

// Post-hoc McNemar between two persisted prediction files. All three
// variants unless one is requested.
inline std::vector<McNemarResult> run_mcnemar(const std::filesystem::path& pred_a,
                                              const std::filesystem::path& pred_b,
                                              std::optional<McNemarVariant> variant) {
    const PredictionsFile a = load_predictions(pred_a);
    const PredictionsFile b = load_predictions(pred_b);
    const auto [bb, cc] = discordant_counts(a, b);
    std::vector<McNemarResult> results;
    const std::vector<McNemarVariant> variants =
        variant ? std::vector<McNemarVariant>{*variant}
                : std::vector<McNemarVariant>{McNemarVariant::asymptotic,
                                              McNemarVariant::exact_conditional,
                                              McNemarVariant::mid_p};
    for (const auto v : variants) {
        if (!variant && v == McNemarVariant::asymptotic && bb + cc == 0)
            continue;  // undefined without discordant pairs; keep the exact rows
        results.push_back(mcnemar_from_counts(bb, cc, v));
    }
    return results;
}

}  // namespace washrec
