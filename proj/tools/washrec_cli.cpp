// Command-line front end for the handwashing-recognition pipeline.
//
// Exit codes: 0 success, 1 configuration error, 2 data error, 3 internal.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "washrec/washrec.hpp"

namespace fs = std::filesystem;
using namespace washrec;

namespace {

struct ConfigOverrides {
    std::optional<std::vector<double>> window_s;
    std::optional<std::string> model;
    std::optional<int> k;
    std::optional<std::uint64_t> fold_seed;
    std::optional<std::string> task;
    std::optional<std::string> output_dir;
    std::optional<int> workers;
};

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& ov) {
    ExperimentConfig cfg = load_experiment_config(path);
    if (ov.window_s) cfg.window_s_list = *ov.window_s;
    if (ov.model) {
        if (*ov.model == "svm") cfg.models = {ModelSpec::Type::svm};
        else if (*ov.model == "ersknn") cfg.models = {ModelSpec::Type::ersknn};
        else throw ConfigError("model must be 'svm' or 'ersknn'");
    }
    if (ov.k) cfg.k = *ov.k;
    if (ov.fold_seed) cfg.fold_seed = *ov.fold_seed;
    if (ov.task) {
        if (*ov.task == "activity") cfg.task = ExperimentConfig::Task::activity;
        else if (*ov.task == "subject") cfg.task = ExperimentConfig::Task::subject;
        else throw ConfigError("task must be 'activity' or 'subject'");
    }
    if (ov.output_dir) cfg.output_dir = *ov.output_dir;
    if (ov.workers) cfg.workers = *ov.workers;
    return cfg;
}

void add_override_options(CLI::App* cmd, ConfigOverrides& ov) {
    cmd->add_option("--window-s", ov.window_s, "Override window sizes (seconds)");
    cmd->add_option("--model", ov.model, "Override model: svm or ersknn");
    cmd->add_option("--k", ov.k, "Override fold count");
    cmd->add_option("--fold-seed", ov.fold_seed, "Override fold seed");
    cmd->add_option("--task", ov.task, "Override task: activity or subject");
    cmd->add_option("--out", ov.output_dir, "Override output directory");
    cmd->add_option("--workers", ov.workers, "Override worker count");
}

SensorTrace read_trace(const std::string& path, const std::string& subject) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace " + path);
    TraceSchema schema;
    schema.subject_id = subject.empty() ? fs::path(path).stem().string() : subject;
    return parse_trace(in, schema);
}

AnnotationSet read_annotations(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw Error("cannot open annotations " + path);
    return parse_annotations(in);
}

int cmd_synth(const std::string& spec_path, const std::string& preset, double minutes,
              std::uint64_t seed, const std::string& out_dir) {
    SynthSpec spec;
    if (!spec_path.empty()) {
        std::ifstream in(spec_path);
        if (!in) throw ConfigError("cannot open synth spec " + spec_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("synth spec parse error: " + std::string(e.what()));
        }
        spec = cfgio::synth_from_json(j);
    } else if (preset == "three-class") {
        spec = three_class_spec(minutes, seed);
    } else {
        throw ConfigError("either --spec or --preset three-class is required");
    }

    const SynthResult r = gen_synthetic_dataset(spec);
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "trace.csv");
        serialize_trace(r.labeled.trace, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "annotations.csv");
        serialize_annotations(r.annotations, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "synth_spec.json");
        out << cfgio::synth_to_json(spec).dump(2) << '\n';
    }
    std::cout << "wrote " << r.labeled.trace.samples.rows() << " samples, "
              << r.annotations.entries.size() << " annotations to " << out_dir << '\n';
    return 0;
}

int cmd_ingest(const std::string& trace_path, const std::string& ann_path,
               const std::string& calib_path, const std::string& out_dir) {
    SensorTrace trace = read_trace(trace_path, "");
    if (!calib_path.empty()) trace = calibrate(trace, read_trace(calib_path, "calibration"));
    const LabeledTrace lt = attach_labels(trace, read_annotations(ann_path));

    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "calibrated.csv");
        serialize_trace(lt.trace, out);
    }
    {
        nlohmann::json j;
        j["subject"] = lt.trace.subject_id;
        j["samples"] = lt.trace.samples.rows();
        j["duration_s"] = lt.trace.duration_s();
        j["channels"] = lt.trace.channels;
        nlohmann::json counts;
        std::vector<std::size_t> n(lt.labels.size(), 0);
        for (int l : lt.per_sample_labels) n[static_cast<std::size_t>(l)]++;
        for (std::size_t i = 0; i < lt.labels.size(); ++i)
            counts[lt.labels.names()[i]] = n[i];
        j["label_sample_counts"] = counts;
        std::ofstream out(fs::path(out_dir) / "summary.json");
        out << j.dump(2) << '\n';
    }
    std::cout << "ingested " << lt.trace.samples.rows() << " samples into " << out_dir << '\n';
    return 0;
}

int cmd_segment(const std::string& trace_path, const std::string& ann_path,
                const std::string& calib_path, double window_s, double overlap,
                const std::string& rule, bool do_undersample, std::uint64_t seed,
                const std::string& out_dir) {
    SensorTrace trace = read_trace(trace_path, "");
    if (!calib_path.empty()) trace = calibrate(trace, read_trace(calib_path, "calibration"));
    const LabeledTrace lt = attach_labels(trace, read_annotations(ann_path));

    WindowConfig wc;
    wc.window_s = window_s;
    wc.overlap_frac = overlap;
    if (rule == "majority") wc.label_rule = LabelRule::majority;
    else if (rule == "full-containment") wc.label_rule = LabelRule::full_containment;
    else throw ConfigError("label rule must be 'majority' or 'full-containment'");

    WindowSet ws = segment(lt, wc);
    if (do_undersample) ws = undersample(ws, seed);
    save_window_set(ws, out_dir);
    std::cout << "wrote " << ws.windows.size() << " windows to " << out_dir << '\n';
    return 0;
}

int cmd_featurize(const std::string& windows_dir, const std::string& groups_tag,
                  const std::string& out_path) {
    const WindowSet ws = load_window_set(windows_dir);
    FeatureGroupSelection sel{false, false, false};
    for (char c : groups_tag) {
        if (c == 'B' || c == 'b') sel.base = true;
        else if (c == 'H' || c == 'h') sel.hjorth = true;
        else if (c == 'S' || c == 's') sel.shape = true;
        else throw ConfigError("groups must be a combination of B, H, S");
    }
    const FeatureSet fsr = featurize_set(ws, sel);
    std::ofstream out(out_path);
    if (!out) throw Error("cannot open " + out_path);
    write_feature_csv(fsr, out);
    std::cout << "wrote " << fsr.X.rows() << " x " << fsr.X.cols() << " feature matrix to "
              << out_path << '\n';
    return 0;
}

int cmd_encode(const std::string& windows_dir, std::size_t target_len, const std::string& format,
               const std::string& out_dir) {
    const WindowSet ws = load_window_set(windows_dir);
    fs::create_directories(out_dir);
    std::size_t n_images = 0;
    for (std::size_t i = 0; i < ws.windows.size(); ++i) {
        const std::size_t len =
            target_len == 0 ? ws.windows[i].samples.rows()
                            : std::min(target_len, ws.windows[i].samples.rows());
        for (const auto& img : encode_window(ws.windows[i], ws.channels, len)) {
            const std::string base = "w" + std::to_string(i) + "_" + img.channel + "_" +
                                     (img.kind == GramianKind::gasf ? "gasf" : "gadf");
            if (format == "csv") {
                std::ofstream out(fs::path(out_dir) / (base + ".csv"));
                write_gramian_csv(img, out);
            } else {
                write_pgm(img, fs::path(out_dir) / (base + ".pgm"), format == "pgm");
            }
            ++n_images;
        }
    }
    std::cout << "wrote " << n_images << " images to " << out_dir << '\n';
    return 0;
}

int cmd_run(const std::string& config_path, const ConfigOverrides& ov) {
    const ExperimentConfig cfg = load_config(config_path, ov);
    const auto results = run_experiment(cfg);
    for (const auto& r : results)
        std::cout << sweep_dir_name(r.model, r.window_s)
                  << ": accuracy " << csv::fmt_fixed(r.report.mean.accuracy, 4) << " +/- "
                  << csv::fmt_fixed(r.report.stddev.accuracy, 4) << '\n';
    std::cout << "reports in " << cfg.output_dir << '\n';
    return 0;
}

int cmd_select(const std::string& config_path, const ConfigOverrides& ov) {
    const ExperimentConfig cfg = load_config(config_path, ov);
    if (cfg.window_s_list.size() != 1)
        throw ConfigError("select runs at a single window size; pass --window-s");
    const auto traces = load_dataset(cfg);
    const WindowSet ws = build_window_set(traces, cfg, cfg.window_s_list[0]);

    SelectionConfig sel;
    sel.objective = cfg.selection_objective;
    sel.exhaustive = cfg.selection_exhaustive;

    fs::create_directories(cfg.output_dir);
    for (const auto model : cfg.models) {
        const SelectionReport report = forward_group_selection(
            ws, cfg.model_spec(model), cfg.cv_config(), sel, cfg.hjorth_scaled_derivative);
        const std::string name = model == ModelSpec::Type::svm ? "svm" : "ersknn";
        {
            std::ofstream out(fs::path(cfg.output_dir) / ("selection_" + name + ".csv"));
            write_selection_csv(report, out);
        }
        std::ofstream txt(fs::path(cfg.output_dir) / ("selection_" + name + ".txt"));
        render_selection_text(report, txt);
        render_selection_text(report, std::cout);
    }
    return 0;
}

int cmd_mcnemar(const std::string& pred_a, const std::string& pred_b,
                const std::string& variant_name, const std::string& out_path) {
    std::optional<McNemarVariant> variant;
    if (variant_name == "asymptotic") variant = McNemarVariant::asymptotic;
    else if (variant_name == "exact") variant = McNemarVariant::exact_conditional;
    else if (variant_name == "mid-p") variant = McNemarVariant::mid_p;
    else if (variant_name != "all") throw ConfigError("variant must be asymptotic, exact, mid-p or all");

    const auto results = run_mcnemar(pred_a, pred_b, variant);
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw Error("cannot open " + out_path);
        write_mcnemar_table(results, out);
    }
    render_mcnemar_text(results, std::cout);
    return 0;
}

int cmd_perf(const std::string& config_path, const ConfigOverrides& ov) {
    const ExperimentConfig cfg = load_config(config_path, ov);
    if (cfg.window_s_list.size() != 1)
        throw ConfigError("perf runs at a single window size; pass --window-s");
    const auto traces = load_dataset(cfg);
    const WindowSet ws = build_window_set(traces, cfg, cfg.window_s_list[0]);

    std::vector<std::pair<std::string, PerfReport>> rows;
    for (const auto model : cfg.models) {
        const PerfReport p =
            measure_perf(ws, cfg.groups, cfg.model_spec(model), 1000, cfg.hjorth_scaled_derivative);
        rows.emplace_back(model == ModelSpec::Type::svm ? "svm" : "ersknn", p);
    }
    fs::create_directories(cfg.output_dir);
    {
        std::ofstream out(fs::path(cfg.output_dir) / "perf.csv");
        write_perf_csv(rows, out);
    }
    for (const auto& [name, p] : rows)
        std::cout << name << ": train " << csv::fmt_fixed(p.training_time_s, 3) << " s, infer "
                  << csv::fmt_fixed(p.inference_time_per_sample_ms, 4) << " ms/sample, model "
                  << p.model_memory_bytes << " bytes\n";
    return 0;
}

int cmd_report(const std::string& dir) {
    bool found = false;
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "report.txt"))
            subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& sub : subdirs) {
        std::ifstream in(sub / "report.txt");
        std::cout << in.rdbuf() << '\n';
        found = true;
    }
    if (fs::exists(fs::path(dir) / "report.txt")) {
        std::ifstream in(fs::path(dir) / "report.txt");
        std::cout << in.rdbuf() << '\n';
        found = true;
    }
    if (!found) throw Error("no report.txt found under " + dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"IMU handwashing-recognition pipeline"};
    app.require_subcommand(1);

    // synth
    std::string synth_spec, synth_preset, synth_out = "synth_out";
    double synth_minutes = 30.0;
    std::uint64_t synth_seed = 42;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
    synth->add_option("--spec", synth_spec, "Synth spec JSON file");
    synth->add_option("--preset", synth_preset, "Built-in preset: three-class");
    synth->add_option("--minutes", synth_minutes, "Preset duration in minutes");
    synth->add_option("--seed", synth_seed, "Preset seed");
    synth->add_option("--out", synth_out, "Output directory")->required();

    // ingest
    std::string in_trace, in_ann, in_calib, in_out = "ingest_out";
    auto* ingest = app.add_subcommand("ingest", "Parse, calibrate and label a trace");
    ingest->add_option("--trace", in_trace, "Trace CSV")->required();
    ingest->add_option("--annotations", in_ann, "Annotation CSV");
    ingest->add_option("--calib", in_calib, "Still calibration trace CSV");
    ingest->add_option("--out", in_out, "Output directory")->required();

    // segment
    std::string seg_trace, seg_ann, seg_calib, seg_rule = "majority", seg_out = "windows";
    double seg_window = 8.0, seg_overlap = 0.75;
    bool seg_undersample = false;
    std::uint64_t seg_seed = 1;
    auto* seg = app.add_subcommand("segment", "Slice a trace into labeled windows");
    seg->add_option("--trace", seg_trace, "Trace CSV")->required();
    seg->add_option("--annotations", seg_ann, "Annotation CSV");
    seg->add_option("--calib", seg_calib, "Still calibration trace CSV");
    seg->add_option("--window-s", seg_window, "Window length in seconds");
    seg->add_option("--overlap", seg_overlap, "Overlap fraction in [0,1)");
    seg->add_option("--rule", seg_rule, "Label rule: majority or full-containment");
    seg->add_flag("--undersample", seg_undersample, "Rebalance by undersampling 'other'");
    seg->add_option("--seed", seg_seed, "Undersampling seed");
    seg->add_option("--out", seg_out, "Output directory")->required();

    // featurize
    std::string feat_windows, feat_groups = "BHS", feat_out = "features.csv";
    auto* feat = app.add_subcommand("featurize", "Compute per-window descriptors");
    feat->add_option("--windows", feat_windows, "Window set directory")->required();
    feat->add_option("--groups", feat_groups, "Feature groups, e.g. BHS, BH, H");
    feat->add_option("--out", feat_out, "Output CSV")->required();

    // encode
    std::string enc_windows, enc_format = "pgm", enc_out = "images";
    std::size_t enc_target = 64;
    auto* enc = app.add_subcommand("encode", "Encode windows as Gramian angular field images");
    enc->add_option("--windows", enc_windows, "Window set directory")->required();
    enc->add_option("--target-len", enc_target, "Image side length after PAA (0 = full)");
    enc->add_option("--format", enc_format, "pgm (binary), pgm-ascii, or csv");
    enc->add_option("--out", enc_out, "Output directory")->required();

    // cv / sweep / select / perf share config + overrides
    std::string cv_config, sweep_config, select_config, perf_config;
    ConfigOverrides cv_ov, sweep_ov, select_ov, perf_ov;
    auto* cv = app.add_subcommand("cv", "Cross-validate one configuration");
    cv->add_option("--config", cv_config, "Experiment config JSON")->required();
    add_override_options(cv, cv_ov);
    auto* sweep = app.add_subcommand("sweep", "Window-size sweep over the configured list");
    sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
    add_override_options(sweep, sweep_ov);
    auto* select = app.add_subcommand("select", "Forward feature-group selection");
    select->add_option("--config", select_config, "Experiment config JSON")->required();
    add_override_options(select, select_ov);
    auto* perf = app.add_subcommand("perf", "Measure training/inference cost and model size");
    perf->add_option("--config", perf_config, "Experiment config JSON")->required();
    add_override_options(perf, perf_ov);

    // mcnemar
    std::string mc_a, mc_b, mc_variant = "all", mc_out;
    auto* mc = app.add_subcommand("mcnemar", "Compare two prediction files");
    mc->add_option("--pred-a", mc_a, "predictions.csv of model A")->required();
    mc->add_option("--pred-b", mc_b, "predictions.csv of model B")->required();
    mc->add_option("--variant", mc_variant, "asymptotic, exact, mid-p or all");
    mc->add_option("--out", mc_out, "Output CSV table");

    // report
    std::string rep_dir;
    auto* rep = app.add_subcommand("report", "Print the reports in an output directory");
    rep->add_option("--dir", rep_dir, "Experiment output directory")->required();

    CLI11_PARSE(app, argc, argv);

    const std::string stage = app.get_subcommands().front()->get_name();
    try {
        if (synth->parsed())
            return cmd_synth(synth_spec, synth_preset, synth_minutes, synth_seed, synth_out);
        if (ingest->parsed()) return cmd_ingest(in_trace, in_ann, in_calib, in_out);
        if (seg->parsed())
            return cmd_segment(seg_trace, seg_ann, seg_calib, seg_window, seg_overlap, seg_rule,
                               seg_undersample, seg_seed, seg_out);
        if (feat->parsed()) return cmd_featurize(feat_windows, feat_groups, feat_out);
        if (enc->parsed()) return cmd_encode(enc_windows, enc_target, enc_format, enc_out);
        if (cv->parsed()) return cmd_run(cv_config, cv_ov);
        if (sweep->parsed()) return cmd_run(sweep_config, sweep_ov);
        if (select->parsed()) return cmd_select(select_config, select_ov);
        if (perf->parsed()) return cmd_perf(perf_config, perf_ov);
        if (mc->parsed()) return cmd_mcnemar(mc_a, mc_b, mc_variant, mc_out);
        if (rep->parsed()) return cmd_report(rep_dir);
    } catch (const ConfigError& e) {
        std::cerr << stage << ": config error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << stage << ": data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << stage << ": internal error: " << e.what() << '\n';
        return 3;
    }
    return 3;
}
