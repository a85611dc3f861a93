#pragma once

#include <chrono>
#include <cstdint>

#include "washrec/cross_validation.hpp"
#include "washrec/features.hpp"
#include "washrec/windowing.hpp"

namespace washrec {

// Wall-clock cost of one model on one dataset. Inference latency covers the
// full per-window path, feature extraction included; the serialized model
// size stands in for the memory footprint.
struct PerfReport {
    double training_time_s = 0.0;
    double inference_time_per_sample_ms = 0.0;
    std::uint64_t model_memory_bytes = 0;
    std::size_t n_predictions = 0;
};

inline PerfReport measure_perf(const WindowSet& ws, const FeatureGroupSelection& groups,
                               const ModelSpec& spec, std::size_t min_predictions = 1000,
                               bool hjorth_scaled_derivative = true) {
    if (ws.windows.empty()) throw EmptyTrainingSet("perf measurement needs a non-empty dataset");
    using clock = std::chrono::steady_clock;

    const auto t0 = clock::now();
    const FeatureSet fs = featurize_set(ws, groups, hjorth_scaled_derivative);
    const TrainedModel model = TrainedModel::train(fs.X, fs.y, ws.labels.names(), spec);
    const auto t1 = clock::now();

    PerfReport report;
    report.training_time_s = std::chrono::duration<double>(t1 - t0).count();
    report.model_memory_bytes = model.serialized_size();

    std::size_t done = 0;
    volatile int sink = 0;  // keep the predict calls observable
    const auto t2 = clock::now();
    while (done < min_predictions) {
        for (std::size_t i = 0; i < ws.windows.size() && done < min_predictions; ++i, ++done) {
            const FeatureVector fv =
                featurize(ws.windows[i], groups, ws.sample_rate_hz, hjorth_scaled_derivative);
            sink = sink + model.predict(fv.values);
        }
    }
    const auto t3 = clock::now();
    report.n_predictions = done;
    report.inference_time_per_sample_ms =
        std::chrono::duration<double, std::milli>(t3 - t2).count() / static_cast<double>(done);
    return report;
}

}  // namespace washrec
