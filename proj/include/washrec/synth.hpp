#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/errors.hpp"
#include "washrec/rng.hpp"
#include "washrec/trace.hpp"

namespace washrec {

// Deterministic synthetic IMU generator. Each class drives every channel
// with a sum of sinusoids plus white Gaussian noise; the plan concatenates
// labeled segments into one continuous trace. Noise comes from the library
// Rng (mt19937_64 + Box-Muller), so identical seeds reproduce identical
// bytes on every platform.

struct Sinusoid {
    double amplitude = 1.0;
    double frequency_hz = 1.0;
    double phase = 0.0;
};

struct ChannelRecipe {
    std::vector<Sinusoid> sinusoids;
    double noise_sigma = 0.0;
};

struct ClassRecipe {
    std::string label;
    std::vector<ChannelRecipe> channels;  // one per trace channel
};

struct PlanSegment {
    std::string label;
    double duration_s = 0.0;
};

struct SynthSpec {
    double sample_rate_hz = 100.0;
    std::uint64_t seed = 0;
    std::string subject_id = "synth";
    std::vector<std::string> channel_names = kAccelChannels;
    std::vector<ClassRecipe> classes;
    std::vector<PlanSegment> plan;

    void validate() const {
        if (sample_rate_hz <= 0.0) throw BadSpec("sample_rate_hz must be positive");
        if (channel_names.size() != 3 && channel_names.size() != 6)
            throw BadSpec("channel count must be 3 or 6");
        if (classes.empty()) throw BadSpec("no class recipes");
        if (plan.empty()) throw BadSpec("empty segment plan");
        for (const auto& c : classes) {
            if (c.channels.size() != channel_names.size())
                throw BadSpec("class '" + c.label + "' must define one recipe per channel");
            for (const auto& ch : c.channels) {
                if (ch.noise_sigma < 0.0) throw BadSpec("negative noise sigma");
                for (const auto& s : ch.sinusoids)
                    if (s.frequency_hz <= 0.0 || s.frequency_hz >= sample_rate_hz / 2.0)
                        throw BadSpec("sinusoid frequency must lie in (0, sample_rate/2)");
            }
        }
        for (const auto& seg : plan) {
            if (seg.duration_s <= 0.0) throw BadSpec("segment durations must be positive");
            const double samples = seg.duration_s * sample_rate_hz;
            if (std::abs(samples - std::round(samples)) > 1e-9)
                throw BadSpec("segment of " + std::to_string(seg.duration_s) +
                              " s is not a whole number of samples");
            if (!class_index().count(seg.label))
                throw BadSpec("plan references unknown class '" + seg.label + "'");
        }
    }

    std::map<std::string, std::size_t> class_index() const {
        std::map<std::string, std::size_t> idx;
        for (std::size_t i = 0; i < classes.size(); ++i) idx[classes[i].label] = i;
        return idx;
    }
};

struct SynthResult {
    LabeledTrace labeled;
    AnnotationSet annotations;
};

inline SynthResult gen_synthetic_dataset(const SynthSpec& spec) {
    spec.validate();
    const auto class_of = spec.class_index();
    const double fs = spec.sample_rate_hz;

    std::size_t total_samples = 0;
    for (const auto& seg : spec.plan)
        total_samples += static_cast<std::size_t>(std::llround(seg.duration_s * fs));

    SynthResult out;
    SensorTrace& trace = out.labeled.trace;
    trace.subject_id = spec.subject_id;
    trace.sample_rate_hz = fs;
    trace.channels = spec.channel_names;
    trace.start_time_ms = 0;
    trace.samples = Matrix(total_samples, spec.channel_names.size());
    out.labeled.per_sample_labels.assign(total_samples, kOtherLabel);

    Rng rng(spec.seed);
    std::size_t pos = 0;
    for (const auto& seg : spec.plan) {
        const auto& recipe = spec.classes[class_of.at(seg.label)];
        const int label_id = out.labeled.labels.intern(seg.label);
        const auto seg_samples = static_cast<std::size_t>(std::llround(seg.duration_s * fs));

        if (seg.label != "other") {
            Annotation a;
            a.start_ms = trace.timestamp_ms(pos);
            a.end_ms = trace.timestamp_ms(pos + seg_samples);
            a.label = seg.label;
            out.annotations.entries.push_back(std::move(a));
        }

        for (std::size_t i = 0; i < seg_samples; ++i) {
            const double t = static_cast<double>(pos + i) / fs;
            for (std::size_t c = 0; c < trace.channels.size(); ++c) {
                const auto& ch = recipe.channels[c];
                double v = 0.0;
                for (const auto& s : ch.sinusoids)
                    v += s.amplitude *
                         std::sin(2.0 * std::numbers::pi * s.frequency_hz * t + s.phase);
                if (ch.noise_sigma > 0.0) v += ch.noise_sigma * rng.gaussian();
                trace.samples(pos + i, c) = v;
            }
            out.labeled.per_sample_labels[pos + i] = label_id;
        }
        pos += seg_samples;
    }
    return out;
}

// Canonical separable benchmark: three classes driven by 1, 4 and 9 Hz
// sinusoids plus noise, cycled other/washing/rubbing. Used by the
// documentation examples and the end-to-end suites.
inline SynthSpec three_class_spec(double total_minutes = 30.0, std::uint64_t seed = 42,
                                  double noise_sigma = 0.1) {
    SynthSpec spec;
    spec.seed = seed;

    const auto make_class = [&](const std::string& label, double freq) {
        ClassRecipe c;
        c.label = label;
        for (std::size_t ch = 0; ch < 3; ++ch) {
            ChannelRecipe r;
            // per-channel phase offsets keep the three channels distinct
            r.sinusoids.push_back({1.0, freq, 0.5 * static_cast<double>(ch)});
            r.noise_sigma = noise_sigma;
            c.channels.push_back(std::move(r));
        }
        return c;
    };
    spec.classes.push_back(make_class("other", 1.0));
    spec.classes.push_back(make_class("washing", 4.0));
    spec.classes.push_back(make_class("rubbing", 9.0));

    // 100 s cycle with "other" between the active classes, so windows never
    // straddle washing and rubbing directly
    const int cycles = std::max(1, static_cast<int>(std::llround(total_minutes * 60.0 / 100.0)));
    for (int i = 0; i < cycles; ++i) {
        spec.plan.push_back({"other", 25.0});
        spec.plan.push_back({"washing", 25.0});
        spec.plan.push_back({"other", 25.0});
        spec.plan.push_back({"rubbing", 25.0});
    }
    return spec;
}

}  // namespace washrec
