#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "helpers.hpp"
#include "washrec/features.hpp"
#include "washrec/synth.hpp"
#include "washrec/windowing.hpp"

using namespace washrec;
using Catch::Approx;

namespace {

SynthSpec tiny_spec() {
    SynthSpec spec;
    spec.seed = 9;
    ClassRecipe other{"other", {}}, washing{"washing", {}};
    for (int c = 0; c < 3; ++c) {
        other.channels.push_back({{{1.0, 1.0, 0.0}}, 0.05});
        washing.channels.push_back({{{1.0, 4.0, 0.0}}, 0.05});
    }
    spec.classes = {other, washing};
    spec.plan = {{"other", 10.0}, {"washing", 5.0}};
    return spec;
}

}  // namespace

TEST_CASE("the plan determines sample counts and annotations") {
    const SynthResult r = gen_synthetic_dataset(tiny_spec());
    REQUIRE(r.labeled.trace.samples.rows() == 1500);
    REQUIRE(r.annotations.entries.size() == 1);
    CHECK(r.annotations.entries[0].start_ms == 10000);
    CHECK(r.annotations.entries[0].end_ms == 15000);
    CHECK(r.annotations.entries[0].label == "washing");

    const int washing = r.labeled.labels.id_of("washing");
    for (std::size_t i = 0; i < 1500; ++i)
        REQUIRE(r.labeled.per_sample_labels[i] == (i >= 1000 ? washing : kOtherLabel));
}

TEST_CASE("per-sample labels agree with attach_labels on the emitted annotations") {
    const SynthResult r = gen_synthetic_dataset(tiny_spec());
    const LabeledTrace relabeled = attach_labels(r.labeled.trace, r.annotations);
    CHECK(relabeled.per_sample_labels == r.labeled.per_sample_labels);
}

TEST_CASE("a noiseless sinusoid class recovers its angular frequency") {
    SynthSpec spec;
    spec.seed = 1;
    ClassRecipe other{"other", {}};
    for (int c = 0; c < 3; ++c) other.channels.push_back({{{1.0, 3.0, 0.0}}, 0.0});
    spec.classes = {other};
    spec.plan = {{"other", 10.0}};
    const SynthResult r = gen_synthetic_dataset(spec);

    const auto x = r.labeled.trace.samples.column(0);
    const auto h = hjorth_features(x, 100.0);
    CHECK(h.mobility == Approx(2.0 * std::numbers::pi * 3.0).epsilon(0.01));
    CHECK(h.complexity == Approx(1.0).epsilon(0.01));
}

TEST_CASE("generation is deterministic given the seed") {
    const SynthResult a = gen_synthetic_dataset(tiny_spec());
    const SynthResult b = gen_synthetic_dataset(tiny_spec());
    CHECK(a.labeled.trace == b.labeled.trace);

    SynthSpec different = tiny_spec();
    different.seed = 10;
    const SynthResult c = gen_synthetic_dataset(different);
    CHECK(a.labeled.trace.samples.data() != c.labeled.trace.samples.data());
}

TEST_CASE("bad specs are rejected") {
    SynthSpec spec = tiny_spec();
    spec.plan[0].duration_s = -1.0;
    CHECK_THROWS_AS(gen_synthetic_dataset(spec), BadSpec);

    spec = tiny_spec();
    spec.plan.push_back({"scrubbing", 5.0});
    CHECK_THROWS_AS(gen_synthetic_dataset(spec), BadSpec);

    spec = tiny_spec();
    spec.classes[0].channels[0].sinusoids[0].frequency_hz = 60.0;  // above Nyquist
    CHECK_THROWS_AS(gen_synthetic_dataset(spec), BadSpec);

    spec = tiny_spec();
    spec.classes[0].channels.pop_back();
    CHECK_THROWS_AS(gen_synthetic_dataset(spec), BadSpec);
}

TEST_CASE("emitted CSVs round-trip through the ingest parsers") {
    const SynthResult r = gen_synthetic_dataset(tiny_spec());
    std::ostringstream trace_out, ann_out;
    serialize_trace(r.labeled.trace, trace_out);
    serialize_annotations(r.annotations, ann_out);

    std::istringstream trace_in(trace_out.str());
    const SensorTrace back = parse_trace(trace_in, {.subject_id = "synth"});
    CHECK(back == r.labeled.trace);

    std::istringstream ann_in(ann_out.str());
    CHECK(parse_annotations(ann_in) == r.annotations);
}

TEST_CASE("the three-class preset's segments are separable in Hjorth mobility space") {
    const SynthSpec spec = three_class_spec(5.0, 42);
    const SynthResult r = gen_synthetic_dataset(spec);

    // per plan segment: mobility of channel 0 over the segment's samples
    std::map<int, std::pair<double, double>> range;  // label -> [min, max]
    std::size_t pos = 0;
    for (const auto& seg : spec.plan) {
        const auto n = static_cast<std::size_t>(std::llround(seg.duration_s * 100.0));
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = r.labeled.trace.samples(pos + i, 0);
        const auto h = hjorth_features(x, 100.0);
        const int label = r.labeled.per_sample_labels[pos];
        auto it = range.find(label);
        if (it == range.end()) range[label] = {h.mobility, h.mobility};
        else {
            it->second.first = std::min(it->second.first, h.mobility);
            it->second.second = std::max(it->second.second, h.mobility);
        }
        pos += n;
    }
    REQUIRE(range.size() == 3);
    std::vector<std::pair<double, double>> sorted;
    for (const auto& [label, r2] : range) sorted.push_back(r2);
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0].second < sorted[1].first);
    CHECK(sorted[1].second < sorted[2].first);
}
