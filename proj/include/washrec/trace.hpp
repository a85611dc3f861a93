#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "washrec/core.hpp"
#include "washrec/csv.hpp"
#include "washrec/errors.hpp"

namespace washrec {

inline const std::vector<std::string> kAccelChannels = {"ax", "ay", "az"};
inline const std::vector<std::string> kAccelGyroChannels = {"ax", "ay", "az",
                                                            "gx", "gy", "gz"};

// Uniformly sampled multi-channel IMU recording. Acceleration is in g,
// angular rate in deg/s. Channel count is 3 (accel only) or 6 (accel+gyro).
// Timestamps are implied by index: start_time_ms + i * 1000 / sample_rate_hz.
struct SensorTrace {
    std::string subject_id;
    double sample_rate_hz = 100.0;
    std::vector<std::string> channels;
    Matrix samples;  // rows x channels
    std::int64_t start_time_ms = 0;

    std::int64_t timestamp_ms(std::size_t i) const {
        return start_time_ms +
               static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1000.0 / sample_rate_hz));
    }
    // One past the last sample, i.e. the first millisecond not covered.
    std::int64_t end_time_ms() const { return timestamp_ms(samples.rows()); }
    double duration_s() const { return static_cast<double>(samples.rows()) / sample_rate_hz; }

    bool operator==(const SensorTrace& o) const = default;
};

struct TraceSchema {
    std::string subject_id;
    double sample_rate_hz = 100.0;
    // 3 or 6; unset accepts either layout as found in the header.
    std::optional<std::size_t> expected_channels;
};

struct Annotation {
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;  // exclusive
    std::string label;

    bool operator==(const Annotation& o) const = default;
};

struct AnnotationSet {
    std::vector<Annotation> entries;

    bool operator==(const AnnotationSet& o) const = default;
};

// Trace plus one activity label id per sample. Samples not covered by any
// annotation carry "other" (id 0).
struct LabeledTrace {
    SensorTrace trace;
    std::vector<int> per_sample_labels;
    LabelTable labels;
};

namespace detail {

inline void check_header(const std::vector<std::string>& fields,
                         const std::optional<std::size_t>& expected) {
    if (fields.empty() || fields[0] != "t_ms")
        throw WrongChannelCount("trace header must start with t_ms");
    const std::size_t n = fields.size() - 1;
    const auto matches = [&](const std::vector<std::string>& want) {
        return n == want.size() && std::equal(want.begin(), want.end(), fields.begin() + 1);
    };
    if (!matches(kAccelChannels) && !matches(kAccelGyroChannels))
        throw WrongChannelCount("trace header must be t_ms,ax,ay,az[,gx,gy,gz]");
    if (expected && n != *expected)
        throw WrongChannelCount("schema expects " + std::to_string(*expected) +
                                " channels, file has " + std::to_string(n));
}

}  // namespace detail

// Parses the trace CSV format (header t_ms,ax,ay,az[,gx,gy,gz]). The
// timestamp column is validated against uniform spacing implied by the
// schema's sample rate and then discarded; only start_time_ms is kept.
inline SensorTrace parse_trace(std::istream& in, const TraceSchema& schema) {
    SensorTrace trace;
    trace.subject_id = schema.subject_id;
    trace.sample_rate_hz = schema.sample_rate_hz;

    std::string line;
    if (!csv::getline_any(in, line)) throw MalformedRow(1, "missing header row");
    const auto header = csv::split(line);
    detail::check_header(header, schema.expected_channels);
    trace.channels.assign(header.begin() + 1, header.end());
    const std::size_t n_channels = trace.channels.size();

    const double spacing_ms = 1000.0 / trace.sample_rate_hz;
    std::vector<double> values;
    std::size_t n_rows = 0;
    std::size_t line_no = 1;
    std::int64_t prev_t = 0;
    while (csv::getline_any(in, line)) {
        ++line_no;
        if (line.empty()) throw MalformedRow(line_no, "empty row");
        const auto fields = csv::split(line);
        if (fields.size() != n_channels + 1)
            throw WrongChannelCount("line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(n_channels + 1) + " fields, got " +
                                    std::to_string(fields.size()));
        const std::int64_t t = csv::parse_int(fields[0], line_no);
        if (n_rows == 0) {
            trace.start_time_ms = t;
        } else {
            if (t <= prev_t)
                throw NonMonotonicTimestamps("line " + std::to_string(line_no) +
                                             ": timestamp not increasing");
            const double expected =
                static_cast<double>(trace.start_time_ms) + static_cast<double>(n_rows) * spacing_ms;
            if (std::abs(static_cast<double>(t) - expected) > 0.5 * spacing_ms)
                throw NonMonotonicTimestamps("line " + std::to_string(line_no) +
                                             ": timestamp deviates from uniform " +
                                             csv::fmt(spacing_ms) + " ms spacing");
        }
        prev_t = t;
        for (std::size_t c = 0; c < n_channels; ++c)
            values.push_back(csv::parse_double(fields[1 + c], line_no));
        ++n_rows;
    }

    trace.samples = Matrix(n_rows, n_channels);
    trace.samples.data() = std::move(values);
    return trace;
}

inline void serialize_trace(const SensorTrace& trace, std::ostream& out) {
    out << "t_ms";
    for (const auto& ch : trace.channels) out << ',' << ch;
    out << '\n';
    for (std::size_t i = 0; i < trace.samples.rows(); ++i) {
        out << trace.timestamp_ms(i);
        for (std::size_t c = 0; c < trace.samples.cols(); ++c)
            out << ',' << csv::fmt(trace.samples(i, c));
        out << '\n';
    }
}

// Annotation CSV: header start_ms,end_ms,label.
inline AnnotationSet parse_annotations(std::istream& in) {
    std::string line;
    if (!csv::getline_any(in, line)) throw MalformedRow(1, "missing header row");
    if (csv::split(line) != std::vector<std::string>{"start_ms", "end_ms", "label"})
        throw MalformedRow(1, "annotation header must be start_ms,end_ms,label");

    AnnotationSet set;
    std::size_t line_no = 1;
    while (csv::getline_any(in, line)) {
        ++line_no;
        if (line.empty()) throw MalformedRow(line_no, "empty row");
        const auto fields = csv::split(line);
        if (fields.size() != 3) throw MalformedRow(line_no, "expected 3 fields");
        Annotation a;
        a.start_ms = csv::parse_int(fields[0], line_no);
        a.end_ms = csv::parse_int(fields[1], line_no);
        a.label = fields[2];
        if (a.end_ms <= a.start_ms)
            throw MalformedRow(line_no, "end_ms must be greater than start_ms");
        if (a.label.empty()) throw MalformedRow(line_no, "empty label");
        set.entries.push_back(std::move(a));
    }
    return set;
}

inline void serialize_annotations(const AnnotationSet& set, std::ostream& out) {
    out << "start_ms,end_ms,label\n";
    for (const auto& a : set.entries)
        out << a.start_ms << ',' << a.end_ms << ',' << a.label << '\n';
}

// Subtracts per-channel static bias estimated from a still recording of at
// least 30 s. The accelerometer axis with the largest-magnitude mean is
// taken as gravity-aligned and corrected to +/-1 g instead of 0, so the
// gravity reference survives calibration.
inline SensorTrace calibrate(const SensorTrace& trace, const SensorTrace& calib) {
    if (trace.channels != calib.channels || trace.sample_rate_hz != calib.sample_rate_hz)
        throw ChannelMismatch("calibration recording does not match trace layout");
    if (calib.duration_s() < 30.0)
        throw CalibTooShort("calibration recording is " + csv::fmt(calib.duration_s()) +
                            " s, need at least 30 s");

    const std::size_t n_channels = calib.samples.cols();
    std::vector<double> bias(n_channels, 0.0);
    for (std::size_t c = 0; c < n_channels; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < calib.samples.rows(); ++r) sum += calib.samples(r, c);
        bias[c] = sum / static_cast<double>(calib.samples.rows());
    }

    const std::size_t n_accel = std::min<std::size_t>(3, n_channels);
    std::size_t gravity_axis = 0;
    for (std::size_t c = 1; c < n_accel; ++c)
        if (std::abs(bias[c]) > std::abs(bias[gravity_axis])) gravity_axis = c;
    bias[gravity_axis] -= bias[gravity_axis] < 0.0 ? -1.0 : 1.0;

    SensorTrace out = trace;
    for (std::size_t r = 0; r < out.samples.rows(); ++r)
        for (std::size_t c = 0; c < n_channels; ++c) out.samples(r, c) -= bias[c];
    return out;
}

// Assigns each sample the label of the annotation entry containing its
// timestamp (half-open [start_ms, end_ms) intervals), "other" elsewhere.
// Labels are interned in time order; "other" is always id 0.
inline LabeledTrace attach_labels(const SensorTrace& trace, const AnnotationSet& ann) {
    std::vector<Annotation> entries = ann.entries;
    std::sort(entries.begin(), entries.end(),
              [](const Annotation& a, const Annotation& b) { return a.start_ms < b.start_ms; });
    for (std::size_t i = 0; i + 1 < entries.size(); ++i)
        if (entries[i + 1].start_ms < entries[i].end_ms)
            throw OverlappingAnnotations("annotations '" + entries[i].label + "' and '" +
                                         entries[i + 1].label + "' overlap");
    for (const auto& e : entries) {
        if (e.end_ms <= e.start_ms)
            throw AnnotationOutOfRange("annotation '" + e.label + "' has empty interval");
        if (e.start_ms < trace.start_time_ms || e.end_ms > trace.end_time_ms())
            throw AnnotationOutOfRange("annotation '" + e.label +
                                       "' falls outside the trace time span");
    }

    LabeledTrace lt;
    lt.trace = trace;
    lt.per_sample_labels.assign(trace.samples.rows(), kOtherLabel);
    for (const auto& e : entries) {
        const int id = lt.labels.intern(e.label);
        // First sample index at or after start_ms, first at or after end_ms.
        const double spacing = 1000.0 / trace.sample_rate_hz;
        const auto first_at_or_after = [&](std::int64_t t_ms) {
            const double offset = static_cast<double>(t_ms - trace.start_time_ms);
            auto i = static_cast<std::int64_t>(std::ceil(offset / spacing - 1e-9));
            return static_cast<std::size_t>(std::max<std::int64_t>(0, i));
        };
        const std::size_t lo = first_at_or_after(e.start_ms);
        const std::size_t hi = std::min<std::size_t>(first_at_or_after(e.end_ms), trace.samples.rows());
        for (std::size_t i = lo; i < hi; ++i) lt.per_sample_labels[i] = id;
    }
    return lt;
}

}  // namespace washrec
