#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rso2stat {

/// Parse failure with the 1-based line number of the offending CSV row.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_ = 0;
};

/// One observed oxygenation segment. times are seconds since session start,
/// strictly increasing; values are percent and never below detection_limit
/// (readings at or below the limit are reported at the limit and flagged).
struct Rso2Series {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<std::uint8_t> censored;
    double detection_limit = 15.0;

    [[nodiscard]] std::size_t size() const { return times.size(); }
    [[nodiscard]] bool empty() const { return times.empty(); }
    [[nodiscard]] double span_start() const { return times.front(); }
    [[nodiscard]] double span_end() const { return times.back(); }
    [[nodiscard]] std::size_t censored_count() const;

    /// Throws std::invalid_argument if any struct invariant is broken.
    void validate() const;
};

struct TransfusionWindow {
    double start_s = 0.0;
    double end_s = 0.0;
};

struct Session {
    std::string subject_id;
    Rso2Series pre;
    Rso2Series post;
    TransfusionWindow window;
};

struct SessionMeta {
    std::string subject_id;
    double transfusion_start_s = 0.0;
    double transfusion_end_s = 0.0;
    double detection_limit = 15.0;
};

/// Build a series from raw samples: sorts by time, rejects duplicate stamps,
/// clamps sub-limit values up to the limit and sets censoring flags.
Rso2Series make_series(std::vector<double> times, std::vector<double> values,
                       double detection_limit);

/// Parse a session CSV (`time_s,rso2` header) against its metadata. Rows
/// with transfusion_start_s <= t <= transfusion_end_s are dropped; the rest
/// split into pre and post segments. Both segments must be non-empty.
Session parse_session(const std::string& csv_text, const SessionMeta& meta);

/// Load metadata from its JSON file content
/// ({subject_id, transfusion_start_s, transfusion_end_s, detection_limit}).
SessionMeta parse_session_meta(const std::string& json_text);

/// Fraction of observations at the detection limit. Errors on empty input.
double censoring_fraction(const Rso2Series& series);

/// Serialize one segment as `time_s,rso2,censored` CSV (full round-trip of
/// the post-clamp state).
std::string series_to_csv(const Rso2Series& series);

/// Inverse of series_to_csv.
Rso2Series series_from_csv(const std::string& csv_text, double detection_limit);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rso2stat
