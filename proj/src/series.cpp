#include "rso2stat/series.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rso2stat {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view field, int line, const char* what) {
    field = trim(field);
    double out = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end || field.empty())
        throw ParseError(std::string("malformed ") + what + " value '" + std::string(field) + "'", line);
    if (!std::isfinite(out))
        throw ParseError(std::string("non-finite ") + what + " value", line);
    return out;
}

void append_double(std::string& out, double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    out += buf;
}

}  // namespace

std::size_t Rso2Series::censored_count() const {
    return static_cast<std::size_t>(std::count(censored.begin(), censored.end(), std::uint8_t{1}));
}

void Rso2Series::validate() const {
    if (values.size() != times.size() || censored.size() != times.size())
        throw std::invalid_argument("Rso2Series: field lengths differ");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (k > 0 && !(times[k] > times[k - 1]))
            throw std::invalid_argument("Rso2Series: times not strictly increasing");
        if (times[k] < 0.0) throw std::invalid_argument("Rso2Series: negative time");
        if (values[k] < detection_limit)
            throw std::invalid_argument("Rso2Series: value below detection limit");
        const bool at_limit = values[k] <= detection_limit;
        if (at_limit != (censored[k] != 0))
            throw std::invalid_argument("Rso2Series: censoring flag inconsistent with value");
    }
}

Rso2Series make_series(std::vector<double> times, std::vector<double> values,
                       double detection_limit) {
    if (times.size() != values.size())
        throw std::invalid_argument("make_series: times/values length mismatch");
    std::vector<std::size_t> order(times.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

    Rso2Series s;
    s.detection_limit = detection_limit;
    s.times.reserve(times.size());
    s.values.reserve(times.size());
    s.censored.reserve(times.size());
    for (std::size_t k : order) {
        if (!s.times.empty() && times[k] == s.times.back())
            throw std::invalid_argument("make_series: duplicate timestamp " + std::to_string(times[k]));
        const bool cens = values[k] <= detection_limit;
        s.times.push_back(times[k]);
        s.values.push_back(cens ? detection_limit : values[k]);
        s.censored.push_back(cens ? 1 : 0);
    }
    s.validate();
    return s;
}

Session parse_session(const std::string& csv_text, const SessionMeta& meta) {
    if (meta.transfusion_start_s >= meta.transfusion_end_s)
        throw std::invalid_argument("parse_session: transfusion window start must precede end");

    std::istringstream in(csv_text);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line) != "time_s,rso2")
        throw ParseError("expected header 'time_s,rso2', got '" + line + "'", lineno);

    std::vector<double> pre_t, pre_v, post_t, post_v;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'time_s,rso2' row", lineno);
        const double t = parse_double_field(std::string_view(line).substr(0, comma), lineno, "time_s");
        const double v = parse_double_field(std::string_view(line).substr(comma + 1), lineno, "rso2");
        if (t < 0.0) throw ParseError("negative time_s", lineno);
        if (t < meta.transfusion_start_s) {
            pre_t.push_back(t);
            pre_v.push_back(v);
        } else if (t > meta.transfusion_end_s) {
            post_t.push_back(t);
            post_v.push_back(v);
        }
        // rows inside [start, end] fall in the transfusion window and are dropped
    }

    if (pre_t.empty()) throw std::invalid_argument("parse_session: no pre-transfusion rows");
    if (post_t.empty()) throw std::invalid_argument("parse_session: no post-transfusion rows");

    Session session;
    session.subject_id = meta.subject_id;
    session.window = {meta.transfusion_start_s, meta.transfusion_end_s};
    session.pre = make_series(std::move(pre_t), std::move(pre_v), meta.detection_limit);
    session.post = make_series(std::move(post_t), std::move(post_v), meta.detection_limit);
    return session;
}

SessionMeta parse_session_meta(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("session metadata: ") + e.what());
    }
    SessionMeta meta;
    try {
        meta.subject_id = j.at("subject_id").get<std::string>();
        meta.transfusion_start_s = j.at("transfusion_start_s").get<double>();
        meta.transfusion_end_s = j.at("transfusion_end_s").get<double>();
        if (j.contains("detection_limit"))
            meta.detection_limit = j.at("detection_limit").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("session metadata: ") + e.what());
    }
    return meta;
}

double censoring_fraction(const Rso2Series& series) {
    if (series.empty()) throw std::invalid_argument("censoring_fraction: empty series");
    return static_cast<double>(series.censored_count()) / static_cast<double>(series.size());
}

std::string series_to_csv(const Rso2Series& series) {
    std::string out = "time_s,rso2,censored\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        append_double(out, series.times[k]);
        out += ',';
        append_double(out, series.values[k]);
        out += ',';
        out += series.censored[k] ? '1' : '0';
        out += '\n';
    }
    return out;
}

Rso2Series series_from_csv(const std::string& csv_text, double detection_limit) {
    std::istringstream in(csv_text);
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    ++lineno;
    std::vector<double> t, v;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError("expected 'time_s,rso2,censored' row", lineno);
        t.push_back(parse_double_field(std::string_view(line).substr(0, c1), lineno, "time_s"));
        v.push_back(parse_double_field(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), lineno, "rso2"));
    }
    return make_series(std::move(t), std::move(v), detection_limit);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace rso2stat
