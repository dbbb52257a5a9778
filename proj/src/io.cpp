#include "sscopic/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sscopic/error.hpp"

namespace sscopic {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(std::string_view field, const std::string& source, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) {
        std::ostringstream os;
        os << source << ": line " << line << ": cannot parse '" << field << "' as a finite decimal";
        fail(ErrorCode::Parse, os.str());
    }
    return v;
}

template <class OnRecord>
void for_each_record(std::istream& in, OnRecord on_record) {
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto body = trim(raw);
        if (body.empty() || body.front() == '#') continue;
        on_record(body, line);
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Parse, "cannot open " + path.string());
    return in;
}

}  // namespace

std::vector<double> parse_single_column(std::istream& in, const std::string& source) {
    std::vector<double> out;
    for_each_record(in, [&](std::string_view body, std::size_t line) {
        if (body.find(',') != std::string_view::npos) {
            std::ostringstream os;
            os << source << ": line " << line << ": expected one column";
            fail(ErrorCode::Parse, os.str());
        }
        out.push_back(parse_field(body, source, line));
    });
    require(out.size() >= 2, ErrorCode::DegenerateInput,
            source + ": need at least 2 records, found " + std::to_string(out.size()));
    return out;
}

JointSamples parse_two_column(std::istream& in, const std::string& source) {
    std::vector<double> a, b;
    for_each_record(in, [&](std::string_view body, std::size_t line) {
        const auto comma = body.find(',');
        if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos) {
            std::ostringstream os;
            os << source << ": line " << line << ": expected two comma-separated columns";
            fail(ErrorCode::Parse, os.str());
        }
        a.push_back(parse_field(body.substr(0, comma), source, line));
        b.push_back(parse_field(body.substr(comma + 1), source, line));
    });
    require(a.size() >= 2, ErrorCode::DegenerateInput,
            source + ": need at least 2 records, found " + std::to_string(a.size()));
    return JointSamples(std::move(a), std::move(b));
}

Samples ingest_samples(const std::filesystem::path& path, Layout layout) {
    if (layout == Layout::SingleColumn) return read_single_column(path);
    return read_two_column(path);
}

std::vector<double> read_single_column(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_single_column(in, path.string());
}

JointSamples read_two_column(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_two_column(in, path.string());
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

void write_single_column(std::ostream& out, std::span<const double> values) {
    for (double v : values) out << format_number(v) << '\n';
}

void write_two_column(std::ostream& out, const JointSamples& joint) {
    for (std::size_t i = 0; i < joint.size(); ++i)
        out << format_number(joint.pa()[i]) << ',' << format_number(joint.pb()[i]) << '\n';
}

double calibration_scale(std::span<const double> vacuum) {
    const double var = Distribution::empirical({vacuum.begin(), vacuum.end()}).moments().variance;
    require(var > 0.0, ErrorCode::DegenerateInput, "calibration: vacuum record has zero variance");
    return 1.0 / std::sqrt(var);
}

// ---------------------------------------------------------------------------
// Config

const char* to_string(Mode m) noexcept {
    switch (m) {
        case Mode::Single: return "single";
        case Mode::BipartiteInference: return "bipartite-inference";
        case Mode::BipartiteSum: return "bipartite-sum";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
    for (auto m : {Mode::Single, Mode::BipartiteInference, Mode::BipartiteSum})
        if (name == to_string(m)) return m;
    return std::nullopt;
}

std::vector<double> SGridSpec::values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        out[static_cast<std::size_t>(k)] =
            count == 1 ? start : start + (stop - start) * static_cast<double>(k) / (count - 1);
    return out;
}

SGridSpec SGridSpec::parse(const std::string& text) {
    std::array<std::string_view, 3> parts;
    std::string_view rest = text;
    for (int i = 0; i < 3; ++i) {
        const auto colon = rest.find(':');
        if ((i < 2) != (colon != std::string_view::npos))
            fail(ErrorCode::InvalidArgument, "S-grid must read start:stop:count, got '" + text + "'");
        parts[static_cast<std::size_t>(i)] = rest.substr(0, colon);
        if (colon != std::string_view::npos) rest = rest.substr(colon + 1);
    }
    SGridSpec g;
    g.start = parse_field(parts[0], "--s-grid", 1);
    g.stop = parse_field(parts[1], "--s-grid", 1);
    const double c = parse_field(parts[2], "--s-grid", 1);
    require(c >= 1.0 && c == std::floor(c), ErrorCode::InvalidArgument, "S-grid count must be a positive integer");
    g.count = static_cast<int>(c);
    return g;
}

std::vector<CriterionId> criteria_for(Mode mode) {
    switch (mode) {
        case Mode::Single:
            return {CriterionId::Theorem1Product, CriterionId::Theorem1Sum, CriterionId::Theorem4,
                    CriterionId::CoherentSuperposition};
        case Mode::BipartiteInference:
            return {CriterionId::Theorem2, CriterionId::Theorem5a};
        case Mode::BipartiteSum:
            return {CriterionId::Theorem3Product, CriterionId::Theorem3Sum, CriterionId::Theorem5b};
    }
    return {};
}

void AnalysisConfig::validate() const {
    require(!criteria.empty(), ErrorCode::InvalidArgument, "config: select at least one criterion");
    const auto allowed = criteria_for(mode);
    for (auto c : criteria)
        require(std::find(allowed.begin(), allowed.end(), c) != allowed.end(), ErrorCode::ModeMismatch,
                std::string("config: criterion ") + to_string(c) + " does not apply to mode " + to_string(mode));
    require(s_grid.count >= 1 && s_grid.start > 0.0 && (s_grid.count == 1 || s_grid.stop > s_grid.start),
            ErrorCode::InvalidArgument, "config: S-grid must be positive and increasing");
    require(bin_width > 0.0, ErrorCode::InvalidArgument, "config: bin width must be > 0");
    require(bootstrap_replicas >= 2, ErrorCode::InvalidArgument, "config: need at least 2 bootstrap replicas");
    require(significance_k >= 0.0, ErrorCode::InvalidArgument, "config: significance k must be >= 0");
    require(!s_hi || *s_hi > 0.0, ErrorCode::InvalidArgument, "config: S_hi must be > 0");
}

AnalysisConfig config_from_json(const nlohmann::json& j) {
    AnalysisConfig c;
    try {
        if (j.contains("mode")) {
            const auto m = parse_mode(j.at("mode").get<std::string>());
            require(m.has_value(), ErrorCode::InvalidArgument, "config: unknown mode");
            c.mode = *m;
        }
        if (j.contains("s_grid")) {
            const auto& g = j.at("s_grid");
            if (g.is_string()) {
                c.s_grid = SGridSpec::parse(g.get<std::string>());
            } else {
                c.s_grid.start = g.at("start").get<double>();
                c.s_grid.stop = g.at("stop").get<double>();
                c.s_grid.count = g.at("count").get<int>();
            }
        }
        if (j.contains("criteria")) {
            for (const auto& name : j.at("criteria")) {
                const auto id = parse_criterion(name.get<std::string>());
                require(id.has_value(), ErrorCode::InvalidArgument,
                        "config: unknown criterion " + name.get<std::string>());
                c.criteria.push_back(*id);
            }
        }
        if (j.contains("estimator")) {
            const auto e = parse_estimator(j.at("estimator").get<std::string>());
            require(e.has_value(), ErrorCode::InvalidArgument, "config: unknown estimator");
            c.estimator = *e;
        }
        if (j.contains("bin_width")) c.bin_width = j.at("bin_width").get<double>();
        if (j.contains("bootstrap_replicas")) c.bootstrap_replicas = j.at("bootstrap_replicas").get<std::size_t>();
        if (j.contains("significance_k")) c.significance_k = j.at("significance_k").get<double>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("s_hi") && !j.at("s_hi").is_null()) c.s_hi = j.at("s_hi").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Parse, std::string("config: ") + e.what());
    }
    return c;
}

nlohmann::ordered_json to_json(const AnalysisConfig& c) {
    nlohmann::ordered_json j;
    j["mode"] = to_string(c.mode);
    j["s_grid"] = {{"start", c.s_grid.start}, {"stop", c.s_grid.stop}, {"count", c.s_grid.count}};
    auto names = nlohmann::ordered_json::array();
    for (auto id : c.criteria) names.push_back(to_string(id));
    j["criteria"] = names;
    j["estimator"] = to_string(c.estimator);
    j["bin_width"] = c.bin_width;
    j["bootstrap_replicas"] = c.bootstrap_replicas;
    j["significance_k"] = c.significance_k;
    j["seed"] = c.seed;
    j["s_hi"] = c.s_hi ? nlohmann::ordered_json(*c.s_hi) : nlohmann::ordered_json(nullptr);
    return j;
}

// ---------------------------------------------------------------------------
// JSON rendering

nlohmann::ordered_json to_json(const StateSMax& s) {
    nlohmann::ordered_json j;
    j["criterion"] = to_string(s.criterion);
    j["var_p_like"] = s.var_p_like;
    j["s_max"] = std::isfinite(s.s_max) ? nlohmann::ordered_json(s.s_max) : nlohmann::ordered_json("inf");
    j["result"] = to_json(s.result);
    return j;
}

nlohmann::ordered_json to_json(const CriterionResult& r) {
    nlohmann::ordered_json j;
    j["criterion"] = to_string(r.id);
    j["S"] = std::isfinite(r.S) ? nlohmann::ordered_json(r.S) : nlohmann::ordered_json("inf");
    j["lhs"] = r.lhs;
    j["bound"] = r.bound;
    j["margin"] = r.margin;
    j["violated"] = r.violated;
    if (r.standard_error) j["standard_error"] = *r.standard_error;
    if (r.estimator) j["estimator"] = to_string(*r.estimator);
    return j;
}

nlohmann::ordered_json to_json(const Report& r) {
    nlohmann::ordered_json j;
    j["tool"] = "sscopic";
    j["version"] = kVersion;
    j["config"] = to_json(r.config);
    nlohmann::ordered_json in;
    in["n_x"] = r.input.n_x;
    in["n_p"] = r.input.n_p;
    in["x_mean"] = r.input.x.mean;
    in["x_variance"] = r.input.x.variance;
    in["p_mean"] = r.input.p.mean;
    in["p_variance"] = r.input.p.variance;
    in["var_p_like"] = r.input.var_p_like;
    if (r.input.gain) in["gain"] = *r.input.gain;
    if (r.input.coverage) in["coverage"] = *r.input.coverage;
    j["input"] = in;
    auto crit = nlohmann::ordered_json::array();
    for (const auto& c : r.criteria) {
        nlohmann::ordered_json cj;
        cj["criterion"] = to_string(c.id);
        if (c.s_max) cj["s_max"] = *c.s_max;
        if (c.s_max_certified) cj["s_max_certified"] = *c.s_max_certified;
        auto results = nlohmann::ordered_json::array();
        for (const auto& res : c.results) results.push_back(to_json(res));
        cj["results"] = results;
        crit.push_back(cj);
    }
    j["criteria"] = crit;
    if (r.soundness) j["soundness"] = *r.soundness;
    return j;
}

nlohmann::ordered_json to_json(const FuzzReport& r) {
    nlohmann::ordered_json j;
    j["s_cap"] = r.s_cap;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["components"] = r.components;
    j["assertions"] = r.assertions;
    j["sound"] = r.sound();
    j["violations"] = r.violations;
    j["worst_theorem1_product"] = r.worst_theorem1_product;
    j["worst_theorem1_sum"] = r.worst_theorem1_sum;
    j["min_delta_p"] = r.min_delta_p;
    j["worst_theorem4"] = r.worst_theorem4;
    j["max_var_x_ratio"] = r.max_var_x_ratio;
    j["min_uncertainty_product"] = r.min_uncertainty_product;
    j["worst_dominance"] = r.worst_dominance;
    return j;
}

nlohmann::ordered_json to_json(const ConcavityReport& r) {
    nlohmann::ordered_json j;
    j["civ_merged"] = r.civ_merged;
    j["civ_left"] = r.civ_left;
    j["civ_right"] = r.civ_right;
    j["weighted_parts"] = r.weighted_parts;
    j["gap"] = r.gap;
    j["standard_error"] = r.standard_error;
    j["holds"] = r.holds;
    return j;
}

}  // namespace sscopic
