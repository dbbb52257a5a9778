#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sscopic/bootstrap.hpp"
#include "sscopic/criteria.hpp"
#include "sscopic/oracle.hpp"
#include "sscopic/stats.hpp"

namespace sscopic {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Sample files: one record per line, decimal text, comma-separated columns,
// '#' comment lines and blank lines ignored.

enum class Layout { SingleColumn, TwoColumn };

std::vector<double> parse_single_column(std::istream& in, const std::string& source = "<stream>");
JointSamples parse_two_column(std::istream& in, const std::string& source = "<stream>");

using Samples = std::variant<std::vector<double>, JointSamples>;
Samples ingest_samples(const std::filesystem::path& path, Layout layout);
std::vector<double> read_single_column(const std::filesystem::path& path);
JointSamples read_two_column(const std::filesystem::path& path);

void write_single_column(std::ostream& out, std::span<const double> values);
void write_two_column(std::ostream& out, const JointSamples& joint);

/// Factor that rescales data so the vacuum reference has unit variance.
double calibration_scale(std::span<const double> vacuum);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

// ---------------------------------------------------------------------------
// Analysis

enum class Mode { Single, BipartiteInference, BipartiteSum };
const char* to_string(Mode m) noexcept;
std::optional<Mode> parse_mode(std::string_view name);

/// Evenly spaced S values, start..stop inclusive.
struct SGridSpec {
    double start = 0.25;
    double stop = 8.0;
    int count = 32;

    std::vector<double> values() const;
    /// "start:stop:count".
    static SGridSpec parse(const std::string& text);
};

struct AnalysisConfig {
    Mode mode = Mode::Single;
    SGridSpec s_grid;
    std::vector<CriterionId> criteria;
    Estimator estimator = Estimator::Linear;
    /// pB bin width for the conditional estimator.
    double bin_width = 0.1;
    std::size_t bootstrap_replicas = 200;
    double significance_k = 3.0;
    std::uint64_t seed = 0;
    /// Upper end of the s_max scan (default 8 standard deviations of x).
    std::optional<double> s_hi;

    /// Throws InvalidArgument on an empty criterion list or bad numbers, and
    /// ModeMismatch on a criterion that does not belong to the mode.
    void validate() const;
};

/// Criteria available for a mode.
std::vector<CriterionId> criteria_for(Mode mode);

AnalysisConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AnalysisConfig& c);

/// Data for one analysis. single: x and p; bipartite-inference: x holds x^A
/// and joint the (pA, pB) pairs; bipartite-sum: x and p hold the normalised
/// sum quadratures.
struct AnalysisInput {
    std::vector<double> x;
    std::vector<double> p;
    std::optional<JointSamples> joint;
};

struct CriterionReport {
    CriterionId id = CriterionId::Theorem1Product;
    /// Binned criteria: one result per S-grid point. Others: a single result.
    std::vector<CriterionResult> results;
    /// Binned criteria: point-estimate supremum of violated S.
    std::optional<double> s_max;
    /// Binned criteria: largest grid S whose violation clears k standard errors.
    std::optional<double> s_max_certified;
};

struct InputSummary {
    std::size_t n_x = 0;
    std::size_t n_p = 0;
    Moments x;
    Moments p;
    /// Variance used in place of var_p (var_p, inference variance, or sum variance).
    double var_p_like = 0.0;
    std::optional<double> gain;
    std::optional<double> coverage;
};

struct Report {
    AnalysisConfig config;
    InputSummary input;
    std::vector<CriterionReport> criteria;
    std::optional<nlohmann::ordered_json> soundness;
};

Report run_analysis(const AnalysisConfig& config, const AnalysisInput& input);

/// Largest certified S predicted for a state model.
struct StateSMax {
    CriterionId criterion = CriterionId::Theorem1Product;
    double var_p_like = 0.0;
    double s_max = 0.0;
    CriterionResult result;
};

/// Two-mode criteria require the two-mode squeezed state and the others a
/// single-mode state (ModeMismatch otherwise).
StateSMax state_smax(const StateModel& state, CriterionId criterion, const SMaxOptions& options = {});
nlohmann::ordered_json to_json(const StateSMax& s);
nlohmann::ordered_json to_json(const CriterionResult& r);
nlohmann::ordered_json to_json(const Report& r);
nlohmann::ordered_json to_json(const FuzzReport& r);
nlohmann::ordered_json to_json(const ConcavityReport& r);

// ---------------------------------------------------------------------------
// Curves

enum class CurveTask { Fig8, Fig10, Fig10Inset, CatSmax };
std::optional<CurveTask> parse_curve_task(std::string_view name);

struct CurveParams {
    double from = 0.0;
    double to = 3.0;
    std::size_t points = 61;
    /// Squeezed-quadrature variance held fixed for the impure-Gaussian scan.
    double var_p = 0.01831563888873418;  // e^-4
};

/// Default abscissa range per task: fig8/cat-smax alpha in [0.05, 3],
/// fig10 r in [0, 3], fig10-inset u in [1, 1.7].
CurveParams default_curve_params(CurveTask task);

struct Curve {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

/// fig8: alpha, var_p of the cat state. cat-smax: alpha, theorem-4 S.
/// fig10: r, binned s_max, theorem-4 S. fig10-inset: u, binned s_max.
Curve emit_curve(CurveTask task, const CurveParams& params);
void write_csv(std::ostream& out, const Curve& curve);

}  // namespace sscopic
