#include "sscopic/criteria.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "sscopic/error.hpp"

namespace sscopic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::pair<CriterionId, std::string_view>, 9> kCriterionNames{{
    {CriterionId::Theorem1Product, "theorem1-product"},
    {CriterionId::Theorem1Sum, "theorem1-sum"},
    {CriterionId::Theorem2, "theorem2"},
    {CriterionId::Theorem3Product, "theorem3-product"},
    {CriterionId::Theorem3Sum, "theorem3-sum"},
    {CriterionId::Theorem4, "theorem4"},
    {CriterionId::Theorem5a, "theorem5a"},
    {CriterionId::Theorem5b, "theorem5b"},
    {CriterionId::CoherentSuperposition, "coherent-superposition"},
}};

CriterionResult product_form(CriterionId id, const BinnedStats& b, double var_p) {
    CriterionResult r;
    r.id = id;
    r.S = b.S;
    r.lhs = (b.var_ave + b.p_zero * b.delta) * var_p;
    r.bound = kProductBound;
    r.margin = r.bound - r.lhs;
    r.violated = r.lhs < r.bound;
    return r;
}

CriterionResult sum_form(CriterionId id, const BinnedStats& b, double var_p) {
    CriterionResult r;
    r.id = id;
    r.S = b.S;
    r.lhs = b.var_ave + var_p;
    r.bound = kSumBound - b.p_zero * b.delta;
    r.margin = r.bound - r.lhs;
    r.violated = r.lhs < r.bound;
    return r;
}

CriterionResult inverse_stdev(CriterionId id, double stdev) {
    require(stdev >= 0.0 && !std::isnan(stdev), ErrorCode::InvalidArgument,
            std::string(to_string(id)) + ": standard deviation must be >= 0");
    CriterionResult r;
    r.id = id;
    r.lhs = stdev;
    r.bound = std::sqrt(kVacuumVariance);
    r.S = stdev > 0.0 ? 2.0 / stdev : kInf;
    r.margin = r.bound - stdev;
    r.violated = stdev < r.bound;
    return r;
}

}  // namespace

const char* to_string(CriterionId id) noexcept {
    for (const auto& [k, v] : kCriterionNames)
        if (k == id) return v.data();
    return "unknown";
}

std::optional<CriterionId> parse_criterion(std::string_view name) {
    for (const auto& [k, v] : kCriterionNames)
        if (v == name) return k;
    return std::nullopt;
}

bool is_binned(CriterionId id) noexcept {
    switch (id) {
        case CriterionId::Theorem1Product:
        case CriterionId::Theorem1Sum:
        case CriterionId::Theorem2:
        case CriterionId::Theorem3Product:
        case CriterionId::Theorem3Sum:
            return true;
        default:
            return false;
    }
}

const char* to_string(Estimator e) noexcept { return e == Estimator::Conditional ? "conditional" : "linear"; }

std::optional<Estimator> parse_estimator(std::string_view name) {
    if (name == "conditional") return Estimator::Conditional;
    if (name == "linear") return Estimator::Linear;
    return std::nullopt;
}

CriterionResult theorem1_product(const BinnedStats& b, double var_p) {
    require(var_p > 0.0, ErrorCode::InvalidArgument, "theorem1_product: var_p must be > 0");
    return product_form(CriterionId::Theorem1Product, b, var_p);
}

CriterionResult theorem1_sum(const BinnedStats& b, double var_p) {
    require(var_p >= 0.0, ErrorCode::InvalidArgument, "theorem1_sum: var_p must be >= 0");
    return sum_form(CriterionId::Theorem1Sum, b, var_p);
}

CriterionResult theorem2(const BinnedStats& b_xa, double var_inf_p, Estimator estimator) {
    require(var_inf_p > 0.0, ErrorCode::InvalidArgument, "theorem2: inference variance must be > 0");
    auto r = product_form(CriterionId::Theorem2, b_xa, var_inf_p);
    r.estimator = estimator;
    return r;
}

CriterionResult theorem3(const BinnedStats& b_xsum, double var_p_sum, Form form) {
    if (form == Form::Product) {
        require(var_p_sum > 0.0, ErrorCode::InvalidArgument, "theorem3: var_p_sum must be > 0");
        return product_form(CriterionId::Theorem3Product, b_xsum, var_p_sum);
    }
    require(var_p_sum >= 0.0, ErrorCode::InvalidArgument, "theorem3: var_p_sum must be >= 0");
    return sum_form(CriterionId::Theorem3Sum, b_xsum, var_p_sum);
}

CriterionResult theorem4_smax(double delta_p) { return inverse_stdev(CriterionId::Theorem4, delta_p); }

CriterionResult theorem5_smax(double stdev, Theorem5Variant variant) {
    return inverse_stdev(variant == Theorem5Variant::Inference ? CriterionId::Theorem5a : CriterionId::Theorem5b,
                         stdev);
}

CriterionResult coherent_superposition_size(double var_p) {
    require(var_p > 0.0, ErrorCode::InvalidArgument, "coherent_superposition_size: var_p must be > 0");
    CriterionResult r;
    r.id = CriterionId::CoherentSuperposition;
    r.lhs = var_p;
    r.bound = kVacuumVariance;
    r.margin = r.bound - var_p;
    r.violated = var_p < r.bound;
    r.S = r.violated ? std::sqrt(1.0 / var_p - 1.0) : 0.0;
    return r;
}

CriterionResult evaluate_binned(CriterionId id, const BinnedStats& b, double var_p_like, Estimator estimator) {
    switch (id) {
        case CriterionId::Theorem1Product: return theorem1_product(b, var_p_like);
        case CriterionId::Theorem1Sum: return theorem1_sum(b, var_p_like);
        case CriterionId::Theorem2: return theorem2(b, var_p_like, estimator);
        case CriterionId::Theorem3Product: return theorem3(b, var_p_like, Form::Product);
        case CriterionId::Theorem3Sum: return theorem3(b, var_p_like, Form::Sum);
        default: break;
    }
    fail(ErrorCode::InvalidArgument, std::string("evaluate_binned: ") + to_string(id) + " is not a binned criterion");
}

namespace {

constexpr int kLogPoints = 48;
constexpr double kLogSpan = 1e4;

}  // namespace

SMaxResult smax_binned(const Distribution& dist_x, double var_p_like, CriterionId criterion,
                       const SMaxOptions& options) {
    require(var_p_like > 0.0, ErrorCode::InvalidArgument, "smax_binned: var_p must be > 0");
    require(is_binned(criterion), ErrorCode::InvalidArgument,
            std::string("smax_binned: ") + to_string(criterion) + " is not a binned criterion");
    require(options.grid_points >= 2 && options.rel_tol > 0.0, ErrorCode::InvalidArgument,
            "smax_binned: bad scan options");
    const double s_hi = options.s_hi.value_or(8.0 * dist_x.stdev());
    require(s_hi > 0.0 && std::isfinite(s_hi), ErrorCode::InvalidArgument, "smax_binned: S_hi must be > 0");

    const auto eval = [&](double S) { return evaluate_binned(criterion, bin_stats(dist_x, S), var_p_like); };
    // Linear grid plus a log-spaced run below its first point: near a cutoff the
    // violated window shrinks toward S = 0 and would slip between linear points.
    const int n = options.grid_points;
    std::vector<double> grid;
    const double first = s_hi / n;
    for (int k = kLogPoints; k >= 1; --k) grid.push_back(first * std::pow(kLogSpan, -static_cast<double>(k) / kLogPoints));
    for (int k = 1; k <= n; ++k) grid.push_back(s_hi * static_cast<double>(k) / n);

    std::size_t outer = grid.size();
    CriterionResult outer_result;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        auto r = eval(grid[k]);
        if (r.violated) {
            outer = k;
            outer_result = std::move(r);
        }
    }
    if (outer == grid.size()) return {0.0, eval(first)};
    if (outer + 1 == grid.size()) return {s_hi, outer_result};

    double lo = grid[outer], hi = grid[outer + 1];
    CriterionResult lo_result = outer_result;
    while (hi - lo > options.rel_tol * lo) {
        const double mid = 0.5 * (lo + hi);
        auto r = eval(mid);
        if (r.violated) {
            lo = mid;
            lo_result = std::move(r);
        } else {
            hi = mid;
        }
    }
    return {hi, lo_result};
}

std::vector<SMaxCurvePoint> scan_impure_gaussian(std::span<const double> products, double var_p) {
    require(var_p > 0.0, ErrorCode::InvalidArgument, "scan_impure_gaussian: var_p must be > 0");
    std::vector<SMaxCurvePoint> out;
    out.reserve(products.size());
    for (double u : products) {
        require(u >= 1.0, ErrorCode::InvalidArgument, "scan_impure_gaussian: uncertainty products must be >= 1");
        const auto dist = Distribution::gaussian(0.0, u * u / var_p);
        out.push_back({u, smax_binned(dist, var_p, CriterionId::Theorem1Product).s_max});
    }
    return out;
}

std::vector<SqueezedCurvePoint> scan_squeezed(std::span<const double> rs) {
    std::vector<SqueezedCurvePoint> out;
    out.reserve(rs.size());
    for (double r : rs) {
        require(r >= 0.0, ErrorCode::InvalidArgument, "scan_squeezed: r must be >= 0");
        const double sigma = std::exp(2.0 * r);
        const auto dist = Distribution::gaussian(0.0, sigma);
        out.push_back({r, smax_binned(dist, 1.0 / sigma, CriterionId::Theorem1Product).s_max,
                       theorem4_smax(std::sqrt(1.0 / sigma)).S});
    }
    return out;
}

}  // namespace sscopic
