#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sscopic/stats.hpp"

namespace sscopic {

enum class CriterionId {
    Theorem1Product,
    Theorem1Sum,
    Theorem2,
    Theorem3Product,
    Theorem3Sum,
    Theorem4,
    Theorem5a,
    Theorem5b,
    CoherentSuperposition,
};

const char* to_string(CriterionId id) noexcept;
std::optional<CriterionId> parse_criterion(std::string_view name);
/// Criteria that partition x-outcomes into the three bins.
bool is_binned(CriterionId id) noexcept;

/// Which estimator produced an inference variance.
enum class Estimator { Conditional, Linear };
const char* to_string(Estimator e) noexcept;
std::optional<Estimator> parse_estimator(std::string_view name);

/// One evaluation of a certification inequality.
///
/// For product/sum forms margin = bound - lhs, so a positive margin is a
/// certificate. For the non-locatable criteria lhs is the standard deviation
/// (or variance, for the coherent-state criterion) and bound its vacuum
/// value. For CoherentSuperposition, S holds s_alpha (amplitude units).
struct CriterionResult {
    CriterionId id = CriterionId::Theorem1Product;
    double S = 0.0;
    double lhs = 0.0;
    double bound = 0.0;
    bool violated = false;
    double margin = 0.0;
    std::optional<double> standard_error;
    std::optional<Estimator> estimator;
};

/// (var_ave + p0 delta) var_p >= 1.
CriterionResult theorem1_product(const BinnedStats& b, double var_p);

/// var_ave + var_p >= 2 - p0 delta.
CriterionResult theorem1_sum(const BinnedStats& b, double var_p);

/// Theorem-1 product arithmetic with var_p replaced by the inference variance
/// of p^A given measurements on B.
CriterionResult theorem2(const BinnedStats& b_xa, double var_inf_p, Estimator estimator);

enum class Form { Product, Sum };

/// Theorem-1 arithmetic on the normalised sum quadratures (x^A + x^B)/sqrt 2
/// and (p^A + p^B)/sqrt 2.
CriterionResult theorem3(const BinnedStats& b_xsum, double var_p_sum, Form form);

/// Non-locatable certificate from the squeezed standard deviation:
/// S = 2 / delta_p; nontrivial (violated) iff delta_p < 1.
CriterionResult theorem4_smax(double delta_p);

enum class Theorem5Variant { Inference, Sum };

/// Same arithmetic as theorem4_smax for the inferred (5a) or sum-quadrature
/// (5b) standard deviation.
CriterionResult theorem5_smax(double stdev, Theorem5Variant variant);

/// Largest coherent-state separation s_alpha with var_p < 1 / (1 + s_alpha^2).
CriterionResult coherent_superposition_size(double var_p);

/// Dispatch for the binned criteria (theorem1-*, theorem2, theorem3-*).
CriterionResult evaluate_binned(CriterionId id, const BinnedStats& b, double var_p_like,
                                Estimator estimator = Estimator::Linear);

struct SMaxOptions {
    /// Upper end of the scan; default 8 standard deviations of the x-law.
    std::optional<double> s_hi;
    int grid_points = 256;
    double rel_tol = 1e-6;
};

struct SMaxResult {
    /// Supremum of the violated S (0 when no grid point violates).
    double s_max = 0.0;
    /// Evaluation at the violated end of the final bracket (or at the first
    /// grid point when nothing is violated).
    CriterionResult result;
};

/// Grid scan over (0, S_hi] (linear, plus 48 log-spaced points down to
/// 1e-4 of the first linear step) followed by bisection on the outermost violated
/// bracket. Violation is not assumed monotone in S.
SMaxResult smax_binned(const Distribution& dist_x, double var_p_like, CriterionId criterion,
                       const SMaxOptions& options = {});

struct SMaxCurvePoint {
    double abscissa = 0.0;
    double s_max = 0.0;
};

/// s_max of theorem1-product for Gaussian states with var_p held at the given
/// value and var_x = u^2 / var_p, for each uncertainty product u = dx * dp.
std::vector<SMaxCurvePoint> scan_impure_gaussian(std::span<const double> products, double var_p);

/// Ideal squeezed-state curves: s_max of theorem1-product and theorem 4 per r.
struct SqueezedCurvePoint {
    double r = 0.0;
    double s_max_binned = 0.0;
    double s_max_theorem4 = 0.0;
};
std::vector<SqueezedCurvePoint> scan_squeezed(std::span<const double> rs);

}  // namespace sscopic
