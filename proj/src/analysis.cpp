#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "sscopic/error.hpp"
#include "sscopic/io.hpp"
#include "sscopic/states.hpp"

namespace sscopic {

namespace {

// Variance playing the role of var_p for the mode, from (possibly reweighted) data.
struct VarianceEstimate {
    double value = 0.0;
    std::optional<double> gain;
    std::optional<double> coverage;
};

// Sorted sample cut at every S-grid bin edge. A bootstrap replica then only
// needs per-bucket weighted sums, gathered in one sequential pass.
class BucketedSample {
public:
    BucketedSample(std::span<const double> sorted, const std::vector<double>& grid) : values_(sorted) {
        const std::size_t n = sorted.size();
        long double sum = 0;
        for (double v : sorted) sum += v;
        shift_ = static_cast<double>(sum / n);
        // x <= -S/2 goes left of the lower cut, x >= S/2 right of the upper cut.
        for (double S : grid) {
            const auto lo = std::upper_bound(sorted.begin(), sorted.end(), -0.5 * S) - sorted.begin();
            const auto hi = std::lower_bound(sorted.begin(), sorted.end(), 0.5 * S) - sorted.begin();
            cuts_.push_back({static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))});
        }
        edges_ = {0, n};
        for (const auto& [lo, hi] : cuts_) {
            edges_.push_back(lo);
            edges_.push_back(hi);
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    std::vector<BinnedStats> replica(const std::vector<double>& grid, std::span<const double> w) const {
        const std::size_t buckets = edges_.size();
        std::vector<double> cw(buckets, 0.0), cx(buckets, 0.0), cxx(buckets, 0.0);
        for (std::size_t k = 0; k + 1 < buckets; ++k) {
            double a = 0.0, b = 0.0, c = 0.0;
            for (std::size_t i = edges_[k]; i < edges_[k + 1]; ++i) {
                const double d = values_[i] - shift_;
                a += w[i];
                b += w[i] * d;
                c += w[i] * d * d;
            }
            cw[k + 1] = cw[k] + a;
            cx[k + 1] = cx[k] + b;
            cxx[k + 1] = cxx[k] + c;
        }
        const auto at = [&](std::size_t pos) {
            return static_cast<std::size_t>(std::lower_bound(edges_.begin(), edges_.end(), pos) - edges_.begin());
        };
        const double total = cw.back();
        const auto region = [&](std::size_t i, std::size_t j) {
            const double m = cw[at(j)] - cw[at(i)];
            if (!(m > 0.0)) return RegionMoments{0.0, std::nan(""), std::nan("")};
            const double mean = (cx[at(j)] - cx[at(i)]) / m;
            const double var = (cxx[at(j)] - cxx[at(i)]) / m - mean * mean;
            return RegionMoments{m / total, mean + shift_, std::max(0.0, var)};
        };
        std::vector<BinnedStats> out;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto [lo, hi] = cuts_[g];
            out.push_back(assemble_binned(grid[g], region(0, lo), region(lo, hi), region(hi, values_.size())));
        }
        return out;
    }

private:
    std::span<const double> values_;
    double shift_ = 0.0;
    std::vector<std::pair<std::size_t, std::size_t>> cuts_;
    std::vector<std::size_t> edges_;
};

double weighted_variance(std::span<const double> v, std::span<const double> w) {
    long double sw = 0, sx = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        sw += w[i];
        sx += w[i] * v[i];
    }
    const double mean = static_cast<double>(sx / sw);
    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) ss += w[i] * (v[i] - mean) * (v[i] - mean);
    return ss / static_cast<double>(sw);
}

class Estimators {
public:
    Estimators(const AnalysisConfig& config, const AnalysisInput& input)
        : config_(config), x_(input.x) {
        if (config.mode == Mode::BipartiteInference) {
            joint_ = *input.joint;
            const auto pb = joint_->pb();
            origin_ = *std::min_element(pb.begin(), pb.end());
        } else {
            p_.emplace(input.p);
        }
    }

    const SampleSummary& x() const { return x_; }
    std::size_t n_x() const { return x_.size(); }
    std::size_t n_p() const { return joint_ ? joint_->size() : p_->size(); }
    Moments p_moments() const {
        if (p_) return p_->moments();
        const auto pa = joint_->pa();
        return SampleSummary(pa).moments();
    }

    VarianceEstimate variance(const JointSamples* joint, const SampleSummary* p) const {
        VarianceEstimate v;
        if (p != nullptr) {
            v.value = p->moments().variance;
            return v;
        }
        if (config_.estimator == Estimator::Linear) {
            v.gain = optimal_gain(*joint);
            v.value = linear_inference_variance(*joint, *v.gain);
        } else {
            const auto c = conditional_inference_variance(*joint, config_.bin_width, origin_);
            v.value = c.variance;
            v.coverage = c.coverage;
        }
        return v;
    }

    VarianceEstimate point() const { return variance(joint_ ? &*joint_ : nullptr, p_ ? &*p_ : nullptr); }

    VarianceEstimate replica(std::span<const double> w) const {
        if (joint_) {
            const auto j = joint_->reweighted(w);
            return variance(&j, nullptr);
        }
        VarianceEstimate v;
        v.value = weighted_variance(p_->values(), w);
        return v;
    }

private:
    const AnalysisConfig& config_;
    SampleSummary x_;
    std::optional<SampleSummary> p_;
    std::optional<JointSamples> joint_;
    double origin_ = 0.0;
};

CriterionResult evaluate_scalar(CriterionId id, double var) {
    require(var > 0.0, ErrorCode::DegenerateInput, "analysis: variance estimate is not positive");
    switch (id) {
        case CriterionId::Theorem4: return theorem4_smax(std::sqrt(var));
        case CriterionId::Theorem5a: return theorem5_smax(std::sqrt(var), Theorem5Variant::Inference);
        case CriterionId::Theorem5b: return theorem5_smax(std::sqrt(var), Theorem5Variant::Sum);
        case CriterionId::CoherentSuperposition: return coherent_superposition_size(var);
        default: break;
    }
    fail(ErrorCode::InvalidArgument, std::string("analysis: ") + to_string(id) + " is binned");
}

void check_input(const AnalysisConfig& config, const AnalysisInput& input) {
    const char* mode = to_string(config.mode);
    require(input.x.size() >= 2, ErrorCode::ModeMismatch, std::string(mode) + " mode needs an x sample set");
    if (config.mode == Mode::BipartiteInference) {
        require(input.joint.has_value(), ErrorCode::ModeMismatch,
                "bipartite-inference mode needs (pA, pB) joint samples");
    } else {
        require(input.p.size() >= 2, ErrorCode::ModeMismatch, std::string(mode) + " mode needs a p sample set");
        require(!input.joint.has_value(), ErrorCode::ModeMismatch,
                std::string(mode) + " mode does not take joint samples");
    }
}

// Replica margins: margins[slot][replica], one slot per (criterion, S) pair.
// Replicas where the estimator cannot be formed are NaN and dropped.
std::vector<std::vector<double>> bootstrap_margins(const AnalysisConfig& config, const Estimators& est,
                                                   const std::vector<double>& grid) {
    std::size_t slots = 0;
    for (auto id : config.criteria) slots += is_binned(id) ? grid.size() : 1;
    const std::size_t reps = config.bootstrap_replicas;
    std::vector<std::vector<double>> margins(slots, std::vector<double>(reps, std::nan("")));
    const BucketedSample buckets(est.x().values(), grid);

    auto run = [&](std::size_t b) {
        auto rng = seeded_rng(derive_seed(config.seed, b));
        const auto wx = multinomial_weights(est.n_x(), rng);
        const auto wp = multinomial_weights(est.n_p(), rng);
        VarianceEstimate v;
        try {
            v = est.replica(wp);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InsufficientConditioning || e.code() == ErrorCode::DegenerateConditioner)
                return;
            throw;
        }
        if (!(v.value > 0.0)) return;
        const auto bins = buckets.replica(grid, wx);
        std::size_t slot = 0;
        for (auto id : config.criteria) {
            if (is_binned(id)) {
                for (const auto& bs : bins)
                    margins[slot++][b] = evaluate_binned(id, bs, v.value, config.estimator).margin;
            } else {
                margins[slot++][b] = evaluate_scalar(id, v.value).margin;
            }
        }
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t b = next++; b < reps; b = next++) run(b);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return margins;
}

double standard_error(const std::vector<double>& replicas) {
    std::vector<double> kept;
    for (double m : replicas)
        if (std::isfinite(m)) kept.push_back(m);
    require(kept.size() >= 2, ErrorCode::InsufficientConditioning,
            "analysis: fewer than 2 bootstrap replicas could be evaluated");
    return replica_standard_error(kept);
}

}  // namespace

Report run_analysis(const AnalysisConfig& config, const AnalysisInput& input) {
    config.validate();
    check_input(config, input);

    const Estimators est(config, input);
    const auto point = est.point();
    require(point.value > 0.0, ErrorCode::DegenerateInput, "analysis: variance estimate is not positive");
    const auto grid = config.s_grid.values();
    const auto margins = bootstrap_margins(config, est, grid);

    Report report;
    report.config = config;
    report.input.n_x = est.n_x();
    report.input.n_p = est.n_p();
    report.input.x = est.x().moments();
    report.input.p = est.p_moments();
    report.input.var_p_like = point.value;
    report.input.gain = point.gain;
    report.input.coverage = point.coverage;

    // Claimed violations must clear k bootstrap standard errors.
    auto certify = [&](CriterionResult r, const std::vector<double>& reps) {
        r.standard_error = standard_error(reps);
        r.violated = r.violated && r.margin > config.significance_k * *r.standard_error;
        return r;
    };

    std::optional<Distribution> x_law;
    std::size_t slot = 0;
    for (auto id : config.criteria) {
        CriterionReport cr;
        cr.id = id;
        if (is_binned(id)) {
            double certified = 0.0;
            for (double S : grid) {
                auto r = evaluate_binned(id, est.x().bin_stats(S), point.value, config.estimator);
                if (id != CriterionId::Theorem2) r.estimator.reset();
                r = certify(r, margins[slot++]);
                if (r.violated) certified = std::max(certified, S);
                cr.results.push_back(r);
            }
            if (!x_law) x_law = Distribution::empirical(input.x);
            SMaxOptions opts;
            opts.s_hi = config.s_hi;
            cr.s_max = smax_binned(*x_law, point.value, id, opts).s_max;
            cr.s_max_certified = certified;
        } else {
            auto r = evaluate_scalar(id, point.value);
            if (id == CriterionId::Theorem5a) r.estimator = config.estimator;
            cr.results.push_back(certify(r, margins[slot++]));
        }
        report.criteria.push_back(std::move(cr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Curves

std::optional<CurveTask> parse_curve_task(std::string_view name) {
    if (name == "fig8") return CurveTask::Fig8;
    if (name == "fig10") return CurveTask::Fig10;
    if (name == "fig10-inset") return CurveTask::Fig10Inset;
    if (name == "cat-smax") return CurveTask::CatSmax;
    return std::nullopt;
}

CurveParams default_curve_params(CurveTask task) {
    CurveParams p;
    switch (task) {
        case CurveTask::Fig8:
        case CurveTask::CatSmax:
            p.from = 0.05;
            p.to = 3.0;
            break;
        case CurveTask::Fig10:
            p.from = 0.0;
            p.to = 3.0;
            break;
        case CurveTask::Fig10Inset:
            p.from = 1.0;
            p.to = 1.7;
            p.points = 71;
            break;
    }
    return p;
}

Curve emit_curve(CurveTask task, const CurveParams& params) {
    require(params.points >= 2 && params.to > params.from, ErrorCode::InvalidArgument,
            "curve: need at least 2 points on an increasing range");
    std::vector<double> axis(params.points);
    for (std::size_t k = 0; k < params.points; ++k)
        axis[k] = (params.from * static_cast<double>(params.points - 1 - k) + params.to * static_cast<double>(k)) /
                  static_cast<double>(params.points - 1);

    Curve c;
    switch (task) {
        case CurveTask::Fig8:
        case CurveTask::CatSmax: {
            require(params.from > 0.0, ErrorCode::InvalidArgument, "curve: alpha must be > 0");
            c.header = task == CurveTask::Fig8 ? std::vector<std::string>{"alpha", "var_p"}
                                               : std::vector<std::string>{"alpha", "S"};
            for (double a : axis) {
                const double var = pdf_p(StateModel(Cat{a})).moments().variance;
                const double y = task == CurveTask::Fig8 ? var : theorem4_smax(std::sqrt(var)).S;
                c.rows.push_back({a, y});
            }
            break;
        }
        case CurveTask::Fig10: {
            require(params.from >= 0.0, ErrorCode::InvalidArgument, "curve: r must be >= 0");
            c.header = {"r", "s_max_binned", "s_max_theorem4"};
            for (const auto& pt : scan_squeezed(axis)) c.rows.push_back({pt.r, pt.s_max_binned, pt.s_max_theorem4});
            break;
        }
        case CurveTask::Fig10Inset: {
            require(params.from >= 1.0 && params.var_p > 0.0, ErrorCode::InvalidArgument,
                    "curve: uncertainty product must be >= 1 and var_p > 0");
            c.header = {"u", "s_max"};
            for (const auto& pt : scan_impure_gaussian(axis, params.var_p)) c.rows.push_back({pt.abscissa, pt.s_max});
            break;
        }
    }
    return c;
}

void write_csv(std::ostream& out, const Curve& curve) {
    for (std::size_t i = 0; i < curve.header.size(); ++i) out << (i ? "," : "") << curve.header[i];
    out << '\n';
    for (const auto& row : curve.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

StateSMax state_smax(const StateModel& state, CriterionId id, const SMaxOptions& options) {
    const bool needs_two_mode = id == CriterionId::Theorem2 || id == CriterionId::Theorem3Product ||
                                id == CriterionId::Theorem3Sum || id == CriterionId::Theorem5a ||
                                id == CriterionId::Theorem5b;
    require(state.is<TwoModeSqueezed>() == needs_two_mode, ErrorCode::ModeMismatch,
            std::string(to_string(id)) + " does not apply to " + state.name());

    std::optional<Distribution> law_x;
    StateSMax out;
    out.criterion = id;
    switch (id) {
        case CriterionId::Theorem2:
        case CriterionId::Theorem5a:
            law_x = pdf_x(state);
            out.var_p_like = tmss_inference(state.as<TwoModeSqueezed>().r).variance;
            break;
        case CriterionId::Theorem3Product:
        case CriterionId::Theorem3Sum:
        case CriterionId::Theorem5b: {
            auto [sx, sp] = sum_quadrature_laws(state);
            law_x = sx;
            out.var_p_like = sp.moments().variance;
            break;
        }
        default:
            law_x = pdf_x(state);
            out.var_p_like = pdf_p(state).moments().variance;
    }

    if (is_binned(id)) {
        auto r = smax_binned(*law_x, out.var_p_like, id, options);
        out.s_max = r.s_max;
        out.result = std::move(r.result);
    } else {
        out.result = evaluate_scalar(id, out.var_p_like);
        out.s_max = out.result.S;
    }
    return out;
}

}  // namespace sscopic
