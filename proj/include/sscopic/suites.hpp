#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sscopic/bootstrap.hpp"

namespace sscopic {

/// Outcome of one oracle suite run by `sscopic verify`.
struct SuiteOutcome {
    std::string name;
    std::size_t cases = 0;
    std::vector<std::string> failures;
    nlohmann::ordered_json detail;

    bool passed() const noexcept { return failures.empty(); }
};

/// Restricted-mixture fuzz at each cap.
SuiteOutcome verify_fuzz(std::span<const double> s_caps, std::size_t trials, std::uint64_t seed);

/// Discretised vacuum and squeezed states (r = 0, 0.5, ..., 2) must give
/// var_x var_p = 1 within the tolerance.
SuiteOutcome verify_grid(double tolerance = 1e-6);

/// Random d x d density matrices with rho(0, 1) forced to zero must decompose
/// with the support conditions exact and reconstruction error below 1e-8;
/// unconstrained ones with |rho(0, 1)| > 1e-6 must be refused.
SuiteOutcome verify_appendix_a(std::size_t cases, std::size_t dim, std::uint64_t seed);

/// Concavity of the conditional inference variance on random merged joint
/// samples, plus the equality cases L = R and wL in {0, 1}.
SuiteOutcome verify_appendix_b(std::size_t cases, std::size_t pairs, std::uint64_t seed,
                               const BootstrapOptions& bootstrap = {});

nlohmann::ordered_json to_json(const SuiteOutcome& s);

}  // namespace sscopic
