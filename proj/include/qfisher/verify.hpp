#pragma once

#include <optional>
#include <string>
#include <vector>

namespace qfisher {

struct VerifyOptions {
    bool fast = false; // thinner grids and fewer random instances
    std::optional<double> tolerance_override;
};

/// One verification check: a named identity, the worst measured residual,
/// the tolerance it was held to, and the criterion group it belongs to.
struct CheckResult {
    int criterion = 0;
    std::string name;
    std::string detail;
    double residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    double elapsed_seconds = 0.0;
};

/// Runs the full self-verification suite: closed-form identities of the
/// Werner family, score coincidences, measurement bounds, and the Monte Carlo
/// Cramer-Rao experiment. Deterministic (fixed internal seeds).
std::vector<CheckResult> run_verification(const VerifyOptions &options = {});

} // namespace qfisher
