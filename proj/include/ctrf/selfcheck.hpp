#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ctrf {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct SelfCheckOptions {
    std::uint64_t seed = 2024;
    /// Negative control: swap two columns of the merged-core unfolding used by
    /// the factorization check, which must then fail.
    bool corrupt_unfolding = false;
};

/// Fast invariant suite: merged-core factorization of block unfoldings,
/// cyclic-shift invariance, core/tensor rank bound, SVT and CG oracles.
std::vector<CheckResult> run_self_check(const SelfCheckOptions& opts = {});

}  // namespace ctrf
