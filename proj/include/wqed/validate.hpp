#pragma once

#include <string>
#include <vector>

#include "wqed/types.hpp"

namespace wqed {

// Invariant suite behind `wqed validate`: norm conservation, closed-form
// matches, master-equation/map consistency, measure hierarchy and the Delta
// stationary analysis, all at test resolution.

struct ValidationCheck {
    std::string name;
    double residual = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct ValidationOptions {
    bool fault_skip_mirror_delay = false;  // mutation hook: drops the delay terms
    bool quick = false;                    // coarser grids for unit tests
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

ValidationReport run_validation(const ValidationOptions& opts = {});

}  // namespace wqed
