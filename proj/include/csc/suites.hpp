#pragma once

#include <functional>
#include <string>
#include <vector>

#include "csc/analysis.hpp"
#include "csc/fields.hpp"

namespace csc {

// Named verification bundles over a field: each check compares one measured
// quantity against one limit and records the quadrature error estimate that
// went into it, so a report line is auditable on its own.

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double limit = 0.0;    // threshold the measurement was held against
    double err_est = 0.0;  // quadrature error estimate where applicable
    std::string note;      // the numbers behind the verdict
};

struct SuiteReport {
    std::string suite;
    std::vector<CheckResult> checks;
    bool all_pass() const;
};

struct SuiteOptions {
    // Ball radii for the identity and growth passes.  Strictly increasing.
    std::vector<double> radii = {1.0, 5.0, 10.0, 50.0};
    // Cylinder stations s = ln r.  The default keeps away from integer
    // stations, where superposed constructions park their sharp cores.
    std::vector<double> s_grid = {0.0, 1.5, 2.5};
    double rtol = 1e-9;
    int threads = 1;
    int sample_points = 10000;  // curvature scan budget
    // When set, growth rows must clear this target (value >= target(r)).
    std::function<double(double)> growth_target;
};

// Pointwise induced-curvature scan: positivity, boundedness, and the
// closed-form window or constant-curvature expectations where the field
// shape pins them down.
SuiteReport curvature_suite(const SolutionField& f, const SuiteOptions& opt = {});

// Surface-vs-volume identity at each radius, the constant-curvature nullity
// control where it applies, and the limit tail indicator between the two
// largest scales.
SuiteReport pohozaev_suite(const SolutionField& f, const SuiteOptions& opt = {});

// Conformal volume of growing balls: positivity, monotonicity, and the
// prescribed target when one is supplied.
SuiteReport growth_suite(const SolutionField& f, const SuiteOptions& opt = {});

// Transform round trip, the cylinder equation residual, and the energy
// identities at the configured stations.
SuiteReport cylinder_suite(const SolutionField& f, const SuiteOptions& opt = {});

// which: curvature | pohozaev | growth | cylinder | all.
// Throws std::invalid_argument for anything else.
std::vector<SuiteReport> run_suites(const SolutionField& f, const std::string& which,
                                    const SuiteOptions& opt = {});

}  // namespace csc
