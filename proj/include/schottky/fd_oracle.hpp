#pragma once

// Central finite differences with Richardson extrapolation along a
// perturbation direction of the generators.

#include <functional>
#include <string>
#include <vector>

#include "schottky/group.hpp"

namespace schottky {

struct FDConfig {
    double base_step = 1e-4;    // in units of 1 / |dS S^-1| (Frobenius, over all generators)
    int richardson_levels = 2;  // step halvings beyond the base step
    int max_shrinks = 10;       // halvings allowed when a perturbed group fails validation
    int threads = 1;

    /// Throws InvalidArgument when base_step <= 1e-9 or levels < 0.
    void check() const;
};

struct FDResult {
    std::vector<Complex> value;
    double error_estimate = 0.0;  // max |change| of the last extrapolation level
    bool monotone = true;         // extrapolation changes decreased level by level
    std::string warning;
    double step = 0.0;            // base step actually used, in units of t
    int shrinks = 0;

    Complex scalar() const { return value.at(0); }
};

using GroupFunction = std::function<std::vector<Complex>(const SchottkyGroup&)>;
using ScalarGroupFunction = std::function<Complex(const SchottkyGroup&)>;

/// d/dt f(group.perturbed(dir, t)) at t = 0. Every perturbed group must be
/// usable; otherwise the step is halved (Validation error after max_shrinks).
FDResult fd_directional(const GroupFunction& f, const SchottkyGroup& group, const PerturbationDirection& dir,
                        const FDConfig& cfg = {});

FDResult fd_directional(const ScalarGroupFunction& f, const SchottkyGroup& group, const PerturbationDirection& dir,
                        const FDConfig& cfg = {});

}  // namespace schottky
