#pragma once

// Newton's method on generator parameters, with the variational formulas as
// the analytic Jacobian.

#include <optional>
#include <string>
#include <vector>

#include "schottky/error.hpp"
#include "schottky/fd_oracle.hpp"
#include "schottky/variational.hpp"

namespace schottky {

enum class Part { Real, Imag };
/// Which real components of a complex target enter the residual.
enum class TargetParts { Both, Real, Imag };

const char* to_string(Part p);
const char* to_string(TargetParts p);

/// One real unknown: the real or imaginary part of a generator coordinate.
struct Parameter {
    int generator = 0;
    Coordinate coord = Coordinate::Multiplier;
    Part part = Part::Real;
};

/// b_{js} = value.
struct PeriodTarget {
    int j = 0;
    int s = 0;
    Complex value{0.0};
    TargetParts parts = TargetParts::Both;
};

/// int_from^to dzeta_k = value, along the planned path.
struct IntegralTarget {
    int k = 0;
    Complex from{0.0};
    Complex to{0.0};
    Complex value{0.0};
    TargetParts parts = TargetParts::Both;
};

struct SolverSettings {
    Truncation truncation = Truncation::fixed(8);
    int normalization_nodes = 256;
    QuadratureOptions quadrature{};
    std::optional<Complex> base_point;
    int threads = 1;
};

/// Dense row-major real matrix.
struct RealMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    RealMatrix() = default;
    RealMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

struct JacobianCheck {
    RealMatrix analytic;
    RealMatrix finite_difference;
    double max_relative_discrepancy = 0.0;  // max entry error / max |column|
};

class ModuliProblem {
public:
    ModuliProblem(std::vector<Parameter> parameters, std::vector<PeriodTarget> periods,
                  std::vector<IntegralTarget> integrals, SolverSettings settings = {});

    const std::vector<Parameter>& parameters() const { return params_; }
    const std::vector<PeriodTarget>& period_targets() const { return periods_; }
    const std::vector<IntegralTarget>& integral_targets() const { return integrals_; }
    const SolverSettings& settings() const { return settings_; }
    int residual_size() const;

    /// Checks indices and coordinate kinds against a group.
    void check(const SchottkyGroup& group) const;

    std::vector<double> values(const SchottkyGroup& group) const;
    /// Group with the parameters set to x (other coordinates and D' kept).
    SchottkyGroup with_values(const SchottkyGroup& group, const std::vector<double>& x) const;

    /// Computed target quantities, one complex value per target (periods first).
    std::vector<Complex> quantities(const SchottkyGroup& group) const;
    /// target - computed, realified.
    std::vector<double> residual(const SchottkyGroup& group) const;
    /// d residual / d parameters from the variational formulas.
    RealMatrix jacobian(const SchottkyGroup& group) const;
    /// Analytic Jacobian next to the finite-difference one.
    JacobianCheck jacobian_check(const SchottkyGroup& group, const FDConfig& cfg = {}) const;

private:
    void check_targets(int genus) const;
    std::vector<double> realify(const std::vector<Complex>& q, bool negate_targets) const;

    std::vector<Parameter> params_;
    std::vector<PeriodTarget> periods_;
    std::vector<IntegralTarget> integrals_;
    SolverSettings settings_;
};

struct NewtonOptions {
    int max_iter = 20;
    double tol = 1e-10;
    int max_halvings = 20;
    double max_condition = 1e12;
};

struct SolveIteration {
    std::vector<double> parameters;
    double residual_norm = 0.0;
    double step_norm = 0.0;
    double condition = 0.0;  // of the Jacobian the step came from (0 for the start)
    int halvings = 0;
};

struct SolveTrace {
    std::vector<SolveIteration> iterations;  // iterations[0] is the starting point
    bool converged = false;
    std::string message;

    int steps() const { return static_cast<int>(iterations.size()) - 1; }
};

class SolveError : public Error {
public:
    SolveError(ErrorCode code, const std::string& what, SolveTrace trace)
        : Error(code, what), trace_(std::move(trace)) {}
    const SolveTrace& trace() const { return trace_; }

private:
    SolveTrace trace_;
};

struct SolveResult {
    SchottkyGroup group;
    SolveTrace trace;
};

/// Damped Newton iteration. Stops when the residual norm drops below tol
/// (converged) or after max_iter steps (not converged). Throws SolveError
/// with RankDeficient when cond(J) > max_condition, and with Validation or
/// Convergence when no halving of the step is usable and decreasing.
SolveResult newton_solve(const ModuliProblem& problem, const SchottkyGroup& initial, const NewtonOptions& opts = {});

/// Order of convergence from the residual history: least-squares slope of
/// log r_{k+1} against log r_k over pairs with r_k < upper and r_{k+1} above the
/// round-off floor of the residual (about 1e-13 at default truncation);
/// with a single such pair, log(r_{k+1}/r_k) / log(r_k/r_{k-1}). NaN when
/// neither applies.
double convergence_exponent(const SolveTrace& trace, double upper = 1e-2, double floor = 1e-11);

}  // namespace schottky
