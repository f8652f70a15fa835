#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "schottky.h"

namespace {

using cli::Config;
using cli::InputError;
using cli::json;

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct DomainError : std::runtime_error {
    sk_status status;
    DomainError(sk_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(sk_status st, const char* what) {
    if (st == SK_OK) return;
    const std::string msg = std::string(what) + ": " + sk_last_error_message();
    if (st == SK_INVALID_ARGUMENT) throw InputError(msg);
    throw DomainError(st, msg);
}

struct GroupDeleter {
    void operator()(sk_group* g) const { sk_group_destroy(g); }
};
using GroupPtr = std::unique_ptr<sk_group, GroupDeleter>;

struct Globals {
    int threads = 0;
    unsigned long long seed = 1;
    std::string out;
    bool timings = false;
};

// Flags overriding the config's numerical settings.
struct SettingsFlags {
    std::optional<int> len;
    std::optional<double> tol;
    std::optional<int> nodes;
    std::optional<std::string> base_point;

    void add(CLI::App* app) {
        app->add_option("--len", len, "Fixed maximal word length")->check(CLI::Range(0, 16));
        app->add_option("--tol", tol, "Adaptive truncation tail tolerance")->check(CLI::PositiveNumber);
        app->add_option("--nodes", nodes, "Trapezoid nodes per boundary circle")->check(CLI::Range(8, 1 << 20));
        app->add_option("--base-point", base_point, "Base point for b-periods, as re,im");
        app->get_option("--len")->excludes("--tol");
    }

    void apply(sk_settings& s) const {
        if (len) {
            s.max_word_len = *len;
            s.tail_tolerance = 0.0;
        }
        if (tol) s.tail_tolerance = *tol;
        if (nodes) {
            s.nodes = *nodes;
            s.max_nodes = std::max(s.max_nodes, *nodes);
        }
        if (base_point) {
            s.has_base_point = 1;
            s.base_point = cli::parse_complex_literal(*base_point, "--base-point");
        }
    }
};

struct DifferentialFlags {
    std::string kind = "holomorphic";
    int index = 1;
    std::string z = "0,0";
    std::string z_prime = "0,0";

    void add(CLI::App* app) {
        app->add_option("--differential", kind, "holomorphic or third-kind")
            ->check(CLI::IsMember({"holomorphic", "third-kind"}));
        app->add_option("--index", index, "Holomorphic basis element (1-based)")->check(CLI::PositiveNumber);
        app->add_option("--pole", z, "Third-kind pole with residue +1, as re,im");
        app->add_option("--pole-prime", z_prime, "Third-kind pole with residue -1, as re,im");
    }

    sk_differential get(int genus) const {
        sk_differential d{};
        if (kind == "holomorphic") {
            if (index > genus) throw InputError("--index: expected 1.." + std::to_string(genus));
            d.kind = SK_HOLOMORPHIC;
            d.index = index - 1;
        } else {
            d.kind = SK_THIRD_KIND;
            d.z = cli::parse_complex_literal(z, "--pole");
            d.z_prime = cli::parse_complex_literal(z_prime, "--pole-prime");
        }
        return d;
    }

    json describe() const {
        if (kind == "holomorphic") return {{"kind", kind}, {"index", index}};
        return {{"kind", kind},
                {"pole", cli::complex_to_json(cli::parse_complex_literal(z, "--pole"))},
                {"pole_prime", cli::complex_to_json(cli::parse_complex_literal(z_prime, "--pole-prime"))}};
    }
};

class Timer {
public:
    void lap(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        laps_.emplace_back(name, std::chrono::duration<double>(now - last_).count());
        last_ = now;
    }
    json to_json() const {
        json j = json::object();
        double total = 0.0;
        for (const auto& [n, t] : laps_) {
            j[n] = t;
            total += t;
        }
        j["total"] = total;
        return j;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
    std::vector<std::pair<std::string, double>> laps_;
};

struct Session {
    const Globals& globals;
    std::string config_path;
    Config config;
    GroupPtr group;
    json report;
    Timer timer;

    sk_settings settings() const {
        sk_settings s = config.settings;
        s.threads = globals.threads > 0 ? globals.threads
                                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
        return s;
    }
    int genus() const { return config.genus; }
};

json validation_json(const sk_group* g) {
    sk_validation_summary sum{};
    check(sk_group_validation(g, &sum), "validation");
    json checks = json::array();
    json failed = json::array();
    for (int i = 0; i < sum.check_count; ++i) {
        sk_validation_check c{};
        check(sk_group_check(g, i, &c), "validation");
        checks.push_back({{"name", c.name}, {"passed", c.passed != 0}, {"margin", c.margin}, {"detail", c.detail}});
        if (!c.passed) failed.push_back(c.name);
    }
    json j = {{"status", sum.usable ? "PASS" : "FAIL"},
              {"usable", sum.usable != 0},
              {"structural_ok", sum.structural_ok != 0},
              {"min_disk_gap", sum.min_disk_gap},
              {"max_boundary_residual", sum.max_boundary_residual},
              {"failed", failed},
              {"checks", checks}};
    const std::string structural = sk_group_structural_error(g);
    if (!structural.empty()) j["structural_error"] = structural;
    return j;
}

// Loads and validates the group; the report starts with the echoed config.
void open_session(Session& s, const std::string& command, const SettingsFlags* flags) {
    s.config = cli::parse_config(cli::read_json_file(s.config_path), s.config_path);
    if (flags != nullptr) flags->apply(s.config.settings);
    sk_group* raw = nullptr;
    check(sk_group_create(s.config.genus, s.config.generators.data(), s.config.disks.data(), &raw), "group");
    s.group.reset(raw);
    s.report = json::object();
    s.report["schema"] = cli::kReportSchema;
    s.report["version"] = sk_version();
    s.report["command"] = command;
    s.report["config"] = cli::config_to_json(s.config);
    s.report["validation"] = validation_json(s.group.get());
    s.timer.lap("load");
}

void require_usable(const Session& s) {
    if (!sk_group_usable(s.group.get())) {
        std::string names;
        for (const auto& n : s.report["validation"]["failed"]) names += (names.empty() ? "" : "; ") + n.get<std::string>();
        throw DomainError(SK_VALIDATION, "group fails validation: " + names);
    }
}

json complex_matrix(const std::vector<sk_complex>& m, int rows, int cols) {
    return cli::matrix_to_json(m.data(), rows, cols);
}

json deltas_json(const std::vector<sk_complex>& d) {
    json out = json::array();
    for (std::size_t l = 0; l + 3 < d.size(); l += 4) out.push_back(cli::matrix_to_json(d.data() + l, 2, 2));
    return out;
}

std::complex<double> cx(sk_complex z) { return {z.re, z.im}; }

// ---- commands ---------------------------------------------------------------

void cmd_validate(Session& s) {
    open_session(s, "validate", nullptr);
    require_usable(s);
}

void cmd_periods(Session& s, const SettingsFlags& flags) {
    open_session(s, "periods", &flags);
    require_usable(s);
    const int g = s.genus();
    const sk_settings st = s.settings();
    std::vector<sk_complex> b(static_cast<std::size_t>(g * g));
    sk_period_info info{};
    check(sk_period_matrix(s.group.get(), &st, b.data(), &info), "period matrix");
    s.timer.lap("period_matrix");
    std::vector<sk_complex> a(static_cast<std::size_t>(g * g));
    sk_quadrature_info q{};
    check(sk_a_period_matrix(s.group.get(), &st, a.data(), &q), "a-period matrix");
    s.timer.lap("a_periods");

    double identity_error = 0.0;
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < g; ++k)
            identity_error = std::max(identity_error, std::abs(cx(a[j * g + k]) - (j == k ? 1.0 : 0.0)));
    json history = json::array();
    for (int i = 0; i < q.history_len; ++i)
        history.push_back({{"nodes", q.history_nodes[i]}, {"change", q.history_change[i]}});

    s.report["result"] = {
        {"period_matrix", complex_matrix(b, g, g)},
        {"period_info",
         {{"max_word_len", info.max_word_len},
          {"tail_estimate", info.tail_estimate},
          {"base_point", cli::complex_to_json(info.base_point)},
          {"symmetry_residual", info.symmetry_residual}}},
        {"a_period_matrix", complex_matrix(a, g, g)},
        {"a_period_info",
         {{"nodes", q.nodes},
          {"last_change", q.last_change},
          {"converged", q.converged != 0},
          {"identity_error", identity_error},
          {"history", history}}},
    };
}

struct PathFlags {
    std::string from;
    std::string to;
    void add(CLI::App* app, bool required) {
        auto* f = app->add_option("--from", from, "Path start, as re,im");
        auto* t = app->add_option("--to", to, "Path end, as re,im");
        if (required) {
            f->required();
            t->required();
        }
    }
};

void cmd_integrate(Session& s, const SettingsFlags& flags, const DifferentialFlags& diff, const PathFlags& path) {
    open_session(s, "integrate", &flags);
    require_usable(s);
    const sk_differential d = diff.get(s.genus());
    const sk_complex from = cli::parse_complex_literal(path.from, "--from");
    const sk_complex to = cli::parse_complex_literal(path.to, "--to");
    const sk_settings st = s.settings();
    sk_complex value{};
    check(sk_integrate(s.group.get(), &st, &d, from, to, &value), "integral");
    s.timer.lap("integral");
    s.report["result"] = {{"differential", diff.describe()},
                          {"from", cli::complex_to_json(from)},
                          {"to", cli::complex_to_json(to)},
                          {"value", cli::complex_to_json(value)}};
}

struct VaryFlags {
    std::string direction_file;
    bool random = false;
    std::string target = "period";
    bool check_fd = false;
    double fd_step = 0.0;
    int fd_levels = 0;

    void add(CLI::App* app) {
        auto* file = app->add_option("--direction", direction_file, "Direction file")->check(CLI::ExistingFile);
        auto* rnd = app->add_flag("--random", random, "Random direction X*S drawn from --seed");
        file->excludes(rnd);
        app->add_option("--target", target, "period or integral")->check(CLI::IsMember({"period", "integral"}));
        app->add_flag("--check-fd", check_fd, "Compare with Richardson central differences");
        app->add_option("--fd-step", fd_step, "Relative finite-difference base step")->check(CLI::PositiveNumber);
        app->add_option("--fd-levels", fd_levels, "Richardson levels")->check(CLI::Range(0, 8));
    }
};

std::vector<sk_complex> random_direction(const Session& s) {
    std::mt19937_64 rng(s.globals.seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<sk_complex> out;
    for (int l = 0; l < s.genus(); ++l) {
        sk_complex m[4];
        check(sk_group_generator_matrix(s.group.get(), l, m), "generator");
        std::complex<double> x[4];
        for (auto& e : x) {
            const double re = n(rng);
            e = {re, n(rng)};
        }
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                const auto v = x[2 * r] * cx(m[c]) + x[2 * r + 1] * cx(m[2 + c]);
                out.push_back({v.real(), v.imag()});
            }
    }
    return out;
}

json relative_discrepancy(const std::vector<sk_complex>& a, const std::vector<sk_complex>& f, int rows, int cols,
                          double& worst) {
    double scale = 0.0;
    for (const auto& z : f) scale = std::max(scale, std::abs(cx(z)));
    json out = json::array();
    worst = 0.0;
    for (int r = 0; r < rows; ++r) {
        json row = json::array();
        for (int c = 0; c < cols; ++c) {
            const std::size_t i = static_cast<std::size_t>(r * cols + c);
            const double den = std::max(std::abs(cx(f[i])), 1e-300);
            const double rel = std::abs(cx(a[i]) - cx(f[i])) / den;
            worst = std::max(worst, rel);
            row.push_back(rel);
        }
        out.push_back(row);
    }
    return out;
}

void cmd_vary(Session& s, const SettingsFlags& flags, const DifferentialFlags& diff, const PathFlags& path,
              const VaryFlags& vf) {
    open_session(s, "vary", &flags);
    if (vf.direction_file.empty() && !vf.random) throw InputError("vary: give --direction FILE or --random");
    require_usable(s);
    const int g = s.genus();
    const sk_settings st = s.settings();

    std::vector<sk_complex> deltas;
    json direction;
    if (vf.random) {
        deltas = random_direction(s);
        direction = {{"source", "random"}, {"seed", s.globals.seed}};
    } else {
        deltas = cli::parse_direction(cli::read_json_file(vf.direction_file), vf.direction_file, s.group.get());
        direction = {{"source", vf.direction_file}};
    }
    direction["deltas"] = deltas_json(deltas);

    sk_fd_settings fd{};
    sk_fd_settings_default(&fd);
    if (vf.fd_step > 0.0) fd.base_step = vf.fd_step;
    if (vf.fd_levels > 0) fd.richardson_levels = vf.fd_levels;

    json result = {{"target", vf.target}, {"direction", direction}};
    std::vector<sk_complex> analytic;
    int rows = 1, cols = 1;
    sk_variation_info info{};
    sk_differential d{};
    sk_complex from{}, to{};
    if (vf.target == "period") {
        rows = cols = g;
        analytic.resize(static_cast<std::size_t>(g * g));
        check(sk_vary_period_matrix(s.group.get(), &st, deltas.data(), analytic.data(), &info), "variation");
        result["variation"] = complex_matrix(analytic, g, g);
    } else {
        if (path.from.empty() || path.to.empty()) throw InputError("vary --target integral needs --from and --to");
        d = diff.get(g);
        from = cli::parse_complex_literal(path.from, "--from");
        to = cli::parse_complex_literal(path.to, "--to");
        analytic.resize(1);
        std::vector<sk_complex> per_circle(static_cast<std::size_t>(g));
        check(sk_vary_integral(s.group.get(), &st, &d, from, to, deltas.data(), analytic.data(), per_circle.data(),
                               &info),
              "variation");
        json pc = json::array();
        for (const auto& z : per_circle) pc.push_back(cli::complex_to_json(z));
        result["differential"] = diff.describe();
        result["from"] = cli::complex_to_json(from);
        result["to"] = cli::complex_to_json(to);
        result["variation"] = cli::complex_to_json(analytic[0]);
        result["per_circle"] = pc;
    }
    result["quadrature"] = {{"nodes", info.nodes},
                            {"last_change", info.last_change},
                            {"max_integrand", info.max_integrand},
                            {"symmetry_residual", info.symmetry_residual}};
    s.timer.lap("variation");

    if (vf.check_fd) {
        std::vector<sk_complex> fdv(analytic.size());
        sk_fd_info fi{};
        if (vf.target == "period")
            check(sk_fd_period_matrix(s.group.get(), &st, deltas.data(), &fd, fdv.data(), &fi), "finite differences");
        else
            check(sk_fd_integral(s.group.get(), &st, &d, from, to, deltas.data(), &fd, fdv.data(), &fi),
                  "finite differences");
        double worst = 0.0;
        const json rel = relative_discrepancy(analytic, fdv, rows, cols, worst);
        result["finite_difference"] = {
            {"base_step", fd.base_step},
            {"richardson_levels", fd.richardson_levels},
            {"value", vf.target == "period" ? complex_matrix(fdv, rows, cols) : cli::complex_to_json(fdv[0])},
            {"error_estimate", fi.error_estimate},
            {"monotone", fi.monotone != 0},
            {"step", fi.step},
            {"shrinks", fi.shrinks},
            {"relative_discrepancy", vf.target == "period" ? rel : rel[0][0]},
            {"max_relative_discrepancy", worst},
        };
        s.timer.lap("finite_difference");
    }
    s.report["result"] = result;
}

struct SolveFlags {
    std::string targets_file;
    bool jacobian_check = false;
    void add(CLI::App* app) {
        app->add_option("targets", targets_file, "Targets file")->required()->check(CLI::ExistingFile);
        app->add_flag("--jacobian-check", jacobian_check, "Compare the analytic Jacobian with finite differences");
    }
};

struct ProblemDeleter {
    void operator()(sk_problem* p) const { sk_problem_destroy(p); }
};
struct ResultDeleter {
    void operator()(sk_solve_result* r) const { sk_solve_result_destroy(r); }
};

Config config_from_group(const sk_group* g, const Config& base) {
    Config out = base;
    for (int k = 0; k < base.genus; ++k) {
        check(sk_group_generator_spec(g, k, &out.generators[static_cast<std::size_t>(k)]), "generator");
        check(sk_group_disk_pair(g, k, &out.disks[static_cast<std::size_t>(k)]), "disks");
    }
    return out;
}

bool cmd_solve(Session& s, const SettingsFlags& flags, const SolveFlags& sf) {
    open_session(s, "solve", &flags);
    require_usable(s);
    const cli::Targets t = cli::parse_targets(cli::read_json_file(sf.targets_file), sf.targets_file, s.genus());
    sk_problem* raw = nullptr;
    check(sk_problem_create(&raw), "problem");
    std::unique_ptr<sk_problem, ProblemDeleter> problem(raw);
    for (const auto& p : t.parameters) check(sk_problem_add_parameter(raw, p.generator, p.coord, p.part), "parameter");
    for (const auto& p : t.periods) check(sk_problem_add_period_target(raw, p.j, p.s, p.value, p.parts), "target");
    for (const auto& p : t.integrals)
        check(sk_problem_add_integral_target(raw, p.k, p.from, p.to, p.value, p.parts), "target");
    const sk_settings st = s.settings();

    json result = {{"targets", cli::targets_to_json(t)}};
    if (sf.jacobian_check) {
        sk_fd_settings fd{};
        sk_fd_settings_default(&fd);
        fd.base_step = 1e-3;
        double disc = 0.0;
        check(sk_problem_jacobian_check(raw, s.group.get(), &st, &fd, &disc), "Jacobian check");
        result["jacobian_check"] = {{"base_step", fd.base_step}, {"max_relative_discrepancy", disc}};
        s.timer.lap("jacobian_check");
    }

    sk_solve_result* rres = nullptr;
    const sk_status status = sk_solve(raw, s.group.get(), &st, &t.newton, &rres);
    const std::string status_message = status == SK_OK ? "" : sk_last_error_message();
    if (rres == nullptr) check(status, "solve");
    std::unique_ptr<sk_solve_result, ResultDeleter> res(rres);
    s.timer.lap("solve");

    const int np = sk_solve_result_parameter_count(rres);
    json iterations = json::array();
    std::vector<double> params(static_cast<std::size_t>(np));
    for (int i = 0; i < sk_solve_result_iteration_count(rres); ++i) {
        sk_solve_iteration it{};
        check(sk_solve_result_iteration(rres, i, &it, params.data()), "trace");
        iterations.push_back({{"residual_norm", it.residual_norm},
                              {"step_norm", it.step_norm},
                              {"condition", it.condition},
                              {"halvings", it.halvings},
                              {"parameters", params}});
    }
    const bool converged = sk_solve_result_converged(rres) != 0;
    const double exponent = sk_solve_result_exponent(rres);
    sk_group* final_raw = nullptr;
    check(sk_solve_result_group(rres, &final_raw), "final group");
    GroupPtr final_group(final_raw);

    result["trace"] = {{"converged", converged},
                       {"message", sk_solve_result_message(rres)},
                       {"iterations", iterations},
                       {"convergence_exponent", std::isfinite(exponent) ? json(exponent) : json(nullptr)}};
    result["final_parameters"] = iterations.empty() ? json::array() : iterations.back()["parameters"];
    result["final_config"] = cli::config_to_json(config_from_group(final_group.get(), s.config));
    s.report["result"] = result;
    if (status != SK_OK && status != SK_CONVERGENCE) throw DomainError(status, "solve: " + status_message);
    return converged;
}

struct ConvergeFlags {
    std::vector<int> levels;
    int samples = 64;
    void add(CLI::App* app) {
        app->add_option("--levels", levels, "Word lengths for the automorphy residual")->delimiter(',');
        app->add_option("--samples", samples, "Boundary samples per circle")->check(CLI::Range(1, 1 << 16));
    }
};

void cmd_converge(Session& s, const SettingsFlags& flags, const DifferentialFlags& diff, const ConvergeFlags& cf) {
    open_session(s, "converge", &flags);
    require_usable(s);
    const int g = s.genus();
    const sk_differential d = diff.get(g);
    sk_settings st = s.settings();

    std::vector<double> norms(64);
    int count = 0;
    double tail = 0.0;
    check(sk_layer_norms(s.group.get(), &st, &d, norms.data(), static_cast<int>(norms.size()), &count, &tail),
          "layer norms");
    norms.resize(static_cast<std::size_t>(count));
    json ratios = json::array();
    for (std::size_t i = 1; i < norms.size(); ++i)
        ratios.push_back(norms[i - 1] > 0.0 ? json(norms[i] / norms[i - 1]) : json(nullptr));
    s.timer.lap("layer_norms");

    sk_settings doubling = st;
    doubling.auto_double = 1;
    std::vector<sk_complex> a(static_cast<std::size_t>(g * g));
    sk_quadrature_info q{};
    check(sk_a_period_matrix(s.group.get(), &doubling, a.data(), &q), "a-period matrix");
    json history = json::array();
    for (int i = 0; i < q.history_len; ++i)
        history.push_back({{"nodes", q.history_nodes[i]}, {"change", q.history_change[i]}});
    s.timer.lap("a_periods");

    std::vector<int> levels = cf.levels;
    if (levels.empty()) {
        const int top = std::max(2, st.max_word_len);
        levels = {top - 2, top - 1, top};
    }
    json automorphy = json::array();
    for (int L : levels) {
        if (L < 0 || L > 16) throw InputError("--levels: expected word lengths in 0..16");
        sk_settings at = st;
        at.max_word_len = L;
        at.tail_tolerance = 0.0;
        json per_gen = json::array();
        for (int k = 0; k < g; ++k) {
            double r = 0.0;
            check(sk_automorphy_residual(s.group.get(), &at, &d, k, cf.samples, &r), "automorphy residual");
            per_gen.push_back(r);
        }
        automorphy.push_back({{"max_word_len", L}, {"residual", per_gen}});
    }
    s.timer.lap("automorphy");

    s.report["result"] = {
        {"differential", diff.describe()},
        {"layer_norms", norms},
        {"layer_ratios", ratios},
        {"tail_estimate", tail},
        {"a_period_doubling",
         {{"nodes", q.nodes}, {"last_change", q.last_change}, {"converged", q.converged != 0}, {"history", history}}},
        {"automorphy", {{"samples", cf.samples}, {"levels", automorphy}}},
    };
}

void emit(const json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw InputError(out + ": cannot write report");
    f << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Schottky groups: periods, integrals, variations and moduli"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(sk_version()));

    Globals globals;
    app.add_option("--threads", globals.threads, "Worker threads (0: all cores)")->check(CLI::Range(0, 1024));
    app.add_option("--seed", globals.seed, "Seed for random directions");
    app.add_option("--out", globals.out, "Write the report here instead of stdout");
    app.add_flag("--timings", globals.timings, "Include wall-clock timings in the report");

    std::string config_path;
    SettingsFlags settings_flags;
    DifferentialFlags diff_flags;
    PathFlags path_flags;
    VaryFlags vary_flags;
    SolveFlags solve_flags;
    ConvergeFlags converge_flags;

    auto add_config = [&](CLI::App* sub) {
        sub->add_option("config", config_path, "Group configuration file")->required();
    };
    auto* validate = app.add_subcommand("validate", "Check the disk configuration and generators");
    add_config(validate);
    auto* periods = app.add_subcommand("periods", "Period matrix and a-period check");
    add_config(periods);
    settings_flags.add(periods);
    auto* integrate = app.add_subcommand("integrate", "Integral of a differential along a path");
    add_config(integrate);
    settings_flags.add(integrate);
    diff_flags.add(integrate);
    path_flags.add(integrate, true);
    auto* vary = app.add_subcommand("vary", "First-order variation under a generator perturbation");
    add_config(vary);
    settings_flags.add(vary);
    diff_flags.add(vary);
    path_flags.add(vary, false);
    vary_flags.add(vary);
    auto* solve = app.add_subcommand("solve", "Newton solve for generator parameters");
    add_config(solve);
    solve_flags.add(solve);
    settings_flags.add(solve);
    auto* converge = app.add_subcommand("converge", "Series and quadrature convergence diagnostics");
    add_config(converge);
    settings_flags.add(converge);
    diff_flags.add(converge);
    converge_flags.add(converge);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    Session s{globals, config_path, {}, nullptr, json::object(), {}};
    int code = 0;
    try {
        try {
            if (*validate) cmd_validate(s);
            else if (*periods) cmd_periods(s, settings_flags);
            else if (*integrate) cmd_integrate(s, settings_flags, diff_flags, path_flags);
            else if (*vary) cmd_vary(s, settings_flags, diff_flags, path_flags, vary_flags);
            else if (*solve && !cmd_solve(s, settings_flags, solve_flags)) {
                s.report["error"] = {{"status", sk_status_name(SK_CONVERGENCE)},
                                     {"message", s.report["result"]["trace"]["message"]}};
                code = kExitDomain;
            } else if (*converge) cmd_converge(s, settings_flags, diff_flags, converge_flags);
        } catch (const DomainError& e) {
            if (s.report.empty()) throw;
            s.report["error"] = {{"status", sk_status_name(e.status)}, {"message", e.what()}};
            std::cerr << "schottky: " << e.what() << "\n";
            code = kExitDomain;
        }
        if (globals.timings) s.report["timings"] = s.timer.to_json();
        emit(s.report, globals.out);
        return code;
    } catch (const InputError& e) {
        std::cerr << "schottky: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "schottky: " << e.what() << "\n";
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "schottky: internal error: " << e.what() << "\n";
        return kExitDomain;
    }
}
