#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace cli {

namespace {

[[noreturn]] void field_error(const std::string& source, const std::string& path, const std::string& what) {
    throw InputError(source + ": field '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

struct Reader {
    std::string source;

    void object(const json& j, const std::string& path, std::initializer_list<const char*> allowed) const {
        if (!j.is_object()) field_error(source, path.empty() ? "(document)" : path, "expected an object");
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items())
            if (!keys.count(k)) field_error(source, join(path, k), "unknown field");
    }

    const json& at(const json& j, const std::string& path, const char* key) const {
        const auto it = j.find(key);
        if (it == j.end()) field_error(source, join(path, key), "missing");
        return *it;
    }

    const json* opt(const json& j, const char* key) const {
        const auto it = j.find(key);
        return it == j.end() ? nullptr : &*it;
    }

    double number(const json& j, const std::string& path) const {
        if (!j.is_number()) field_error(source, path, "expected a number");
        const double v = j.get<double>();
        if (!std::isfinite(v)) field_error(source, path, "expected a finite number");
        return v;
    }

    int integer(const json& j, const std::string& path) const {
        if (!j.is_number_integer()) field_error(source, path, "expected an integer");
        const auto v = j.get<long long>();
        if (v < -1000000000LL || v > 1000000000LL) field_error(source, path, "integer out of range");
        return static_cast<int>(v);
    }

    bool boolean(const json& j, const std::string& path) const {
        if (!j.is_boolean()) field_error(source, path, "expected true or false");
        return j.get<bool>();
    }

    std::string string(const json& j, const std::string& path) const {
        if (!j.is_string()) field_error(source, path, "expected a string");
        return j.get<std::string>();
    }

    sk_complex complex(const json& j, const std::string& path) const {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
            field_error(source, path, "expected a complex number [re, im]");
        const sk_complex z{j[0].get<double>(), j[1].get<double>()};
        if (!std::isfinite(z.re) || !std::isfinite(z.im)) field_error(source, path, "expected finite parts");
        return z;
    }

    void matrix(const json& j, const std::string& path, sk_complex* out) const {
        if (!j.is_array() || j.size() != 2 || !j[0].is_array() || j[0].size() != 2 || !j[1].is_array() ||
            j[1].size() != 2)
            field_error(source, path, "expected a 2x2 matrix [[c11, c12], [c21, c22]] of complex numbers");
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                out[2 * r + c] = complex(j[r][c], index(index(path, r), c));
    }

    // 1-based index in the file, 0-based in memory.
    int one_based(const json& j, const std::string& path, int upper) const {
        const int v = integer(j, path);
        if (v < 1 || v > upper) field_error(source, path, "expected an index between 1 and " + std::to_string(upper));
        return v - 1;
    }

    void schema(const json& doc, const char* expected) const {
        const json* s = opt(doc, "schema");
        if (s == nullptr) return;
        if (string(*s, "schema") != expected)
            field_error(source, "schema", std::string("expected \"") + expected + "\"");
    }
};

bool same(sk_complex a, sk_complex b) { return a.re == b.re && a.im == b.im; }

const std::pair<const char*, sk_coordinate> kCoordinates[] = {
    {"attracting", SK_COORD_ATTRACTING}, {"repelling", SK_COORD_REPELLING}, {"multiplier", SK_COORD_MULTIPLIER},
    {"c11", SK_COORD_C11},               {"c12", SK_COORD_C12},             {"c21", SK_COORD_C21},
    {"c22", SK_COORD_C22},
};

const char* parts_name(sk_target_parts p) {
    switch (p) {
        case SK_TARGET_REAL: return "re";
        case SK_TARGET_IMAG: return "im";
        default: return "both";
    }
}

}  // namespace

bool operator==(const Config& a, const Config& b) {
    if (a.genus != b.genus || a.generators.size() != b.generators.size() || a.disks.size() != b.disks.size())
        return false;
    for (std::size_t k = 0; k < a.generators.size(); ++k) {
        const auto &x = a.generators[k], &y = b.generators[k];
        if (x.kind != y.kind) return false;
        if (x.kind == SK_GENERATOR_MATRIX) {
            for (int i = 0; i < 4; ++i)
                if (!same(x.matrix[i], y.matrix[i])) return false;
        } else if (!same(x.attracting, y.attracting) || !same(x.repelling, y.repelling) ||
                   !same(x.multiplier, y.multiplier)) {
            return false;
        }
        const auto &p = a.disks[k], &q = b.disks[k];
        if (!same(p.center_d, q.center_d) || p.radius_d != q.radius_d || !same(p.center_d_prime, q.center_d_prime) ||
            p.radius_d_prime != q.radius_d_prime)
            return false;
    }
    const auto &s = a.settings, &t = b.settings;
    return s.max_word_len == t.max_word_len && s.tail_tolerance == t.tail_tolerance && s.hard_cap == t.hard_cap &&
           s.nodes == t.nodes && s.auto_double == t.auto_double && s.relative_tolerance == t.relative_tolerance &&
           s.max_nodes == t.max_nodes && s.normalization_nodes == t.normalization_nodes &&
           s.has_base_point == t.has_base_point && (!s.has_base_point || same(s.base_point, t.base_point));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
        const auto last_nl = text.rfind('\n', pos == 0 ? 0 : pos - 1);
        const std::size_t column = last_nl == std::string::npos || pos == 0 ? pos + 1 : pos - last_nl;
        std::string what = e.what();
        const auto colon = what.find("; ");
        if (colon != std::string::npos) what = what.substr(colon + 2);
        throw InputError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": syntax error: " + what);
    }
}

json complex_to_json(sk_complex z) { return json::array({z.re, z.im}); }

sk_complex parse_complex(const json& j, const std::string& field) { return Reader{"input"}.complex(j, field); }

sk_complex parse_complex_literal(const std::string& text, const std::string& flag) {
    auto parse_part = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !std::isfinite(v))
            throw InputError(flag + ": malformed complex literal '" + text + "' (expected re or re,im)");
        return v;
    };
    const auto comma = text.find(',');
    if (comma == std::string::npos) return {parse_part(text), 0.0};
    return {parse_part(text.substr(0, comma)), parse_part(text.substr(comma + 1))};
}

json matrix_to_json(const sk_complex* m, int rows, int cols) {
    json out = json::array();
    for (int r = 0; r < rows; ++r) {
        json row = json::array();
        for (int c = 0; c < cols; ++c) row.push_back(complex_to_json(m[r * cols + c]));
        out.push_back(row);
    }
    return out;
}

Config parse_config(const json& doc, const std::string& source) {
    const Reader rd{source};
    rd.object(doc, "", {"schema", "genus", "generators", "disks", "settings"});
    rd.schema(doc, kConfigSchema);
    Config cfg;
    cfg.genus = rd.integer(rd.at(doc, "", "genus"), "genus");
    if (cfg.genus < 1 || cfg.genus > 16) field_error(source, "genus", "expected a genus between 1 and 16");

    const json& gens = rd.at(doc, "", "generators");
    if (!gens.is_array()) field_error(source, "generators", "expected an array");
    if (static_cast<int>(gens.size()) != cfg.genus)
        field_error(source, "generators", "expected " + std::to_string(cfg.genus) + " entries, found " +
                                              std::to_string(gens.size()));
    for (std::size_t k = 0; k < gens.size(); ++k) {
        const std::string path = index("generators", k);
        rd.object(gens[k], path, {"matrix", "fixed_points"});
        sk_generator g{};
        const json* m = rd.opt(gens[k], "matrix");
        const json* f = rd.opt(gens[k], "fixed_points");
        if ((m == nullptr) == (f == nullptr)) field_error(source, path, "give exactly one of matrix or fixed_points");
        if (m != nullptr) {
            g.kind = SK_GENERATOR_MATRIX;
            rd.matrix(*m, join(path, "matrix"), g.matrix);
        } else {
            const std::string fp = join(path, "fixed_points");
            rd.object(*f, fp, {"attracting", "repelling", "multiplier"});
            g.kind = SK_GENERATOR_FIXED_POINTS;
            g.attracting = rd.complex(rd.at(*f, fp, "attracting"), join(fp, "attracting"));
            g.repelling = rd.complex(rd.at(*f, fp, "repelling"), join(fp, "repelling"));
            g.multiplier = rd.complex(rd.at(*f, fp, "multiplier"), join(fp, "multiplier"));
        }
        cfg.generators.push_back(g);
    }

    const json& disks = rd.at(doc, "", "disks");
    if (!disks.is_array()) field_error(source, "disks", "expected an array");
    if (static_cast<int>(disks.size()) != cfg.genus)
        field_error(source, "disks", "expected " + std::to_string(cfg.genus) + " disk pairs, found " +
                                         std::to_string(disks.size()));
    for (std::size_t k = 0; k < disks.size(); ++k) {
        const std::string path = index("disks", k);
        rd.object(disks[k], path, {"D", "D_prime"});
        sk_disk_pair p{};
        for (const char* name : {"D", "D_prime"}) {
            const std::string dp = join(path, name);
            const json& d = rd.at(disks[k], path, name);
            rd.object(d, dp, {"center", "radius"});
            const sk_complex c = rd.complex(rd.at(d, dp, "center"), join(dp, "center"));
            const double r = rd.number(rd.at(d, dp, "radius"), join(dp, "radius"));
            if (!(r > 0.0)) field_error(source, join(dp, "radius"), "expected a positive radius");
            if (std::strcmp(name, "D") == 0) {
                p.center_d = c;
                p.radius_d = r;
            } else {
                p.center_d_prime = c;
                p.radius_d_prime = r;
            }
        }
        cfg.disks.push_back(p);
    }

    sk_settings_default(&cfg.settings);
    if (const json* s = rd.opt(doc, "settings")) {
        rd.object(*s, "settings",
                  {"max_word_len", "tail_tolerance", "hard_cap", "nodes", "auto_double", "relative_tolerance",
                   "max_nodes", "normalization_nodes", "base_point"});
        auto& st = cfg.settings;
        if (const json* v = rd.opt(*s, "max_word_len")) st.max_word_len = rd.integer(*v, "settings.max_word_len");
        if (const json* v = rd.opt(*s, "tail_tolerance"); v != nullptr && !v->is_null())
            st.tail_tolerance = rd.number(*v, "settings.tail_tolerance");
        if (const json* v = rd.opt(*s, "hard_cap")) st.hard_cap = rd.integer(*v, "settings.hard_cap");
        if (const json* v = rd.opt(*s, "nodes")) st.nodes = rd.integer(*v, "settings.nodes");
        if (const json* v = rd.opt(*s, "auto_double")) st.auto_double = rd.boolean(*v, "settings.auto_double") ? 1 : 0;
        if (const json* v = rd.opt(*s, "relative_tolerance"))
            st.relative_tolerance = rd.number(*v, "settings.relative_tolerance");
        if (const json* v = rd.opt(*s, "max_nodes")) st.max_nodes = rd.integer(*v, "settings.max_nodes");
        if (const json* v = rd.opt(*s, "normalization_nodes"))
            st.normalization_nodes = rd.integer(*v, "settings.normalization_nodes");
        if (const json* v = rd.opt(*s, "base_point"); v != nullptr && !v->is_null()) {
            st.has_base_point = 1;
            st.base_point = rd.complex(*v, "settings.base_point");
        }
        if (st.max_word_len < 0 || st.max_word_len > 16)
            field_error(source, "settings.max_word_len", "expected 0..16");
        if (st.tail_tolerance < 0.0) field_error(source, "settings.tail_tolerance", "expected a positive number");
        if (st.hard_cap < 1 || st.hard_cap > 16) field_error(source, "settings.hard_cap", "expected 1..16");
        if (st.nodes < 8) field_error(source, "settings.nodes", "expected at least 8");
        if (st.max_nodes < st.nodes) field_error(source, "settings.max_nodes", "must be at least settings.nodes");
        if (st.normalization_nodes < 8) field_error(source, "settings.normalization_nodes", "expected at least 8");
        if (!(st.relative_tolerance > 0.0))
            field_error(source, "settings.relative_tolerance", "expected a positive number");
    }
    return cfg;
}

json config_to_json(const Config& cfg) {
    json doc;
    doc["schema"] = kConfigSchema;
    doc["genus"] = cfg.genus;
    json gens = json::array();
    for (const auto& g : cfg.generators) {
        if (g.kind == SK_GENERATOR_MATRIX) {
            gens.push_back({{"matrix", matrix_to_json(g.matrix, 2, 2)}});
        } else {
            gens.push_back({{"fixed_points",
                             {{"attracting", complex_to_json(g.attracting)},
                              {"repelling", complex_to_json(g.repelling)},
                              {"multiplier", complex_to_json(g.multiplier)}}}});
        }
    }
    doc["generators"] = gens;
    json disks = json::array();
    for (const auto& p : cfg.disks) {
        disks.push_back({{"D", {{"center", complex_to_json(p.center_d)}, {"radius", p.radius_d}}},
                         {"D_prime", {{"center", complex_to_json(p.center_d_prime)}, {"radius", p.radius_d_prime}}}});
    }
    doc["disks"] = disks;
    const auto& s = cfg.settings;
    doc["settings"] = {
        {"max_word_len", s.max_word_len},
        {"tail_tolerance", s.tail_tolerance > 0.0 ? json(s.tail_tolerance) : json(nullptr)},
        {"hard_cap", s.hard_cap},
        {"nodes", s.nodes},
        {"auto_double", s.auto_double != 0},
        {"relative_tolerance", s.relative_tolerance},
        {"max_nodes", s.max_nodes},
        {"normalization_nodes", s.normalization_nodes},
        {"base_point", s.has_base_point ? complex_to_json(s.base_point) : json(nullptr)},
    };
    return doc;
}

sk_coordinate parse_coordinate(const json& j, const std::string& field) {
    const std::string name = Reader{"input"}.string(j, field);
    for (const auto& [n, c] : kCoordinates)
        if (name == n) return c;
    throw InputError("field '" + field + "': unknown coordinate '" + name +
                     "' (attracting, repelling, multiplier, c11, c12, c21, c22)");
}

const char* coordinate_name(sk_coordinate c) {
    for (const auto& [n, v] : kCoordinates)
        if (v == c) return n;
    return "unknown";
}

std::vector<sk_complex> parse_direction(const json& doc, const std::string& source, const sk_group* group) {
    const Reader rd{source};
    rd.object(doc, "", {"schema", "deltas", "scaling", "conjugation", "parameter"});
    rd.schema(doc, kDirectionSchema);
    const int g = sk_group_genus(group);
    std::vector<sk_complex> out(static_cast<std::size_t>(4 * g), sk_complex{0.0, 0.0});
    int kinds = 0;
    for (const char* k : {"deltas", "scaling", "conjugation", "parameter"}) kinds += doc.contains(k) ? 1 : 0;
    if (kinds != 1) field_error(source, "(document)", "give exactly one of deltas, scaling, conjugation, parameter");

    sk_status st = SK_OK;
    if (const json* d = rd.opt(doc, "deltas")) {
        if (!d->is_array() || static_cast<int>(d->size()) != g)
            field_error(source, "deltas", "expected " + std::to_string(g) + " matrices");
        for (std::size_t l = 0; l < d->size(); ++l) rd.matrix((*d)[l], index("deltas", l), out.data() + 4 * l);
    } else if (const json* s = rd.opt(doc, "scaling")) {
        rd.object(*s, "scaling", {"generator", "epsilon"});
        const int l = rd.one_based(rd.at(*s, "scaling", "generator"), "scaling.generator", g);
        const sk_complex eps = rd.complex(rd.at(*s, "scaling", "epsilon"), "scaling.epsilon");
        st = sk_scaling_direction(group, l, eps, out.data());
    } else if (const json* c = rd.opt(doc, "conjugation")) {
        sk_complex x[4];
        rd.matrix(*c, "conjugation", x);
        st = sk_gauge_conjugation_direction(group, x, out.data());
    } else if (const json* p = rd.opt(doc, "parameter")) {
        rd.object(*p, "parameter", {"generator", "coordinate", "delta"});
        const int l = rd.one_based(rd.at(*p, "parameter", "generator"), "parameter.generator", g);
        sk_coordinate coord;
        try {
            coord = parse_coordinate(rd.at(*p, "parameter", "coordinate"), "parameter.coordinate");
        } catch (const InputError& e) {
            throw InputError(source + ": " + e.what());
        }
        const sk_complex delta = rd.complex(rd.at(*p, "parameter", "delta"), "parameter.delta");
        st = sk_parameter_direction(group, l, coord, delta, out.data());
    }
    if (st != SK_OK) throw InputError(source + ": " + sk_last_error_message());
    return out;
}

Targets parse_targets(const json& doc, const std::string& source, int genus) {
    const Reader rd{source};
    rd.object(doc, "", {"schema", "parameters", "periods", "integrals", "newton"});
    rd.schema(doc, kTargetsSchema);
    Targets t;
    sk_newton_options_default(&t.newton);

    auto parts = [&](const json& obj, const std::string& path) {
        const json* p = rd.opt(obj, "parts");
        if (p == nullptr) return SK_TARGET_BOTH;
        const std::string s = rd.string(*p, join(path, "parts"));
        if (s == "both") return SK_TARGET_BOTH;
        if (s == "re") return SK_TARGET_REAL;
        if (s == "im") return SK_TARGET_IMAG;
        field_error(source, join(path, "parts"), "expected \"both\", \"re\" or \"im\"");
    };

    const json& params = rd.at(doc, "", "parameters");
    if (!params.is_array() || params.empty()) field_error(source, "parameters", "expected a non-empty array");
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::string path = index("parameters", i);
        rd.object(params[i], path, {"generator", "coordinate", "part"});
        Targets::Param p{};
        p.generator = rd.one_based(rd.at(params[i], path, "generator"), join(path, "generator"), genus);
        try {
            p.coord = parse_coordinate(rd.at(params[i], path, "coordinate"), join(path, "coordinate"));
        } catch (const InputError& e) {
            throw InputError(source + ": " + e.what());
        }
        const std::string part = rd.string(rd.at(params[i], path, "part"), join(path, "part"));
        if (part != "re" && part != "im") field_error(source, join(path, "part"), "expected \"re\" or \"im\"");
        p.part = part == "re" ? SK_PART_REAL : SK_PART_IMAG;
        t.parameters.push_back(p);
    }
    if (const json* ps = rd.opt(doc, "periods")) {
        if (!ps->is_array()) field_error(source, "periods", "expected an array");
        for (std::size_t i = 0; i < ps->size(); ++i) {
            const std::string path = index("periods", i);
            const json& e = (*ps)[i];
            rd.object(e, path, {"j", "s", "value", "parts"});
            t.periods.push_back({rd.one_based(rd.at(e, path, "j"), join(path, "j"), genus),
                                 rd.one_based(rd.at(e, path, "s"), join(path, "s"), genus),
                                 rd.complex(rd.at(e, path, "value"), join(path, "value")), parts(e, path)});
        }
    }
    if (const json* is = rd.opt(doc, "integrals")) {
        if (!is->is_array()) field_error(source, "integrals", "expected an array");
        for (std::size_t i = 0; i < is->size(); ++i) {
            const std::string path = index("integrals", i);
            const json& e = (*is)[i];
            rd.object(e, path, {"k", "from", "to", "value", "parts"});
            t.integrals.push_back({rd.one_based(rd.at(e, path, "k"), join(path, "k"), genus),
                                   rd.complex(rd.at(e, path, "from"), join(path, "from")),
                                   rd.complex(rd.at(e, path, "to"), join(path, "to")),
                                   rd.complex(rd.at(e, path, "value"), join(path, "value")), parts(e, path)});
        }
    }
    if (t.periods.empty() && t.integrals.empty()) field_error(source, "periods", "no targets given");
    if (const json* n = rd.opt(doc, "newton")) {
        rd.object(*n, "newton", {"max_iter", "tol", "max_halvings", "max_condition"});
        if (const json* v = rd.opt(*n, "max_iter")) t.newton.max_iter = rd.integer(*v, "newton.max_iter");
        if (const json* v = rd.opt(*n, "tol")) t.newton.tol = rd.number(*v, "newton.tol");
        if (const json* v = rd.opt(*n, "max_halvings")) t.newton.max_halvings = rd.integer(*v, "newton.max_halvings");
        if (const json* v = rd.opt(*n, "max_condition")) t.newton.max_condition = rd.number(*v, "newton.max_condition");
        if (t.newton.max_iter < 0) field_error(source, "newton.max_iter", "expected a nonnegative integer");
        if (!(t.newton.tol > 0.0)) field_error(source, "newton.tol", "expected a positive number");
    }
    return t;
}

json targets_to_json(const Targets& t) {
    json doc;
    doc["schema"] = kTargetsSchema;
    json params = json::array();
    for (const auto& p : t.parameters)
        params.push_back({{"generator", p.generator + 1},
                          {"coordinate", coordinate_name(p.coord)},
                          {"part", p.part == SK_PART_REAL ? "re" : "im"}});
    doc["parameters"] = params;
    json periods = json::array();
    for (const auto& p : t.periods)
        periods.push_back(
            {{"j", p.j + 1}, {"s", p.s + 1}, {"value", complex_to_json(p.value)}, {"parts", parts_name(p.parts)}});
    doc["periods"] = periods;
    json integrals = json::array();
    for (const auto& p : t.integrals)
        integrals.push_back({{"k", p.k + 1},
                             {"from", complex_to_json(p.from)},
                             {"to", complex_to_json(p.to)},
                             {"value", complex_to_json(p.value)},
                             {"parts", parts_name(p.parts)}});
    doc["integrals"] = integrals;
    doc["newton"] = {{"max_iter", t.newton.max_iter},
                     {"tol", t.newton.tol},
                     {"max_halvings", t.newton.max_halvings},
                     {"max_condition", t.newton.max_condition}};
    return doc;
}

}  // namespace cli
