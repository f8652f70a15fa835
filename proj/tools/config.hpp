#pragma once

// Config, direction and target files for the schottky CLI, on top of the C API.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "schottky.h"

namespace cli {

using json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "schottky-config/1";
inline constexpr const char* kReportSchema = "schottky-report/1";
inline constexpr const char* kDirectionSchema = "schottky-direction/1";
inline constexpr const char* kTargetsSchema = "schottky-targets/1";

/// Bad input: syntax (with line and column) or a field with the wrong shape.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    int genus = 0;
    std::vector<sk_generator> generators;
    std::vector<sk_disk_pair> disks;
    sk_settings settings{};
};

bool operator==(const Config& a, const Config& b);

/// Reads a file into a JSON document; syntax errors name file:line:column.
json read_json_file(const std::string& path);

Config parse_config(const json& doc, const std::string& source);
json config_to_json(const Config& cfg);

json complex_to_json(sk_complex z);
sk_complex parse_complex(const json& j, const std::string& field);
/// "re,im" or "re" from the command line.
sk_complex parse_complex_literal(const std::string& text, const std::string& flag);

json matrix_to_json(const sk_complex* m, int rows, int cols);

/// Direction document -> 4g complex numbers.
std::vector<sk_complex> parse_direction(const json& doc, const std::string& source, const sk_group* group);

sk_coordinate parse_coordinate(const json& j, const std::string& field);
const char* coordinate_name(sk_coordinate c);

struct Targets {
    struct Param {
        int generator;
        sk_coordinate coord;
        sk_part part;
    };
    struct Period {
        int j, s;
        sk_complex value;
        sk_target_parts parts;
    };
    struct Integral {
        int k;
        sk_complex from, to, value;
        sk_target_parts parts;
    };
    std::vector<Param> parameters;
    std::vector<Period> periods;
    std::vector<Integral> integrals;
    sk_newton_options newton{};
};

Targets parse_targets(const json& doc, const std::string& source, int genus);
json targets_to_json(const Targets& t);

}  // namespace cli
