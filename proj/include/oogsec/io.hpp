#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "oogsec/bench.hpp"
#include "oogsec/esc.hpp"
#include "oogsec/gridgen.hpp"
#include "oogsec/metrics.hpp"
#include "oogsec/oracle.hpp"

namespace oogsec::io {

using Json = nlohmann::ordered_json;

// Contents of a system file. Every block is optional on disk; the commands
// check for the ones they need.
struct SystemFile {
    std::optional<CertainSubsystem> certain;
    std::optional<UncertainSubsystem> uncertain;
    std::optional<double> delta;
    std::optional<double> energy;
    std::optional<GridSpec> grid;
};

// Row-major nested lists. A bare number is 1x1; [] is an empty matrix whose
// shape is inferred from the other matrices of its block.
[[nodiscard]] Json matrix_to_json(const Matrix& m);

// Errors are ValidationError/DimensionError naming `source` and the field.
[[nodiscard]] SystemFile parse_system(const Json& doc, const std::string& source);
[[nodiscard]] SystemFile load_system(const std::string& path);
[[nodiscard]] Json system_to_json(const SystemFile& file);

// Flag values win over the file; a missing value on both sides is an error.
[[nodiscard]] AttackBudget resolve_budget(const SystemFile& file, std::optional<double> delta,
                                          std::optional<double> energy);

[[nodiscard]] Json grid_to_json(const GridSpec& spec);
[[nodiscard]] GridSpec grid_from_json(const Json& j, const std::string& source);

[[nodiscard]] Json metric_to_json(const MetricResult& r);
[[nodiscard]] Json summary_to_json(const BenchSummary& s);

// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] EscParams esc_params_from_json(const Json& j, const std::string& source);
[[nodiscard]] Json esc_params_to_json(const EscParams& p);

[[nodiscard]] Json read_json(const std::string& path);
// Two-space indentation and a trailing newline.
void write_json(const std::string& path, const Json& j);

}  // namespace oogsec::io
