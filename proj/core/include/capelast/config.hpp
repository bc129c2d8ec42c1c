#pragma once

// INI run configuration. Sections: [grid] nx ny nz b; [surface] psi; [fields] v F1 F2 F3;
// [physics] sigma cutoff delta0; [time] t_final dt dealias filter check_cfl;
// [output] snapshot_every; [solver] tol max_iter restart; [diagnostics] k_max rt_c0 history.
//
// Recipe values are ';'-separated terms:
//   surface:  "mode A cos|sin k1 k2"   "random A kmax seed"
//   fields:   "potential A cos|sin k1 k2"   "comp i A cos|sin k1 k2 one|linear|exp|cos"   "tangent A dir [cos|sin k]"

#include <filesystem>
#include <string>
#include <string_view>

#include "capelast/evolve.hpp"

namespace capelast {

/// Throws ConfigError with the offending key on malformed input. Missing keys keep defaults.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text; parse_config(to_config_text(c)) reproduces c exactly.
std::string to_config_text(const RunConfig& c);

SurfaceRecipe parse_surface_recipe(std::string_view text);
FieldRecipe parse_field_recipe(std::string_view text);
std::string to_string(const SurfaceRecipe& r);
std::string to_string(const FieldRecipe& r);

}  // namespace capelast
