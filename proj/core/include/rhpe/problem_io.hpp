#pragma once

#include "rhpe/instance.hpp"

#include <filesystem>
#include <string>

namespace rhpe {

/// JSON problem format:
///
///   { "name": str, "n": int, "M": [row-major n*n numbers], "q": [n],
///     "constraint": { "type": "none" | "box" | "l1", "lo": [n], "hi": [n], "alpha": num },
///     "known_solution": [n] | null, "x0": [n] (optional start point) }
///
/// Numbers are written in shortest round-trip form, so a dump/load cycle
/// reproduces every double bit for bit. Infinite box bounds are written as
/// the strings "inf" / "-inf".
std::string problem_to_json(const ProblemInstance& problem);
ProblemInstance problem_from_json(const std::string& text);

ProblemInstance load_problem(const std::filesystem::path& path);
void save_problem(const ProblemInstance& problem, const std::filesystem::path& path);

}  // namespace rhpe
