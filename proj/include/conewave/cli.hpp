#pragma once

#include <string>
#include <vector>

#include "conewave/problem.hpp"

namespace conewave {

/// Loads the single-document JSON problem description:
///   {L, f, c: [{expr, p}], u0, u1, g,
///    constants: {epsilon, A, R, r, b1, m}, t_max, grid: {nt, nx}}
/// Expressions are strings in the expression grammar.  Throws
/// std::runtime_error with a diagnostic for malformed input.
ProblemSpec load_problem_spec(const std::string& path);
ProblemSpec problem_spec_from_json_text(const std::string& text);
std::string problem_spec_to_json(const ProblemSpec& spec);

/// Entry point behind the conewave binary; returns the process exit code.
/// Contract: 0 = computed and passed, 2 = computed and failed, 1 = error.
int cli_main(const std::vector<std::string>& args);

}  // namespace conewave
