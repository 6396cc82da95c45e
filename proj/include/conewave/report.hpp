#pragma once

#include <json.hpp>
#include <string>

#include "conewave/hypotheses.hpp"

namespace conewave {

using Json = nlohmann::json;

/// Canonical serialization: keys sorted, floats printed with 17 significant
/// digits, LF line endings, trailing newline.  Two identical Json trees
/// always produce identical bytes.
std::string canonical_dump(const Json& j);

/// Writes content to a temporary file in the same directory and renames it
/// into place, so readers never observe partial files.
void atomic_write(const std::string& path, const std::string& content);

Json check_to_json(const CheckRecord& r);
Json certificate_to_json(const Certificate& c);
std::string certificate_to_text(const Certificate& c);

}  // namespace conewave
