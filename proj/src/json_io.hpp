#pragma once

// Internal glue shared by tank.cpp and config.cpp. Not installed.

#include <initializer_list>
#include <string>

#include "json.hpp"
#include "tctank/tank.hpp"

namespace tctank::detail {

using nlohmann::json;

// Rejects keys outside `known`, naming the section and (when the original
// text is available) the line the key first appears on.
void require_known_keys(const json& obj, std::initializer_list<const char*> known,
                        const std::string& section, const std::string& source_text);

// Unit-bearing numeric field: accepts a JSON number or an engineering
// notation string ("300p").
double quantity_field(const json& obj, const std::string& key,
                      const std::string& section);

// Plain numeric field (dimensionless), numbers only.
double number_field(const json& obj, const std::string& key,
                    const std::string& section);

json params_to_json(const TankParams& p);
TankParams params_from_json(const json& j, const std::string& section,
                            const std::string& source_text);

std::string format_double(double v);            // shortest round-trip decimal
std::string dump_artifact(const json& j);       // pretty, trailing newline

} // namespace tctank::detail
