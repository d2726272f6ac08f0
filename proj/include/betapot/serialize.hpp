#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"

namespace betapot {

using json = nlohmann::json;

// %.17g rendering so emitted tables round-trip doubles exactly
std::string format_g17(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_text(const std::string& path, const std::string& body);
json read_json_file(const std::string& path);

// fail-closed key check: any key outside `allowed` raises with the context name
void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context);

json field_to_json(const FieldSpec& field);
FieldSpec field_from_json(const json& j);

json domain_to_json(const DomainSpec& spec);
DomainSpec domain_from_json(const json& j);

json window_to_json(const Window& window);
Window window_from_json(const json& j);

json solution_to_json(const EquilibriumSolution& sol);
EquilibriumSolution solution_from_json(const json& j);

}  // namespace betapot
