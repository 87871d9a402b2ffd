#pragma once

// Structure-definition files. JSON or a TOML subset, chosen by extension:
//
//   sigma       {s12, s13, s14, s23, s24, s34}
//   eta         expression string
//   psi, phi    arrays of four expression strings
//   domain      {lower: [4 reals], upper: [4 reals]}
//   hamiltonian optional expression string
//   limit       optional, "leaf" declares a psi4 = phi4 = 0 limit structure
//   leaf        optional default leaf constant for limit structures
//   name, description  optional strings

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "poisson4d/structure.hpp"

namespace p4d {

/// A malformed definition file; `where` names the offending key.
class FormatError : public Error {
 public:
  FormatError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct StructureDefinition {
  std::string name;
  std::string description;
  SigmaSet sigma;
  std::string eta = "1";
  std::array<std::string, 4> psi{"1", "1", "1", "1"};
  std::array<std::string, 4> phi;
  std::array<double, 4> lower{}, upper{};
  std::string hamiltonian;
  bool leaf_limit = false;
  std::optional<double> leaf;

  /// Parses the expressions; FormatError names the key of a bad expression.
  FamilyStructure build() const;
};

StructureDefinition definition_from_json(const nlohmann::json& j);
nlohmann::ordered_json definition_to_json(const StructureDefinition& d);

/// TOML subset: comments, [table] headers, key = value with basic strings,
/// numbers, booleans and (possibly multi-line) arrays of these.
nlohmann::json parse_toml_subset(std::string_view text);

/// Reads and validates a definition; .toml selects the TOML reader,
/// anything else JSON. Throws FormatError (also for unreadable files).
StructureDefinition load_definition(const std::string& path);

}  // namespace p4d
