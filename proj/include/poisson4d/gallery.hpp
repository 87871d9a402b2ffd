#pragma once

#include <string>
#include <vector>

#include "poisson4d/structure_io.hpp"

namespace p4d {

/// Bundled example definitions, in a fixed order.
const std::vector<StructureDefinition>& gallery();

/// Throws p4d::Error for an unknown name.
const StructureDefinition& gallery_entry(const std::string& name);

}  // namespace p4d
