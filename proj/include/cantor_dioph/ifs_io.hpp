#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

#include "cantor_dioph/ifs.hpp"

namespace cantor_dioph {

/// Accepts {"base": b, "digits": [...]} or {"branches": [{"q":..,"p":..}, ...]}.
RationalIFS ifs_from_json(const nlohmann::json& j);
/// Homogeneous systems use the compact base/digits form.
nlohmann::json ifs_to_json(const RationalIFS& ifs);

/// A fixture name (cantor, overlap3, full3, mixed23) or a path to a JSON file.
RationalIFS load_ifs(std::string_view name_or_path);

}  // namespace cantor_dioph
