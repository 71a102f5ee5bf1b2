#include "cantor_dioph/ifs_io.hpp"

#include <fstream>
#include <stdexcept>

namespace cantor_dioph {

RationalIFS ifs_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("IFS description must be a JSON object");
  if (j.contains("base")) {
    if (!j.contains("digits") || !j["digits"].is_array())
      throw std::invalid_argument("homogeneous IFS description needs a \"digits\" array");
    const auto base = j["base"].get<std::int64_t>();
    return RationalIFS::homogeneous(base, j["digits"].get<std::vector<std::int64_t>>());
  }
  if (j.contains("branches")) {
    if (!j["branches"].is_array()) throw std::invalid_argument("\"branches\" must be an array");
    std::vector<Branch> br;
    for (const auto& b : j["branches"]) br.push_back({b.at("q").get<std::int64_t>(), b.at("p").get<std::int64_t>()});
    return RationalIFS(std::move(br));
  }
  throw std::invalid_argument("IFS description needs either \"base\"/\"digits\" or \"branches\"");
}

nlohmann::json ifs_to_json(const RationalIFS& ifs) {
  if (ifs.is_homogeneous()) return {{"base", ifs.base()}, {"digits", ifs.digits()}};
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& b : ifs.branches()) arr.push_back({{"q", b.q}, {"p", b.p}});
  return {{"branches", arr}};
}

RationalIFS load_ifs(std::string_view name_or_path) {
  if (RationalIFS::is_fixture_name(name_or_path)) return RationalIFS::fixture(name_or_path);
  std::ifstream in{std::string(name_or_path)};
  if (!in) throw std::invalid_argument("cannot open IFS description: " + std::string(name_or_path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed IFS description " + std::string(name_or_path) + ": " + e.what());
  }
  try {
    return ifs_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed IFS description: ") + e.what());
  }
}

}  // namespace cantor_dioph
