#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cantor_dioph::cli {

/// Exit codes: 0 ok, 1 domain error (or non-member for `member`), 2 usage error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cantor_dioph::cli
