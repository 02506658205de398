#pragma once

#include <string_view>

namespace eefluct {

/// Release number plus `git describe` of the source tree at configure time.
std::string_view version_string() noexcept;

}  // namespace eefluct
