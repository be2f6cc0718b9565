#pragma once

#include <string_view>

namespace pathguide::embedded {

// Generated at configure time from data/.
std::string_view lookup(std::string_view name);

}  // namespace pathguide::embedded
