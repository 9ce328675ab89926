#pragma once

namespace kktcert {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace kktcert
