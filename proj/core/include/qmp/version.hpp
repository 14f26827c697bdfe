#pragma once

namespace qmp {
inline constexpr const char *kVersion = "0.1.0";
}
