#pragma once

namespace genepool {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace genepool
