#pragma once

namespace qchan {

inline constexpr const char* version = "0.1.0";

}  // namespace qchan
