#ifndef TOPSAMP_VERSION_HPP
#define TOPSAMP_VERSION_HPP

namespace topsamp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace topsamp

#endif  // TOPSAMP_VERSION_HPP
