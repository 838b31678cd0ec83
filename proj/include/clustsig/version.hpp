#ifndef CLUSTSIG_VERSION_HPP
#define CLUSTSIG_VERSION_HPP

namespace clustsig {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace clustsig

#endif
