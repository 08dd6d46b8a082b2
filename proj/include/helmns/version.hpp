#ifndef HELMNS_VERSION_HPP
#define HELMNS_VERSION_HPP

namespace helmns {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace helmns

#endif  // HELMNS_VERSION_HPP
