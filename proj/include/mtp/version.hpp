#ifndef MTP_VERSION_HPP
#define MTP_VERSION_HPP

namespace mtp {

// Bumping this invalidates every fingerprint cache entry.
inline constexpr const char* toolchain_version = "mtpm-0.1.0";

}  // namespace mtp

#endif
