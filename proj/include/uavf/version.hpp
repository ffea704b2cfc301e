#pragma once

namespace uavf {

#ifdef UAVF_VERSION_STRING
inline constexpr const char* kToolkitVersion = UAVF_VERSION_STRING;
#else
inline constexpr const char* kToolkitVersion = "0.1.0";
#endif

}  // namespace uavf
