#pragma once

#include <filesystem>
#include <string>

#include "tailcheck/error.hpp"

namespace testing_util {

/// The error code thrown by fn, or a value-initialized code if none.
template <typename Fn>
tailcheck::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const tailcheck::Error& e) {
    return e.code();
  }
  return tailcheck::ErrorCode{};
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tailcheck_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_util
