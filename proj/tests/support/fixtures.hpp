#pragma once

#include <filesystem>
#include <string>

namespace botscan::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(BOTSCAN_FIXTURE_DIR) / name;
}

}  // namespace botscan::testing
