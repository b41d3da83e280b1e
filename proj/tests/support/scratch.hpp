#pragma once

#include <filesystem>
#include <random>
#include <string>

namespace test {

// Temporary directory removed on scope exit.
struct ScratchDir {
  std::filesystem::path path;

  ScratchDir() {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() / ("nlds-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
};

}  // namespace test
