// Reproducibility manifest written next to every command's outputs.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

namespace stormrisk {

inline constexpr const char* kToolVersion = "1.0.0";

// FNV-1a 64-bit digest, rendered as 16 hex chars.
std::string fnv1a_digest_hex(const std::filesystem::path& file);

struct RunManifest {
  std::string command;                              // subcommand name
  std::string config_echo_json;                     // serialized effective config
  std::uint64_t master_seed = 0;
  std::map<std::string, std::string> input_digests; // path -> digest
  std::map<std::string, std::string> output_digests;
  double duration_s = 0.0;
  int threads = 0;

  void add_input(const std::filesystem::path& file);
  void add_output(const std::filesystem::path& file);
  // Digests every regular file under dir.
  void add_output_tree(const std::filesystem::path& dir);

  void write(const std::filesystem::path& path) const;
};

}  // namespace stormrisk
