#include "stormrisk/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "stormrisk/errors.hpp"

namespace stormrisk {

std::string fnv1a_digest_hex(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InputError(Errc::malformed_file, "cannot open " + file.string());
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void RunManifest::add_input(const std::filesystem::path& file) {
  input_digests[file.string()] = fnv1a_digest_hex(file);
}

void RunManifest::add_output(const std::filesystem::path& file) {
  output_digests[file.filename().string()] = fnv1a_digest_hex(file);
}

void RunManifest::add_output_tree(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files)
    output_digests[std::filesystem::relative(f, dir).string()] = fnv1a_digest_hex(f);
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["tool_version"] = kToolVersion;
  j["command"] = command;
  if (!config_echo_json.empty()) j["config"] = nlohmann::json::parse(config_echo_json);
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  j["duration_s"] = duration_s;
  j["inputs"] = input_digests;
  j["outputs"] = output_digests;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace stormrisk
