#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <string>

namespace adcnet::service {

/// Service settings. File format: one `key = value` per line, `#` starts a
/// comment. Keys: host, port, threads, checkpoint, embeddings,
/// allow_fallback, protein_provider, molecule_provider, static_dir,
/// dar_reference. Relative paths resolve against the file's directory.
///
/// Provider values are either an http(s) URL that receives a JSON POST
/// {"kind", "content"} or `cmd:<command>` run with that JSON on stdin. Both
/// must answer with one embedding JSON line.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t threads = 8;
  std::string checkpoint;
  std::string embeddings;
  bool allow_fallback = false;
  std::string protein_provider;
  std::string molecule_provider;
  std::string static_dir;
  std::string dar_reference;  // CSV: antibody,dar_min,dar_max[,note]

  /// Throws InvalidArgument on unknown keys or bad values.
  void set(const std::string& key, const std::string& value, const std::string& base_dir = "");
  static ServiceConfig parse(std::istream& in, const std::string& base_dir = "");
  static ServiceConfig load(const std::string& path);

  /// ADCNET_PORT, ADCNET_CHECKPOINT, ADCNET_EMBEDDINGS, ADCNET_PROTEIN_PROVIDER,
  /// ADCNET_MOLECULE_PROVIDER, ADCNET_STATIC_DIR. The lookup is injectable for tests.
  void apply_env(const std::function<std::optional<std::string>(const char*)>& getenv);
  void apply_env();
};

}  // namespace adcnet::service
