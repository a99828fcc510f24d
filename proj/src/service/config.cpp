#include "adcnet/service/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "adcnet/error.hpp"

namespace adcnet::service {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string resolve(const std::string& p, const std::string& base_dir) {
  if (p.empty() || base_dir.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

long parse_int(const std::string& key, const std::string& value, long lo, long hi) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || v < lo || v > hi) {
    throw Error(ErrorCode::InvalidArgument, key + " must be an integer in [" + std::to_string(lo) + ", " +
                                                std::to_string(hi) + "], got '" + value + "'");
  }
  return v;
}

}  // namespace

void ServiceConfig::set(const std::string& key, const std::string& value, const std::string& base_dir) {
  if (key == "host") host = value;
  else if (key == "port") port = static_cast<int>(parse_int(key, value, 0, 65535));
  else if (key == "threads") threads = static_cast<std::size_t>(parse_int(key, value, 1, 1024));
  else if (key == "checkpoint") checkpoint = resolve(value, base_dir);
  else if (key == "embeddings") embeddings = resolve(value, base_dir);
  else if (key == "static_dir") static_dir = resolve(value, base_dir);
  else if (key == "dar_reference") dar_reference = resolve(value, base_dir);
  else if (key == "protein_provider") protein_provider = value;
  else if (key == "molecule_provider") molecule_provider = value;
  else if (key == "allow_fallback") {
    if (value == "true" || value == "1" || value == "yes") allow_fallback = true;
    else if (value == "false" || value == "0" || value == "no") allow_fallback = false;
    else throw Error(ErrorCode::InvalidArgument, "allow_fallback must be true or false");
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
}

ServiceConfig ServiceConfig::parse(std::istream& in, const std::string& base_dir) {
  ServiceConfig config;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "config line " + std::to_string(number) + ": expected key = value");
    }
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
    } catch (const Error& e) {
      throw Error(e.code(), "config line " + std::to_string(number) + ": " + e.detail());
    }
  }
  return config;
}

ServiceConfig ServiceConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path);
  return parse(in, fs::path(path).parent_path().string());
}

void ServiceConfig::apply_env(const std::function<std::optional<std::string>(const char*)>& getenv) {
  static constexpr std::pair<const char*, const char*> kVars[] = {
      {"ADCNET_PORT", "port"},
      {"ADCNET_CHECKPOINT", "checkpoint"},
      {"ADCNET_EMBEDDINGS", "embeddings"},
      {"ADCNET_PROTEIN_PROVIDER", "protein_provider"},
      {"ADCNET_MOLECULE_PROVIDER", "molecule_provider"},
      {"ADCNET_STATIC_DIR", "static_dir"},
  };
  for (const auto& [var, key] : kVars) {
    if (const auto v = getenv(var)) set(key, *v);
  }
}

void ServiceConfig::apply_env() {
  apply_env([](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  });
}

}  // namespace adcnet::service
