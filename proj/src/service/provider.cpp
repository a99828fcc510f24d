#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "adcnet/service/predictor.hpp"
#include "httplib.h"
#include "json.hpp"

namespace adcnet::service {

namespace {

std::optional<std::vector<double>> decode(const std::string& reply, embedding::EmbeddingKind kind,
                                          const std::string& content, const std::string& origin) {
  std::istringstream lines(reply);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto record = embedding::embedding_from_json_line(line);
    if (record.kind != kind) throw Error(ErrorCode::FormatError, origin + " returned a different embedding kind");
    if (record.key != embedding::content_key(kind, content)) {
      throw Error(ErrorCode::FormatError, origin + " returned a vector for a different key");
    }
    embedding::validate(record);
    return std::move(record.values);
  }
  return std::nullopt;
}

std::string request_body(embedding::EmbeddingKind kind, const std::string& content) {
  return nlohmann::json{{"kind", std::string(embedding::to_string(kind))}, {"content", content}}.dump();
}

embedding::Provider command_provider(std::string command) {
  return [command](embedding::EmbeddingKind kind, const std::string& content) -> std::optional<std::vector<double>> {
    auto path = (std::filesystem::temp_directory_path() / "adcnet-provider-XXXXXX").string();
    const int fd = ::mkstemp(path.data());
    if (fd < 0) throw Error(ErrorCode::IoError, "cannot create provider request file");
    const auto body = request_body(kind, content);
    const bool written = ::write(fd, body.data(), body.size()) == static_cast<ssize_t>(body.size());
    ::close(fd);
    struct Cleanup {
      std::string p;
      ~Cleanup() { std::remove(p.c_str()); }
    } cleanup{path};
    if (!written) throw Error(ErrorCode::IoError, "cannot write provider request file");
    FILE* pipe = ::popen((command + " < '" + path + "'").c_str(), "r");
    if (!pipe) throw Error(ErrorCode::IoError, "cannot start provider command");
    std::string reply;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) reply.append(buf, n);
    const int status = ::pclose(pipe);
    if (status != 0) throw Error(ErrorCode::IoError, "provider command exited with status " + std::to_string(status));
    return decode(reply, kind, content, "provider command");
  };
}

embedding::Provider http_provider(const std::string& url) {
  const auto scheme_end = url.find("://");
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
  return [origin, path](embedding::EmbeddingKind kind, const std::string& content) -> std::optional<std::vector<double>> {
    httplib::Client client(origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(60);
    const auto res = client.Post(path, request_body(kind, content), "application/json");
    if (!res) throw Error(ErrorCode::IoError, "provider " + origin + " unreachable: " + httplib::to_string(res.error()));
    if (res->status == 404) return std::nullopt;
    if (res->status != 200) throw Error(ErrorCode::IoError, "provider answered HTTP " + std::to_string(res->status));
    return decode(res->body, kind, content, "provider " + origin);
  };
}

}  // namespace

embedding::Provider make_provider(const std::string& spec) {
  if (spec.empty()) return {};
  if (spec.rfind("cmd:", 0) == 0) return command_provider(spec.substr(4));
  if (spec.rfind("http://", 0) == 0) return http_provider(spec);
  throw Error(ErrorCode::InvalidArgument, "provider must be an http:// URL or cmd:<command>, got '" + spec + "'");
}

}  // namespace adcnet::service
