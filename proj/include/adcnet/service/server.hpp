#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "adcnet/service/config.hpp"
#include "adcnet/service/predictor.hpp"

namespace adcnet::service {

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

/// Routes API requests to the predictor without any socket involved.
class Api {
 public:
  Api(std::shared_ptr<const Predictor> predictor, std::vector<DarReference> dar_reference = {});
  HttpResponse handle(const std::string& method, const std::string& path, const std::string& body) const;

 private:
  std::shared_ptr<const Predictor> predictor_;
  std::vector<DarReference> dar_reference_;
};

/// HTTP front end: the API under /api plus the static UI bundle at /.
class Server {
 public:
  Server(const ServiceConfig& config, std::shared_ptr<const Predictor> predictor,
         std::vector<DarReference> dar_reference = {});
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind();
  /// Blocks serving requests until stop().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads everything named by the config and serves until interrupted.
int run_service(const ServiceConfig& config);

}  // namespace adcnet::service
