#include "adcnet/service/server.hpp"

#include <csignal>
#include <filesystem>
#include <iostream>

#include "httplib.h"

namespace adcnet::service {

namespace {

HttpResponse error_response(const Error& e) { return {http_status(e.code()), "application/json", error_json(e)}; }

}  // namespace

Api::Api(std::shared_ptr<const Predictor> predictor, std::vector<DarReference> dar_reference)
    : predictor_(std::move(predictor)), dar_reference_(std::move(dar_reference)) {}

HttpResponse Api::handle(const std::string& method, const std::string& path, const std::string& body) const {
  try {
    if (method == "GET" && path == "/api/health") return {200, "application/json", R"({"status":"ok"})"};
    if (method == "GET" && path == "/api/model/info") return {200, "application/json", predictor_->model_info_json()};
    if (method == "GET" && path == "/api/dar-reference") return {200, "application/json", to_json(dar_reference_)};
    if (method == "POST" && path == "/api/predict") {
      return {200, "application/json", to_json(predictor_->predict(parse_predict_request(body)))};
    }
    if (method == "POST" && path == "/api/predict/batch") {
      if (!predictor_->loaded()) throw RequestError(ErrorCode::ModelNotLoaded, "", "no checkpoint loaded");
      return {200, "text/csv", predictor_->predict_batch_csv(body)};
    }
    return {404, "application/json", error_json(RequestError(ErrorCode::InvalidArgument, "", "no route " + method + " " + path))};
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, "application/json", error_json(Error(ErrorCode::IoError, e.what()))};
  }
}

struct Server::Impl {
  Impl(ServiceConfig c, Api a) : config(std::move(c)), api(std::move(a)) {}
  ServiceConfig config;
  Api api;
  httplib::Server http;
};

Server::Server(const ServiceConfig& config, std::shared_ptr<const Predictor> predictor,
               std::vector<DarReference> dar_reference)
    : impl_(std::make_unique<Impl>(config, Api(std::move(predictor), std::move(dar_reference)))) {
  auto& http = impl_->http;
  const std::size_t threads = config.threads;
  http.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->api.handle(req.method, req.path, req.body);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  http.Get("/api/.*", route);
  http.Post("/api/.*", route);
  if (!config.static_dir.empty()) {
    if (!std::filesystem::is_directory(config.static_dir)) {
      throw Error(ErrorCode::IoError, "static_dir " + config.static_dir + " is not a directory");
    }
    http.set_mount_point("/", config.static_dir);
  }
}

Server::~Server() { stop(); }

int Server::bind() {
  auto& http = impl_->http;
  if (impl_->config.port == 0) return http.bind_to_any_port(impl_->config.host);
  if (!http.bind_to_port(impl_->config.host, impl_->config.port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + impl_->config.host + ":" + std::to_string(impl_->config.port));
  }
  return impl_->config.port;
}

void Server::serve() { impl_->http.listen_after_bind(); }

void Server::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void Server::wait_until_ready() const { impl_->http.wait_until_ready(); }

namespace {
Server* g_running = nullptr;
extern "C" void on_signal(int) {
  if (g_running) g_running->stop();
}
}  // namespace

int run_service(const ServiceConfig& config) {
  auto predictor = std::make_shared<const Predictor>(Predictor::from_config(config));
  auto reference = load_dar_reference(config.dar_reference);
  Server server(config, predictor, std::move(reference));
  const int port = server.bind();
  if (port < 0) throw Error(ErrorCode::IoError, "cannot bind " + config.host);
  std::cerr << "adcnet service listening on http://" << config.host << ":" << port
            << (predictor->loaded() ? " with model " + predictor->model_version() : " without a model") << '\n';
  g_running = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.serve();
  g_running = nullptr;
  return 0;
}

}  // namespace adcnet::service
