#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "../support/service_fixture.hpp"
#include "adcnet/service/server.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace adcnet;
using namespace adcnet::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class RunningServer {
 public:
  RunningServer(ServiceConfig config, std::shared_ptr<const Predictor> predictor)
      : server_(config, std::move(predictor)) {
    port_ = server_.bind();
    thread_ = std::thread([this] { server_.serve(); });
    server_.wait_until_ready();
  }
  ~RunningServer() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  Server server_;
  int port_ = 0;
  std::thread thread_;
};

json request_json(const PredictRequest& r) {
  return {{"heavy_chain", r.heavy_chain},     {"light_chain", r.light_chain},
          {"antigen", r.antigen},             {"linker_smiles", r.linker_smiles},
          {"payload_smiles", r.payload_smiles}, {"dar", r.dar}};
}

}  // namespace

TEST(ServiceHttp, EndToEndOverLoopback) {
  const auto ui = fs::temp_directory_path() / "adcnet_ui_bundle";
  fs::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>adcnet</html>";

  ServiceConfig config;
  config.port = 0;
  config.threads = 4;
  config.static_dir = ui.string();
  auto predictor = std::make_shared<const Predictor>(fixture::small_checkpoint(), "ADCNet-http",
                                                     fixture::known_store(), false);
  RunningServer server(config, predictor);
  httplib::Client client("127.0.0.1", server.port());

  auto res = client.Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["status"], "ok");

  const auto req = fixture::known_request();
  res = client.Post("/api/predict", request_json(req).dump(), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  const auto direct = predictor->featurize(req);
  EXPECT_EQ(body["score"].get<double>(), predictor->checkpoint().model.forward(direct.feature.x));
  EXPECT_EQ(body["model_version"], "ADCNet-http");

  // Concurrent identical requests see identical scores.
  std::vector<std::thread> workers;
  std::vector<double> scores(8, -1.0);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    workers.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", server.port());
      const auto r = c.Post("/api/predict", request_json(req).dump(), "application/json");
      if (r && r->status == 200) scores[i] = json::parse(r->body)["score"].get<double>();
    });
  }
  for (auto& w : workers) w.join();
  for (double s : scores) EXPECT_EQ(s, body["score"].get<double>());

  res = client.Post("/api/predict/batch",
                    "id,heavy_chain,light_chain,antigen,linker_smiles,payload_smiles,dar\n"
                    "x1," + req.heavy_chain + "," + req.light_chain + "," + req.antigen + "," + req.linker_smiles +
                        "," + req.payload_smiles + ",4\n",
                    "text/csv");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "text/csv");
  EXPECT_NE(res->body.find("x1,"), std::string::npos);

  res = client.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<html>adcnet</html>");
}

TEST(ServiceHttp, HttpProviderHook) {
  const auto req = fixture::known_request();
  const auto key = embedding::content_key(embedding::EmbeddingKind::Protein, req.antigen);
  const auto values = embedding::fallback_featurizer(embedding::EmbeddingKind::Protein, "remote", 1280);

  httplib::Server embedder;
  embedder.Post("/embed", [&](const httplib::Request& r, httplib::Response& out) {
    const auto j = json::parse(r.body);
    if (j["kind"] != "protein" || j["content"] != req.antigen) {
      out.status = 404;
      return;
    }
    out.set_content(embedding::to_json_line({key, embedding::EmbeddingKind::Protein, values}) + "\n",
                    "application/x-ndjson");
  });
  const int port = embedder.bind_to_any_port("127.0.0.1");
  std::thread t([&] { embedder.listen_after_bind(); });
  embedder.wait_until_ready();

  Predictor p(fixture::small_checkpoint(), "v", fixture::known_store(false), false);
  p.set_provider(embedding::EmbeddingKind::Protein,
                 make_provider("http://127.0.0.1:" + std::to_string(port) + "/embed"));
  const auto res = p.predict(req);
  EXPECT_GE(res.score, 0.0);

  auto other = req;
  other.antigen = "MKTAYIAKQR";
  try {
    p.predict(other);
    ADD_FAILURE() << "expected MissingEmbedding";
  } catch (const RequestError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingEmbedding);
    EXPECT_EQ(e.field(), "antigen");
  }
  embedder.stop();
  t.join();
}
