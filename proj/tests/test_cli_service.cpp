#include <gtest/gtest.h>

#include <httplib.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "tonal/api.h"
#include "tonal/service.h"

using namespace tonal;
namespace fs = std::filesystem;

namespace {

const char* kChordsDoc = R"({"chords": [["C","E","G"],["F","A","C"],["G","B","D","F"],["A","C","E"],["D","F","A"],["G","B","D"],["C","E","G"]],
  "melody": [{"midi": 72, "duration_beats": 1}, {"midi": 72, "duration_beats": 1}, {"midi": 71, "duration_beats": 1},
             null, {"midi": 74, "duration_beats": 1}, {"midi": 74, "duration_beats": 1}, {"midi": 72, "duration_beats": 1}]})";

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

class CliService : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("tonal_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    context_ = new api::Context(Json{{"note", "test manifest"}});
    server_ = service::make_server(*context_).release();
    port_ = server_->bind_to_any_port("127.0.0.1");
    thread_ = new std::thread([] { server_->listen_after_bind(); });
    server_->wait_until_ready();
  }

  static void TearDownTestSuite() {
    server_->stop();
    thread_->join();
    delete thread_;
    delete server_;
    delete context_;
    fs::remove_all(dir_);
  }

  static httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

  static fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  static CliRun cli(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(TONAL_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  static inline fs::path dir_;
  static inline api::Context* context_ = nullptr;
  static inline httplib::Server* server_ = nullptr;
  static inline std::thread* thread_ = nullptr;
  static inline int port_ = 0;
};

}  // namespace

TEST_F(CliService, AnalyzeMatchesCli) {
  auto c = client();
  const auto res = c.Post("/analyze", kChordsDoc, "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const Json doc = Json::parse(res->body);
  EXPECT_EQ(doc["tonality"], 0);
  EXPECT_EQ(doc["length"], 7);
  const auto run = cli("analyze " + write("chords.json", kChordsDoc).string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, res->body);
}

TEST_F(CliService, RecoverRoundTripAndDeterminism) {
  auto c = client();
  const auto features = c.Post("/analyze", kChordsDoc, "application/json");
  ASSERT_TRUE(features);
  const auto first = c.Post("/recover", features->body, "application/json");
  const auto second = c.Post("/recover", features->body, "application/json");
  ASSERT_TRUE(first);
  ASSERT_TRUE(second);
  EXPECT_EQ(first->status, 200);
  EXPECT_EQ(first->body, second->body);
  const Json r = Json::parse(first->body);
  for (const auto& rd : r["per_step_rd"]) EXPECT_NEAR(rd.get<double>(), 0.0, 1e-9);
  EXPECT_EQ(r["chords"].size(), 7u);

  const auto run = cli("recover " + write("features.json", features->body).string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, first->body);

  const Json wrapped = {{"features", Json::parse(features->body)},
                        {"config", {{"beam_width", 4}, {"filter", "min=3,max=3"}, {"threads", 2}}}};
  const auto filtered = c.Post("/recover", wrapped.dump(), "application/json");
  ASSERT_TRUE(filtered);
  EXPECT_EQ(filtered->status, 200);
  for (const auto& chord : Json::parse(filtered->body)["chords"]) EXPECT_EQ(chord.size(), 3u);
  const auto filtered_cli = cli("recover " + (dir_ / "features.json").string() +
                                " --beam-width 4 --min-notes 3 --max-notes 3 --threads 2");
  EXPECT_EQ(filtered_cli.out, filtered->body);
}

TEST_F(CliService, RecoverWritesMidi) {
  auto c = client();
  const auto features = c.Post("/analyze", kChordsDoc, "application/json");
  const auto path = write("f.json", features->body);
  const auto run = cli("recover " + path.string() + " --out " + (dir_ / "r.json").string() + " --midi " +
                       (dir_ / "r.mid").string());
  EXPECT_EQ(run.code, 0) << run.err;
  const std::string midi = slurp(dir_ / "r.mid");
  EXPECT_EQ(midi.substr(0, 4), "MThd");
  EXPECT_TRUE(Json::parse(slurp(dir_ / "r.json")).contains("chords"));
}

TEST_F(CliService, EditMatchesCli) {
  auto c = client();
  const auto features = c.Post("/analyze", kChordsDoc, "application/json");
  const Json edits = Json::array({{{"target", "tension"}, {"op", "scale"}, {"segment", {0, 2}}, {"value", 1.5}}});
  const Json body = {{"features", Json::parse(features->body)}, {"edits", edits}};
  const auto res = c.Post("/edit", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const Json out = Json::parse(res->body);
  EXPECT_NEAR(out["tension"][0].get<double>(), 1.5 * Json::parse(features->body)["tension"][0].get<double>(),
              1e-12);
  const auto run = cli("edit " + write("fe.json", features->body).string() + " --edits " +
                       write("edits.json", edits.dump()).string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, res->body);
}

TEST_F(CliService, MetricsMatchCli) {
  auto c = client();
  const Json piece = Json::parse(kChordsDoc);
  const Json body = {{"pieces", Json::array({piece, piece, piece})}};
  const auto res = c.Post("/metrics", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  const Json m = Json::parse(res->body);
  EXPECT_NEAR(m["mean_cc"].get<double>(), 6.0 / 7.0, 1e-12);
  EXPECT_EQ(m["sample_count"], 3);
  const auto run = cli("eval --pieces " + write("pieces.json", body.dump()).string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(run.out, res->body);
}

TEST_F(CliService, LibraryTriads) {
  auto c = client();
  const auto res = c.Get("/library?filter=min%3D3%2Cmax%3D3%2Cquality%3Dmaj%7Cmin");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  std::istringstream lines(res->body);
  std::string line;
  int n = 0;
  while (std::getline(lines, line)) {
    const Json e = Json::parse(line);
    EXPECT_EQ(e["set"].size(), 3u);
    ++n;
  }
  EXPECT_EQ(n, 24);
  const auto run = cli("library --filter 'min=3,max=3,quality=maj|min'");
  EXPECT_EQ(run.code, 0);
  EXPECT_EQ(run.out, res->body);
  const auto full = c.Get("/library");
  EXPECT_EQ(std::count(full->body.begin(), full->body.end(), '\n'), 1573);
}

TEST_F(CliService, ErrorStatuses) {
  auto c = client();
  auto res = c.Post("/recover", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(Json::parse(res->body)["error"], "malformed_body");

  res = c.Post("/recover", R"({"version": 1, "tonality": 0, "length": 2, "tension": [1], "distance": [0], "strain": [1]})",
               "application/json");
  EXPECT_EQ(res->status, 422);

  res = c.Post("/recover", R"({"features": {}, "config": {"beam_width": 0}})", "application/json");
  EXPECT_EQ(res->status, 422);

  res = c.Get("/library?filter=min%3D9");
  EXPECT_EQ(res->status, 422);

  res = c.Post("/analyze", std::string(service::kMaxBodyBytes + 16, ' '), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);

  res = c.Get("/nowhere");
  EXPECT_EQ(res->status, 404);
}

TEST_F(CliService, Manifest) {
  auto c = client();
  auto res = c.Get("/manifest");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)["note"], "test manifest");

  api::Context bare;
  auto server = service::make_server(bare);
  const int port = server->bind_to_any_port("127.0.0.1");
  std::thread t([&] { server->listen_after_bind(); });
  server->wait_until_ready();
  httplib::Client other("127.0.0.1", port);
  res = other.Get("/manifest");
  EXPECT_EQ(res->status, 404);
  server->stop();
  t.join();
}

TEST_F(CliService, CliExitCodes) {
  auto run = cli("recover " + write("bad.json", "{").string());
  EXPECT_EQ(run.code, 1);
  EXPECT_TRUE(Json::parse(run.err).contains("error"));

  auto c = client();
  const auto features = c.Post("/analyze", kChordsDoc, "application/json");
  const auto path = write("ok.json", features->body);
  EXPECT_EQ(cli("recover " + path.string() + " --tonality 24").code, 2);
  EXPECT_EQ(cli("recover " + path.string() + " --beam-width 0").code, 2);
  EXPECT_EQ(cli("recover " + path.string() + " --min-notes 6").code, 2);
  EXPECT_EQ(cli("recover --no-such-flag").code, 2);
  EXPECT_EQ(cli("recover /nonexistent.json").code, 1);
  EXPECT_EQ(cli("analyze " + write("c.json", kChordsDoc).string() + " --tonality 'A minor'").code, 0);
}

TEST_F(CliService, SpellAndNoise) {
  const auto run = cli("spell " + write("gac.json", R"([["Gb", "A", "C"]])").string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(Json::parse(run.out), Json::parse("[[6,3,0]]"));

  Manifest m;
  m.feature_ranges = {{1, 4}, {0, 3}, {0, 2}};
  m.noise_ranges = {{1.5, 3.5}, {0.5, 2.5}, {0.5, 1.5}};
  const auto mpath = write("m.json", dump(to_json(m)));
  const auto noise = cli("noise --ranges-from " + mpath.string() + " --length 8 --seed 3 --tonality 5");
  EXPECT_EQ(noise.code, 0) << noise.err;
  const Json doc = Json::parse(noise.out);
  EXPECT_EQ(doc["length"], 8);
  EXPECT_EQ(doc["tonality"], 5);
  for (const auto& v : doc["tension"]) {
    EXPECT_GE(v.get<double>(), 1.5);
    EXPECT_LE(v.get<double>(), 3.5);
  }
  EXPECT_EQ(cli("noise --ranges-from " + mpath.string() + " --length 8 --seed 3 --tonality 5").out, noise.out);
  const auto wide = cli("noise --ranges-from " + mpath.string() + " --length 8 --range-kind minmax");
  EXPECT_EQ(wide.code, 0);
  EXPECT_EQ(cli("noise --ranges-from " + mpath.string() + " --range-kind bogus").code, 2);
}

TEST_F(CliService, DatasetBuild) {
  const fs::path corpus = dir_ / "corpus";
  fs::create_directories(corpus);
  for (const auto* name : {"bwv1.6.json", "bwv10.7.json"}) {
    fs::copy_file(fs::path(TONAL_TEST_DATA) / "chorales" / name, corpus / name, fs::copy_options::overwrite_existing);
  }
  const auto cfg = write("cfg.json", R"({"key_balance": false, "transposition_steps": [0, 2]})");
  const auto run = cli("dataset build " + corpus.string() + " --config " + cfg.string() + " --out " +
                       (dir_ / "ds.jsonl").string());
  EXPECT_EQ(run.code, 0) << run.err;
  EXPECT_TRUE(fs::exists(dir_ / "ds.manifest.json"));
  EXPECT_FALSE(read_samples(dir_ / "ds.jsonl").empty());
}
