#include <gtest/gtest.h>

#include <cstring>
#include <string>
#include <thread>

#include "json.hpp"

#include "decayrank/decayrank.h"

namespace {

using Json = nlohmann::json;

std::string text(const dr_buffer& b) { return std::string(reinterpret_cast<const char*>(b.data), b.size); }

Json call(dr_status (*fn)(const char*, dr_format, dr_buffer*), const std::string& request) {
  dr_buffer out{nullptr, 0};
  const dr_status s = fn(request.c_str(), DR_FORMAT_JSON, &out);
  EXPECT_EQ(s, DR_OK) << dr_last_error();
  Json j = s == DR_OK ? Json::parse(text(out)) : Json();
  dr_buffer_free(&out);
  return j;
}

}  // namespace

TEST(CApi, Version) { EXPECT_STREQ(dr_version(), "1.0.0"); }

TEST(CApi, HalfLife) {
  double a = 0;
  ASSERT_EQ(dr_half_life_to_alpha(1.0, &a), DR_OK);
  EXPECT_NEAR(a, 0.5, 1e-15);
  EXPECT_EQ(dr_half_life_to_alpha(0.0, &a), DR_ERR_PARAM);
  EXPECT_NE(std::string(dr_last_error()).find("half-life"), std::string::npos);
  EXPECT_EQ(dr_half_life_to_alpha(1.0, nullptr), DR_ERR_PARAM);
}

TEST(CApi, RankerLifecycle) {
  const char* items[] = {"1", "2"};
  dr_ranker* r = nullptr;
  ASSERT_EQ(dr_ranker_create_uniform(0.9, items, 2, &r), DR_OK);
  ASSERT_EQ(dr_ranker_observe(r, "1", 1), DR_OK);
  double p = 0;
  ASSERT_EQ(dr_ranker_probability(r, "1", 1, &p), DR_OK);
  EXPECT_NEAR(p, 0.55, 1e-15);
  uint64_t step = 0;
  ASSERT_EQ(dr_ranker_step(r, &step), DR_OK);
  EXPECT_EQ(step, 1u);
  size_t size = 0;
  ASSERT_EQ(dr_ranker_size(r, &size), DR_OK);
  EXPECT_EQ(size, 2u);

  dr_buffer rep{nullptr, 0};
  ASSERT_EQ(dr_ranker_report(r, 1, DR_FORMAT_JSON, 0, &rep), DR_OK);
  const Json j = Json::parse(text(rep));
  dr_buffer_free(&rep);
  EXPECT_EQ(j["step"], 1);
  EXPECT_EQ(j["top"][0]["item"], "1");
  EXPECT_EQ(j["top"][0]["probability"], 0.55);

  ASSERT_EQ(dr_ranker_report(r, 2, DR_FORMAT_CSV, 1, &rep), DR_OK);
  EXPECT_EQ(text(rep), "step,rank,item,probability\n1,1,1,0.55\n1,2,2,0.45\n");
  dr_buffer_free(&rep);

  EXPECT_EQ(dr_ranker_report(r, 0, DR_FORMAT_JSON, 0, &rep), DR_ERR_PARAM);
  EXPECT_EQ(dr_ranker_set_alpha(r, 2.0), DR_ERR_PARAM);
  dr_ranker_destroy(r);
}

TEST(CApi, SnapshotRoundTripAndCorruption) {
  dr_ranker* r = nullptr;
  ASSERT_EQ(dr_ranker_create(0.7, &r), DR_OK);
  for (const char* e : {"x", "y", "x"}) dr_ranker_observe(r, e, std::strlen(e));
  dr_buffer snap{nullptr, 0};
  ASSERT_EQ(dr_ranker_snapshot(r, &snap), DR_OK);

  dr_ranker* back = nullptr;
  ASSERT_EQ(dr_ranker_restore(snap.data, snap.size, &back), DR_OK);
  double a = 0, b = 0;
  dr_ranker_probability(r, "x", 1, &a);
  dr_ranker_probability(back, "x", 1, &b);
  EXPECT_EQ(a, b);
  dr_ranker_destroy(back);

  snap.data[0] = 'X';
  dr_ranker* broken = nullptr;
  EXPECT_EQ(dr_ranker_restore(snap.data, snap.size, &broken), DR_ERR_FORMAT);
  EXPECT_NE(std::string(dr_last_error()).find("magic"), std::string::npos);
  EXPECT_EQ(broken, nullptr);
  dr_buffer_free(&snap);
  EXPECT_EQ(snap.data, nullptr);
  dr_ranker_destroy(r);
}

TEST(CApi, Reports) {
  const Json e = call(dr_eigen, R"({"q":[0.3,0.7]})");
  EXPECT_NEAR(e["eigenvalues"][1].get<double>(), 0.42, 1e-15);

  const Json c = call(dr_eigen, R"({"q":[0.5,0.3,0.2],"alpha":0.95,"t":8})");
  EXPECT_EQ(c["covariance"].size(), 3u);

  const Json m = call(dr_moments, R"({"alpha":0.9,"q":0.3,"order":4})");
  EXPECT_NEAR(m["values"][2].get<double>(), 0.1 / 1.9 * 0.21, 1e-16);

  const Json b = call(dr_bounds, R"({"alpha":0.99,"q":[0.5],"eps":0.1})");
  EXPECT_NEAR(b["items"][0]["bound"].get<double>(), 0.25 / 1.99, 1e-15);

  const Json s = call(dr_simulate, R"({"alpha":0.9,"q":[1.0],"steps":5,"paths":10})");
  EXPECT_EQ(s["covariance"][0][0], 0.0);

  const Json x = call(dr_enumerate, R"({"alpha":0.5,"q":[0.3,0.7],"y0":[0,1],"steps":2})");
  EXPECT_NEAR(x["mean"][0].get<double>(), 0.225, 1e-16);

  const Json g = call(dr_generalized,
                      R"({"mode":"complex","alpha":0.9,"q":[0.2,0.3,0.5],"vertices":{"roots_of_unity":3},"steps":12})");
  EXPECT_GT(g["complex_variance"].get<double>(), 0.0);

  const Json r = call(dr_regime, R"({"alpha":0.99,"x":[1,0],"p1":[0,1],"p2":[1,0],"t1":100,"t2":100})");
  EXPECT_EQ(r["mean"].size(), 2u);

  const Json o = call(dr_boost, R"({"alpha":0.99,"t1":100,"t2":100})");
  EXPECT_NEAR(o["exact"].get<double>(), 2.731999, 1e-6);
}

TEST(CApi, TextAndCsv) {
  dr_buffer out{nullptr, 0};
  ASSERT_EQ(dr_bounds(R"({"alpha":0.99,"q":[0.5],"eps":0.1})", DR_FORMAT_TEXT, &out), DR_OK);
  EXPECT_NE(text(out).find("0.4"), std::string::npos);
  dr_buffer_free(&out);
  ASSERT_EQ(dr_moments(R"({"alpha":0.9,"q":0.3,"order":3})", DR_FORMAT_CSV, &out), DR_OK);
  EXPECT_EQ(text(out).substr(0, 19), "quantity,i,j,value\n");
  dr_buffer_free(&out);
  EXPECT_EQ(dr_regime(R"({"alpha":0.99,"x":[1,0],"p1":[0,1],"p2":[1,0],"t1":1,"t2":1})", DR_FORMAT_CSV, &out),
            DR_ERR_PARAM);
}

TEST(CApi, ErrorCodes) {
  dr_buffer out{nullptr, 0};
  EXPECT_EQ(dr_eigen("{not json", DR_FORMAT_JSON, &out), DR_ERR_FORMAT);
  EXPECT_EQ(dr_eigen(R"({"q":[0.5,0.6]})", DR_FORMAT_JSON, &out), DR_ERR_PARAM);
  EXPECT_EQ(dr_bounds(R"({"alpha":0.9,"q":[0.5]})", DR_FORMAT_JSON, &out), DR_ERR_PARAM);
  EXPECT_NE(std::string(dr_last_error()).find("eps"), std::string::npos);
  EXPECT_EQ(dr_enumerate(R"({"alpha":0.5,"q":[0.5,0.5],"steps":30})", DR_FORMAT_JSON, &out), DR_ERR_BUDGET);
  EXPECT_EQ(dr_eigen(nullptr, DR_FORMAT_JSON, &out), DR_ERR_PARAM);
  EXPECT_EQ(dr_eigen(R"({"q":[0.5,0.5]})", DR_FORMAT_JSON, nullptr), DR_ERR_PARAM);
  EXPECT_EQ(out.data, nullptr);
}

TEST(CApi, LastErrorIsPerThread) {
  dr_buffer out{nullptr, 0};
  ASSERT_EQ(dr_eigen("{bad", DR_FORMAT_JSON, &out), DR_ERR_FORMAT);
  const std::string mine = dr_last_error();
  std::thread([] {
    double a;
    dr_half_life_to_alpha(-1, &a);
  }).join();
  EXPECT_EQ(mine, dr_last_error());
}
