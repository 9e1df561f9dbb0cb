#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "calib.h"

namespace {

struct Handle {
  calib_dataset* ds = nullptr;
  ~Handle() { calib_dataset_free(ds); }
};

std::string tmp_path(const char* name) {
  return std::string("/tmp/calib_capi_") + name;
}

}  // namespace

TEST_CASE("dataset parse, save, load round trip") {
  const char* text =
      "{\"v\":[0.25,0.75],\"y\":1}\n"
      "{\"v\":[0.5,0.5],\"y\":0}\n";
  Handle ds;
  REQUIRE(calib_dataset_parse(text, &ds.ds) == CALIB_OK);
  CHECK(calib_dataset_size(ds.ds) == 2);
  CHECK(calib_dataset_dim(ds.ds) == 2);

  const std::string path = tmp_path("roundtrip.jsonl");
  REQUIRE(calib_dataset_save(ds.ds, path.c_str()) == CALIB_OK);
  Handle ds2;
  REQUIRE(calib_dataset_load(path.c_str(), &ds2.ds) == CALIB_OK);
  CHECK(calib_dataset_size(ds2.ds) == 2);
}

TEST_CASE("dataset parse failures map to CALIB_EPARSE") {
  calib_dataset* ds = nullptr;
  CHECK(calib_dataset_parse("", &ds) == CALIB_EPARSE);
  CHECK(calib_dataset_parse("{\"v\":[0.5,0.5]}\n", &ds) == CALIB_EPARSE);
  CHECK(calib_dataset_parse("{\"v\":[0.5,0.6],\"y\":0}\n", &ds) ==
        CALIB_EPARSE);
  CHECK(calib_dataset_parse("{\"v\":[0.5,0.5],\"y\":7}\n", &ds) ==
        CALIB_EPARSE);
  CHECK(calib_dataset_parse("not json\n", &ds) == CALIB_EPARSE);
  CHECK(calib_dataset_parse("{\"v\":[1e999,0.5],\"y\":0}\n", &ds) ==
        CALIB_EPARSE);
  CHECK(std::string(calib_last_error()).size() > 0);
  CHECK(calib_dataset_load("/nonexistent/x.jsonl", &ds) == CALIB_EPARSE);
}

TEST_CASE("synth then measure reproduces the certified value") {
  Handle ds;
  double certified = 0.0;
  REQUIRE(calib_synth("subset-violation",
                      "k=4 T=0,1 gamma=0.75 n=0 seed=1 exact=1", &ds.ds,
                      &certified) == CALIB_OK);
  CHECK(certified == doctest::Approx(0.3).epsilon(1e-12));

  calib_report* rep = nullptr;
  REQUIRE(calib_measure(ds.ds, "smce-subset", "T=0,1", &rep) == CALIB_OK);
  CHECK(calib_report_value(rep) == doctest::Approx(certified).epsilon(1e-9));
  const int need = calib_report_text(rep, nullptr, 0);
  std::string text(need + 1, '\0');
  calib_report_text(rep, text.data(), text.size());
  CHECK(text.find("measure=smce_subset") != std::string::npos);
  calib_report_free(rep);
}

TEST_CASE("unknown names are parse errors") {
  Handle ds;
  REQUIRE(calib_dataset_parse("{\"v\":[0.5,0.5],\"y\":0}\n", &ds.ds) ==
          CALIB_OK);
  calib_report* rep = nullptr;
  CHECK(calib_measure(ds.ds, "nope", "", &rep) == CALIB_EPARSE);
  calib_witness* w = nullptr;
  CHECK(calib_audit(ds.ds, "nope", 0.1, "", &w, nullptr) == CALIB_EPARSE);
  CHECK(calib_synth("nope", "", &ds.ds, nullptr) == CALIB_EPARSE);
}

TEST_CASE("guards surface as CALIB_EGUARD") {
  // 17 distinct prediction groups trip the decision brute-force guard.
  std::string text;
  for (int i = 0; i < 17; ++i) {
    const double p = 0.2 + 0.03 * i;
    char line[96];
    std::snprintf(line, sizeof(line), "{\"v\":[%.6f,%.6f],\"y\":0}\n", p,
                  1.0 - p);
    text += line;
  }
  Handle ds;
  REQUIRE(calib_dataset_parse(text.c_str(), &ds.ds) == CALIB_OK);
  calib_report* rep = nullptr;
  CHECK(calib_measure(ds.ds, "decision", "", &rep) == CALIB_EGUARD);

  // Worst-case r (no override) implies an astronomical sample budget.
  calib_witness* w = nullptr;
  CHECK(calib_audit(ds.ds, "psmooth", 0.3, "m=2", &w, nullptr) ==
        CALIB_EGUARD);
}

TEST_CASE("audit, witness round trip, recalibrate, apply") {
  Handle ds;
  double certified = 0.0;
  REQUIRE(calib_synth("subset-violation",
                      "k=2 T=0 gamma=0.4 n=0 seed=2 exact=1", &ds.ds,
                      &certified) == CALIB_OK);

  calib_witness* w = nullptr;
  calib_report* rep = nullptr;
  REQUIRE(calib_audit(ds.ds, "lowdeg", 0.2, "degree=2 r=1 exact=1", &w,
                      &rep) == CALIB_OK);
  CHECK(calib_witness_correlation(w) > 0.0);
  const std::string wpath = tmp_path("witness.txt");
  REQUIRE(calib_witness_save(w, wpath.c_str()) == CALIB_OK);
  calib_witness* w2 = nullptr;
  REQUIRE(calib_witness_load(wpath.c_str(), &w2) == CALIB_OK);
  CHECK(calib_witness_correlation(w2) == calib_witness_correlation(w));
  const double v[2] = {0.5, 0.5};
  double out1[2], out2[2];
  REQUIRE(calib_witness_eval(w, v, 2, out1) == CALIB_OK);
  REQUIRE(calib_witness_eval(w2, v, 2, out2) == CALIB_OK);
  CHECK(out1[0] == out2[0]);
  CHECK(out1[1] == out2[1]);
  calib_witness_free(w);
  calib_witness_free(w2);
  calib_report_free(rep);

  Handle recal;
  char* trace = nullptr;
  char* pipeline = nullptr;
  REQUIRE(calib_recalibrate(ds.ds, "lowdeg", 0.2, 0.05,
                            "degree=2 r=1 exact=1", &recal.ds, &trace,
                            &pipeline) == CALIB_OK);
  CHECK(std::string(trace).find("iter,squared_loss") == 0);

  Handle replay;
  REQUIRE(calib_apply_pipeline(pipeline, ds.ds, &replay.ds) == CALIB_OK);
  const std::string p1 = tmp_path("recal.jsonl"), p2 = tmp_path("replay.jsonl");
  REQUIRE(calib_dataset_save(recal.ds, p1.c_str()) == CALIB_OK);
  REQUIRE(calib_dataset_save(replay.ds, p2.c_str()) == CALIB_OK);
  std::FILE* f1 = std::fopen(p1.c_str(), "rb");
  std::FILE* f2 = std::fopen(p2.c_str(), "rb");
  REQUIRE(f1 != nullptr);
  REQUIRE(f2 != nullptr);
  int c1, c2;
  do {
    c1 = std::fgetc(f1);
    c2 = std::fgetc(f2);
    CHECK(c1 == c2);
  } while (c1 != EOF && c2 != EOF);
  std::fclose(f1);
  std::fclose(f2);

  calib_string_free(trace);
  calib_string_free(pipeline);
}

TEST_CASE("lab CSV interfaces") {
  char* csv = nullptr;
  REQUIRE(calib_lab_packing("k=3 eps=0.25 seed=1", &csv) == CALIB_OK);
  CHECK(std::string(csv).find("k,eps,size") == 0);
  calib_string_free(csv);

  REQUIRE(calib_lab_birthday("k=3 eps=0.2 n=1,4 trials=150 seed=1", &csv) ==
          CALIB_OK);
  const std::string table(csv);
  CHECK(table.find("gap") != std::string::npos);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);  // header + 2 rows
  calib_string_free(csv);
}
