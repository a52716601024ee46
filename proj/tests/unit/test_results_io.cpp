#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "survsplit/error.hpp"
#include "survsplit/results_io.hpp"

using namespace survsplit;
namespace fs = std::filesystem;

namespace {

std::string parse_error_message(const std::string& text) {
  std::istringstream in(text);
  try {
    read_dataset_csv(in);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("dataset csv round trip") {
  const Dataset data{{1.5, true, 0.25}, {0.125, false, 0.75}};
  std::ostringstream out;
  write_dataset_csv(out, data);
  CHECK(out.str() == "time,event,z\n1.5,1,0.25\n0.125,0,0.75\n");
  std::istringstream in(out.str() + "\n");
  CHECK(read_dataset_csv(in) == data);
}

TEST_CASE("dataset csv tolerates CRLF and spaces") {
  std::istringstream in("time, event, z\r\n1, 1, 0.5\r\n");
  const Dataset d = read_dataset_csv(in);
  REQUIRE(d.size() == 1);
  CHECK(d[0].event);
}

TEST_CASE("dataset csv errors carry line numbers") {
  CHECK(parse_error_message("") == "line 1: empty file");
  CHECK(parse_error_message("t,e,z\n").find("line 1") == 0);
  CHECK(parse_error_message("time,event,z\n").find("no data rows") != std::string::npos);
  CHECK(parse_error_message("time,event,z\n1,1,0.5\n2,yes,0.5\n").find("line 3") == 0);
  CHECK(parse_error_message("time,event,z\n1,1\n").find("line 2: expected 3 fields") == 0);
  CHECK(parse_error_message("time,event,z\n-1,1,0.5\n").find("line 2") == 0);
  CHECK(parse_error_message("time,event,z\nnan,1,0.5\n").find("line 2") == 0);
  CHECK(parse_error_message("time,event,z\n1,1,abc\n").find("line 2") == 0);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1e-300) == "1e-300");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("result file headers") {
  ReplicateRecord gs;
  gs.method = Method::GS;
  gs.n = 50;
  gs.c_hat = 0.25;
  gs.stat = 3.5;
  ReplicateRecord sss = gs;
  sss.method = Method::SSS;
  sss.a = 50.0;
  ReplicateRecord flagged = gs;
  flagged.status = RecordStatus::NoCut;
  const std::vector<ReplicateRecord> recs{gs, sss, flagged};

  std::ostringstream r;
  write_records_csv(r, recs);
  CHECK(r.str() ==
        "method,n,a,rep,c_hat,stat,status,runtime_us\n"
        "GS,50,,0,0.25,3.5,ok,0\n"
        "SSS,50,50,0,0.25,3.5,ok,0\n"
        "GS,50,,0,,,no_cut,0\n");

  std::ostringstream rc;
  write_records_csv(rc, recs, true);
  CHECK(first_line(rc.str()) == "method,n,a,rep,c_hat,stat,status,runtime_us,data_checksum");

  const auto sums = summarize(recs, 0.05);
  std::ostringstream s, h;
  write_summary_csv(s, sums);
  write_histogram_csv(h, sums);
  CHECK(first_line(s.str()) == "method,n,a,edge_eps,edge_fraction,median_c,iqr_c");
  CHECK(first_line(h.str()) == "method,n,a,bin_lo,bin_hi,count");
  const std::string hist = h.str();
  const auto lines = std::count(hist.begin(), hist.end(), '\n');
  CHECK(lines == 1 + 2 * kHistogramBins);

  VarianceRow v;
  v.n = 500;
  v.c = 0.02;
  v.var_q = 1.1;
  v.se_var = std::numeric_limits<double>::quiet_NaN();
  v.reps = 2;
  std::ostringstream vs;
  write_variance_csv(vs, std::vector<VarianceRow>{v});
  CHECK(vs.str() == "n,c,method,a,var_q,se_var,reps\n500,0.02,GS,,1.1,nan,2\n");
}

TEST_CASE("json mirrors use the csv field names") {
  ReplicateRecord rec;
  rec.method = Method::SSS;
  rec.n = 100;
  rec.a = 60.0;
  rec.c_hat = 0.4;
  const auto j = records_json(std::vector<ReplicateRecord>{rec});
  REQUIRE(j.size() == 1);
  std::vector<std::string> keys;
  for (auto it = j[0].begin(); it != j[0].end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"method", "n", "a", "rep", "c_hat", "stat", "status",
                                         "runtime_us"});
  CHECK(j[0]["a"] == 60.0);

  SplitResult sr;
  sr.c_hat = 0.5;
  sr.stat = 1.0;
  sr.n_evaluations = 1;
  const auto js = split_result_json(sr);
  CHECK(js["method"] == "GS");
  CHECK(js["a"].is_null());
  CHECK(js.contains("tie_break"));
}

TEST_CASE("atomic file writes") {
  const fs::path dir = fs::temp_directory_path() / "survsplit_io_test";
  fs::remove_all(dir);
  const std::vector<std::pair<std::string, std::string>> files{{"a.csv", "x\n"}, {"b.csv", "y\n"}};
  write_files_atomically(dir, files);
  std::ifstream a(dir / "a.csv");
  std::string line;
  std::getline(a, line);
  CHECK(line == "x");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  CHECK(entries == 2);
  fs::remove_all(dir);
}
