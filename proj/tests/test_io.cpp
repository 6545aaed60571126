#include <gmtlab/builders.hpp>
#include <gmtlab/dvf_io.hpp>
#include <gmtlab/report.hpp>

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace gmtlab;
using Catch::Approx;

TEST_CASE("minimal one-atom DVF file") {
  std::string text =
      "DVF 1\n"
      "# a comment line\n"
      "dim 3 2\n"
      "lambda 0.5\n"
      "atoms 1\n"
      "0.1 0.2 0.3 2.0 1.5 0 0 0.5 1 0 0 0 1 0\n";
  std::istringstream in(text);
  DiscreteVarifold v = load_varifold(in);
  CHECK(v.size() == 1);
  CHECK(v.total_mass() == Approx(3.0));
  CHECK(v.lambda() == 0.5);
  CHECK(v.curvature(0)[2] == Approx(0.5));
}

TEST_CASE("atom count mismatch names the failure") {
  std::string text =
      "DVF 1\ndim 3 2\nlambda 0\natoms 2\n"
      "0 0 0 1 1 0 0 0 1 0 0 0 1 0\n";
  std::istringstream in(text);
  try {
    load_varifold(in);
    FAIL("expected parse error");
  } catch (const error& e) {
    CHECK(std::string(e.what()).find("atom count mismatch") != std::string::npos);
  }
}

TEST_CASE("malformed header is rejected") {
  std::istringstream in("DVG 1\n");
  CHECK_THROWS_AS(load_varifold(in), error);
}

TEST_CASE("slightly non-orthonormal bases are repaired with a warning") {
  std::string text =
      "DVF 1\ndim 3 2\nlambda 0\natoms 1\n"
      "0 0 0 1 1 0 0 0 1.0000001 0 0 0 1 0\n";
  std::istringstream in(text);
  std::vector<std::string> warnings;
  DiscreteVarifold v = load_varifold(in, &warnings);
  CHECK(warnings.size() == 1);
  Mat gram = v.basis_rows(0) * v.basis_rows(0).transpose();
  CHECK((gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  std::string bad =
      "DVF 1\ndim 3 2\nlambda 0\natoms 1\n"
      "0 0 0 1 1 0 0 0 1.1 0 0 0 1 0\n";
  std::istringstream in2(bad);
  CHECK_THROWS_AS(load_varifold(in2), error);
}

TEST_CASE("save/load round trip is byte identical") {
  DiscreteVarifold v = make_sphere_cap(7.0, 0.4, 0.05);
  std::ostringstream first;
  save_varifold(first, v);
  std::istringstream in(first.str());
  DiscreteVarifold reloaded = load_varifold(in);
  std::ostringstream second;
  save_varifold(second, reloaded);
  CHECK(first.str() == second.str());
  CHECK(reloaded.size() == v.size());
  CHECK(reloaded.total_mass() == Approx(v.total_mass()).margin(0.0));
}

TEST_CASE("flow round trip") {
  FlowTrack track = shrinking_sphere_track(2, -0.5, -0.1, 5, 60);
  std::ostringstream first;
  save_flow(first, track);
  std::istringstream in(first.str());
  FlowTrack reloaded = load_flow(in);
  CHECK(reloaded.size() == track.size());
  std::ostringstream second;
  save_flow(second, reloaded);
  CHECK(first.str() == second.str());
  // DVFLOW carries no transport columns: loaded tracks default to v = 0.
  CHECK(reloaded.lambda_v() == 0.0);
}

TEST_CASE("report json round trip preserves every numeric field") {
  VerificationReport rep;
  rep.scenario = "sphere";
  rep.side = "elliptic";
  rep.add("alpha_check", 0.12345678901234567, 1e-2, 1e-5, CheckStatus::Pass);
  rep.add("beta_check", -3.0000000000000004, 0.0, 0.0, CheckStatus::Fail);
  rep.add("skip_check", 0.0, 0.0, 0.0, CheckStatus::NotApplicable);
  rep.fitted.beta = 1.9871234567890123;
  rep.fitted.C = 3.25;
  rep.provenance["code_version"] = "gmtlab 1.0.0";

  auto j = report_to_json(rep);
  VerificationReport back = report_from_json(j);
  REQUIRE(back.checks.size() == rep.checks.size());
  for (size_t k = 0; k < rep.checks.size(); ++k) {
    CHECK(back.checks[k].value == rep.checks[k].value);
    CHECK(back.checks[k].threshold == rep.checks[k].threshold);
    CHECK(back.checks[k].tol_disc == rep.checks[k].tol_disc);
    CHECK(back.checks[k].status == rep.checks[k].status);
  }
  CHECK(back.fitted.beta == rep.fitted.beta);

  // json -> csv -> recovered checks keep 17 digits.
  std::string csv = report_to_csv(back);
  auto cells = checks_from_csv(csv);
  REQUIRE(cells.size() == rep.checks.size());
  for (size_t k = 0; k < cells.size(); ++k) {
    CHECK(cells[k].value == rep.checks[k].value);
    CHECK(cells[k].threshold == rep.checks[k].threshold);
  }
}

TEST_CASE("empty checks emit a valid report file") {
  VerificationReport rep;
  rep.scenario = "empty";
  rep.side = "elliptic";
  auto j = report_to_json(rep);
  CHECK(j.at("checks").is_array());
  CHECK(j.at("checks").empty());
  VerificationReport back = report_from_json(j);
  CHECK(back.checks.empty());
}
